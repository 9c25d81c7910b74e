use exshift::analysis::{run_analysis, AnalysisConfig};
use exshift::bracket::{inner_sft, oracle_language, outer_sft};
use exshift::certify::{certify_stabilization, verify_certificate};
use exshift::components::check_component_bound;
use exshift::exec::Execution;
use exshift::genericity::{random_hole1d, random_rect_hole, rng, sample_rectangle_genericity};
use exshift::system::SystemSpec;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn brackets_nest(seed in any::<u64>(), depth in 1usize..6) {
        let sys = SystemSpec::circle(2);
        let hole = random_hole1d(&mut rng(seed), 2, 4);
        let inner = inner_sft(&sys, &hole, depth).unwrap();
        let outer = outer_sft(&sys, &hole, depth).unwrap();
        for len in 1..=depth + 2 {
            prop_assert!(inner.language(len).is_subset(&outer.language(len)));
        }
    }

    #[test]
    fn oracle_sits_above_inner(seed in any::<u64>(), depth in 1usize..5) {
        let sys = SystemSpec::circle(2);
        let hole = random_hole1d(&mut rng(seed), 2, 3);
        let inner = inner_sft(&sys, &hole, depth).unwrap();
        let oracle = oracle_language(&sys, &hole, depth).unwrap();
        prop_assert!(inner.language(depth).is_subset(&oracle));
    }

    #[test]
    fn certified_holes_meet_component_bound(seed in any::<u64>()) {
        let sys = SystemSpec::circle(2);
        let hole = random_hole1d(&mut rng(seed), 2, 3);
        if certify_stabilization(&sys, &hole, 8).unwrap().is_certified() {
            let r = check_component_bound(&sys, hole.intervals().unwrap(), 8).unwrap();
            prop_assert!(!r.provisional);
            prop_assert!(r.satisfied, "{r:?}");
        }
    }

    #[test]
    fn certificates_verify(seed in any::<u64>()) {
        let sys = SystemSpec::baker(2);
        let hole = random_rect_hole(&mut rng(seed), 1, 3).into_hole();
        if let Some(c) = certify_stabilization(&sys, &hole, 5).unwrap().certificate() {
            prop_assert!(verify_certificate(&sys, &hole, c).unwrap());
        }
    }
}

#[test]
fn execution_modes_agree() {
    let p = sample_rectangle_genericity(3, 24, 5, &[3, 6], Execution::Parallel).unwrap();
    let s = sample_rectangle_genericity(3, 24, 5, &[3, 6], Execution::Sequential).unwrap();
    assert_eq!(serde_json::to_string(&p).unwrap(), serde_json::to_string(&s).unwrap());
}

#[test]
fn config_round_trips() {
    let text = r#"{"system":{"kind":"baker","branches":3},"hole":{"rects":[{"x":["1/3","2/3"],"y":["0","1/9"]}]},"depth":3,"stages":["certify","witness"]}"#;
    let cfg = AnalysisConfig::parse(text).unwrap();
    let again = AnalysisConfig::parse(&serde_json::to_string(&cfg).unwrap()).unwrap();
    assert_eq!(cfg, again);
    let r = run_analysis(&cfg);
    // the Baker even-shift witness is only defined for two branches
    assert!(r.is_err());
}
