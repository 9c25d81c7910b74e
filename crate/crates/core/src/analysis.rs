//! Config-driven analysis pipeline and the JSON report shapes shared with the
//! command-line tool.

use crate::beta::{
    beta_code, beta_language, classify_beta_threshold, is_beta_number, verify_beta_res, BetaClass,
    BetaThreshold, VerificationReport,
};
use crate::bracket::bracket_report;
use crate::certify::{certify_escape, certify_stabilization, Certification, EscapeWitness, Method};
use crate::components::{
    check_component_bound, format_entropy, transitive_filtration, BoundReport, ComponentForest,
};
use crate::error::{Error, Result};
use crate::even::{ies_even_witness, res_even_witness, Witness};
use crate::hole::{Hole, HoleJson};
use crate::sft::Sft;
use crate::system::{SystemKind, SystemSpec};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::time::Instant;

pub const DEFAULT_DEPTH: usize = 8;

/// Parses JSON, reporting failures as schema errors at a JSON pointer.
pub fn from_json_str<T: DeserializeOwned>(text: &str) -> Result<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let mut pointer = String::new();
        for seg in e.path().iter() {
            use serde_path_to_error::Segment;
            match seg {
                Segment::Seq { index } => pointer.push_str(&format!("/{index}")),
                Segment::Map { key } => {
                    pointer.push('/');
                    pointer.push_str(&key.replace('~', "~0").replace('/', "~1"));
                }
                Segment::Enum { variant } => pointer.push_str(&format!("/{variant}")),
                Segment::Unknown => pointer.push_str("/?"),
            }
        }
        Error::Schema {
            pointer,
            message: e.into_inner().to_string(),
        }
    })
}

fn at(pointer: &str, e: Error) -> Error {
    match e {
        Error::Schema { .. } => e,
        other => Error::Schema {
            pointer: pointer.into(),
            message: other.to_string(),
        },
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    Bracket,
    Certify,
    Components,
    Filtration,
    Beta,
    Witness,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BetaConfig {
    pub t: String,
    #[serde(default)]
    pub branches: Option<usize>,
    #[serde(default)]
    pub language_len: Option<usize>,
    #[serde(default)]
    pub verify_res: bool,
}

fn default_depth() -> usize {
    DEFAULT_DEPTH
}

fn default_stages() -> Vec<Stage> {
    vec![Stage::Bracket, Stage::Certify, Stage::Components]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisConfig {
    pub system: SystemSpec,
    #[serde(default)]
    pub hole: Option<HoleJson>,
    #[serde(default = "default_depth")]
    pub depth: usize,
    #[serde(default = "default_stages")]
    pub stages: Vec<Stage>,
    #[serde(default)]
    pub beta: Option<BetaConfig>,
    /// Adds wall-clock timings, which makes reports differ between runs.
    #[serde(default)]
    pub timings: bool,
}

impl AnalysisConfig {
    pub fn parse(text: &str) -> Result<AnalysisConfig> {
        let cfg: AnalysisConfig = from_json_str(text)?;
        cfg.system.validate().map_err(|e| at("/system/branches", e))?;
        if cfg.depth == 0 {
            return Err(at("/depth", Error::InvalidArgument("depth must be at least 1".into())));
        }
        if cfg.stages.contains(&Stage::Beta) && cfg.beta.is_none() {
            return Err(at("/beta", Error::InvalidArgument("the beta stage needs a beta section".into())));
        }
        Ok(cfg)
    }

    /// The normalized hole and its normalization warnings.
    pub fn hole(&self) -> Result<(Hole, Vec<String>)> {
        let (hole, warnings) = match &self.hole {
            Some(json) => Hole::from_json(json).map_err(|e| at("/hole", e))?,
            None => (Hole::Intervals(crate::hole::Hole1D::empty()), Vec::new()),
        };
        hole.check_system(&self.system).map_err(|e| at("/hole", e))?;
        Ok((hole, warnings))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SftSummary {
    pub window: usize,
    pub vertices: usize,
    pub edges: usize,
    pub entropy: Option<String>,
    pub minimal_forbidden: Vec<String>,
}

impl SftSummary {
    pub fn new(s: &Sft) -> Result<SftSummary> {
        Ok(SftSummary {
            window: s.window(),
            vertices: s.vertex_count(),
            edges: s.edge_count(),
            entropy: format_entropy(s.entropy()?),
            minimal_forbidden: s.minimal_forbidden_words().iter().map(|w| w.to_string()).collect(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BracketSummary {
    pub depth: usize,
    pub inner: SftSummary,
    pub outer: SftSummary,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum CertificateReport {
    Certified {
        method: &'static str,
        depth: usize,
        forbidden: Vec<String>,
        entropy: Option<String>,
        #[serde(skip_serializing_if = "Vec::is_empty")]
        witnesses: Vec<EscapeWitness>,
    },
    Unknown {
        reason: String,
    },
}

impl CertificateReport {
    pub fn new(c: &Certification) -> Result<CertificateReport> {
        Ok(match c {
            Certification::Certified(cert) => {
                let (method, witnesses) = match &cert.method {
                    Method::Stabilization { .. } => ("stabilization", Vec::new()),
                    Method::Escape { witnesses, .. } => ("escape", witnesses.clone()),
                };
                CertificateReport::Certified {
                    method,
                    depth: cert.depth(),
                    forbidden: cert.sft.minimal_forbidden_words().iter().map(|w| w.to_string()).collect(),
                    entropy: format_entropy(cert.sft.entropy()?),
                    witnesses,
                }
            }
            Certification::Unknown { reason } => CertificateReport::Unknown {
                reason: reason.clone(),
            },
        })
    }

    pub fn is_certified(&self) -> bool {
        matches!(self, CertificateReport::Certified { .. })
    }
}

/// Escape first, stabilization as the fallback.
pub fn certify(sys: &SystemSpec, hole: &Hole, depth: usize) -> Result<Certification> {
    match certify_escape(sys, hole, depth)? {
        c @ Certification::Certified(_) => Ok(c),
        Certification::Unknown { .. } => certify_stabilization(sys, hole, depth),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComponentSummary {
    pub vertices: usize,
    pub countable: bool,
    pub entropy: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComponentsReport {
    pub depth: usize,
    pub provisional: bool,
    pub components: Vec<ComponentSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bound: Option<BoundReport>,
}

/// Components of the certified shift, or of the deepest inner bracket.
pub fn components_report(sys: &SystemSpec, hole: &Hole, depth: usize) -> Result<ComponentsReport> {
    let (sft, d, provisional) = match certify_stabilization(sys, hole, depth)? {
        Certification::Certified(c) => {
            let d = c.depth();
            (c.sft, d, false)
        }
        Certification::Unknown { .. } => (crate::bracket::inner_sft(sys, hole, depth)?, depth, true),
    };
    let components = sft
        .components()
        .iter()
        .map(|c| {
            Ok(ComponentSummary {
                vertices: c.vertex_count(),
                countable: c.is_single_cycle(),
                entropy: format_entropy(c.entropy()?),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let bound = match sys.kind {
        SystemKind::Circle => Some(check_component_bound(sys, hole.intervals()?, depth)?),
        SystemKind::Baker => None,
    };
    Ok(ComponentsReport {
        depth: d,
        provisional,
        components,
        bound,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BetaReport {
    pub threshold: BetaThreshold,
    pub is_beta: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failure_index: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub class: Option<BetaClass>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub code: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub language: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verification: Option<VerificationReport>,
}

/// Beta-number check plus the requested extras; extras are skipped for
/// thresholds that are not beta-numbers.
pub fn beta_report(
    bt: &BetaThreshold,
    classify: bool,
    language_len: Option<usize>,
    verify_res: bool,
) -> Result<BetaReport> {
    let check = is_beta_number(bt)?;
    let mut report = BetaReport {
        threshold: bt.clone(),
        is_beta: check.is_beta,
        failure_index: check.failure_index,
        class: None,
        code: None,
        language: None,
        verification: None,
    };
    if !check.is_beta {
        return Ok(report);
    }
    if classify {
        report.class = Some(classify_beta_threshold(bt)?);
    }
    if let Some(len) = language_len {
        report.code = Some(beta_code(bt, len)?.to_string());
        report.language = Some(beta_language(bt, len)?.iter().map(|w| w.to_string()).collect());
        if verify_res {
            report.verification = Some(verify_beta_res(bt, len)?);
        }
    } else if verify_res {
        report.verification = Some(verify_beta_res(bt, DEFAULT_DEPTH)?);
    }
    Ok(report)
}

/// The even-shift obstruction for the hole in its own system.
pub fn even_witness(sys: &SystemSpec, hole: &Hole) -> Result<Witness> {
    match sys.kind {
        SystemKind::Circle => ies_even_witness(hole.intervals()?),
        SystemKind::Baker => res_even_witness(sys, &hole.rects()),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub system: SystemSpec,
    pub hole: Hole,
    pub depth: usize,
    pub warnings: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bracket: Option<BracketSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<CertificateReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub components: Option<ComponentsReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub filtration: Option<ComponentForest>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<BetaReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    /// Milliseconds per stage.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings: Option<BTreeMap<Stage, f64>>,
}

pub fn run_analysis(cfg: &AnalysisConfig) -> Result<Report> {
    let (hole, warnings) = cfg.hole()?;
    let sys = cfg.system;
    let mut report = Report {
        system: sys,
        hole: hole.clone(),
        depth: cfg.depth,
        warnings,
        bracket: None,
        certificate: None,
        components: None,
        filtration: None,
        beta: None,
        witness: None,
        timings: cfg.timings.then(BTreeMap::new),
    };
    let mut stages = cfg.stages.clone();
    stages.sort();
    stages.dedup();
    for stage in stages {
        let start = Instant::now();
        match stage {
            Stage::Bracket => {
                let b = bracket_report(&sys, &hole, cfg.depth)?;
                report.bracket = Some(BracketSummary {
                    depth: b.depth,
                    inner: SftSummary::new(&b.inner)?,
                    outer: SftSummary::new(&b.outer)?,
                });
            }
            Stage::Certify => {
                report.certificate = Some(CertificateReport::new(&certify(&sys, &hole, cfg.depth)?)?);
            }
            Stage::Components => {
                report.components = Some(components_report(&sys, &hole, cfg.depth)?);
            }
            Stage::Filtration => {
                report.filtration = Some(transitive_filtration(&sys, &hole, cfg.depth)?);
            }
            Stage::Beta => {
                let b = cfg.beta.as_ref().expect("checked at parse time");
                let bt = BetaThreshold::parse(&b.t, b.branches.unwrap_or(sys.branches))
                    .map_err(|e| at("/beta/t", e))?;
                report.beta = Some(beta_report(&bt, true, b.language_len, b.verify_res)?);
            }
            Stage::Witness => {
                report.witness = Some(even_witness(&sys, &hole)?);
            }
        }
        if let Some(t) = report.timings.as_mut() {
            t.insert(stage, start.elapsed().as_secs_f64() * 1e3);
        }
    }
    Ok(report)
}

/// Anything with a DOT rendering.
pub enum DotSource<'a> {
    Sft(&'a Sft),
    Forest(&'a ComponentForest),
}

pub fn export_dot(object: DotSource<'_>) -> String {
    match object {
        DotSource::Sft(s) => s.to_dot(),
        DotSource::Forest(f) => f.to_dot(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sft::{sft_build, Sided};
    use crate::word::Word;

    const GOLDEN: &str = r#"{"system":{"kind":"circle","branches":2},"hole":{"intervals":[["3/4","1"]]}}"#;

    #[test]
    fn golden_mean_report() {
        let cfg = AnalysisConfig::parse(GOLDEN).unwrap();
        let r = run_analysis(&cfg).unwrap();
        match r.certificate.as_ref().unwrap() {
            CertificateReport::Certified { depth, entropy, forbidden, .. } => {
                assert_eq!(*depth, 2);
                assert_eq!(entropy.as_deref(), Some("0.4812118251"));
                assert_eq!(forbidden, &["11"]);
            }
            other => panic!("{other:?}"),
        }
        let json = serde_json::to_string(&r).unwrap();
        assert!(json.contains("\"hole\":{\"intervals\":[[\"3/4\",\"1\"]]}"));
        assert!(!json.contains("timings"));
        assert_eq!(json, serde_json::to_string(&run_analysis(&cfg).unwrap()).unwrap());
    }

    #[test]
    fn overlapping_intervals_warn() {
        let cfg = AnalysisConfig::parse(
            r#"{"system":{"kind":"circle","branches":2},"hole":{"intervals":[["1/4","1/2"],["3/8","3/4"]]},"stages":["certify"]}"#,
        )
        .unwrap();
        let r = run_analysis(&cfg).unwrap();
        assert_eq!(r.warnings.len(), 1);
        assert_eq!(serde_json::to_string(&r.hole).unwrap(), r#"{"intervals":[["1/4","3/4"]]}"#);
    }

    #[test]
    fn schema_errors_carry_pointers() {
        let e = AnalysisConfig::parse(r#"{"system":{"kind":"torus","branches":2}}"#).unwrap_err();
        assert!(matches!(&e, Error::Schema { pointer, .. } if pointer == "/system/kind"), "{e}");
        let e = AnalysisConfig::parse(r#"{"system":{"kind":"circle","branches":1}}"#).unwrap_err();
        assert!(matches!(&e, Error::Schema { pointer, .. } if pointer == "/system/branches"));
        let e = AnalysisConfig::parse(r#"{"system":{"kind":"circle","branches":2},"stages":["nope"]}"#)
            .unwrap_err();
        assert!(matches!(&e, Error::Schema { pointer, .. } if pointer == "/stages/0"), "{e}");
        let cfg = AnalysisConfig::parse(
            r#"{"system":{"kind":"circle","branches":2},"hole":{"intervals":[["3/4","2"]]}}"#,
        )
        .unwrap();
        assert!(matches!(cfg.hole().unwrap_err(), Error::Schema { pointer, .. } if pointer == "/hole"));
    }

    #[test]
    fn every_stage_runs() {
        let cfg = AnalysisConfig::parse(
            r#"{"system":{"kind":"baker","branches":2},"hole":{"rects":[{"x":["3/4","1"],"full_height":true}]},
               "depth":4,"stages":["bracket","certify","components","filtration","beta","witness"],
               "beta":{"t":"3/4","language_len":4,"verify_res":true},"timings":true}"#,
        )
        .unwrap();
        let r = run_analysis(&cfg).unwrap();
        assert!(r.certificate.unwrap().is_certified());
        assert_eq!(r.beta.unwrap().code.as_deref(), Some("1100"));
        assert_eq!(r.timings.unwrap().len(), 6);
        assert!(r.filtration.is_some() && r.witness.is_some() && r.bracket.is_some());
    }

    #[test]
    fn dot_exports() {
        let golden = sft_build(2, 2, &[Word::parse("11", 2).unwrap()], Sided::OneSided).unwrap();
        let dot = export_dot(DotSource::Sft(&golden));
        assert_eq!(dot.matches(" -> ").count(), 5);
        let empty = Sft::empty(2, 2, Sided::OneSided).unwrap();
        assert_eq!(export_dot(DotSource::Sft(&empty)), "digraph sft {\n}\n");
        let h = crate::hole::hole1d(&[("1/4", "3/4")]).unwrap();
        let f = transitive_filtration(&SystemSpec::circle(2), &h, 2).unwrap();
        let dot = export_dot(DotSource::Forest(&f));
        assert_eq!(dot.matches("rank=same").count(), 2);
    }

    #[test]
    fn non_beta_report() {
        let r = beta_report(&BetaThreshold::parse("2/3", 2).unwrap(), true, Some(4), true).unwrap();
        assert_eq!((r.is_beta, r.failure_index), (false, Some(2)));
        assert!(r.class.is_none());
    }
}
