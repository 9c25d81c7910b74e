use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use exshift::analysis::{
    beta_report, certify, components_report, even_witness, export_dot, from_json_str, run_analysis,
    AnalysisConfig, CertificateReport, DotSource, DEFAULT_DEPTH,
};
use exshift::beta::BetaThreshold;
use exshift::bracket::{inner_sft, outer_sft};
use exshift::components::transitive_filtration;
use exshift::exec::Execution;
use exshift::genericity::sample_rectangle_genericity;
use exshift::hole::{Hole, Hole1D, HoleJson};
use exshift::sft::SftJson;
use exshift::system::SystemSpec;
use exshift::Sft;
use serde_json::Value;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

/// Exclusion shifts of the doubling and Baker maps.
#[derive(Parser)]
#[command(name = "exshift", version)]
struct Cli {
    /// Analysis config (system, hole, depth, stages)
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Overrides the config depth
    #[arg(long, global = true)]
    depth: Option<usize>,
    /// Write the report here instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Exit with status 2 when certification comes back Unknown
    #[arg(long, global = true)]
    require_certificate: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the stages listed in --config
    Analyze,
    /// Certify that the exclusion shift is of finite type
    Certify(Problem),
    /// Irreducible components of the certified (or deepest inner) shift
    Components(Problem),
    /// Component forest across depths 1..=depth
    Filtration(Problem),
    /// Beta-number check, classification and language of a threshold hole
    Beta(BetaArgs),
    /// Obstruction showing the hole's shift is not the even shift
    WitnessEven(Problem),
    /// Random-rectangle certification rates on the two-branch Baker map
    Sample(SampleArgs),
    /// Graphviz rendering of an Sft or a component forest
    ExportDot(DotArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Circle,
    Baker,
}

/// Either --config or --system/--hole.
#[derive(Args, Clone)]
struct Problem {
    #[arg(long, value_enum)]
    system: Option<Kind>,
    #[arg(long, default_value_t = 2)]
    branches: usize,
    /// Hole JSON file; no hole means the empty hole
    #[arg(long)]
    hole: Option<PathBuf>,
}

#[derive(Args)]
struct BetaArgs {
    #[arg(long)]
    t: String,
    #[arg(long, default_value_t = 2)]
    branches: usize,
    #[arg(long)]
    classify: bool,
    #[arg(long)]
    language_len: Option<usize>,
    #[arg(long)]
    verify_res: bool,
}

#[derive(Args)]
struct SampleArgs {
    #[arg(long, default_value_t = 200)]
    count: usize,
    #[arg(long, default_value_t = 8)]
    corner_depth: usize,
    #[arg(long, value_delimiter = ',', default_values_t = [4, 8, 12])]
    n_max: Vec<usize>,
    #[arg(long)]
    sequential: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum DotWhat {
    Inner,
    Outer,
    Certified,
    Filtration,
}

#[derive(Args)]
struct DotArgs {
    /// Sft JSON file; takes precedence over the hole inputs
    #[arg(long)]
    sft: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "certified")]
    what: DotWhat,
    #[command(flatten)]
    problem: Problem,
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn parse<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    from_json_str(&read(path)?).with_context(|| format!("parsing {}", path.display()))
}

struct Loaded {
    sys: SystemSpec,
    hole: Hole,
    depth: usize,
    warnings: Vec<String>,
}

impl Cli {
    fn config(&self) -> Result<Option<AnalysisConfig>> {
        let Some(path) = &self.config else { return Ok(None) };
        let cfg = AnalysisConfig::parse(&read(path)?).with_context(|| format!("parsing {}", path.display()))?;
        Ok(Some(cfg))
    }

    fn load(&self, p: &Problem) -> Result<Loaded> {
        if let Some(mut cfg) = self.config()? {
            if p.system.is_some() || p.hole.is_some() {
                bail!("--config cannot be combined with --system or --hole");
            }
            if let Some(d) = self.depth {
                cfg.depth = d;
            }
            let (hole, warnings) = cfg.hole()?;
            return Ok(Loaded { sys: cfg.system, hole, depth: cfg.depth, warnings });
        }
        let Some(kind) = p.system else { bail!("either --config or --system is required") };
        let sys = match kind {
            Kind::Circle => SystemSpec::circle(p.branches),
            Kind::Baker => SystemSpec::baker(p.branches),
        };
        sys.validate()?;
        let (hole, warnings) = match &p.hole {
            Some(path) => Hole::from_json(&parse::<HoleJson>(path)?)?,
            None => (Hole::Intervals(Hole1D::empty()), Vec::new()),
        };
        hole.check_system(&sys)?;
        let depth = self.depth.unwrap_or(DEFAULT_DEPTH);
        if depth == 0 {
            bail!("--depth must be at least 1");
        }
        Ok(Loaded { sys, hole, depth, warnings })
    }

    fn emit(&self, text: &str) -> Result<()> {
        match &self.out {
            Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display())),
            None => {
                print!("{text}");
                Ok(())
            }
        }
    }

    fn emit_json<T: serde::Serialize>(&self, value: &T) -> Result<()> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        self.emit(&text)
    }
}

fn with_warnings<T: serde::Serialize>(value: &T, warnings: &[String]) -> Result<Value> {
    let mut v = serde_json::to_value(value)?;
    if let (Value::Object(map), false) = (&mut v, warnings.is_empty()) {
        map.insert("warnings".into(), serde_json::to_value(warnings)?);
    }
    Ok(v)
}

fn run(cli: &Cli) -> Result<ExitCode> {
    let mut unknown = false;
    match &cli.command {
        Command::Analyze => {
            let Some(mut cfg) = cli.config()? else { bail!("analyze needs --config") };
            if let Some(d) = cli.depth {
                cfg.depth = d;
            }
            let report = run_analysis(&cfg)?;
            unknown = report.certificate.as_ref().is_some_and(|c| !c.is_certified());
            cli.emit_json(&report)?;
        }
        Command::Certify(p) => {
            let l = cli.load(p)?;
            let report = CertificateReport::new(&certify(&l.sys, &l.hole, l.depth)?)?;
            unknown = !report.is_certified();
            cli.emit_json(&with_warnings(&report, &l.warnings)?)?;
        }
        Command::Components(p) => {
            let l = cli.load(p)?;
            let report = components_report(&l.sys, &l.hole, l.depth)?;
            unknown = report.provisional;
            cli.emit_json(&with_warnings(&report, &l.warnings)?)?;
        }
        Command::Filtration(p) => {
            let l = cli.load(p)?;
            let forest = transitive_filtration(&l.sys, &l.hole, l.depth)?;
            cli.emit_json(&with_warnings(&forest, &l.warnings)?)?;
        }
        Command::Beta(b) => {
            let bt = BetaThreshold::parse(&b.t, b.branches)?;
            cli.emit_json(&beta_report(&bt, b.classify, b.language_len, b.verify_res)?)?;
        }
        Command::WitnessEven(p) => {
            let l = cli.load(p)?;
            let w = even_witness(&l.sys, &l.hole)?;
            cli.emit_json(&with_warnings(&w, &l.warnings)?)?;
        }
        Command::Sample(s) => {
            let exec = if s.sequential { Execution::Sequential } else { Execution::Parallel };
            let seed = cli.seed.unwrap_or(7);
            let report = sample_rectangle_genericity(seed, s.count, s.corner_depth, &s.n_max, exec)?;
            cli.emit_json(&report)?;
        }
        Command::ExportDot(d) => {
            let dot = match &d.sft {
                Some(path) => export_dot(DotSource::Sft(&Sft::from_json(&parse::<SftJson>(path)?)?)),
                None => {
                    let l = cli.load(&d.problem)?;
                    match d.what {
                        DotWhat::Inner => export_dot(DotSource::Sft(&inner_sft(&l.sys, &l.hole, l.depth)?)),
                        DotWhat::Outer => export_dot(DotSource::Sft(&outer_sft(&l.sys, &l.hole, l.depth)?)),
                        DotWhat::Certified => match certify(&l.sys, &l.hole, l.depth)?.certificate() {
                            Some(c) => export_dot(DotSource::Sft(&c.sft)),
                            None => {
                                unknown = true;
                                export_dot(DotSource::Sft(&inner_sft(&l.sys, &l.hole, l.depth)?))
                            }
                        },
                        DotWhat::Filtration => {
                            export_dot(DotSource::Forest(&transitive_filtration(&l.sys, &l.hole, l.depth)?))
                        }
                    }
                }
            };
            cli.emit(&dot)?;
        }
    }
    if unknown && cli.require_certificate {
        eprintln!("certification unknown");
        return Ok(ExitCode::from(2));
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;
    use exshift::system::SystemKind;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn kind_maps_to_system() {
        let cli = Cli::parse_from(["exshift", "certify", "--system", "baker", "--branches", "3"]);
        let Command::Certify(p) = &cli.command else { panic!() };
        assert_eq!(cli.load(p).unwrap().sys.kind, SystemKind::Baker);
    }
}
