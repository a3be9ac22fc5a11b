use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use geneo_core::compactify::{
    exact_resolution, verify_compactification, verify_finite, CompactificationReport,
    CompactifyConfig,
};
use geneo_core::error::{Error, Result};
use geneo_core::geneo::{
    check_hom_nonexpansive, collectionwise_surjective, validate_geneo, GeneoSpace, GeneoSpaceFile,
};
use geneo_core::json::to_canonical_string;
use geneo_core::metric::{greedy_eps_net, validate_pseudo_metric};
use geneo_core::perception::{
    induce_point_metric, separation_check, validate_operation, PairFile, PerceptionPair, Signal,
    SignalSpace,
};
use geneo_core::scenarios::{gen_circle, gen_random_geneo_space, SpaceKind};

#[derive(Parser)]
#[command(name = "geneo", version, about = "Perception pairs, GENEO spaces and their compactification")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Write JSON output here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Numerical tolerance for pass/fail decisions.
    #[arg(long)]
    tolerance: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a perception pair file, or a GENEO space file.
    Validate {
        input: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Greedy eps-nets of the points and signals of a pair.
    Net {
        input: PathBuf,
        #[arg(long)]
        eps: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Check operators, homomorphism, surjectivity and non-expansivity of T.
    GeneoCheck {
        input: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Run the compactification pipeline on a space file or on `circle`.
    Compactify {
        /// A GENEO space file, or the word `circle`.
        input: String,
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long, default_value_t = 64)]
        m: usize,
        #[arg(long, value_delimiter = ',')]
        denoms: Vec<i64>,
        /// Continue with unsaturated completions.
        #[arg(long)]
        force: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Generate a scenario as a GENEO space file.
    Scenario {
        #[command(subcommand)]
        which: Scenario,
    },
    /// Summarize a compactification report.
    Report { input: PathBuf },
}

#[derive(Subcommand)]
enum Scenario {
    /// Tent signals on a circle grid under rotations, with rotation operators.
    Circle {
        #[arg(long, default_value_t = 64)]
        m: usize,
        #[arg(long, value_delimiter = ',')]
        denoms: Vec<i64>,
        #[arg(long, default_value_t = 0.05)]
        eps: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// A seeded random collectionwise-surjective space.
    Random {
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 6)]
        domain: usize,
        #[arg(long, default_value_t = 8)]
        signals: usize,
        #[arg(long, value_enum, default_value_t = Kind::Equivariant)]
        kind: Kind,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Equivariant,
    Invariant,
    Point,
    TwoCopies,
}

impl From<Kind> for SpaceKind {
    fn from(k: Kind) -> Self {
        match k {
            Kind::Equivariant => SpaceKind::Equivariant,
            Kind::Invariant => SpaceKind::Invariant,
            Kind::Point => SpaceKind::Point,
            Kind::TwoCopies => SpaceKind::TwoCopies,
        }
    }
}

fn emit<T: Serialize + ?Sized>(value: &T, out: Option<&Path>) -> Result<()> {
    let text = to_canonical_string(value)?;
    match out {
        Some(p) => std::fs::write(p, text)?,
        None => write_stdout(&text)?,
    }
    Ok(())
}

/// Writes to stdout; a closed pipe is not an error.
fn write_stdout(text: &str) -> Result<()> {
    match std::io::stdout().lock().write_all(text.as_bytes()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

fn read_json(path: &Path) -> Result<Value> {
    Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
}

fn base_of(path: &Path) -> &Path {
    path.parent().unwrap_or(Path::new("."))
}

fn validate_pair(file: PairFile, tol: Option<f64>) -> Result<(bool, Value)> {
    let tol = tol.unwrap_or(file.tolerance);
    let signals = file.signals.iter().cloned().map(Signal::new).collect();
    let phi = SignalSpace::new(file.points, signals, tol)?;
    let d = induce_point_metric(&phi)?;
    let violations = validate_pseudo_metric(&d, tol)?;
    let checks = file
        .group
        .iter()
        .map(|g| validate_operation(&phi, g))
        .collect::<Result<Vec<_>>>()?;
    let generators_ok = checks.iter().all(|c| c.is_phi_op && c.is_invertible);
    let mut out = json!({
        "points": file.points,
        "signals": phi.len(),
        "metric_violations": violations,
        "generators": checks,
    });
    if generators_ok {
        let pair = PerceptionPair::generated(phi, file.group)?;
        let sep = separation_check(&pair);
        out["group_order"] = json!(pair.order());
        out["separated"] = json!(sep.separated);
        out["separation_witness"] = json!(sep.witness);
    }
    let pass = violations.is_empty() && generators_ok;
    out["pass"] = json!(pass);
    Ok((pass, out))
}

fn check_space(file: GeneoSpaceFile, base: &Path, tol: Option<f64>) -> Result<(bool, Value)> {
    let (source, target, hom, operators) = file.parts(base)?;
    let tol = tol.unwrap_or(source.tolerance().max(target.tolerance()));
    let hom_residual = hom.validate(&source, &target)?;
    let checks = operators
        .iter()
        .map(|f| validate_geneo(f, &hom, &source, &target))
        .collect::<Result<Vec<_>>>()?;
    let mut pass = hom_residual <= tol && checks.iter().all(|c| c.passes(tol));
    let mut out = json!({
        "hom_residual": hom_residual,
        "operators": checks,
    });
    if pass {
        let space = GeneoSpace::new(source, target, hom, operators)?;
        let coverage = collectionwise_surjective(&space);
        let expansion = check_hom_nonexpansive(&space);
        if expansion.precondition_holds && expansion.max_violation > tol {
            pass = false;
        }
        out["coverage"] = json!(coverage);
        out["hom_expansion"] = json!(expansion);
    }
    out["pass"] = json!(pass);
    Ok((pass, out))
}

fn is_space(v: &Value) -> bool {
    v.get("operators").is_some()
}

fn net(input: &Path, eps: f64, common: &Common) -> Result<bool> {
    let mut file: PairFile = serde_json::from_value(read_json(input)?)?;
    if let Some(t) = common.tolerance {
        file.tolerance = t;
    }
    let pair = PerceptionPair::from_file(file)?;
    let points = greedy_eps_net(pair.domain(), eps)?;
    let phi_d = pair.phi().distance_matrix();
    let signals = greedy_eps_net(&phi_d, eps)?;
    let pass = points.verify(pair.domain()).is_ok() && signals.verify(&phi_d).is_ok();
    emit(
        &json!({"eps": eps, "points": points, "signals": signals, "pass": pass}),
        common.out.as_deref(),
    )?;
    Ok(pass)
}

fn compactify(
    input: &str,
    eps: Option<f64>,
    m: usize,
    denoms: &[i64],
    force: bool,
    common: &Common,
) -> Result<bool> {
    let configure = |eps: f64| {
        let mut cfg = CompactifyConfig::new(eps);
        cfg.force = force;
        if let Some(t) = common.tolerance {
            cfg.tolerance = t;
        }
        cfg
    };
    let report: CompactificationReport = if input == "circle" {
        let denoms = if denoms.is_empty() { vec![m as i64] } else { denoms.to_vec() };
        let scenario = gen_circle(m, &denoms, eps.unwrap_or(0.05))?;
        let space = scenario.rotation_space(&scenario.default_shifts())?;
        let presented = scenario.presented(&[])?;
        verify_compactification(&space, &presented, &presented, &configure(scenario.eps))?
    } else {
        let path = Path::new(input);
        let file: GeneoSpaceFile = serde_json::from_value(read_json(path)?)?;
        let space = file.load(base_of(path))?;
        let eps = eps.unwrap_or_else(|| exact_resolution(&space));
        verify_finite(&space, &configure(eps))?
    };
    emit(&report, common.out.as_deref())?;
    Ok(report.passed())
}

fn summarize(input: &Path) -> Result<bool> {
    let report: CompactificationReport = serde_json::from_value(read_json(input)?)?;
    let mut text = format!(
        "eps {}  exact {}  saturated {}\nnets: phi_bar {}  g_bar {}  f_bar {}\n",
        report.eps,
        report.exact,
        report.saturated,
        report.net_sizes.phi_bar,
        report.net_sizes.g_bar,
        report.net_sizes.f_bar
    );
    for c in &report.conditions {
        let mark = if c.pass { "pass" } else { "FAIL" };
        text += &format!("{mark}  {:<16} {:.3e} <= {:.3e}\n", c.name, c.residual, c.bound);
    }
    let failures = report.failures().len();
    text += &format!(
        "{} of {} conditions pass\n",
        report.conditions.len() - failures,
        report.conditions.len()
    );
    write_stdout(&text)?;
    Ok(failures == 0)
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Validate { input, common } => {
            let v = read_json(&input)?;
            let (pass, out) = if is_space(&v) {
                check_space(serde_json::from_value(v)?, base_of(&input), common.tolerance)?
            } else {
                validate_pair(serde_json::from_value(v)?, common.tolerance)?
            };
            emit(&out, common.out.as_deref())?;
            Ok(pass)
        }
        Command::Net { input, eps, common } => net(&input, eps, &common),
        Command::GeneoCheck { input, common } => {
            let file = serde_json::from_value(read_json(&input)?)?;
            let (pass, out) = check_space(file, base_of(&input), common.tolerance)?;
            emit(&out, common.out.as_deref())?;
            Ok(pass)
        }
        Command::Compactify {
            input,
            eps,
            m,
            denoms,
            force,
            common,
        } => compactify(&input, eps, m, &denoms, force, &common),
        Command::Scenario { which } => {
            let (space, out) = match which {
                Scenario::Circle { m, denoms, eps, out } => {
                    let denoms = if denoms.is_empty() { vec![m as i64] } else { denoms };
                    let s = gen_circle(m, &denoms, eps)?;
                    (s.rotation_space(&s.default_shifts())?, out)
                }
                Scenario::Random {
                    seed,
                    domain,
                    signals,
                    kind,
                    out,
                } => (gen_random_geneo_space(seed, kind.into(), domain, signals)?, out),
            };
            emit(&space.to_file(), out.as_deref())?;
            Ok(true)
        }
        Command::Report { input } => summarize(&input),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            if let Error::Refused { uncovered, .. } = &e {
                if !uncovered.is_empty() {
                    eprintln!("uncovered: {uncovered:?}");
                }
            }
            ExitCode::from(if e.is_input_error() { 2 } else { 1 })
        }
    }
}
