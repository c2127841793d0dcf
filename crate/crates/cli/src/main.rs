use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use harmonic_core::commutator::{atomic_decompose, bilinear_decomposition, subbilinear_envelope};
use harmonic_core::czo::operator_by_name;
use harmonic_core::dyadic_wavelet::{analyze, build_basis_named, WaveletBasis};
use harmonic_core::harness::{canonical_json, run_suite, write_atomic, ExperimentConfig, ExperimentReport, ReportFormat};
use harmonic_core::spaces::{norm_report, Space};
use harmonic_core::{Error, Result, SampledFunction};
use serde_json::json;

/// Harmonic analysis experiments on the periodic torus.
#[derive(Debug, Parser)]
#[command(name = "harmonic", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run an experiment suite from a JSON config.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Override the suite named in the config.
        #[arg(long)]
        suite: Option<String>,
        /// Override the root seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Report path; `.csv` selects CSV. Defaults to the config's output_path, else stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        format: Option<String>,
    },
    /// Norm estimates of a sampled function.
    Norms {
        input: PathBuf,
        #[command(flatten)]
        grid: GridArgs,
        /// Spaces to estimate (repeatable), e.g. `BMO`, `Lp(2)`, `H1`. Default: all.
        #[arg(long = "space")]
        spaces: Vec<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Commutator decomposition `[b,T]f` for a named operator.
    Decompose {
        #[arg(long)]
        b: PathBuf,
        #[arg(long)]
        f: PathBuf,
        /// hilbert, riesz1, riesz2, fractional:<alpha>, identity, maximal, local_maximal, area.
        #[arg(long, default_value = "hilbert")]
        operator: String,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Atomic decomposition; writes coefficient triplets.
    Atoms {
        input: PathBuf,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-emit a saved report, optionally as CSV.
    Report {
        input: PathBuf,
        #[arg(long, default_value = "json")]
        format: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, clap::Args)]
struct GridArgs {
    /// Dimension of text inputs (`.hlf` files carry their own header).
    #[arg(long, default_value_t = 1)]
    dim: usize,
    /// `haar` or `daubechies:<order>`.
    #[arg(long, default_value = "daubechies:4")]
    basis: String,
    #[arg(long, default_value_t = 2)]
    coarse_level: u32,
}

impl GridArgs {
    fn basis(&self) -> Result<WaveletBasis> {
        let (family, order) = match self.basis.split_once(':') {
            Some((f, o)) => {
                (f, o.parse().map_err(|_| Error::Usage(format!("bad basis order in '{}'", self.basis)))?)
            }
            None => (self.basis.as_str(), 1),
        };
        build_basis_named(family, order)
    }
}

/// `.hlf` binary, or whitespace/comma separated text of `N^dim` values.
fn load_function(path: &Path, dim: usize) -> Result<SampledFunction> {
    if path.extension().is_some_and(|e| e == "hlf") {
        return SampledFunction::load(path);
    }
    let text = std::fs::read_to_string(path)?;
    let values = text
        .split(|c: char| c.is_whitespace() || c == ',')
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<f64>().map_err(|_| Error::Format(format!("{}: bad number '{t}'", path.display()))))
        .collect::<Result<Vec<f64>>>()?;
    let side = match dim {
        1 => values.len(),
        2 => (values.len() as f64).sqrt().round() as usize,
        _ => return Err(Error::Usage(format!("dim must be 1 or 2, got {dim}"))),
    };
    if side.pow(dim as u32) != values.len() {
        return Err(Error::Shape(format!("{} values do not form a square grid", values.len())));
    }
    SampledFunction::from_resolution(dim, side, values)
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => write_atomic(p, text.as_bytes()),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn format_for(out: Option<&Path>, explicit: Option<&str>) -> Result<ReportFormat> {
    match explicit {
        Some(f) => f.parse(),
        None if out.is_some_and(|p| p.extension().is_some_and(|e| e == "csv")) => Ok(ReportFormat::Csv),
        None => Ok(ReportFormat::Json),
    }
}

fn summarize(report: &ExperimentReport) {
    let failed = report.failed_checks();
    let failed_cases = report.cases.iter().filter(|c| !c.pass).count();
    eprintln!(
        "{}: {} ({} cases, {} failed; {} checks, {} failed; {:.2}s)",
        report.suite,
        if report.summary.pass { "PASS" } else { "FAIL" },
        report.cases.len(),
        failed_cases,
        report.summary.checks.len(),
        failed.len(),
        report.wall_time_s
    );
    for c in failed {
        eprintln!("  failed check {}: {} {} {}", c.name, c.value, c.relation, c.limit);
    }
}

const ALL_SPACES: &[&str] = &["Lp(1)", "Lp(2)", "Lp(inf)", "weakLp(1)", "BMO", "BMOplus", "bmo", "BMOlog", "Llog", "H1", "h1", "Hlog"];

fn execute(command: Command) -> Result<bool> {
    match command {
        Command::Run { config, suite, seed, out, format } => {
            let mut cfg = ExperimentConfig::load(&config)?;
            if let Some(s) = suite {
                cfg.suite = s;
            }
            if let Some(s) = seed {
                cfg.root_seed = s;
            }
            let out = out.or_else(|| cfg.output_path.as_ref().map(PathBuf::from));
            let fmt = format_for(out.as_deref(), format.as_deref())?;
            let report = run_suite(&cfg)?;
            emit(out.as_deref(), &report.render(fmt)?)?;
            summarize(&report);
            Ok(report.summary.pass)
        }
        Command::Norms { input, grid, spaces, out } => {
            let f = load_function(&input, grid.dim)?;
            let basis = grid.basis()?;
            let names: Vec<String> =
                if spaces.is_empty() { ALL_SPACES.iter().map(|s| s.to_string()).collect() } else { spaces };
            let reports = names
                .iter()
                .map(|s| norm_report(&f, s.parse::<Space>()?, &basis, grid.coarse_level))
                .collect::<Result<Vec<_>>>()?;
            emit(out.as_deref(), &canonical_json(&reports)?)?;
            Ok(true)
        }
        Command::Decompose { b, f, operator, grid, out } => {
            let f = load_function(&f, grid.dim)?;
            let b = load_function(&b, grid.dim)?;
            let basis = grid.basis()?;
            let op = operator_by_name(&operator, f.dim())?;
            let (value, ok) = if op.is_linear() {
                let d = bilinear_decomposition(&b, &op, &f, &basis, grid.coarse_level)?;
                let rel = d.relative_residual();
                (json!({"operator": op.name(), "summary": d.summary(), "relative_residual": rel}), rel <= 1e-8)
            } else {
                let e = subbilinear_envelope(&b, &op, &f, &basis, grid.coarse_level)?;
                let v = json!({
                    "operator": op.name(),
                    "lower_gap": e.lower_gap,
                    "upper_gap": e.upper_gap,
                    "slack": e.slack,
                    "sandwich_ok": e.sandwich_ok,
                    "r_env_l1": e.r_env.l1_norm(),
                    "commutator_l1": e.commutator.l1_norm(),
                    "s_image_l1": e.s_image.l1_norm(),
                });
                (v, e.sandwich_ok)
            };
            emit(out.as_deref(), &canonical_json(&value)?)?;
            Ok(ok)
        }
        Command::Atoms { input, grid, out } => {
            let f = load_function(&input, grid.dim)?;
            let basis = grid.basis()?;
            let tree = analyze(&f, &basis, grid.coarse_level)?;
            let dec = atomic_decompose(&tree.details_only(), &basis)?;
            emit(out.as_deref(), &dec.to_triplet_text())?;
            eprintln!(
                "{} atoms, sum |lambda| = {:.6e}, all valid: {}, coarse part flagged: {}",
                dec.atoms.len(),
                dec.sum_abs_lambda,
                dec.all_valid(),
                dec.coarse_flagged || tree.scaling_energy() > 1e-20
            );
            Ok(dec.all_valid())
        }
        Command::Report { input, format, out } => {
            let report = ExperimentReport::load(&input)?;
            emit(out.as_deref(), &report.render(format.parse()?)?)?;
            summarize(&report);
            Ok(report.summary.pass)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
