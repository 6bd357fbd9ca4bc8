//! `dampwave`: simulate, verify, sample attractors, summarize reports.
//!
//! Exit codes: 0 when every check passes, 1 when a check fails, 2 on usage,
//! configuration or runtime errors.

use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use dampwave::io::{load_timeseries, save_snapshot, save_timeseries};
use dampwave::suite::attractor_experiment;
use dampwave::{run_suite, CheckReport, Corruption, RunConfig, Stepper, Suite, SuiteOptions};

#[derive(Parser)]
#[command(
    name = "dampwave",
    version,
    about = "Damped nonlinear wave simulations and dissipativity checks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one trajectory from a config file and write its time series.
    Simulate(SimulateArgs),
    /// Run a verification suite.
    Verify(VerifyArgs),
    /// Sample attractors and run the attractor checks.
    Attractor(AttractorArgs),
    /// Summarize a report file or a time-series CSV.
    Report(ReportArgs),
}

#[derive(Args)]
struct SimulateArgs {
    /// `key = value` config file; defaults apply to missing keys.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override a config key, `key=value`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory; overrides `out` from the config.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CheckArgs {
    /// Damping λ. Repeatable; a single value also drives the single-run checks.
    #[arg(long = "lambda")]
    lambdas: Vec<f64>,
    #[arg(long, default_value_t = 1000)]
    samples: usize,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Scale the δ seen by the diagnostics.
    #[arg(long, default_value_t = 1.0)]
    corrupt_delta: f64,
    /// Scale the σ seen by the diagnostics.
    #[arg(long, default_value_t = 1.0)]
    corrupt_sigma: f64,
    /// Scale the flux coefficient seen by the diagnostics.
    #[arg(long, default_value_t = 1.0)]
    corrupt_flux: f64,
    /// Run the deliberately broken variant; the checks must fail.
    #[arg(long)]
    negative_control: bool,
    /// Directory for `reports.jsonl` and `margins.csv`.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// accretivity | energy | decay | absorbing | tail | gronwall | poincare | nonlinearity
    suite: String,
    #[command(flatten)]
    check: CheckArgs,
}

#[derive(Args)]
struct AttractorArgs {
    /// Transient before sampling starts.
    #[arg(long, default_value_t = 40.0)]
    transient: f64,
    #[command(flatten)]
    check: CheckArgs,
}

#[derive(Args)]
struct ReportArgs {
    /// `reports.jsonl` (or a directory holding one) or a time-series CSV.
    path: PathBuf,
}

impl CheckArgs {
    fn options(&self) -> Result<SuiteOptions> {
        for (name, s) in [
            ("corrupt-delta", self.corrupt_delta),
            ("corrupt-sigma", self.corrupt_sigma),
            ("corrupt-flux", self.corrupt_flux),
        ] {
            if !(s.is_finite() && s > 0.0) {
                bail!("--{name} must be a positive number, got {s}");
            }
        }
        if self.lambdas.iter().any(|l| !(l.is_finite() && *l > 0.0)) {
            bail!("--lambda must be positive");
        }
        let mut opts = SuiteOptions {
            samples: self.samples,
            seed: self.seed,
            corruption: Corruption {
                delta_scale: self.corrupt_delta,
                sigma_scale: self.corrupt_sigma,
                flux_scale: self.corrupt_flux,
            },
            negative_control: self.negative_control,
            ..SuiteOptions::default()
        };
        if !self.lambdas.is_empty() {
            opts.lambdas = self.lambdas.clone();
        }
        Ok(opts)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Simulate(a) => simulate(a),
        Command::Verify(a) => verify(a),
        Command::Attractor(a) => attractor(a),
        Command::Report(a) => report(&a.path),
    }
}

fn simulate(args: SimulateArgs) -> Result<bool> {
    let mut cfg = match &args.config {
        Some(p) => RunConfig::load(p).with_context(|| format!("reading {}", p.display()))?,
        None => RunConfig::default(),
    };
    for kv in &args.overrides {
        let (k, v) = kv
            .split_once('=')
            .with_context(|| format!("--set expects KEY=VALUE, got `{kv}`"))?;
        cfg.set(k.trim(), v.trim())?;
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(out) = args.out {
        cfg.out = out;
    }
    cfg.command = std::env::args().collect::<Vec<_>>().join(" ");

    let grid = cfg.grid()?;
    let model = cfg.model(&grid)?;
    let w0 = cfg.initial_state(&model)?;
    let stepper = Stepper::new(&model, cfg.resolved_dt(&grid))?;
    let traj = dampwave::integrate::simulate_with(&stepper, &w0, cfg.t_end, &cfg.observer())?;

    fs::create_dir_all(&cfg.out).with_context(|| format!("creating {}", cfg.out.display()))?;
    fs::write(cfg.out.join("run.cfg"), cfg.to_text())?;
    save_timeseries(&traj.series, &cfg.out.join("timeseries.csv"))?;
    for (i, w) in traj.snapshots.iter().enumerate() {
        save_snapshot(w, model.variant, &cfg.out.join(format!("snapshot_{i:05}.dwaf")))?;
    }
    let last = traj.series.samples.last().expect("at least the initial sample");
    println!(
        "{} samples, {} snapshots, t = {:.6}, E = {:.6e}, wrote {}",
        traj.series.len(),
        traj.snapshots.len(),
        last.t,
        last.energy,
        cfg.out.display()
    );
    Ok(true)
}

fn emit(reports: &[CheckReport], out: Option<&Path>) -> Result<bool> {
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    for r in reports {
        writeln!(lock, "{}", r.to_json_line())?;
    }
    if let Some(dir) = out {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        let mut jsonl = BufWriter::new(File::create(dir.join("reports.jsonl"))?);
        let mut csv = BufWriter::new(File::create(dir.join("margins.csv"))?);
        writeln!(csv, "check,verdict,margin")?;
        for r in reports {
            writeln!(jsonl, "{}", r.to_json_line())?;
            let margin = r.margin.map_or(String::new(), |m| format!("{m:.16e}"));
            let verdict = serde_json::to_value(r.verdict)?;
            writeln!(csv, "\"{}\",{},{margin}", r.name, verdict.as_str().unwrap_or(""))?;
        }
        jsonl.flush()?;
        csv.flush()?;
    }
    let failed: Vec<&str> = reports.iter().filter(|r| !r.passed).map(|r| r.name.as_str()).collect();
    if failed.is_empty() {
        eprintln!("{} checks passed", reports.len());
    } else {
        eprintln!(
            "{} of {} checks failed: {}",
            failed.len(),
            reports.len(),
            failed.join(", ")
        );
    }
    Ok(failed.is_empty() && !reports.is_empty())
}

fn verify(args: VerifyArgs) -> Result<bool> {
    let suite: Suite = args.suite.parse()?;
    let opts = args.check.options()?;
    let outcome = run_suite(suite, &opts)?;
    emit(&outcome.reports, args.check.out.as_deref())
}

fn attractor(args: AttractorArgs) -> Result<bool> {
    let opts = args.check.options()?;
    let outcome = attractor_experiment(&opts, args.transient)?;
    let ok = emit(&outcome.reports, args.check.out.as_deref())?;
    if let Some(dir) = &args.check.out {
        for (i, w) in outcome.ensemble.members().iter().enumerate() {
            save_snapshot(w, outcome.model.variant, &dir.join(format!("member_{i:05}.dwaf")))?;
        }
    }
    Ok(ok)
}

fn report(path: &Path) -> Result<bool> {
    let path = if path.is_dir() {
        path.join("reports.jsonl")
    } else {
        path.to_path_buf()
    };
    if path.extension().is_some_and(|e| e == "csv") {
        let series = load_timeseries(&path)?;
        let (Some(first), Some(last)) = (series.samples.first(), series.samples.last()) else {
            println!("empty time series");
            return Ok(true);
        };
        println!("samples {}", series.len());
        println!("t       {:.6} .. {:.6}", first.t, last.t);
        println!("E       {:.6e} -> {:.6e}", first.energy, last.energy);
        let peak = series.samples.iter().map(|s| s.x2).fold(0.0, f64::max);
        println!("max X2  {peak:.6e}");
        for (i, k) in series.tail_radii.iter().enumerate() {
            let worst = series.samples.iter().map(|s| s.tails[i]).fold(0.0, f64::max);
            println!("tail k={k}: max {worst:.6e}, final {:.6e}", last.tails[i]);
        }
        return Ok(true);
    }
    let file = File::open(&path).with_context(|| format!("opening {}", path.display()))?;
    let mut reports = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let r: CheckReport =
            serde_json::from_str(&line).with_context(|| format!("{}:{}: malformed report", path.display(), i + 1))?;
        reports.push(r);
    }
    let width = reports.iter().map(|r| r.name.len()).max().unwrap_or(0);
    for r in &reports {
        let margin = r.margin.map_or("-".to_string(), |m| format!("{m:+.3e}"));
        println!(
            "{:<width$}  {:<4}  {margin}",
            r.name,
            if r.passed { "ok" } else { "FAIL" }
        );
    }
    let failed = reports.iter().filter(|r| !r.passed).count();
    println!("{} checks, {failed} failed", reports.len());
    Ok(failed == 0 && !reports.is_empty())
}
