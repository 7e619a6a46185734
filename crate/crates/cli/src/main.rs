use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use linopt::circuit::CircuitSpec;
use linopt::experiments::{self, ExperimentReport, Parameters, ScanRow};
use linopt::oracle::{self, CrosscheckConfig, CrosscheckSummary};

/// Exit status when post-selection can never succeed; the report is still written.
const EXIT_ZERO_PROBABILITY: u8 = 2;
const EXIT_INPUT_ERROR: u8 = 1;

#[derive(Debug, Parser)]
#[command(name = "linopt", version, about = "Heralded linear-optical entanglement simulator")]
struct Cli {
    /// Write output here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    /// Pass threshold for `crosscheck` deviations.
    #[arg(long, global = true, default_value_t = 1e-10)]
    tolerance: f64,

    /// Worker threads for `scan` and `crosscheck`; output order is unaffected.
    #[arg(long, global = true)]
    parallel: Option<usize>,

    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one scheme and emit its report.
    Run {
        #[command(subcommand)]
        scheme: Scheme,
    },
    /// Sweep the four-photon scheme over a uniform θ grid.
    Scan {
        #[arg(long = "from", default_value_t = 0.0, allow_negative_numbers = true)]
        start: f64,
        #[arg(long = "to", default_value_t = std::f64::consts::FRAC_PI_2, allow_negative_numbers = true)]
        end: f64,
        #[arg(long, default_value_t = 101)]
        steps: usize,
    },
    /// Compare the sparse engine with the permanent oracle on random circuits.
    Crosscheck {
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 6)]
        max_modes: usize,
        #[arg(long, default_value_t = 4)]
        max_photons: u32,
    },
}

#[derive(Debug, Subcommand)]
enum Scheme {
    /// Two EPR pairs fused into the spin-1 four-photon state.
    FourPhoton(Angle),
    /// Telecloning-state preparation from the four-photon state.
    Telecloning {
        /// Produce the four-photon input with the fusion stage instead of assuming it.
        #[arg(long)]
        chained: bool,
    },
    /// N EPR pairs through four symmetric N-ports.
    Generalized {
        #[arg(long)]
        pairs: u32,
    },
    /// Evaluate a circuit description (JSON).
    CircuitFile { path: PathBuf },
}

#[derive(Debug, Args)]
#[group(multiple = false)]
struct Angle {
    /// Splitter angle in radians.
    #[arg(long, allow_negative_numbers = true)]
    theta: Option<f64>,
    /// Splitter angle in degrees.
    #[arg(long, allow_negative_numbers = true)]
    theta_degrees: Option<f64>,
}

impl Angle {
    fn radians(&self) -> f64 {
        match (self.theta, self.theta_degrees) {
            (Some(r), _) => r,
            (None, Some(d)) => d.to_radians(),
            (None, None) => std::f64::consts::FRAC_PI_4,
        }
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("cannot write {}", path.display())),
        None => {
            io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn report_csv(r: &ExperimentReport) -> String {
    let opt = |x: Option<String>| x.unwrap_or_default();
    let p = &r.parameters;
    format!(
        "scheme,theta,pairs,chained,success_probability,fidelity,stage_probabilities,wall_time_ms\n{},{},{},{},{},{},{},{}\n",
        r.scheme,
        opt(p.theta.map(fmt_f64)),
        opt(p.pairs.map(|n| n.to_string())),
        opt(p.chained.map(|c| c.to_string())),
        fmt_f64(r.success_probability),
        opt(r.fidelity.map(fmt_f64)),
        r.stage_probabilities.iter().map(|x| fmt_f64(*x)).collect::<Vec<_>>().join(";"),
        r.wall_time_ms,
    )
}

fn scan_csv(rows: &[ScanRow]) -> String {
    let mut s = String::from("theta,probability,fidelity\n");
    for r in rows {
        s.push_str(&format!(
            "{},{},{}\n",
            fmt_f64(r.theta),
            fmt_f64(r.probability),
            r.fidelity.map(fmt_f64).unwrap_or_default()
        ));
    }
    s
}

fn crosscheck_text(s: &CrosscheckSummary, tolerance: f64) -> String {
    let worst = s
        .trials
        .iter()
        .max_by(|a, b| a.deviation.total_cmp(&b.deviation))
        .map(|t| format!("trial {} ({} modes, {} photons)", t.trial, t.modes, t.photons))
        .unwrap_or_default();
    format!(
        "trials: {}\nmax_modes: {}\nmax_photons: {}\nseed: {}\nmax_deviation: {:e}\nworst: {}\ntolerance: {:e}\nresult: {}\n",
        s.config.trials,
        s.config.max_modes,
        s.config.max_photons,
        s.config.seed,
        s.max_deviation,
        worst,
        tolerance,
        if s.passed(tolerance) { "PASS" } else { "FAIL" }
    )
}

fn run_scheme(scheme: &Scheme) -> Result<ExperimentReport> {
    Ok(match scheme {
        Scheme::FourPhoton(angle) => {
            let theta = angle.radians();
            if !theta.is_finite() {
                bail!("theta must be finite");
            }
            experiments::four_photon_scheme(theta)?
        }
        Scheme::Telecloning { chained } => experiments::telecloning_scheme(*chained)?,
        Scheme::Generalized { pairs } => experiments::generalized_scheme(*pairs)?,
        Scheme::CircuitFile { path } => {
            let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
            let started = Instant::now();
            let spec = CircuitSpec::from_json(&text).with_context(|| format!("in {}", path.display()))?;
            let outcome = spec.evaluate()?;
            ExperimentReport::from_outcome("circuit-file", Parameters::default(), &outcome, started)
        }
    })
}

fn execute(cli: &Cli) -> Result<u8> {
    let out = cli.out.as_deref();
    match &cli.command {
        Command::Run { scheme } => {
            let report = run_scheme(scheme)?;
            let text = match cli.format.unwrap_or(Format::Json) {
                Format::Json => serde_json::to_string_pretty(&report)? + "\n",
                Format::Csv => report_csv(&report),
            };
            emit(out, &text)?;
            Ok(if report.heralded() { 0 } else { EXIT_ZERO_PROBABILITY })
        }
        Command::Scan { start, end, steps } => {
            let rows = experiments::scan_theta(*start, *end, *steps)?;
            let text = match cli.format.unwrap_or(Format::Csv) {
                Format::Csv => scan_csv(&rows),
                Format::Json => serde_json::to_string_pretty(&rows)? + "\n",
            };
            emit(out, &text)?;
            Ok(0)
        }
        Command::Crosscheck { trials, max_modes, max_photons } => {
            if cli.tolerance.is_nan() || cli.tolerance <= 0.0 {
                bail!("tolerance must be positive");
            }
            let config = CrosscheckConfig {
                trials: *trials,
                max_modes: *max_modes,
                max_photons: *max_photons,
                seed: cli.seed,
            };
            let summary = oracle::crosscheck(config)?;
            let text = match cli.format {
                Some(Format::Json) => serde_json::to_string_pretty(&summary)? + "\n",
                Some(Format::Csv) => {
                    let mut s = String::from("trial,modes,photons,terms,acted_modes,deviation\n");
                    for t in &summary.trials {
                        s.push_str(&format!(
                            "{},{},{},{},{},{:e}\n",
                            t.trial, t.modes, t.photons, t.terms, t.acted_modes, t.deviation
                        ));
                    }
                    s
                }
                None => crosscheck_text(&summary, cli.tolerance),
            };
            emit(out, &text)?;
            if summary.passed(cli.tolerance) {
                Ok(0)
            } else {
                eprintln!("max deviation {:e} exceeds tolerance {:e}", summary.max_deviation, cli.tolerance);
                Ok(EXIT_INPUT_ERROR)
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT_ERROR } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.parallel {
        Some(0) => Err(anyhow::anyhow!("--parallel must be at least 1")),
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build()
            .context("cannot start worker pool")
            .and_then(|pool| pool.install(|| execute(&cli))),
        None => execute(&cli),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_INPUT_ERROR)
        }
    }
}
