use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};

use vpmcf::harness::output::{fit_report, read_columns, read_snapshot, snapshot_csv};
use vpmcf::harness::verify::{run_criterion, run_suite, Suite};
use vpmcf::harness::{run_to_dir, HarnessError, SimConfig};
use vpmcf::profile::curvature_fields;
use vpmcf::singularity::{fit_series, rescale, DEFAULT_GROWTH};

#[derive(Parser)]
#[command(name = "vpmcf", version, about = "Axially symmetric volume-preserving mean curvature flow")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate a configuration and write its artifacts.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Exit with status 2 when any monitor fails.
        #[arg(long)]
        strict: bool,
    },
    /// Run an acceptance suite.
    Verify {
        #[arg(long, default_value = "all")]
        suite: Suite,
        /// Run only these criteria instead of a whole suite.
        #[arg(long = "criterion")]
        criteria: Vec<u8>,
    },
    /// Fit the blow-up rate of a time series with `t` and `max_A2` columns.
    Fit {
        file: PathBuf,
        /// Keep samples whose max_A2 exceeds this multiple of the first one.
        #[arg(long, default_value_t = DEFAULT_GROWTH)]
        growth: f64,
    },
    /// Rescale a snapshot about a center; writes the scaled snapshot CSV to stdout.
    Rescale {
        snapshot: PathBuf,
        #[arg(long, default_value = "auto")]
        alpha: Auto,
        #[arg(long, default_value = "auto")]
        center: Auto,
        /// Surface dimension of the snapshot.
        #[arg(long, default_value_t = 2)]
        dim: usize,
        /// Keep only |x - center| <= half_width / alpha.
        #[arg(long)]
        half_width: Option<f64>,
    },
}

#[derive(Clone, Copy)]
enum Auto {
    Auto,
    Value(f64),
}

impl std::str::FromStr for Auto {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s == "auto" {
            return Ok(Auto::Auto);
        }
        s.parse().map(Auto::Value).map_err(|_| format!("expected `auto` or a number, got {s:?}"))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run { config, strict } => cmd_run(&config, strict),
        Command::Verify { suite, criteria } => Ok(cmd_verify(suite, &criteria)),
        Command::Fit { file, growth } => cmd_fit(&file, growth),
        Command::Rescale { snapshot, alpha, center, dim, half_width } => {
            cmd_rescale(&snapshot, alpha, center, dim, half_width)
        }
    };
    result.unwrap_or_else(|e| {
        eprintln!("error: {e:#}");
        ExitCode::from(1)
    })
}

fn cmd_run(path: &Path, strict: bool) -> anyhow::Result<ExitCode> {
    let config = SimConfig::from_file(path).with_context(|| format!("reading {}", path.display()))?;
    let outcome = run_to_dir(&config)?;
    let traj = &outcome.trajectory;
    println!(
        "status = {}\nt_final = {}\nsteps = {}\nrecorded = {}\nout_dir = {}",
        traj.status.name(),
        traj.last().t,
        traj.steps,
        traj.states.len(),
        outcome.out_dir.display()
    );
    for m in &outcome.monitors {
        println!("monitor {} {} {}", m.name, m.verdict.name(), m.worst_value);
    }
    if let Some(fit) = &outcome.fit {
        print!("{}", fit_report(fit));
    }
    Ok(if strict && outcome.monitors_failed() { ExitCode::from(2) } else { ExitCode::SUCCESS })
}

fn cmd_verify(suite: Suite, criteria: &[u8]) -> ExitCode {
    let results = if criteria.is_empty() {
        run_suite(suite, |r| println!("{r}"))
    } else {
        criteria
            .iter()
            .map(|&id| {
                let r = run_criterion(id);
                println!("{r}");
                r
            })
            .collect()
    };
    let passed = results.iter().filter(|r| r.passed).count();
    println!("{passed}/{} criteria passed", results.len());
    if passed == results.len() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn cmd_fit(path: &Path, growth: f64) -> anyhow::Result<ExitCode> {
    let cols = read_columns(path, &["t", "max_A2"])?;
    let (t, a2): (Vec<f64>, Vec<f64>) =
        cols[0].iter().zip(&cols[1]).filter(|(t, a)| t.is_finite() && a.is_finite()).map(|(t, a)| (*t, *a)).unzip();
    print!("{}", fit_report(&fit_series(&t, &a2, growth)));
    Ok(ExitCode::SUCCESS)
}

fn cmd_rescale(
    path: &Path,
    alpha: Auto,
    center: Auto,
    dim: usize,
    half_width: Option<f64>,
) -> anyhow::Result<ExitCode> {
    let profile = read_snapshot(path, dim)?;
    let i = profile.argmin();
    let center = match center {
        Auto::Auto => profile.grid().x(i),
        Auto::Value(c) => c,
    };
    let alpha = match alpha {
        Auto::Auto => 1.0 / profile.rho()[i],
        Auto::Value(a) => a,
    };
    let scaled = rescale(&profile, center, alpha, half_width).map_err(HarnessError::from)?;
    let field = curvature_fields(&scaled).map_err(HarnessError::from)?;
    eprintln!("center = {center}\nalpha = {alpha}");
    print!("{}", snapshot_csv(&scaled, &field)?);
    Ok(ExitCode::SUCCESS)
}
