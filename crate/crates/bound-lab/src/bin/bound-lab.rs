use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

use bound_lab::report::{run, write_report, write_verify, Mode};
use bound_lab::{load_specs, run_verify, LabError, LabResult};

#[derive(Parser)]
#[command(name = "bound-lab", version, about = "Boundedness experiments for periodic Fourier integral operators")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check operator, exponent and weight against the hypothesis sets listed in the spec.
    Gate(RunArgs),
    /// Gate plus the norm-ratio sweep over truncations.
    Sweep(RunArgs),
    /// Every check listed in the spec.
    Report(RunArgs),
    /// Exact-identity and calibration suites.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct Common {
    /// Output directory.
    #[arg(long, default_value = "bound-lab-out")]
    out: PathBuf,
    /// Worker threads (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Args)]
struct RunArgs {
    /// Experiment or suite JSON.
    #[arg(long)]
    spec: PathBuf,
    /// Override the test-family seed of every experiment.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the sweep stability threshold.
    #[arg(long)]
    stability_threshold: Option<f64>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[command(flatten)]
    common: Common,
}

fn threads(n: Option<usize>) -> LabResult<()> {
    if let Some(n) = n {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| LabError::Spec(format!("--threads: {e}")))?;
    }
    Ok(())
}

fn execute(cli: Cli) -> LabResult<bool> {
    let (args, mode) = match cli.command {
        Command::Verify(v) => {
            threads(v.common.threads)?;
            let report = run_verify(v.seed)?;
            for e in &report.entries {
                println!("{:<5} {:<32} {:.3e} (< {:e})", if e.pass { "PASS" } else { "FAIL" }, e.name, e.max_residual, e.tolerance);
            }
            write_verify(&report, &v.common.out)?;
            return Ok(report.pass);
        }
        Command::Gate(a) => (a, Mode::Gate),
        Command::Sweep(a) => (a, Mode::Sweep),
        Command::Report(a) => (a, Mode::Full),
    };
    threads(args.common.threads)?;
    let mut specs = load_specs(&args.spec)?;
    for s in &mut specs {
        if let Some(seed) = args.seed {
            s.family.seed = seed;
        }
        if let Some(t) = args.stability_threshold {
            s.stability_threshold = t;
        }
        s.validate()?;
    }
    let report = run(&specs, mode)?;
    for e in &report.experiments {
        for v in &e.verdicts {
            println!("{:<5} {} {}: {}", if v.pass { "PASS" } else { "FAIL" }, e.name, v.check.label(), v.detail);
        }
    }
    for path in write_report(&report, &args.common.out)? {
        eprintln!("wrote {}", path.display());
    }
    Ok(report.pass)
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("bound-lab: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
