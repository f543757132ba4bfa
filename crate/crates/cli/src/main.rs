use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use sublin_cli::{load_config, run, CliResult, RunOutcome};

/// Checks the hypotheses of a weak law of large numbers under sublinear
/// expectations and estimates its deviation capacities.
///
/// Exit status: 0 when every check passed, 3 when the run completed but a
/// hypothesis check failed, 1 when a stage failed, 2 for bad flags,
/// configuration or output directory.
#[derive(Debug, Parser)]
#[command(name = "sublin", version)]
struct Args {
    /// Experiment document (JSON).
    #[arg(long, value_name = "PATH")]
    config: PathBuf,

    /// Output directory; overrides the document's `output_dir`.
    #[arg(long, value_name = "PATH")]
    out_dir: Option<PathBuf>,

    /// Seed; overrides `budget.seed`.
    #[arg(long, value_name = "U64")]
    seed: Option<u64>,

    /// Worker threads; overrides `jobs`. Results do not depend on it.
    #[arg(long, value_name = "N", value_parser = clap::value_parser!(u64).range(1..))]
    jobs: Option<u64>,

    /// Divide `mc_reps` by 10 (floor 100) and `restarts` by 10.
    #[arg(long)]
    quick: bool,
}

fn execute(args: Args) -> CliResult<RunOutcome> {
    let mut config = load_config(&args.config)?;
    if let Some(seed) = args.seed {
        config = config.with_seed(seed);
    }
    if let Some(dir) = args.out_dir {
        config = config.with_output_dir(dir);
    }
    if let Some(jobs) = args.jobs {
        config = config.with_jobs(jobs as usize);
    }
    if args.quick {
        config = config.quick();
    }
    run(&config)
}

fn main() -> ExitCode {
    match execute(Args::parse()) {
        Ok(outcome) => {
            let s = &outcome.summary;
            let c = &s.conditions;
            println!("config  {}", s.config_sha256);
            println!("model   {}", s.model);
            println!(
                "psi     {} (max {:.4} at y = {} for n = {})",
                verdict(c.psi.pass),
                c.psi.worst_value,
                c.psi.worst_y,
                c.psi.worst_n
            );
            println!("ui      {}", verdict(c.ui.pass));
            for k in &c.kolmogorov {
                println!("kolmog  {} {}", verdict(k.pass), k.law);
            }
            if let Some(reports) = &c.cesaro {
                let ok = reports.iter().all(|r| r.pass);
                println!("cesaro  {}", verdict(ok));
            }
            for line in &s.convergence {
                println!(
                    "eps {:<6} n {:<7} V_upper {:.4}  V_lower {:.4}  v_band {:.4}",
                    line.epsilon, line.n, line.v_upper_hat, line.v_lower_hat, line.v_band_hat
                );
            }
            if let Some(reason) = &s.skipped {
                println!("skipped {reason}");
            }
            println!("output  {}", outcome.output_dir.display());
            ExitCode::from(outcome.exit_code())
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}

fn verdict(pass: bool) -> &'static str {
    if pass {
        "pass"
    } else {
        "FAIL"
    }
}
