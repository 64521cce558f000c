use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use eulerfv_lab::{run, selftest, study, LabError, RunConfig};

#[derive(Parser)]
#[command(name = "eulerfv", version, about = "Entropy diagnostics for finite-volume Euler schemes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Seed recorded in the outputs and used by random suites.
    #[arg(long)]
    seed: Option<u64>,
    /// Sine modes per direction of the weak-norm surrogate.
    #[arg(long)]
    modes: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Run one configuration and check its bounds.
    Run {
        config: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Run every resolution of the configured ladder and fit orders.
    Study {
        config: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Run the seeded property suites.
    Selftest {
        #[command(flatten)]
        common: Common,
    },
}

fn load(path: &Path, common: &Common) -> Result<RunConfig, LabError> {
    let mut c = RunConfig::from_path(path)?;
    if let Some(seed) = common.seed {
        c.seed = seed;
    }
    if let Some(modes) = common.modes {
        c.modes = modes;
    }
    c.validate()?;
    Ok(c)
}

fn execute(cli: Cli) -> Result<bool, LabError> {
    match cli.command {
        Command::Run { config, common } => {
            let c = load(&config, &common)?;
            let a = run(&c, &common.out)?;
            let s = &a.summary;
            println!(
                "{} steps to t = {}, entropy {} -> {}, min rho {}, min e {}",
                s.steps, s.final_time, s.initial_entropy, s.final_entropy, s.min_rho, s.min_e
            );
            for b in &a.bounds {
                let tag = if b.satisfied { "ok  " } else { "FAIL" };
                println!("{tag} {:<18} {:.6e} <= {:.6e}", b.name, b.lhs, b.rhs);
            }
            Ok(s.all_bounds_satisfied)
        }
        Command::Study { config, common } => {
            let c = load(&config, &common)?;
            let t = study(&c, &common.out)?;
            println!("cells        h        weak        l1   bounds");
            for r in &t.levels {
                println!(
                    "{:>5} {:.3e} {:.3e} {:.3e}   {}",
                    r.cells,
                    r.h,
                    r.weak_remainder,
                    r.l1_remainder,
                    if r.bounds_satisfied { "ok" } else { "FAIL" }
                );
            }
            println!("order weak {}, l1 {}", t.weak_order, t.l1_order);
            println!("spread M {:.3}, BV {:.3}", t.m_spread, t.bv_spread);
            Ok(t.bounds_satisfied)
        }
        Command::Selftest { common } => {
            let seed = common.seed.unwrap_or(0);
            let checks = selftest(seed)?;
            for c in &checks {
                let tag = if c.passed { "ok  " } else { "FAIL" };
                println!("{tag} {:<24} {:>6} cases, worst {:.3e}", c.name, c.cases, c.worst);
            }
            fs::create_dir_all(&common.out).map_err(|source| LabError::Io {
                path: common.out.clone(),
                source,
            })?;
            let path = common.out.join("selftest.json");
            let doc = serde_json::json!({ "seed": seed, "checks": checks });
            fs::write(&path, serde_json::to_string_pretty(&doc)? + "\n")
                .map_err(|source| LabError::Io { path, source })?;
            Ok(checks.iter().all(|c| c.passed))
        }
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
