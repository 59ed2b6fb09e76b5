use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use bergspec_cli::{acceptance, runners, ExperimentConfig};
use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "bergspec", version, about = "Spectral experiments for Toeplitz operators with log-decaying symbols")]
struct Cli {
    /// Output directory (overrides the config's output_dir)
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    /// Seed for randomized checks (overrides the config's seed)
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (default: all cores)
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment config
    Run { config: PathBuf },
    /// Check a config against the schema without running it
    Validate { config: PathBuf },
    /// Run a built-in battery
    Suite { suite: Suite },
}

#[derive(Clone, Copy, ValueEnum)]
enum Suite {
    Acceptance,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<bool> {
    if let Some(t) = cli.threads {
        rayon::ThreadPoolBuilder::new().num_threads(t).build_global().context("configuring the thread pool")?;
    }
    match cli.command {
        Command::Validate { config } => {
            let cfg = ExperimentConfig::load(&config)?;
            println!("ok: {} ({})", cfg.name(), cfg.experiment.kind());
            Ok(true)
        }
        Command::Run { config } => {
            let cfg = ExperimentConfig::load(&config)?;
            let dir =
                cli.out_dir.or_else(|| cfg.output_dir.clone()).unwrap_or_else(|| Path::new("out").join(cfg.name()));
            let seed = cli.seed.or(cfg.seed).unwrap_or(0);
            let manifest = runners::run(&cfg, &dir, seed)?;
            for v in &manifest.verdicts {
                println!("{} {}", if v.pass { "PASS" } else { "FAIL" }, v.check);
            }
            println!("wrote {} files to {}", manifest.files.len() + 1, dir.display());
            Ok(manifest.pass)
        }
        Command::Suite { suite: Suite::Acceptance } => {
            let dir = cli.out_dir.unwrap_or_else(|| PathBuf::from("out/acceptance"));
            let outcomes = acceptance::run_suite(&dir, cli.seed.unwrap_or(0), |o| println!("{}", o.line()))?;
            let passed = outcomes.iter().filter(|o| o.pass).count();
            println!("{passed}/{} criteria passed", outcomes.len());
            Ok(passed == outcomes.len())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Cli {
        Cli::try_parse_from(std::iter::once("bergspec").chain(args.iter().copied())).unwrap()
    }

    #[test]
    fn global_flags_anywhere() {
        let cli = parse(&["run", "c.json", "--seed", "5", "--threads", "2", "--out-dir", "o"]);
        assert_eq!(cli.seed, Some(5));
        assert_eq!(cli.threads, Some(2));
        assert_eq!(cli.out_dir, Some(PathBuf::from("o")));
        assert!(matches!(parse(&["suite", "acceptance"]).command, Command::Suite { suite: Suite::Acceptance }));
        assert!(Cli::try_parse_from(["bergspec", "suite", "other"]).is_err());
    }

    #[test]
    fn validate_then_run() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = dir.path().join("p.json");
        std::fs::write(
            &cfg,
            r#"{"schema": "bergspec.experiment.v1", "name": "pw", "seed": 3,
                "experiment": {"kind": "pushnitski-compare", "n_grid": [10, 1000]}}"#,
        )
        .unwrap();
        let c = cfg.to_str().unwrap();
        assert!(run(parse(&["validate", c])).unwrap());
        let out = dir.path().join("out");
        assert!(run(parse(&["--out-dir", out.to_str().unwrap(), "run", c])).unwrap());
        let m = bergspec_cli::Manifest::load(&out).unwrap();
        assert_eq!(m.seed, 3);
        assert_eq!(m.name, "pw");
        assert_eq!(m.config["experiment"]["n_grid"][1], 1000);

        std::fs::write(&cfg, r#"{"schema": "bergspec.experiment.v1", "experiment": {"kind": "radial", "gamma": "x"}}"#)
            .unwrap();
        assert!(run(parse(&["validate", c])).is_err());
    }
}
