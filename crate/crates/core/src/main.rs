use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use edlab::acceptance::{run_suite, Suite};
use edlab::inference::{bayes_update, maxent_solve, ConditionalTable, Distribution, MomentConstraint};
use edlab::io::{
    parse_bayes_config, parse_config, parse_maxent_config, run_config, sample_config, ConfigErrors, ScenarioConfig,
};
use edlab::scenarios::Scenario;
use serde_json::json;

#[derive(Parser)]
#[command(name = "edlab", version, about = "Entropic dynamics numerical laboratory")]
struct Cli {
    /// Overrides the seed given in the config file.
    #[arg(long, global = true)]
    seed: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a scenario, write snapshots and a manifest.
    Run { config: PathBuf },
    /// Sample a trajectory ensemble and write histograms.
    Sample { config: PathBuf },
    /// Run the acceptance suite.
    Verify {
        #[arg(long, value_enum, default_value = "fast")]
        suite: SuiteArg,
    },
    /// Bayesian updating and maximum entropy.
    Infer {
        #[command(subcommand)]
        kind: InferKind,
    },
    /// Print the available scenarios.
    ListScenarios,
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    Fast,
    Full,
}

#[derive(Subcommand)]
enum InferKind {
    Bayes { config: PathBuf },
    Maxent { config: PathBuf },
}

enum Failure {
    Checks,
    Usage(String),
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))
}

fn config_failure(path: &Path, errors: ConfigErrors) -> Failure {
    let lines: Vec<String> = errors.0.iter().map(|i| format!("{}: {i}", path.display())).collect();
    Failure::Usage(lines.join("\n"))
}

fn load_scenario(path: &Path, seed: Option<u64>) -> Result<ScenarioConfig, Failure> {
    let mut cfg = parse_config(&read(path)?).map_err(|e| config_failure(path, e))?;
    if let Some(seed) = seed {
        cfg.seed = seed;
    }
    cfg.params().map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    Ok(cfg)
}

fn report_checks<'a>(checks: impl Iterator<Item = (&'a str, bool, &'a str)>) -> bool {
    let mut ok = true;
    for (name, passed, detail) in checks {
        if !passed {
            eprintln!("check failed: {name}: {detail}");
            ok = false;
        }
    }
    ok
}

fn execute(cli: Cli) -> Result<(), Failure> {
    let runtime = |e: edlab::Error| match e {
        edlab::Error::Config(m) => Failure::Usage(m),
        other => Failure::Usage(other.to_string()),
    };
    match cli.command {
        Command::ListScenarios => {
            for s in Scenario::ALL {
                println!("{s}");
            }
            Ok(())
        }
        Command::Run { config } => {
            let cfg = load_scenario(&config, cli.seed)?;
            let out = run_config(&cfg).map_err(runtime)?;
            eprintln!("wrote {} files to {}", out.manifest.files.len() + 1, out.dir.display());
            let checks = out.manifest.checks.iter().map(|c| (c.name.as_str(), c.passed, c.detail.as_str()));
            if report_checks(checks) { Ok(()) } else { Err(Failure::Checks) }
        }
        Command::Sample { config } => {
            let cfg = load_scenario(&config, cli.seed)?;
            let out = sample_config(&cfg).map_err(runtime)?;
            eprintln!("sampled to t = {} in {}", out.final_time, out.dir.display());
            let checks = out.manifest.checks.iter().map(|c| (c.name.as_str(), c.passed, c.detail.as_str()));
            if report_checks(checks) { Ok(()) } else { Err(Failure::Checks) }
        }
        Command::Verify { suite } => {
            let suite = match suite {
                SuiteArg::Fast => Suite::Fast,
                SuiteArg::Full => Suite::Full,
            };
            let reports = run_suite(suite);
            for r in &reports {
                eprint!("{r}");
            }
            let failed = reports.iter().filter(|r| !r.passed).count();
            eprintln!("{} of {} criteria passed", reports.len() - failed, reports.len());
            if failed == 0 { Ok(()) } else { Err(Failure::Checks) }
        }
        Command::Infer { kind } => {
            let value = match kind {
                InferKind::Bayes { config } => {
                    let c = parse_bayes_config(&read(&config)?).map_err(|e| config_failure(&config, e))?;
                    let prior = Distribution::new(c.prior).map_err(runtime)?;
                    let table =
                        ConditionalTable::new(c.likelihood.iter().map(|l| vec![*l, 1.0 - l]).collect()).map_err(runtime)?;
                    let post = bayes_update(&prior, &table, 0).map_err(runtime)?;
                    json!({ "posterior": post.weights() })
                }
                InferKind::Maxent { config } => {
                    let c = parse_maxent_config(&read(&config)?).map_err(|e| config_failure(&config, e))?;
                    let prior = Distribution::new(c.prior).map_err(runtime)?;
                    let cons: Vec<MomentConstraint> =
                        c.constraints.into_iter().map(|(f, t)| MomentConstraint::new(f, t)).collect();
                    let p = maxent_solve(&prior, &cons).map_err(runtime)?;
                    json!({ "distribution": p.weights() })
                }
            };
            println!("{value}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Checks) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("edlab: {msg}");
            ExitCode::from(2)
        }
    }
}
