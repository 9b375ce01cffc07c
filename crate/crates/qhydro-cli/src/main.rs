use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use qhydro::config::Config;
use qhydro::verify::{run_suite, Suite};
use qhydro::Error;

/// Quantum and nonlocal hydrodynamics scenarios and acceptance checks.
#[derive(Parser)]
#[command(name = "qhydro", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the scenario described by a config file.
    Run { config: PathBuf },
    /// Run an acceptance suite and print a pass/fail table.
    Verify {
        #[arg(default_value = "all")]
        suite: String,
    },
    /// Rerun a scenario over values of one numeric config key.
    Sweep {
        config: PathBuf,
        /// Key as section.name, e.g. scenario.dt
        #[arg(long)]
        param: String,
        /// Comma-separated values
        #[arg(long, allow_hyphen_values = true)]
        values: String,
    },
}

/// QHYDRO_OUT, then the config's output.dir, then ./qhydro-out.
fn output_root(cfg: Option<&Config>) -> PathBuf {
    if let Some(dir) = std::env::var_os("QHYDRO_OUT") {
        return PathBuf::from(dir);
    }
    cfg.and_then(|c| c.out_dir.clone()).unwrap_or_else(|| PathBuf::from("qhydro-out"))
}

fn stem(path: &Path) -> String {
    path.file_stem().map_or("run".into(), |s| s.to_string_lossy().into_owned())
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_) | Error::UnknownScenario(_) | Error::Validation(_) | Error::Param { .. } => 2,
        e if e.is_numerical() => 3,
        _ => 1,
    }
}

fn run(cli: Cli) -> Result<u8, Error> {
    match cli.command {
        Command::Run { config } => {
            let cfg = Config::from_file(&config)?;
            let dir = output_root(Some(&cfg)).join(stem(&config));
            let summary = match qhydro::scenario::run(&cfg, &dir) {
                Ok(s) => s,
                Err(e) if e.is_numerical() => {
                    eprintln!("diagnostics written to {}", dir.join("diagnostics").display());
                    return Err(e);
                }
                Err(e) => return Err(e),
            };
            println!("wrote {} files to {}", summary.files.len(), summary.dir.display());
            if let Some((name, v)) = summary.metric {
                println!("{name} = {v:.6e}");
            }
            for (name, v) in &summary.drifts {
                println!("{name} = {v:.6e}");
            }
            Ok(0)
        }
        Command::Verify { suite } => {
            let suite: Suite = suite.parse()?;
            let report = run_suite(suite)?;
            print!("{}", report.table());
            let root = output_root(None);
            std::fs::create_dir_all(&root)?;
            let path = root.join(format!("verify-{}.csv", format!("{suite:?}").to_lowercase()));
            report.write_csv(&path)?;
            println!("report written to {}", path.display());
            Ok(if report.passed() { 0 } else { 1 })
        }
        Command::Sweep { config, param, values } => {
            let cfg = Config::from_file(&config)?;
            let parsed: Result<Vec<f64>, _> = values.split(',').map(|s| s.trim().parse::<f64>()).collect();
            let values = parsed.map_err(|_| Error::Validation(vec![format!("--values '{values}' is not a numeric list")]))?;
            let dir = output_root(Some(&cfg)).join(format!("{}-sweep-{}", stem(&config), param.replace('.', "-")));
            let summary = qhydro::scenario::sweep(&cfg, &param, &values, &dir)?;
            println!("{:>14}  {:>14}  drifts", summary.parameter, "error");
            for r in &summary.rows {
                let drifts: Vec<String> = r.drifts.iter().map(|(k, v)| format!("{k}={v:.3e}")).collect();
                let err = r.error.map_or("-".to_string(), |e| format!("{e:.6e}"));
                println!("{:>14.6e}  {err:>14}  {}", r.value, drifts.join(" "));
            }
            match summary.slope {
                Some(s) => println!("log-log slope against {}: {s:.4}", summary.abscissa),
                None => println!("no reference for a slope fit"),
            }
            println!("summary written to {}", dir.join("sweep.csv").display());
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
