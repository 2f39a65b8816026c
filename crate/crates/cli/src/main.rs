use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use flucbound::scenario::{
    apply_parameter, builtin, figure1_curves, figure1_to_csv, first_violation, load_scenario,
    rows_to_csv, run_scenario, Builtin, Overrides, ScenarioError, BUILTIN_NAMES,
};

#[derive(Parser)]
#[command(name = "flucbound", version, about = "Run open-system scenarios and check fluctuation-growth bounds")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file and write one CSV row per interior grid point.
    Run {
        #[arg(long)]
        scenario: PathBuf,
        /// Output CSV; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a built-in reproduction.
    Builtin {
        #[arg(long, value_parser = clap::builder::PossibleValuesParser::new(BUILTIN_NAMES))]
        name: String,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        dt: Option<f64>,
        #[arg(long = "t-max")]
        t_max: Option<f64>,
        #[arg(long)]
        gamma: Option<f64>,
        #[arg(long)]
        omega: Option<f64>,
        /// Also write the scenario file behind the builtin.
        #[arg(long = "emit-scenario")]
        emit_scenario: Option<PathBuf>,
    },
    /// Exit 0 iff every requested check holds wherever it is evaluated.
    Verify {
        #[arg(long)]
        scenario: PathBuf,
    },
    /// Run a scenario once per parameter value, in parallel, one CSV each.
    Sweep {
        #[arg(long)]
        scenario: PathBuf,
        /// One of dt, t_max, gamma.
        #[arg(long)]
        param: String,
        #[arg(long, value_delimiter = ',', num_args = 1.., required = true)]
        values: Vec<f64>,
        #[arg(long = "out-dir")]
        out_dir: PathBuf,
    },
}

fn write_output(out: Option<&Path>, text: &str) -> Result<(), ScenarioError> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| ScenarioError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn execute(command: Command) -> Result<ExitCode, ScenarioError> {
    match command {
        Command::Run { scenario, out } => {
            let spec = load_scenario(&scenario)?;
            write_output(out.as_deref(), &rows_to_csv(&run_scenario(&spec)?))?;
        }
        Command::Builtin {
            name,
            out,
            dt,
            t_max,
            gamma,
            omega,
            emit_scenario,
        } => {
            let overrides = Overrides {
                dt,
                t_max,
                gamma,
                omega,
            };
            match builtin(&name, &overrides)? {
                Builtin::Scenario(spec) => {
                    if let Some(path) = emit_scenario {
                        write_output(Some(&path), &(spec.to_json_pretty() + "\n"))?;
                    }
                    write_output(out.as_deref(), &rows_to_csv(&run_scenario(&spec)?))?;
                }
                Builtin::Figure1(p) => {
                    let points = figure1_curves(p.rate, p.t_max, p.dt)
                        .map_err(|e| ScenarioError::Run { t: 0.0, source: e })?;
                    write_output(out.as_deref(), &figure1_to_csv(&points))?;
                }
            }
        }
        Command::Verify { scenario } => {
            let spec = load_scenario(&scenario)?;
            let rows = run_scenario(&spec)?;
            return Ok(match first_violation(&spec, &rows) {
                None => {
                    println!("{}", serde_json::json!({"scenario": spec.name, "satisfied": true}));
                    ExitCode::SUCCESS
                }
                Some(v) => {
                    println!(
                        "{}",
                        serde_json::json!({
                            "scenario": spec.name,
                            "satisfied": false,
                            "first_violation": v,
                        })
                    );
                    ExitCode::from(1)
                }
            });
        }
        Command::Sweep {
            scenario,
            param,
            values,
            out_dir,
        } => {
            let base = load_scenario(&scenario)?;
            let specs = values
                .iter()
                .map(|&v| apply_parameter(&base, &param, v).map(|s| (v, s)))
                .collect::<Result<Vec<_>, _>>()?;
            std::fs::create_dir_all(&out_dir).map_err(|e| ScenarioError::Io {
                path: out_dir.display().to_string(),
                message: e.to_string(),
            })?;
            let results: Vec<Result<(), ScenarioError>> = std::thread::scope(|scope| {
                let handles: Vec<_> = specs
                    .iter()
                    .enumerate()
                    .map(|(i, (v, spec))| {
                        let path = out_dir.join(format!("{}_{param}_{i:03}_{v}.csv", base.name));
                        scope.spawn(move || {
                            let csv = rows_to_csv(&run_scenario(spec)?);
                            write_output(Some(&path), &csv)
                        })
                    })
                    .collect();
                handles
                    .into_iter()
                    .map(|h| h.join().expect("sweep worker panicked"))
                    .collect()
            });
            for r in results {
                r?;
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let message = e.render().to_string();
            eprintln!(
                "{}",
                serde_json::json!({"error": "usage", "message": message.trim()})
            );
            return ExitCode::from(2);
        }
    };
    match execute(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(2)
        }
    }
}
