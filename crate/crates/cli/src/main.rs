use std::io;
use std::net::SocketAddr;
use std::num::NonZeroU64;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use anyhow::{anyhow, Context, Result};
use clap::{Parser, Subcommand};
use macie_core::pocket::{train, TrainerConfig};
use macie_core::{evaluate, KnowledgeBase, Scenario, TruthValue};
use macie_service::{AppState, ServiceConfig};

mod consult;

#[derive(Parser)]
#[command(
    name = "macie",
    version,
    about = "Connectionist expert systems from noisy deep models"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train a knowledge base with the pocket algorithm.
    Train {
        scenario: PathBuf,
        #[arg(long, default_value_t = NonZeroU64::new(10_000).unwrap())]
        iterations: NonZeroU64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Train on clean deep-model examples only.
        #[arg(long)]
        no_noise: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Score a knowledge base against a scenario.
    Eval {
        kb: PathBuf,
        scenario: PathBuf,
        #[arg(long, default_value_t = macie_core::eval::DEFAULT_GROUPS,
              value_parser = clap::value_parser!(u32).range(1..))]
        groups: u32,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Emit the report as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Print the learning matrix.
    Show { kb: PathBuf },
    /// Run an interactive consultation on the terminal.
    Consult {
        kb: PathBuf,
        /// Known value before the first question, e.g. `--set V2=true`.
        #[arg(long = "set", value_name = "VAR=VALUE")]
        known: Vec<String>,
    },
    /// Serve consultations over HTTP.
    Serve {
        kb: PathBuf,
        #[arg(long, default_value = "127.0.0.1:8080")]
        listen: SocketAddr,
        /// Browser origin allowed to call the API.
        #[arg(long)]
        cors_origin: Option<String>,
        /// Seconds an idle session is kept.
        #[arg(long, default_value_t = 3600)]
        idle_timeout: u64,
    },
}

fn load_kb(path: &PathBuf) -> Result<KnowledgeBase> {
    KnowledgeBase::load(path).with_context(|| format!("loading {}", path.display()))
}

fn load_scenario(path: &PathBuf) -> Result<Scenario> {
    Scenario::load(path).with_context(|| format!("loading {}", path.display()))
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Train {
            scenario,
            iterations,
            seed,
            no_noise,
            out,
        } => {
            let s = load_scenario(&scenario)?;
            let start = Instant::now();
            let cfg = TrainerConfig {
                iterations,
                seed,
                noise: !no_noise,
            };
            let trained = train(&s, &cfg);
            trained
                .knowledge_base
                .save(&out)
                .with_context(|| format!("writing {}", out.display()))?;
            println!(
                "iterations={} best_run={} mistakes={} elapsed={:.3}s",
                iterations,
                trained.best_run,
                trained.mistakes,
                start.elapsed().as_secs_f64()
            );
        }
        Command::Eval {
            kb,
            scenario,
            groups,
            seed,
            json,
        } => {
            let kb = load_kb(&kb)?;
            let s = load_scenario(&scenario)?;
            let report = evaluate(&kb, &s, groups, seed)?;
            if json {
                println!("{}", serde_json::to_string_pretty(&report)?);
            } else {
                print!("{}", report.to_table(s.m_goals()));
                println!("{}", report.summary_line());
            }
        }
        Command::Show { kb } => {
            let kb = load_kb(&kb)?;
            let width = kb.goal_names().iter().map(String::len).max().unwrap_or(0);
            for (g, row) in kb.rows().enumerate() {
                let cells: Vec<String> = row.iter().map(i64::to_string).collect();
                println!("{:<width$}  {}", kb.goal_name(g), cells.join(" "));
            }
            println!("{:<width$}  bias {}", "", kb.input_names().join(" "));
        }
        Command::Consult { kb, known } => {
            let kb = load_kb(&kb)?;
            let known = known
                .iter()
                .map(|spec| {
                    let (name, value) = spec
                        .split_once('=')
                        .ok_or_else(|| anyhow!("expected VAR=VALUE, got {spec:?}"))?;
                    let k = kb
                        .input_index(name)
                        .ok_or_else(|| anyhow!("unknown variable {name:?}"))?;
                    let v: TruthValue = value.parse()?;
                    Ok((k, v))
                })
                .collect::<Result<Vec<_>>>()?;
            let stdin = io::stdin();
            consult::run(Arc::new(kb), &known, stdin.lock(), &mut io::stdout())?;
        }
        Command::Serve {
            kb,
            listen,
            cors_origin,
            idle_timeout,
        } => {
            let kb = load_kb(&kb)?;
            let state = AppState::new(
                Some(kb),
                ServiceConfig {
                    idle_timeout: Duration::from_secs(idle_timeout),
                    cors_origin,
                },
            );
            let rt = tokio::runtime::Runtime::new()?;
            rt.block_on(async move {
                let listener = tokio::net::TcpListener::bind(listen)
                    .await
                    .with_context(|| format!("binding {listen}"))?;
                println!("listening on {}", listener.local_addr()?);
                macie_service::serve_on(listener, state).await?;
                Ok::<_, anyhow::Error>(())
            })?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
