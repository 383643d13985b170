use std::net::SocketAddr;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use irp_core::demo::DemoScript;
use irp_core::inference::render_action;
use irp_core::pddl::{emit_domain, emit_problem, parse_domain, parse_problem};
use irp_core::planner::{ground_task, plan, validate_plan, PlannerError, SearchConfig, SearchMode};
use irp_core::world::IrpConfig;
use irp_session::bench::{run_all, run_task, BenchError};
use irp_session::{Session, SessionError};

#[derive(Parser)]
#[command(
    name = "irp",
    version,
    about = "Teach, plan and execute pick-and-place tasks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Serve the REST API.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
        /// Session file to start from.
        #[arg(long)]
        session: Option<PathBuf>,
    },
    /// Run benchmark tasks headlessly.
    Bench {
        /// Task 1 to 6; all tasks when omitted.
        #[arg(long)]
        task: Option<u8>,
        #[arg(long)]
        optimal: bool,
        /// Print the reports as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Solve a PDDL domain and problem.
    Plan {
        #[arg(long)]
        domain: PathBuf,
        #[arg(long)]
        problem: PathBuf,
        #[arg(long)]
        optimal: bool,
    },
    /// Write the domain and every problem of a session as PDDL files.
    Export {
        #[arg(long)]
        session: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Infer an action from a scripted demonstration.
    Demo {
        #[arg(long)]
        script: PathBuf,
        /// Session file to add the action to; created when missing.
        #[arg(long)]
        session: Option<PathBuf>,
    },
}

/// Failures with a dedicated exit status.
#[derive(Debug, thiserror::Error)]
enum Outcome {
    #[error("no solution: {0}")]
    NoSolution(String),
    #[error("validation failed: {0}")]
    Invalid(String),
}

fn mode(optimal: bool) -> SearchMode {
    if optimal {
        SearchMode::Optimal
    } else {
        SearchMode::Ff
    }
}

fn classify(e: SessionError) -> anyhow::Error {
    match e {
        SessionError::NoSolution(p) => Outcome::NoSolution(p).into(),
        SessionError::InvalidPlan(_) | SessionError::PddlRoundTrip | SessionError::Pddl(_) => {
            Outcome::Invalid(e.to_string()).into()
        }
        e => e.into(),
    }
}

fn load_session(path: &PathBuf) -> Result<Session> {
    Session::load(path).with_context(|| format!("loading {}", path.display()))
}

fn bench(task: Option<u8>, optimal: bool, json: bool) -> Result<()> {
    let reports = match task {
        Some(t) => run_task(t, mode(optimal)).map(|r| vec![r]),
        None => run_all(mode(optimal)),
    };
    let reports = reports.map_err(|e| match e {
        BenchError::Stage {
            source: SessionError::NoSolution(p),
            ..
        } => Outcome::NoSolution(p).into(),
        e => anyhow::Error::from(e),
    })?;
    if json {
        println!("{}", serde_json::to_string_pretty(&reports)?);
    } else {
        for r in &reports {
            print!("{}", r.render());
        }
    }
    match reports.iter().find(|r| !r.success) {
        Some(r) => Err(Outcome::Invalid(format!("task {} did not reach its goal", r.task)).into()),
        None => Ok(()),
    }
}

fn plan_files(domain: &PathBuf, problem: &PathBuf, optimal: bool) -> Result<()> {
    let read = |p: &PathBuf| {
        std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))
    };
    let d = parse_domain(&read(domain)?)
        .map_err(|e| Outcome::Invalid(format!("{}: {e}", domain.display())))?;
    let p = parse_problem(&read(problem)?)
        .map_err(|e| Outcome::Invalid(format!("{}: {e}", problem.display())))?;
    let task = ground_task(&d, &p).map_err(|e| Outcome::Invalid(e.to_string()))?;
    let config = SearchConfig {
        mode: mode(optimal),
        ..SearchConfig::default()
    };
    let found = match plan(&task, &config) {
        Ok(found) => found,
        Err(PlannerError::NoSolution) => return Err(Outcome::NoSolution(p.name.clone()).into()),
        Err(e) => return Err(e.into()),
    };
    validate_plan(&task, &found).map_err(|e| Outcome::Invalid(e.to_string()))?;
    print!("{}", found.render());
    Ok(())
}

fn export(session: &PathBuf, out: &PathBuf) -> Result<()> {
    let s = load_session(session)?;
    std::fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let domain = out.join("domain.pddl");
    std::fs::write(&domain, emit_domain(&s.domain.to_pddl()))?;
    println!("{}", domain.display());
    for name in s.problems.keys() {
        let p = s.problem_pddl(name).map_err(classify)?;
        let path = out.join(format!("{name}.pddl"));
        std::fs::write(&path, emit_problem(&p))?;
        println!("{}", path.display());
    }
    Ok(())
}

fn demo(script: &PathBuf, session: Option<&PathBuf>) -> Result<()> {
    let text =
        std::fs::read_to_string(script).with_context(|| format!("reading {}", script.display()))?;
    let script = DemoScript::from_json(&text)?;
    let mut s = match session {
        Some(p) if p.exists() => load_session(p)?,
        _ => Session::new(IrpConfig::from_env()?),
    };
    let action = s.teach(&script).map_err(classify)?;
    println!("{}", render_action(action).join("\n"));
    if let Some(p) = session {
        s.save(p)?;
    }
    Ok(())
}

async fn serve(host: &str, port: u16, session: Option<&PathBuf>) -> Result<()> {
    let s = match session {
        Some(p) => load_session(p)?,
        None => Session::new(IrpConfig::from_env()?),
    };
    let addr: SocketAddr = format!("{host}:{port}")
        .parse()
        .context("invalid listen address")?;
    tracing::info!(%addr, "listening");
    irp_session::api::serve(addr, s).await?;
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Serve {
            port,
            host,
            session,
        } => tokio::runtime::Runtime::new()?.block_on(serve(&host, port, session.as_ref())),
        Command::Bench {
            task,
            optimal,
            json,
        } => bench(task, optimal, json),
        Command::Plan {
            domain,
            problem,
            optimal,
        } => plan_files(&domain, &problem, optimal),
        Command::Export { session, out } => export(&session, &out),
        Command::Demo { script, session } => demo(&script, session.as_ref()),
    }
}

fn main() -> ExitCode {
    tracing_subscriber::fmt()
        .with_writer(std::io::stderr)
        .init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            match e.downcast_ref::<Outcome>() {
                Some(Outcome::NoSolution(_)) => ExitCode::from(2),
                Some(Outcome::Invalid(_)) => ExitCode::from(3),
                None => ExitCode::FAILURE,
            }
        }
    }
}
