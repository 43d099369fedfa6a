use std::path::PathBuf;
use std::sync::Arc;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use dynsched_agents::BackendKind;
use dynsched_core::{Instance, ProblemKind};
use dynsched_service::{api, ConstrainRequest, Engine, ServiceConfig, ServiceError};

/// Scheduling with constraints added in everyday language.
#[derive(Parser)]
#[command(name = "dynsched", version)]
struct Cli {
    /// TOML configuration file.
    #[arg(long, global = true, env = "DYNSCHED_CONFIG")]
    config: Option<PathBuf>,
    /// Language model backend.
    #[arg(long, global = true, value_enum)]
    backend: Option<BackendArg>,
    /// Transcript file replayed by the fixture backend.
    #[arg(long, global = true)]
    fixture: Option<PathBuf>,
    /// Solver time limit in seconds.
    #[arg(long, global = true)]
    time_limit: Option<f64>,
    /// Seed for session ids.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Directory of persisted sessions.
    #[arg(long, global = true)]
    sessions: Option<PathBuf>,
    /// Data directory holding test sets and fixtures.
    #[arg(long, global = true)]
    data: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum BackendArg {
    Fixture,
    Http,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Args)]
struct Source {
    /// Persisted session to work on.
    #[arg(long, conflicts_with_all = ["kind", "instance"])]
    session: Option<String>,
    /// Problem kind of a fresh session: gsp, nsp or static_nurse.
    #[arg(long, requires = "instance")]
    kind: Option<ProblemKind>,
    /// Instance data file of a fresh session.
    #[arg(long, requires = "kind")]
    instance: Option<PathBuf>,
    /// Keep the fresh session in the sessions directory.
    #[arg(long)]
    save: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Solve an instance or a session and print the schedule.
    Solve {
        #[command(flatten)]
        source: Source,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Add a constraint given in everyday language or as patch text.
    Constrain {
        #[command(flatten)]
        source: Source,
        /// Request in everyday language.
        #[arg(long, conflicts_with_all = ["dsl", "dsl_file"], required_unless_present_any = ["dsl", "dsl_file"])]
        nl: Option<String>,
        /// Patch text.
        #[arg(long, conflicts_with = "dsl_file")]
        dsl: Option<String>,
        /// File holding patch text.
        #[arg(long)]
        dsl_file: Option<PathBuf>,
        /// Extra instance value named by the request, as KEY=INT.
        #[arg(long = "set", value_parser = parse_key_value)]
        set: Vec<(String, i64)>,
        /// Bound on the number of changed schedule cells.
        #[arg(long)]
        t_perturb: Option<i64>,
        /// Accept the result into the session.
        #[arg(long)]
        accept: bool,
        #[arg(long)]
        json: bool,
    },
    /// Run a test set against a replay fixture and print the results table.
    Eval {
        /// Test set file or name under the data directory.
        #[arg(long, default_value = "eval70")]
        testset: String,
        /// Replay fixture file or name; defaults to the configured fixture.
        #[arg(long)]
        replay: Option<String>,
        /// Write the per-case report here.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Reword a request several ways.
    Paraphrase {
        text: String,
        #[arg(short, default_value_t = 4)]
        n: usize,
    },
    /// Serve the HTTP API.
    Serve {
        #[arg(long)]
        bind: Option<String>,
    },
    /// Print the schedule of a session or a solved instance.
    Export {
        #[command(flatten)]
        source: Source,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
}

fn parse_key_value(s: &str) -> Result<(String, i64), String> {
    let (k, v) = s.split_once('=').ok_or_else(|| format!("expected KEY=INT, got `{s}`"))?;
    let v = v.trim().parse().map_err(|_| format!("`{v}` is not an integer"))?;
    Ok((k.trim().to_string(), v))
}

fn config(cli: &Cli) -> anyhow::Result<ServiceConfig> {
    let mut cfg = ServiceConfig::load(cli.config.as_deref()).map_err(|e| anyhow!(e))?;
    cfg.apply_env(|k| std::env::var(k).ok()).map_err(|e| anyhow!(e))?;
    if let Some(b) = cli.backend {
        cfg.agent.backend = match b {
            BackendArg::Fixture => BackendKind::Fixture,
            BackendArg::Http => BackendKind::Http,
        };
    }
    if let Some(f) = &cli.fixture {
        cfg.agent.fixture = Some(f.display().to_string());
    }
    if let Some(t) = cli.time_limit {
        cfg.time_limit_secs = t;
    }
    if let Some(s) = cli.seed {
        cfg.seed = Some(s);
    }
    if let Some(d) = &cli.sessions {
        cfg.sessions_dir = Some(d.clone());
    }
    if let Some(d) = &cli.data {
        cfg.data_dir = d.clone();
    }
    Ok(cfg)
}

fn engine(cfg: &ServiceConfig, persistent: bool) -> anyhow::Result<Engine> {
    let mut opts = cfg.engine_options();
    if !persistent {
        opts.sessions_dir = None;
    } else if opts.sessions_dir.is_none() {
        bail!("no sessions directory configured; pass --sessions or set DYNSCHED_SESSIONS");
    }
    Ok(Engine::open(cfg.build_backend()?, opts)?)
}

/// Engine plus the id of the session named or created by `source`.
fn open_source(cfg: &ServiceConfig, source: &Source) -> anyhow::Result<(Engine, String)> {
    if let Some(id) = &source.session {
        let e = engine(cfg, true)?;
        e.session_info(id)?;
        return Ok((e, id.clone()));
    }
    let (Some(kind), Some(path)) = (source.kind, &source.instance) else {
        bail!("give --session, or --kind with --instance");
    };
    let text = std::fs::read_to_string(path).with_context(|| path.display().to_string())?;
    let instance = Instance::from_data_json(kind, &text)?;
    let e = engine(cfg, source.save)?;
    let info = e.create_session(instance)?;
    if source.save {
        eprintln!("session {}", info.id);
    }
    Ok((e, info.id))
}

fn print_schedule(e: &Engine, id: &str, format: Format) -> anyhow::Result<()> {
    let view = e.schedule(id)?;
    match format {
        Format::Text => print!("{}", view.grid.to_text()),
        Format::Csv => print!("{}", view.grid.to_csv()),
        Format::Json => println!("{}", serde_json::to_string_pretty(&view)?),
    }
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let cfg = config(&cli)?;
    match cli.command {
        Command::Solve { source, format } => {
            let (e, id) = open_source(&cfg, &source)?;
            let report = e.solve(&id, None)?;
            if !report.status.has_solution() {
                println!("status: {}", report.status.as_str());
                return Ok(());
            }
            print_schedule(&e, &id, format)
        }
        Command::Export { source, format } => {
            let (e, id) = open_source(&cfg, &source)?;
            if source.session.is_none() {
                e.solve(&id, None)?;
            }
            print_schedule(&e, &id, format)
        }
        Command::Constrain {
            source,
            nl,
            dsl,
            dsl_file,
            set,
            t_perturb,
            accept,
            json,
        } => {
            let (e, id) = open_source(&cfg, &source)?;
            if !e.session_info(&id)?.has_schedule {
                e.solve(&id, None)?;
            }
            let mut req = match (nl, dsl, dsl_file) {
                (Some(text), _, _) => ConstrainRequest::nl(text),
                (_, Some(text), _) => ConstrainRequest::dsl(text),
                (_, _, Some(path)) => ConstrainRequest::dsl(std::fs::read_to_string(&path)?),
                _ => bail!("give --nl, --dsl or --dsl-file"),
            };
            for (k, v) in set {
                req = req.with_scalar(&k, v);
            }
            req.t_perturb = t_perturb;
            let resp = e.constrain(&id, &req)?;
            if json {
                println!("{}", serde_json::to_string_pretty(&resp)?);
            } else {
                println!("{}", resp.patch_text.trim_end());
                println!("attempts: {}", resp.attempts);
                println!(
                    "status: {}  objective: {}  changed cells: {}",
                    resp.report.status.as_str(),
                    resp.report.objective.map_or("-".into(), |v| v.to_string()),
                    resp.hamming
                );
            }
            if accept {
                e.accept(&id)?;
                if !json {
                    print_schedule(&e, &id, Format::Text)?;
                }
            }
            Ok(())
        }
        Command::Eval {
            testset,
            replay,
            out,
            threads,
        } => {
            let e = engine(&cfg, false)?;
            let fixture = replay
                .or_else(|| cfg.agent.fixture.clone())
                .ok_or_else(|| anyhow!("give --replay or configure a fixture"))?;
            let run = e.eval_run(&testset, &fixture, threads)?;
            print!("{}", run.table.render());
            if let Some(path) = out {
                std::fs::write(&path, run.records_json() + "\n").with_context(|| path.display().to_string())?;
            }
            Ok(())
        }
        Command::Paraphrase { text, n } => {
            let e = engine(&cfg, false)?;
            for (i, p) in e.paraphrase(&text, n)?.iter().enumerate() {
                println!("{}. {}", i + 1, p.text);
            }
            Ok(())
        }
        Command::Serve { bind } => {
            let bind = bind.unwrap_or_else(|| cfg.bind.clone());
            let e = Arc::new(engine(&cfg, cfg.sessions_dir.is_some())?);
            tokio::runtime::Runtime::new()?.block_on(api::serve(e, &bind))?;
            Ok(())
        }
    }
}

fn main() {
    tracing_subscriber::fmt()
        .with_env_filter(
            tracing_subscriber::EnvFilter::try_from_default_env().unwrap_or_else(|_| "info".into()),
        )
        .with_writer(std::io::stderr)
        .init();
    if let Err(err) = run(Cli::parse()) {
        match err.downcast_ref::<ServiceError>() {
            Some(e) => eprintln!("error: {}: {e}", e.class()),
            None => eprintln!("error: {err:#}"),
        }
        std::process::exit(1);
    }
}
