//! The `nlq` command: interactive and one-shot questions, the HTTP API,
//! evaluation, classifier training and template checks.

pub mod repl;
pub mod server;

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use nlq_core::classify::{fit, parse_corpus, ClassifyError};
use nlq_core::dialogue::{handle_turn, AssetPaths, Assets, DialogueContext};
use nlq_core::eval::{evaluate, load_dataset, load_fixtures, render_report, ReportFormat};
use nlq_core::template::load_templates;

#[derive(Debug, Parser)]
#[command(name = "nlq", version, about = "Ask questions of a small relational database in plain English")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Clone)]
pub struct AssetArgs {
    /// Catalog file (`table<TAB>col:type,...`).
    #[arg(long, default_value = "data/db/hotel/catalog.tsv")]
    pub catalog: PathBuf,
    /// Directory holding `<table>.csv` files [default: the catalog's directory]
    #[arg(long)]
    pub data_dir: Option<PathBuf>,
    /// Template file [default: templates.txt next to the catalog]
    #[arg(long)]
    pub templates: Option<PathBuf>,
    #[arg(long, default_value = "data/models/statement.linmodel")]
    pub stmt_model: PathBuf,
    #[arg(long, default_value = "data/models/linking.linmodel")]
    pub link_model: PathBuf,
    /// Cue and synonym lexicon [default: the built-in one]
    #[arg(long)]
    pub lexicon: Option<PathBuf>,
}

impl AssetArgs {
    pub fn paths(&self) -> AssetPaths {
        let dir = self.catalog.parent().map(Path::to_path_buf).unwrap_or_default();
        AssetPaths {
            catalog: self.catalog.clone(),
            data_dir: self.data_dir.clone().unwrap_or_else(|| dir.clone()),
            templates: self.templates.clone().unwrap_or_else(|| dir.join("templates.txt")),
            statement_model: self.stmt_model.clone(),
            linking_model: self.link_model.clone(),
            lexicon: self.lexicon.clone(),
        }
    }

    pub fn load(&self) -> Result<Assets> {
        Assets::load(&self.paths()).context("loading assets")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelKind {
    Statement,
    Linking,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Interactive question loop (`:reset` clears context, `:quit` exits).
    Repl(#[command(flatten)] AssetArgs),
    /// Answer a single question.
    Ask {
        #[command(flatten)]
        assets: AssetArgs,
        question: Vec<String>,
    },
    /// Serve the JSON API (and optionally the chat UI).
    Serve {
        #[command(flatten)]
        assets: AssetArgs,
        #[arg(long, default_value_t = 8080)]
        port: u16,
        /// Directory of static files served at `/`.
        #[arg(long)]
        static_dir: Option<PathBuf>,
        /// Idle minutes before a session is dropped.
        #[arg(long, default_value_t = 30)]
        session_ttl_minutes: u64,
    },
    /// Score a question/gold-SQL corpus.
    Eval {
        /// One or more dataset files.
        #[arg(long, required = true, num_args = 1..)]
        dataset: Vec<PathBuf>,
        /// Directory with one sub-directory per database.
        #[arg(long, default_value = "data/db")]
        db_dir: PathBuf,
        #[arg(long, default_value = "data/models")]
        models_dir: PathBuf,
        #[arg(long)]
        lexicon: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
        /// Also list every question that was answered wrongly.
        #[arg(long)]
        verbose: bool,
    },
    /// Fit a classifier on a `label<TAB>text` corpus.
    Train {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum)]
        kind: ModelKind,
        #[arg(long, default_value_t = nlq_core::classify::DEFAULT_EPOCHS)]
        epochs: usize,
    },
    /// Parse and check a template file.
    ValidateTemplates {
        #[arg(long, default_value = "data/db/hotel/templates.txt")]
        templates: PathBuf,
    },
}

/// Raised by `train` on an empty corpus; maps to exit status 2.
#[derive(Debug)]
pub struct EmptyCorpus;

impl std::fmt::Display for EmptyCorpus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("training corpus has no examples")
    }
}

impl std::error::Error for EmptyCorpus {}

/// Exit status for an error returned by [`run`].
pub fn exit_code(err: &anyhow::Error) -> i32 {
    if err.is::<EmptyCorpus>() {
        2
    } else {
        1
    }
}

pub fn run(cli: Cli, out: &mut impl Write) -> Result<()> {
    match cli.command {
        Command::Repl(args) => {
            let Assets { engine, mut db } = args.load()?;
            let stdin = io::stdin();
            repl::run_repl(stdin.lock(), out, &engine, &mut db)?;
        }
        Command::Ask { assets, question } => {
            let question = question.join(" ");
            if question.trim().is_empty() {
                bail!("no question given");
            }
            let Assets { engine, mut db } = assets.load()?;
            let mut ctx = DialogueContext::new("ask");
            match handle_turn(&mut ctx, &question, &engine, &mut db) {
                Ok(o) => repl::print_outcome(out, &o)?,
                Err(e) => {
                    repl::print_error(out, &e)?;
                    bail!("{e}");
                }
            }
        }
        Command::Serve { assets, port, static_dir, session_ttl_minutes } => {
            let Assets { engine, db } = assets.load()?;
            let state = Arc::new(server::AppState::new(engine, db, Duration::from_secs(session_ttl_minutes * 60)));
            let app = server::router(state, static_dir);
            let rt = tokio::runtime::Runtime::new()?;
            rt.block_on(async move {
                let listener = tokio::net::TcpListener::bind(("0.0.0.0", port)).await?;
                log::info!("listening on {}", listener.local_addr()?);
                writeln!(out, "listening on http://{}", listener.local_addr()?)?;
                axum::serve(listener, app).await?;
                anyhow::Ok(())
            })?;
        }
        Command::Eval { dataset, db_dir, models_dir, lexicon, format, verbose } => {
            let mut reports = Vec::new();
            for path in &dataset {
                let examples = load_dataset(path)?;
                let fixtures = load_fixtures(&examples, &db_dir, &models_dir, lexicon.as_deref())?;
                let name = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
                let (report, results) = evaluate(&name, &examples, &fixtures)?;
                if verbose {
                    for r in results.iter().filter(|r| !r.correct_execution) {
                        let got = match &r.outcome {
                            Ok(o) => o.effective_sql.to_string(),
                            Err(e) => format!("error at {}: {}", e.stage, e.error),
                        };
                        writeln!(out, "[{} #{}] {}\n  gold: {}\n  got:  {}", r.example.session, r.example.turn, r.example.question, r.example.gold_sql, got)?;
                    }
                }
                reports.push(report);
            }
            let format = match format {
                Format::Table => ReportFormat::Table,
                Format::Csv => ReportFormat::Csv,
            };
            write!(out, "{}", render_report(&reports, format))?;
        }
        Command::Train { corpus, out: out_file, kind, epochs } => {
            let text = fs::read_to_string(&corpus).with_context(|| format!("reading {}", corpus.display()))?;
            let examples = parse_corpus(&text)?;
            let model = match fit(&examples, epochs) {
                Err(ClassifyError::EmptyTrainingSet) => return Err(EmptyCorpus.into()),
                other => other?,
            };
            model.save(&out_file)?;
            writeln!(
                out,
                "{kind:?} model: {} classes, {} features -> {}",
                model.classes().len(),
                model.vocabulary().len(),
                out_file.display()
            )?;
        }
        Command::ValidateTemplates { templates } => {
            let catalog = load_templates(&templates)?;
            if catalog.is_empty() {
                bail!("{} holds no templates", templates.display());
            }
            writeln!(out, "{}: {} templates OK", templates.display(), catalog.len())?;
        }
    }
    Ok(())
}
