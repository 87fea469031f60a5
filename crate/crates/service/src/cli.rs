use std::fs;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use chrono::NaiveDate;
use clap::{Args, Parser, Subcommand};

use newscog::dialogue::{
    report_bytes, run_batch, score_session, RegistrationSheet, ScriptedAnswers, Transcript,
};
use newscog::ingest::{fetch_news, NewsItem, SourceDescriptor, Topic};
use newscog::ml::{evaluate, Dataset, TreeParams};
use newscog::questgen::SessionScript;
use newscog::{Error, Result};

use crate::api;
use crate::config::{Resources, ServiceConfig};
use crate::pipeline;

#[derive(Debug, Parser)]
#[command(
    name = "newscog",
    version,
    about = "News-based conversational sessions, answer scoring and impairment classification"
)]
#[command(arg_required_else_help = true)]
pub struct Cli {
    /// Lexicon JSONL file (defaults to the bundled fixture)
    #[arg(long, global = true)]
    pub lexicon: Option<PathBuf>,
    /// Gazetteer TSV file
    #[arg(long, global = true)]
    pub gazetteer: Option<PathBuf>,
    /// Question templates TSV file
    #[arg(long, global = true)]
    pub templates: Option<PathBuf>,
    /// Similarity parameters as `key = value` lines
    #[arg(long, global = true)]
    pub sim_config: Option<PathBuf>,
    /// Data directory for news, sessions and models
    #[arg(long, global = true, default_value = "newscog-store")]
    pub store: PathBuf,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fetch news into the store
    Ingest(IngestArgs),
    /// Print the session script generated for a news item
    GenSession(GenSessionArgs),
    /// Run a whole session from a scripted-answers file
    Run(RunArgs),
    /// Score a transcript against its script
    Score(ScoreArgs),
    /// Train a decision tree and print it
    Train(TrainArgs),
    /// Grouped k-fold evaluation of the decision tree
    Evaluate(EvaluateArgs),
    /// Serve the HTTP API
    Serve(ServeArgs),
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    /// Directory of JSON news documents
    #[arg(long, conflicts_with = "url", required_unless_present = "url")]
    pub source: Option<PathBuf>,
    /// Remote endpoint returning a JSON array of documents
    #[arg(long)]
    pub url: Option<String>,
    #[arg(long, default_value = "topic")]
    pub topic_param: String,
    #[arg(long, default_value = "date")]
    pub date_param: String,
    #[arg(long)]
    pub topic: Option<Topic>,
    /// Only items published on or after this date
    #[arg(long)]
    pub since: Option<NaiveDate>,
}

#[derive(Debug, Args)]
pub struct NewsChoice {
    /// Id of a news item in the store
    #[arg(long, required_unless_present = "news_file")]
    pub news: Option<String>,
    /// News document JSON file, used instead of the store
    #[arg(long, conflicts_with = "news")]
    pub news_file: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GenSessionArgs {
    #[command(flatten)]
    pub news: NewsChoice,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Write the script here instead of standard output
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Registration sheet JSON
    #[arg(long)]
    pub sheet: PathBuf,
    /// `question_id<TAB>answer` lines
    #[arg(long)]
    pub answers: PathBuf,
    #[command(flatten)]
    pub news: NewsChoice,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Also write sheet, script, transcript and report here
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ScoreArgs {
    #[arg(long)]
    pub transcript: PathBuf,
    #[arg(long)]
    pub script: PathBuf,
    /// Registration sheet; looked up in the store when omitted
    #[arg(long)]
    pub sheet: Option<PathBuf>,
    /// Print the full report as JSON
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct DatasetChoice {
    /// Feature CSV; built from the store's sessions when omitted
    #[arg(long)]
    pub dataset: Option<PathBuf>,
    /// Use the synthetic cohort drawn with this seed
    #[arg(long, conflicts_with = "dataset")]
    pub synthetic: Option<u64>,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[command(flatten)]
    pub data: DatasetChoice,
    #[arg(long, default_value_t = 5)]
    pub max_depth: usize,
    #[arg(long, default_value_t = 2)]
    pub min_leaf: usize,
    /// Where to save the tree as JSON
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[command(flatten)]
    pub data: DatasetChoice,
    #[arg(long, default_value_t = 10)]
    pub folds: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 5)]
    pub max_depth: usize,
    #[arg(long, default_value_t = 2)]
    pub min_leaf: usize,
    /// Print the report as JSON
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[arg(long, default_value = "127.0.0.1:8080")]
    pub addr: SocketAddr,
}

impl Cli {
    fn config(&self) -> ServiceConfig {
        ServiceConfig {
            lexicon: self.lexicon.clone(),
            gazetteer: self.gazetteer.clone(),
            templates: self.templates.clone(),
            sim_config: self.sim_config.clone(),
            store: self.store.clone(),
        }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.into(),
        source,
    })
}

fn write(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|source| Error::Io {
        path: path.into(),
        source,
    })
}

fn json_file<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    serde_json::from_str(&read(path)?)
        .map_err(|e| Error::Validation(format!("{}: {e}", path.display())))
}

fn news_item(res: &Resources, choice: &NewsChoice) -> Result<NewsItem> {
    match (&choice.news, &choice.news_file) {
        (_, Some(path)) => NewsItem::from_json(&read(path)?),
        (Some(id), None) => res.news.get(id),
        (None, None) => Err(Error::Validation("pass --news or --news-file".into())),
    }
}

fn dataset(res: &Resources, choice: &DatasetChoice) -> Result<Dataset> {
    match (&choice.dataset, choice.synthetic) {
        (Some(path), _) => pipeline::load_dataset(path),
        (None, Some(seed)) => pipeline::synthetic_dataset(seed),
        (None, None) => {
            let (data, summary) = pipeline::build_dataset(res)?;
            eprintln!("built {} with {} users", summary.path, summary.users);
            Ok(data)
        }
    }
}

fn ingest(res: &Resources, args: &IngestArgs) -> Result<()> {
    let source = match (&args.source, &args.url) {
        (Some(path), _) => SourceDescriptor::Directory { path: path.clone() },
        (None, Some(url)) => SourceDescriptor::Remote {
            base_url: url.clone(),
            topic_param: args.topic_param.clone(),
            date_param: args.date_param.clone(),
        },
        (None, None) => return Err(Error::Validation("pass --source or --url".into())),
    };
    let outcome = fetch_news(&source, args.topic, args.since)?;
    res.news.put_all(&outcome.items)?;
    for item in &outcome.items {
        println!(
            "{}\t{}\t{}\t{}",
            item.id,
            item.topic.as_str(),
            item.published,
            item.title
        );
    }
    eprintln!(
        "stored {} items, skipped {}",
        outcome.items.len(),
        outcome.warnings.len()
    );
    Ok(())
}

fn gen_session(res: &Resources, args: &GenSessionArgs) -> Result<()> {
    let news = news_item(res, &args.news)?;
    let script = res.script_builder().build(&news, args.seed)?;
    let mut bytes = serde_json::to_vec_pretty(&script)?;
    bytes.push(b'\n');
    match &args.out {
        Some(path) => write(path, &bytes),
        None => {
            print!("{}", String::from_utf8_lossy(&bytes));
            Ok(())
        }
    }
}

fn run(res: &Resources, args: &RunArgs) -> Result<()> {
    let sheet = RegistrationSheet::from_json(&read(&args.sheet)?)?;
    let answers = ScriptedAnswers::load_path(&args.answers)?;
    let news = news_item(res, &args.news)?;
    let script = res.script_builder().build(&news, args.seed)?;
    let engine = res.engine();
    let (id, report) = run_batch(&engine, sheet.clone(), script.clone(), &answers)?;
    let bytes = report_bytes(&report)?;
    if let Some(dir) = &args.out_dir {
        fs::create_dir_all(dir).map_err(|source| Error::Io {
            path: dir.clone(),
            source,
        })?;
        write(&dir.join("sheet.json"), &serde_json::to_vec_pretty(&sheet)?)?;
        write(
            &dir.join("script.json"),
            &serde_json::to_vec_pretty(&script)?,
        )?;
        let transcript = res.sessions.transcript(&id)?;
        write(
            &dir.join("transcript.json"),
            &serde_json::to_vec_pretty(&transcript)?,
        )?;
        write(&dir.join("report.json"), &bytes)?;
    }
    print!("{}", String::from_utf8_lossy(&bytes));
    Ok(())
}

fn score(res: &Resources, args: &ScoreArgs) -> Result<()> {
    let transcript: Transcript = json_file(&args.transcript)?;
    let script: SessionScript = json_file(&args.script)?;
    let sheet = match &args.sheet {
        Some(path) => RegistrationSheet::from_json(&read(path)?)?,
        None => res.sessions.record(&transcript.session_id)?.sheet,
    };
    let report = score_session(&transcript, &script, &sheet, &res.lexicon, &res.params)?;
    if args.json {
        print!("{}", String::from_utf8_lossy(&report_bytes(&report)?));
        return Ok(());
    }
    println!("{:<26} {:>5}", "question", "sim");
    for (question, sim) in &report.sims {
        println!("{question:<26} {sim:>5.2}");
    }
    println!(
        "{:<26} {:>5.2}",
        "avg_answer_length_chars", report.avg_answer_length_chars
    );
    println!("{:<26} {:>5}", "completed", report.completed);
    Ok(())
}

fn train(res: &Resources, args: &TrainArgs) -> Result<()> {
    let data = dataset(res, &args.data)?;
    let params = TreeParams {
        max_depth: args.max_depth,
        min_leaf: args.min_leaf,
    };
    let outcome = pipeline::train(&data, params)?;
    pipeline::save_tree(
        &outcome.tree,
        args.out.as_deref().unwrap_or(&res.tree_path()),
    )?;
    println!("gain ratio ranking:");
    for (name, gr) in &outcome.ranking {
        println!("  {name:<12} {gr:.4}");
    }
    println!("tree (depth {}):", outcome.depth);
    print!("{}", outcome.rendered);
    Ok(())
}

fn evaluate_cmd(res: &Resources, args: &EvaluateArgs) -> Result<()> {
    let data = dataset(res, &args.data)?;
    let params = TreeParams {
        max_depth: args.max_depth,
        min_leaf: args.min_leaf,
    };
    let report = evaluate(&data, args.folds, args.seed, params)?;
    if args.json {
        println!("{}", serde_json::to_string_pretty(&report)?);
    } else {
        print!("{}", report.render());
    }
    Ok(())
}

fn serve(config: &ServiceConfig, args: &ServeArgs) -> std::result::Result<(), String> {
    let rt = tokio::runtime::Builder::new_multi_thread()
        .enable_all()
        .build()
        .map_err(|e| e.to_string())?;
    rt.block_on(api::serve(config, args.addr))
        .map_err(|e| e.to_string())
}

/// Runs a parsed command line and maps failures to exit status 1.
pub fn execute(cli: Cli) -> ExitCode {
    let config = cli.config();
    let outcome = match &cli.command {
        Command::Serve(args) => serve(&config, args),
        command => config
            .load()
            .and_then(|res| match command {
                Command::Ingest(a) => ingest(&res, a),
                Command::GenSession(a) => gen_session(&res, a),
                Command::Run(a) => run(&res, a),
                Command::Score(a) => score(&res, a),
                Command::Train(a) => train(&res, a),
                Command::Evaluate(a) => evaluate_cmd(&res, a),
                Command::Serve(_) => unreachable!(),
            })
            .map_err(|e| e.to_string()),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::FAILURE
        }
    }
}

/// Entry point for the binary. Usage errors exit with status 2.
pub fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    execute(Cli::parse())
}
