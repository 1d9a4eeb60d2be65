//! The `nram` command line: `train`, `eval`, `rank` and `stats`.
//!
//! Every subcommand echoes its fully resolved configuration to standard
//! error before doing any work. Failures print a single `error: ...` line
//! on standard error and exit with a code from [`exit_code`].

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::data::{
    build_vocabulary, category_stats, load_pretrained_embeddings, make_eval_impressions,
    make_training_instances, parse_behaviors_tsv, parse_news_tsv, NewsIndex, NewsRecord,
    Vocabulary,
};
use crate::error::{Error, Result};
use crate::model::{load_checkpoint, rank_candidates, save_checkpoint, ModelConfig, ModelParams};
use crate::numerics::Rng;
use crate::trainer::{evaluate_model, train, TrainConfig};

const EXIT_CODES: &str = "\
Exit codes:
  0  success
  1  numeric or internal error
  2  invalid flags or configuration
  3  file missing or unreadable
  4  malformed input file (path and line are reported)
  5  training diverged or had nothing to train on
  6  checkpoint corrupted, truncated or of another format version
  7  checkpoint does not match the vocabulary or flags
  8  unknown news id";

#[derive(Debug, Parser)]
#[command(name = "nram", version, about = "Attention-based news recommender", after_help = EXIT_CODES)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Train a model and write a checkpoint, its vocabulary and the epoch history.
    #[command(after_help = EXIT_CODES)]
    Train(TrainArgs),
    /// Score every impression of a behaviors file and print ranking metrics.
    #[command(after_help = EXIT_CODES)]
    Eval(EvalArgs),
    /// Rank candidate articles for one reading history.
    #[command(after_help = EXIT_CODES)]
    Rank(RankArgs),
    /// Print the category/subcategory histogram of a news file as TSV.
    #[command(after_help = EXIT_CODES)]
    Stats(StatsArgs),
}

#[derive(Debug, Args)]
struct Runtime {
    /// Worker threads for gradients and scoring; results do not depend on it.
    #[arg(long, default_value_t = 1)]
    threads: usize,
    /// Force a single thread regardless of --threads.
    #[arg(long)]
    deterministic: bool,
}

impl Runtime {
    fn threads(&self) -> usize {
        if self.deterministic {
            1
        } else {
            self.threads
        }
    }
}

#[derive(Debug, Args)]
struct TrainArgs {
    /// news.tsv with the articles referenced by all behaviors files.
    #[arg(long)]
    news: PathBuf,
    #[arg(long)]
    behaviors_train: PathBuf,
    #[arg(long)]
    behaviors_valid: PathBuf,
    /// Optional held-out behaviors; metrics are printed after training.
    #[arg(long)]
    behaviors_test: Option<PathBuf>,
    /// Whitespace-separated word vectors (`token v1 ... vd` per line).
    #[arg(long)]
    embeddings: Option<PathBuf>,
    /// Checkpoint to write; the vocabulary goes to `<checkpoint>.vocab`.
    #[arg(long)]
    checkpoint: PathBuf,
    /// Epoch history file [default: <checkpoint>.history].
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = 300)]
    d_model: usize,
    #[arg(long, default_value_t = 15)]
    heads: usize,
    #[arg(long, default_value_t = 200)]
    d_attn: usize,
    #[arg(long, default_value_t = 30)]
    max_title: usize,
    #[arg(long, default_value_t = 50)]
    max_history: usize,
    /// Negatives sampled per clicked article.
    #[arg(long, default_value_t = 4)]
    neg_k: usize,
    #[arg(long, default_value_t = 1e-3)]
    lr: f64,
    #[arg(long, default_value_t = 64)]
    batch_size: usize,
    #[arg(long, default_value_t = 10)]
    epochs: usize,
    /// Epochs without validation AUC improvement before stopping.
    #[arg(long, default_value_t = 2)]
    patience: usize,
    /// Tokens seen fewer times than this map to [UNK].
    #[arg(long, default_value_t = 1)]
    min_count: usize,
    #[command(flatten)]
    runtime: Runtime,
}

#[derive(Debug, Args)]
struct EvalArgs {
    #[arg(long)]
    news: PathBuf,
    /// Behaviors to evaluate.
    #[arg(long)]
    behaviors_test: PathBuf,
    #[arg(long)]
    checkpoint: PathBuf,
    /// Also write the report to this file.
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    runtime: Runtime,
}

#[derive(Debug, Args)]
struct RankArgs {
    #[arg(long)]
    news: PathBuf,
    #[arg(long)]
    checkpoint: PathBuf,
    /// Clicked news ids, oldest first, comma separated, or `@file`.
    /// Empty means a user without history.
    #[arg(long, default_value = "")]
    history: String,
    /// Candidate news ids, comma separated, or `@file`.
    #[arg(long)]
    candidates: String,
    /// Print at most this many lines.
    #[arg(long)]
    top: Option<usize>,
}

#[derive(Debug, Args)]
struct StatsArgs {
    #[arg(long)]
    news: PathBuf,
}

/// Process exit code for an error.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Config(_) => 2,
        Error::Io { .. } => 3,
        Error::Parse { .. } | Error::DuplicateId { .. } => 4,
        Error::Diverged { .. } | Error::EmptyTrainingSet => 5,
        Error::BadMagic
        | Error::VersionMismatch { .. }
        | Error::ChecksumMismatch
        | Error::MalformedCheckpoint(_) => 6,
        Error::VocabMismatch(_) => 7,
        Error::UnknownNewsId(_) => 8,
        _ => 1,
    }
}

pub fn main() -> i32 {
    run_from(std::env::args_os())
}

/// Parses `args` (program name first) and runs the subcommand.
pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let outcome = match cli.command {
        Command::Train(a) => cmd_train(&a),
        Command::Eval(a) => cmd_eval(&a),
        Command::Rank(a) => cmd_rank(&a),
        Command::Stats(a) => cmd_stats(&a),
    };
    match outcome {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn echo(lines: &[(&str, String)]) {
    for (k, v) in lines {
        eprintln!("{k}={v}");
    }
}

fn display(p: &Option<PathBuf>) -> String {
    p.as_ref().map_or("none".into(), |p| p.display().to_string())
}

fn sidecar(checkpoint: &Path, ext: &str) -> PathBuf {
    let mut s = checkpoint.as_os_str().to_owned();
    s.push(".");
    s.push(ext);
    PathBuf::from(s)
}

fn cmd_train(a: &TrainArgs) -> Result<()> {
    let config = ModelConfig {
        d_model: a.d_model,
        heads: a.heads,
        d_attn: a.d_attn,
        max_title: a.max_title,
        max_history: a.max_history,
        neg_k: a.neg_k,
        seed: a.seed,
    };
    let train_cfg = TrainConfig {
        learning_rate: a.lr,
        batch_size: a.batch_size,
        max_epochs: a.epochs,
        patience: a.patience,
        seed: a.seed,
        threads: a.runtime.threads(),
        ..TrainConfig::default()
    };
    let history_path = a.out.clone().unwrap_or_else(|| sidecar(&a.checkpoint, "history"));
    echo(&[
        ("command", "train".into()),
        ("news", a.news.display().to_string()),
        ("behaviors_train", a.behaviors_train.display().to_string()),
        ("behaviors_valid", a.behaviors_valid.display().to_string()),
        ("behaviors_test", display(&a.behaviors_test)),
        ("embeddings", display(&a.embeddings)),
        ("checkpoint", a.checkpoint.display().to_string()),
        ("out", history_path.display().to_string()),
        ("min_count", a.min_count.to_string()),
        ("deterministic", a.runtime.deterministic.to_string()),
    ]);
    eprint!("{}{}", config.describe(), train_cfg.describe());
    config.validate()?;
    train_cfg.validate()?;

    let news = parse_news_tsv(&a.news)?;
    let train_records = parse_behaviors_tsv(&a.behaviors_train)?;
    let valid_records = parse_behaviors_tsv(&a.behaviors_valid)?;
    let vocab = build_vocabulary(&news, a.min_count)?;
    eprintln!("articles={} vocabulary={}", news.len(), vocab.len());

    let mut rng = Rng::seed(a.seed);
    let initial = match &a.embeddings {
        Some(path) => {
            let (table, covered) = load_pretrained_embeddings(path, &vocab, config.d_model, &mut rng)?;
            eprintln!("pretrained_coverage={covered}/{}", vocab.len() - 2);
            ModelParams::with_embedding(&config, table, &mut rng)?
        }
        None => ModelParams::random(&config, vocab.len(), &mut rng)?,
    };
    let index = NewsIndex::build(&news, &vocab, config.max_title);
    let (instances, report) = make_training_instances(&train_records, &index, &config, &mut rng);
    eprintln!(
        "instances={} missing_clicked={} missing_other={} dropped_impressions={}",
        report.instances, report.missing_clicked, report.missing_other, report.dropped_impressions
    );
    let (validation, missing) = make_eval_impressions(&valid_records, &index, &config);
    eprintln!("validation_impressions={} missing_candidates={missing}", validation.len());

    let (params, history) = train(&initial, &instances, &validation, &train_cfg)?;
    save_checkpoint(&params, &config, &a.checkpoint)?;
    vocab.save(sidecar(&a.checkpoint, "vocab"))?;
    fs::write(&history_path, history.to_string()).map_err(|e| Error::io(&history_path, e))?;
    print!("{history}");
    println!("best_epoch={}", history.best_epoch);

    if let Some(test_path) = &a.behaviors_test {
        let records = parse_behaviors_tsv(test_path)?;
        let (test, _) = make_eval_impressions(&records, &index, &config);
        print!("{}", evaluate_model(&params, &test, train_cfg.threads)?);
    }
    Ok(())
}

/// Checkpoint, its vocabulary sidecar and the news index built with them.
fn load_model(checkpoint: &Path, news: &[NewsRecord]) -> Result<(ModelParams, ModelConfig, NewsIndex)> {
    let (params, config) = load_checkpoint(checkpoint)?;
    let vocab_path = sidecar(checkpoint, "vocab");
    let vocab = Vocabulary::load(&vocab_path)?;
    if vocab.len() != params.vocab_size() {
        return Err(Error::VocabMismatch(format!(
            "{} lists {} tokens but the checkpoint embeds {}",
            vocab_path.display(),
            vocab.len(),
            params.vocab_size()
        )));
    }
    let index = NewsIndex::build(news, &vocab, config.max_title);
    Ok((params, config, index))
}

fn cmd_eval(a: &EvalArgs) -> Result<()> {
    echo(&[
        ("command", "eval".into()),
        ("news", a.news.display().to_string()),
        ("behaviors_test", a.behaviors_test.display().to_string()),
        ("checkpoint", a.checkpoint.display().to_string()),
        ("out", display(&a.out)),
        ("threads", a.runtime.threads().to_string()),
        ("deterministic", a.runtime.deterministic.to_string()),
    ]);
    let news = parse_news_tsv(&a.news)?;
    let records = parse_behaviors_tsv(&a.behaviors_test)?;
    let (params, config, index) = load_model(&a.checkpoint, &news)?;
    eprint!("{}", config.describe());
    let (impressions, missing) = make_eval_impressions(&records, &index, &config);
    eprintln!("missing_candidates={missing}");
    let report = evaluate_model(&params, &impressions, a.runtime.threads())?.to_string();
    if let Some(out) = &a.out {
        fs::write(out, &report).map_err(|e| Error::io(out, e))?;
    }
    print!("{report}");
    Ok(())
}

fn id_list(spec: &str) -> Result<Vec<String>> {
    let text = match spec.strip_prefix('@') {
        Some(path) => fs::read_to_string(path).map_err(|e| Error::io(path, e))?,
        None => spec.to_string(),
    };
    Ok(text
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(str::to_string)
        .collect())
}

fn lookup(index: &NewsIndex, ids: &[String]) -> Result<Vec<Vec<usize>>> {
    ids.iter()
        .map(|id| {
            index
                .get(id)
                .map(<[usize]>::to_vec)
                .ok_or_else(|| Error::UnknownNewsId(id.clone()))
        })
        .collect()
}

fn cmd_rank(a: &RankArgs) -> Result<()> {
    echo(&[
        ("command", "rank".into()),
        ("news", a.news.display().to_string()),
        ("checkpoint", a.checkpoint.display().to_string()),
        ("history", a.history.clone()),
        ("candidates", a.candidates.clone()),
        ("top", a.top.map_or("all".into(), |t| t.to_string())),
    ]);
    let news = parse_news_tsv(&a.news)?;
    let (params, config, index) = load_model(&a.checkpoint, &news)?;
    eprint!("{}", config.describe());
    let history_ids = id_list(&a.history)?;
    let candidate_ids = id_list(&a.candidates)?;

    let known = lookup(&index, &history_ids)?;
    let recent = &known[known.len().saturating_sub(config.max_history)..];
    let mut history = recent.to_vec();
    let mut mask = vec![true; history.len()];
    history.resize(config.max_history, index.pad_row());
    mask.resize(config.max_history, false);

    let candidates = lookup(&index, &candidate_ids)?;
    let ranked = rank_candidates(&history, &mask, &candidates, &params)?;
    for (i, score) in ranked.iter().take(a.top.unwrap_or(usize::MAX)) {
        println!("{}\t{score}", candidate_ids[*i]);
    }
    Ok(())
}

fn cmd_stats(a: &StatsArgs) -> Result<()> {
    echo(&[("command", "stats".into()), ("news", a.news.display().to_string())]);
    let news = parse_news_tsv(&a.news)?;
    for row in category_stats(&news) {
        println!("{}", row.to_tsv_row());
    }
    Ok(())
}
