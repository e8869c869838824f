//! Command-line pipeline: corpus to lexicon through persisted, checksummed
//! artifacts, plus evaluation and comparison reports.
//!
//! Exit codes: 0 success, 1 usage or config error, 2 data error,
//! 3 numerical convergence failure.

pub mod artifact;
pub mod config;
pub mod pipeline;
pub mod report;

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use lexinduce::evaluation::TopSetMode;

use crate::config::{ConfigError, PipelineConfig};
use crate::pipeline::Workspace;
use crate::report::EvalMode;

pub use crate::config::Method;

/// Environment variable naming the default config file.
pub const CONFIG_ENV: &str = "LEXINDUCE_CONFIG";

#[derive(Debug, Parser)]
#[command(name = "lexinduce", version, about = "Induce sentiment lexicons from corpora and seed words")]
pub struct Cli {
    /// Config file of `key = value` lines.
    #[arg(long, short, global = true, env = CONFIG_ENV)]
    pub config: Option<PathBuf>,

    /// Override one config key; repeatable. Wins over the config file.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    pub set: Vec<String>,

    #[arg(long, global = true)]
    pub corpus: Option<PathBuf>,

    /// Seed file of `+word` / `-word` lines, or `builtin:<name>`.
    #[arg(long, global = true)]
    pub seeds: Option<String>,

    #[arg(long, global = true)]
    pub out_dir: Option<PathBuf>,

    /// sentprop, clamped, bestpath or pmi.
    #[arg(long, global = true)]
    pub method: Option<String>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Count tokens and write the vocabulary.
    Vocab,
    /// Count windowed co-occurrences.
    Cooccur,
    /// Build the PPMI matrix and its SVD embeddings, or import `embeddings`.
    Embed,
    /// Build the kNN lexical graph.
    Graph,
    /// Score the vocabulary with the configured method.
    Induce {
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// SentProp averaged over bootstrap seed subsets, with a std column.
    Bootstrap {
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Every stage, then induce (or bootstrap).
    Run {
        #[arg(long)]
        bootstrap: bool,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Score a lexicon against a gold file.
    Evaluate {
        lexicon: PathBuf,
        gold: PathBuf,
        #[arg(long, value_enum, default_value = "all")]
        mode: EvalMode,
        /// Extra neutral words, one per line, for ternary evaluation.
        #[arg(long)]
        neutral: Option<PathBuf>,
        /// Also write the report to this file.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Rank correlation between two lexicons.
    Compare {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, default_value_t = 0.25)]
        top_frac: f64,
        /// union or intersection of the two top sets.
        #[arg(long, default_value = "union")]
        top_set: String,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Nearest neighbours of a word in the embedding artifact.
    Neighbors {
        word: String,
        #[arg(short = 'n', long, default_value_t = 10)]
        count: usize,
    },
    /// Print the effective configuration.
    ShowConfig,
}

impl Cli {
    /// Defaults, then the config file, then `--set`, then dedicated flags.
    pub fn pipeline_config(&self) -> Result<PipelineConfig, ConfigError> {
        let mut config = match &self.config {
            Some(path) => PipelineConfig::from_file(path)?,
            None => PipelineConfig::default(),
        };
        let here = Path::new("");
        for item in &self.set {
            let (k, v) =
                item.split_once('=').ok_or_else(|| ConfigError(format!("--set expects KEY=VALUE, got {item:?}")))?;
            config.set(k.trim(), v.trim(), here)?;
        }
        if let Some(p) = &self.corpus {
            config.corpus = Some(p.clone());
        }
        if let Some(s) = &self.seeds {
            config.set("seeds", s, here)?;
        }
        if let Some(p) = &self.out_dir {
            config.out_dir = p.clone();
        }
        if let Some(m) = &self.method {
            config.method = m.parse()?;
        }
        config.validate()?;
        Ok(config)
    }
}

/// Exit code for a failed command.
pub fn exit_code(err: &anyhow::Error) -> i32 {
    for cause in err.chain() {
        if cause.is::<ConfigError>() {
            return 1;
        }
        if let Some(e) = cause.downcast_ref::<lexinduce::Error>() {
            return match e {
                lexinduce::Error::NotConverged { .. } => 3,
                lexinduce::Error::InvalidParameter(_) => 1,
                _ => 2,
            };
        }
    }
    2
}

fn emit(text: &str, report: Option<&Path>) -> anyhow::Result<()> {
    print!("{text}");
    if let Some(path) = report {
        fs::write(path, text)?;
    }
    Ok(())
}

pub fn execute(cli: &Cli) -> anyhow::Result<()> {
    match &cli.command {
        Command::Evaluate { lexicon, gold, mode, neutral, report } => {
            let lex = report::read_lexicon(lexicon)?;
            let g = report::read_gold(gold, neutral.as_deref())?;
            let reports = report::evaluate(&lex, &g, *mode)
                .map_err(|e| e.context(format!("evaluating {} against {}", lexicon.display(), gold.display())))?;
            emit(&report::render(&reports), report.as_deref())
        }
        Command::Compare { a, b, top_frac, top_set, report } => {
            let mode: TopSetMode = top_set.parse().map_err(|e: lexinduce::Error| ConfigError(e.to_string()))?;
            let (la, lb) = (report::read_lexicon(a)?, report::read_lexicon(b)?);
            let reports = report::compare(&la, &lb, *top_frac, mode)
                .map_err(|e| e.context(format!("comparing {} with {}", a.display(), b.display())))?;
            emit(&report::render(&reports), report.as_deref())
        }
        Command::ShowConfig => {
            print!("{}", cli.pipeline_config()?.to_text());
            Ok(())
        }
        command => {
            let ws = Workspace::open(cli.pipeline_config()?)?;
            match command {
                Command::Vocab => ws.vocab().map(drop),
                Command::Cooccur => ws.cooccur().map(drop),
                Command::Embed => ws.embed().map(drop),
                Command::Graph => ws.graph().map(drop),
                Command::Induce { output } => induce(&ws, false, output.as_deref()),
                Command::Bootstrap { output } => induce(&ws, true, output.as_deref()),
                Command::Run { bootstrap, output } => {
                    ws.build_all()?;
                    induce(&ws, *bootstrap, output.as_deref())
                }
                Command::Neighbors { word, count } => {
                    for (w, s) in ws.neighbors(word, *count)? {
                        println!("{w}\t{s}");
                    }
                    Ok(())
                }
                Command::Evaluate { .. } | Command::Compare { .. } | Command::ShowConfig => unreachable!(),
            }
        }
    }
}

fn induce(ws: &Workspace, bootstrapped: bool, output: Option<&Path>) -> anyhow::Result<()> {
    let lex = ws.induce(bootstrapped)?;
    let path = output.map_or_else(|| ws.default_lexicon_path(bootstrapped), Path::to_path_buf);
    ws.write_lexicon(&lex, &path)
}

/// Parses arguments, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e:#}");
            exit_code(&e)
        }
    }
}
