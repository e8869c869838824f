//! Pipeline stages over an exclusively owned output directory.
//!
//! Every stage artifact has a `.meta` sidecar. A stage is fresh when its
//! recorded sidecar equals the one the current config and inputs would
//! produce and the artifact still hashes to the recorded `output`. A
//! command rebuilds its own stage when that stage is not fresh, but refuses
//! to read a stale or missing upstream artifact.

use std::fmt;
use std::path::{Path, PathBuf};

use anyhow::Context;
use log::warn;
use thiserror::Error;

use lexinduce::corpus::read_stopwords;
use lexinduce::embeddings::nearest_neighbors;
use lexinduce::linalg::DenseMatrix;
use lexinduce::propagation::{
    bestpath_scores, bootstrap, clamped_propagation, pmi_baseline, BootstrapParams, PmiBaselineParams,
};
use lexinduce::{
    build_knn_graph, build_vocabulary, count_cooccurrences, load_embeddings, ppmi, sentprop_scores, svd_embed, Corpus,
    EmbeddingSet64, LexicalGraph64, Lexicon64, PpmiMatrix64, SeedSet, SparseCountMatrix, SvdParams, Vocabulary,
    WalkParams64,
};

use crate::artifact::{open, sha256_file, write_atomic, DirLock, Meta, VERSION};
use crate::config::{ConfigError, Method, PipelineConfig, SeedSource};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Vocab,
    Counts,
    Ppmi,
    Embeddings,
    Graph,
}

impl Stage {
    pub const ALL: [Stage; 5] = [Stage::Vocab, Stage::Counts, Stage::Ppmi, Stage::Embeddings, Stage::Graph];

    pub fn file_name(self) -> &'static str {
        match self {
            Stage::Vocab => "vocab.tsv",
            Stage::Counts => "counts.txt",
            Stage::Ppmi => "ppmi.txt",
            Stage::Embeddings => "embeddings.txt",
            Stage::Graph => "graph.txt",
        }
    }

    /// The command that (re)builds this stage.
    pub fn command(self) -> &'static str {
        match self {
            Stage::Vocab => "vocab",
            Stage::Counts => "cooccur",
            Stage::Ppmi | Stage::Embeddings => "embed",
            Stage::Graph => "graph",
        }
    }

    fn name(self) -> &'static str {
        match self {
            Stage::Vocab => "vocab",
            Stage::Counts => "counts",
            Stage::Ppmi => "ppmi",
            Stage::Embeddings => "embeddings",
            Stage::Graph => "graph",
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// An upstream artifact that cannot be used. Maps to exit code 2.
#[derive(Debug, Error)]
pub enum ArtifactError {
    #[error("missing artifact {path}; run `lexinduce {command}` first")]
    Missing { path: PathBuf, command: &'static str },
    #[error("stale artifact {path}: {reason}; rerun `lexinduce {command}`")]
    Stale { path: PathBuf, reason: String, command: &'static str },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Status {
    Missing,
    Fresh,
    Stale(String),
}

/// Whether a command did work or found its artifact fresh.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Built,
    Fresh,
}

/// A validated config plus the lock on its output directory.
#[derive(Debug)]
pub struct Workspace {
    config: PipelineConfig,
    _lock: DirLock,
}

impl Workspace {
    pub fn open(config: PipelineConfig) -> anyhow::Result<Self> {
        config.validate()?;
        let lock = DirLock::acquire(&config.out_dir)?;
        Ok(Self { config, _lock: lock })
    }

    pub fn config(&self) -> &PipelineConfig {
        &self.config
    }

    /// The artifact `stage` is built from. Imported embeddings depend on
    /// the vocabulary alone.
    fn upstream(&self, stage: Stage) -> Option<Stage> {
        match stage {
            Stage::Vocab => None,
            Stage::Counts => Some(Stage::Vocab),
            Stage::Ppmi => Some(Stage::Counts),
            Stage::Embeddings if self.config.embeddings.is_some() => Some(Stage::Vocab),
            Stage::Embeddings => Some(Stage::Ppmi),
            Stage::Graph => Some(Stage::Embeddings),
        }
    }

    pub fn path(&self, stage: Stage) -> PathBuf {
        self.config.out_dir.join(stage.file_name())
    }

    fn checksum(&self, stage: Stage) -> anyhow::Result<String> {
        sha256_file(&self.path(stage))
    }

    /// The sidecar the current config and inputs would produce, without
    /// `output` and `vocab_checksum`.
    fn expected_meta(&self, stage: Stage) -> anyhow::Result<Meta> {
        let c = &self.config;
        let meta = Meta::new(stage.name());
        Ok(match stage {
            Stage::Vocab => {
                let stop = match &c.stopwords {
                    Some(p) => sha256_file(p)?,
                    None => "none".to_string(),
                };
                meta.param("min_count", c.min_count)
                    .param("top_n", c.get("top_n").unwrap())
                    .param("lowercase", c.lowercase)
                    .input("corpus", sha256_file(c.corpus_path()?)?)
                    .input("stopwords", stop)
            }
            Stage::Counts => meta
                .param("lowercase", c.lowercase)
                .param("window_size", c.window_size)
                .input("corpus", sha256_file(c.corpus_path()?)?)
                .input("vocab", self.checksum(Stage::Vocab)?),
            Stage::Ppmi => meta.param("smoothing", c.smoothing).input("counts", self.checksum(Stage::Counts)?),
            Stage::Embeddings => match &c.embeddings {
                Some(p) => meta
                    .param("source", "external")
                    .input("external", sha256_file(p)?)
                    .input("vocab", self.checksum(Stage::Vocab)?),
                None => {
                    meta.param("dim", c.dim).param("svd_seed", c.svd_seed).input("ppmi", self.checksum(Stage::Ppmi)?)
                }
            },
            Stage::Graph => meta.param("k", c.k).input("embeddings", self.checksum(Stage::Embeddings)?),
        })
    }

    /// Freshness of one stage, assuming its upstream artifact is readable.
    pub fn status(&self, stage: Stage) -> anyhow::Result<Status> {
        let path = self.path(stage);
        let sidecar = Meta::sidecar(&path);
        if !path.exists() || !sidecar.exists() {
            return Ok(Status::Missing);
        }
        if let Some(up) = self.upstream(stage) {
            if !self.path(up).exists() {
                return Ok(Status::Stale(format!("upstream {} is missing", up.file_name())));
            }
        }
        let recorded = Meta::read(&sidecar)?;
        let mut expected = self.expected_meta(stage)?;
        // Every artifact must be bound to the vocabulary the vocab stage
        // recorded; the vocab stage's own value is checked via `output`.
        let vocab_meta = match stage {
            Stage::Vocab => recorded.clone(),
            _ => Meta::read(&Meta::sidecar(&self.path(Stage::Vocab)))?,
        };
        if let Some(v) = vocab_meta.get("vocab_checksum") {
            expected.set("vocab_checksum", v);
        }
        if let Some(reason) = recorded.difference(&expected) {
            return Ok(Status::Stale(reason));
        }
        if recorded.get("output") != Some(sha256_file(&path)?.as_str()) {
            return Ok(Status::Stale("file was modified after it was written".into()));
        }
        Ok(Status::Fresh)
    }

    /// Errors unless `stage` and everything upstream of it is fresh.
    pub fn require_fresh(&self, stage: Stage) -> anyhow::Result<()> {
        if let Some(up) = self.upstream(stage) {
            self.require_fresh(up)?;
        }
        let path = self.path(stage);
        match self.status(stage)? {
            Status::Fresh => Ok(()),
            Status::Missing => Err(ArtifactError::Missing { path, command: stage.command() }.into()),
            Status::Stale(reason) => Err(ArtifactError::Stale { path, reason, command: stage.command() }.into()),
        }
    }

    /// Rebuilds `stage` unless fresh; upstream artifacts must be fresh.
    fn ensure(&self, stage: Stage, build: impl FnOnce(&Path) -> anyhow::Result<String>) -> anyhow::Result<Outcome> {
        if let Some(up) = self.upstream(stage) {
            self.require_fresh(up)?;
        }
        let path = self.path(stage);
        if self.status(stage)? == Status::Fresh {
            eprintln!("{stage}: fresh, skipped ({})", path.display());
            return Ok(Outcome::Fresh);
        }
        let mut meta = self.expected_meta(stage)?;
        let vocab_checksum = build(&path)?;
        meta.set("vocab_checksum", vocab_checksum);
        meta.set("output", sha256_file(&path)?);
        meta.write(&Meta::sidecar(&path))?;
        eprintln!("{stage}: wrote {}", path.display());
        Ok(Outcome::Built)
    }

    fn read_corpus(&self) -> anyhow::Result<Corpus> {
        let path = self.config.corpus_path()?;
        Corpus::read(open(path)?, self.config.lowercase).with_context(|| format!("reading corpus {}", path.display()))
    }

    pub fn load_vocab(&self) -> anyhow::Result<Vocabulary> {
        let path = self.path(Stage::Vocab);
        Vocabulary::read(open(&path)?).with_context(|| format!("reading {}", path.display()))
    }

    pub fn load_counts(&self) -> anyhow::Result<SparseCountMatrix> {
        let path = self.path(Stage::Counts);
        SparseCountMatrix::read(open(&path)?).with_context(|| format!("reading {}", path.display()))
    }

    pub fn load_ppmi(&self) -> anyhow::Result<PpmiMatrix64> {
        let path = self.path(Stage::Ppmi);
        PpmiMatrix64::read(open(&path)?).with_context(|| format!("reading {}", path.display()))
    }

    pub fn load_embeddings(&self) -> anyhow::Result<EmbeddingSet64> {
        let path = self.path(Stage::Embeddings);
        let vocab = self.load_vocab()?;
        let loaded =
            load_embeddings(open(&path)?, Some(&vocab)).with_context(|| format!("reading {}", path.display()))?;
        if !loaded.missing.is_empty() {
            anyhow::bail!("{} lacks {} vocabulary words", path.display(), loaded.missing.len());
        }
        Ok(loaded.embeddings)
    }

    pub fn load_graph(&self) -> anyhow::Result<LexicalGraph64> {
        let path = self.path(Stage::Graph);
        LexicalGraph64::read(open(&path)?, self.load_vocab()?).with_context(|| format!("reading {}", path.display()))
    }

    pub fn vocab(&self) -> anyhow::Result<Outcome> {
        self.ensure(Stage::Vocab, |path| {
            let c = &self.config;
            let stop = match &c.stopwords {
                Some(p) => {
                    Some(read_stopwords(open(p)?, c.lowercase).with_context(|| format!("reading {}", p.display()))?)
                }
                None => None,
            };
            let vocab = build_vocabulary(&self.read_corpus()?, c.min_count, c.top_n, stop.as_ref())?;
            write_atomic(path, |out| Ok(vocab.write(out)?))?;
            Ok(vocab.checksum())
        })
    }

    pub fn cooccur(&self) -> anyhow::Result<Outcome> {
        self.ensure(Stage::Counts, |path| {
            let vocab = self.load_vocab()?;
            let counts = count_cooccurrences(&self.read_corpus()?, &vocab, self.config.window_size)?
                .with_vocab_hash(vocab.checksum());
            write_atomic(path, |out| Ok(counts.write(out)?))?;
            Ok(vocab.checksum())
        })
    }

    /// Builds the PPMI matrix and the SVD embeddings, or imports the
    /// configured external embeddings.
    pub fn embed(&self) -> anyhow::Result<Outcome> {
        if let Some(external) = &self.config.embeddings {
            return self.ensure(Stage::Embeddings, |path| {
                let emb = self.import_embeddings(external)?;
                write_atomic(path, |out| Ok(emb.write(out)?))?;
                Ok(emb.vocab().checksum())
            });
        }
        let first = self.ensure(Stage::Ppmi, |path| {
            let m = ppmi::<f64>(&self.load_counts()?, self.config.smoothing)?;
            write_atomic(path, |out| Ok(m.write(out)?))?;
            Ok(self.load_vocab()?.checksum())
        })?;
        let second = self.ensure(Stage::Embeddings, |path| {
            let m = self.load_ppmi()?;
            let vocab = self.load_vocab()?;
            let d = capped_dim(self.config.dim, vocab.len());
            let emb = svd_embed(&m, &vocab, d, self.config.svd_seed, &SvdParams::default())?;
            write_atomic(path, |out| Ok(emb.write(out)?))?;
            Ok(vocab.checksum())
        })?;
        Ok(if first == Outcome::Fresh && second == Outcome::Fresh { Outcome::Fresh } else { Outcome::Built })
    }

    /// External vectors over the full vocabulary. Words the file lacks get
    /// zero rows, which the graph stage leaves isolated.
    fn import_embeddings(&self, external: &Path) -> anyhow::Result<EmbeddingSet64> {
        let vocab = self.load_vocab()?;
        let loaded = load_embeddings::<f64, _>(open(external)?, Some(&vocab))
            .with_context(|| format!("reading embeddings {}", external.display()))?;
        let found = &loaded.embeddings;
        if found.is_empty() {
            anyhow::bail!("{} has a vector for no vocabulary word", external.display());
        }
        if !loaded.missing.is_empty() {
            warn!(
                "{} of {} vocabulary words have no vector in {} and stay isolated",
                loaded.missing.len(),
                vocab.len(),
                external.display()
            );
        }
        let mut m = DenseMatrix::zeros(vocab.len(), found.dim());
        for i in 0..found.len() {
            let r = vocab.get(found.vocab().word(i)).expect("restricted to the vocabulary");
            m.row_mut(r).copy_from_slice(found.row(i));
        }
        Ok(EmbeddingSet64::new(vocab, m)?)
    }

    pub fn graph(&self) -> anyhow::Result<Outcome> {
        self.ensure(Stage::Graph, |path| {
            let emb = self.load_embeddings()?;
            let g = build_knn_graph(&emb, self.config.k)?;
            write_atomic(path, |out| Ok(g.write(out)?))?;
            Ok(emb.vocab().checksum())
        })
    }

    /// Builds every stage in order.
    pub fn build_all(&self) -> anyhow::Result<()> {
        self.vocab()?;
        self.cooccur()?;
        self.embed()?;
        self.graph()?;
        Ok(())
    }

    pub fn default_lexicon_path(&self, bootstrapped: bool) -> PathBuf {
        let suffix = if bootstrapped { "-bootstrap" } else { "" };
        self.config.out_dir.join(format!("lexicon-{}{suffix}.tsv", self.config.method))
    }

    pub fn seeds(&self) -> anyhow::Result<SeedSet> {
        Ok(match &self.config.seeds {
            SeedSource::Builtin(name) => SeedSet::builtin(name)?,
            SeedSource::File(p) => {
                SeedSet::read_signed(open(p)?).with_context(|| format!("reading seeds {}", p.display()))?
            }
        })
    }

    /// Scores the vocabulary with the configured method. With `bootstrapped`
    /// the SentProp score is the mean over seed-subset runs and a std
    /// column is written.
    pub fn induce(&self, bootstrapped: bool) -> anyhow::Result<Lexicon64> {
        let c = &self.config;
        let seeds = self.seeds()?;
        if bootstrapped && c.method != Method::SentProp {
            return Err(ConfigError(format!("bootstrap requires method sentprop, not {}", c.method)).into());
        }
        let walk = WalkParams64 { beta: c.beta, tol: c.tol, max_iter: c.max_iter };
        let (lex, input) = match c.method {
            Method::SentProp | Method::Clamped => {
                self.require_fresh(Stage::Graph).with_context(|| format!("method {} needs the graph", c.method))?;
                let g = self.load_graph()?;
                let lex = match (c.method, bootstrapped) {
                    (Method::Clamped, _) => clamped_propagation(&g, &seeds, &walk)?,
                    (_, false) => sentprop_scores(&g, &seeds, &walk)?,
                    (_, true) => {
                        let params = BootstrapParams {
                            runs: c.bootstrap_runs,
                            subset_size: c.subset_size,
                            rng_seed: c.bootstrap_seed,
                        };
                        bootstrap(&g, &seeds, &walk, &params)?
                    }
                };
                (lex, Stage::Graph)
            }
            Method::BestPath if c.embeddings.is_some() => {
                return Err(ConfigError(
                    "method bestpath walks the PPMI matrix and cannot use external embeddings".into(),
                )
                .into());
            }
            Method::BestPath => {
                self.require_fresh(Stage::Ppmi).context("method bestpath needs the PPMI matrix")?;
                let lex = bestpath_scores(&self.load_ppmi()?, &self.load_vocab()?, &seeds, c.k, c.bestpath_max_hops)?;
                (lex, Stage::Ppmi)
            }
            Method::Pmi => {
                self.require_fresh(Stage::Counts).context("method pmi needs the co-occurrence counts")?;
                let params = PmiBaselineParams { smoothing: c.smoothing, absent_count: c.pmi_absent_count };
                (pmi_baseline(&self.load_counts()?, &self.load_vocab()?, &seeds, &params)?, Stage::Counts)
            }
        };
        let mut lex = lex
            .with_meta("version", VERSION)
            .with_meta("command", if bootstrapped { "bootstrap" } else { "induce" })
            .with_meta(format!("input.{input}"), self.checksum(input)?)
            .with_meta("input.corpus", sha256_file(c.corpus_path()?)?);
        for (key, value) in c.entries() {
            if key != "out_dir" {
                lex.set_meta(format!("config.{key}"), value);
            }
        }
        Ok(lex)
    }

    pub fn write_lexicon(&self, lex: &Lexicon64, path: &Path) -> anyhow::Result<()> {
        write_atomic(path, |out| Ok(lex.write(out)?))?;
        eprintln!("lexicon: wrote {}", path.display());
        Ok(())
    }

    pub fn neighbors(&self, word: &str, n: usize) -> anyhow::Result<Vec<(String, f64)>> {
        self.require_fresh(Stage::Embeddings)?;
        Ok(nearest_neighbors(&self.load_embeddings()?, word, n)?)
    }
}

/// Embedding width actually used: `d` when it leaves at least one
/// dimension spare, else `dim − 1`.
pub fn capped_dim(d: usize, vocab_len: usize) -> usize {
    if d >= vocab_len && vocab_len > 1 {
        warn!("dim {d} is not below the vocabulary size {vocab_len}; using {}", vocab_len - 1);
        vocab_len - 1
    } else {
        d.min(vocab_len)
    }
}

/// Rebuilds a config from the `config.*` lines of a lexicon header, for
/// replaying the run that produced it into `out_dir`.
pub fn config_from_lexicon(lex: &Lexicon64, out_dir: &Path) -> anyhow::Result<PipelineConfig> {
    let mut config = PipelineConfig::default();
    let mut seen = 0;
    for (key, value) in lex.metadata() {
        if let Some(k) = key.strip_prefix("config.") {
            config.set(k, value, Path::new(""))?;
            seen += 1;
        }
    }
    if seen == 0 {
        return Err(ConfigError("lexicon carries no config.* metadata".into()).into());
    }
    config.out_dir = out_dir.to_path_buf();
    Ok(config)
}
