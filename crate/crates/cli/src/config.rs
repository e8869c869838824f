//! Flat `key = value` pipeline configuration.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use thiserror::Error;

/// A configuration problem: unknown key, malformed value, value out of range
/// or a required setting left unset. Maps to exit code 1.
#[derive(Debug, Error)]
#[error("{0}")]
pub struct ConfigError(pub String);

impl ConfigError {
    fn new(message: impl Into<String>) -> Self {
        ConfigError(message.into())
    }
}

type Result<T> = std::result::Result<T, ConfigError>;

/// Scoring method for `induce`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    SentProp,
    Clamped,
    BestPath,
    Pmi,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::SentProp => "sentprop",
            Method::Clamped => "clamped",
            Method::BestPath => "bestpath",
            Method::Pmi => "pmi",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sentprop" => Ok(Method::SentProp),
            "clamped" => Ok(Method::Clamped),
            "bestpath" => Ok(Method::BestPath),
            "pmi" => Ok(Method::Pmi),
            other => {
                Err(ConfigError::new(format!("unknown method {other:?} (expected sentprop, clamped, bestpath or pmi)")))
            }
        }
    }
}

/// Where seed words come from: a bundled set or a signed seed file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SeedSource {
    Builtin(String),
    File(PathBuf),
}

impl fmt::Display for SeedSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SeedSource::Builtin(name) => write!(f, "builtin:{name}"),
            SeedSource::File(path) => write!(f, "{}", path.display()),
        }
    }
}

/// Every knob of the pipeline. Defaults follow the reference constants:
/// window 4, smoothing 0.75, 300 dimensions, 50 bootstrap runs of 7 seeds.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub corpus: Option<PathBuf>,
    pub stopwords: Option<PathBuf>,
    pub seeds: SeedSource,
    /// Pre-trained vectors to use instead of SVD embeddings of the corpus.
    pub embeddings: Option<PathBuf>,
    pub out_dir: PathBuf,
    pub min_count: u64,
    pub top_n: Option<usize>,
    pub lowercase: bool,
    pub window_size: usize,
    pub smoothing: f64,
    pub dim: usize,
    pub svd_seed: u64,
    pub k: usize,
    pub beta: f64,
    pub tol: f64,
    pub max_iter: usize,
    pub bootstrap_runs: usize,
    pub subset_size: usize,
    pub bootstrap_seed: u64,
    pub method: Method,
    pub pmi_absent_count: f64,
    pub bestpath_max_hops: usize,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            corpus: None,
            stopwords: None,
            seeds: SeedSource::Builtin("standard_english".into()),
            embeddings: None,
            out_dir: PathBuf::from("lexinduce-out"),
            min_count: 1,
            top_n: None,
            lowercase: true,
            window_size: 4,
            smoothing: 0.75,
            dim: 300,
            svd_seed: 0,
            k: 25,
            beta: 0.9,
            tol: 1e-6,
            max_iter: 500,
            bootstrap_runs: 50,
            subset_size: 7,
            bootstrap_seed: 0,
            method: Method::SentProp,
            pmi_absent_count: 0.01,
            bestpath_max_hops: 3,
        }
    }
}

/// Recognised keys in canonical order.
pub const KEYS: [&str; 22] = [
    "corpus",
    "stopwords",
    "seeds",
    "embeddings",
    "out_dir",
    "min_count",
    "top_n",
    "lowercase",
    "window_size",
    "smoothing",
    "dim",
    "svd_seed",
    "k",
    "beta",
    "tol",
    "max_iter",
    "bootstrap_runs",
    "subset_size",
    "bootstrap_seed",
    "method",
    "pmi_absent_count",
    "bestpath_max_hops",
];

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value.parse().map_err(|_| ConfigError::new(format!("invalid value {value:?} for {key}")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value {
        "true" | "yes" | "on" | "1" => Ok(true),
        "false" | "no" | "off" | "0" => Ok(false),
        _ => Err(ConfigError::new(format!("invalid boolean {value:?} for {key}"))),
    }
}

fn resolve(base: &Path, value: &str) -> PathBuf {
    let p = PathBuf::from(value);
    if p.is_absolute() {
        p
    } else {
        base.join(p)
    }
}

fn optional(value: &str) -> Option<&str> {
    (!value.is_empty() && value != "none").then_some(value)
}

impl PipelineConfig {
    /// Reads a config file over the defaults. Relative paths inside it are
    /// taken relative to the file's directory.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| ConfigError::new(format!("cannot read config {}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        let mut config = Self::default();
        config.apply_text(&text, base).map_err(|e| ConfigError::new(format!("{}: {}", path.display(), e.0)))?;
        Ok(config)
    }

    /// Applies `key = value` lines; blank lines and `#` comments are skipped.
    pub fn apply_text(&mut self, text: &str, base: &Path) -> Result<()> {
        for (k, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| ConfigError::new(format!("line {}: expected key = value", k + 1)))?;
            self.set(key.trim(), value.trim(), base)
                .map_err(|e| ConfigError::new(format!("line {}: {}", k + 1, e.0)))?;
        }
        Ok(())
    }

    /// Sets one key. Relative paths resolve against `base`.
    pub fn set(&mut self, key: &str, value: &str, base: &Path) -> Result<()> {
        match key {
            "corpus" => self.corpus = optional(value).map(|v| resolve(base, v)),
            "stopwords" => self.stopwords = optional(value).map(|v| resolve(base, v)),
            "seeds" => {
                self.seeds = match value.strip_prefix("builtin:") {
                    Some(name) => SeedSource::Builtin(name.to_string()),
                    None => SeedSource::File(resolve(base, value)),
                }
            }
            "embeddings" => self.embeddings = optional(value).map(|v| resolve(base, v)),
            "out_dir" => self.out_dir = resolve(base, value),
            "min_count" => self.min_count = parse(key, value)?,
            "top_n" => self.top_n = optional(value).map(|v| parse(key, v)).transpose()?,
            "lowercase" => self.lowercase = parse_bool(key, value)?,
            "window_size" => self.window_size = parse(key, value)?,
            "smoothing" => self.smoothing = parse(key, value)?,
            "dim" => self.dim = parse(key, value)?,
            "svd_seed" => self.svd_seed = parse(key, value)?,
            "k" => self.k = parse(key, value)?,
            "beta" => self.beta = parse(key, value)?,
            "tol" => self.tol = parse(key, value)?,
            "max_iter" => self.max_iter = parse(key, value)?,
            "bootstrap_runs" => self.bootstrap_runs = parse(key, value)?,
            "subset_size" => self.subset_size = parse(key, value)?,
            "bootstrap_seed" => self.bootstrap_seed = parse(key, value)?,
            "method" => self.method = value.parse()?,
            "pmi_absent_count" => self.pmi_absent_count = parse(key, value)?,
            "bestpath_max_hops" => self.bestpath_max_hops = parse(key, value)?,
            other => return Err(ConfigError::new(format!("unknown config key {other:?}"))),
        }
        Ok(())
    }

    /// Canonical string form of one key, readable back by [`Self::set`].
    pub fn get(&self, key: &str) -> Option<String> {
        let path = |p: &Option<PathBuf>| p.as_ref().map_or("none".to_string(), |p| p.display().to_string());
        Some(match key {
            "corpus" => path(&self.corpus),
            "stopwords" => path(&self.stopwords),
            "seeds" => self.seeds.to_string(),
            "embeddings" => path(&self.embeddings),
            "out_dir" => self.out_dir.display().to_string(),
            "min_count" => self.min_count.to_string(),
            "top_n" => self.top_n.map_or("none".to_string(), |n| n.to_string()),
            "lowercase" => self.lowercase.to_string(),
            "window_size" => self.window_size.to_string(),
            "smoothing" => self.smoothing.to_string(),
            "dim" => self.dim.to_string(),
            "svd_seed" => self.svd_seed.to_string(),
            "k" => self.k.to_string(),
            "beta" => self.beta.to_string(),
            "tol" => self.tol.to_string(),
            "max_iter" => self.max_iter.to_string(),
            "bootstrap_runs" => self.bootstrap_runs.to_string(),
            "subset_size" => self.subset_size.to_string(),
            "bootstrap_seed" => self.bootstrap_seed.to_string(),
            "method" => self.method.to_string(),
            "pmi_absent_count" => self.pmi_absent_count.to_string(),
            "bestpath_max_hops" => self.bestpath_max_hops.to_string(),
            _ => return None,
        })
    }

    /// All keys with their canonical values, in [`KEYS`] order.
    pub fn entries(&self) -> Vec<(&'static str, String)> {
        KEYS.iter().map(|&k| (k, self.get(k).expect("known key"))).collect()
    }

    /// Renders a config file that reproduces this configuration.
    pub fn to_text(&self) -> String {
        self.entries().into_iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
    }

    pub fn validate(&self) -> Result<()> {
        let check = |ok: bool, message: &str| if ok { Ok(()) } else { Err(ConfigError::new(message)) };
        check(self.min_count >= 1, "min_count must be at least 1")?;
        check(self.top_n != Some(0), "top_n must be positive")?;
        check(self.window_size >= 1, "window_size must be at least 1")?;
        check(self.smoothing > 0.0 && self.smoothing.is_finite(), "smoothing must be positive")?;
        check(self.dim >= 1, "dim must be at least 1")?;
        check(self.k >= 1, "k must be at least 1")?;
        check(self.beta > 0.0 && self.beta < 1.0, "beta must lie in (0, 1)")?;
        check(self.tol > 0.0 && self.tol.is_finite(), "tol must be positive")?;
        check(self.max_iter >= 1, "max_iter must be at least 1")?;
        check(self.bootstrap_runs >= 2, "bootstrap_runs must be at least 2")?;
        check(self.subset_size >= 1, "subset_size must be at least 1")?;
        check(self.pmi_absent_count > 0.0 && self.pmi_absent_count.is_finite(), "pmi_absent_count must be positive")?;
        check(self.bestpath_max_hops >= 1, "bestpath_max_hops must be at least 1")?;
        Ok(())
    }

    pub fn corpus_path(&self) -> Result<&Path> {
        self.corpus.as_deref().ok_or_else(|| ConfigError::new("corpus is not set (config key `corpus` or --corpus)"))
    }
}
