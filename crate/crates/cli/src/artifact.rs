//! Artifact files, their `.meta` sidecars and the output-directory lock.

use std::collections::BTreeMap;
use std::fs::{self, File, OpenOptions};
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use sha2::{Digest, Sha256};

pub const VERSION: &str = concat!("lexinduce ", env!("CARGO_PKG_VERSION"));

/// Hex SHA-256 of a file's bytes.
pub fn sha256_file(path: &Path) -> anyhow::Result<String> {
    let mut reader = open(path)?;
    let mut hasher = Sha256::new();
    loop {
        let buf = reader.fill_buf().with_context(|| format!("cannot read {}", path.display()))?;
        if buf.is_empty() {
            break;
        }
        hasher.update(buf);
        let n = buf.len();
        reader.consume(n);
    }
    Ok(hex::encode(hasher.finalize()))
}

/// Writes through a temporary sibling and renames, so a crash never leaves
/// a half-written artifact under the final name.
pub fn write_atomic(path: &Path, fill: impl FnOnce(&mut dyn Write) -> anyhow::Result<()>) -> anyhow::Result<()> {
    let tmp = path.with_extension("partial");
    {
        let file = File::create(&tmp).with_context(|| format!("cannot create {}", tmp.display()))?;
        let mut out = BufWriter::new(file);
        fill(&mut out)?;
        out.flush()?;
    }
    fs::rename(&tmp, path).with_context(|| format!("cannot move {} into place", tmp.display()))?;
    Ok(())
}

pub fn open(path: &Path) -> anyhow::Result<BufReader<File>> {
    let file = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    Ok(BufReader::new(file))
}

/// Sidecar describing how an artifact was made: stage name, tool version,
/// parameters, input checksums and the vocabulary checksum. `output` holds
/// the artifact's own checksum and is not part of the freshness key.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Meta(BTreeMap<String, String>);

impl Meta {
    pub fn new(stage: &str) -> Self {
        let mut m = Meta::default();
        m.set("stage", stage);
        m.set("version", VERSION);
        m
    }

    pub fn set(&mut self, key: &str, value: impl ToString) {
        self.0.insert(key.to_string(), value.to_string());
    }

    pub fn param(mut self, key: &str, value: impl ToString) -> Self {
        self.set(&format!("param.{key}"), value);
        self
    }

    pub fn input(mut self, name: &str, checksum: impl ToString) -> Self {
        self.set(&format!("input.{name}"), checksum);
        self
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.0.get(key).map(String::as_str)
    }

    pub fn sidecar(artifact: &Path) -> PathBuf {
        let mut name = artifact.as_os_str().to_owned();
        name.push(".meta");
        PathBuf::from(name)
    }

    pub fn write(&self, path: &Path) -> anyhow::Result<()> {
        write_atomic(path, |out| {
            for (k, v) in &self.0 {
                writeln!(out, "{k}={v}")?;
            }
            Ok(())
        })
    }

    pub fn read(path: &Path) -> anyhow::Result<Self> {
        let mut m = Meta::default();
        for (k, line) in open(path)?.lines().enumerate() {
            let line = line?;
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                bail!("{}: line {} is not key=value", path.display(), k + 1);
            };
            m.set(key, value);
        }
        Ok(m)
    }

    /// First key on which `self` (recorded) and `expected` disagree,
    /// ignoring `output`, described for an error message.
    pub fn difference(&self, expected: &Meta) -> Option<String> {
        let keys: std::collections::BTreeSet<&String> = self.0.keys().chain(expected.0.keys()).collect();
        keys.into_iter().filter(|k| k.as_str() != "output").find_map(|k| {
            let (a, b) = (self.0.get(k), expected.0.get(k));
            (a != b).then(|| {
                let show = |v: Option<&String>| v.map_or("<absent>".to_string(), |v| v.clone());
                format!("{k} was {} but is now {}", show(a), show(b))
            })
        })
    }
}

/// Exclusive ownership of an output directory for one invocation.
#[derive(Debug)]
pub struct DirLock {
    path: PathBuf,
}

impl DirLock {
    pub fn acquire(dir: &Path) -> anyhow::Result<Self> {
        fs::create_dir_all(dir).with_context(|| format!("cannot create output directory {}", dir.display()))?;
        let path = dir.join(".lock");
        match OpenOptions::new().write(true).create_new(true).open(&path) {
            Ok(mut f) => {
                writeln!(f, "{}", std::process::id())?;
                Ok(Self { path })
            }
            Err(e) if e.kind() == io::ErrorKind::AlreadyExists => bail!(
                "output directory {} is in use by another run (remove {} if no run is active)",
                dir.display(),
                path.display()
            ),
            Err(e) => Err(e).with_context(|| format!("cannot create {}", path.display())),
        }
    }
}

impl Drop for DirLock {
    fn drop(&mut self) {
        let _ = fs::remove_file(&self.path);
    }
}
