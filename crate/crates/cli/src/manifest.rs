//! Audit record of a run: configuration echo, content hashes of every input
//! file and the cells that failed.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use sha2::{Digest, Sha256};

/// Git's blob object id in its SHA-256 object format:
/// `sha256("blob <len>\0" ++ content)`.
pub fn blob_hash(content: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(format!("blob {}\0", content.len()).as_bytes());
    h.update(content);
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

pub fn hash_file(path: &Path) -> Result<String> {
    let bytes = std::fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(blob_hash(&bytes))
}

#[derive(Debug, Clone, PartialEq)]
pub struct FailedCell {
    pub cell: String,
    pub error: String,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Manifest {
    pub config_echo: String,
    pub inputs: Vec<(PathBuf, String)>,
    pub planned: usize,
    pub completed: usize,
    pub failed: Vec<FailedCell>,
    /// Problems met after the cells ran, such as a report that could not be
    /// rendered.
    pub notes: Vec<String>,
}

impl Manifest {
    pub fn render(&self) -> String {
        let mut s = format!("# sbrtune {}\n\n[config]\n", env!("CARGO_PKG_VERSION"));
        s.push_str(&self.config_echo);
        s.push_str("\n[inputs]\n");
        for (path, hash) in &self.inputs {
            let _ = writeln!(s, "{hash}  {}", path.display());
        }
        let _ = write!(
            s,
            "\n[cells]\nplanned={}\ncompleted={}\nfailed={}\n",
            self.planned,
            self.completed,
            self.failed.len()
        );
        if !self.failed.is_empty() {
            s.push_str("\n[failed]\n");
            for f in &self.failed {
                let _ = writeln!(s, "{}: {}", f.cell, f.error.replace('\n', " "));
            }
        }
        if !self.notes.is_empty() {
            s.push_str("\n[notes]\n");
            for n in &self.notes {
                let _ = writeln!(s, "{}", n.replace('\n', " "));
            }
        }
        s
    }

    pub fn ok(&self) -> bool {
        self.failed.is_empty() && self.notes.is_empty() && self.completed == self.planned
    }
}
