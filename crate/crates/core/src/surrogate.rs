//! Synthetic bug-report corpora with the size and class imbalance of the
//! public FARSEC projects.
//!
//! Reports mix a Zipf-distributed generic vocabulary with security terms and
//! terms common to both classes. Some SBRs carry little security vocabulary
//! and some NSBRs carry a lot, so neither the filters nor the learners see a
//! cleanly separable problem. The generator only reproduces the row counts;
//! it says nothing about the real projects' text.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;

use rand::distributions::{Distribution, WeightedIndex};
use rand::Rng;

use crate::corpus::{BugReport, Corpus, Label};
use crate::error::{Error, Result};
use crate::textmine::tokenize;
use crate::util::{self, derive_seed};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ProjectProfile {
    pub name: &'static str,
    pub train_rows: usize,
    pub train_sbr: usize,
    pub test_rows: usize,
    pub test_sbr: usize,
}

pub const PROFILES: [ProjectProfile; 5] = [
    ProjectProfile {
        name: "chromium",
        train_rows: 20970,
        train_sbr: 77,
        test_rows: 20970,
        test_sbr: 115,
    },
    ProjectProfile {
        name: "wicket",
        train_rows: 500,
        train_sbr: 4,
        test_rows: 500,
        test_sbr: 6,
    },
    ProjectProfile {
        name: "ambari",
        train_rows: 500,
        train_sbr: 22,
        test_rows: 500,
        test_sbr: 7,
    },
    ProjectProfile {
        name: "camel",
        train_rows: 500,
        train_sbr: 14,
        test_rows: 500,
        test_sbr: 18,
    },
    ProjectProfile {
        name: "derby",
        train_rows: 500,
        train_sbr: 46,
        test_rows: 500,
        test_sbr: 42,
    },
];

pub fn profile(name: &str) -> Option<ProjectProfile> {
    PROFILES.iter().copied().find(|p| p.name == name)
}

/// Security terms from the most to the least specific. Later terms turn up
/// in ordinary reports more often (see [`leak_weight`]).
const SECURITY: [&str; 40] = [
    "xss",
    "csrf",
    "clickjacking",
    "cve",
    "exploit",
    "vulnerability",
    "spoofing",
    "forgery",
    "traversal",
    "phishing",
    "attacker",
    "malicious",
    "escalation",
    "hijack",
    "tampering",
    "injection",
    "untrusted",
    "sanitize",
    "insecure",
    "privilege",
    "unauthorized",
    "crafted",
    "bypass",
    "disclosure",
    "escaping",
    "sandbox",
    "denial",
    "credential",
    "leak",
    "unsafe",
    "overflow",
    "secret",
    "authentication",
    "authorization",
    "encryption",
    "certificate",
    "redirect",
    "cookie",
    "password",
    "heap",
];

const SHARED: [&str; 24] = [
    "crash",
    "memory",
    "error",
    "user",
    "page",
    "input",
    "request",
    "access",
    "session",
    "token",
    "browser",
    "server",
    "script",
    "url",
    "header",
    "file",
    "login",
    "permission",
    "buffer",
    "exception",
    "null",
    "pointer",
    "response",
    "origin",
];

/// Relative chance that an NSBR's security token is `SECURITY[i]`.
fn leak_weight(i: usize) -> f64 {
    ((i + 1) as f64 / SECURITY.len() as f64).powi(3)
}

/// Mixture weights of one report type: chance that a token is a security
/// or shared term; the rest is generic. Leaky styles draw their security
/// terms by [`leak_weight`], the others uniformly.
#[derive(Debug, Clone, Copy)]
struct Style {
    security: f64,
    shared: f64,
    leaky: bool,
}

const SHARED_RATE: f64 = 0.08;
const PLAIN_NSBR: Style = Style {
    security: SECURITY_LEAK,
    shared: SHARED_RATE,
    leaky: true,
};
const LOUD_NSBR: Style = Style {
    security: 0.08,
    shared: SHARED_RATE,
    leaky: false,
};
const CLEAR_SBR: Style = Style {
    security: 0.14,
    shared: SHARED_RATE,
    leaky: false,
};
const QUIET_SBR: Style = Style {
    security: 0.03,
    shared: SHARED_RATE,
    leaky: false,
};

const SECURITY_LEAK: f64 = 0.02;
const LOUD_NSBR_SHARE: f64 = 0.03;
const QUIET_SBR_SHARE: f64 = 0.3;
const GENERIC_WORDS: usize = 1200;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurrogateConfig {
    /// Row-count multiplier. SBR counts scale too but never drop below
    /// three (or the profile's count when smaller).
    pub scale: f64,
    pub seed: u64,
}

impl Default for SurrogateConfig {
    fn default() -> Self {
        Self { scale: 1.0, seed: 1 }
    }
}

fn scaled(rows: usize, sbr: usize, scale: f64) -> (usize, usize) {
    let n = ((rows as f64 * scale).round() as usize).max(2);
    let s = ((sbr as f64 * scale).round() as usize).max(sbr.min(3)).min(n - 1);
    (n, s)
}

/// Pronounceable pseudo-words that survive tokenisation unchanged.
fn generic_vocabulary() -> Vec<String> {
    const C: &[u8] = b"bdfgklmnprstvz";
    const V: &[u8] = b"aeiou";
    let mut out = Vec::with_capacity(GENERIC_WORDS);
    let mut i = 0usize;
    while out.len() < GENERIC_WORDS {
        let mut w = String::new();
        let mut x = i;
        for _ in 0..3 {
            w.push(C[x % C.len()] as char);
            x /= C.len();
            w.push(V[x % V.len()] as char);
            x /= V.len();
        }
        i += 1;
        if tokenize(&w) == [w.clone()] && !SECURITY.contains(&w.as_str()) && !SHARED.contains(&w.as_str()) {
            out.push(w);
        }
    }
    out
}

struct Generator {
    generic: Vec<String>,
    zipf: WeightedIndex<f64>,
    leak: WeightedIndex<f64>,
}

impl Generator {
    fn new() -> Self {
        let generic = generic_vocabulary();
        let zipf = WeightedIndex::new((0..generic.len()).map(|r| 1.0 / ((r + 1) as f64).powf(1.05)))
            .expect("positive weights");
        let leak = WeightedIndex::new((0..SECURITY.len()).map(leak_weight)).expect("positive weights");
        Self { generic, zipf, leak }
    }

    fn text<R: Rng>(&self, style: Style, rng: &mut R) -> (String, String) {
        let len = rng.gen_range(15..60);
        let words: Vec<&str> = (0..len)
            .map(|_| {
                let u: f64 = rng.gen();
                if u < style.security {
                    if style.leaky {
                        SECURITY[self.leak.sample(rng)]
                    } else {
                        SECURITY[rng.gen_range(0..SECURITY.len())]
                    }
                } else if u < style.security + style.shared {
                    SHARED[rng.gen_range(0..SHARED.len())]
                } else {
                    self.generic[self.zipf.sample(rng)].as_str()
                }
            })
            .collect();
        let cut = (len / 4).max(3);
        (words[..cut].join(" "), words[cut..].join(" "))
    }

    fn corpus<R: Rng>(&self, prefix: &str, rows: usize, sbr: usize, rng: &mut R) -> Result<Corpus> {
        let mut labels: Vec<bool> = (0..rows).map(|i| i < sbr).collect();
        rand::seq::SliceRandom::shuffle(labels.as_mut_slice(), rng);
        let reports = labels
            .into_iter()
            .enumerate()
            .map(|(i, security)| {
                let style = match (security, rng.gen::<f64>()) {
                    (true, u) if u < QUIET_SBR_SHARE => QUIET_SBR,
                    (true, _) => CLEAR_SBR,
                    (false, u) if u < LOUD_NSBR_SHARE => LOUD_NSBR,
                    (false, _) => PLAIN_NSBR,
                };
                let (summary, description) = self.text(style, rng);
                BugReport {
                    id: format!("{prefix}-{i:05}"),
                    text: format!("{summary}\n{description}"),
                    label: Label::from_flag(security),
                }
            })
            .collect();
        Corpus::new(reports)
    }
}

/// Training and test corpora for `profile`.
pub fn generate(profile: &ProjectProfile, cfg: &SurrogateConfig) -> Result<(Corpus, Corpus)> {
    if !(cfg.scale > 0.0) {
        return Err(Error::invalid("surrogate scale must be positive"));
    }
    let gen = Generator::new();
    let stream = profile
        .name
        .bytes()
        .fold(0u64, |h, b| h.wrapping_mul(31).wrapping_add(u64::from(b)));
    let mut rng = util::rng(derive_seed(cfg.seed, stream));
    let (n, s) = scaled(profile.train_rows, profile.train_sbr, cfg.scale);
    let train = gen.corpus(&format!("{}-train", profile.name), n, s, &mut rng)?;
    let (n, s) = scaled(profile.test_rows, profile.test_sbr, cfg.scale);
    let test = gen.corpus(&format!("{}-test", profile.name), n, s, &mut rng)?;
    Ok((train, test))
}

fn write_jsonl(path: &Path, corpus: &Corpus) -> Result<()> {
    let io = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    let mut out = BufWriter::new(File::create(path).map_err(io)?);
    for r in corpus.reports() {
        let (summary, description) = r.text.split_once('\n').unwrap_or((r.text.as_str(), ""));
        let line = serde_json::json!({
            "id": r.id,
            "summary": summary,
            "description": description,
            "security": r.label.flag(),
        });
        writeln!(out, "{line}").map_err(io)?;
    }
    out.flush().map_err(io)
}

/// Writes `<dir>/<project>/train.jsonl` and `test.jsonl`.
pub fn write_project(dir: &Path, profile: &ProjectProfile, cfg: &SurrogateConfig) -> Result<()> {
    let (train, test) = generate(profile, cfg)?;
    let root = dir.join(profile.name);
    fs::create_dir_all(&root).map_err(|source| Error::Io {
        path: root.clone(),
        source,
    })?;
    write_jsonl(&root.join("train.jsonl"), &train)?;
    write_jsonl(&root.join("test.jsonl"), &test)
}
