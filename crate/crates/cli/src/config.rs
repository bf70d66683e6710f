//! Run settings: built-in defaults, overridden by a flat `key=value` file,
//! overridden by command-line flags.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use sbrtune::filters::FilterConfig;
use sbrtune::surrogate::PROFILES;
use sbrtune::{ClassifierKind, FilterKind, SmoteBasis, SmoteParams, Treatment};

/// Every recognised setting, in echo order.
pub const KEYS: &[&str] = &[
    "data-dir",
    "projects",
    "filters",
    "treatments",
    "learners",
    "seed",
    "repeats",
    "de-gens",
    "jobs",
    "out",
    "trace",
    "timings",
    "smote-k",
    "smote-m",
    "smote-r",
    "smote-m-basis",
    "filter-threshold",
    "keywords",
    "save-keywords",
];

/// Project names with a known imbalance profile.
pub fn known_projects() -> Vec<&'static str> {
    PROFILES.iter().map(|p| p.name).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub data_dir: PathBuf,
    pub projects: Vec<String>,
    pub filters: Vec<FilterKind>,
    pub treatments: Vec<Treatment>,
    pub learners: Vec<ClassifierKind>,
    pub seed: u64,
    /// Repeat `i` runs with seed `seed + i`.
    pub repeats: usize,
    /// One learner-tuning column per entry.
    pub de_gens: Vec<usize>,
    /// Worker threads; `None` uses every logical core.
    pub jobs: Option<usize>,
    pub out: PathBuf,
    pub trace: bool,
    /// Fill the `minutes` column with wall-clock time.
    pub timings: bool,
    pub smote: SmoteParams,
    pub filter_threshold: f64,
    pub keywords: usize,
    /// Write each project's term-score table next to the results.
    pub save_keywords: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            data_dir: PathBuf::from("data"),
            projects: known_projects().into_iter().map(String::from).collect(),
            filters: FilterKind::ALL.to_vec(),
            treatments: Treatment::ALL.to_vec(),
            learners: ClassifierKind::ALL.to_vec(),
            seed: 1,
            repeats: 1,
            de_gens: vec![10],
            jobs: None,
            out: PathBuf::from("out"),
            trace: false,
            timings: false,
            smote: SmoteParams::default(),
            filter_threshold: FilterConfig::default().threshold,
            keywords: sbrtune::harness::default_keywords(),
            save_keywords: false,
        }
    }
}

fn list<T: FromStr>(value: &str) -> Result<Vec<T>>
where
    T::Err: std::fmt::Display,
{
    let mut out: Vec<(String, T)> = Vec::new();
    for item in value.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        if out.iter().any(|(s, _)| s.eq_ignore_ascii_case(item)) {
            continue;
        }
        let parsed = item.parse::<T>().map_err(|e| anyhow!("{e}"))?;
        out.push((item.to_string(), parsed));
    }
    if out.is_empty() {
        bail!("empty list");
    }
    Ok(out.into_iter().map(|(_, v)| v).collect())
}

fn scalar<T: FromStr>(value: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    value.trim().parse::<T>().map_err(|e| anyhow!("{e}"))
}

fn flag(value: &str) -> Result<bool> {
    match value.trim().to_ascii_lowercase().as_str() {
        "true" | "yes" | "1" | "on" => Ok(true),
        "false" | "no" | "0" | "off" => Ok(false),
        other => bail!("expected true or false, got `{other}`"),
    }
}

fn join<T: ToString>(items: &[T]) -> String {
    items.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
}

/// `snake_case` and `kebab-case` spellings name the same key.
pub fn normalize_key(key: &str) -> String {
    key.trim()
        .trim_start_matches("--")
        .replace('_', "-")
        .to_ascii_lowercase()
}

/// Parses a flat `key=value` file. Blank lines and `#` comments are skipped.
pub fn parse_config_text(text: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| anyhow!("line {}: expected key=value", i + 1))?;
        let key = normalize_key(key);
        if !KEYS.contains(&key.as_str()) {
            bail!("line {}: unknown key `{key}`", i + 1);
        }
        out.push((key, value.trim().to_string()));
    }
    Ok(out)
}

pub fn read_config_file(path: &Path) -> Result<Vec<(String, String)>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_config_text(&text).with_context(|| format!("in {}", path.display()))
}

impl RunConfig {
    /// Defaults, then each layer in turn; later layers win.
    pub fn resolve(layers: &[Vec<(String, String)>]) -> Result<Self> {
        let mut cfg = Self::default();
        for layer in layers {
            for (key, value) in layer {
                cfg.set(key, value).with_context(|| format!("setting `{key}`"))?;
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match normalize_key(key).as_str() {
            "data-dir" => self.data_dir = PathBuf::from(value.trim()),
            "projects" => self.projects = list(value)?,
            "filters" => self.filters = list(value)?,
            "treatments" => self.treatments = list(value)?,
            "learners" => self.learners = list(value)?,
            "seed" => self.seed = scalar(value)?,
            "repeats" => self.repeats = scalar(value)?,
            "de-gens" => self.de_gens = list(value)?,
            "jobs" => {
                self.jobs = match value.trim() {
                    "" | "auto" => None,
                    v => Some(scalar(v)?),
                }
            }
            "out" => self.out = PathBuf::from(value.trim()),
            "trace" => self.trace = flag(value)?,
            "timings" => self.timings = flag(value)?,
            "smote-k" => self.smote.k = scalar(value)?,
            "smote-m" => self.smote.m = scalar(value)?,
            "smote-r" => self.smote.r = scalar(value)?,
            "smote-m-basis" => self.smote.basis = scalar::<SmoteBasis>(value)?,
            "filter-threshold" => self.filter_threshold = scalar(value)?,
            "keywords" => self.keywords = scalar(value)?,
            "save-keywords" => self.save_keywords = flag(value)?,
            other => bail!("unknown key `{other}`"),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        let known = known_projects();
        for p in &self.projects {
            if !known.contains(&p.as_str()) {
                bail!("unknown project `{p}` (expected one of {})", known.join(", "));
            }
        }
        if self.repeats == 0 {
            bail!("repeats must be at least 1");
        }
        if self.de_gens.contains(&0) {
            bail!("de-gens entries must be positive");
        }
        if self.jobs == Some(0) {
            bail!("jobs must be at least 1");
        }
        if self.keywords == 0 {
            bail!("keywords must be at least 1");
        }
        if !self.filter_threshold.is_finite() {
            bail!("filter-threshold must be finite");
        }
        self.smote.validate()?;
        Ok(())
    }

    /// `key=value` lines in [`KEYS`] order; reading them back gives the same
    /// configuration.
    pub fn echo(&self) -> String {
        let mut s = String::new();
        for key in KEYS {
            let value = match *key {
                "data-dir" => self.data_dir.display().to_string(),
                "projects" => self.projects.join(","),
                "filters" => join(&self.filters.iter().map(|f| f.name()).collect::<Vec<_>>()),
                "treatments" => join(&self.treatments.iter().map(|t| t.name()).collect::<Vec<_>>()),
                "learners" => join(&self.learners.iter().map(|l| l.name()).collect::<Vec<_>>()),
                "seed" => self.seed.to_string(),
                "repeats" => self.repeats.to_string(),
                "de-gens" => join(&self.de_gens),
                "jobs" => self.jobs.map_or_else(|| "auto".into(), |j| j.to_string()),
                "out" => self.out.display().to_string(),
                "trace" => self.trace.to_string(),
                "timings" => self.timings.to_string(),
                "smote-k" => self.smote.k.to_string(),
                "smote-m" => self.smote.m.to_string(),
                "smote-r" => self.smote.r.to_string(),
                "smote-m-basis" => self.smote.basis.to_string(),
                "filter-threshold" => self.filter_threshold.to_string(),
                "keywords" => self.keywords.to_string(),
                "save-keywords" => self.save_keywords.to_string(),
                _ => unreachable!("every key is echoed"),
            };
            let _ = writeln!(s, "{key}={value}");
        }
        s
    }

    /// Label of a treatment column. With several DE budgets the tuning
    /// columns carry the generation count.
    pub fn treatment_label(&self, t: Treatment, de_gens: usize) -> String {
        if t == Treatment::LearnerTuning && self.de_gens.len() > 1 {
            format!("{}_de{de_gens}", t.name())
        } else {
            t.name().to_string()
        }
    }

    /// Number of result rows a complete run produces.
    pub fn expected_rows(&self) -> usize {
        let columns: usize = self
            .treatments
            .iter()
            .map(|t| {
                if *t == Treatment::LearnerTuning {
                    self.de_gens.len()
                } else {
                    1
                }
            })
            .sum();
        self.projects.len() * self.filters.len() * columns * self.repeats
    }
}
