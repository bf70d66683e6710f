//! Tokenization, security-relevance scores for terms, and term-count features.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use rust_stemmers::{Algorithm, Stemmer};

use crate::corpus::{Corpus, Dataset, Label, Provenance, Row};
use crate::error::{Error, Result};

/// Lower clamp for term scores.
pub const SCORE_MIN: f64 = 0.01;
/// Upper clamp for term scores.
pub const SCORE_MAX: f64 = 0.99;

/// Keyword budget used when none is given.
pub const DEFAULT_KEYWORDS: usize = 100;

/// How the per-class support of a term is shaped before the scores combine.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SupportFunction {
    /// `S / (S + N)`.
    Plain,
    /// SBR support doubled and NSBR support squared.
    JalaliSq,
    /// SBR support doubled.
    GrahamTwo,
}

impl SupportFunction {
    pub const ALL: [SupportFunction; 3] = [
        SupportFunction::Plain,
        SupportFunction::GrahamTwo,
        SupportFunction::JalaliSq,
    ];
}

#[derive(Debug, Clone, PartialEq)]
pub struct TermScore {
    pub term: String,
    pub score: f64,
}

/// Term → score in `[SCORE_MIN, SCORE_MAX]`, iterated in term order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ScoreTable {
    entries: BTreeMap<String, f64>,
}

impl ScoreTable {
    pub fn from_scores(scores: impl IntoIterator<Item = TermScore>) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for TermScore { term, score } in scores {
            if !(0.0..=1.0).contains(&score) {
                return Err(Error::invalid(format!("score {score} for `{term}` outside [0,1]")));
            }
            if entries.insert(term.clone(), score).is_some() {
                return Err(Error::DuplicateId(term));
            }
        }
        Ok(Self { entries })
    }

    pub fn get(&self, term: &str) -> Option<f64> {
        self.entries.get(term).copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.entries.iter().map(|(t, s)| (t.as_str(), *s))
    }

    /// `term,score` CSV, one line per term.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "term,score")?;
        for (t, s) in self.iter() {
            writeln!(out, "{t},{s:.6}")?;
        }
        Ok(())
    }

    pub fn save_csv(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        self.write_csv(std::io::BufWriter::new(file))
            .map_err(|source| Error::Io {
                path: path.to_path_buf(),
                source,
            })
    }
}

const STOP_WORDS: &[&str] = &[
    "about",
    "above",
    "after",
    "again",
    "against",
    "all",
    "also",
    "am",
    "an",
    "and",
    "any",
    "are",
    "as",
    "at",
    "be",
    "because",
    "been",
    "before",
    "being",
    "below",
    "between",
    "both",
    "but",
    "by",
    "can",
    "could",
    "did",
    "do",
    "does",
    "doing",
    "down",
    "during",
    "each",
    "either",
    "else",
    "etc",
    "ever",
    "every",
    "few",
    "for",
    "from",
    "further",
    "get",
    "gets",
    "got",
    "had",
    "has",
    "have",
    "having",
    "he",
    "her",
    "here",
    "hers",
    "herself",
    "him",
    "himself",
    "his",
    "how",
    "if",
    "in",
    "into",
    "is",
    "it",
    "its",
    "itself",
    "just",
    "let",
    "may",
    "me",
    "might",
    "more",
    "most",
    "must",
    "my",
    "myself",
    "no",
    "nor",
    "not",
    "now",
    "of",
    "off",
    "on",
    "once",
    "only",
    "or",
    "other",
    "ought",
    "our",
    "ours",
    "ourselves",
    "out",
    "over",
    "own",
    "same",
    "shall",
    "she",
    "should",
    "so",
    "some",
    "such",
    "than",
    "that",
    "the",
    "their",
    "theirs",
    "them",
    "themselves",
    "then",
    "there",
    "these",
    "they",
    "this",
    "those",
    "through",
    "to",
    "too",
    "under",
    "until",
    "up",
    "upon",
    "us",
    "very",
    "was",
    "we",
    "were",
    "what",
    "when",
    "where",
    "whether",
    "which",
    "while",
    "who",
    "whom",
    "whose",
    "why",
    "will",
    "with",
    "within",
    "without",
    "would",
    "yet",
    "you",
    "your",
    "yours",
    "yourself",
    "yourselves",
];

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct TokenizeOptions {
    /// Apply the Snowball English stemmer to every kept token.
    pub stem: bool,
}

/// Lowercase alphanumeric tokens of at least two characters, stop words removed.
pub fn tokenize(text: &str) -> Vec<String> {
    tokenize_with(text, TokenizeOptions::default())
}

pub fn tokenize_with(text: &str, opts: TokenizeOptions) -> Vec<String> {
    let stemmer = opts.stem.then(|| Stemmer::create(Algorithm::English));
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| t.chars().count() >= 2)
        .map(str::to_lowercase)
        .filter(|t| STOP_WORDS.binary_search(&t.as_str()).is_err())
        .map(|t| match &stemmer {
            Some(s) => s.stem(&t).into_owned(),
            None => t,
        })
        .collect()
}

/// Score from document frequencies within each class.
///
/// `S = sbr_docs / n_sbr` and `N = nsbr_docs / n_nsbr` (each capped at 1).
/// The variants reshape `(S, N)` so that, for any fixed term,
/// `Plain ≤ GrahamTwo ≤ JalaliSq`:
///
/// * `Plain`: `S / (S + N)`
/// * `GrahamTwo`: `S₂ / (S₂ + N)` with `S₂ = min(1, 2S)`
/// * `JalaliSq`: `S₂ / (S₂ + N²)`
///
/// The result is clamped to `[SCORE_MIN, SCORE_MAX]`.
pub fn term_score(sf: SupportFunction, sbr_docs: usize, nsbr_docs: usize, n_sbr: usize, n_nsbr: usize) -> f64 {
    let s = ratio(sbr_docs, n_sbr);
    let n = ratio(nsbr_docs, n_nsbr);
    let (s, n) = match sf {
        SupportFunction::Plain => (s, n),
        SupportFunction::GrahamTwo => ((2.0 * s).min(1.0), n),
        SupportFunction::JalaliSq => ((2.0 * s).min(1.0), n * n),
    };
    // 1 / (1 + N/S) rather than S / (S + N): monotone under rounding.
    let raw = if s == 0.0 { 0.0 } else { 1.0 / (1.0 + n / s) };
    raw.clamp(SCORE_MIN, SCORE_MAX)
}

fn ratio(count: usize, total: usize) -> f64 {
    if total == 0 {
        0.0
    } else {
        (count as f64 / total as f64).min(1.0)
    }
}

pub fn score_terms(train: &Corpus, sf: SupportFunction) -> Result<ScoreTable> {
    score_terms_with(train, sf, TokenizeOptions::default())
}

pub fn score_terms_with(train: &Corpus, sf: SupportFunction, opts: TokenizeOptions) -> Result<ScoreTable> {
    let n_sbr = train.count(Label::Sbr);
    let n_nsbr = train.count(Label::Nsbr);
    if n_sbr == 0 {
        return Err(Error::MissingClass(Label::Sbr));
    }
    if n_nsbr == 0 {
        return Err(Error::MissingClass(Label::Nsbr));
    }
    let mut df: HashMap<String, (usize, usize)> = HashMap::new();
    for report in train.reports() {
        let unique: HashSet<String> = tokenize_with(&report.text, opts).into_iter().collect();
        for term in unique {
            let e = df.entry(term).or_default();
            match report.label {
                Label::Sbr => e.0 += 1,
                Label::Nsbr => e.1 += 1,
            }
        }
    }
    ScoreTable::from_scores(df.into_iter().map(|(term, (s, n))| TermScore {
        term,
        score: term_score(sf, s, n, n_sbr, n_nsbr),
    }))
}

/// The `n` best-scoring terms; equal scores are ordered lexicographically.
pub fn top_keywords(scores: &ScoreTable, n: usize) -> Result<Vec<String>> {
    if n == 0 {
        return Err(Error::invalid("keyword count must be positive"));
    }
    if n > scores.len() {
        return Err(Error::invalid(format!(
            "{n} keywords requested from a table of {}",
            scores.len()
        )));
    }
    let mut all: Vec<(&str, f64)> = scores.iter().collect();
    all.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    Ok(all.into_iter().take(n).map(|(t, _)| t.to_string()).collect())
}

/// One row per report; each cell counts a keyword's occurrences.
pub fn build_features(corpus: &Corpus, keywords: &[String], provenance: Provenance) -> Result<Dataset> {
    build_features_with(corpus, keywords, provenance, TokenizeOptions::default())
}

pub fn build_features_with(
    corpus: &Corpus,
    keywords: &[String],
    provenance: Provenance,
    opts: TokenizeOptions,
) -> Result<Dataset> {
    if keywords.is_empty() {
        return Err(Error::invalid("keyword list is empty"));
    }
    let column: HashMap<&str, usize> = keywords.iter().enumerate().map(|(i, k)| (k.as_str(), i)).collect();
    let rows = corpus
        .reports()
        .iter()
        .map(|r| {
            let mut values = vec![0.0; keywords.len()];
            for tok in tokenize_with(&r.text, opts) {
                if let Some(&c) = column.get(tok.as_str()) {
                    values[c] += 1.0;
                }
            }
            Row {
                id: r.id.clone(),
                values,
                label: r.label,
            }
        })
        .collect();
    Dataset::new(keywords.to_vec(), rows, provenance)
}

impl fmt::Display for SupportFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SupportFunction::Plain => "plain",
            SupportFunction::JalaliSq => "jalali_sq",
            SupportFunction::GrahamTwo => "graham_two",
        })
    }
}

impl FromStr for SupportFunction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "plain" => Ok(SupportFunction::Plain),
            "jalali_sq" => Ok(SupportFunction::JalaliSq),
            "graham_two" => Ok(SupportFunction::GrahamTwo),
            other => Err(Error::invalid(format!("unknown support function `{other}`"))),
        }
    }
}
