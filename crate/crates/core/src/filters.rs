//! Training-set pruning treatments.
//!
//! The FARSEC family removes not-security reports that look like security
//! reports: every report is scored by combining the security scores of the
//! keywords it contains, and NSBR rows scoring at or above a threshold are
//! dropped. CLNI removes NSBR rows whose nearest neighbours mostly carry the
//! other label. Composite kinds run the FARSEC variant first, then CLNI.
//! SBR rows are never removed by any filter.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::corpus::{Dataset, Label};
use crate::error::{Error, Result};
use crate::neighbors::{EuclideanIndex, SparseMatrix};
use crate::textmine::{term_score, ScoreTable, SupportFunction};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FilterKind {
    Train,
    Farsecsq,
    Farsectwo,
    Farsec,
    Clni,
    Clnifarsecsq,
    Clnifarsectwo,
    Clnifarsec,
}

impl FilterKind {
    /// In the row order of the published imbalance table.
    pub const ALL: [FilterKind; 8] = [
        FilterKind::Train,
        FilterKind::Farsecsq,
        FilterKind::Farsectwo,
        FilterKind::Farsec,
        FilterKind::Clni,
        FilterKind::Clnifarsecsq,
        FilterKind::Clnifarsectwo,
        FilterKind::Clnifarsec,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FilterKind::Train => "train",
            FilterKind::Farsecsq => "farsecsq",
            FilterKind::Farsectwo => "farsectwo",
            FilterKind::Farsec => "farsec",
            FilterKind::Clni => "clni",
            FilterKind::Clnifarsecsq => "clnifarsecsq",
            FilterKind::Clnifarsectwo => "clnifarsectwo",
            FilterKind::Clnifarsec => "clnifarsec",
        }
    }

    /// The FARSEC stage, if any.
    pub fn support(self) -> Option<SupportFunction> {
        match self {
            FilterKind::Farsec | FilterKind::Clnifarsec => Some(SupportFunction::Plain),
            FilterKind::Farsecsq | FilterKind::Clnifarsecsq => Some(SupportFunction::JalaliSq),
            FilterKind::Farsectwo | FilterKind::Clnifarsectwo => Some(SupportFunction::GrahamTwo),
            FilterKind::Train | FilterKind::Clni => None,
        }
    }

    pub fn uses_clni(self) -> bool {
        matches!(
            self,
            FilterKind::Clni | FilterKind::Clnifarsec | FilterKind::Clnifarsecsq | FilterKind::Clnifarsectwo
        )
    }
}

impl fmt::Display for FilterKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FilterKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FilterKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::invalid(format!("unknown filter `{s}`")))
    }
}

/// Closest-list noise identification settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClniParams {
    /// Neighbours inspected per instance.
    pub neighbor_count: usize,
    /// Fraction of disagreeing neighbours that flags an instance, in (0, 1].
    pub noise_threshold: f64,
    /// Jaccard similarity of consecutive noise sets that ends the loop, in (0, 1].
    pub stop_similarity: f64,
    pub max_iterations: usize,
}

impl Default for ClniParams {
    fn default() -> Self {
        Self {
            neighbor_count: 5,
            noise_threshold: 0.8,
            stop_similarity: 0.99,
            max_iterations: 10,
        }
    }
}

impl ClniParams {
    pub fn validate(&self) -> Result<()> {
        let unit = |v: f64| v > 0.0 && v <= 1.0;
        if self.neighbor_count == 0 {
            return Err(Error::invalid("CLNI neighbor count must be positive"));
        }
        if !unit(self.noise_threshold) || !unit(self.stop_similarity) {
            return Err(Error::invalid("CLNI thresholds must lie in (0, 1]"));
        }
        if self.max_iterations == 0 {
            return Err(Error::invalid("CLNI needs at least one iteration"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilterConfig {
    /// NSBR rows whose report score reaches this value are pruned.
    pub threshold: f64,
    /// At most this many keywords enter a report's score.
    pub keyword_cap: usize,
    pub clni: ClniParams,
}

impl Default for FilterConfig {
    fn default() -> Self {
        Self {
            threshold: 0.75,
            keyword_cap: 15,
            clni: ClniParams::default(),
        }
    }
}

/// Probability-style combination of the scores of the keywords present in
/// `row`: `Πs / (Πs + Π(1−s))`. Only the `cap` most frequent keywords count
/// (ties go to the lower column). A row without keywords scores 0.
pub fn report_score(row: &[f64], scores: &[f64], cap: usize) -> f64 {
    debug_assert_eq!(row.len(), scores.len());
    let mut present: Vec<(f64, usize)> = row
        .iter()
        .enumerate()
        .filter(|(_, &c)| c > 0.0)
        .map(|(j, &c)| (c, j))
        .collect();
    if present.is_empty() || cap == 0 {
        return 0.0;
    }
    if present.len() > cap {
        present.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
        present.truncate(cap);
    }
    combine(present.iter().map(|&(_, j)| scores[j]))
}

/// Graham combination evaluated in log space.
pub fn combine(scores: impl IntoIterator<Item = f64>) -> f64 {
    const EPS: f64 = 1e-12;
    let (mut ln_s, mut ln_not) = (0.0, 0.0);
    for s in scores {
        let s = s.clamp(EPS, 1.0 - EPS);
        ln_s += s.ln();
        ln_not += (1.0 - s).ln();
    }
    1.0 / (1.0 + (ln_not - ln_s).exp())
}

/// Per-column scores from the document frequency of each column in the SBR
/// and NSBR rows of `d`.
pub fn feature_scores(d: &Dataset, sf: SupportFunction) -> Result<Vec<f64>> {
    let n_sbr = d.count(Label::Sbr);
    let n_nsbr = d.count(Label::Nsbr);
    if n_sbr == 0 {
        return Err(Error::MissingClass(Label::Sbr));
    }
    if n_nsbr == 0 {
        return Err(Error::MissingClass(Label::Nsbr));
    }
    let mut df = vec![(0usize, 0usize); d.n_features()];
    for row in d.rows() {
        for (j, &v) in row.values.iter().enumerate() {
            if v > 0.0 {
                match row.label {
                    Label::Sbr => df[j].0 += 1,
                    Label::Nsbr => df[j].1 += 1,
                }
            }
        }
    }
    Ok(df
        .into_iter()
        .map(|(s, n)| term_score(sf, s, n, n_sbr, n_nsbr))
        .collect())
}

/// Scores aligned with `d`'s columns from a precomputed table.
pub fn scores_from_table(d: &Dataset, table: &ScoreTable) -> Result<Vec<f64>> {
    d.feature_names()
        .iter()
        .map(|f| {
            table
                .get(f)
                .ok_or_else(|| Error::invalid(format!("no score for feature `{f}`")))
        })
        .collect()
}

/// FARSEC pruning with scores derived from `d` itself.
pub fn apply_farsec(d: &Dataset, sf: SupportFunction, threshold: f64) -> Result<Dataset> {
    let cfg = FilterConfig {
        threshold,
        ..FilterConfig::default()
    };
    farsec_with_config(d, sf, &cfg)
}

fn farsec_with_config(d: &Dataset, sf: SupportFunction, cfg: &FilterConfig) -> Result<Dataset> {
    d.ensure_training("FARSEC filter")?;
    if d.count(Label::Nsbr) == 0 {
        return Ok(d.clone());
    }
    let scores = feature_scores(d, sf)?;
    prune_with_scores(d, &scores, cfg.threshold, cfg.keyword_cap)
}

/// Drops NSBR rows whose [`report_score`] is at least `threshold`.
pub fn prune_with_scores(d: &Dataset, scores: &[f64], threshold: f64, cap: usize) -> Result<Dataset> {
    if scores.len() != d.n_features() {
        return Err(Error::DimensionMismatch {
            expected: d.n_features(),
            got: scores.len(),
        });
    }
    let kept = d
        .rows()
        .iter()
        .filter(|r| r.label == Label::Sbr || report_score(&r.values, scores, cap) < threshold)
        .cloned()
        .collect();
    d.with_rows(kept)
}

/// Outcome of the CLNI noise search.
#[derive(Debug, Clone, PartialEq)]
pub struct ClniNoise {
    /// Flagged row indices (both classes), ascending.
    pub noisy: Vec<usize>,
    pub iterations: usize,
}

/// Iterative closest-list noise identification.
///
/// In each pass every row looks at its `neighbor_count` nearest rows
/// (Euclidean, excluding itself and rows flagged in the previous pass) and
/// is flagged when the disagreeing fraction reaches `noise_threshold`. Passes
/// stop once the Jaccard similarity of consecutive noise sets reaches
/// `stop_similarity` or after `max_iterations`.
pub fn clni_noise(d: &Dataset, p: &ClniParams) -> Result<ClniNoise> {
    p.validate()?;
    if d.n_rows() <= p.neighbor_count {
        return Err(Error::invalid(format!(
            "CLNI needs more than {} rows, got {}",
            p.neighbor_count,
            d.n_rows()
        )));
    }
    let matrix = SparseMatrix::from_dense(d.rows().iter().map(|r| r.values.as_slice()), d.n_features());
    let index = EuclideanIndex::new(matrix);
    let labels = d.labels();
    let n = d.n_rows();

    let mut prev = vec![false; n];
    let mut iterations = 0;
    for _ in 0..p.max_iterations {
        iterations += 1;
        let current: Vec<bool> = (0..n)
            .into_par_iter()
            .map_init(Vec::new, |scratch, i| {
                let near = index.nearest(index.rows().row(i), p.neighbor_count, |j| j == i || prev[j], scratch);
                if near.is_empty() {
                    return false;
                }
                let differing = near.iter().filter(|&&(_, j)| labels[j] != labels[i]).count();
                differing as f64 / near.len() as f64 >= p.noise_threshold
            })
            .collect();
        let similarity = jaccard(&prev, &current);
        prev = current;
        if similarity >= p.stop_similarity {
            break;
        }
    }
    Ok(ClniNoise {
        noisy: (0..n).filter(|&i| prev[i]).collect(),
        iterations,
    })
}

fn jaccard(a: &[bool], b: &[bool]) -> f64 {
    let inter = a.iter().zip(b).filter(|(x, y)| **x && **y).count();
    let union = a.iter().zip(b).filter(|(x, y)| **x || **y).count();
    if union == 0 {
        1.0
    } else {
        inter as f64 / union as f64
    }
}

/// Removes the NSBR rows CLNI flags; flagged SBR rows stay.
pub fn apply_clni(d: &Dataset, p: &ClniParams) -> Result<Dataset> {
    d.ensure_training("CLNI filter")?;
    let noise = clni_noise(d, p)?;
    let mut drop = vec![false; d.n_rows()];
    for &i in &noise.noisy {
        drop[i] = d.rows()[i].label == Label::Nsbr;
    }
    let kept = d
        .rows()
        .iter()
        .zip(&drop)
        .filter(|(_, &x)| !x)
        .map(|(r, _)| r.clone())
        .collect();
    d.with_rows(kept)
}

pub fn apply_filter(d: &Dataset, kind: FilterKind, cfg: &FilterConfig) -> Result<Dataset> {
    d.ensure_training("filter")?;
    let mut out = match kind.support() {
        Some(sf) => farsec_with_config(d, sf, cfg)?,
        None => d.clone(),
    };
    if kind.uses_clni() {
        out = apply_clni(&out, &cfg.clni)?;
    }
    Ok(out.with_filter_tag(kind.name()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{Provenance, Row};
    use proptest::prelude::*;

    fn ds(rows: &[(&[f64], bool)]) -> Dataset {
        let width = rows[0].0.len();
        Dataset::new(
            (0..width).map(|j| format!("f{j}")).collect(),
            rows.iter()
                .enumerate()
                .map(|(i, (v, s))| Row {
                    id: format!("r{i}"),
                    values: v.to_vec(),
                    label: Label::from_flag(*s),
                })
                .collect(),
            Provenance::train("t"),
        )
        .unwrap()
    }

    #[test]
    fn report_score_examples() {
        assert!((report_score(&[1.0], &[0.99], 15) - 0.99).abs() < 1e-12);
        assert!((report_score(&[1.0, 2.0], &[0.5, 0.5], 15) - 0.5).abs() < 1e-12);
        let want = 0.81 / (0.81 + 0.01);
        assert!((report_score(&[1.0, 1.0], &[0.9, 0.9], 15) - want).abs() < 1e-12);
        assert!((want - 0.9878).abs() < 1e-4);
        assert_eq!(report_score(&[0.0, 0.0], &[0.9, 0.9], 15), 0.0);
    }

    #[test]
    fn report_score_cap_prefers_frequent_keywords() {
        // Cap of one keeps the keyword with the higher count.
        assert!((report_score(&[1.0, 3.0], &[0.99, 0.2], 1) - 0.2).abs() < 1e-12);
        // Equal counts: lower column wins.
        assert!((report_score(&[2.0, 2.0], &[0.99, 0.2], 1) - 0.99).abs() < 1e-12);
    }

    #[test]
    fn unreachable_threshold_keeps_everything() {
        let d = ds(&[(&[1.0, 0.0], true), (&[1.0, 1.0], false), (&[0.0, 1.0], false)]);
        let out = apply_farsec(&d, SupportFunction::Plain, 1.01).unwrap();
        assert_eq!(out.rows(), d.rows());
    }

    #[test]
    fn sbr_only_dataset_unchanged() {
        let d = ds(&[(&[1.0], true), (&[2.0], true)]);
        assert_eq!(
            apply_farsec(&d, SupportFunction::JalaliSq, 0.75).unwrap().rows(),
            d.rows()
        );
    }

    #[test]
    fn farsec_removes_security_looking_nsbr() {
        // f0 appears only in SBRs, so the NSBR carrying it scores 0.99.
        let d = ds(&[
            (&[1.0, 0.0], true),
            (&[1.0, 0.0], true),
            (&[1.0, 0.0], false),
            (&[0.0, 1.0], false),
            (&[0.0, 1.0], false),
            (&[0.0, 1.0], false),
        ]);
        let out = apply_farsec(&d, SupportFunction::Plain, 0.75).unwrap();
        assert_eq!(out.n_rows(), 5);
        assert_eq!(out.count(Label::Sbr), 2);
        assert!(out.rows().iter().all(|r| r.id != "r2"));
    }

    #[test]
    fn clni_flags_isolated_nsbr() {
        // NSBR at the origin surrounded by five SBRs; NSBR cluster far away.
        let mut rows: Vec<(Vec<f64>, bool)> = vec![(vec![0.0, 0.0], false)];
        for v in [[1.0, 0.0], [0.0, 1.0], [1.0, 1.0], [2.0, 0.0], [0.0, 2.0]] {
            rows.push((v.to_vec(), true));
        }
        for i in 0..8 {
            rows.push((vec![50.0 + i as f64, 50.0], false));
        }
        let refs: Vec<(&[f64], bool)> = rows.iter().map(|(v, s)| (v.as_slice(), *s)).collect();
        let d = ds(&refs);
        let out = apply_clni(&d, &ClniParams::default()).unwrap();
        assert_eq!(out.n_rows(), d.n_rows() - 1);
        assert!(out.rows().iter().all(|r| r.id != "r0"));
    }

    #[test]
    fn clni_keeps_flagged_sbr() {
        let mut rows: Vec<(Vec<f64>, bool)> = vec![(vec![0.0, 0.0], true)];
        for v in [[1.0, 0.0], [0.0, 1.0], [1.0, 1.0], [2.0, 0.0], [0.0, 2.0], [2.0, 2.0]] {
            rows.push((v.to_vec(), false));
        }
        let refs: Vec<(&[f64], bool)> = rows.iter().map(|(v, s)| (v.as_slice(), *s)).collect();
        let d = ds(&refs);
        let noise = clni_noise(&d, &ClniParams::default()).unwrap();
        assert!(noise.noisy.contains(&0));
        let out = apply_clni(&d, &ClniParams::default()).unwrap();
        assert_eq!(out.count(Label::Sbr), 1);
    }

    #[test]
    fn clni_separated_classes_unchanged() {
        let mut rows: Vec<(Vec<f64>, bool)> = Vec::new();
        for i in 0..8 {
            rows.push((vec![i as f64, 0.0], true));
            rows.push((vec![i as f64, 100.0], false));
        }
        let refs: Vec<(&[f64], bool)> = rows.iter().map(|(v, s)| (v.as_slice(), *s)).collect();
        let d = ds(&refs);
        let noise = clni_noise(&d, &ClniParams::default()).unwrap();
        assert!(noise.noisy.is_empty());
        assert_eq!(noise.iterations, 1);
        assert_eq!(apply_clni(&d, &ClniParams::default()).unwrap().rows(), d.rows());
    }

    #[test]
    fn clni_rejects_tiny_sets_and_bad_params() {
        let d = ds(&[(&[1.0], true), (&[2.0], false)]);
        assert!(apply_clni(&d, &ClniParams::default()).is_err());
        let bad = ClniParams {
            noise_threshold: 0.0,
            ..ClniParams::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn train_kind_is_identity() {
        let d = ds(&[(&[1.0], true), (&[2.0], false)]);
        let out = apply_filter(&d, FilterKind::Train, &FilterConfig::default()).unwrap();
        assert_eq!(out.rows(), d.rows());
    }

    #[test]
    fn filter_names_round_trip() {
        for k in FilterKind::ALL {
            assert_eq!(k.name().parse::<FilterKind>().unwrap(), k);
        }
        assert!("farsec3".parse::<FilterKind>().is_err());
    }

    proptest! {
        #[test]
        fn combination_is_monotone(
            s in prop::collection::vec(0.01f64..0.99, 1..10),
            i in 0usize..10,
            bump in 0.0f64..0.5,
        ) {
            let i = i % s.len();
            let mut t = s.clone();
            t[i] = (t[i] + bump).min(0.99);
            prop_assert!(combine(t.iter().copied()) >= combine(s.iter().copied()));
        }

        #[test]
        fn variant_sizes_nest_and_keep_sbrs(
            rows in prop::collection::vec((prop::collection::vec(0u8..3, 5), prop::bool::weighted(0.2)), 12..60),
            threshold in 0.3f64..0.95,
        ) {
            let mut rows = rows;
            rows[0].1 = true;
            rows[1].1 = false;
            let owned: Vec<(Vec<f64>, bool)> = rows.into_iter()
                .map(|(v, s)| (v.into_iter().map(f64::from).collect(), s)).collect();
            let refs: Vec<(&[f64], bool)> = owned.iter().map(|(v, s)| (v.as_slice(), *s)).collect();
            let d = ds(&refs);
            let cfg = FilterConfig { threshold, ..FilterConfig::default() };
            let size = |k| apply_filter(&d, k, &cfg).unwrap();
            let (sq, two, plain) = (size(FilterKind::Farsecsq), size(FilterKind::Farsectwo), size(FilterKind::Farsec));
            prop_assert!(sq.n_rows() <= two.n_rows());
            prop_assert!(two.n_rows() <= plain.n_rows());
            prop_assert!(plain.n_rows() <= d.n_rows());
            for out in [&sq, &two, &plain] {
                prop_assert_eq!(out.count(Label::Sbr), d.count(Label::Sbr));
            }
        }
    }
}
