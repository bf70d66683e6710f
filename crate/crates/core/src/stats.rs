//! Effect size, bootstrap significance and Scott-Knott ranking.
//!
//! Rankings treat larger samples as better: rank 1 holds the groups with the
//! highest medians.

use rand::Rng;

use crate::error::{Error, Result};
use crate::util;

pub const DEFAULT_BOOTSTRAP: usize = 1000;
/// Smallest A12 treated as more than a small effect.
pub const A12_THRESHOLD: f64 = 0.6;
const ALPHA: f64 = 0.05;

/// Probability that a value drawn from `m` beats one drawn from `n`, ties
/// counting half.
pub fn a12(m: &[f64], n: &[f64]) -> Result<f64> {
    if m.is_empty() || n.is_empty() {
        return Err(Error::invalid("A12 needs two nonempty samples"));
    }
    if m.iter().chain(n).any(|v| v.is_nan()) {
        return Err(Error::invalid("A12 samples contain NaN"));
    }
    let mut sorted = n.to_vec();
    sorted.sort_by(f64::total_cmp);
    // Twice the score, kept integral so the result is exact.
    let mut twice: u64 = 0;
    for &x in m {
        let below = sorted.partition_point(|&y| y < x);
        let not_above = sorted.partition_point(|&y| y <= x);
        twice += 2 * below as u64 + (not_above - below) as u64;
    }
    Ok(twice as f64 / (2 * m.len() * n.len()) as f64)
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Median; the mean of the middle pair for even lengths. NaN when empty.
pub fn median(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let h = v.len() / 2;
    if v.len() % 2 == 1 {
        v[h]
    } else {
        (v[h - 1] + v[h]) / 2.0
    }
}

fn variance(xs: &[f64], mu: f64) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    xs.iter().map(|x| (x - mu) * (x - mu)).sum::<f64>() / (xs.len() - 1) as f64
}

/// Welch-style statistic; ±∞ for a nonzero difference with no spread.
fn t_stat(y: &[f64], z: &[f64]) -> f64 {
    let (my, mz) = (mean(y), mean(z));
    let diff = my - mz;
    let se = (variance(y, my) / y.len() as f64 + variance(z, mz) / z.len() as f64).sqrt();
    if se > 0.0 {
        diff / se
    } else if diff == 0.0 {
        0.0
    } else {
        diff.signum() * f64::INFINITY
    }
}

/// Two-sided bootstrap test of equal means.
///
/// Both samples are shifted onto the pooled mean, resampled with replacement
/// `iterations` times, and the share of resampled statistics at least as
/// extreme as the observed one is the p-value. Significant when p < 0.05.
pub fn bootstrap_test(m: &[f64], n: &[f64], iterations: usize, seed: u64) -> Result<bool> {
    if iterations == 0 {
        return Err(Error::invalid("bootstrap needs at least one iteration"));
    }
    if m.is_empty() || n.is_empty() {
        return Err(Error::invalid("bootstrap needs two nonempty samples"));
    }
    let observed = t_stat(m, n).abs();
    let pooled = mean(&[m, n].concat());
    let (mm, mn) = (mean(m), mean(n));
    let ys: Vec<f64> = m.iter().map(|x| x - mm + pooled).collect();
    let zs: Vec<f64> = n.iter().map(|x| x - mn + pooled).collect();
    let mut rng = util::rng(seed);
    let mut yb = vec![0.0; ys.len()];
    let mut zb = vec![0.0; zs.len()];
    let mut extreme = 0usize;
    for _ in 0..iterations {
        for v in yb.iter_mut() {
            *v = ys[rng.gen_range(0..ys.len())];
        }
        for v in zb.iter_mut() {
            *v = zs[rng.gen_range(0..zs.len())];
        }
        if t_stat(&yb, &zb).abs() >= observed {
            extreme += 1;
        }
    }
    Ok((extreme as f64 / iterations as f64) < ALPHA)
}

/// Expected squared shift of the means when `l` is cut at `split`.
pub fn sk_gain(l: &[f64], split: usize) -> f64 {
    debug_assert!(split >= 1 && split < l.len());
    let (m, n) = l.split_at(split);
    let mu = mean(l);
    let ls = l.len() as f64;
    let dm = mean(m) - mu;
    let dn = mean(n) - mu;
    m.len() as f64 / ls * dm * dm + n.len() as f64 / ls * dn * dn
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankEntry {
    pub label: String,
    pub samples: Vec<f64>,
    pub median: f64,
    pub rank: usize,
}

/// Groups in best-first order with contiguous ranks from 1.
#[derive(Debug, Clone, PartialEq)]
pub struct RankTable {
    pub entries: Vec<RankEntry>,
}

impl RankTable {
    pub fn rank_of(&self, label: &str) -> Option<usize> {
        self.entries.iter().find(|e| e.label == label).map(|e| e.rank)
    }

    pub fn n_ranks(&self) -> usize {
        self.entries.iter().map(|e| e.rank).max().unwrap_or(0)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SkConfig {
    pub bootstrap_iterations: usize,
    pub a12_threshold: f64,
}

impl Default for SkConfig {
    fn default() -> Self {
        Self {
            bootstrap_iterations: DEFAULT_BOOTSTRAP,
            a12_threshold: A12_THRESHOLD,
        }
    }
}

pub fn scott_knott(groups: &[(String, Vec<f64>)], seed: u64) -> Result<RankTable> {
    scott_knott_with(groups, seed, &SkConfig::default())
}

/// Scott-Knott clustering of groups into statistically distinct ranks.
///
/// Groups are ordered by median, best first. The cut maximising
/// [`sk_gain`] is kept only if the bootstrap finds the two sides
/// significantly different and the better side's A12 reaches the
/// threshold; each kept side is then split again.
pub fn scott_knott_with(groups: &[(String, Vec<f64>)], seed: u64, cfg: &SkConfig) -> Result<RankTable> {
    if groups.is_empty() {
        return Err(Error::invalid("Scott-Knott needs at least one group"));
    }
    if let Some((label, _)) = groups.iter().find(|(_, s)| s.is_empty()) {
        return Err(Error::invalid(format!("group `{label}` has no samples")));
    }
    if groups.iter().any(|(_, s)| s.iter().any(|v| !v.is_finite())) {
        return Err(Error::invalid("Scott-Knott samples must be finite"));
    }
    // Work relative to the smallest value so shifting every sample by a
    // constant leaves integer-valued inputs bit-identical.
    let floor = groups
        .iter()
        .flat_map(|(_, s)| s.iter().copied())
        .fold(f64::INFINITY, f64::min);
    let mut order: Vec<(String, Vec<f64>, Vec<f64>, f64)> = groups
        .iter()
        .map(|(label, s)| {
            let mut shifted: Vec<f64> = s.iter().map(|v| v - floor).collect();
            shifted.sort_by(f64::total_cmp);
            let med = median(&shifted);
            (label.clone(), s.clone(), shifted, med)
        })
        .collect();
    order.sort_by(|a, b| {
        b.3.total_cmp(&a.3)
            .then_with(|| cmp_samples(&b.2, &a.2))
            .then_with(|| a.0.cmp(&b.0))
    });
    let shifted: Vec<&[f64]> = order.iter().map(|g| g.2.as_slice()).collect();
    let mut cuts = Vec::new();
    split(&shifted, 0, shifted.len(), seed, cfg, &mut cuts)?;
    cuts.sort_unstable();

    let mut rank = 1;
    let mut entries = Vec::with_capacity(order.len());
    for (i, (label, samples, _, _)) in order.into_iter().enumerate() {
        if cuts.contains(&i) {
            rank += 1;
        }
        entries.push(RankEntry {
            median: median(&samples),
            label,
            samples,
            rank,
        });
    }
    Ok(RankTable { entries })
}

fn cmp_samples(a: &[f64], b: &[f64]) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        let o = x.total_cmp(y);
        if o.is_ne() {
            return o;
        }
    }
    a.len().cmp(&b.len())
}

fn split(groups: &[&[f64]], lo: usize, hi: usize, seed: u64, cfg: &SkConfig, cuts: &mut Vec<usize>) -> Result<()> {
    if hi - lo < 2 {
        return Ok(());
    }
    let flat: Vec<f64> = groups[lo..hi].iter().flat_map(|g| g.iter().copied()).collect();
    let mut best: Option<(f64, usize, usize)> = None;
    let mut offset = 0;
    for cut in lo + 1..hi {
        offset += groups[cut - 1].len();
        let gain = sk_gain(&flat, offset);
        if best.is_none_or(|(g, _, _)| gain > g) {
            best = Some((gain, cut, offset));
        }
    }
    let (_, cut, offset) = best.expect("at least one cut");
    let (high, low) = flat.split_at(offset);
    let stream = ((lo as u64) << 32) | hi as u64;
    let distinct = bootstrap_test(high, low, cfg.bootstrap_iterations, util::derive_seed(seed, stream))?
        && a12(high, low)? >= cfg.a12_threshold;
    if distinct {
        cuts.push(cut);
        split(groups, lo, cut, seed, cfg, cuts)?;
        split(groups, cut, hi, seed, cfg, cuts)?;
    }
    Ok(())
}
