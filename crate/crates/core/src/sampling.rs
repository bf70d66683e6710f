//! SMOTE hybrid resampling of training data.
//!
//! The majority class is randomly cut down to a target count, then the
//! minority class is topped up with synthetic rows interpolated between a
//! minority row and one of its same-class neighbours.

use std::fmt;
use std::str::FromStr;

use rand::seq::index;
use rand::Rng;

use crate::corpus::{Dataset, Label, Row};
use crate::error::{Error, Result};
use crate::util;

/// How many of the nearest rows are scanned for same-class neighbours.
pub const NEIGHBOR_SCAN_CAP: usize = 20;

/// What the `m` percentage is taken of.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SmoteBasis {
    /// Each class targets `m%` of the input size.
    #[default]
    Pre,
    /// The output as a whole is `m%` of the input size, split evenly.
    Post,
}

impl fmt::Display for SmoteBasis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SmoteBasis::Pre => "pre",
            SmoteBasis::Post => "post",
        })
    }
}

impl FromStr for SmoteBasis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pre" => Ok(SmoteBasis::Pre),
            "post" => Ok(SmoteBasis::Post),
            _ => Err(Error::invalid(format!("unknown SMOTE basis `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SmoteParams {
    /// Same-class neighbours to draw from, 1..=20.
    pub k: usize,
    /// Target size in percent, 50..=400.
    pub m: usize,
    /// Minkowski power, 1..=6.
    pub r: u32,
    pub basis: SmoteBasis,
}

impl Default for SmoteParams {
    fn default() -> Self {
        Self {
            k: 5,
            m: 50,
            r: 2,
            basis: SmoteBasis::Pre,
        }
    }
}

impl SmoteParams {
    pub fn new(k: usize, m: usize, r: u32) -> Result<Self> {
        let p = Self {
            k,
            m,
            r,
            basis: SmoteBasis::Pre,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let check = |name: &'static str, v: f64, lo: f64, hi: f64| {
            if v < lo || v > hi {
                Err(Error::InvalidParam {
                    name: name.to_string(),
                    value: v,
                    reason: format!("must lie in [{lo}, {hi}]"),
                })
            } else {
                Ok(())
            }
        };
        check("k", self.k as f64, 1.0, 20.0)?;
        check("m", self.m as f64, 50.0, 400.0)?;
        check("r", f64::from(self.r), 1.0, 6.0)
    }

    /// Per-class target count for an input of `n` rows.
    pub fn target(&self, n: usize) -> usize {
        let total = self.m as f64 / 100.0 * n as f64;
        match self.basis {
            SmoteBasis::Pre => total.round() as usize,
            SmoteBasis::Post => (total / 2.0).round() as usize,
        }
    }
}

/// `(Σ|aᵢ−bᵢ|^r)^(1/r)`.
pub fn minkowski(a: &[f64], b: &[f64], r: f64) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            got: b.len(),
        });
    }
    if !(r > 0.0) {
        return Err(Error::invalid("Minkowski power must be positive"));
    }
    Ok(minkowski_pow(a, b, r).powf(1.0 / r))
}

/// The sum inside the root; orders points the same way as the distance.
fn minkowski_pow(a: &[f64], b: &[f64], r: f64) -> f64 {
    let int_r = r as i32;
    if f64::from(int_r) == r {
        a.iter().zip(b).map(|(x, y)| (x - y).abs().powi(int_r)).sum()
    } else {
        a.iter().zip(b).map(|(x, y)| (x - y).abs().powf(r)).sum()
    }
}

/// Same-class neighbours of row `x0` in `d`.
///
/// The nearest rows (any class, `x0` excluded, ties by position) are scanned
/// one at a time up to [`NEIGHBOR_SCAN_CAP`]; rows of `x0`'s class are
/// collected until `k` are found. May return fewer than `k`.
pub fn nearest_same_class(d: &Dataset, x0: usize, k: usize, r: f64) -> Vec<usize> {
    let rows = d.rows();
    let target = &rows[x0];
    let mut order: Vec<(f64, usize)> = rows
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != x0)
        .map(|(i, row)| (minkowski_pow(&target.values, &row.values, r), i))
        .collect();
    order.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    order
        .into_iter()
        .take(NEIGHBOR_SCAN_CAP)
        .filter(|&(_, i)| rows[i].label == target.label)
        .map(|(_, i)| i)
        .take(k)
        .collect()
}

/// A point on the segment from `x0` to `z`.
pub fn synthesize<R: Rng + ?Sized>(x0: &[f64], z: &[f64], rng: &mut R) -> Vec<f64> {
    let t: f64 = rng.gen();
    x0.iter().zip(z).map(|(a, b)| a + t * (b - a)).collect()
}

/// Resamples `d` so that both classes end up at the per-class target.
///
/// Original minority rows are always kept. Synthetic rows get ids of the
/// form `smote-<n>` and follow the surviving original rows.
pub fn smote<R: Rng + ?Sized>(d: &Dataset, p: &SmoteParams, rng: &mut R) -> Result<Dataset> {
    d.ensure_training("SMOTE")?;
    p.validate()?;
    let (n_sbr, n_nsbr) = (d.count(Label::Sbr), d.count(Label::Nsbr));
    let minority = if n_sbr <= n_nsbr { Label::Sbr } else { Label::Nsbr };
    if d.count(minority) == 0 {
        return Err(Error::MissingClass(minority));
    }
    let target = p.target(d.n_rows());
    let rows = d.rows();

    let majority_idx: Vec<usize> = (0..rows.len()).filter(|&i| rows[i].label != minority).collect();
    let mut keep = vec![true; rows.len()];
    if majority_idx.len() > target {
        for &i in &majority_idx {
            keep[i] = false;
        }
        for s in index::sample(rng, majority_idx.len(), target) {
            keep[majority_idx[s]] = true;
        }
    }
    let kept: Vec<Row> = rows
        .iter()
        .zip(&keep)
        .filter(|(_, &k)| k)
        .map(|(r, _)| r.clone())
        .collect();
    let reduced = d.with_rows(kept)?;

    let minority_pos: Vec<usize> = (0..reduced.n_rows())
        .filter(|&i| reduced.rows()[i].label == minority)
        .collect();
    let missing = target.saturating_sub(minority_pos.len());
    if missing == 0 {
        return Ok(reduced);
    }

    let r = f64::from(p.r);
    let mut neighbors: Vec<Option<Vec<usize>>> = vec![None; minority_pos.len()];
    let mut out = reduced.rows().to_vec();
    out.reserve(missing);
    for j in 0..missing {
        let pick = rng.gen_range(0..minority_pos.len());
        let x0 = minority_pos[pick];
        let peers = neighbors[pick].get_or_insert_with(|| {
            let near = nearest_same_class(&reduced, x0, p.k, r);
            if near.is_empty() {
                fallback_peer(&reduced, x0, r).into_iter().collect()
            } else {
                near
            }
        });
        let x0_row = &reduced.rows()[x0];
        let z = if peers.is_empty() {
            x0
        } else {
            peers[rng.gen_range(0..peers.len())]
        };
        let values = synthesize(&x0_row.values, &reduced.rows()[z].values, rng);
        out.push(Row {
            id: format!("smote-{j}"),
            values,
            label: minority,
        });
    }
    reduced.with_rows(out)
}

/// Nearest same-class row anywhere, for minority rows with no peer among
/// their nearest [`NEIGHBOR_SCAN_CAP`] rows.
fn fallback_peer(d: &Dataset, x0: usize, r: f64) -> Option<usize> {
    let rows = d.rows();
    let target = &rows[x0];
    rows.iter()
        .enumerate()
        .filter(|(i, row)| *i != x0 && row.label == target.label)
        .map(|(i, row)| (minkowski_pow(&target.values, &row.values, r), i))
        .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)))
        .map(|(_, i)| i)
}

/// [`smote`] driven by a fresh generator seeded with `seed`.
pub fn smote_seeded(d: &Dataset, p: &SmoteParams, seed: u64) -> Result<Dataset> {
    smote(d, p, &mut util::rng(seed))
}
