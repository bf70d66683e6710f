//! Per-feature standardisation applied lazily to sparse rows.
//!
//! For a weight matrix `W` (one row of outputs per feature) the
//! standardised product is `Σⱼ xⱼ·Wⱼ/σⱼ − Σⱼ μⱼ·Wⱼ/σⱼ`, so only the nonzero
//! entries of `x` need to be visited once the offset has been computed.

use super::TrainSet;
use crate::neighbors::SparseMatrix;

#[derive(Debug, Clone)]
pub(crate) struct Standardizer {
    pub mean: Vec<f64>,
    /// `1/σ`, with constant columns left unscaled.
    pub inv_sd: Vec<f64>,
}

impl Standardizer {
    pub fn fit(ts: &TrainSet) -> Self {
        let p = ts.n_features;
        let n = ts.len() as f64;
        let mut mean = vec![0.0; p];
        for row in &ts.x {
            for (m, v) in mean.iter_mut().zip(row) {
                *m += v;
            }
        }
        mean.iter_mut().for_each(|m| *m /= n);
        let mut var = vec![0.0; p];
        for row in &ts.x {
            for ((s, v), m) in var.iter_mut().zip(row).zip(&mean) {
                *s += (v - m) * (v - m);
            }
        }
        let inv_sd = var
            .into_iter()
            .map(|s| {
                let sd = (s / n).sqrt();
                if sd > 1e-12 {
                    1.0 / sd
                } else {
                    1.0
                }
            })
            .collect();
        Self { mean, inv_sd }
    }

    pub fn sparse(&self, rows: &[Vec<f64>]) -> SparseMatrix {
        SparseMatrix::from_dense(rows.iter().map(Vec::as_slice), self.mean.len())
    }

    /// Standardised dense copy of `x`.
    #[cfg(test)]
    pub fn transform(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .zip(&self.mean)
            .zip(&self.inv_sd)
            .map(|((v, m), s)| (v - m) * s)
            .collect()
    }
}
