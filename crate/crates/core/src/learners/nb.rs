use super::{NbParams, TrainSet};
use crate::corpus::Label;

/// Gaussian naive Bayes. Class variances are widened by `var_smoothing`
/// times the largest feature variance of the training data.
#[derive(Debug, Clone)]
pub(crate) struct GaussianNb {
    /// Indexed by `Label::flag()`.
    log_prior: [f64; 2],
    mean: [Vec<f64>; 2],
    var: [Vec<f64>; 2],
}

/// Keeps variances positive when every feature is constant.
const ABSOLUTE_FLOOR: f64 = 1e-300;

fn moments<'a>(rows: impl Iterator<Item = &'a Vec<f64>> + Clone, p: usize) -> (Vec<f64>, Vec<f64>, usize) {
    let mut mean = vec![0.0; p];
    let mut n = 0usize;
    for r in rows.clone() {
        n += 1;
        for (m, v) in mean.iter_mut().zip(r) {
            *m += v;
        }
    }
    mean.iter_mut().for_each(|m| *m /= n as f64);
    let mut var = vec![0.0; p];
    for r in rows {
        for ((s, v), m) in var.iter_mut().zip(r).zip(&mean) {
            *s += (v - m) * (v - m);
        }
    }
    var.iter_mut().for_each(|s| *s /= n as f64);
    (mean, var, n)
}

impl GaussianNb {
    pub fn fit(ts: &TrainSet, p: &NbParams) -> Self {
        let width = ts.n_features;
        let (_, all_var, n) = moments(ts.x.iter(), width);
        let eps = p.var_smoothing * all_var.iter().copied().fold(0.0, f64::max);
        let class = |label: Label| {
            let rows =
                ts.x.iter()
                    .zip(&ts.y)
                    .filter(move |(_, y)| **y == label)
                    .map(|(x, _)| x);
            let (mean, mut var, count) = moments(rows, width);
            var.iter_mut().for_each(|v| *v = (*v + eps).max(ABSOLUTE_FLOOR));
            (mean, var, (count as f64 / n as f64).ln())
        };
        let (m0, v0, p0) = class(Label::Nsbr);
        let (m1, v1, p1) = class(Label::Sbr);
        Self {
            log_prior: [p0, p1],
            mean: [m0, m1],
            var: [v0, v1],
        }
    }

    fn log_joint(&self, c: usize, x: &[f64]) -> f64 {
        let mut s = self.log_prior[c];
        for ((v, m), var) in x.iter().zip(&self.mean[c]).zip(&self.var[c]) {
            s -= 0.5 * ((std::f64::consts::TAU * var).ln() + (v - m) * (v - m) / var);
        }
        s
    }

    pub fn predict(&self, x: &[f64]) -> Label {
        Label::from_flag(self.log_joint(1, x) >= self.log_joint(0, x))
    }
}
