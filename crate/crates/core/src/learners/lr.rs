use super::scale::Standardizer;
use super::{LrParams, TrainSet};
use crate::corpus::Label;
use crate::neighbors::SparseMatrix;

/// L2-regularised logistic regression on standardised features, fitted by
/// batch gradient descent with step `1/L` for an estimated Lipschitz
/// constant `L` of the gradient.
#[derive(Debug, Clone)]
pub(crate) struct Logistic {
    /// Weights on raw features (`wⱼ/σⱼ`).
    raw_w: Vec<f64>,
    bias: f64,
    /// Weights in standardised space.
    #[cfg_attr(not(test), allow(dead_code))]
    w: Vec<f64>,
}

const GRAD_TOL: f64 = 1e-6;

pub(crate) fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

struct Problem<'a> {
    x: &'a SparseMatrix,
    sc: &'a Standardizer,
}

impl Problem<'_> {
    /// `Zw + b` for every row, with `Z` the standardised design matrix.
    fn scores(&self, w: &[f64], b: f64, out: &mut [f64]) {
        let u: Vec<f64> = w.iter().zip(&self.sc.inv_sd).map(|(w, s)| w * s).collect();
        let offset: f64 = u.iter().zip(&self.sc.mean).map(|(u, m)| u * m).sum();
        for (i, o) in out.iter_mut().enumerate() {
            *o = self.x.row(i).iter().map(|(j, v)| v * u[j]).sum::<f64>() - offset + b;
        }
    }

    /// `Zᵀr`.
    fn transpose_mul(&self, r: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|o| *o = 0.0);
        for (i, ri) in r.iter().enumerate() {
            for (j, v) in self.x.row(i).iter() {
                out[j] += v * ri;
            }
        }
        let total: f64 = r.iter().sum();
        for ((o, m), s) in out.iter_mut().zip(&self.sc.mean).zip(&self.sc.inv_sd) {
            *o = (*o - m * total) * s;
        }
    }

    /// Largest eigenvalue of `[Z 1]ᵀ[Z 1] / n` by power iteration.
    fn top_eigenvalue(&self) -> f64 {
        let (n, p) = (self.x.n_rows(), self.x.n_cols());
        let mut v = vec![1.0 / ((p + 1) as f64).sqrt(); p + 1];
        let mut zv = vec![0.0; n];
        let mut back = vec![0.0; p];
        let mut lambda = 1.0;
        for _ in 0..50 {
            self.scores(&v[..p], v[p], &mut zv);
            self.transpose_mul(&zv, &mut back);
            let mut next: Vec<f64> = back.iter().map(|b| b / n as f64).collect();
            next.push(zv.iter().sum::<f64>() / n as f64);
            let norm = next.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm == 0.0 {
                break;
            }
            lambda = norm;
            v = next.into_iter().map(|x| x / norm).collect();
        }
        lambda
    }
}

impl Logistic {
    pub fn fit(ts: &TrainSet, p: &LrParams) -> Self {
        let sc = Standardizer::fit(ts);
        let x = sc.sparse(&ts.x);
        let prob = Problem { x: &x, sc: &sc };
        let (n, width) = (ts.len(), ts.n_features);
        let y = ts.targets();
        let reg = 1.0 / (p.c * n as f64);
        let lipschitz = 1.1 * prob.top_eigenvalue() / 4.0 + reg;
        let step = 1.0 / lipschitz;

        let mut w = vec![0.0; width];
        let mut b = 0.0;
        let mut z = vec![0.0; n];
        let mut grad = vec![0.0; width];
        let mut iterations = 0;
        for it in 0..p.max_iter {
            prob.scores(&w, b, &mut z);
            let r: Vec<f64> = z.iter().zip(&y).map(|(z, y)| (sigmoid(*z) - y) / n as f64).collect();
            prob.transpose_mul(&r, &mut grad);
            for (g, wj) in grad.iter_mut().zip(&w) {
                *g += reg * wj;
            }
            let gb: f64 = r.iter().sum();
            let norm = (grad.iter().map(|g| g * g).sum::<f64>() + gb * gb).sqrt();
            iterations = it;
            if norm < GRAD_TOL {
                break;
            }
            for (wj, g) in w.iter_mut().zip(&grad) {
                *wj -= step * g;
            }
            b -= step * gb;
            iterations = it + 1;
        }
        if p.verbose > 0 {
            log::debug!("logistic regression stopped after {iterations} iterations");
        }
        let raw_w: Vec<f64> = w.iter().zip(&sc.inv_sd).map(|(w, s)| w * s).collect();
        let offset: f64 = raw_w.iter().zip(&sc.mean).map(|(u, m)| u * m).sum();
        Self {
            raw_w,
            bias: b - offset,
            w,
        }
    }

    pub fn decision(&self, x: &[f64]) -> f64 {
        x.iter().zip(&self.raw_w).map(|(a, b)| a * b).sum::<f64>() + self.bias
    }

    pub fn predict(&self, x: &[f64]) -> Label {
        Label::from_flag(self.decision(x) >= 0.0)
    }

    #[cfg(test)]
    pub fn weight_norm(&self) -> f64 {
        self.w.iter().map(|w| w * w).sum::<f64>().sqrt()
    }
}
