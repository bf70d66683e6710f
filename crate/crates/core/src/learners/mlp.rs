use rand::seq::SliceRandom;
use rand::Rng;

use super::lr::sigmoid;
use super::scale::Standardizer;
use super::{MlpParams, TrainSet};
use crate::corpus::Label;
use crate::neighbors::SparseMatrix;
use crate::util;

pub(crate) const HIDDEN: usize = 100;
const BATCH: usize = 200;
const TOL: f64 = 1e-4;

/// Weights of a one-hidden-layer network. `w1` is stored feature-major:
/// entries `j·HIDDEN .. (j+1)·HIDDEN` connect feature `j` to every unit.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Net {
    pub w1: Vec<f64>,
    pub b1: Vec<f64>,
    pub w2: Vec<f64>,
    pub b2: f64,
}

/// Standardised inputs kept sparse.
pub(crate) struct Inputs<'a> {
    pub x: &'a SparseMatrix,
    pub sc: &'a Standardizer,
    pub y: &'a [f64],
}

impl Net {
    fn init<R: Rng>(p: usize, rng: &mut R) -> Self {
        let b1_bound = (6.0 / (p + HIDDEN) as f64).sqrt();
        let b2_bound = (2.0 / (HIDDEN + 1) as f64).sqrt();
        let mut u = |b: f64| rng.gen_range(-b..b);
        Self {
            w1: (0..p * HIDDEN).map(|_| u(b1_bound)).collect(),
            b1: (0..HIDDEN).map(|_| u(b1_bound)).collect(),
            w2: (0..HIDDEN).map(|_| u(b2_bound)).collect(),
            b2: u(b2_bound),
        }
    }

    fn zeros_like(&self) -> Self {
        Self {
            w1: vec![0.0; self.w1.len()],
            b1: vec![0.0; HIDDEN],
            w2: vec![0.0; HIDDEN],
            b2: 0.0,
        }
    }

    /// Hidden pre-activation offset `b1 − Σⱼ μⱼ·W1ⱼ/σⱼ`.
    fn offset(&self, sc: &Standardizer) -> Vec<f64> {
        let mut out = self.b1.clone();
        for (j, (m, s)) in sc.mean.iter().zip(&sc.inv_sd).enumerate() {
            let c = m * s;
            if c != 0.0 {
                for (o, w) in out.iter_mut().zip(&self.w1[j * HIDDEN..(j + 1) * HIDDEN]) {
                    *o -= c * w;
                }
            }
        }
        out
    }

    fn hidden(&self, nz: impl Iterator<Item = (usize, f64)>, sc: &Standardizer, offset: &[f64], a: &mut [f64]) {
        a.copy_from_slice(offset);
        for (j, v) in nz {
            let z = v * sc.inv_sd[j];
            for (h, w) in a.iter_mut().zip(&self.w1[j * HIDDEN..(j + 1) * HIDDEN]) {
                *h += z * w;
            }
        }
    }

    fn output(&self, a: &[f64]) -> f64 {
        a.iter().zip(&self.w2).map(|(a, w)| a.max(0.0) * w).sum::<f64>() + self.b2
    }

    fn zero(&mut self) {
        self.w1.fill(0.0);
        self.b1.fill(0.0);
        self.w2.fill(0.0);
        self.b2 = 0.0;
    }

    fn sq_norm(&self) -> f64 {
        let w1: f64 = self.w1.iter().map(|w| w * w).sum();
        w1 + self.w2.iter().map(|w| w * w).sum::<f64>()
    }

    /// Mean cross-entropy plus `alpha·|W|²/(2·batch)` over `batch`, and its
    /// gradient.
    #[cfg(test)]
    pub fn loss_grad(&self, data: &Inputs<'_>, batch: &[usize], alpha: f64) -> (f64, Net) {
        let mut g = self.zeros_like();
        let loss = self.loss_grad_into(data, batch, alpha, &mut g);
        (loss, g)
    }

    fn loss_grad_into(&self, data: &Inputs<'_>, batch: &[usize], alpha: f64, g: &mut Net) -> f64 {
        let bs = batch.len() as f64;
        let offset = self.offset(data.sc);
        g.zero();
        let mut a = vec![0.0; HIDDEN];
        let mut loss = 0.0;
        let mut delta_sum = vec![0.0; HIDDEN];
        for &i in batch {
            let row = data.x.row(i);
            self.hidden(row.iter(), data.sc, &offset, &mut a);
            let out = sigmoid(self.output(&a));
            let y = data.y[i];
            let o = out.clamp(1e-15, 1.0 - 1e-15);
            loss -= y * o.ln() + (1.0 - y) * (1.0 - o).ln();
            let d_out = (out - y) / bs;
            g.b2 += d_out;
            for k in 0..HIDDEN {
                if a[k] > 0.0 {
                    g.w2[k] += d_out * a[k];
                    let dh = d_out * self.w2[k];
                    delta_sum[k] += dh;
                    a[k] = dh;
                } else {
                    a[k] = 0.0;
                }
            }
            for (j, v) in row.iter() {
                let z = v * data.sc.inv_sd[j];
                for (gw, dh) in g.w1[j * HIDDEN..(j + 1) * HIDDEN].iter_mut().zip(&a) {
                    *gw += z * dh;
                }
            }
        }
        g.b1.copy_from_slice(&delta_sum);
        for (j, (m, s)) in data.sc.mean.iter().zip(&data.sc.inv_sd).enumerate() {
            let c = m * s;
            if c != 0.0 {
                for (gw, d) in g.w1[j * HIDDEN..(j + 1) * HIDDEN].iter_mut().zip(&delta_sum) {
                    *gw -= c * d;
                }
            }
        }
        let decay = alpha / bs;
        for (gw, w) in g.w1.iter_mut().zip(&self.w1) {
            *gw += decay * w;
        }
        for (gw, w) in g.w2.iter_mut().zip(&self.w2) {
            *gw += decay * w;
        }
        loss / bs + 0.5 * alpha * self.sq_norm() / bs
    }

    fn step(&mut self, velocity: &mut Net, grad: &Net, lr: f64, momentum: f64) {
        sgd(&mut self.w1, &mut velocity.w1, &grad.w1, lr, momentum);
        sgd(&mut self.b1, &mut velocity.b1, &grad.b1, lr, momentum);
        sgd(&mut self.w2, &mut velocity.w2, &grad.w2, lr, momentum);
        velocity.b2 = momentum * velocity.b2 - lr * grad.b2;
        self.b2 += velocity.b2;
    }
}

fn sgd(w: &mut [f64], v: &mut [f64], g: &[f64], lr: f64, momentum: f64) {
    for ((w, v), g) in w.iter_mut().zip(v.iter_mut()).zip(g) {
        *v = momentum * *v - lr * g;
        *w += *v;
    }
}

/// One hidden layer of ReLU units and a logistic output, trained by
/// minibatch SGD with momentum. The step size decays per epoch as
/// `lr / (epoch + 1)^power_t`; training stops early once the epoch loss has
/// failed to improve by `1e-4` for more than `n_iter_no_change` epochs.
#[derive(Debug, Clone)]
pub(crate) struct Mlp {
    net: Net,
    sc: Standardizer,
    offset: Vec<f64>,
    #[cfg_attr(not(test), allow(dead_code))]
    epochs: usize,
}

impl Mlp {
    pub fn fit(ts: &TrainSet, p: &MlpParams, seed: u64) -> Self {
        let sc = Standardizer::fit(ts);
        let x = sc.sparse(&ts.x);
        let y = ts.targets();
        let data = Inputs { x: &x, sc: &sc, y: &y };
        let mut rng = util::rng(seed);
        let mut net = Net::init(ts.n_features, &mut rng);
        let mut velocity = net.zeros_like();
        let mut grad = net.zeros_like();
        let mut order: Vec<usize> = (0..ts.len()).collect();
        let batch = BATCH.min(ts.len());

        let mut best_loss = f64::INFINITY;
        let mut stale = 0;
        let mut last_good = net.clone();
        let mut epochs = 0;
        for epoch in 0..p.max_iter {
            order.shuffle(&mut rng);
            let lr = p.learning_rate_init / ((epoch + 1) as f64).powf(p.power_t);
            let mut total = 0.0;
            for chunk in order.chunks(batch) {
                let loss = net.loss_grad_into(&data, chunk, p.alpha, &mut grad);
                total += loss * chunk.len() as f64;
                net.step(&mut velocity, &grad, lr, p.momentum);
            }
            epochs = epoch + 1;
            let loss = total / ts.len() as f64;
            if !loss.is_finite() || net.w2.iter().any(|w| !w.is_finite()) {
                net = last_good;
                break;
            }
            last_good.clone_from(&net);
            if loss > best_loss - TOL {
                stale += 1;
            } else {
                stale = 0;
            }
            best_loss = best_loss.min(loss);
            if stale > p.n_iter_no_change {
                break;
            }
        }
        let offset = net.offset(&sc);
        Self {
            net,
            sc,
            offset,
            epochs,
        }
    }

    pub fn predict(&self, x: &[f64]) -> Label {
        let mut a = vec![0.0; HIDDEN];
        let nz = x.iter().enumerate().filter(|(_, v)| **v != 0.0).map(|(j, &v)| (j, v));
        self.net.hidden(nz, &self.sc, &self.offset, &mut a);
        Label::from_flag(self.net.output(&a) >= 0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::super::testdata::blobs;
    use super::super::TrainSet;
    use super::*;

    fn setup(seed: u64) -> (TrainSet, Standardizer, SparseMatrix, Vec<f64>, Net) {
        let ts = TrainSet::canonical(&blobs(6, 6, 3, 1.0, seed));
        let sc = Standardizer::fit(&ts);
        let x = sc.sparse(&ts.x);
        let y = ts.targets();
        let net = Net::init(3, &mut util::rng(seed));
        (ts, sc, x, y, net)
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let (_, sc, x, y, net) = setup(1);
        let data = Inputs { x: &x, sc: &sc, y: &y };
        let batch: Vec<usize> = (0..y.len()).collect();
        let alpha = 1e-3;
        let (_, g) = net.loss_grad(&data, &batch, alpha);
        let h = 1e-6;
        let mut checked = 0;
        for idx in (0..net.w1.len()).step_by(7) {
            let mut up = net.clone();
            up.w1[idx] += h;
            let mut down = net.clone();
            down.w1[idx] -= h;
            let numeric = (up.loss_grad(&data, &batch, alpha).0 - down.loss_grad(&data, &batch, alpha).0) / (2.0 * h);
            let analytic = g.w1[idx];
            let scale = numeric.abs().max(analytic.abs()).max(1e-3);
            assert!(
                (numeric - analytic).abs() / scale < 1e-4,
                "w1[{idx}]: {numeric} vs {analytic}"
            );
            checked += 1;
        }
        for k in 0..HIDDEN {
            let mut up = net.clone();
            up.b1[k] += h;
            let mut down = net.clone();
            down.b1[k] -= h;
            let numeric = (up.loss_grad(&data, &batch, alpha).0 - down.loss_grad(&data, &batch, alpha).0) / (2.0 * h);
            let scale = numeric.abs().max(g.b1[k].abs()).max(1e-3);
            assert!((numeric - g.b1[k]).abs() / scale < 1e-4);
        }
        assert!(checked > 10);
    }

    #[test]
    fn one_step_on_one_example_lowers_its_loss() {
        let (_, sc, x, y, mut net) = setup(2);
        let data = Inputs { x: &x, sc: &sc, y: &y };
        let one = [3usize];
        let (before, g) = net.loss_grad(&data, &one, 1e-4);
        let mut v = net.zeros_like();
        net.step(&mut v, &g, 1e-3, 0.9);
        let (after, _) = net.loss_grad(&data, &one, 1e-4);
        assert!(after < before);
    }

    #[test]
    fn fit_is_deterministic() {
        let ts = TrainSet::canonical(&blobs(10, 20, 3, 1.5, 5));
        let p = MlpParams {
            alpha: 1e-4,
            learning_rate_init: 0.005,
            power_t: 0.5,
            max_iter: 50,
            momentum: 0.9,
            n_iter_no_change: 10,
        };
        let a = Mlp::fit(&ts, &p, 7);
        let b = Mlp::fit(&ts, &p, 7);
        assert_eq!(a.net, b.net);
        assert!(a.epochs <= 50);
    }
}
