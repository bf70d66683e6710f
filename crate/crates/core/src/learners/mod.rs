//! The five classifiers behind one train/predict interface.
//!
//! Every learner sorts its training rows into a canonical order before any
//! seeded randomness is drawn, so a model depends on the set of rows and the
//! seed but not on row order.

mod knn;
mod lr;
mod mlp;
mod nb;
mod params;
mod rf;
mod scale;

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::corpus::{Dataset, Label};
use crate::error::{Error, Result};

pub use params::{
    default_params, param_space, seed_point, smote_space, HyperParams, KnnParams, LrParams, MlpParams, NbParams,
    RfParams,
};
pub use rf::bootstrap_indices;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ClassifierKind {
    Rf,
    Nb,
    Lr,
    Mlp,
    Knn,
}

impl ClassifierKind {
    pub const ALL: [ClassifierKind; 5] = [
        ClassifierKind::Rf,
        ClassifierKind::Nb,
        ClassifierKind::Lr,
        ClassifierKind::Mlp,
        ClassifierKind::Knn,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ClassifierKind::Rf => "RF",
            ClassifierKind::Nb => "NB",
            ClassifierKind::Lr => "LR",
            ClassifierKind::Mlp => "MLP",
            ClassifierKind::Knn => "KNN",
        }
    }
}

impl fmt::Display for ClassifierKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ClassifierKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ClassifierKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::invalid(format!("unknown learner `{s}`")))
    }
}

#[derive(Debug, Clone)]
enum Inner {
    Rf(rf::Forest),
    Nb(nb::GaussianNb),
    Lr(lr::Logistic),
    Mlp(mlp::Mlp),
    Knn(knn::Knn),
}

/// A trained classifier.
#[derive(Debug, Clone)]
pub struct Model {
    kind: ClassifierKind,
    n_features: usize,
    inner: Inner,
}

impl Model {
    pub fn kind(&self) -> ClassifierKind {
        self.kind
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn predict(&self, x: &[f64]) -> Result<Label> {
        if x.len() != self.n_features {
            return Err(Error::DimensionMismatch {
                expected: self.n_features,
                got: x.len(),
            });
        }
        Ok(match &self.inner {
            Inner::Rf(m) => m.predict(x),
            Inner::Nb(m) => m.predict(x),
            Inner::Lr(m) => m.predict(x),
            Inner::Mlp(m) => m.predict(x),
            Inner::Knn(m) => m.predict(x),
        })
    }

    pub fn predict_batch(&self, d: &Dataset) -> Result<Vec<Label>> {
        if d.n_features() != self.n_features {
            return Err(Error::DimensionMismatch {
                expected: self.n_features,
                got: d.n_features(),
            });
        }
        d.rows().par_iter().map(|r| self.predict(&r.values)).collect()
    }
}

/// Training rows in canonical order.
pub(crate) struct TrainSet {
    pub x: Vec<Vec<f64>>,
    pub y: Vec<Label>,
    pub n_features: usize,
}

impl TrainSet {
    fn canonical(d: &Dataset) -> Self {
        let mut order: Vec<usize> = (0..d.n_rows()).collect();
        let rows = d.rows();
        order.sort_by(|&a, &b| {
            let (ra, rb) = (&rows[a], &rows[b]);
            ra.values
                .iter()
                .zip(&rb.values)
                .map(|(x, y)| x.total_cmp(y))
                .find(|o| o.is_ne())
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(ra.label.cmp(&rb.label))
        });
        Self {
            x: order.iter().map(|&i| rows[i].values.clone()).collect(),
            y: order.iter().map(|&i| rows[i].label).collect(),
            n_features: d.n_features(),
        }
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn targets(&self) -> Vec<f64> {
        self.y.iter().map(|l| f64::from(l.flag())).collect()
    }
}

/// Fits the learner selected by `hp` to `d`.
pub fn train(hp: &HyperParams, d: &Dataset, seed: u64) -> Result<Model> {
    hp.validate()?;
    d.ensure_both_classes()?;
    let ts = TrainSet::canonical(d);
    let inner = match hp {
        HyperParams::Rf(p) => Inner::Rf(rf::Forest::fit(&ts, p, seed)),
        HyperParams::Nb(p) => Inner::Nb(nb::GaussianNb::fit(&ts, p)),
        HyperParams::Lr(p) => Inner::Lr(lr::Logistic::fit(&ts, p)),
        HyperParams::Mlp(p) => Inner::Mlp(mlp::Mlp::fit(&ts, p, seed)),
        HyperParams::Knn(p) => Inner::Knn(knn::Knn::fit(&ts, p)),
    };
    Ok(Model {
        kind: hp.kind(),
        n_features: d.n_features(),
        inner,
    })
}
