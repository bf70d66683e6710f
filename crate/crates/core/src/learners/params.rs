use std::fmt;

use super::ClassifierKind;
use crate::error::{Error, Result};
use crate::tuner::{Dimension, ParamSpace};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RfParams {
    pub n_estimators: usize,
    pub min_samples_leaf: usize,
    pub min_samples_split: usize,
    /// `None` grows trees without a leaf budget.
    pub max_leaf_nodes: Option<usize>,
    /// Fraction of columns tried per split; `None` means `sqrt(p)` columns.
    pub max_features: Option<f64>,
    pub max_depth: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NbParams {
    pub var_smoothing: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LrParams {
    /// Inverse regularisation strength.
    pub c: f64,
    pub max_iter: usize,
    /// Logging verbosity; has no effect on the fit.
    pub verbose: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MlpParams {
    pub alpha: f64,
    pub learning_rate_init: f64,
    pub power_t: f64,
    pub max_iter: usize,
    pub momentum: f64,
    pub n_iter_no_change: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KnnParams {
    /// Index granularity; does not change predictions.
    pub leaf_size: usize,
    pub n_neighbors: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HyperParams {
    Rf(RfParams),
    Nb(NbParams),
    Lr(LrParams),
    Mlp(MlpParams),
    Knn(KnnParams),
}

pub fn default_params(kind: ClassifierKind) -> HyperParams {
    match kind {
        ClassifierKind::Rf => HyperParams::Rf(RfParams {
            n_estimators: 10,
            min_samples_leaf: 1,
            min_samples_split: 2,
            max_leaf_nodes: None,
            max_features: None,
            max_depth: None,
        }),
        ClassifierKind::Nb => HyperParams::Nb(NbParams { var_smoothing: 1e-9 }),
        ClassifierKind::Lr => HyperParams::Lr(LrParams {
            c: 1.0,
            max_iter: 100,
            verbose: 0,
        }),
        ClassifierKind::Mlp => HyperParams::Mlp(MlpParams {
            alpha: 1e-4,
            learning_rate_init: 0.001,
            power_t: 0.5,
            max_iter: 200,
            momentum: 0.9,
            n_iter_no_change: 10,
        }),
        ClassifierKind::Knn => HyperParams::Knn(KnnParams {
            leaf_size: 30,
            n_neighbors: 5,
        }),
    }
}

/// Tuning ranges, in the order of [`HyperParams::to_vector`].
pub fn param_space(kind: ClassifierKind) -> ParamSpace {
    let dims = match kind {
        ClassifierKind::Rf => vec![
            Dimension::integer("n_estimators", 10.0, 150.0),
            Dimension::integer("min_samples_leaf", 1.0, 20.0),
            Dimension::integer("min_samples_split", 2.0, 20.0),
            Dimension::integer("max_leaf_nodes", 2.0, 50.0),
            Dimension::real("max_features", 0.01, 1.0),
            Dimension::integer("max_depth", 1.0, 10.0),
        ],
        ClassifierKind::Nb => vec![Dimension::real("var_smoothing", 0.0, 1.0)],
        ClassifierKind::Lr => vec![
            Dimension::real("C", 1.0, 10.0),
            Dimension::integer("max_iter", 50.0, 200.0),
            Dimension::integer("verbose", 0.0, 10.0),
        ],
        ClassifierKind::Mlp => vec![
            Dimension::real("alpha", 1e-4, 1e-3),
            Dimension::real("learning_rate_init", 0.001, 0.01),
            Dimension::real("power_t", 0.1, 1.0),
            Dimension::integer("max_iter", 50.0, 300.0),
            Dimension::real("momentum", 0.1, 1.0),
            Dimension::integer("n_iter_no_change", 1.0, 100.0),
        ],
        ClassifierKind::Knn => vec![
            Dimension::integer("leaf_size", 10.0, 100.0),
            Dimension::integer("n_neighbors", 1.0, 10.0),
        ],
    };
    ParamSpace::new(dims).expect("static space is well formed")
}

/// SMOTE knobs `k`, `m`, `r`.
pub fn smote_space() -> ParamSpace {
    ParamSpace::new(vec![
        Dimension::integer("k", 1.0, 20.0),
        Dimension::integer("m", 50.0, 400.0),
        Dimension::integer("r", 1.0, 6.0),
    ])
    .expect("static space is well formed")
}

/// The defaults as a point of the tuning space. Random forest defaults
/// partly lie outside the space (unbounded trees, `sqrt` columns), so the
/// nearest in-range settings stand in for them.
pub fn seed_point(kind: ClassifierKind, n_features: usize) -> Vec<f64> {
    match default_params(kind) {
        HyperParams::Rf(p) => {
            let p_f = n_features.max(1) as f64;
            let frac = (p_f.sqrt().floor().max(1.0) / p_f).clamp(0.01, 1.0);
            vec![
                p.n_estimators as f64,
                p.min_samples_leaf as f64,
                p.min_samples_split as f64,
                50.0,
                frac,
                10.0,
            ]
        }
        hp => hp.to_vector().expect("in-range defaults"),
    }
}

fn as_count(v: f64) -> usize {
    v.round().max(0.0) as usize
}

impl HyperParams {
    pub fn kind(&self) -> ClassifierKind {
        match self {
            HyperParams::Rf(_) => ClassifierKind::Rf,
            HyperParams::Nb(_) => ClassifierKind::Nb,
            HyperParams::Lr(_) => ClassifierKind::Lr,
            HyperParams::Mlp(_) => ClassifierKind::Mlp,
            HyperParams::Knn(_) => ClassifierKind::Knn,
        }
    }

    /// Decodes a point of [`param_space`].
    pub fn from_vector(kind: ClassifierKind, v: &[f64]) -> Result<Self> {
        let space = param_space(kind);
        if v.len() != space.len() {
            return Err(Error::DimensionMismatch {
                expected: space.len(),
                got: v.len(),
            });
        }
        let hp = match kind {
            ClassifierKind::Rf => HyperParams::Rf(RfParams {
                n_estimators: as_count(v[0]),
                min_samples_leaf: as_count(v[1]),
                min_samples_split: as_count(v[2]),
                max_leaf_nodes: Some(as_count(v[3])),
                max_features: Some(v[4]),
                max_depth: Some(as_count(v[5])),
            }),
            ClassifierKind::Nb => HyperParams::Nb(NbParams { var_smoothing: v[0] }),
            ClassifierKind::Lr => HyperParams::Lr(LrParams {
                c: v[0],
                max_iter: as_count(v[1]),
                verbose: as_count(v[2]),
            }),
            ClassifierKind::Mlp => HyperParams::Mlp(MlpParams {
                alpha: v[0],
                learning_rate_init: v[1],
                power_t: v[2],
                max_iter: as_count(v[3]),
                momentum: v[4],
                n_iter_no_change: as_count(v[5]),
            }),
            ClassifierKind::Knn => HyperParams::Knn(KnnParams {
                leaf_size: as_count(v[0]),
                n_neighbors: as_count(v[1]),
            }),
        };
        hp.validate()?;
        Ok(hp)
    }

    /// Encodes into [`param_space`] coordinates; `None` when a setting has
    /// no in-range encoding.
    pub fn to_vector(&self) -> Option<Vec<f64>> {
        Some(match *self {
            HyperParams::Rf(p) => vec![
                p.n_estimators as f64,
                p.min_samples_leaf as f64,
                p.min_samples_split as f64,
                p.max_leaf_nodes? as f64,
                p.max_features?,
                p.max_depth? as f64,
            ],
            HyperParams::Nb(p) => vec![p.var_smoothing],
            HyperParams::Lr(p) => vec![p.c, p.max_iter as f64, p.verbose as f64],
            HyperParams::Mlp(p) => vec![
                p.alpha,
                p.learning_rate_init,
                p.power_t,
                p.max_iter as f64,
                p.momentum,
                p.n_iter_no_change as f64,
            ],
            HyperParams::Knn(p) => vec![p.leaf_size as f64, p.n_neighbors as f64],
        })
    }

    /// Every set value must lie inside its tuning range; `None` settings of
    /// the random forest are always accepted.
    pub fn validate(&self) -> Result<()> {
        let space = param_space(self.kind());
        let values: Vec<Option<f64>> = match *self {
            HyperParams::Rf(p) => vec![
                Some(p.n_estimators as f64),
                Some(p.min_samples_leaf as f64),
                Some(p.min_samples_split as f64),
                p.max_leaf_nodes.map(|v| v as f64),
                p.max_features,
                p.max_depth.map(|v| v as f64),
            ],
            _ => self
                .to_vector()
                .expect("non-forest params encode")
                .into_iter()
                .map(Some)
                .collect(),
        };
        for (dim, v) in space.dims().iter().zip(values) {
            if let Some(v) = v {
                if !(v >= dim.low && v <= dim.high) {
                    return Err(Error::InvalidParam {
                        name: dim.name.clone(),
                        value: v,
                        reason: format!("outside [{}, {}]", dim.low, dim.high),
                    });
                }
            }
        }
        Ok(())
    }
}

impl fmt::Display for HyperParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let opt = |v: Option<String>| v.unwrap_or_else(|| "None".into());
        match *self {
            HyperParams::Rf(p) => write!(
                f,
                "n_estimators={} min_samples_leaf={} min_samples_split={} max_leaf_nodes={} max_features={} max_depth={}",
                p.n_estimators,
                p.min_samples_leaf,
                p.min_samples_split,
                opt(p.max_leaf_nodes.map(|v| v.to_string())),
                opt(p.max_features.map(|v| format!("{v:.4}"))),
                opt(p.max_depth.map(|v| v.to_string())),
            ),
            HyperParams::Nb(p) => write!(f, "var_smoothing={:e}", p.var_smoothing),
            HyperParams::Lr(p) => write!(f, "C={:.4} max_iter={} verbose={}", p.c, p.max_iter, p.verbose),
            HyperParams::Mlp(p) => write!(
                f,
                "alpha={:e} learning_rate_init={:.5} power_t={:.4} max_iter={} momentum={:.4} n_iter_no_change={}",
                p.alpha, p.learning_rate_init, p.power_t, p.max_iter, p.momentum, p.n_iter_no_change
            ),
            HyperParams::Knn(p) => write!(f, "leaf_size={} n_neighbors={}", p.leaf_size, p.n_neighbors),
        }
    }
}
