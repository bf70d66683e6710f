//! Cross-validated fitness and the two tuning loops built on it.

use rayon::prelude::*;

use super::de::{de_optimize, DeConfig};
use crate::corpus::{split_folds, Dataset, FoldAssignment, Label};
use crate::error::{Error, Result};
use crate::harness::{confusion, metrics};
use crate::learners::{
    default_params, param_space, seed_point, smote_space, train, ClassifierKind, HyperParams, Model,
};
use crate::sampling::{smote_seeded, SmoteBasis, SmoteParams};
use crate::util::derive_seed;

pub const CV_BINS: usize = 10;
/// Generations used by the SMOTE tuner.
pub const SMOTUNED_GENERATIONS: usize = 10;

const FOLD_STREAM: u64 = 1;
const DE_STREAM: u64 = 2;
const SMOTE_STREAM: u64 = 3;
const LEARNER_STREAM: u64 = 4;

/// What is fitted on a block of training rows.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Pipeline {
    Plain(HyperParams),
    Smote(HyperParams, SmoteParams),
}

impl Pipeline {
    pub fn learner(&self) -> &HyperParams {
        match self {
            Pipeline::Plain(hp) | Pipeline::Smote(hp, _) => hp,
        }
    }
}

/// Resamples (when asked) and trains on all of `d`.
pub fn fit_pipeline(d: &Dataset, pipeline: &Pipeline, seed: u64) -> Result<Model> {
    d.ensure_training("pipeline fit")?;
    match pipeline {
        Pipeline::Plain(hp) => train(hp, d, derive_seed(seed, LEARNER_STREAM)),
        Pipeline::Smote(hp, sp) => {
            let sampled = smote_seeded(d, sp, derive_seed(seed, SMOTE_STREAM))?;
            train(hp, &sampled, derive_seed(seed, LEARNER_STREAM))
        }
    }
}

/// Stratified folds for `d`; fewer bins when there are fewer rows.
pub fn plan_folds(d: &Dataset, seed: u64) -> Result<FoldAssignment> {
    split_folds(d, CV_BINS.min(d.n_rows()), derive_seed(seed, FOLD_STREAM))
}

/// g-measure on each held-out bin that contains at least one SBR.
///
/// A bin whose training side lacks a class scores 0, as a model that can
/// only ever predict one class would.
pub fn cv_scores(d: &Dataset, folds: &FoldAssignment, pipeline: &Pipeline, seed: u64) -> Result<Vec<f64>> {
    d.ensure_training("cross-validation")?;
    let scored: Vec<Option<f64>> = (0..folds.n_bins())
        .into_par_iter()
        .map(|bin| {
            let held = d.subset(folds.test_indices(bin));
            if held.count(Label::Sbr) == 0 {
                return Ok(None);
            }
            let fit = d.subset(&folds.train_indices(bin));
            let model = match fit_pipeline(&fit, pipeline, derive_seed(seed, bin as u64)) {
                Ok(m) => m,
                Err(Error::MissingClass(_)) => return Ok(Some(0.0)),
                Err(e) => return Err(e),
            };
            let preds = model.predict_batch(&held)?;
            Ok(Some(metrics(&confusion(&preds, &held.labels())?).g))
        })
        .collect::<Result<_>>()?;
    Ok(scored.into_iter().flatten().collect())
}

/// Median of [`cv_scores`].
pub fn cv_fitness(d: &Dataset, folds: &FoldAssignment, pipeline: &Pipeline, seed: u64) -> Result<f64> {
    let scores = cv_scores(d, folds, pipeline, seed)?;
    if scores.is_empty() {
        return Err(Error::MissingClass(Label::Sbr));
    }
    Ok(crate::stats::median(&scores))
}

#[derive(Debug, Clone, PartialEq)]
pub struct TuneOutcome {
    pub params: HyperParams,
    pub fitness: f64,
    pub default_fitness: f64,
    pub trace: Vec<f64>,
    pub evaluations: usize,
}

/// Differential evolution over the learner's tuning space, scored by
/// [`cv_fitness`] on one fixed fold plan. The defaults join the starting
/// population, and when they cannot be encoded exactly they are also scored
/// directly and win if DE finds nothing better.
pub fn tune_learner(kind: ClassifierKind, d: &Dataset, generations: usize, seed: u64) -> Result<TuneOutcome> {
    d.ensure_training("learner tuning")?;
    d.ensure_both_classes()?;
    let folds = plan_folds(d, seed)?;
    let space = param_space(kind);
    let cfg = DeConfig::for_space(&space, generations, derive_seed(seed, DE_STREAM))?;
    let fitness = |v: &[f64]| {
        let hp = HyperParams::from_vector(kind, v)?;
        cv_fitness(d, &folds, &Pipeline::Plain(hp), seed)
    };
    let out = de_optimize(&space, fitness, &cfg, &[seed_point(kind, d.n_features())])?;
    let defaults = default_params(kind);
    let default_fitness = cv_fitness(d, &folds, &Pipeline::Plain(defaults), seed)?;
    let de_fitness = out.best.fitness.unwrap_or(f64::NEG_INFINITY);
    let (params, fitness) = if default_fitness > de_fitness {
        (defaults, default_fitness)
    } else {
        (HyperParams::from_vector(kind, &out.best.values)?, de_fitness)
    };
    log::debug!("tuned {kind}: {params} (fitness {fitness:.4}, default {default_fitness:.4})");
    Ok(TuneOutcome {
        params,
        fitness,
        default_fitness,
        trace: out.trace,
        evaluations: out.evaluations,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SmoteOutcome {
    pub params: SmoteParams,
    pub fitness: f64,
    pub default_fitness: f64,
    pub trace: Vec<f64>,
    pub evaluations: usize,
}

fn smote_from_vector(v: &[f64], basis: SmoteBasis) -> Result<SmoteParams> {
    let p = SmoteParams {
        k: v[0].round() as usize,
        m: v[1].round() as usize,
        r: v[2].round() as u32,
        basis,
    };
    p.validate()?;
    Ok(p)
}

/// SMOTUNED: DE over the SMOTE knobs with the learner left at its defaults.
/// SMOTE only ever sees the training bins of each fold.
pub fn smotuned(kind: ClassifierKind, d: &Dataset, basis: SmoteBasis, seed: u64) -> Result<SmoteOutcome> {
    d.ensure_training("SMOTE tuning")?;
    d.ensure_both_classes()?;
    let folds = plan_folds(d, seed)?;
    let space = smote_space();
    let cfg = DeConfig::for_space(&space, SMOTUNED_GENERATIONS, derive_seed(seed, DE_STREAM))?;
    let learner = default_params(kind);
    let fitness = |v: &[f64]| {
        let sp = smote_from_vector(v, basis)?;
        cv_fitness(d, &folds, &Pipeline::Smote(learner, sp), seed)
    };
    let defaults = SmoteParams {
        basis,
        ..SmoteParams::default()
    };
    let seed_vec = vec![defaults.k as f64, defaults.m as f64, f64::from(defaults.r)];
    let default_fitness = fitness(&seed_vec)?;
    let out = de_optimize(&space, fitness, &cfg, &[seed_vec])?;
    let params = smote_from_vector(&out.best.values, basis)?;
    Ok(SmoteOutcome {
        params,
        fitness: out.best.fitness.unwrap_or(f64::NEG_INFINITY),
        default_fitness,
        trace: out.trace,
        evaluations: out.evaluations,
    })
}
