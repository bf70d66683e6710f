//! Differential evolution and the tuning loops that use it.

mod de;
mod space;
mod tuning;

pub use de::{de_optimize, mutate, np_for, random_search, DeConfig, DeOutcome};
pub use space::{Candidate, Dimension, DimensionKind, ParamSpace};
pub use tuning::{
    cv_fitness, cv_scores, fit_pipeline, plan_folds, smotuned, tune_learner, Pipeline, SmoteOutcome, TuneOutcome,
    CV_BINS, SMOTUNED_GENERATIONS,
};
