//! Security bug-report classification pipeline.
//!
//! The crate covers every stage of the experiment: ingesting labelled bug
//! reports ([`corpus`]), keyword scoring and featurization ([`textmine`]),
//! irrelevancy pruning and noise removal ([`filters`]), SMOTE rebalancing
//! ([`sampling`]), five native classifiers ([`learners`]), differential
//! evolution tuning ([`tuner`]), the train/test experiment rig ([`harness`])
//! and Scott-Knott ranking ([`stats`]).
//!
//! [`surrogate`] generates synthetic corpora with the class-imbalance profile
//! of the public FARSEC data sets for use when the real data is unavailable.

pub mod corpus;
pub mod error;
pub mod filters;
pub mod harness;
pub mod learners;
pub mod neighbors;
pub mod sampling;
pub mod stats;
pub mod surrogate;
pub mod textmine;
pub mod tuner;

mod util;

pub use corpus::{BugReport, Corpus, Dataset, FoldAssignment, Label, Provenance, Role, Row};
pub use error::{Error, Result};
pub use filters::{ClniParams, FilterConfig, FilterKind};
pub use harness::{Metrics, ProjectData, Treatment, TreatmentResult};
pub use learners::{ClassifierKind, HyperParams, Model};
pub use sampling::{SmoteBasis, SmoteParams};
pub use stats::RankTable;
pub use textmine::{ScoreTable, SupportFunction, TermScore};
pub use tuner::{Candidate, DeConfig, Dimension, DimensionKind, ParamSpace};
