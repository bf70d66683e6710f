//! Runs one (project, filter, treatment) cell: filter the training data,
//! pick the best learner by cross-validation, refit on all filtered training
//! rows and score once on the untouched test set.

use std::collections::HashMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use crate::corpus::{load_matrix, load_reports, Corpus, Dataset, Label, Provenance, ReportFormat, Role};
use crate::error::{Error, Result};
use crate::filters::{apply_filter, FilterConfig, FilterKind};
use crate::learners::{default_params, ClassifierKind};
use crate::sampling::SmoteParams;
use crate::textmine::{build_features, score_terms, top_keywords, ScoreTable, SupportFunction, DEFAULT_KEYWORDS};
use crate::tuner::{cv_fitness, fit_pipeline, plan_folds, smotuned, tune_learner, Pipeline};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Treatment {
    BaselineDefault,
    LearnerTuning,
    SmoteDefault,
    Smotuned,
}

impl Treatment {
    pub const ALL: [Treatment; 4] = [
        Treatment::BaselineDefault,
        Treatment::LearnerTuning,
        Treatment::SmoteDefault,
        Treatment::Smotuned,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Treatment::BaselineDefault => "baseline_default",
            Treatment::LearnerTuning => "learner_tuning",
            Treatment::SmoteDefault => "smote_default",
            Treatment::Smotuned => "smotuned",
        }
    }
}

impl fmt::Display for Treatment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Treatment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Treatment::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| Error::invalid(format!("unknown treatment `{s}`")))
    }
}

/// Confusion counts with SBR as the positive class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Confusion {
    pub tp: usize,
    pub fp: usize,
    pub tn: usize,
    pub fn_: usize,
}

pub fn confusion(preds: &[Label], truth: &[Label]) -> Result<Confusion> {
    if preds.len() != truth.len() {
        return Err(Error::DimensionMismatch {
            expected: truth.len(),
            got: preds.len(),
        });
    }
    let mut cm = Confusion::default();
    for (p, t) in preds.iter().zip(truth) {
        match (p, t) {
            (Label::Sbr, Label::Sbr) => cm.tp += 1,
            (Label::Sbr, Label::Nsbr) => cm.fp += 1,
            (Label::Nsbr, Label::Nsbr) => cm.tn += 1,
            (Label::Nsbr, Label::Sbr) => cm.fn_ += 1,
        }
    }
    Ok(cm)
}

/// Rates in [0, 1]. A rate with a zero denominator is 0.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Metrics {
    /// Recall.
    pub pd: f64,
    /// False alarm rate.
    pub pf: f64,
    pub prec: f64,
    /// Harmonic mean of `pd` and `1 − pf`.
    pub g: f64,
}

fn ratio(a: usize, b: usize) -> f64 {
    if b == 0 {
        0.0
    } else {
        a as f64 / b as f64
    }
}

pub fn metrics(cm: &Confusion) -> Metrics {
    let pd = ratio(cm.tp, cm.tp + cm.fn_);
    let pf = ratio(cm.fp, cm.fp + cm.tn);
    Metrics {
        pd,
        pf,
        prec: ratio(cm.tp, cm.tp + cm.fp),
        g: g_measure(pd, pf),
    }
}

pub fn g_measure(pd: f64, pf: f64) -> f64 {
    let denom = pd + 1.0 - pf;
    if denom <= 0.0 {
        0.0
    } else {
        2.0 * pd * (1.0 - pf) / denom
    }
}

/// Training and test matrices for one project, sharing one feature set.
#[derive(Debug, Clone)]
pub struct ProjectData {
    pub name: String,
    pub train: Dataset,
    pub test: Dataset,
}

impl ProjectData {
    pub fn new(name: impl Into<String>, train: Dataset, test: Dataset) -> Result<Self> {
        let name = name.into();
        if train.provenance().role != Role::Train || test.provenance().role != Role::Test {
            return Err(Error::invalid(format!(
                "project `{name}` has mislabelled train/test roles"
            )));
        }
        if train.feature_names() != test.feature_names() {
            return Err(Error::invalid(format!(
                "project `{name}` train and test features differ"
            )));
        }
        Ok(Self { name, train, test })
    }
}

/// Locates the input for `role` under `dir`: a prepared matrix
/// (`train_matrix.csv`) or raw reports (`train.jsonl` / `train.csv`).
fn find_input(dir: &Path, role: &str) -> std::result::Result<(PathBuf, bool), PathBuf> {
    let matrix = dir.join(format!("{role}_matrix.csv"));
    if matrix.is_file() {
        return Ok((matrix, true));
    }
    for ext in ["jsonl", "csv"] {
        let raw = dir.join(format!("{role}.{ext}"));
        if raw.is_file() {
            return Ok((raw, false));
        }
    }
    Err(matrix)
}

/// Every input file read for `project`.
pub fn project_inputs(data_dir: &Path, project: &str) -> Result<Vec<PathBuf>> {
    let dir = data_dir.join(project);
    ["train", "test"]
        .into_iter()
        .map(|role| find_input(&dir, role).map(|(p, _)| p).map_err(missing))
        .collect()
}

fn missing(path: PathBuf) -> Error {
    Error::Io {
        source: std::io::Error::new(std::io::ErrorKind::NotFound, "no matrix or report file"),
        path,
    }
}

/// Loads `<data_dir>/<project>`. Raw reports are featurised with the
/// `keywords` best-scoring terms of the training reports; the test reports
/// reuse that frozen vocabulary.
pub fn load_project(data_dir: &Path, project: &str, keywords: usize) -> Result<ProjectData> {
    load_project_scored(data_dir, project, keywords).map(|(p, _)| p)
}

/// [`load_project`], also returning the term scores when the project was
/// featurised from raw reports.
pub fn load_project_scored(
    data_dir: &Path,
    project: &str,
    keywords: usize,
) -> Result<(ProjectData, Option<ScoreTable>)> {
    let dir = data_dir.join(project);
    let (train_path, train_matrix) = find_input(&dir, "train").map_err(missing)?;
    let (test_path, test_matrix) = find_input(&dir, "test").map_err(missing)?;
    if train_matrix != test_matrix {
        return Err(Error::invalid(format!(
            "project `{project}` mixes a feature matrix with raw reports"
        )));
    }
    if train_matrix {
        let train = load_matrix(&train_path, Provenance::train(project))?;
        let test = load_matrix(&test_path, Provenance::test(project))?;
        return Ok((ProjectData::new(project, train, test)?, None));
    }
    let train_docs = load_reports(&train_path, ReportFormat::from_path(&train_path))?;
    let test_docs = load_reports(&test_path, ReportFormat::from_path(&test_path))?;
    let (data, table) = featurize(project, &train_docs, &test_docs, keywords)?;
    Ok((data, Some(table)))
}

/// Scores terms on `train` only and builds both matrices over the top
/// `keywords` terms.
pub fn featurize(project: &str, train: &Corpus, test: &Corpus, keywords: usize) -> Result<(ProjectData, ScoreTable)> {
    let table = score_terms(train, SupportFunction::Plain)?;
    let vocab = top_keywords(&table, keywords.min(table.len()))?;
    let train = build_features(train, &vocab, Provenance::train(project))?;
    let test = build_features(test, &vocab, Provenance::test(project))?;
    Ok((ProjectData::new(project, train, test)?, table))
}

pub fn default_keywords() -> usize {
    DEFAULT_KEYWORDS
}

/// Settings shared by every cell of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct CellConfig {
    pub learners: Vec<ClassifierKind>,
    /// Generations for learner tuning.
    pub de_generations: usize,
    pub filter: FilterConfig,
    /// SMOTE settings of the untuned SMOTE treatment; its basis also
    /// applies to SMOTE tuning.
    pub smote: SmoteParams,
    pub seed: u64,
}

impl Default for CellConfig {
    fn default() -> Self {
        Self {
            learners: ClassifierKind::ALL.to_vec(),
            de_generations: 10,
            filter: FilterConfig::default(),
            smote: SmoteParams::default(),
            seed: 1,
        }
    }
}

/// Cross-validated outcome of one learner inside a cell.
#[derive(Debug, Clone, PartialEq)]
pub struct LearnerScore {
    pub learner: ClassifierKind,
    pub pipeline: Pipeline,
    pub fitness: f64,
    /// Fitness of the untuned configuration on the same folds.
    pub default_fitness: f64,
    pub trace: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TreatmentResult {
    pub project: String,
    pub filter: FilterKind,
    pub treatment: Treatment,
    pub learner: ClassifierKind,
    pub pipeline: Pipeline,
    pub metrics: Metrics,
    pub train_rows: usize,
    pub candidates: Vec<LearnerScore>,
    pub seconds: f64,
}

/// Scores every learner on the filtered training data for `treatment`.
pub fn evaluate_learners(filtered: &Dataset, treatment: Treatment, cfg: &CellConfig) -> Result<Vec<LearnerScore>> {
    filtered.ensure_training("learner selection")?;
    if cfg.learners.is_empty() {
        return Err(Error::invalid("no learners selected"));
    }
    let folds = plan_folds(filtered, cfg.seed)?;
    cfg.learners
        .iter()
        .map(|&learner| {
            let defaults = default_params(learner);
            let smote = cfg.smote;
            let base = match treatment {
                Treatment::BaselineDefault | Treatment::LearnerTuning => Pipeline::Plain(defaults),
                Treatment::SmoteDefault | Treatment::Smotuned => Pipeline::Smote(defaults, smote),
            };
            Ok(match treatment {
                Treatment::BaselineDefault | Treatment::SmoteDefault => {
                    let fitness = cv_fitness(filtered, &folds, &base, cfg.seed)?;
                    LearnerScore {
                        learner,
                        pipeline: base,
                        fitness,
                        default_fitness: fitness,
                        trace: Vec::new(),
                    }
                }
                Treatment::LearnerTuning => {
                    let out = tune_learner(learner, filtered, cfg.de_generations, cfg.seed)?;
                    LearnerScore {
                        learner,
                        pipeline: Pipeline::Plain(out.params),
                        fitness: out.fitness,
                        default_fitness: out.default_fitness,
                        trace: out.trace,
                    }
                }
                Treatment::Smotuned => {
                    let out = smotuned(learner, filtered, smote.basis, cfg.seed)?;
                    LearnerScore {
                        learner,
                        pipeline: Pipeline::Smote(defaults, out.params),
                        fitness: out.fitness,
                        default_fitness: out.default_fitness,
                        trace: out.trace,
                    }
                }
            })
        })
        .collect()
}

/// Highest fitness wins; ties go to the learner listed first in
/// [`ClassifierKind::ALL`].
pub fn select_best(candidates: &[LearnerScore]) -> Option<&LearnerScore> {
    candidates
        .iter()
        .fold(None, |best: Option<&LearnerScore>, c| match best {
            Some(b) if b.fitness > c.fitness || (b.fitness == c.fitness && b.learner < c.learner) => Some(b),
            _ => Some(c),
        })
}

/// One cell on already filtered training data.
pub fn run_filtered_cell(
    project: &ProjectData,
    filter: FilterKind,
    filtered: &Dataset,
    treatment: Treatment,
    cfg: &CellConfig,
) -> Result<TreatmentResult> {
    let start = Instant::now();
    let candidates = evaluate_learners(filtered, treatment, cfg)?;
    let best = select_best(&candidates).expect("at least one learner").clone();
    let model = fit_pipeline(filtered, &best.pipeline, cfg.seed)?;
    let preds = model.predict_batch(&project.test)?;
    let metrics = metrics(&confusion(&preds, &project.test.labels())?);
    Ok(TreatmentResult {
        project: project.name.clone(),
        filter,
        treatment,
        learner: best.learner,
        pipeline: best.pipeline,
        metrics,
        train_rows: filtered.n_rows(),
        candidates,
        seconds: start.elapsed().as_secs_f64(),
    })
}

/// Filters the project's training data and runs one cell.
pub fn run_cell(
    project: &ProjectData,
    filter: FilterKind,
    treatment: Treatment,
    cfg: &CellConfig,
) -> Result<TreatmentResult> {
    let filtered = apply_filter(&project.train, filter, &cfg.filter)?;
    run_filtered_cell(project, filter, &filtered, treatment, cfg)
}

/// One row of a results table.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRecord {
    pub project: String,
    pub filter: String,
    pub treatment: String,
    pub learner: String,
    pub metrics: Metrics,
    pub minutes: Option<f64>,
}

/// Change of a cell against the baseline of the same project, filter and
/// repeat, in percentage points.
#[derive(Debug, Clone, PartialEq)]
pub struct Delta {
    pub project: String,
    pub filter: String,
    pub treatment: String,
    pub delta_pd: f64,
    pub delta_pf: f64,
}

pub const BASELINE: &str = "baseline_default";

/// Pairs every non-baseline record with its baseline. Records repeating a
/// (project, filter, treatment) key are matched by occurrence order.
pub fn delta_vs_baseline(records: &[ResultRecord]) -> Result<Vec<Delta>> {
    let mut seen: HashMap<(&str, &str, &str), usize> = HashMap::new();
    let mut keyed = Vec::with_capacity(records.len());
    for r in records {
        let n = seen
            .entry((&r.project, &r.filter, &r.treatment))
            .and_modify(|n| *n += 1)
            .or_insert(0);
        keyed.push((*n, r));
    }
    let baselines: HashMap<(&str, &str, usize), &Metrics> = keyed
        .iter()
        .filter(|(_, r)| r.treatment == BASELINE)
        .map(|(n, r)| ((r.project.as_str(), r.filter.as_str(), *n), &r.metrics))
        .collect();
    keyed
        .iter()
        .filter(|(_, r)| r.treatment != BASELINE)
        .map(|(n, r)| {
            let base = baselines
                .get(&(r.project.as_str(), r.filter.as_str(), *n))
                .ok_or_else(|| Error::MissingBaseline(format!("{}/{}", r.project, r.filter)))?;
            Ok(Delta {
                project: r.project.clone(),
                filter: r.filter.clone(),
                treatment: r.treatment.clone(),
                delta_pd: 100.0 * (r.metrics.pd - base.pd),
                delta_pf: 100.0 * (r.metrics.pf - base.pf),
            })
        })
        .collect()
}

/// Per treatment, the Δpd and Δpf values each sorted ascending.
pub fn sorted_series(deltas: &[Delta]) -> Vec<(String, Vec<f64>, Vec<f64>)> {
    let mut by: Vec<(String, Vec<f64>, Vec<f64>)> = Vec::new();
    for d in deltas {
        match by.iter_mut().find(|(t, _, _)| *t == d.treatment) {
            Some((_, pd, pf)) => {
                pd.push(d.delta_pd);
                pf.push(d.delta_pf);
            }
            None => by.push((d.treatment.clone(), vec![d.delta_pd], vec![d.delta_pf])),
        }
    }
    for (_, pd, pf) in &mut by {
        pd.sort_by(f64::total_cmp);
        pf.sort_by(f64::total_cmp);
    }
    by
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Row;
    use crate::learners::testdata::blobs;
    use Label::{Nsbr as N, Sbr as S};

    #[test]
    fn confusion_examples() {
        let truth: Vec<Label> = [S, S, S].into_iter().chain([N; 7]).collect();
        let cm = confusion(&truth, &truth).unwrap();
        assert_eq!(
            cm,
            Confusion {
                tp: 3,
                tn: 7,
                fp: 0,
                fn_: 0
            }
        );
        let cm = confusion(&[N; 10], &truth).unwrap();
        assert_eq!((cm.tp, cm.fn_), (0, 3));
        let cm = confusion(&[S, N], &[N, S]).unwrap();
        assert_eq!((cm.fp, cm.fn_), (1, 1));
        assert!(confusion(&[S], &[S, N]).is_err());
    }

    #[test]
    fn g_examples() {
        assert_eq!(g_measure(1.0, 0.0), 1.0);
        assert!((g_measure(0.5, 0.5) - 0.5).abs() < 1e-12);
        let g = g_measure(0.157, 0.002);
        assert!((g - 2.0 * 0.157 * 0.998 / (0.157 + 0.998)).abs() < 1e-12);
        assert!((g - 0.271).abs() < 1e-3);
        assert_eq!(metrics(&Confusion::default()), Metrics::default());
    }

    fn project() -> ProjectData {
        let train = blobs(10, 50, 3, 1.2, 1);
        let test_rows: Vec<Row> = blobs(8, 40, 3, 1.2, 2).rows().to_vec();
        let test = Dataset::new(train.feature_names().to_vec(), test_rows, Provenance::test("blobs")).unwrap();
        ProjectData::new("blobs", train, test).unwrap()
    }

    #[test]
    fn cell_is_reproducible() {
        let p = project();
        let cfg = CellConfig {
            learners: vec![ClassifierKind::Nb, ClassifierKind::Lr],
            de_generations: 2,
            ..CellConfig::default()
        };
        for t in Treatment::ALL {
            let a = run_cell(&p, FilterKind::Train, t, &cfg).unwrap();
            let b = run_cell(&p, FilterKind::Train, t, &cfg).unwrap();
            assert_eq!(
                (a.learner, a.metrics, &a.candidates),
                (b.learner, b.metrics, &b.candidates)
            );
            assert!((0.0..=1.0).contains(&a.metrics.g));
        }
    }

    #[test]
    fn swapped_roles_rejected() {
        let p = project();
        assert!(ProjectData::new("x", p.test.clone(), p.train.clone()).is_err());
    }

    #[test]
    fn selection_prefers_fitness_then_order() {
        let c = |learner, fitness| LearnerScore {
            learner,
            pipeline: Pipeline::Plain(default_params(learner)),
            fitness,
            default_fitness: fitness,
            trace: vec![],
        };
        let cands = [
            c(ClassifierKind::Knn, 0.5),
            c(ClassifierKind::Nb, 0.5),
            c(ClassifierKind::Lr, 0.4),
        ];
        assert_eq!(select_best(&cands).unwrap().learner, ClassifierKind::Nb);
    }

    fn rec(treatment: &str, pd: f64, pf: f64) -> ResultRecord {
        ResultRecord {
            project: "p".into(),
            filter: "train".into(),
            treatment: treatment.into(),
            learner: "NB".into(),
            metrics: Metrics {
                pd,
                pf,
                prec: 0.0,
                g: 0.0,
            },
            minutes: None,
        }
    }

    #[test]
    fn deltas_against_baseline() {
        let d = delta_vs_baseline(&[
            rec(BASELINE, 0.16, 0.1),
            rec("smotuned", 0.74, 0.2),
            rec("smote_default", 0.16, 0.1),
        ])
        .unwrap();
        assert_eq!(d.len(), 2);
        assert!((d[0].delta_pd - 58.0).abs() < 1e-9);
        assert_eq!((d[1].delta_pd, d[1].delta_pf), (0.0, 0.0));
        assert!(matches!(
            delta_vs_baseline(&[rec("smotuned", 0.5, 0.1)]),
            Err(Error::MissingBaseline(_))
        ));
        let series = sorted_series(&[
            d[0].clone(),
            d[0].clone(),
            Delta {
                delta_pd: -3.0,
                ..d[0].clone()
            },
        ]);
        let pd = &series[0].1;
        assert_eq!(pd[0], -3.0);
        assert!(pd[1..].iter().all(|v| (v - 58.0).abs() < 1e-9));
    }
}
