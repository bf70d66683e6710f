//! Runs the (repeat × project × filter × treatment) grid and writes every
//! output file.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::sync::Mutex;

use anyhow::{bail, Context, Result};
use rayon::prelude::*;
use sbrtune::filters::{apply_filter, FilterConfig};
use sbrtune::harness::{load_project_scored, project_inputs, run_filtered_cell, CellConfig, ResultRecord};
use sbrtune::{Dataset, FilterKind, ProjectData, Treatment, TreatmentResult};

use crate::config::RunConfig;
use crate::manifest::{hash_file, FailedCell, Manifest};
use crate::report::{format_results, render};

pub const RESULTS_FILE: &str = "results.csv";
pub const RANKS_FILE: &str = "ranks.csv";
pub const DELTAS_FILE: &str = "deltas.csv";
pub const REPORT_FILE: &str = "report.md";
pub const MANIFEST_FILE: &str = "manifest.txt";
pub const TRACES_FILE: &str = "traces.csv";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cell {
    pub repeat: usize,
    pub project: String,
    pub filter: FilterKind,
    pub treatment: Treatment,
    pub de_gens: usize,
    /// Column label written to the results.
    pub label: String,
}

impl Cell {
    pub fn id(&self) -> String {
        format!("{}/{}/{}/{}", self.project, self.filter, self.label, self.repeat)
    }
}

/// Cells in output order: repeat, project, filter, treatment.
pub fn plan(cfg: &RunConfig) -> Vec<Cell> {
    let mut out = Vec::with_capacity(cfg.expected_rows());
    for repeat in 0..cfg.repeats {
        for project in &cfg.projects {
            for &filter in &cfg.filters {
                for &treatment in &cfg.treatments {
                    let budgets: &[usize] = if treatment == Treatment::LearnerTuning {
                        &cfg.de_gens
                    } else {
                        &cfg.de_gens[..1]
                    };
                    for &de_gens in budgets {
                        out.push(Cell {
                            repeat,
                            project: project.clone(),
                            filter,
                            treatment,
                            de_gens,
                            label: cfg.treatment_label(treatment, de_gens),
                        });
                    }
                }
            }
        }
    }
    out
}

pub fn cell_config(cfg: &RunConfig, cell: &Cell) -> CellConfig {
    CellConfig {
        learners: cfg.learners.clone(),
        de_generations: cell.de_gens,
        filter: FilterConfig {
            threshold: cfg.filter_threshold,
            ..FilterConfig::default()
        },
        smote: cfg.smote,
        seed: cfg.seed.wrapping_add(cell.repeat as u64),
    }
}

pub fn to_record(cell: &Cell, r: &TreatmentResult, timings: bool) -> ResultRecord {
    ResultRecord {
        project: cell.project.clone(),
        filter: cell.filter.name().to_string(),
        treatment: cell.label.clone(),
        learner: r.learner.name().to_string(),
        metrics: r.metrics,
        minutes: timings.then(|| r.seconds / 60.0),
    }
}

/// What a finished run produced.
#[derive(Debug)]
pub struct RunOutcome {
    pub records: Vec<ResultRecord>,
    pub results: Vec<(Cell, TreatmentResult)>,
    pub manifest: Manifest,
}

impl RunOutcome {
    pub fn ok(&self) -> bool {
        self.manifest.ok()
    }
}

fn write(dir: &Path, name: &str, text: &str) -> Result<()> {
    let path = dir.join(name);
    fs::write(&path, text).with_context(|| format!("writing {}", path.display()))
}

fn traces_csv(results: &[(Cell, TreatmentResult)]) -> String {
    let mut s = String::from("project,filter,treatment,repeat,learner,generation,best_fitness\n");
    for (cell, r) in results {
        for c in &r.candidates {
            for (g, f) in c.trace.iter().enumerate() {
                let _ = writeln!(
                    s,
                    "{},{},{},{},{},{g},{f:.6}",
                    cell.project, cell.filter, cell.label, cell.repeat, c.learner
                );
            }
        }
    }
    s
}

/// Checks that every project's inputs exist and returns them.
pub fn check_inputs(cfg: &RunConfig) -> Result<Vec<std::path::PathBuf>> {
    let mut inputs = Vec::new();
    let mut missing = Vec::new();
    for p in &cfg.projects {
        match project_inputs(&cfg.data_dir, p) {
            Ok(paths) => inputs.extend(paths),
            Err(e) => missing.push(format!("{p}: {e}")),
        }
    }
    if !missing.is_empty() {
        bail!(
            "missing project data under {}:\n  {}",
            cfg.data_dir.display(),
            missing.join("\n  ")
        );
    }
    Ok(inputs)
}

/// Runs the grid. Each training set is filtered once and shared by every
/// cell that uses it. Cells run on a pool of `cfg.jobs` workers; results are
/// kept in plan order whatever order they finish in. A failed cell is
/// recorded in the manifest and the remaining cells still run.
pub fn run(cfg: &RunConfig) -> Result<RunOutcome> {
    let inputs = check_inputs(cfg)?;
    fs::create_dir_all(&cfg.out).with_context(|| format!("creating {}", cfg.out.display()))?;
    let mut manifest = Manifest {
        config_echo: cfg.echo(),
        ..Manifest::default()
    };
    for path in inputs {
        let hash = hash_file(&path)?;
        manifest.inputs.push((path, hash));
    }

    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(j) = cfg.jobs {
        pool = pool.num_threads(j);
    }
    let pool = pool.build().context("starting worker pool")?;
    let outcome = pool.install(|| execute(cfg, manifest))?;

    let results_csv = format_results(&outcome.records);
    write(&cfg.out, RESULTS_FILE, &results_csv)?;
    if cfg.trace {
        write(&cfg.out, TRACES_FILE, &traces_csv(&outcome.results))?;
    }
    let mut manifest = outcome.manifest;
    match render(&results_csv) {
        Ok(r) => {
            write(&cfg.out, RANKS_FILE, &r.ranks_csv)?;
            write(&cfg.out, DELTAS_FILE, &r.deltas_csv)?;
            write(&cfg.out, REPORT_FILE, &r.report_md)?;
        }
        Err(e) => manifest.notes.push(format!("report not rendered: {e:#}")),
    }
    write(&cfg.out, MANIFEST_FILE, &manifest.render())?;
    Ok(RunOutcome {
        records: outcome.records,
        results: outcome.results,
        manifest,
    })
}

type Filtered = HashMap<(String, FilterKind), std::result::Result<Dataset, String>>;

fn execute(cfg: &RunConfig, mut manifest: Manifest) -> Result<RunOutcome> {
    let projects: Vec<(ProjectData, Option<sbrtune::ScoreTable>)> = cfg
        .projects
        .par_iter()
        .map(|p| load_project_scored(&cfg.data_dir, p, cfg.keywords).with_context(|| format!("loading project {p}")))
        .collect::<Result<_>>()?;
    for (data, table) in &projects {
        log::info!(
            "{}: {} training rows ({} SBR), {} test rows, {} features",
            data.name,
            data.train.n_rows(),
            data.train.count(sbrtune::Label::Sbr),
            data.test.n_rows(),
            data.train.n_features()
        );
        if let (true, Some(table)) = (cfg.save_keywords, table) {
            table.save_csv(&cfg.out.join(format!("keywords_{}.csv", data.name)))?;
        }
    }
    let by_name: HashMap<&str, &ProjectData> = projects.iter().map(|(d, _)| (d.name.as_str(), d)).collect();

    let filter_cfg = FilterConfig {
        threshold: cfg.filter_threshold,
        ..FilterConfig::default()
    };
    let pairs: Vec<(&str, FilterKind)> = cfg
        .projects
        .iter()
        .flat_map(|p| cfg.filters.iter().map(move |&f| (p.as_str(), f)))
        .collect();
    let filtered: Filtered = pairs
        .par_iter()
        .map(|&(p, f)| {
            let d = apply_filter(&by_name[p].train, f, &filter_cfg).map_err(|e| e.to_string());
            if let Ok(d) = &d {
                log::info!("{p}/{f}: {} rows, {} SBR", d.n_rows(), d.count(sbrtune::Label::Sbr));
            }
            ((p.to_string(), f), d)
        })
        .collect();

    let cells = plan(cfg);
    manifest.planned = cells.len();
    let done = Mutex::new(0usize);
    let outcomes: Vec<std::result::Result<TreatmentResult, String>> = cells
        .par_iter()
        .map(|cell| {
            let project = by_name[cell.project.as_str()];
            let result = match &filtered[&(cell.project.clone(), cell.filter)] {
                Ok(train) => run_filtered_cell(project, cell.filter, train, cell.treatment, &cell_config(cfg, cell))
                    .map_err(|e| e.to_string()),
                Err(e) => Err(format!("filter failed: {e}")),
            };
            let mut n = done.lock().expect("progress counter");
            *n += 1;
            match &result {
                Ok(r) => log::info!(
                    "[{}/{}] {} -> {} pd={:.3} pf={:.3} ({:.1}s)",
                    *n,
                    cells.len(),
                    cell.id(),
                    r.learner,
                    r.metrics.pd,
                    r.metrics.pf,
                    r.seconds
                ),
                Err(e) => log::warn!("[{}/{}] {} failed: {e}", *n, cells.len(), cell.id()),
            }
            result
        })
        .collect();

    let mut records = Vec::new();
    let mut results = Vec::new();
    for (cell, outcome) in cells.into_iter().zip(outcomes) {
        match outcome {
            Ok(r) => {
                records.push(to_record(&cell, &r, cfg.timings));
                results.push((cell, r));
            }
            Err(error) => manifest.failed.push(FailedCell { cell: cell.id(), error }),
        }
    }
    manifest.completed = records.len();
    Ok(RunOutcome {
        records,
        results,
        manifest,
    })
}
