//! Tables derived from a results CSV: Scott-Knott ranks, sorted deltas
//! against the baseline and a per-project markdown report. Everything here
//! depends on the CSV text alone.

use std::fmt::Write as _;

use anyhow::{anyhow, bail, Context, Result};
use sbrtune::harness::{delta_vs_baseline, sorted_series, ResultRecord, BASELINE};
use sbrtune::stats::{median, scott_knott};
use sbrtune::Metrics;

pub const RESULTS_HEADER: [&str; 9] = [
    "project",
    "filter",
    "treatment",
    "learner",
    "pd",
    "pf",
    "prec",
    "g",
    "minutes",
];
pub const RANKS_HEADER: &str = "project,filter,metric,treatment,median,rank";
pub const DELTAS_HEADER: &str = "treatment,index,delta_pd,delta_pf";

/// Seed of the Scott-Knott bootstrap, fixed so reports are reproducible.
pub const RANK_SEED: u64 = 1;

/// Label of the pseudo-filter that pools every filter of a project.
pub const ALL_FILTERS: &str = "all";

pub fn format_results(records: &[ResultRecord]) -> String {
    let mut s = RESULTS_HEADER.join(",");
    s.push('\n');
    for r in records {
        let m = &r.metrics;
        let minutes = r.minutes.map_or_else(|| "NA".to_string(), |v| format!("{v:.4}"));
        let _ = writeln!(
            s,
            "{},{},{},{},{:.6},{:.6},{:.6},{:.6},{minutes}",
            r.project, r.filter, r.treatment, r.learner, m.pd, m.pf, m.prec, m.g
        );
    }
    s
}

fn unit(field: &str, name: &str) -> Result<f64> {
    let v: f64 = field
        .trim()
        .parse()
        .map_err(|_| anyhow!("{name} `{field}` is not a number"))?;
    if !(0.0..=1.0).contains(&v) {
        bail!("{name} {v} is outside [0, 1]");
    }
    Ok(v)
}

/// Parses a results CSV. Errors name the offending line. An empty file or a
/// lone header yields no records.
pub fn parse_results(text: &str) -> Result<Vec<ResultRecord>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(text.as_bytes());
    let mut out = Vec::new();
    for (i, row) in reader.records().enumerate() {
        let row = row.map_err(|e| anyhow!("malformed CSV: {e}"))?;
        let line = row.position().map_or(i as u64 + 1, |p| p.line());
        if i == 0 {
            if row.iter().map(str::trim).ne(RESULTS_HEADER) {
                bail!("line {line}: expected header `{}`", RESULTS_HEADER.join(","));
            }
            continue;
        }
        let parse = || -> Result<ResultRecord> {
            if row.len() != RESULTS_HEADER.len() {
                bail!("expected {} fields, found {}", RESULTS_HEADER.len(), row.len());
            }
            let text = |k: usize, name: &str| -> Result<String> {
                let v = row[k].trim();
                if v.is_empty() {
                    bail!("empty {name}");
                }
                Ok(v.to_string())
            };
            let metrics = Metrics {
                pd: unit(&row[4], "pd")?,
                pf: unit(&row[5], "pf")?,
                prec: unit(&row[6], "prec")?,
                g: unit(&row[7], "g")?,
            };
            let minutes = match row[8].trim() {
                "NA" | "" => None,
                v => Some(v.parse::<f64>().map_err(|_| anyhow!("minutes `{v}` is not a number"))?),
            };
            Ok(ResultRecord {
                project: text(0, "project")?,
                filter: text(1, "filter")?,
                treatment: text(2, "treatment")?,
                learner: text(3, "learner")?,
                metrics,
                minutes,
            })
        };
        out.push(parse().with_context(|| format!("line {line}"))?);
    }
    Ok(out)
}

/// Distinct values in order of first appearance.
fn distinct<'a>(items: impl Iterator<Item = &'a str>) -> Vec<&'a str> {
    let mut out: Vec<&str> = Vec::new();
    for it in items {
        if !out.contains(&it) {
            out.push(it);
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RankMetric {
    Pd,
    Pf,
}

impl RankMetric {
    pub fn name(self) -> &'static str {
        match self {
            RankMetric::Pd => "pd",
            RankMetric::Pf => "pf",
        }
    }

    fn value(self, m: &Metrics) -> f64 {
        match self {
            RankMetric::Pd => m.pd,
            RankMetric::Pf => m.pf,
        }
    }

    /// Ranking key: higher is better.
    fn key(self, m: &Metrics) -> f64 {
        match self {
            RankMetric::Pd => m.pd,
            RankMetric::Pf => -m.pf,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankRow {
    pub project: String,
    pub filter: String,
    pub metric: RankMetric,
    pub treatment: String,
    pub median: f64,
    pub rank: usize,
}

/// Scott-Knott ranks of the treatments of every (project, filter) and of
/// every project with all filters pooled. Rank 1 is best: highest pd, lowest
/// pf. Samples are the repeats (and, when pooled, the filters).
pub fn rank_treatments(records: &[ResultRecord]) -> Result<Vec<RankRow>> {
    let mut out = Vec::new();
    for project in distinct(records.iter().map(|r| r.project.as_str())) {
        let rows: Vec<&ResultRecord> = records.iter().filter(|r| r.project == project).collect();
        let mut scopes: Vec<(&str, Vec<&ResultRecord>)> = distinct(rows.iter().map(|r| r.filter.as_str()))
            .into_iter()
            .map(|f| (f, rows.iter().copied().filter(|r| r.filter == f).collect()))
            .collect();
        scopes.push((ALL_FILTERS, rows.clone()));
        for (filter, scope) in scopes {
            for metric in [RankMetric::Pd, RankMetric::Pf] {
                let treatments = distinct(scope.iter().map(|r| r.treatment.as_str()));
                let groups: Vec<(String, Vec<f64>)> = treatments
                    .iter()
                    .map(|t| {
                        let keys = scope
                            .iter()
                            .filter(|r| r.treatment == *t)
                            .map(|r| metric.key(&r.metrics));
                        (t.to_string(), keys.collect())
                    })
                    .collect();
                let table = scott_knott(&groups, RANK_SEED)?;
                for t in &treatments {
                    let values: Vec<f64> = scope
                        .iter()
                        .filter(|r| r.treatment == *t)
                        .map(|r| metric.value(&r.metrics))
                        .collect();
                    out.push(RankRow {
                        project: project.to_string(),
                        filter: filter.to_string(),
                        metric,
                        treatment: t.to_string(),
                        median: median(&values),
                        rank: table.rank_of(t).expect("every group is ranked"),
                    });
                }
            }
        }
    }
    Ok(out)
}

pub fn format_ranks(rows: &[RankRow]) -> String {
    let mut s = format!("{RANKS_HEADER}\n");
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{:.6},{}",
            r.project,
            r.filter,
            r.metric.name(),
            r.treatment,
            r.median,
            r.rank
        );
    }
    s
}

/// Per non-baseline treatment, Δpd and Δpf in percentage points, each
/// sorted ascending; one line per non-baseline cell.
pub fn format_deltas(records: &[ResultRecord]) -> Result<String> {
    let deltas = delta_vs_baseline(records)?;
    let mut s = format!("{DELTAS_HEADER}\n");
    for (treatment, pd, pf) in sorted_series(&deltas) {
        for (i, (dpd, dpf)) in pd.iter().zip(&pf).enumerate() {
            let _ = writeln!(s, "{treatment},{i},{dpd:.4},{dpf:.4}");
        }
    }
    Ok(s)
}

fn pct(v: f64) -> String {
    format!("{:.1}", 100.0 * v)
}

/// The learner chosen most often; ties go to the one seen first.
fn modal<'a>(names: impl Iterator<Item = &'a str>) -> &'a str {
    let names: Vec<&str> = names.collect();
    distinct(names.iter().copied())
        .into_iter()
        .fold(("", 0), |best, n| {
            let c = names.iter().filter(|x| **x == n).count();
            if c > best.1 {
                (n, c)
            } else {
                best
            }
        })
        .0
}

/// One table per project: a row per filter and, per treatment, the chosen
/// learner, median pd and pf in percent, and the treatment's pd rank among
/// the treatments of that row.
pub fn format_markdown(records: &[ResultRecord], ranks: &[RankRow]) -> String {
    let mut s = String::from("# Results\n");
    if records.is_empty() {
        s.push_str("\nNo results.\n");
        return s;
    }
    let rank = |project: &str, filter: &str, metric: RankMetric, treatment: &str| {
        ranks
            .iter()
            .find(|r| r.project == project && r.filter == filter && r.metric == metric && r.treatment == treatment)
            .map(|r| r.rank)
    };
    let treatments = distinct(records.iter().map(|r| r.treatment.as_str()));
    for project in distinct(records.iter().map(|r| r.project.as_str())) {
        let rows: Vec<&ResultRecord> = records.iter().filter(|r| r.project == project).collect();
        let _ = write!(s, "\n## {project}\n\n| filter |");
        for t in &treatments {
            let _ = write!(s, " {t} | pd | pf | rank |");
        }
        s.push_str("\n|---|");
        s.push_str(&"---|---:|---:|---:|".repeat(treatments.len()));
        s.push('\n');
        for filter in distinct(rows.iter().map(|r| r.filter.as_str())) {
            let _ = write!(s, "| {filter} |");
            for t in &treatments {
                let cell: Vec<&ResultRecord> = rows
                    .iter()
                    .copied()
                    .filter(|r| r.filter == filter && r.treatment == *t)
                    .collect();
                if cell.is_empty() {
                    s.push_str(" - | - | - | - |");
                    continue;
                }
                let med = |f: fn(&Metrics) -> f64| median(&cell.iter().map(|r| f(&r.metrics)).collect::<Vec<_>>());
                let learner = modal(cell.iter().map(|r| r.learner.as_str()));
                let r = rank(project, filter, RankMetric::Pd, t).map_or_else(|| "-".into(), |r| r.to_string());
                let _ = write!(
                    s,
                    " {learner} | {} | {} | {r} |",
                    pct(med(|m| m.pd)),
                    pct(med(|m| m.pf))
                );
            }
            s.push('\n');
        }
        for metric in [RankMetric::Pd, RankMetric::Pf] {
            let pooled: Vec<String> = treatments
                .iter()
                .filter_map(|t| rank(project, ALL_FILTERS, metric, t).map(|r| format!("{t} {r}")))
                .collect();
            let _ = write!(
                s,
                "\nRanks over all filters by {}: {}.\n",
                metric.name(),
                pooled.join(", ")
            );
        }
    }
    s
}

/// Everything `report` writes.
#[derive(Debug, Clone, PartialEq)]
pub struct Rendered {
    pub ranks_csv: String,
    pub deltas_csv: String,
    pub report_md: String,
}

pub fn render(results_csv: &str) -> Result<Rendered> {
    let records = parse_results(results_csv)?;
    let ranks = rank_treatments(&records)?;
    let deltas_csv = if records.iter().all(|r| r.treatment == BASELINE) {
        format!("{DELTAS_HEADER}\n")
    } else {
        format_deltas(&records)?
    };
    Ok(Rendered {
        ranks_csv: format_ranks(&ranks),
        deltas_csv,
        report_md: format_markdown(&records, &ranks),
    })
}
