//! Acceptance checks for the experiment pipeline. Prints one PASS/FAIL line
//! per criterion and exits nonzero when any criterion fails.
//!
//! Project data is read from `SBRTUNE_DATA_DIR` (one `<project>/` directory
//! per project) when set. Otherwise full-scale surrogate corpora are
//! generated. Criterion 5 is a replication claim about the published data
//! sets and only runs against `SBRTUNE_DATA_DIR`.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use anyhow::{bail, Context, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sbrtune::filters::{apply_filter, FilterConfig};
use sbrtune::harness::{default_keywords, load_project};
use sbrtune::learners::default_params;
use sbrtune::sampling::{minkowski, smote_seeded};
use sbrtune::stats::{a12, median, scott_knott, sk_gain};
use sbrtune::surrogate::{profile, write_project, SurrogateConfig};
use sbrtune::tuner::{cv_fitness, de_optimize, plan_folds, random_search, tune_learner, Pipeline};
use sbrtune::{
    ClassifierKind, Dataset, DeConfig, Dimension, FilterKind, Label, ParamSpace, Provenance, Row, SmoteParams,
};
use sbrtune_cli::report::parse_results;

const APACHE: [&str; 4] = ["wicket", "ambari", "camel", "derby"];
const ALL_PROJECTS: [&str; 5] = ["chromium", "wicket", "ambari", "camel", "derby"];

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Self {
            pass,
            detail: detail.into(),
        }
    }
}

/// Where project data lives for this run.
struct Data {
    dir: PathBuf,
    real: bool,
    _tmp: Option<tempfile::TempDir>,
}

impl Data {
    fn locate() -> Result<Self> {
        if let Some(dir) = std::env::var_os("SBRTUNE_DATA_DIR") {
            return Ok(Self {
                dir: PathBuf::from(dir),
                real: true,
                _tmp: None,
            });
        }
        let tmp = tempfile::tempdir()?;
        for name in ALL_PROJECTS {
            let p = profile(name).expect("known project");
            write_project(tmp.path(), &p, &SurrogateConfig::default())?;
        }
        Ok(Self {
            dir: tmp.path().to_path_buf(),
            real: false,
            _tmp: Some(tmp),
        })
    }

    fn source(&self) -> &'static str {
        if self.real {
            "data"
        } else {
            "surrogate data"
        }
    }
}

fn minutes(d: Duration) -> f64 {
    d.as_secs_f64() / 60.0
}

// 1. Filter ordering and SBR preservation.

fn filter_ordering(data: &Data) -> Result<Outcome> {
    let cfg = FilterConfig::default();
    let mut problems = Vec::new();
    let mut apache_time = Duration::ZERO;
    let mut chromium_time = Duration::ZERO;
    for name in ALL_PROJECTS {
        let start = Instant::now();
        let project = load_project(&data.dir, name, default_keywords())?;
        let mut sizes = BTreeMap::new();
        let mut sbr = BTreeMap::new();
        for f in FilterKind::ALL {
            let d = apply_filter(&project.train, f, &cfg).with_context(|| format!("{name}/{f}"))?;
            sizes.insert(f, d.n_rows());
            sbr.insert(f, d.count(Label::Sbr));
        }
        let elapsed = start.elapsed();
        if name == "chromium" {
            chromium_time += elapsed;
        } else {
            apache_time += elapsed;
        }
        use FilterKind::*;
        let chains = [
            [Farsecsq, Farsectwo],
            [Farsectwo, Farsec],
            [Farsec, Train],
            [Clni, Train],
            [Clnifarsecsq, Farsecsq],
            [Clnifarsectwo, Farsectwo],
            [Clnifarsec, Farsec],
        ];
        for [small, big] in chains {
            if sizes[&small] > sizes[&big] {
                problems.push(format!("{name}: |{small}|={} > |{big}|={}", sizes[&small], sizes[&big]));
            }
        }
        let expected = project.train.count(Label::Sbr);
        for (f, n) in &sbr {
            if *n != expected {
                problems.push(format!("{name}/{f}: {n} SBR, expected {expected}"));
            }
        }
    }
    if minutes(apache_time) >= 2.0 {
        problems.push(format!("Apache projects took {:.1} min", minutes(apache_time)));
    }
    if minutes(chromium_time) >= 10.0 {
        problems.push(format!("chromium took {:.1} min", minutes(chromium_time)));
    }
    let detail = if problems.is_empty() {
        format!(
            "5 projects x 8 filters on {} (Apache {:.1}s, chromium {:.1}s)",
            data.source(),
            apache_time.as_secs_f64(),
            chromium_time.as_secs_f64()
        )
    } else {
        problems.join("; ")
    };
    Ok(Outcome::new(problems.is_empty(), detail))
}

// 2. SMOTE properties on seeded random data sets.

fn random_dataset(rng: &mut ChaCha8Rng) -> Dataset {
    let n = rng.gen_range(20..200);
    let dims = rng.gen_range(2..8);
    let minority = rng.gen_range(2..=(n * 3 / 10).max(2));
    let rows = (0..n)
        .map(|i| {
            let label = Label::from_flag(i < minority);
            let shift = if label == Label::Sbr { 2.0 } else { 0.0 };
            Row {
                id: format!("r{i}"),
                values: (0..dims).map(|_| shift + rng.gen_range(0.0..5.0_f64).floor()).collect(),
                label,
            }
        })
        .collect();
    let names = (0..dims).map(|j| format!("f{j}")).collect();
    Dataset::new(names, rows, Provenance::train("random")).expect("valid dataset")
}

/// Is `y` on the segment from `a` to `b`?
fn on_segment(y: &[f64], a: &[f64], b: &[f64]) -> bool {
    let mut t: Option<f64> = None;
    for ((&y, &a), &b) in y.iter().zip(a).zip(b) {
        let span = b - a;
        if span.abs() < 1e-12 {
            if (y - a).abs() > 1e-9 {
                return false;
            }
            continue;
        }
        let ti = (y - a) / span;
        if !(-1e-9..=1.0 + 1e-9).contains(&ti) {
            return false;
        }
        match t {
            Some(t0) if (t0 - ti).abs() > 1e-9 => return false,
            _ => t = Some(ti),
        }
    }
    true
}

fn smote_suite() -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut problems = Vec::new();
    let mut both_at_target = 0;
    for case in 0..50 {
        let d = random_dataset(&mut rng);
        let p = SmoteParams::new(rng.gen_range(1..=20), rng.gen_range(50..=400), rng.gen_range(1..=6))?;
        let out = smote_seeded(&d, &p, case)?;
        let target = p.target(d.n_rows());
        let (min_in, maj_in) = (d.count(Label::Sbr), d.count(Label::Nsbr));
        let (min_out, maj_out) = (out.count(Label::Sbr), out.count(Label::Nsbr));
        if min_out.abs_diff(target) > 1 {
            problems.push(format!("case {case}: minority {min_out}, target {target}"));
        }
        // Majority rows are only ever deleted.
        if maj_out != maj_in.min(target) {
            problems.push(format!("case {case}: majority {maj_in} -> {maj_out}, target {target}"));
        }
        if maj_in >= target {
            both_at_target += 1;
        }
        let originals: Vec<&Row> = d.rows().iter().filter(|r| r.label == Label::Sbr).collect();
        for r in &originals {
            if !out.rows().iter().any(|o| o.id == r.id && o.values == r.values) {
                problems.push(format!("case {case}: minority row {} lost", r.id));
            }
        }
        let synthetic = out.rows().iter().filter(|r| r.id.starts_with("smote-"));
        let mut n_synthetic = 0;
        for s in synthetic {
            n_synthetic += 1;
            let found = originals
                .iter()
                .any(|a| originals.iter().any(|b| on_segment(&s.values, &a.values, &b.values)));
            if !found || s.label != Label::Sbr {
                problems.push(format!("case {case}: {} is not between two minority rows", s.id));
            }
        }
        if n_synthetic != min_out - min_in {
            problems.push(format!(
                "case {case}: {n_synthetic} synthetic rows for {min_in} -> {min_out}"
            ));
        }
    }
    for _ in 0..1000 {
        let n = rng.gen_range(1..20);
        let a: Vec<f64> = (0..n).map(|_| rng.gen_range(-100.0..100.0)).collect();
        let b: Vec<f64> = (0..n).map(|_| rng.gen_range(-100.0..100.0)).collect();
        let euclid = a.iter().zip(&b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt();
        let m = minkowski(&a, &b, 2.0)?;
        if (m - euclid).abs() > 1e-9 {
            problems.push(format!("minkowski {m} vs euclidean {euclid}"));
        }
    }
    problems.truncate(5);
    let detail = if problems.is_empty() {
        format!("50 data sets ({both_at_target} with both classes at target), 1000 distance pairs")
    } else {
        problems.join("; ")
    };
    Ok(Outcome::new(problems.is_empty(), detail))
}

// 3. DE on the sphere.

fn de_sphere() -> Result<Outcome> {
    let space = ParamSpace::new((0..3).map(|i| Dimension::real(&format!("x{i}"), -5.0, 5.0)).collect())?;
    let neg_sphere = |v: &[f64]| Ok(-v.iter().map(|x| x * x).sum::<f64>());
    let (mut near, mut beats, mut monotone) = (0, 0, true);
    for seed in 1..=20u64 {
        let cfg = DeConfig::for_space(&space, 10, seed)?;
        assert_eq!((cfg.np, cfg.f, cfg.cr), (30, 0.8, 0.9));
        let out = de_optimize(&space, neg_sphere, &cfg, &[])?;
        let best = out.best.fitness.unwrap_or(f64::NEG_INFINITY);
        if -best <= 0.5 {
            near += 1;
        }
        let rs = random_search(&space, neg_sphere, out.evaluations, seed + 1000)?;
        if best > rs.fitness.unwrap_or(f64::NEG_INFINITY) {
            beats += 1;
        }
        monotone &= out.trace.windows(2).all(|w| w[1] >= w[0]);
    }
    Ok(Outcome::new(
        near >= 18 && beats >= 16 && monotone,
        format!("within 0.5 in {near}/20, beats random search in {beats}/20, monotone {monotone}"),
    ))
}

// 4. Statistics oracles.

fn brute_a12(m: &[f64], n: &[f64]) -> f64 {
    let mut twice = 0u64;
    for x in m {
        for y in n {
            twice += if x > y {
                2
            } else if x == y {
                1
            } else {
                0
            };
        }
    }
    twice as f64 / (2 * m.len() * n.len()) as f64
}

fn stats_oracles() -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut a12_mismatch = 0;
    for _ in 0..1000 {
        let (lm, ln) = (rng.gen_range(1..40), rng.gen_range(1..40));
        let m: Vec<f64> = (0..lm).map(|_| f64::from(rng.gen_range(0..10))).collect();
        let n: Vec<f64> = (0..ln).map(|_| f64::from(rng.gen_range(0..10))).collect();
        if a12(&m, &n)? != brute_a12(&m, &n) {
            a12_mismatch += 1;
        }
    }
    let spread = |c: f64| -> Vec<f64> { (0..20).map(|i| c - 1.0 + f64::from(i) / 10.0).collect() };
    let apart = scott_knott(&[("low".into(), spread(10.0)), ("high".into(), spread(50.0))], 1)?;
    let distinct = apart.rank_of("low") != apart.rank_of("high");
    let same = scott_knott(&[("a".into(), spread(10.0)), ("b".into(), spread(10.0))], 1)?;
    let merged = same.rank_of("a") == same.rank_of("b");
    let gain = sk_gain(&[0.0, 0.0, 1.0, 1.0], 2);
    let gain_ok = (gain - 0.25).abs() < 1e-12;
    Ok(Outcome::new(
        a12_mismatch == 0 && distinct && merged && gain_ok,
        format!(
            "a12 mismatches {a12_mismatch}/1000, 10 vs 50 distinct {distinct}, identical merged {merged}, sk_gain {gain}"
        ),
    ))
}

// 5. Directional replication.

fn run_cli(args: &[&str]) -> Result<()> {
    let status = Command::new(env!("CARGO_BIN_EXE_sbrtune"))
        .args(args)
        .env("RUST_LOG", "warn")
        .status()
        .context("starting sbrtune")?;
    if !status.success() {
        bail!("sbrtune {} exited with {status}", args.join(" "));
    }
    Ok(())
}

fn replication(data: &Data) -> Result<Outcome> {
    if !data.real {
        return Ok(Outcome::new(
            false,
            "not run: needs the FARSEC data sets in SBRTUNE_DATA_DIR; surrogate corpora cannot support this claim",
        ));
    }
    let projects: Vec<&str> = ALL_PROJECTS.into_iter().filter(|p| data.dir.join(p).is_dir()).collect();
    let out = tempfile::tempdir()?;
    // (project, treatment) -> per filter and seed (pd, pf)
    let mut cells: BTreeMap<(String, String), Vec<(f64, f64)>> = BTreeMap::new();
    for seed in 1..=3 {
        let dir = out.path().join(format!("seed{seed}"));
        run_cli(&[
            "run",
            "--data-dir",
            data.dir.to_str().context("data dir is not UTF-8")?,
            "--projects",
            &projects.join(","),
            "--treatments",
            "baseline_default,smotuned",
            "--seed",
            &seed.to_string(),
            "--out",
            dir.to_str().context("out dir is not UTF-8")?,
        ])?;
        let text = std::fs::read_to_string(dir.join("results.csv"))?;
        for r in parse_results(&text)? {
            cells
                .entry((r.project, r.treatment))
                .or_default()
                .push((r.metrics.pd, r.metrics.pf));
        }
    }
    let med = |p: &str, t: &str, pick: fn(&(f64, f64)) -> f64| -> f64 {
        let v: Vec<f64> = cells
            .get(&(p.to_string(), t.to_string()))
            .map(|v| v.iter().map(pick).collect())
            .unwrap_or_default();
        median(&v)
    };
    let mut wins = 0;
    let mut notes = Vec::new();
    for p in &projects {
        let pd_gain = med(p, "smotuned", |c| c.0) - med(p, "baseline_default", |c| c.0);
        let pf_rise = med(p, "smotuned", |c| c.1) - med(p, "baseline_default", |c| c.1);
        if pd_gain >= 0.10 && pf_rise < pd_gain {
            wins += 1;
        }
        notes.push(format!("{p} pd {:+.1} pf {:+.1}", 100.0 * pd_gain, 100.0 * pf_rise));
    }
    Ok(Outcome::new(
        wins >= 3,
        format!("{wins}/{} projects ({})", projects.len(), notes.join(", ")),
    ))
}

// 6. Tuning never loses to the defaults on its own objective.

/// The smaller of the two published DE budgets.
const AC6_GENERATIONS: usize = 3;

fn tuning_never_hurts(data: &Data) -> Result<Outcome> {
    let cfg = FilterConfig::default();
    let seed = 1;
    let mut checked = 0;
    let mut problems = Vec::new();
    for name in APACHE {
        let project = load_project(&data.dir, name, default_keywords())?;
        for f in FilterKind::ALL {
            let d = apply_filter(&project.train, f, &cfg)?;
            let folds = plan_folds(&d, seed)?;
            for kind in ClassifierKind::ALL {
                let tuned = tune_learner(kind, &d, AC6_GENERATIONS, seed)?;
                let tuned_fit = cv_fitness(&d, &folds, &Pipeline::Plain(tuned.params), seed)?;
                let default_fit = cv_fitness(&d, &folds, &Pipeline::Plain(default_params(kind)), seed)?;
                checked += 1;
                if tuned_fit < default_fit {
                    problems.push(format!(
                        "{name}/{f}/{kind}: tuned {tuned_fit:.4} < default {default_fit:.4}"
                    ));
                }
            }
        }
    }
    let detail = if problems.is_empty() {
        format!(
            "{checked} (project, filter, learner) cells, DE{AC6_GENERATIONS}, on {}",
            data.source()
        )
    } else {
        problems.join("; ")
    };
    Ok(Outcome::new(problems.is_empty(), detail))
}

// 7. Determinism of a full column.

fn determinism(data: &Data) -> Result<Outcome> {
    let out = tempfile::tempdir()?;
    let mut texts = Vec::new();
    for run in ["a", "b"] {
        let dir = out.path().join(run);
        run_cli(&[
            "run",
            "--data-dir",
            data.dir.to_str().context("data dir is not UTF-8")?,
            "--projects",
            "ambari",
            "--seed",
            "1",
            "--out",
            dir.to_str().context("out dir is not UTF-8")?,
        ])?;
        texts.push(std::fs::read(dir.join("results.csv"))?);
    }
    let rows = texts[0].iter().filter(|&&b| b == b'\n').count().saturating_sub(1);
    Ok(Outcome::new(
        texts[0] == texts[1] && rows == 32,
        format!(
            "ambari column on {}: {rows} rows, identical {}",
            data.source(),
            texts[0] == texts[1]
        ),
    ))
}

fn report(id: usize, name: &str, outcome: Result<Outcome>, elapsed: Duration) -> bool {
    let (pass, detail) = match outcome {
        Ok(o) => (o.pass, o.detail),
        Err(e) => (false, format!("error: {e:#}")),
    };
    println!(
        "{} AC{id} {name}: {detail} [{:.1}s]",
        if pass { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64()
    );
    pass
}

fn main() -> ExitCode {
    let data = match Data::locate() {
        Ok(d) => d,
        Err(e) => {
            println!("FAIL acceptance setup: {e:#}");
            return ExitCode::FAILURE;
        }
    };
    type Check<'a> = Box<dyn Fn() -> Result<Outcome> + 'a>;
    let checks: Vec<(&str, Check)> = vec![
        ("filter ordering", Box::new(|| filter_ordering(&data))),
        ("SMOTE properties", Box::new(smote_suite)),
        ("DE on the sphere", Box::new(de_sphere)),
        ("statistics oracles", Box::new(stats_oracles)),
        ("directional replication", Box::new(|| replication(&data))),
        ("tuning never hurts", Box::new(|| tuning_never_hurts(&data))),
        ("determinism", Box::new(|| determinism(&data))),
    ];
    let only: Option<Vec<usize>> = std::env::var("SBRTUNE_ACCEPTANCE_ONLY")
        .ok()
        .map(|s| s.split(',').filter_map(|t| t.trim().parse().ok()).collect());
    let mut all = true;
    for (i, (name, check)) in checks.iter().enumerate() {
        let id = i + 1;
        if only.as_ref().is_some_and(|o| !o.contains(&id)) {
            continue;
        }
        let start = Instant::now();
        all &= report(id, name, check(), start.elapsed());
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
