use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use sbrtune::filters::FilterConfig;
use sbrtune::surrogate::SurrogateConfig;
use sbrtune_cli::config::{read_config_file, RunConfig};
use sbrtune_cli::{grid, render, tools};

#[derive(Parser)]
#[command(name = "sbrtune", version, about = "Security bug report classification experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment grid and write results, ranks, deltas, report and manifest.
    Run(RunArgs),
    /// Render ranks.csv, deltas.csv and report.md from a results CSV.
    Report {
        results: PathBuf,
        /// Output directory; defaults to the directory of the results file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write surrogate bug-report corpora with the imbalance of each project.
    Synth {
        #[arg(long, default_value = "data")]
        out: PathBuf,
        #[arg(long, default_value = "chromium,wicket,ambari,camel,derby", value_delimiter = ',')]
        projects: Vec<String>,
        /// Row-count multiplier.
        #[arg(long, default_value_t = 1.0)]
        scale: f64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Print the training-set size left by each filter.
    Sizes {
        #[arg(long, default_value = "data")]
        data_dir: PathBuf,
        #[arg(long, default_value = "chromium,wicket,ambari,camel,derby", value_delimiter = ',')]
        projects: Vec<String>,
        #[arg(long, default_value_t = sbrtune::harness::default_keywords())]
        keywords: usize,
        #[arg(long, default_value_t = FilterConfig::default().threshold)]
        filter_threshold: f64,
    },
}

/// Every flag is optional so that unset flags fall through to the config
/// file and then to the defaults.
#[derive(Args)]
struct RunArgs {
    /// Flat key=value file; flags given here override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    data_dir: Option<String>,
    /// Comma list of chromium, wicket, ambari, camel, derby.
    #[arg(long)]
    projects: Option<String>,
    /// Comma list of train, farsecsq, farsectwo, farsec, clni, clnifarsecsq, clnifarsectwo, clnifarsec.
    #[arg(long)]
    filters: Option<String>,
    /// Comma list of baseline_default, learner_tuning, smote_default, smotuned.
    #[arg(long)]
    treatments: Option<String>,
    /// Comma list of RF, NB, LR, MLP, KNN.
    #[arg(long)]
    learners: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    /// Repeat i runs with seed + i.
    #[arg(long)]
    repeats: Option<String>,
    /// DE generations for learner tuning; a comma list adds one column per budget.
    #[arg(long)]
    de_gens: Option<String>,
    #[arg(long)]
    jobs: Option<String>,
    #[arg(long)]
    out: Option<String>,
    /// Write DE traces to traces.csv.
    #[arg(long)]
    trace: bool,
    /// Fill the minutes column with wall-clock time.
    #[arg(long)]
    timings: bool,
    #[arg(long)]
    smote_k: Option<String>,
    #[arg(long)]
    smote_m: Option<String>,
    #[arg(long)]
    smote_r: Option<String>,
    /// pre: each class targets m% of the input; post: the output is m% of the input.
    #[arg(long)]
    smote_m_basis: Option<String>,
    #[arg(long)]
    filter_threshold: Option<String>,
    /// Number of top-scoring terms used as features.
    #[arg(long)]
    keywords: Option<String>,
    /// Write each project's term scores to keywords_<project>.csv.
    #[arg(long)]
    save_keywords: bool,
}

impl RunArgs {
    fn pairs(&self) -> Vec<(String, String)> {
        let opts = [
            ("data-dir", &self.data_dir),
            ("projects", &self.projects),
            ("filters", &self.filters),
            ("treatments", &self.treatments),
            ("learners", &self.learners),
            ("seed", &self.seed),
            ("repeats", &self.repeats),
            ("de-gens", &self.de_gens),
            ("jobs", &self.jobs),
            ("out", &self.out),
            ("smote-k", &self.smote_k),
            ("smote-m", &self.smote_m),
            ("smote-r", &self.smote_r),
            ("smote-m-basis", &self.smote_m_basis),
            ("filter-threshold", &self.filter_threshold),
            ("keywords", &self.keywords),
        ];
        let mut out: Vec<(String, String)> = opts
            .into_iter()
            .filter_map(|(k, v)| v.as_ref().map(|v| (k.to_string(), v.clone())))
            .collect();
        for (k, set) in [
            ("trace", self.trace),
            ("timings", self.timings),
            ("save-keywords", self.save_keywords),
        ] {
            if set {
                out.push((k.to_string(), "true".to_string()));
            }
        }
        out
    }
}

fn run(args: &RunArgs) -> Result<bool> {
    let mut layers = Vec::new();
    if let Some(path) = &args.config {
        layers.push(read_config_file(path)?);
    }
    layers.push(args.pairs());
    let cfg = RunConfig::resolve(&layers)?;
    let outcome = grid::run(&cfg)?;
    let m = &outcome.manifest;
    eprintln!(
        "{} of {} cells completed; results in {}",
        m.completed,
        m.planned,
        cfg.out.join(grid::RESULTS_FILE).display()
    );
    for f in &m.failed {
        eprintln!("failed: {}: {}", f.cell, f.error);
    }
    for n in &m.notes {
        eprintln!("{n}");
    }
    Ok(outcome.ok())
}

fn report(results: &PathBuf, out: Option<&PathBuf>) -> Result<()> {
    let text = std::fs::read_to_string(results).with_context(|| format!("reading {}", results.display()))?;
    let rendered = render(&text).with_context(|| format!("in {}", results.display()))?;
    let dir = out
        .cloned()
        .unwrap_or_else(|| results.parent().map(PathBuf::from).unwrap_or_default());
    if !dir.as_os_str().is_empty() {
        std::fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    for (name, body) in [
        (grid::RANKS_FILE, &rendered.ranks_csv),
        (grid::DELTAS_FILE, &rendered.deltas_csv),
        (grid::REPORT_FILE, &rendered.report_md),
    ] {
        let path = dir.join(name);
        std::fs::write(&path, body).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run(args) => run(args),
        Command::Report { results, out } => report(results, out.as_ref()).map(|_| true),
        Command::Synth {
            out,
            projects,
            scale,
            seed,
        } => tools::synth(
            out,
            projects,
            &SurrogateConfig {
                scale: *scale,
                seed: *seed,
            },
        )
        .map(|_| true),
        Command::Sizes {
            data_dir,
            projects,
            keywords,
            filter_threshold,
        } => {
            let cfg = FilterConfig {
                threshold: *filter_threshold,
                ..FilterConfig::default()
            };
            tools::filter_sizes(data_dir, projects, &sbrtune::FilterKind::ALL, *keywords, &cfg).map(|csv| {
                print!("{csv}");
                true
            })
        }
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
