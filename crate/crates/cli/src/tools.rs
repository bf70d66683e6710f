//! Smaller subcommands: surrogate data and training-set sizes per filter.

use std::fmt::Write as _;
use std::path::Path;

use anyhow::{anyhow, Context, Result};
use sbrtune::filters::{apply_filter, FilterConfig};
use sbrtune::harness::load_project;
use sbrtune::surrogate::{profile, write_project, SurrogateConfig};
use sbrtune::{FilterKind, Label};

/// Writes surrogate train/test reports for each project under `out`.
pub fn synth(out: &Path, projects: &[String], cfg: &SurrogateConfig) -> Result<()> {
    for name in projects {
        let p = profile(name).ok_or_else(|| anyhow!("unknown project `{name}`"))?;
        write_project(out, &p, cfg).with_context(|| format!("writing surrogate data for {name}"))?;
    }
    Ok(())
}

pub const SIZES_HEADER: &str = "project,filter,rows,sbr,nsbr";

/// Training rows left by each filter, as CSV.
pub fn filter_sizes(
    data_dir: &Path,
    projects: &[String],
    filters: &[FilterKind],
    keywords: usize,
    cfg: &FilterConfig,
) -> Result<String> {
    let mut s = format!("{SIZES_HEADER}\n");
    for name in projects {
        let data = load_project(data_dir, name, keywords).with_context(|| format!("loading project {name}"))?;
        for &f in filters {
            let d = apply_filter(&data.train, f, cfg)?;
            let sbr = d.count(Label::Sbr);
            let _ = writeln!(s, "{name},{f},{},{sbr},{}", d.n_rows(), d.n_rows() - sbr);
        }
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sizes_of_surrogate_projects() {
        let dir = tempfile::tempdir().unwrap();
        let projects = vec!["wicket".to_string()];
        synth(dir.path(), &projects, &SurrogateConfig { scale: 0.2, seed: 3 }).unwrap();
        let csv = filter_sizes(dir.path(), &projects, &FilterKind::ALL, 50, &FilterConfig::default()).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 9);
        assert!(lines[1].starts_with("wicket,train,100,"));
        assert!(synth(dir.path(), &["firefox".to_string()], &SurrogateConfig::default()).is_err());
    }
}
