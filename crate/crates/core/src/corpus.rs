//! Labelled bug reports, feature matrices and stratified fold assignment.
//!
//! Two on-disk shapes are supported. Raw reports ([`load_reports`]) carry an
//! id, free text (summary and/or description) and a binary `security` flag.
//! Feature matrices ([`load_matrix`] / [`save_matrix`]) use the canonical CSV
//! layout: `id` first, one column per feature, `label` (0/1) last.

use std::collections::HashSet;
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;

use crate::error::{Error, Result};
use crate::util::{self, format_g6};

/// Binary target class. `Sbr` is the positive class throughout.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    Nsbr,
    Sbr,
}

impl Label {
    pub fn from_flag(security: bool) -> Self {
        if security {
            Label::Sbr
        } else {
            Label::Nsbr
        }
    }

    pub fn is_security(self) -> bool {
        self == Label::Sbr
    }

    pub fn flag(self) -> u8 {
        u8::from(self.is_security())
    }

    pub fn other(self) -> Self {
        match self {
            Label::Sbr => Label::Nsbr,
            Label::Nsbr => Label::Sbr,
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Label::Sbr => "SBR",
            Label::Nsbr => "NSBR",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BugReport {
    pub id: String,
    /// Summary and description joined by a newline.
    pub text: String,
    pub label: Label,
}

/// A collection of reports with unique, nonempty ids.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Corpus {
    reports: Vec<BugReport>,
}

impl Corpus {
    pub fn new(reports: Vec<BugReport>) -> Result<Self> {
        let mut seen = HashSet::with_capacity(reports.len());
        for r in &reports {
            if r.id.is_empty() {
                return Err(Error::invalid("report id must be nonempty"));
            }
            if !seen.insert(r.id.as_str()) {
                return Err(Error::DuplicateId(r.id.clone()));
            }
        }
        Ok(Self { reports })
    }

    pub fn reports(&self) -> &[BugReport] {
        &self.reports
    }

    pub fn len(&self) -> usize {
        self.reports.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reports.is_empty()
    }

    pub fn count(&self, label: Label) -> usize {
        self.reports.iter().filter(|r| r.label == label).count()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    JsonLines,
}

impl ReportFormat {
    /// Guess from the file extension (`.jsonl`/`.json` vs anything else).
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some("jsonl" | "json" | "ndjson") => ReportFormat::JsonLines,
            _ => ReportFormat::Csv,
        }
    }
}

const TEXT_FIELDS: [&str; 3] = ["summary", "description", "text"];
const LABEL_FIELDS: [&str; 2] = ["security", "label"];

pub fn load_reports(path: &Path, format: ReportFormat) -> Result<Corpus> {
    let reports = match format {
        ReportFormat::Csv => read_csv_reports(path)?,
        ReportFormat::JsonLines => read_jsonl_reports(path)?,
    };
    Corpus::new(reports)
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn ingest_err(path: &Path, record: &str, message: impl Into<String>) -> Error {
    Error::Ingest {
        path: path.to_path_buf(),
        record: record.to_string(),
        message: message.into(),
    }
}

fn parse_label_text(raw: &str) -> Option<Label> {
    match raw.trim().to_ascii_lowercase().as_str() {
        "1" | "true" => Some(Label::Sbr),
        "0" | "false" => Some(Label::Nsbr),
        _ => None,
    }
}

fn read_csv_reports(path: &Path) -> Result<Vec<BugReport>> {
    let file = File::open(path).map_err(io_err(path))?;
    let mut reader = csv::ReaderBuilder::new().flexible(false).from_reader(file);
    let headers = match reader.headers() {
        Ok(h) => h.clone(),
        Err(e) => return Err(csv_err(path, e)),
    };
    if headers.is_empty() {
        return Ok(Vec::new());
    }
    let find = |name: &str| headers.iter().position(|h| h.trim().eq_ignore_ascii_case(name));
    let id_col = find("id").ok_or_else(|| ingest_err(path, "<header>", "no `id` column"))?;
    let text_cols: Vec<usize> = TEXT_FIELDS.iter().filter_map(|f| find(f)).collect();
    let label_cols: Vec<usize> = LABEL_FIELDS.iter().filter_map(|f| find(f)).collect();

    let mut out = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| csv_err(path, e))?;
        let id = rec.get(id_col).unwrap_or("").trim().to_string();
        let record_name = if id.is_empty() {
            format!("#{}", i + 1)
        } else {
            id.clone()
        };
        let label = match label_cols.as_slice() {
            [] => return Err(ingest_err(path, &record_name, "label absent")),
            [col] => {
                let raw = rec.get(*col).unwrap_or("");
                if raw.trim().is_empty() {
                    return Err(ingest_err(path, &record_name, "label absent"));
                }
                parse_label_text(raw)
                    .ok_or_else(|| ingest_err(path, &record_name, format!("label `{raw}` is not binary")))?
            }
            _ => {
                return Err(ingest_err(
                    path,
                    &record_name,
                    "ambiguous label: both `security` and `label` columns present",
                ))
            }
        };
        let text = text_cols
            .iter()
            .filter_map(|&c| rec.get(c))
            .filter(|s| !s.is_empty())
            .collect::<Vec<_>>()
            .join("\n");
        out.push(BugReport { id, text, label });
    }
    Ok(out)
}

fn csv_err(path: &Path, e: csv::Error) -> Error {
    let line = e.position().map(|p| p.line() as usize).unwrap_or(0);
    Error::Parse {
        path: path.to_path_buf(),
        line,
        column: 0,
        message: e.to_string(),
    }
}

fn read_jsonl_reports(path: &Path) -> Result<Vec<BugReport>> {
    use serde_json::Value;

    let file = File::open(path).map_err(io_err(path))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(io_err(path))?;
        if line.trim().is_empty() {
            continue;
        }
        let value: Value = serde_json::from_str(&line).map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            line: i + 1,
            column: e.column(),
            message: e.to_string(),
        })?;
        let obj = value
            .as_object()
            .ok_or_else(|| ingest_err(path, &format!("line {}", i + 1), "not a JSON object"))?;
        let id = match obj.get("id") {
            Some(Value::String(s)) => s.clone(),
            Some(Value::Number(n)) => n.to_string(),
            _ => String::new(),
        };
        let record_name = if id.is_empty() {
            format!("line {}", i + 1)
        } else {
            id.clone()
        };
        let present: Vec<&Value> = LABEL_FIELDS.iter().filter_map(|f| obj.get(*f)).collect();
        let label = match present.as_slice() {
            [] => return Err(ingest_err(path, &record_name, "label absent")),
            [v] => match v {
                Value::Bool(b) => Label::from_flag(*b),
                Value::Number(n) if n.as_f64() == Some(1.0) => Label::Sbr,
                Value::Number(n) if n.as_f64() == Some(0.0) => Label::Nsbr,
                Value::String(s) => parse_label_text(s)
                    .ok_or_else(|| ingest_err(path, &record_name, format!("label `{s}` is not binary")))?,
                other => return Err(ingest_err(path, &record_name, format!("label `{other}` is not binary"))),
            },
            _ => {
                return Err(ingest_err(
                    path,
                    &record_name,
                    "ambiguous label: both `security` and `label` fields present",
                ))
            }
        };
        let text = TEXT_FIELDS
            .iter()
            .filter_map(|f| obj.get(*f).and_then(Value::as_str))
            .filter(|s| !s.is_empty())
            .collect::<Vec<_>>()
            .join("\n");
        out.push(BugReport { id, text, label });
    }
    Ok(out)
}

/// Whether a dataset may feed training-side stages (filters, SMOTE, tuning).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Role {
    Train,
    Test,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Provenance {
    pub project: String,
    pub filter: String,
    pub role: Role,
}

impl Provenance {
    pub fn new(project: impl Into<String>, filter: impl Into<String>, role: Role) -> Self {
        Self {
            project: project.into(),
            filter: filter.into(),
            role,
        }
    }

    pub fn train(project: impl Into<String>) -> Self {
        Self::new(project, "train", Role::Train)
    }

    pub fn test(project: impl Into<String>) -> Self {
        Self::new(project, "test", Role::Test)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub id: String,
    pub values: Vec<f64>,
    pub label: Label,
}

/// Immutable labelled feature matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    feature_names: Vec<String>,
    rows: Vec<Row>,
    provenance: Provenance,
}

impl Dataset {
    pub fn new(feature_names: Vec<String>, rows: Vec<Row>, provenance: Provenance) -> Result<Self> {
        let width = feature_names.len();
        let mut ids = HashSet::with_capacity(rows.len());
        for row in &rows {
            if row.values.len() != width {
                return Err(Error::DimensionMismatch {
                    expected: width,
                    got: row.values.len(),
                });
            }
            if let Some(v) = row.values.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
                return Err(Error::invalid(format!(
                    "row `{}` has invalid feature value {v}",
                    row.id
                )));
            }
            if !ids.insert(row.id.as_str()) {
                return Err(Error::DuplicateId(row.id.clone()));
            }
        }
        Ok(Self {
            feature_names,
            rows,
            provenance,
        })
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn rows(&self) -> &[Row] {
        &self.rows
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_features(&self) -> usize {
        self.feature_names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn count(&self, label: Label) -> usize {
        self.rows.iter().filter(|r| r.label == label).count()
    }

    pub fn labels(&self) -> Vec<Label> {
        self.rows.iter().map(|r| r.label).collect()
    }

    /// Same features and provenance, different rows.
    pub fn with_rows(&self, rows: Vec<Row>) -> Result<Self> {
        Self::new(self.feature_names.clone(), rows, self.provenance.clone())
    }

    /// Rows at `indices`, in that order. Indices must be distinct.
    pub fn subset(&self, indices: &[usize]) -> Self {
        Self {
            feature_names: self.feature_names.clone(),
            rows: indices.iter().map(|&i| self.rows[i].clone()).collect(),
            provenance: self.provenance.clone(),
        }
    }

    pub fn with_filter_tag(mut self, filter: impl Into<String>) -> Self {
        self.provenance.filter = filter.into();
        self
    }

    /// Rejects test-role data at a training-only stage.
    pub fn ensure_training(&self, stage: &'static str) -> Result<()> {
        match self.provenance.role {
            Role::Train => Ok(()),
            Role::Test => Err(Error::TestDataLeak {
                stage,
                project: self.provenance.project.clone(),
            }),
        }
    }

    pub fn ensure_both_classes(&self) -> Result<()> {
        for label in [Label::Sbr, Label::Nsbr] {
            if self.count(label) == 0 {
                return Err(Error::MissingClass(label));
            }
        }
        Ok(())
    }
}

/// Reads a canonical matrix CSV. A leading `id` column is optional; when it
/// is missing, rows are numbered from 1.
pub fn load_matrix(path: &Path, provenance: Provenance) -> Result<Dataset> {
    let file = File::open(path).map_err(io_err(path))?;
    let mut reader = csv::ReaderBuilder::new().from_reader(file);
    let headers = reader.headers().map_err(|e| csv_err(path, e))?.clone();
    if headers.len() < 2 {
        return Err(Error::Parse {
            path: path.to_path_buf(),
            line: 1,
            column: headers.len(),
            message: "header needs at least one feature or id column and a label".into(),
        });
    }
    let has_id = headers.get(0).is_some_and(|h| h.trim().eq_ignore_ascii_case("id"));
    let first_feature = usize::from(has_id);
    let label_col = headers.len() - 1;
    let feature_names: Vec<String> = headers
        .iter()
        .skip(first_feature)
        .take(label_col - first_feature)
        .map(str::to_string)
        .collect();

    let mut rows = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| csv_err(path, e))?;
        let line = rec.position().map(|p| p.line() as usize).unwrap_or(i + 2);
        let parse_err = |column: usize, message: String| Error::Parse {
            path: path.to_path_buf(),
            line,
            column: column + 1,
            message,
        };
        let id = if has_id {
            rec.get(0).unwrap_or("").to_string()
        } else {
            (i + 1).to_string()
        };
        let mut values = Vec::with_capacity(feature_names.len());
        for c in first_feature..label_col {
            let cell = rec.get(c).unwrap_or("");
            let v: f64 = cell
                .trim()
                .parse()
                .map_err(|_| parse_err(c, format!("non-numeric feature `{cell}`")))?;
            values.push(v);
        }
        let raw = rec.get(label_col).unwrap_or("");
        let label = match raw.trim() {
            "1" => Label::Sbr,
            "0" => Label::Nsbr,
            _ => return Err(parse_err(label_col, format!("label `{raw}` is not 0 or 1"))),
        };
        rows.push(Row { id, values, label });
    }
    Dataset::new(feature_names, rows, provenance)
}

pub fn write_matrix<W: Write>(d: &Dataset, out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    let to_err = |e: csv::Error| Error::Io {
        path: PathBuf::from("<matrix>"),
        source: std::io::Error::other(e),
    };
    let mut header = Vec::with_capacity(d.n_features() + 2);
    header.push("id".to_string());
    header.extend(d.feature_names.iter().cloned());
    header.push("label".to_string());
    w.write_record(&header).map_err(to_err)?;
    for row in &d.rows {
        let mut rec = Vec::with_capacity(row.values.len() + 2);
        rec.push(row.id.clone());
        rec.extend(row.values.iter().map(|&v| format_g6(v)));
        rec.push(row.label.flag().to_string());
        w.write_record(&rec).map_err(to_err)?;
    }
    w.flush().map_err(|source| Error::Io {
        path: PathBuf::from("<matrix>"),
        source,
    })
}

pub fn save_matrix(d: &Dataset, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(io_err(path))?;
    write_matrix(d, std::io::BufWriter::new(file)).map_err(|e| match e {
        Error::Io { source, .. } => Error::Io {
            path: path.to_path_buf(),
            source,
        },
        other => other,
    })
}

/// Partition of row indices into bins.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoldAssignment {
    pub bins: Vec<Vec<usize>>,
    pub seed: u64,
}

impl FoldAssignment {
    pub fn n_bins(&self) -> usize {
        self.bins.len()
    }

    pub fn test_indices(&self, bin: usize) -> &[usize] {
        &self.bins[bin]
    }

    /// Every index outside `bin`, ascending.
    pub fn train_indices(&self, bin: usize) -> Vec<usize> {
        let mut idx: Vec<usize> = self
            .bins
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != bin)
            .flat_map(|(_, b)| b.iter().copied())
            .collect();
        idx.sort_unstable();
        idx
    }
}

/// Stratified, seeded split into `bins` groups.
///
/// Each class is shuffled, the classes are concatenated (SBR first) and the
/// sequence is dealt round-robin, so bin sizes and per-class counts both
/// differ by at most one between bins.
pub fn split_folds(d: &Dataset, bins: usize, seed: u64) -> Result<FoldAssignment> {
    if bins == 0 {
        return Err(Error::invalid("number of bins must be positive"));
    }
    if bins > d.n_rows() {
        return Err(Error::invalid(format!("{bins} bins requested for {} rows", d.n_rows())));
    }
    d.ensure_both_classes()?;
    let mut rng = util::rng(seed);
    let mut order = Vec::with_capacity(d.n_rows());
    for label in [Label::Sbr, Label::Nsbr] {
        let mut idx: Vec<usize> = (0..d.n_rows()).filter(|&i| d.rows[i].label == label).collect();
        idx.shuffle(&mut rng);
        order.extend(idx);
    }
    let mut out = vec![Vec::with_capacity(d.n_rows() / bins + 1); bins];
    for (pos, idx) in order.into_iter().enumerate() {
        out[pos % bins].push(idx);
    }
    for b in &mut out {
        b.sort_unstable();
    }
    Ok(FoldAssignment { bins: out, seed })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write_tmp(name: &str, body: &str) -> (tempfile::TempDir, PathBuf) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join(name);
        std::fs::File::create(&path)
            .unwrap()
            .write_all(body.as_bytes())
            .unwrap();
        (dir, path)
    }

    fn toy(n_sbr: usize, n_nsbr: usize) -> Dataset {
        let rows = (0..n_sbr + n_nsbr)
            .map(|i| Row {
                id: format!("r{i}"),
                values: vec![i as f64],
                label: Label::from_flag(i < n_sbr),
            })
            .collect();
        Dataset::new(vec!["x".into()], rows, Provenance::train("toy")).unwrap()
    }

    #[test]
    fn csv_reports_map_labels() {
        let (_d, p) = write_tmp(
            "r.csv",
            "id,summary,description,security\nc1,buffer overflow in parser,,1\nc2,typo,in docs,0\n",
        );
        let c = load_reports(&p, ReportFormat::Csv).unwrap();
        assert_eq!(c.len(), 2);
        assert_eq!(c.reports()[0].label, Label::Sbr);
        assert_eq!(c.reports()[0].text, "buffer overflow in parser");
        assert_eq!(c.reports()[1].text, "typo\nin docs");
        assert_eq!(c.reports()[1].label, Label::Nsbr);
    }

    #[test]
    fn jsonl_reports_map_labels() {
        let (_d, p) = write_tmp(
            "r.jsonl",
            "{\"id\":\"c1\",\"summary\":\"buffer overflow in parser\",\"security\":1}\n\n{\"id\":7,\"text\":\"x\",\"security\":false}\n",
        );
        let c = load_reports(&p, ReportFormat::JsonLines).unwrap();
        assert_eq!(c.reports()[0].label, Label::Sbr);
        assert_eq!(c.reports()[1].id, "7");
        assert_eq!(c.reports()[1].label, Label::Nsbr);
    }

    #[test]
    fn empty_file_is_empty_corpus() {
        let (_d, p) = write_tmp("e.csv", "");
        assert!(load_reports(&p, ReportFormat::Csv).unwrap().is_empty());
        let (_d2, p2) = write_tmp("e.jsonl", "");
        assert!(load_reports(&p2, ReportFormat::JsonLines).unwrap().is_empty());
    }

    #[test]
    fn missing_label_names_record() {
        let (_d, p) = write_tmp("m.jsonl", "{\"id\":\"c9\",\"summary\":\"x\"}\n");
        let err = load_reports(&p, ReportFormat::JsonLines).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("c9") && msg.contains("label absent"), "{msg}");

        let (_d, p) = write_tmp("m.csv", "id,summary\nc3,x\n");
        let msg = load_reports(&p, ReportFormat::Csv).unwrap_err().to_string();
        assert!(msg.contains("c3") && msg.contains("label absent"), "{msg}");
    }

    #[test]
    fn ambiguous_and_multiclass_labels_rejected() {
        let (_d, p) = write_tmp("a.csv", "id,summary,security,label\nc1,x,1,1\n");
        assert!(load_reports(&p, ReportFormat::Csv)
            .unwrap_err()
            .to_string()
            .contains("ambiguous"));
        let (_d, p) = write_tmp("b.csv", "id,summary,security\nc1,x,2\n");
        assert!(load_reports(&p, ReportFormat::Csv)
            .unwrap_err()
            .to_string()
            .contains("not binary"));
    }

    #[test]
    fn duplicate_ids_rejected() {
        let (_d, p) = write_tmp("d.csv", "id,summary,security\nc1,x,1\nc1,y,0\n");
        assert!(matches!(
            load_reports(&p, ReportFormat::Csv),
            Err(Error::DuplicateId(id)) if id == "c1"
        ));
    }

    #[test]
    fn matrix_parse_error_has_position() {
        let (_d, p) = write_tmp("m.csv", "id,a,b,label\nr1,1,2,0\nr2,3,oops,1\n");
        match load_matrix(&p, Provenance::train("t")) {
            Err(Error::Parse { line, column, .. }) => {
                assert_eq!(line, 3);
                assert_eq!(column, 3);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn one_row_matrix() {
        let (_d, p) = write_tmp("one.csv", "id,overflow,label\nr1,2,1\n");
        let d = load_matrix(&p, Provenance::train("t")).unwrap();
        assert_eq!(d.n_rows(), 1);
        assert_eq!(d.count(Label::Sbr), 1);
        assert_eq!(d.feature_names(), ["overflow".to_string()]);
    }

    #[test]
    fn save_matrix_is_canonical() {
        let rows = vec![
            Row {
                id: "a".into(),
                values: vec![1.0, 0.5, 1234567.0],
                label: Label::Sbr,
            },
            Row {
                id: "b".into(),
                values: vec![0.0, 1.0 / 3.0, 2.0],
                label: Label::Nsbr,
            },
        ];
        let d = Dataset::new(vec!["x".into(), "y".into(), "z".into()], rows, Provenance::train("p")).unwrap();
        let mut buf = Vec::new();
        write_matrix(&d, &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "id,x,y,z,label\na,1,0.5,1.23457e+06,1\nb,0,0.333333,2,0\n"
        );
    }

    #[test]
    fn folds_stratify_one_sbr_per_bin() {
        let d = toy(10, 90);
        let f = split_folds(&d, 10, 7).unwrap();
        for bin in &f.bins {
            assert_eq!(bin.len(), 10);
            assert_eq!(bin.iter().filter(|&&i| d.rows()[i].label == Label::Sbr).count(), 1);
        }
    }

    #[test]
    fn single_bin_is_whole_dataset() {
        let d = toy(3, 5);
        let f = split_folds(&d, 1, 1).unwrap();
        assert_eq!(f.bins, vec![(0..8).collect::<Vec<_>>()]);
    }

    #[test]
    fn folds_are_deterministic() {
        let d = toy(7, 40);
        assert_eq!(split_folds(&d, 5, 3).unwrap(), split_folds(&d, 5, 3).unwrap());
    }

    #[test]
    fn folds_need_both_classes() {
        let d = toy(0, 20);
        assert!(matches!(split_folds(&d, 2, 0), Err(Error::MissingClass(Label::Sbr))));
        assert!(split_folds(&toy(1, 1), 3, 0).is_err());
    }

    #[test]
    fn test_role_is_rejected_for_training_stages() {
        let d = toy(1, 1);
        let t = Dataset::new(d.feature_names().to_vec(), d.rows().to_vec(), Provenance::test("toy")).unwrap();
        assert!(d.ensure_training("x").is_ok());
        assert!(matches!(t.ensure_training("x"), Err(Error::TestDataLeak { .. })));
    }
}
