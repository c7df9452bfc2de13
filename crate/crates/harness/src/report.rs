//! Report rows and their CSV form.

use std::fs;
use std::path::Path;

use crate::error::HarnessError;

pub const CSV_HEADER: [&str; 10] =
    ["suite", "model", "n", "N", "replicas", "statistic", "value", "stderr", "tolerance", "pass"];

/// One line of a report. Rows with a tolerance are hard checks and pass
/// iff `value <= tolerance`; the others are informational.
#[derive(Clone, Debug, PartialEq)]
pub struct ReportRow {
    pub suite: String,
    pub model: String,
    pub n: Option<usize>,
    pub cells: Option<usize>,
    pub replicas: Option<usize>,
    pub statistic: String,
    pub value: f64,
    pub stderr: Option<f64>,
    pub tolerance: Option<f64>,
    pub pass: Option<bool>,
}

impl ReportRow {
    pub fn info(suite: &str, model: &str, statistic: impl Into<String>, value: f64) -> Self {
        Self {
            suite: suite.into(),
            model: model.into(),
            n: None,
            cells: None,
            replicas: None,
            statistic: statistic.into(),
            value,
            stderr: None,
            tolerance: None,
            pass: None,
        }
    }

    /// Hard check `value <= tolerance`; NaN fails.
    pub fn check(suite: &str, model: &str, statistic: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Self {
            tolerance: Some(tolerance),
            pass: Some(value <= tolerance),
            ..Self::info(suite, model, statistic, value)
        }
    }

    pub fn n(mut self, n: usize) -> Self {
        self.n = Some(n);
        self
    }

    pub fn cells(mut self, cells: usize) -> Self {
        self.cells = Some(cells);
        self
    }

    pub fn replicas(mut self, replicas: usize) -> Self {
        self.replicas = Some(replicas);
        self
    }

    pub fn stderr(mut self, se: f64) -> Self {
        self.stderr = Some(se);
        self
    }

    pub fn failed(&self) -> bool {
        self.pass == Some(false)
    }

    fn fields(&self) -> [String; 10] {
        let opt_u = |v: Option<usize>| v.map(|x| x.to_string()).unwrap_or_default();
        let opt_f = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        [
            self.suite.clone(),
            self.model.clone(),
            opt_u(self.n),
            opt_u(self.cells),
            opt_u(self.replicas),
            self.statistic.clone(),
            self.value.to_string(),
            opt_f(self.stderr),
            opt_f(self.tolerance),
            self.pass.map(|p| if p { "true" } else { "false" }.to_string()).unwrap_or_default(),
        ]
    }
}

/// Rows of one suite run plus human-readable descriptions of failures.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SuiteReport {
    pub rows: Vec<ReportRow>,
    pub failures: Vec<String>,
}

impl SuiteReport {
    pub fn all_passed(&self) -> bool {
        self.failures.is_empty() && !self.rows.iter().any(ReportRow::failed)
    }

    pub fn row(&self, statistic: &str) -> Option<&ReportRow> {
        self.rows.iter().find(|r| r.statistic == statistic)
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(CSV_HEADER).expect("in-memory write");
        for row in &self.rows {
            w.write_record(row.fields()).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("CSV is UTF-8")
    }

    pub fn write_csv(&self, path: &Path) -> Result<(), HarnessError> {
        fs::write(path, self.to_csv()).map_err(|source| HarnessError::Io { path: path.to_path_buf(), source })
    }
}
