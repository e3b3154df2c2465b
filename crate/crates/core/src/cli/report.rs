//! Reports: JSON documents, CSV tables and a wall-time sidecar.
//!
//! The JSON report and the CSV table depend only on the configuration, so repeated
//! runs produce identical bytes. Wall times go to a separate `.timings.json` file.

use std::path::{Path, PathBuf};

use serde::Serialize;

use super::config::Config;
use crate::error::Result;
use crate::mesh::{io, SurfaceMesh};

pub const REPORT_FORMAT: &str = "endlab-report";
pub const REPORT_VERSION: u32 = 1;

/// Where a reference value comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Oracle {
    /// Closed form or quadrature independent of the mesh.
    Analytic,
    /// Holds exactly up to rounding and solver tolerance.
    Identity,
    /// A stated inequality or threshold.
    StatedBound,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Rule {
    /// `|value - reference| ≤ tolerance · |reference|`
    Relative,
    /// `|value - reference| ≤ tolerance`
    Absolute,
    /// `value ≤ reference + tolerance`
    AtMost,
    /// `value ≥ reference - tolerance`
    AtLeast,
    /// `value` is 1 (true) or 0 (false); passes when 1.
    Holds,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub reference: f64,
    pub tolerance: f64,
    pub rule: Rule,
    pub oracle: Oracle,
    pub passed: bool,
}

impl Check {
    fn new(name: &str, value: f64, reference: f64, tolerance: f64, rule: Rule, oracle: Oracle) -> Self {
        let passed = match rule {
            Rule::Relative => (value - reference).abs() <= tolerance * reference.abs(),
            Rule::Absolute => (value - reference).abs() <= tolerance,
            Rule::AtMost => value <= reference + tolerance,
            Rule::AtLeast => value >= reference - tolerance,
            Rule::Holds => value == 1.0,
        };
        Check {
            name: name.into(),
            value,
            reference,
            tolerance,
            rule,
            oracle,
            passed,
        }
    }

    pub fn relative(name: &str, value: f64, reference: f64, tol: f64, oracle: Oracle) -> Self {
        Self::new(name, value, reference, tol, Rule::Relative, oracle)
    }

    pub fn absolute(name: &str, value: f64, reference: f64, tol: f64, oracle: Oracle) -> Self {
        Self::new(name, value, reference, tol, Rule::Absolute, oracle)
    }

    pub fn at_most(name: &str, value: f64, bound: f64, oracle: Oracle) -> Self {
        Self::new(name, value, bound, 0.0, Rule::AtMost, oracle)
    }

    pub fn at_least(name: &str, value: f64, bound: f64, oracle: Oracle) -> Self {
        Self::new(name, value, bound, 0.0, Rule::AtLeast, oracle)
    }

    pub fn holds(name: &str, ok: bool, oracle: Oracle) -> Self {
        Self::new(name, if ok { 1.0 } else { 0.0 }, 1.0, 0.0, Rule::Holds, oracle)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MeshInfo {
    pub name: String,
    pub sha256: String,
    pub vertices: usize,
    pub edges: usize,
    pub triangles: usize,
}

impl MeshInfo {
    pub fn of(name: impl Into<String>, mesh: &SurfaceMesh) -> Self {
        MeshInfo {
            name: name.into(),
            sha256: io::mesh_hash(mesh),
            vertices: mesh.num_vertices(),
            edges: mesh.num_edges(),
            triangles: mesh.num_triangles(),
        }
    }
}

/// Plot-ready table, one row per level.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row
                .iter()
                .map(|x| if x.is_finite() { format!("{x:e}") } else { String::new() })
                .collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub format: &'static str,
    pub version: u32,
    pub pipeline: String,
    pub config: Config,
    pub meshes: Vec<MeshInfo>,
    pub results: serde_json::Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub table: Option<Table>,
    pub checks: Vec<Check>,
    pub passed: bool,
    #[serde(skip)]
    pub timings: Vec<(String, f64)>,
}

impl Report {
    pub fn new(pipeline: &str, config: &Config) -> Self {
        Report {
            format: REPORT_FORMAT,
            version: REPORT_VERSION,
            pipeline: pipeline.into(),
            config: config.clone(),
            meshes: Vec::new(),
            results: serde_json::Value::Null,
            table: None,
            checks: Vec::new(),
            passed: true,
            timings: Vec::new(),
        }
    }

    pub fn check(&mut self, c: Check) {
        self.passed &= c.passed;
        self.checks.push(c);
    }

    pub fn results<T: Serialize>(&mut self, value: &T) {
        self.results = serde_json::to_value(value).expect("report values serialize");
    }

    pub fn time<T>(&mut self, stage: &str, f: impl FnOnce() -> T) -> T {
        let start = std::time::Instant::now();
        let out = f();
        self.timings.push((stage.into(), start.elapsed().as_secs_f64()));
        out
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }

    pub fn timings_json(&self) -> String {
        let map: serde_json::Map<String, serde_json::Value> = self
            .timings
            .iter()
            .map(|(k, v)| (k.clone(), serde_json::Value::from(*v)))
            .collect();
        serde_json::to_string_pretty(&map).expect("timings serialize") + "\n"
    }
}

/// Paths written next to a report at `path`: the CSV table and the timings sidecar.
pub fn companion_paths(path: &Path) -> (PathBuf, PathBuf) {
    let mut timings = path.as_os_str().to_owned();
    timings.push(".timings.json");
    (path.with_extension("csv"), PathBuf::from(timings))
}

/// Writes the report, its table (to `table` or next to the report) and the timings sidecar.
pub fn emit_report(report: &Report, path: &Path, table: Option<&Path>) -> Result<()> {
    std::fs::write(path, report.to_json())?;
    let (csv, timings) = companion_paths(path);
    if let Some(t) = &report.table {
        std::fs::write(table.unwrap_or(&csv), t.to_csv())?;
    }
    std::fs::write(timings, report.timings_json())?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_has_header_and_one_row_per_level() {
        let mut t = Table::new(&["level", "value"]);
        t.push(vec![0.0, 1.5]);
        t.push(vec![1.0, f64::NAN]);
        assert_eq!(t.to_csv(), "level,value\n0e0,1.5e0\n1e0,\n");
    }

    #[test]
    fn check_rules() {
        assert!(Check::relative("a", 1.01, 1.0, 0.02, Oracle::Analytic).passed);
        assert!(!Check::relative("a", 1.03, 1.0, 0.02, Oracle::Analytic).passed);
        assert!(Check::at_most("b", 1e-9, 1e-8, Oracle::Identity).passed);
        assert!(!Check::holds("c", false, Oracle::Identity).passed);
    }
}
