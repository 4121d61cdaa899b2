use std::fmt::Write as _;

use serde::ser::{SerializeMap, Serializer};
use serde::Serialize;

pub const SCHEMA: &str = "pcoupling-report/1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum Status {
    #[serde(rename = "pass")]
    Pass,
    #[serde(rename = "undecided-at-D")]
    Undecided,
    #[serde(rename = "fail")]
    Fail,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Undecided => "undecided-at-D",
            Status::Fail => "fail",
        }
    }

    pub fn exit_code(self) -> i32 {
        match self {
            Status::Pass => 0,
            Status::Fail => 2,
            Status::Undecided => 3,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Item {
    pub label: String,
    pub value: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct Truncation {
    pub degree_bound: u32,
    /// Every weight block was complete within the bound.
    pub exact: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grading: Option<String>,
    pub undecided: usize,
}

#[derive(Clone, Debug, Default)]
pub struct Report {
    pub command: String,
    pub checks: Vec<Check>,
    pub dims: Vec<(String, usize)>,
    pub representatives: Vec<Item>,
    pub truncation: Option<Truncation>,
    pub notes: Vec<String>,
    pub wall_clock_ms: u64,
}

struct Dims<'a>(&'a [(String, usize)]);

impl Serialize for Dims<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(Some(self.0.len()))?;
        for (k, v) in self.0 {
            m.serialize_entry(k, v)?;
        }
        m.end()
    }
}

#[derive(Serialize)]
struct Residual<'a> {
    check: &'a str,
    value: &'a str,
}

#[derive(Serialize)]
struct Wire<'a> {
    schema: &'static str,
    command: &'a str,
    status: Status,
    checks: &'a [Check],
    dims: Dims<'a>,
    representatives: &'a [Item],
    truncation: &'a Option<Truncation>,
    residuals: Vec<Residual<'a>>,
    notes: &'a [String],
    wall_clock_ms: u64,
}

impl Report {
    pub fn new(command: impl Into<String>) -> Self {
        Report { command: command.into(), ..Default::default() }
    }

    /// Worst status over all checks; a report without checks passes.
    pub fn status(&self) -> Status {
        self.checks.iter().map(|c| c.status).max().unwrap_or(Status::Pass)
    }

    pub fn check(&mut self, name: impl Into<String>, status: Status, residual: Option<String>) {
        self.checks.push(Check { name: name.into(), status, residual });
    }

    /// Pass when `residual` is zero, otherwise fail carrying the residual.
    pub fn residual_check(&mut self, name: impl Into<String>, zero: bool, residual: impl ToString) {
        if zero {
            self.check(name, Status::Pass, None);
        } else {
            self.check(name, Status::Fail, Some(residual.to_string()));
        }
    }

    pub fn flag(&mut self, name: impl Into<String>, ok: bool) {
        self.check(name, if ok { Status::Pass } else { Status::Fail }, None);
    }

    pub fn dim(&mut self, key: impl Into<String>, value: usize) {
        self.dims.push((key.into(), value));
    }

    pub fn rep(&mut self, label: impl Into<String>, value: impl ToString) {
        self.representatives.push(Item { label: label.into(), value: value.to_string() });
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    pub fn dim_value(&self, key: &str) -> Option<usize> {
        self.dims.iter().find(|(k, _)| k == key).map(|(_, v)| *v)
    }

    pub fn check_status(&self, name: &str) -> Option<Status> {
        self.checks.iter().find(|c| c.name == name).map(|c| c.status)
    }

    pub fn to_json(&self) -> String {
        let wire = Wire {
            schema: SCHEMA,
            command: &self.command,
            status: self.status(),
            checks: &self.checks,
            dims: Dims(&self.dims),
            representatives: &self.representatives,
            truncation: &self.truncation,
            residuals: self
                .checks
                .iter()
                .filter_map(|c| c.residual.as_deref().filter(|r| *r != "0").map(|v| Residual { check: &c.name, value: v }))
                .collect(),
            notes: &self.notes,
            wall_clock_ms: self.wall_clock_ms,
        };
        serde_json::to_string_pretty(&wire).expect("report serializes")
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{}: {}", self.command, self.status().as_str());
        for c in &self.checks {
            let _ = match &c.residual {
                Some(r) => writeln!(out, "  {:<24} {}  residual: {}", c.name, c.status.as_str(), r),
                None => writeln!(out, "  {:<24} {}", c.name, c.status.as_str()),
            };
        }
        if !self.dims.is_empty() {
            let _ = writeln!(out, "dimensions:");
            for (k, v) in &self.dims {
                let _ = writeln!(out, "  {:<24} {}", k, v);
            }
        }
        if !self.representatives.is_empty() {
            let _ = writeln!(out, "representatives:");
            for r in &self.representatives {
                let _ = writeln!(out, "  {}: {}", r.label, r.value);
            }
        }
        if let Some(t) = &self.truncation {
            let _ = write!(out, "truncation: degree <= {}", t.degree_bound);
            if let Some(g) = &t.grading {
                let _ = write!(out, ", grading {}", g);
            }
            if !t.exact {
                let _ = write!(out, ", inexact");
            }
            if t.undecided > 0 {
                let _ = write!(out, ", {} undecided", t.undecided);
            }
            let _ = writeln!(out);
        }
        for n in &self.notes {
            let _ = writeln!(out, "note: {}", n);
        }
        let _ = writeln!(out, "wall clock: {} ms", self.wall_clock_ms);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn status_orders_fail_over_undecided() {
        let mut r = Report::new("x");
        assert_eq!(r.status(), Status::Pass);
        r.check("a", Status::Undecided, None);
        assert_eq!(r.status().exit_code(), 3);
        r.residual_check("b", false, "x1");
        assert_eq!(r.status().exit_code(), 2);
    }

    #[test]
    fn json_has_fixed_leading_keys() {
        let mut r = Report::new("verify jacobi open-book");
        r.residual_check("jacobi", true, "0");
        let j = r.to_json();
        assert!(j.starts_with("{\n  \"schema\": \"pcoupling-report/1\",\n  \"command\""));
        assert!(j.contains("\"status\": \"pass\""));
        assert!(!j.contains("\"residual\""));
    }

    #[test]
    fn failing_check_lists_residual() {
        let mut r = Report::new("c");
        r.residual_check("jacobi", false, "2*x1");
        let v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(v["status"], "fail");
        assert_eq!(v["residuals"][0]["value"], "2*x1");
    }
}
