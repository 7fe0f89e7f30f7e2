//! Outcome records of the inequality checks and their JSON/CSV forms.

use crate::io::fmt_f64;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Parameters an inequality instance was evaluated at (absent ones are null).
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ReportParams {
    pub p: Option<f64>,
    pub gamma: Option<f64>,
    pub k: Option<u32>,
    pub rho: Option<f64>,
    pub radius: Option<f64>,
}

/// One checked inequality: LHS/RHS ratios over its test cases, the constant
/// they are compared with, and the verdict `pass = max_ratio <= fitted_constant`.
///
/// A check whose hypotheses are not met by the requested parameters makes no
/// claim; it is reported with `skipped` set, zero cases and a vacuous pass.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InequalityReport {
    pub lemma: String,
    pub cases: usize,
    pub max_ratio: f64,
    pub fitted_constant: f64,
    pub pass: bool,
    pub skipped: Option<String>,
    pub params: ReportParams,
    /// auxiliary named values (fitted constants, reference expressions)
    pub values: BTreeMap<String, f64>,
    pub notes: Vec<String>,
}

impl InequalityReport {
    /// Builds a report and sets `pass` from the ratio and constant.
    pub fn new(
        lemma: impl Into<String>,
        cases: usize,
        max_ratio: f64,
        fitted_constant: f64,
        params: ReportParams,
    ) -> Self {
        let pass = max_ratio.is_finite() && max_ratio >= 0.0 && max_ratio <= fitted_constant;
        Self {
            lemma: lemma.into(),
            cases,
            max_ratio,
            fitted_constant,
            pass,
            skipped: None,
            params,
            values: BTreeMap::new(),
            notes: Vec::new(),
        }
    }

    pub fn skipped(
        lemma: impl Into<String>,
        reason: impl Into<String>,
        params: ReportParams,
    ) -> Self {
        Self {
            lemma: lemma.into(),
            cases: 0,
            max_ratio: 0.0,
            fitted_constant: 1.0,
            pass: true,
            skipped: Some(reason.into()),
            params,
            values: BTreeMap::new(),
            notes: Vec::new(),
        }
    }

    pub fn with_value(mut self, name: &str, v: f64) -> Self {
        self.values.insert(name.to_string(), v);
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }

    /// Forces a failure that the ratio alone does not express.
    pub fn fail(mut self, note: impl Into<String>) -> Self {
        self.pass = false;
        self.notes.push(note.into());
        self
    }
}

/// Pretty JSON array of reports.
pub fn reports_to_json(reports: &[InequalityReport]) -> String {
    serde_json::to_string_pretty(reports).expect("reports serialize")
}

/// One line per report: lemma, cases, max_ratio, fitted_constant, pass, skipped.
pub fn reports_summary_csv(reports: &[InequalityReport]) -> String {
    let mut s = String::from("lemma,cases,max_ratio,fitted_constant,pass,skipped\n");
    for r in reports {
        s.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.lemma,
            r.cases,
            fmt_f64(r.max_ratio),
            fmt_f64(r.fitted_constant),
            r.pass,
            r.skipped.is_some()
        ));
    }
    s
}

/// True when every report passes (skipped ones pass vacuously).
pub fn all_pass(reports: &[InequalityReport]) -> bool {
    reports.iter().all(|r| r.pass)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pass_follows_ratio() {
        let ok = InequalityReport::new("x", 3, 0.5, 1.0, ReportParams::default());
        assert!(ok.pass);
        let bad = InequalityReport::new("x", 3, 1.5, 1.0, ReportParams::default());
        assert!(!bad.pass);
        let nan = InequalityReport::new("x", 3, f64::NAN, 1.0, ReportParams::default());
        assert!(!nan.pass);
        let json = reports_to_json(std::slice::from_ref(&ok));
        let back: Vec<InequalityReport> = serde_json::from_str(&json).unwrap();
        assert_eq!(back, vec![ok]);
        assert!(reports_summary_csv(&[bad])
            .lines()
            .nth(1)
            .unwrap()
            .contains("false"));
    }
}
