//! Per-sample records shared by the identification suites.

use std::collections::BTreeMap;

use serde::Serialize;

/// One row of a suite: CSV columns `sample_id, params, lhs, rhs, margin,
/// verdict`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteRecord {
    pub sample_id: usize,
    /// Flattened `key=value` pairs joined by `;`.
    pub params: String,
    pub lhs: f64,
    pub rhs: f64,
    /// `rhs - lhs` unless a record documents otherwise.
    pub margin: f64,
    pub verdict: String,
}

impl SuiteRecord {
    pub fn new(sample_id: usize, params: String, lhs: f64, rhs: f64, verdict: impl Into<String>) -> Self {
        Self {
            sample_id,
            params,
            lhs,
            rhs,
            margin: rhs - lhs,
            verdict: verdict.into(),
        }
    }
}

/// Formats `key=value` pairs for [`SuiteRecord::params`].
pub fn params(pairs: &[(&str, String)]) -> String {
    pairs
        .iter()
        .map(|(k, v)| format!("{k}={v}"))
        .collect::<Vec<_>>()
        .join(";")
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct SuiteReport {
    pub name: String,
    pub records: Vec<SuiteRecord>,
    /// Overall verdict of the suite.
    pub verdict: String,
    /// Free-form diagnostics (LP slacks, witness directions, ...).
    pub notes: Vec<String>,
}

impl SuiteReport {
    pub fn new(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            ..Default::default()
        }
    }

    pub fn push(&mut self, r: SuiteRecord) {
        self.records.push(r);
    }

    /// Records sorted by sample id (stable).
    pub fn sort(&mut self) {
        self.records.sort_by_key(|r| r.sample_id);
    }

    pub fn verdict_counts(&self) -> BTreeMap<String, usize> {
        let mut m = BTreeMap::new();
        for r in &self.records {
            *m.entry(r.verdict.clone()).or_insert(0) += 1;
        }
        m
    }

    pub fn count(&self, verdict: &str) -> usize {
        self.records.iter().filter(|r| r.verdict == verdict).count()
    }

    /// One-line summary: name, overall verdict and per-verdict counts.
    pub fn summary(&self) -> String {
        let counts = self
            .verdict_counts()
            .into_iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect::<Vec<_>>()
            .join(" ");
        format!("{}: {} ({})", self.name, self.verdict, counts)
    }
}
