//! Machine-readable check records.

use std::path::Path;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::Result;

pub const REPORT_VERSION: &str = "1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub measured: f64,
    pub target: f64,
    pub tol: f64,
    pub pass: bool,
    pub seconds: f64,
    /// human-readable breakdown for multi-part checks
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Check {
    /// Passes when |measured - target| ≤ tol.
    pub fn absolute(name: impl Into<String>, measured: f64, target: f64, tol: f64, started: Instant) -> Self {
        Self {
            name: name.into(),
            measured,
            target,
            tol,
            pass: (measured - target).abs() <= tol,
            seconds: started.elapsed().as_secs_f64(),
            detail: None,
        }
    }

    /// Passes when |measured/target - 1| ≤ tol.
    pub fn relative(name: impl Into<String>, measured: f64, target: f64, tol: f64, started: Instant) -> Self {
        let mut c = Self::absolute(name, measured, target, tol, started);
        c.pass = (measured / target - 1.0).abs() <= tol;
        c
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = Some(detail.into());
        self
    }

    /// Additionally require the check to finish within `budget` seconds.
    pub fn within(mut self, budget: f64) -> Self {
        if self.seconds > budget {
            self.pass = false;
            let note = format!("over time budget: {:.1}s > {budget}s", self.seconds);
            self.detail = Some(match self.detail.take() {
                Some(d) => format!("{d}; {note}"),
                None => note,
            });
        }
        self
    }

    pub fn line(&self) -> String {
        let mut s = format!(
            "{} {}: measured={:.6} target={:.6} tol={:.4} ({:.1}s)",
            if self.pass { "PASS" } else { "FAIL" },
            self.name,
            self.measured,
            self.target,
            self.tol,
            self.seconds
        );
        if let Some(d) = &self.detail {
            s.push_str(" -- ");
            s.push_str(d);
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub version: String,
    pub config: serde_json::Value,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn new(config: serde_json::Value) -> Self {
        Self {
            version: REPORT_VERSION.to_string(),
            config,
            checks: Vec::new(),
        }
    }

    pub fn push(&mut self, check: Check) {
        self.checks.push(check);
    }

    pub fn extend(&mut self, other: Report) {
        self.checks.extend(other.checks);
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report is serializable")
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir)?;
        }
        std::fs::write(path, self.to_json())?;
        Ok(())
    }
}
