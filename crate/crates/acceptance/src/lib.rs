//! Bookkeeping for the acceptance run: each criterion collects named
//! checks and prints a single verdict line.

use std::fmt;
use std::time::{Duration, Instant};

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub label: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Default)]
pub struct Criterion {
    pub id: u32,
    pub title: String,
    pub checks: Vec<Check>,
    /// Lines printed under the verdict without affecting it.
    pub notes: Vec<String>,
    pub elapsed: Duration,
}

impl Criterion {
    pub fn new(id: u32, title: &str) -> Self {
        Self { id, title: title.to_string(), ..Self::default() }
    }

    pub fn check(&mut self, label: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check { label: label.into(), passed, detail: detail.into() });
    }

    pub fn note(&mut self, line: impl Into<String>) {
        self.notes.push(line.into());
    }

    pub fn passed(&self) -> bool {
        !self.checks.is_empty() && self.checks.iter().all(|c| c.passed)
    }
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed() { "PASS" } else { "FAIL" };
        let failed: Vec<&str> = self.checks.iter().filter(|c| !c.passed).map(|c| c.label.as_str()).collect();
        write!(f, "{verdict} criterion {}: {} ({} checks, {:.2?})", self.id, self.title, self.checks.len(), self.elapsed)?;
        if !failed.is_empty() {
            write!(f, " failed: {}", failed.join(", "))?;
        }
        for c in &self.checks {
            write!(f, "\n    [{}] {}: {}", if c.passed { "ok" } else { "FAIL" }, c.label, c.detail)?;
        }
        for n in &self.notes {
            write!(f, "\n    note: {n}")?;
        }
        Ok(())
    }
}

/// Runs `body` and records its wall time on the criterion.
pub fn timed(id: u32, title: &str, body: impl FnOnce(&mut Criterion)) -> Criterion {
    let mut c = Criterion::new(id, title);
    let start = Instant::now();
    body(&mut c);
    c.elapsed = start.elapsed();
    c
}
