//! Result types shared by every checker: flat pass/fail reports with named
//! checks, and the three-valued isomorphism verdict.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub title: String,
    pub passed: bool,
    pub checks: Vec<CheckOutcome>,
}

impl Report {
    pub fn new(title: impl Into<String>) -> Self {
        Report { title: title.into(), passed: true, checks: Vec::new() }
    }

    pub fn pass(&mut self, name: impl Into<String>, detail: impl Into<String>) {
        self.checks.push(CheckOutcome { name: name.into(), passed: true, detail: detail.into() });
    }

    pub fn fail(&mut self, name: impl Into<String>, detail: impl Into<String>) {
        self.passed = false;
        self.checks.push(CheckOutcome { name: name.into(), passed: false, detail: detail.into() });
    }

    pub fn record(&mut self, name: impl Into<String>, ok: bool, detail: impl Into<String>) {
        if ok {
            self.pass(name, detail);
        } else {
            self.fail(name, detail);
        }
    }

    pub fn merge(&mut self, other: Report) {
        self.passed &= other.passed;
        self.checks.extend(other.checks);
    }

    pub fn first_failure(&self) -> Option<&CheckOutcome> {
        self.checks.iter().find(|c| !c.passed)
    }
}

/// Outcome of a product-versus-coproduct comparison. `Iso` carries a
/// certificate that was verified before the verdict was issued; `NotIso`
/// carries the reasoning chain; `IsoConsistent` is the idempotent-world
/// answer where the comparison holds by construction at every sampled size.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Verdict {
    Iso { certificate: Vec<String> },
    NotIso { reasoning: Vec<String> },
    IsoConsistent { witness: Vec<String> },
}

impl Verdict {
    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Iso { .. } => "ISO",
            Verdict::NotIso { .. } => "NOT-ISO",
            Verdict::IsoConsistent { .. } => "ISO-CONSISTENT",
        }
    }

    pub fn lines(&self) -> &[String] {
        match self {
            Verdict::Iso { certificate } => certificate,
            Verdict::NotIso { reasoning } => reasoning,
            Verdict::IsoConsistent { witness } => witness,
        }
    }
}
