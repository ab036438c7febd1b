//! Report structure shared by every subcommand. Reports are deterministic:
//! effort is measured in proof and check steps, never wall-clock time, so the
//! same inputs and seed always serialize to the same bytes.

use prodsum_core::report::{Report, Verdict};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GoalStatus {
    /// Established by the rewrite prover.
    Proved,
    /// Established by direct checking in a model or by certificate replay.
    Verified,
    /// A counterexample or contradiction settles the goal negatively.
    Refuted,
    /// The goal could not be established.
    Failed,
}

impl GoalStatus {
    pub fn ok(self) -> bool {
        matches!(self, GoalStatus::Proved | GoalStatus::Verified | GoalStatus::Refuted)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GoalResult {
    pub name: String,
    pub status: GoalStatus,
    pub detail: String,
    pub steps: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunReport {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub input: Option<String>,
    pub seed: u64,
    pub budget: u64,
    pub goals: Vec<GoalResult>,
    pub verdict: Option<Verdict>,
    pub steps_total: u64,
    pub exit_status: i32,
}

impl RunReport {
    pub fn new(command: &str, input: Option<String>, seed: u64, budget: u64) -> Self {
        RunReport {
            tool: "prodsum".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            input,
            seed,
            budget,
            goals: Vec::new(),
            verdict: None,
            steps_total: 0,
            exit_status: 0,
        }
    }

    pub fn push(&mut self, name: impl Into<String>, status: GoalStatus, detail: impl Into<String>, steps: u64) {
        self.goals.push(GoalResult { name: name.into(), status, detail: detail.into(), steps });
    }

    /// Fold a core check report in as one goal per recorded check.
    pub fn absorb(&mut self, report: &Report, steps_each: u64) {
        for check in &report.checks {
            let status = if check.passed { GoalStatus::Verified } else { GoalStatus::Failed };
            self.push(
                format!("{}: {}", report.title, check.name),
                status,
                check.detail.clone(),
                steps_each,
            );
        }
    }

    /// Compute the totals; call once after the last goal is recorded.
    pub fn finalize(&mut self) {
        self.steps_total = self.goals.iter().map(|g| g.steps).sum();
        let all_ok = self.goals.iter().all(|g| g.status.ok());
        self.exit_status = if all_ok { 0 } else { 1 };
    }

    pub fn render_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("{} {} :: {}\n", self.tool, self.version, self.command));
        if let Some(input) = &self.input {
            out.push_str(&format!("input: {input}\n"));
        }
        out.push_str(&format!("seed: {}  budget: {}\n", self.seed, self.budget));
        for goal in &self.goals {
            let mark = match goal.status {
                GoalStatus::Proved => "PROVED ",
                GoalStatus::Verified => "OK     ",
                GoalStatus::Refuted => "REFUTED",
                GoalStatus::Failed => "FAILED ",
            };
            out.push_str(&format!("  [{mark}] {}", goal.name));
            if !goal.detail.is_empty() {
                out.push_str(&format!("  ({})", goal.detail));
            }
            out.push_str(&format!("  steps={}\n", goal.steps));
        }
        if let Some(verdict) = &self.verdict {
            out.push_str(&format!("verdict: {}\n", verdict.label()));
            for line in verdict.lines() {
                out.push_str(&format!("  {line}\n"));
            }
        }
        out.push_str(&format!(
            "total steps: {}  exit: {}\n",
            self.steps_total, self.exit_status
        ));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finalize_totals_steps_and_sets_exit() {
        let mut report = RunReport::new("chase prove", Some("x.spec".into()), 7, 100);
        report.push("a = b", GoalStatus::Proved, "", 12);
        report.push("c = d", GoalStatus::Verified, "model check", 3);
        report.finalize();
        assert_eq!(report.steps_total, 15);
        assert_eq!(report.exit_status, 0);
        report.push("e = f", GoalStatus::Failed, "budget exhausted", 100);
        report.finalize();
        assert_eq!(report.exit_status, 1);
    }

    #[test]
    fn json_round_trips_and_ends_with_newline() {
        let mut report = RunReport::new("swindle run", None, 24601, 10000);
        report.push("v.eta.Pi = Pi", GoalStatus::Proved, "", 40);
        report.finalize();
        let json = report.render_json();
        assert!(json.ends_with('\n'));
        let back: RunReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back.goals.len(), 1);
        assert_eq!(back.goals[0].status, GoalStatus::Proved);
    }

    #[test]
    fn refuted_counts_as_settled() {
        let mut report = RunReport::new("swindle run", None, 1, 1);
        report.push("no-invertible-arrow", GoalStatus::Refuted, "contradiction derived", 9);
        report.finalize();
        assert_eq!(report.exit_status, 0);
    }
}
