//! JSON reports shared by every verification task.

use serde::{Deserialize, Serialize};

use crate::jet::{Catalog, Expr, JetError};

pub const SCHEMA: u32 = 1;

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ResidualEntry {
    pub label: String,
    pub reduced_to_zero: bool,
    pub remainder_text: String,
    pub unit_factor: Option<String>,
    /// Whether a zero remainder is the desired outcome; side-by-side variants
    /// and mutation controls are expected to stay nonzero.
    #[serde(default = "yes")]
    pub expect_zero: bool,
}

fn yes() -> bool {
    true
}

impl ResidualEntry {
    pub fn zero(label: impl Into<String>) -> Self {
        ResidualEntry {
            label: label.into(),
            reduced_to_zero: true,
            remainder_text: "0".into(),
            unit_factor: None,
            expect_zero: true,
        }
    }

    pub fn from_remainder(label: impl Into<String>, cat: &Catalog, rem: &Expr) -> Self {
        ResidualEntry {
            label: label.into(),
            reduced_to_zero: rem.is_zero(),
            remainder_text: cat.print(rem),
            unit_factor: None,
            expect_zero: true,
        }
    }

    pub fn with_unit(mut self, unit: impl Into<String>) -> Self {
        self.unit_factor = Some(unit.into());
        self
    }

    pub fn expect_nonzero(mut self) -> Self {
        self.expect_zero = false;
        self
    }

    pub fn passed(&self) -> bool {
        self.reduced_to_zero == self.expect_zero
    }
}

/// A measured quantity with its acceptance window.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct Metric {
    pub label: String,
    pub value: f64,
    pub min: Option<f64>,
    pub max: Option<f64>,
    pub detail: Vec<(String, f64)>,
}

impl Metric {
    pub fn new(label: impl Into<String>, value: f64, min: Option<f64>, max: Option<f64>) -> Self {
        Metric {
            label: label.into(),
            value,
            min,
            max,
            detail: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.value.is_finite()
            && self.min.is_none_or(|m| self.value >= m)
            && self.max.is_none_or(|m| self.value <= m)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct TaskReport {
    pub schema: u32,
    pub task: String,
    pub label: String,
    pub n: Option<usize>,
    pub hypotheses_used: Vec<String>,
    pub assumptions: Vec<String>,
    pub residuals: Vec<ResidualEntry>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub metrics: Vec<Metric>,
    pub steps: usize,
    pub wall_time_ms: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(default)]
    pub budget_exhausted: bool,
}

impl TaskReport {
    pub fn new(task: &str, n: Option<usize>) -> Self {
        TaskReport {
            schema: SCHEMA,
            task: task.to_string(),
            label: task.to_string(),
            n,
            hypotheses_used: Vec::new(),
            assumptions: Vec::new(),
            residuals: Vec::new(),
            metrics: Vec::new(),
            steps: 0,
            wall_time_ms: 0,
            error: None,
            budget_exhausted: false,
        }
    }

    pub fn labelled(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn failed_with(task: &str, n: Option<usize>, err: &dyn std::fmt::Display, budget: bool) -> Self {
        let mut r = TaskReport::new(task, n);
        r.error = Some(err.to_string());
        r.budget_exhausted = budget;
        r
    }

    pub fn push(&mut self, e: ResidualEntry) {
        self.residuals.push(e);
    }

    pub fn hypothesis(&mut self, h: impl Into<String>) {
        let h = h.into();
        if !self.hypotheses_used.contains(&h) {
            self.hypotheses_used.push(h);
        }
    }

    pub fn assume(&mut self, a: impl Into<String>) {
        let a = a.into();
        if !self.assumptions.contains(&a) {
            self.assumptions.push(a);
        }
    }

    pub fn passed(&self) -> bool {
        self.error.is_none()
            && self.residuals.iter().all(|r| r.passed())
            && self.metrics.iter().all(|m| m.passed())
    }

    pub fn failures(&self) -> Vec<String> {
        let mut out: Vec<String> = self
            .residuals
            .iter()
            .filter(|r| !r.passed())
            .map(|r| format!("{}: {}", r.label, r.remainder_text))
            .collect();
        out.extend(
            self.metrics
                .iter()
                .filter(|m| !m.passed())
                .map(|m| format!("{} = {}", m.label, m.value)),
        );
        if let Some(e) = &self.error {
            out.push(e.clone());
        }
        out
    }
}

impl From<(&str, Option<usize>, JetError)> for TaskReport {
    fn from((task, n, e): (&str, Option<usize>, JetError)) -> Self {
        let budget = matches!(e, JetError::BudgetExhausted(_));
        TaskReport::failed_with(task, n, &e, budget)
    }
}

/// Merged output of a run.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct RunReport {
    pub schema: u32,
    pub command: String,
    pub seed: u64,
    pub passed: bool,
    pub tasks: Vec<TaskReport>,
}

impl RunReport {
    pub fn new(command: &str, seed: u64, mut tasks: Vec<TaskReport>) -> Self {
        tasks.sort_by(|a, b| (&a.task, a.n, &a.label).cmp(&(&b.task, b.n, &b.label)));
        let passed = tasks.iter().all(|t| t.passed());
        RunReport {
            schema: SCHEMA,
            command: command.to_string(),
            seed,
            passed,
            tasks,
        }
    }

    pub fn budget_exhausted(&self) -> bool {
        self.tasks.iter().any(|t| t.budget_exhausted)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn summary(&self) -> String {
        let mut s = String::new();
        for t in &self.tasks {
            let n = t.n.map(|n| format!(" n={n}")).unwrap_or_default();
            s.push_str(&format!(
                "{} {}{}: {} ({} residuals, {} metrics, {} steps)\n",
                if t.passed() { "PASS" } else { "FAIL" },
                t.label,
                n,
                if t.passed() { "ok" } else { "see report" },
                t.residuals.len(),
                t.metrics.len(),
                t.steps
            ));
            for f in t.failures() {
                s.push_str(&format!("    {f}\n"));
            }
        }
        s.push_str(if self.passed { "all passed\n" } else { "FAILED\n" });
        s
    }
}
