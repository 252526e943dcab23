//! Named verification suites run as parallel task sets with a deterministic merge.

use std::fmt::Display;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;

use crate::jet::Q;
use crate::numerics::convergence::Convergence;
use crate::numerics::{numeric_check, NumericConfig, NumericError};
use crate::reductions::{reduce_case1, reduce_case2, ReductionError};
use crate::report::{Metric, ResidualEntry, RunReport, TaskReport};
use crate::soundness::soundness_report;
use crate::systems::{
    build_ch_lax, build_ch_system, build_mch_lax, build_mch_system, check_lax_compatibility, eval_constant_state,
    undetected_mutations, SystemError,
};
use crate::transforms::{verify_composite_dictionary, verify_miura, verify_reciprocal_ch, verify_reciprocal_mch};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Command {
    Hierarchies,
    Reciprocal,
    Miura,
    Lax,
    Composite,
    Reductions,
    Numeric,
    All,
}

impl Command {
    pub const ALL: [Command; 8] = [
        Command::Hierarchies,
        Command::Reciprocal,
        Command::Miura,
        Command::Lax,
        Command::Composite,
        Command::Reductions,
        Command::Numeric,
        Command::All,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Hierarchies => "verify-hierarchies",
            Command::Reciprocal => "verify-reciprocal",
            Command::Miura => "verify-miura",
            Command::Lax => "verify-lax",
            Command::Composite => "verify-composite",
            Command::Reductions => "verify-reductions",
            Command::Numeric => "numeric-check",
            Command::All => "all",
        }
    }
}

impl FromStr for Command {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Command::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| format!("unknown command `{s}`"))
    }
}

#[derive(Clone, Debug)]
pub struct SuiteOptions {
    pub n: usize,
    pub seed: u64,
    pub timings: bool,
    pub numeric: NumericConfig,
    /// Randomized engine cases run by `all`.
    pub soundness_cases: usize,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions { n: 1, seed: 0, timings: false, numeric: NumericConfig::default(), soundness_cases: 200 }
    }
}

pub struct SuiteOutput {
    pub report: RunReport,
    pub tables: Vec<Convergence>,
}

/// Error carried out of a task with its budget flag.
struct Failure(String, bool);

impl<E: Display> From<E> for Failure {
    fn from(e: E) -> Self {
        let s = e.to_string();
        let budget = s.contains("budget");
        Failure(s, budget)
    }
}

enum Outcome {
    Report(TaskReport),
    Numeric(TaskReport, Vec<Convergence>),
}

type Task<'a> = (&'static str, Option<usize>, Box<dyn Fn() -> Result<Outcome, Failure> + Send + Sync + 'a>);

/// Equation counts and constant-state smoke tests of both hierarchies.
pub fn verify_hierarchies(n: usize) -> Result<TaskReport, SystemError> {
    let mut r = TaskReport::new("verify-hierarchies", Some(n)).labelled("CH(2+1) and mCH(2+1) hierarchies");
    let ch = build_ch_system(n)?;
    let mch = build_mch_system(n)?;
    r.metrics.push(Metric::new("CH residual count", ch.len() as f64, Some((n + 2) as f64), Some((n + 2) as f64)));
    r.metrics.push(Metric::new("mCH residual count", mch.len() as f64, Some((2 * n + 2) as f64), Some((2 * n + 2) as f64)));
    let q = |k: i64| Q::from_integer(k.into());
    for (sys, state) in [(&ch, [("P", q(3)), ("Del", q(5))]), (&mch, [("u", q(2)), ("del", q(7))])] {
        r.hypothesis(sys.name.clone());
        for eq in &sys.equations {
            let label = format!("{}: {} at a constant state", sys.name, eq.label);
            let v = eval_constant_state(&sys.catalog, &eq.expr, &state);
            let e = match v {
                Some(v) if v == q(0) => ResidualEntry::zero(label),
                Some(v) => ResidualEntry { reduced_to_zero: false, remainder_text: v.to_string(), ..ResidualEntry::zero(label) },
                None => ResidualEntry { reduced_to_zero: false, remainder_text: "pole".into(), ..ResidualEntry::zero(label) },
            };
            r.push(e);
        }
        r.steps += sys.orientation()?.rules.len();
    }
    Ok(r)
}

/// Lax compatibility of the CH (`which = 0`) or mCH pair, optionally with
/// the single-sign mutation sweep.
pub fn verify_lax(n: usize, which: usize, mutations: bool) -> Result<TaskReport, SystemError> {
    let (lax, sys) = if which == 0 {
        (build_ch_lax(n)?, build_ch_system(n)?)
    } else {
        (build_mch_lax(n)?, build_mch_system(n)?)
    };
    let mut r = check_lax_compatibility(&lax, &sys)?.labelled(format!("Lax pair {}", lax.name.split(" n=").next().unwrap_or(&lax.name)));
    if mutations {
        let total = lax.summand_addresses().len();
        let missed = undetected_mutations(&lax, &sys)?;
        let label = format!("all {total} single-sign mutations detected");
        r.push(if missed.is_empty() {
            ResidualEntry::zero(label)
        } else {
            ResidualEntry { reduced_to_zero: false, remainder_text: missed.join("; "), ..ResidualEntry::zero(label) }
        });
    }
    Ok(r)
}

fn one(r: TaskReport) -> Result<Outcome, Failure> {
    Ok(Outcome::Report(r))
}

fn tasks_for<'a>(cmd: Command, opts: &'a SuiteOptions) -> Vec<Task<'a>> {
    let n = opts.n;
    let mut t: Vec<Task<'a>> = Vec::new();
    match cmd {
        Command::Hierarchies => t.push(("verify-hierarchies", Some(n), Box::new(move || one(verify_hierarchies(n)?)))),
        Command::Reciprocal => {
            t.push(("verify-reciprocal", Some(n), Box::new(move || one(verify_reciprocal_ch(n)?))));
            t.push(("verify-reciprocal", Some(n), Box::new(move || one(verify_reciprocal_mch(n)?))));
        }
        Command::Miura => t.push(("verify-miura", Some(n), Box::new(move || one(verify_miura(n)?)))),
        Command::Lax => {
            for k in 0..2 {
                t.push((
                    "verify-lax",
                    Some(n),
                    Box::new(move || one(verify_lax(n, k, true)?)),
                ));
            }
        }
        Command::Composite => t.push(("verify-composite", Some(n), Box::new(move || one(verify_composite_dictionary(n)?)))),
        Command::Reductions => {
            t.push(("verify-reductions", Some(1), Box::new(|| one(reduce_case1().map_err(red)?))));
            t.push(("verify-reductions", Some(1), Box::new(|| one(reduce_case2().map_err(red)?))));
        }
        Command::Numeric => t.push((
            "numeric-check",
            Some(1),
            Box::new(move || {
                let o = numeric_check(&opts.numeric).map_err(num)?;
                Ok(Outcome::Numeric(o.report, o.tables))
            }),
        )),
        Command::All => {
            for c in &Command::ALL[..7] {
                t.extend(tasks_for(*c, opts));
            }
            let (seed, cases) = (opts.seed, opts.soundness_cases);
            t.push(("engine-soundness", None, Box::new(move || one(soundness_report(seed, cases, cases / 5)))));
        }
    }
    t
}

fn red(e: ReductionError) -> Failure {
    Failure::from(e)
}

fn num(e: NumericError) -> Failure {
    Failure::from(e)
}

/// Runs every task of `cmd` in parallel and merges the reports in a fixed order.
pub fn run(cmd: Command, opts: &SuiteOptions) -> SuiteOutput {
    let tasks = tasks_for(cmd, opts);
    let results: Vec<(TaskReport, Vec<Convergence>)> = tasks
        .par_iter()
        .map(|(name, n, f)| {
            let start = Instant::now();
            let (mut r, tables) = match f() {
                Ok(Outcome::Report(r)) => (r, Vec::new()),
                Ok(Outcome::Numeric(r, t)) => (r, t),
                Err(Failure(msg, budget)) => (TaskReport::failed_with(name, *n, &msg, budget), Vec::new()),
            };
            r.wall_time_ms = if opts.timings { start.elapsed().as_millis() as u64 } else { 0 };
            (r, tables)
        })
        .collect();
    let mut tables = Vec::new();
    let mut reports = Vec::new();
    for (r, t) in results {
        reports.push(r);
        tables.extend(t);
    }
    SuiteOutput { report: RunReport::new(cmd.name(), opts.seed, reports), tables }
}
