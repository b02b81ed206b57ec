//! Bisection over the target makespan around the relaxed decision.
//!
//! The decision is not monotone in `C` (the grid moves with `C`), so the
//! search keeps the invariant "decide fails at `lo`, succeeds at `hi`"
//! instead of assuming monotonicity. Failure at `hi - 1` means no schedule of
//! makespan `hi - 1` exists, so `hi <= OPT`.

use serde::Serialize;

use crate::dp::{decide, ConfigAssignment, Decision, DpOptions};
use crate::error::{Error, Result};
use crate::instance::{validate_schedule, Instance, Schedule, ScheduleMeta};
use crate::reconstruct::build_schedule;
use crate::rounding::{Epsilon, SizeGrid};
use crate::scalar::ExactScalar;

pub const GUARANTEE_LABEL: &str = "(1+4e)";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveResult<Q> {
    pub schedule: Schedule,
    /// Smallest target the decision accepted with the level below rejected;
    /// a lower bound on the optimum. Zero for an instance without jobs.
    pub decision_c: u64,
    pub epsilon: Epsilon,
    /// `1 + 4ε`.
    pub ratio_bound: Q,
    pub decide_calls: usize,
}

impl<Q: ExactScalar> SolveResult<Q> {
    /// Same as `decision_c`: everything below it was refuted.
    pub fn opt_lower_bound(&self) -> u64 {
        self.decision_c
    }

    /// `(1+4ε) · decision_C`.
    pub fn makespan_bound(&self) -> Q {
        self.ratio_bound.mul_u64(self.decision_c)
    }
}

fn meta(eps: Epsilon, decision_c: u64) -> ScheduleMeta {
    ScheduleMeta { epsilon: eps.to_string(), decision_c, guarantee: GUARANTEE_LABEL.to_string() }
}

/// Approximation scheme entry point: makespan at most `(1+4ε)·OPT`.
pub fn solve<Q: ExactScalar>(inst: &Instance, eps: Epsilon, options: DpOptions) -> Result<SolveResult<Q>> {
    let ratio_bound = eps.guarantee::<Q>();
    if inst.job_count() == 0 {
        let schedule = Schedule::from_machines(inst, &[])?.with_meta(meta(eps, 0));
        return Ok(SolveResult { schedule, decision_c: 0, epsilon: eps, ratio_bound, decide_calls: 0 });
    }

    let mut calls = 0;
    let mut attempt = |target: u64| -> Result<Option<(SizeGrid<Q>, ConfigAssignment)>> {
        calls += 1;
        Ok(match decide::<Q>(inst, target, eps, options)? {
            Decision::Feasible { grid, assignment } => Some((grid, assignment)),
            Decision::Infeasible(_) => None,
        })
    };

    // Below the largest job the decision fails by screening.
    let mut lo = inst.max_size() - 1;
    let mut hi = inst.total_size();
    let mut best = attempt(hi)?.ok_or_else(|| {
        Error::Internal(format!("decision rejected the trivial upper bound C = {hi}"))
    })?;
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        match attempt(mid)? {
            Some(found) => {
                hi = mid;
                best = found;
            }
            None => lo = mid,
        }
    }

    let (grid, assignment) = best;
    let schedule = build_schedule(inst, &assignment, &grid)?.with_meta(meta(eps, hi));
    Ok(SolveResult { schedule, decision_c: hi, epsilon: eps, ratio_bound, decide_calls: calls })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// Machine-readable pass/fail list produced by [`certify`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CertificateReport {
    pub checks: Vec<Check>,
}

impl CertificateReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail")
    }

    fn push(&mut self, name: &str, passed: bool, detail: String) {
        self.checks.push(Check { name: name.to_string(), passed, detail });
    }
}

/// Checks a solve result; with `opt` also checks it against the optimum.
pub fn certify<Q: ExactScalar>(inst: &Instance, result: &SolveResult<Q>, opt: Option<u64>) -> CertificateReport {
    let mut report = CertificateReport { checks: Vec::new() };
    let makespan = result.schedule.makespan;

    match validate_schedule(inst, &result.schedule) {
        Ok(()) => report.push("feasibility", true, "schedule is valid".into()),
        Err(violations) => {
            let detail = violations.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ");
            report.push("feasibility", false, detail);
        }
    }

    let bound = result.makespan_bound();
    report.push(
        "makespan_within_decision_bound",
        Q::from_u64(makespan) <= bound,
        format!("makespan {makespan} vs (1+4e)*{} = {bound}", result.decision_c),
    );

    if let Some(opt) = opt {
        report.push(
            "decision_c_below_opt",
            result.decision_c <= opt,
            format!("decision_C {} vs OPT {opt}", result.decision_c),
        );
        let bound = result.ratio_bound.mul_u64(opt);
        report.push(
            "makespan_within_opt_bound",
            Q::from_u64(makespan) <= bound,
            format!("makespan {makespan} vs (1+4e)*OPT = {bound}"),
        );
    }
    report
}
