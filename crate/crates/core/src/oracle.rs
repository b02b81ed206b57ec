//! Exact optimum by branch-and-bound, and a greedy baseline.

use crate::error::{Error, Result};
use crate::instance::{Instance, Schedule};

pub const DEFAULT_NODE_BUDGET: u64 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleResult {
    pub opt: u64,
    pub schedule: Schedule,
    pub nodes_explored: u64,
}

/// Jobs by descending size, ties by ascending id.
fn branching_order(inst: &Instance) -> Vec<usize> {
    let mut order: Vec<usize> = (0..inst.job_count()).collect();
    order.sort_by_key(|&j| (std::cmp::Reverse(inst.jobs()[j].size), j));
    order
}

/// Largest-first list scheduling onto the least-loaded allowed machine,
/// ties going to the deepest machine.
pub fn greedy_baseline(inst: &Instance) -> Schedule {
    let mut loads = vec![0u64; inst.machine_count()];
    let mut machine_of = vec![0usize; inst.job_count()];
    for j in branching_order(inst) {
        let job = inst.jobs()[j];
        let path = inst.path_to_root(job.home).expect("home is valid");
        // Path runs deepest first, so min_by_key keeps the deepest on ties.
        let target = *path.iter().min_by_key(|&&v| loads[v]).expect("path is never empty");
        loads[target] += job.size;
        machine_of[j] = target;
    }
    Schedule::from_machines(inst, &machine_of).expect("greedy stays on allowed paths")
}

struct Search<'a> {
    sizes: Vec<u64>,
    paths: Vec<Vec<usize>>,
    order: Vec<usize>,
    loads: Vec<u64>,
    current: Vec<usize>,
    best: Vec<usize>,
    incumbent: u64,
    lower_bound: u64,
    nodes: u64,
    budget: u64,
    inst: &'a Instance,
}

impl Search<'_> {
    /// Returns `Ok(true)` once the incumbent meets the lower bound.
    fn branch(&mut self, depth: usize, max_load: u64) -> Result<bool> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(Error::BudgetExceeded(self.budget));
        }
        if depth == self.order.len() {
            if max_load < self.incumbent {
                self.incumbent = max_load;
                self.best.clone_from(&self.current);
            }
            return Ok(self.incumbent <= self.lower_bound);
        }
        let j = self.order[depth];
        let size = self.sizes[j];
        let home = self.inst.jobs()[j].home;
        for i in 0..self.paths[home].len() {
            let v = self.paths[home][i];
            let load = self.loads[v] + size;
            if load.max(max_load) >= self.incumbent {
                continue;
            }
            self.loads[v] = load;
            self.current[j] = v;
            let done = self.branch(depth + 1, load.max(max_load));
            self.loads[v] -= size;
            if done? {
                return Ok(true);
            }
        }
        Ok(false)
    }
}

/// Exact minimum makespan. Intended for small instances; returns
/// [`Error::BudgetExceeded`] once `node_budget` search nodes are used.
pub fn solve_exact(inst: &Instance, node_budget: Option<u64>) -> Result<OracleResult> {
    let warm = greedy_baseline(inst);
    let m = inst.machine_count() as u64;
    let lower_bound = inst.max_size().max(inst.total_size().div_ceil(m));
    let paths = (0..inst.machine_count())
        .map(|v| inst.path_to_root(v).expect("valid machine"))
        .collect();
    let warm_machines: Vec<usize> = warm
        .machine_of(inst.job_count())
        .into_iter()
        .map(|m| m.expect("greedy assigns every job"))
        .collect();
    let mut search = Search {
        sizes: inst.jobs().iter().map(|j| j.size).collect(),
        paths,
        order: branching_order(inst),
        loads: vec![0; inst.machine_count()],
        current: warm_machines.clone(),
        best: warm_machines,
        incumbent: warm.makespan,
        lower_bound,
        nodes: 0,
        budget: node_budget.unwrap_or(DEFAULT_NODE_BUDGET),
        inst,
    };
    if search.incumbent > search.lower_bound {
        search.branch(0, 0)?;
    }
    let schedule = Schedule::from_machines(inst, &search.best)?;
    debug_assert_eq!(schedule.makespan, search.incumbent);
    Ok(OracleResult { opt: search.incumbent, schedule, nodes_explored: search.nodes })
}
