//! Turns a configuration assignment into a concrete schedule.
//!
//! Large jobs are placed bottom-up by class, lowest id first, exactly as
//! many per machine as `ĉ_v` asks for. Small jobs are then poured greedily
//! (ascending id) into `ĉ_v.small_units · εC` of space on each machine; the
//! last one may overshoot by at most `εC`. Whatever is not placed moves to
//! the parent.

use crate::dp::ConfigAssignment;
use crate::error::{Error, Result};
use crate::instance::{Instance, Schedule};
use crate::rounding::{SizeClass, SizeGrid};
use crate::scalar::ExactScalar;

/// Large-job placement plus the small jobs still to place.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LargePhase {
    /// Machine of every large job; `None` for small jobs.
    pub machine_of: Vec<Option<usize>>,
    pub classes: Vec<SizeClass>,
}

/// Per-machine accounting of a reconstruction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeTrace<Q> {
    pub machine: usize,
    /// Load under original sizes.
    pub true_load: u64,
    /// Rounded size of `ĉ_v`.
    pub planned_size: Q,
    /// True size of the small jobs moved to the parent.
    pub small_pushed: u64,
    /// Planned small mass moved to the parent, `pushed.small_units · εC`.
    pub small_pushed_planned: Q,
}

fn classify<Q: ExactScalar>(inst: &Instance, grid: &SizeGrid<Q>) -> Result<Vec<SizeClass>> {
    inst.jobs().iter().map(|j| grid.round_job(j.size)).collect()
}

/// Places every large job. Fails if the configuration asks for a job the
/// pool at some machine does not hold.
pub fn assign_large<Q: ExactScalar>(inst: &Instance, cfg: &ConfigAssignment, grid: &SizeGrid<Q>) -> Result<LargePhase> {
    let classes = classify(inst, grid)?;
    let k = grid.class_count();
    let mut machine_of = vec![None; inst.job_count()];
    // pushed_up[v][class] holds the ids leaving v.
    let mut pushed_up: Vec<Vec<Vec<usize>>> = vec![Vec::new(); inst.machine_count()];

    for &v in inst.post_order() {
        let mut pools: Vec<Vec<usize>> = vec![Vec::new(); k];
        for &j in inst.jobs_homed_at(v) {
            if let SizeClass::Large(class) = classes[j] {
                pools[class - 1].push(j);
            }
        }
        for &child in inst.children(v) {
            for (pool, incoming) in pools.iter_mut().zip(std::mem::take(&mut pushed_up[child])) {
                pool.extend(incoming);
            }
        }

        let mut leaving = Vec::with_capacity(k);
        for (class, mut pool) in pools.into_iter().enumerate() {
            pool.sort_unstable();
            let wanted = cfg.scheduled[v].counts[class] as usize;
            if wanted > pool.len() {
                return Err(Error::Internal(format!(
                    "machine {v} needs {wanted} jobs of class {} but holds {}",
                    class + 1,
                    pool.len()
                )));
            }
            let rest = pool.split_off(wanted);
            for j in pool {
                machine_of[j] = Some(v);
            }
            if rest.len() != cfg.pushed_out[v].counts[class] as usize {
                return Err(Error::Internal(format!(
                    "machine {v} pushes {} jobs of class {} but the configuration says {}",
                    rest.len(),
                    class + 1,
                    cfg.pushed_out[v].counts[class]
                )));
            }
            leaving.push(rest);
        }
        pushed_up[v] = leaving;
    }

    Ok(LargePhase { machine_of, classes })
}

/// Greedy fill of one machine: ascending ids until the cumulative true
/// size reaches `capacity` or the pool runs out. Returns `(placed, rest)`.
pub fn greedy_fill<Q: ExactScalar>(pool: &[(usize, u64)], capacity: &Q) -> (Vec<usize>, Vec<(usize, u64)>) {
    let mut placed = Vec::new();
    let mut load = 0u64;
    let mut taken = 0;
    for &(job, size) in pool {
        if Q::from_u64(load) >= *capacity {
            break;
        }
        placed.push(job);
        load += size;
        taken += 1;
    }
    (placed, pool[taken..].to_vec())
}

/// Places every small job on top of `large`, producing the final schedule
/// and a per-machine trace.
pub fn assign_small<Q: ExactScalar>(
    inst: &Instance,
    cfg: &ConfigAssignment,
    grid: &SizeGrid<Q>,
    large: &LargePhase,
) -> Result<(Schedule, Vec<NodeTrace<Q>>)> {
    let mut machine_of = large.machine_of.clone();
    let mut pushed_up: Vec<Vec<(usize, u64)>> = vec![Vec::new(); inst.machine_count()];
    let mut small_pushed = vec![0u64; inst.machine_count()];

    for &v in inst.post_order() {
        let mut pool: Vec<(usize, u64)> = inst
            .jobs_homed_at(v)
            .iter()
            .filter(|&&j| large.classes[j] == SizeClass::Small)
            .map(|&j| (j, inst.jobs()[j].size))
            .collect();
        for &child in inst.children(v) {
            pool.append(&mut pushed_up[child]);
        }
        pool.sort_unstable();

        let capacity = grid.small_threshold().mul_u64(cfg.scheduled[v].small_units.into());
        let (placed, rest) = greedy_fill(&pool, &capacity);
        for j in placed {
            machine_of[j] = Some(v);
        }
        small_pushed[v] = rest.iter().map(|&(_, size)| size).sum();
        pushed_up[v] = rest;
    }

    let root = inst.root();
    if !pushed_up[root].is_empty() {
        return Err(Error::Internal(format!(
            "{} small jobs left over above the root",
            pushed_up[root].len()
        )));
    }

    let machine_of: Vec<usize> = machine_of
        .into_iter()
        .enumerate()
        .map(|(j, m)| m.ok_or_else(|| Error::Internal(format!("job {j} was never placed"))))
        .collect::<Result<_>>()?;
    let schedule = Schedule::from_machines(inst, &machine_of)?;

    let mut loads = vec![0u64; inst.machine_count()];
    for (j, &v) in machine_of.iter().enumerate() {
        loads[v] += inst.jobs()[j].size;
    }
    let trace = (0..inst.machine_count())
        .map(|v| NodeTrace {
            machine: v,
            true_load: loads[v],
            planned_size: grid.total_size(&cfg.scheduled[v]),
            small_pushed: small_pushed[v],
            small_pushed_planned: grid.small_threshold().mul_u64(cfg.pushed_out[v].small_units.into()),
        })
        .collect();
    Ok((schedule, trace))
}

/// Full reconstruction with its per-machine trace. Every machine load is
/// checked against `(1+4ε)C`.
pub fn build_schedule_traced<Q: ExactScalar>(
    inst: &Instance,
    cfg: &ConfigAssignment,
    grid: &SizeGrid<Q>,
) -> Result<(Schedule, Vec<NodeTrace<Q>>)> {
    let large = assign_large(inst, cfg, grid)?;
    let (schedule, trace) = assign_small(inst, cfg, grid, &large)?;
    for node in &trace {
        if Q::from_u64(node.true_load) > *grid.schedule_bound() {
            return Err(Error::Internal(format!(
                "machine {} load {} exceeds (1+4e)C = {}",
                node.machine,
                node.true_load,
                grid.schedule_bound()
            )));
        }
    }
    Ok((schedule, trace))
}

pub fn build_schedule<Q: ExactScalar>(inst: &Instance, cfg: &ConfigAssignment, grid: &SizeGrid<Q>) -> Result<Schedule> {
    build_schedule_traced(inst, cfg, grid).map(|(schedule, _)| schedule)
}
