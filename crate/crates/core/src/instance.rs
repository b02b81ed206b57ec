//! Instances, schedules, and their JSON documents.
//!
//! Machines form a rooted tree given by parent links. A job homed at `v` may
//! run on any machine on the path from `v` to the root.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, InstanceError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Machine {
    pub id: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parent: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Job {
    pub id: usize,
    pub size: u64,
    pub home: usize,
}

#[derive(Serialize, Deserialize)]
struct InstanceDoc {
    machines: Vec<Machine>,
    jobs: Vec<RawJob>,
}

// Sizes are read signed so that zero and negative sizes produce a
// validation error instead of a serde error.
#[derive(Serialize, Deserialize)]
struct RawJob {
    id: usize,
    size: i64,
    home: usize,
}

/// A validated scheduling instance. Immutable after construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    machines: Vec<Machine>,
    jobs: Vec<Job>,
    root: usize,
    children: Vec<Vec<usize>>,
    depth: Vec<usize>,
    post_order: Vec<usize>,
    homed: Vec<Vec<usize>>,
}

impl Instance {
    /// Builds an instance from dense parent links (`parents[i]` is the
    /// parent of machine `i`) and `(size, home)` pairs.
    pub fn new(parents: &[Option<usize>], jobs: &[(u64, usize)]) -> Result<Self, InstanceError> {
        let machines = parents
            .iter()
            .enumerate()
            .map(|(id, &parent)| Machine { id, parent })
            .collect();
        let jobs = jobs
            .iter()
            .enumerate()
            .map(|(id, &(size, home))| Job { id, size, home })
            .collect();
        Self::from_records(machines, jobs)
    }

    fn from_records(mut machines: Vec<Machine>, mut jobs: Vec<Job>) -> Result<Self, InstanceError> {
        machines.sort_by_key(|m| m.id);
        jobs.sort_by_key(|j| j.id);
        check_dense("machine", machines.iter().map(|m| m.id))?;
        check_dense("job", jobs.iter().map(|j| j.id))?;
        let m = machines.len();

        let mut root = None;
        for machine in &machines {
            match machine.parent {
                None => {
                    if let Some(first) = root {
                        return Err(InstanceError::MultipleRoots(first, machine.id));
                    }
                    root = Some(machine.id);
                }
                Some(parent) if parent >= m => {
                    return Err(InstanceError::DanglingParent { machine: machine.id, parent });
                }
                Some(_) => {}
            }
        }
        let root = root.ok_or(InstanceError::MissingRoot)?;

        // Every node must reach the root; a walk longer than m means a cycle.
        for start in 0..m {
            let mut current = start;
            let mut steps = 0;
            while let Some(parent) = machines[current].parent {
                current = parent;
                steps += 1;
                if steps > m {
                    return Err(InstanceError::Cycle(start));
                }
            }
        }

        for job in &jobs {
            if job.size == 0 {
                return Err(InstanceError::NonPositiveSize { job: job.id });
            }
            if job.home >= m {
                return Err(InstanceError::DanglingHome { job: job.id, home: job.home });
            }
        }

        let mut children = vec![Vec::new(); m];
        for machine in &machines {
            if let Some(parent) = machine.parent {
                children[parent].push(machine.id);
            }
        }

        let mut depth = vec![0; m];
        let mut pre_order = Vec::with_capacity(m);
        let mut stack = vec![root];
        while let Some(v) = stack.pop() {
            pre_order.push(v);
            for &child in children[v].iter().rev() {
                depth[child] = depth[v] + 1;
                stack.push(child);
            }
        }
        // Reversed pre-order visits every child before its parent.
        let post_order: Vec<usize> = pre_order.into_iter().rev().collect();

        let mut homed = vec![Vec::new(); m];
        for job in &jobs {
            homed[job.home].push(job.id);
        }

        Ok(Self { machines, jobs, root, children, depth, post_order, homed })
    }

    pub fn machines(&self) -> &[Machine] {
        &self.machines
    }

    pub fn jobs(&self) -> &[Job] {
        &self.jobs
    }

    pub fn machine_count(&self) -> usize {
        self.machines.len()
    }

    pub fn job_count(&self) -> usize {
        self.jobs.len()
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        self.machines[v].parent
    }

    pub fn children(&self, v: usize) -> &[usize] {
        &self.children[v]
    }

    pub fn depth(&self, v: usize) -> usize {
        self.depth[v]
    }

    /// Machines ordered so that every child precedes its parent.
    pub fn post_order(&self) -> &[usize] {
        &self.post_order
    }

    /// Ids of the jobs whose home is `v`, ascending.
    pub fn jobs_homed_at(&self, v: usize) -> &[usize] {
        &self.homed[v]
    }

    pub fn total_size(&self) -> u64 {
        self.jobs.iter().map(|j| j.size).sum()
    }

    pub fn max_size(&self) -> u64 {
        self.jobs.iter().map(|j| j.size).max().unwrap_or(0)
    }

    /// The machines a job homed at `v` may use, from `v` up to the root.
    pub fn path_to_root(&self, v: usize) -> Result<Vec<usize>, InstanceError> {
        if v >= self.machines.len() {
            return Err(InstanceError::UnknownMachine(v));
        }
        let mut path = vec![v];
        let mut current = v;
        while let Some(parent) = self.machines[current].parent {
            path.push(parent);
            current = parent;
        }
        Ok(path)
    }

    /// Whether `machine` lies on the path from `home` to the root.
    pub fn is_ancestor_or_self(&self, machine: usize, home: usize) -> bool {
        let mut current = home;
        loop {
            if current == machine {
                return true;
            }
            if self.depth[current] <= self.depth[machine] {
                return false;
            }
            match self.machines[current].parent {
                Some(parent) => current = parent,
                None => return false,
            }
        }
    }

    pub fn to_json(&self) -> String {
        let doc = InstanceDoc {
            machines: self.machines.clone(),
            jobs: self
                .jobs
                .iter()
                .map(|j| RawJob { id: j.id, size: j.size as i64, home: j.home })
                .collect(),
        };
        serde_json::to_string_pretty(&doc).expect("instance serialization cannot fail")
    }
}

fn check_dense(kind: &'static str, ids: impl Iterator<Item = usize>) -> Result<(), InstanceError> {
    for (expected, id) in ids.enumerate() {
        if id < expected {
            return Err(InstanceError::DuplicateId { kind, id });
        }
        if id != expected {
            return Err(InstanceError::NonDenseId { kind, expected, found: id });
        }
    }
    Ok(())
}

/// Parses and validates an instance document.
pub fn parse_instance(text: &str) -> Result<Instance, InstanceError> {
    let doc: InstanceDoc =
        serde_json::from_str(text).map_err(|e| InstanceError::Malformed(e.to_string()))?;
    let mut jobs = Vec::with_capacity(doc.jobs.len());
    for raw in doc.jobs {
        if raw.size <= 0 {
            return Err(InstanceError::NonPositiveSize { job: raw.id });
        }
        jobs.push(Job { id: raw.id, size: raw.size as u64, home: raw.home });
    }
    Instance::from_records(doc.machines, jobs)
}

impl FromStr for Instance {
    type Err = InstanceError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_instance(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct JobAssignment {
    pub job: usize,
    pub machine: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScheduleMeta {
    /// Accuracy as a reduced fraction `"a/b"`.
    pub epsilon: String,
    #[serde(rename = "decision_C")]
    pub decision_c: u64,
    pub guarantee: String,
}

/// A job-to-machine assignment as read from or written to JSON.
///
/// The assignment list is kept verbatim so that [`validate_schedule`] can
/// report missing and duplicate entries.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Schedule {
    pub assignment: Vec<JobAssignment>,
    pub makespan: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub meta: Option<ScheduleMeta>,
}

impl Schedule {
    /// Builds a schedule from `machine_of[job]`, deriving the makespan.
    pub fn from_machines(inst: &Instance, machine_of: &[usize]) -> Result<Self> {
        let assignment = machine_of
            .iter()
            .enumerate()
            .map(|(job, &machine)| JobAssignment { job, machine })
            .collect();
        let mut schedule = Schedule { assignment, makespan: 0, meta: None };
        schedule.makespan = compute_makespan(inst, &schedule)?;
        Ok(schedule)
    }

    pub fn with_meta(mut self, meta: ScheduleMeta) -> Self {
        self.meta = Some(meta);
        self
    }

    /// Machine of each job, or `None` if the job is missing.
    pub fn machine_of(&self, n: usize) -> Vec<Option<usize>> {
        let mut out = vec![None; n];
        for a in &self.assignment {
            if a.job < n {
                out[a.job] = Some(a.machine);
            }
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("schedule serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Self, InstanceError> {
        serde_json::from_str(text).map_err(|e| InstanceError::Malformed(e.to_string()))
    }
}

/// Per-machine load of a schedule, checking every entry is on its path.
pub fn machine_loads(inst: &Instance, sched: &Schedule) -> Result<Vec<u64>> {
    let mut loads = vec![0u64; inst.machine_count()];
    for a in &sched.assignment {
        let job = inst.jobs().get(a.job).ok_or(Error::UnknownId { kind: "job", id: a.job })?;
        if a.machine >= inst.machine_count() {
            return Err(Error::UnknownId { kind: "machine", id: a.machine });
        }
        if !inst.is_ancestor_or_self(a.machine, job.home) {
            return Err(Error::OffPath { job: a.job, machine: a.machine });
        }
        loads[a.machine] += job.size;
    }
    Ok(loads)
}

/// Maximum machine load; 0 when there are no jobs.
pub fn compute_makespan(inst: &Instance, sched: &Schedule) -> Result<u64> {
    Ok(machine_loads(inst, sched)?.into_iter().max().unwrap_or(0))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    UnassignedJob(usize),
    DuplicateJob(usize),
    UnknownJob(usize),
    UnknownMachine { job: usize, machine: usize },
    OffPath { job: usize, machine: usize },
    MakespanMismatch { declared: u64, actual: u64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::UnassignedJob(j) => write!(f, "unassigned job {j}"),
            Violation::DuplicateJob(j) => write!(f, "job {j} assigned more than once"),
            Violation::UnknownJob(j) => write!(f, "unknown job {j}"),
            Violation::UnknownMachine { job, machine } => {
                write!(f, "job {job} assigned to unknown machine {machine}")
            }
            Violation::OffPath { job, machine } => {
                write!(f, "job {job} assigned off its home-to-root path (machine {machine})")
            }
            Violation::MakespanMismatch { declared, actual } => {
                write!(f, "makespan mismatch: declared {declared}, actual {actual}")
            }
        }
    }
}

/// Checks totality, path feasibility and the declared makespan. Returns
/// every violation found.
pub fn validate_schedule(inst: &Instance, sched: &Schedule) -> Result<(), Vec<Violation>> {
    let n = inst.job_count();
    let mut violations = Vec::new();
    let mut seen = vec![false; n];
    let mut loads = vec![0u64; inst.machine_count()];
    for a in &sched.assignment {
        if a.job >= n {
            violations.push(Violation::UnknownJob(a.job));
            continue;
        }
        if std::mem::replace(&mut seen[a.job], true) {
            violations.push(Violation::DuplicateJob(a.job));
        }
        if a.machine >= inst.machine_count() {
            violations.push(Violation::UnknownMachine { job: a.job, machine: a.machine });
            continue;
        }
        let job = &inst.jobs()[a.job];
        if !inst.is_ancestor_or_self(a.machine, job.home) {
            violations.push(Violation::OffPath { job: a.job, machine: a.machine });
        }
        loads[a.machine] += job.size;
    }
    violations.extend(
        seen.iter()
            .enumerate()
            .filter(|(_, &s)| !s)
            .map(|(j, _)| Violation::UnassignedJob(j)),
    );
    let actual = loads.into_iter().max().unwrap_or(0);
    if actual != sched.makespan {
        violations.push(Violation::MakespanMismatch { declared: sched.makespan, actual });
    }
    if violations.is_empty() {
        Ok(())
    } else {
        Err(violations)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, clap::ValueEnum)]
pub enum TreeShape {
    Path,
    Star,
    Binary,
    Random,
}

impl fmt::Display for TreeShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TreeShape::Path => "path",
            TreeShape::Star => "star",
            TreeShape::Binary => "binary",
            TreeShape::Random => "random",
        })
    }
}

impl FromStr for TreeShape {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "path" => Ok(TreeShape::Path),
            "star" => Ok(TreeShape::Star),
            "binary" => Ok(TreeShape::Binary),
            "random" => Ok(TreeShape::Random),
            other => Err(format!("unknown shape {other:?}")),
        }
    }
}

/// Deterministic random instance rooted at machine 0.
pub fn generate_instance(seed: u64, m: usize, n: usize, max_size: u64, shape: TreeShape) -> Instance {
    assert!(m >= 1, "at least one machine is required");
    assert!(max_size >= 1, "max_size must be positive");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let parents: Vec<Option<usize>> = (0..m)
        .map(|i| {
            if i == 0 {
                return None;
            }
            Some(match shape {
                TreeShape::Path => i - 1,
                TreeShape::Star => 0,
                TreeShape::Binary => (i - 1) / 2,
                TreeShape::Random => rng.gen_range(0..i),
            })
        })
        .collect();
    let jobs: Vec<(u64, usize)> = (0..n)
        .map(|_| (rng.gen_range(1..=max_size), rng.gen_range(0..m)))
        .collect();
    Instance::new(&parents, &jobs).expect("generator produces valid trees")
}
