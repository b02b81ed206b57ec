//! Relaxed decision procedure for a fixed target `C`.
//!
//! Nodes are processed children-first. At a node `v` the tuple sets pushed
//! up by the children are combined by repeated Minkowski sums starting from
//! the zero tuple, shifted by `c_v` (the tuple of jobs homed at `v`), and for
//! every resulting `c` and every subtuple `ĉ <= c` fitting into `(1+3ε)C`
//! the leftover `c - ĉ` becomes a candidate pushed to the parent. The target
//! is accepted iff the root can push the zero tuple.
//!
//! Each pushed tuple keeps exactly one witness (the first one found), which
//! is enough to unwind a successful run into a [`ConfigAssignment`].

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::rounding::{ConfigTuple, Epsilon, SizeGrid};
use crate::scalar::ExactScalar;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct DpOptions {
    /// Drop pushed tuples that componentwise dominate another pushed tuple.
    pub dominance_prune: bool,
}

/// How one pushed tuple arises at its node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    /// `ĉ`, the configuration kept on the node.
    pub scheduled_here: ConfigTuple,
    /// `c = c_v + Σ children`; the pushed tuple is `c - ĉ`.
    pub incoming_total: ConfigTuple,
    /// Tuple each child pushed, in child order.
    pub child_chain: Vec<(usize, ConfigTuple)>,
}

/// Finished state of one node: every tuple it may push to its parent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeState {
    pub node: usize,
    pushed: BTreeMap<ConfigTuple, Witness>,
}

impl NodeState {
    pub fn pushed(&self) -> impl Iterator<Item = &ConfigTuple> {
        self.pushed.keys()
    }

    pub fn witness(&self, tuple: &ConfigTuple) -> Option<&Witness> {
        self.pushed.get(tuple)
    }

    pub fn contains(&self, tuple: &ConfigTuple) -> bool {
        self.pushed.contains_key(tuple)
    }

    pub fn len(&self) -> usize {
        self.pushed.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pushed.is_empty()
    }
}

/// Back-pointer of a Minkowski sum element: the summands it was first built from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SumPointer {
    pub left: ConfigTuple,
    pub right: ConfigTuple,
}

pub type SumSet = BTreeMap<ConfigTuple, SumPointer>;

/// `{a + b : a ∈ left, b ∈ right}`, deduplicated. Iteration is left-major
/// so the retained back-pointer is the lexicographically first pair.
pub fn minkowski_sum<'a, L, R>(left: L, right: R) -> SumSet
where
    L: IntoIterator<Item = &'a ConfigTuple>,
    R: IntoIterator<Item = &'a ConfigTuple> + Clone,
{
    let mut out = SumSet::new();
    for a in left {
        for b in right.clone() {
            out.entry(a.add(b))
                .or_insert_with(|| SumPointer { left: a.clone(), right: b.clone() });
        }
    }
    out
}

/// Every `ĉ <= c` with rounded size at most `cap`, in lexicographic order.
pub fn enumerate_subtuples<Q: ExactScalar>(c: &ConfigTuple, grid: &SizeGrid<Q>, cap: &Q) -> Vec<ConfigTuple> {
    let mut out = Vec::new();
    if Q::zero() > *cap {
        return out;
    }
    let mut current = ConfigTuple::zero(c.counts.len());
    subtuples_from(0, c, grid, cap, Q::zero(), &mut current, &mut out);
    out
}

fn subtuples_from<Q: ExactScalar>(
    component: usize,
    bound: &ConfigTuple,
    grid: &SizeGrid<Q>,
    cap: &Q,
    used: Q,
    current: &mut ConfigTuple,
    out: &mut Vec<ConfigTuple>,
) {
    let k = bound.counts.len();
    if component == k + 1 {
        out.push(current.clone());
        return;
    }
    let (limit, unit) = if component < k {
        (bound.counts[component], grid.class_value(component + 1))
    } else {
        (bound.small_units, grid.small_threshold())
    };
    let mut size = used;
    for count in 0..=limit {
        if count > 0 {
            size = size + unit.clone();
            if size > *cap {
                break;
            }
        }
        if component < k {
            current.counts[component] = count;
        } else {
            current.small_units = count;
        }
        subtuples_from(component + 1, bound, grid, cap, size.clone(), current, out);
    }
    if component < k {
        current.counts[component] = 0;
    } else {
        current.small_units = 0;
    }
}

/// Runs the local three-step procedure at `node`.
///
/// `children` must be the finished states of exactly the node's children.
pub fn process_node<Q: ExactScalar>(
    node: usize,
    children: &[&NodeState],
    node_tuple: &ConfigTuple,
    grid: &SizeGrid<Q>,
    options: DpOptions,
) -> NodeState {
    let zero = ConfigTuple::zero(grid.class_count());
    let mut layers: Vec<SumSet> = Vec::with_capacity(children.len());
    let mut accumulated: Vec<ConfigTuple> = vec![zero];
    for child in children {
        let layer = minkowski_sum(accumulated.iter(), child.pushed.keys());
        accumulated = layer.keys().cloned().collect();
        layers.push(layer);
    }

    let cap = grid.machine_cap();
    let mut pushed: BTreeMap<ConfigTuple, Witness> = BTreeMap::new();
    for from_children in &accumulated {
        let incoming = from_children.add(node_tuple);
        let mut chain: Option<Vec<(usize, ConfigTuple)>> = None;
        for kept in enumerate_subtuples(&incoming, grid, cap) {
            let leftover = incoming.sub(&kept).expect("subtuple is bounded by its source");
            if let Entry::Vacant(slot) = pushed.entry(leftover) {
                let child_chain = chain
                    .get_or_insert_with(|| unwind_chain(&layers, children, from_children))
                    .clone();
                slot.insert(Witness {
                    scheduled_here: kept,
                    incoming_total: incoming.clone(),
                    child_chain,
                });
            }
        }
    }

    if options.dominance_prune {
        pushed = prune_dominated(pushed);
    }
    NodeState { node, pushed }
}

fn unwind_chain(layers: &[SumSet], children: &[&NodeState], total: &ConfigTuple) -> Vec<(usize, ConfigTuple)> {
    let mut chain = Vec::with_capacity(layers.len());
    let mut current = total.clone();
    for (layer, child) in layers.iter().zip(children).rev() {
        let pointer = &layer[&current];
        chain.push((child.node, pointer.right.clone()));
        current = pointer.left.clone();
    }
    chain.reverse();
    chain
}

fn prune_dominated(pushed: BTreeMap<ConfigTuple, Witness>) -> BTreeMap<ConfigTuple, Witness> {
    let tuples: Vec<&ConfigTuple> = pushed.keys().collect();
    let keep: Vec<bool> = tuples
        .iter()
        .map(|u| !tuples.iter().any(|other| other != u && other.componentwise_le(u)))
        .collect();
    pushed
        .into_iter()
        .zip(keep)
        .filter_map(|(entry, keep)| keep.then_some(entry))
        .collect()
}

/// All node states for one target, plus the tuples `c_v`.
#[derive(Debug, Clone)]
pub struct DpRun<Q> {
    pub grid: SizeGrid<Q>,
    pub node_tuples: Vec<ConfigTuple>,
    pub states: Vec<NodeState>,
}

impl<Q: ExactScalar> DpRun<Q> {
    /// Whether the root can push the zero tuple.
    pub fn accepts(&self, inst: &Instance) -> bool {
        self.states[inst.root()].contains(&ConfigTuple::zero(self.grid.class_count()))
    }
}

/// `c_v` for every machine.
pub fn node_tuples<Q: ExactScalar>(inst: &Instance, grid: &SizeGrid<Q>) -> Result<Vec<ConfigTuple>> {
    (0..inst.machine_count())
        .map(|v| grid.node_tuple(inst.jobs_homed_at(v).iter().map(|&j| inst.jobs()[j].size)))
        .collect()
}

/// Processes every machine leaf-to-root. Fails if some job exceeds the target.
pub fn run_dp<Q: ExactScalar>(inst: &Instance, grid: SizeGrid<Q>, options: DpOptions) -> Result<DpRun<Q>> {
    let node_tuples = node_tuples(inst, &grid)?;
    let unit_bound = (inst.job_count() + inst.machine_count()) as u32;
    let mut states: Vec<Option<NodeState>> = vec![None; inst.machine_count()];
    for &v in inst.post_order() {
        let children: Vec<&NodeState> = inst
            .children(v)
            .iter()
            .map(|&c| states[c].as_ref().expect("children are processed first"))
            .collect();
        let state = process_node(v, &children, &node_tuples[v], &grid, options);
        debug_assert!(state.pushed().all(|u| u.small_units <= unit_bound));
        states[v] = Some(state);
    }
    let states = states.into_iter().map(|s| s.expect("every node visited")).collect();
    Ok(DpRun { grid, node_tuples, states })
}

/// Configuration kept on every machine and pushed across every tree edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigAssignment {
    /// `ĉ_v` per machine.
    pub scheduled: Vec<ConfigTuple>,
    /// Tuple pushed from each machine to its parent; zero at the root.
    pub pushed_out: Vec<ConfigTuple>,
    /// `c_v` per machine.
    pub node_tuples: Vec<ConfigTuple>,
}

impl ConfigAssignment {
    /// Verifies flow conservation and the per-machine cap.
    pub fn check<Q: ExactScalar>(&self, inst: &Instance, grid: &SizeGrid<Q>) -> Result<()> {
        for v in 0..inst.machine_count() {
            let inflow = inst
                .children(v)
                .iter()
                .fold(self.node_tuples[v].clone(), |acc, &c| acc.add(&self.pushed_out[c]));
            let outflow = self.scheduled[v].add(&self.pushed_out[v]);
            if inflow != outflow {
                return Err(Error::Internal(format!(
                    "flow not conserved at machine {v}: in {inflow}, out {outflow}"
                )));
            }
            if !grid.fits(&self.scheduled[v], grid.machine_cap()) {
                return Err(Error::Internal(format!("machine {v} exceeds the configuration cap")));
            }
        }
        if !self.pushed_out[inst.root()].is_zero() {
            return Err(Error::Internal("root pushes a nonzero tuple".into()));
        }
        Ok(())
    }
}

/// Walks witnesses from the root down. Requires the root to push zero.
pub fn extract_assignment(inst: &Instance, states: &[NodeState], node_tuples: &[ConfigTuple]) -> Result<ConfigAssignment> {
    let m = inst.machine_count();
    let k = node_tuples.first().map_or(0, |t| t.counts.len());
    let mut scheduled = vec![ConfigTuple::zero(k); m];
    let mut pushed_out = vec![ConfigTuple::zero(k); m];
    let mut stack = vec![inst.root()];
    while let Some(v) = stack.pop() {
        let witness = states[v].witness(&pushed_out[v]).ok_or_else(|| {
            Error::Internal(format!("machine {v} has no witness for pushed tuple {}", pushed_out[v]))
        })?;
        scheduled[v] = witness.scheduled_here.clone();
        for (child, tuple) in &witness.child_chain {
            pushed_out[*child] = tuple.clone();
            stack.push(*child);
        }
    }
    Ok(ConfigAssignment { scheduled, pushed_out, node_tuples: node_tuples.to_vec() })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Infeasible {
    /// Some job is longer than the target.
    JobExceedsTarget { size: u64 },
    /// The root cannot push the zero tuple.
    RootCannotClear,
}

#[derive(Debug, Clone)]
pub enum Decision<Q> {
    Feasible { grid: SizeGrid<Q>, assignment: ConfigAssignment },
    Infeasible(Infeasible),
}

impl<Q> Decision<Q> {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Decision::Feasible { .. })
    }
}

/// Relaxed decision for target `target`: on success every machine gets a
/// configuration of rounded size at most `(1+3ε)C`. Succeeds whenever a
/// schedule of makespan at most `target` exists.
pub fn decide<Q: ExactScalar>(inst: &Instance, target: u64, eps: Epsilon, options: DpOptions) -> Result<Decision<Q>> {
    let max = inst.max_size();
    if max > target {
        return Ok(Decision::Infeasible(Infeasible::JobExceedsTarget { size: max }));
    }
    let run = run_dp(inst, SizeGrid::<Q>::new(target, eps), options)?;
    if !run.accepts(inst) {
        return Ok(Decision::Infeasible(Infeasible::RootCannotClear));
    }
    let assignment = extract_assignment(inst, &run.states, &run.node_tuples)?;
    assignment.check(inst, &run.grid)?;
    Ok(Decision::Feasible { grid: run.grid, assignment })
}
