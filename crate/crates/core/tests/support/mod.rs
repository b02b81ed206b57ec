#![allow(dead_code)]

use std::collections::BTreeSet;

use treesched::dp::node_tuples;
use treesched::instance::generate_instance;
use treesched::{ConfigTuple, Epsilon, ExactScalar, Instance, Rational, SizeGrid, TreeShape};

pub const SHAPES: [TreeShape; 4] = [TreeShape::Path, TreeShape::Star, TreeShape::Binary, TreeShape::Random];

#[derive(Debug, Clone)]
pub struct CorpusEntry {
    pub seed: u64,
    pub shape: TreeShape,
    pub instance: Instance,
}

/// Seeded desk-scale instances: m in 1..=5, n in 0..=10, sizes <= 10, all
/// four tree shapes.
pub fn corpus(count: u64) -> Vec<CorpusEntry> {
    (0..count)
        .map(|i| {
            let shape = SHAPES[(i % 4) as usize];
            let m = 1 + (i / 4 % 5) as usize;
            let n = (i * 7 % 11) as usize;
            let seed = 1000 + i;
            CorpusEntry { seed, shape, instance: generate_instance(seed, m, n, 10, shape) }
        })
        .collect()
}

/// Small instances for the DP equivalence check: n <= 8, m <= 4.
pub fn small_corpus(count: u64) -> Vec<CorpusEntry> {
    (0..count)
        .map(|i| {
            let shape = SHAPES[(i % 4) as usize];
            let m = 1 + (i / 4 % 4) as usize;
            let n = (i * 5 % 9) as usize;
            let seed = 5000 + i;
            CorpusEntry { seed, shape, instance: generate_instance(seed, m, n, 10, shape) }
        })
        .collect()
}

pub fn eps(a: u64, b: u64) -> Epsilon {
    Epsilon::new(a, b).unwrap()
}

fn subtree(inst: &Instance, v: usize) -> Vec<usize> {
    let mut out = vec![];
    let mut stack = vec![v];
    while let Some(w) = stack.pop() {
        out.push(w);
        stack.extend_from_slice(inst.children(w));
    }
    out
}

struct Group {
    component: usize,
    count: u32,
    /// Machines (within the subtree) the items may be kept on.
    targets: Vec<usize>,
}

/// Leftover tuples `v` can push to its parent, found by distributing the
/// rounded items homed in `v`'s subtree over the machines they may use.
///
/// Items are the per-node tuples `c_w`: each large class count is a group
/// of identical large items and the small units are a group of identical
/// `εC` items. Every group is split into a composition over the machines on
/// its home path up to `v`, plus a leftover part. Only assignments where
/// every machine's rounded load stays within `cap` are kept.
pub fn brute_force_pushed(inst: &Instance, grid: &SizeGrid<Rational>, v: usize) -> BTreeSet<ConfigTuple> {
    let k = grid.class_count();
    let tuples = node_tuples(inst, grid).unwrap();
    let machines = subtree(inst, v);
    let mut groups = Vec::new();
    for &w in &machines {
        let mut targets = vec![w];
        let mut cur = w;
        while cur != v {
            cur = inst.parent(cur).unwrap();
            targets.push(cur);
        }
        for component in 0..=k {
            let count = if component < k { tuples[w].counts[component] } else { tuples[w].small_units };
            if count > 0 {
                groups.push(Group { component, count, targets: targets.clone() });
            }
        }
    }

    let unit_sizes: Vec<Rational> = (0..=k)
        .map(|c| if c < k { grid.class_value(c + 1).clone() } else { grid.small_threshold().clone() })
        .collect();
    let mut loads = vec![Rational::from_u64(0); inst.machine_count()];
    let mut leftover = ConfigTuple::zero(k);
    let mut out = BTreeSet::new();
    distribute(&groups, 0, &unit_sizes, grid.machine_cap(), &mut loads, &mut leftover, &mut out);
    out
}

fn distribute(
    groups: &[Group],
    index: usize,
    unit_sizes: &[Rational],
    cap: &Rational,
    loads: &mut Vec<Rational>,
    leftover: &mut ConfigTuple,
    out: &mut BTreeSet<ConfigTuple>,
) {
    let Some(group) = groups.get(index) else {
        out.insert(leftover.clone());
        return;
    };
    split(groups, index, 0, group.count, unit_sizes, cap, loads, leftover, out);
}

#[allow(clippy::too_many_arguments)]
fn split(
    groups: &[Group],
    index: usize,
    slot: usize,
    remaining: u32,
    unit_sizes: &[Rational],
    cap: &Rational,
    loads: &mut Vec<Rational>,
    leftover: &mut ConfigTuple,
    out: &mut BTreeSet<ConfigTuple>,
) {
    let group = &groups[index];
    let k = leftover.counts.len();
    if slot == group.targets.len() {
        // Whatever remains is left over for the parent.
        if group.component < k {
            leftover.counts[group.component] += remaining;
        } else {
            leftover.small_units += remaining;
        }
        distribute(groups, index + 1, unit_sizes, cap, loads, leftover, out);
        if group.component < k {
            leftover.counts[group.component] -= remaining;
        } else {
            leftover.small_units -= remaining;
        }
        return;
    }
    let machine = group.targets[slot];
    let unit = &unit_sizes[group.component];
    let base = loads[machine].clone();
    for take in 0..=remaining {
        let load = base.clone() + unit.clone() * Rational::from_u64(take.into());
        if load > *cap {
            break;
        }
        loads[machine] = load;
        split(groups, index, slot + 1, remaining - take, unit_sizes, cap, loads, leftover, out);
    }
    loads[machine] = base;
}
