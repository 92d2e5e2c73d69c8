//! Shortest-path search over the reachability graph of a compiled net.
//!
//! Path costs are ordered lexicographically by `(cost, tie)`: `cost` is the
//! alignment cost on a fixed-point grid of [`COST_RESOLUTION`], `tie` an
//! integer secondary key that makes the choice among equal-cost paths
//! deterministic. Integer sums do not depend on the order of addition, so two
//! paths tie exactly when their rounded step costs add up to the same value.
//! Nodes are keyed by marking, so each marking is settled at most once.

use std::cmp::{Ordering, Reverse};
use std::collections::hash_map::Entry;
use std::collections::{BinaryHeap, HashMap};
use std::time::{Duration, Instant};

use crate::error::{Error, Result};

/// Step costs are rounded to multiples of this (2^-40) before summing.
pub const COST_RESOLUTION: f64 = 1.0 / (1u64 << 40) as f64;

pub const DEFAULT_MAX_EXPANSIONS: u64 = 5_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchBudget {
    pub max_expansions: u64,
    pub time_limit: Option<Duration>,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget { max_expansions: DEFAULT_MAX_EXPANSIONS, time_limit: None }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub expanded: u64,
    pub generated: u64,
    pub queue_peak: usize,
    pub elapsed: Duration,
}

#[derive(Clone, Debug)]
pub(crate) struct Step {
    pub inputs: Vec<u32>,
    pub outputs: Vec<u32>,
    /// Reported cost.
    pub cost: f64,
    /// Cost used for ordering, in multiples of [`COST_RESOLUTION`].
    pub units: u64,
    pub tie: u64,
}

/// Index-based net ready for search. `steps` are tried in slice order.
#[derive(Clone, Debug)]
pub(crate) struct CompiledNet {
    pub steps: Vec<Step>,
    pub initial: Vec<u32>,
    pub target: Vec<u32>,
}

pub(crate) struct Found {
    pub path: Vec<usize>,
    pub cost: f64,
    pub stats: SearchStats,
}

type Marking = Box<[u32]>;

/// `cost` in multiples of [`COST_RESOLUTION`].
pub(crate) fn to_units(cost: f64) -> u64 {
    (cost / COST_RESOLUTION).round() as u64
}

struct Node {
    marking: Marking,
    cost: u64,
    tie: u64,
    estimate: u64,
    pred: Option<(u32, u32)>,
    version: u32,
    closed: bool,
}

#[derive(Clone, Copy, Debug)]
struct QueueEntry {
    priority: u64,
    tie: u64,
    seq: u64,
    node: u32,
    version: u32,
}

impl PartialEq for QueueEntry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for QueueEntry {}

impl PartialOrd for QueueEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for QueueEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        self.priority.cmp(&other.priority).then(self.tie.cmp(&other.tie)).then(self.seq.cmp(&other.seq))
    }
}

fn improves(cost: u64, tie: u64, old_cost: u64, old_tie: u64) -> bool {
    (cost, tie) < (old_cost, old_tie)
}

impl CompiledNet {
    fn enabled(&self, marking: &[u32], step: &Step) -> bool {
        step.inputs.iter().all(|&p| marking[p as usize] > 0)
    }

    fn fire(&self, marking: &[u32], step: &Step) -> Marking {
        let mut next: Marking = marking.into();
        for &p in &step.inputs {
            next[p as usize] -= 1;
        }
        for &p in &step.outputs {
            next[p as usize] += 1;
        }
        next
    }

    /// Cheapest path from `initial` to `target`. `estimate` must be a
    /// consistent lower bound on the remaining cost in grid units (zero is
    /// always safe).
    pub fn shortest_path(&self, budget: &SearchBudget, estimate: &dyn Fn(&[u32]) -> u64) -> Result<Found> {
        let started = Instant::now();
        let mut stats = SearchStats::default();
        let mut nodes: Vec<Node> = Vec::new();
        let mut index: HashMap<Marking, u32> = HashMap::new();
        let mut queue = BinaryHeap::new();
        let mut seq = 0u64;

        let initial: Marking = self.initial.clone().into_boxed_slice();
        let h0 = estimate(&initial);
        nodes.push(Node {
            marking: initial.clone(),
            cost: 0,
            tie: 0,
            estimate: h0,
            pred: None,
            version: 0,
            closed: false,
        });
        index.insert(initial, 0);
        queue.push(Reverse(QueueEntry { priority: h0, tie: 0, seq, node: 0, version: 0 }));
        stats.queue_peak = 1;

        while let Some(Reverse(entry)) = queue.pop() {
            let current = entry.node as usize;
            if nodes[current].closed || nodes[current].version != entry.version {
                continue;
            }
            nodes[current].closed = true;
            if *nodes[current].marking == self.target[..] {
                stats.elapsed = started.elapsed();
                let path = reconstruct(&nodes, current);
                let cost = path.iter().map(|&s| self.steps[s].cost).sum();
                return Ok(Found { path, cost, stats });
            }
            stats.expanded += 1;
            if stats.expanded > budget.max_expansions {
                return Err(Error::NodeBudgetExceeded(budget.max_expansions));
            }
            if let Some(limit) = budget.time_limit {
                if stats.expanded % 1024 == 0 && started.elapsed() > limit {
                    return Err(Error::Timeout(started.elapsed()));
                }
            }

            let (base_cost, base_tie) = (nodes[current].cost, nodes[current].tie);
            for (s, step) in self.steps.iter().enumerate() {
                if !self.enabled(&nodes[current].marking, step) {
                    continue;
                }
                stats.generated += 1;
                let next = self.fire(&nodes[current].marking, step);
                let cost = base_cost.saturating_add(step.units);
                let tie = base_tie + step.tie;
                let pred = Some((current as u32, s as u32));
                let target = match index.entry(next) {
                    Entry::Occupied(o) => {
                        let id = *o.get() as usize;
                        let node = &mut nodes[id];
                        if node.closed || !improves(cost, tie, node.cost, node.tie) {
                            continue;
                        }
                        node.cost = cost;
                        node.tie = tie;
                        node.pred = pred;
                        node.version += 1;
                        id
                    }
                    Entry::Vacant(v) => {
                        let id = nodes.len();
                        let h = estimate(v.key());
                        nodes.push(Node {
                            marking: v.key().clone(),
                            cost,
                            tie,
                            estimate: h,
                            pred,
                            version: 0,
                            closed: false,
                        });
                        v.insert(id as u32);
                        id
                    }
                };
                seq += 1;
                let node = &nodes[target];
                queue.push(Reverse(QueueEntry {
                    priority: node.cost.saturating_add(node.estimate),
                    tie: node.tie,
                    seq,
                    node: target as u32,
                    version: node.version,
                }));
                stats.queue_peak = stats.queue_peak.max(queue.len());
            }
        }
        Err(Error::NoAlignment)
    }
}

fn reconstruct(nodes: &[Node], mut at: usize) -> Vec<usize> {
    let mut path = Vec::new();
    while let Some((prev, step)) = nodes[at].pred {
        path.push(step as usize);
        at = prev as usize;
    }
    path.reverse();
    path
}

#[cfg(test)]
mod tests {
    use super::*;

    fn step(inputs: &[u32], outputs: &[u32], cost: f64) -> Step {
        Step { inputs: inputs.to_vec(), outputs: outputs.to_vec(), cost, units: to_units(cost), tie: 0 }
    }

    #[test]
    fn picks_the_cheaper_branch() {
        // 0 -> 1 directly (cost 5) or via 2 (cost 1 + 1)
        let net = CompiledNet {
            steps: vec![step(&[0], &[1], 5.0), step(&[0], &[2], 1.0), step(&[2], &[1], 1.0)],
            initial: vec![1, 0, 0],
            target: vec![0, 1, 0],
        };
        let found = net.shortest_path(&SearchBudget::default(), &|_| 0).unwrap();
        assert_eq!(found.path, vec![1, 2]);
        assert_eq!(found.cost, 2.0);
    }

    #[test]
    fn zero_cost_cycles_terminate() {
        let net = CompiledNet {
            steps: vec![step(&[0], &[1], 0.0), step(&[1], &[0], 0.0), step(&[1], &[2], 1.0)],
            initial: vec![1, 0, 0],
            target: vec![0, 0, 1],
        };
        let found = net.shortest_path(&SearchBudget::default(), &|_| 0).unwrap();
        assert_eq!(found.path, vec![0, 2]);
    }

    #[test]
    fn unreachable_target_is_reported() {
        let net = CompiledNet { steps: vec![step(&[1], &[0], 1.0)], initial: vec![1, 0], target: vec![0, 1] };
        assert!(matches!(net.shortest_path(&SearchBudget::default(), &|_| 0), Err(Error::NoAlignment)));
    }

    #[test]
    fn unbounded_growth_hits_the_budget() {
        // place 0 keeps generating tokens on place 1; target never reachable
        let net = CompiledNet {
            steps: vec![step(&[0], &[0, 1], 1.0)],
            initial: vec![1, 0, 0],
            target: vec![0, 0, 1],
        };
        let budget = SearchBudget { max_expansions: 100, time_limit: None };
        assert!(matches!(net.shortest_path(&budget, &|_| 0), Err(Error::NodeBudgetExceeded(100))));
    }

    #[test]
    fn secondary_key_breaks_cost_ties() {
        let mut a = step(&[0], &[1], 1.0);
        a.tie = 3;
        let b = step(&[0], &[1], 1.0);
        let net = CompiledNet { steps: vec![a, b], initial: vec![1, 0], target: vec![0, 1] };
        let found = net.shortest_path(&SearchBudget::default(), &|_| 0).unwrap();
        assert_eq!(found.path, vec![1]);
    }

    #[test]
    fn summation_order_does_not_break_ties() {
        // 0.1 + 0.2 != 0.3 in floating point; on the grid both paths cost the same
        let mut direct = step(&[0], &[2], 0.3);
        direct.tie = 1;
        let net = CompiledNet {
            steps: vec![direct, step(&[0], &[1], 0.1), step(&[1], &[2], 0.2)],
            initial: vec![1, 0, 0],
            target: vec![0, 0, 1],
        };
        let found = net.shortest_path(&SearchBudget::default(), &|_| 0).unwrap();
        assert_eq!(found.path, vec![1, 2]);
        assert_eq!(to_units(0.1) + to_units(0.2), to_units(0.3));
    }
}
