//! Scheduler policies and exact oracles.
//!
//! Modified-RS picks uniformly among the incomplete tasks of minimal label.
//! The eligible-RS baseline picks uniformly among all dependency-eligible
//! tasks (an extrapolation of plain random selection to dependent tasks;
//! the level discipline is what the analysis relies on). The deterministic
//! baseline picks the smallest id among the minimal-label incomplete tasks.
//!
//! The oracles are exponential-time reference computations for tiny
//! instances: the structural work lower bound, exact OPT by exhaustive
//! search over task selections, and the exact expected work of a policy by
//! enumerating every random choice path.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::Rng;

use crate::computation_dag::CompDag;
use crate::error::{Error, Result};
use crate::rng::Stream;
use crate::task_graph::{TaskGraph, TaskId, TaskSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum PolicyKind {
    ModifiedRs,
    EligibleRs,
    LowestLabelDet,
}

/// A scheduling policy descriptor. Randomness is supplied per call, so a
/// policy value is immutable and shareable; given the same knowledge, task
/// graph, and random stream the choice is deterministic.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SchedulerPolicy {
    pub kind: PolicyKind,
}

impl SchedulerPolicy {
    pub fn modified_rs() -> Self {
        Self { kind: PolicyKind::ModifiedRs }
    }

    pub fn eligible_rs() -> Self {
        Self { kind: PolicyKind::EligibleRs }
    }

    pub fn lowest_label_det() -> Self {
        Self { kind: PolicyKind::LowestLabelDet }
    }

    pub fn is_randomized(&self) -> bool {
        !matches!(self.kind, PolicyKind::LowestLabelDet)
    }

    /// The selection pool this policy draws from.
    pub fn pool(&self, graph: &TaskGraph, known_complete: &TaskSet) -> Result<TaskSet> {
        match self.kind {
            PolicyKind::ModifiedRs => graph.minimal_label_incomplete(known_complete),
            PolicyKind::EligibleRs => {
                let pool = graph.eligible_tasks(known_complete)?;
                if pool.is_empty() {
                    return Err(Error::EmptyChoice);
                }
                Ok(pool)
            }
            PolicyKind::LowestLabelDet => {
                let pool = graph.minimal_label_incomplete(known_complete)?;
                let first = pool.iter().next().expect("nonempty pool");
                Ok(TaskSet::from_iter(graph.task_count(), [first]))
            }
        }
    }
}

/// Chooses the next task for a group with knowledge `known_complete`.
/// Consumes randomness only for the randomized kinds.
pub fn choose_next(
    policy: &SchedulerPolicy,
    graph: &TaskGraph,
    known_complete: &TaskSet,
    rng: &mut Stream,
) -> Result<TaskId> {
    let pool = policy.pool(graph, known_complete)?;
    let n = pool.len();
    debug_assert!(n > 0);
    let index = if policy.is_randomized() && n > 1 {
        rng.gen_range(0..n)
    } else if policy.is_randomized() {
        // single candidate still consumes one draw, keeping streams aligned
        rng.gen_range(0..1)
    } else {
        0
    };
    let chosen = pool.iter().nth(index).expect("index within pool");
    Ok(chosen)
}

/// The structural work lower bound derived from saturation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OptBound {
    /// Work forced at saturated vertices: `Σ_{s saturated} h(s)`.
    pub saturated_work: u64,
    /// Any schedule completes all `t` tasks at least once.
    pub trivial_floor: u64,
    /// For each unsaturated vertex `v` with `Σ_{u<v} h(u) < t`, the forced
    /// work `max(h(v), t − Σ_{u<v} h(u))`.
    pub unsaturated_obligations: Vec<(usize, u64)>,
    pub lower_bound: u64,
}

/// `W_OPT ≥ max(t, Σ_{saturated} h)`; obligations of unsaturated vertices
/// are reported alongside.
pub fn opt_lower_bound(dag: &CompDag) -> Result<OptBound> {
    let report = dag.classify_saturation(None)?;
    let t = dag.task_count() as u64;
    let saturated_work: u64 = report
        .saturated
        .iter()
        .map(|&id| dag.vertex(id).unwrap().quota as u64)
        .sum();
    let unsaturated_obligations: Vec<(usize, u64)> = report
        .unsaturated
        .iter()
        .filter_map(|&id| {
            let quota = dag.vertex(id).unwrap().quota as u64;
            let strict = report.predecessor_work[&id] - quota;
            (strict < t).then(|| (id, quota.max(t - strict)))
        })
        .collect();
    Ok(OptBound {
        saturated_work,
        trivial_floor: t,
        lower_bound: saturated_work.max(t),
        unsaturated_obligations,
    })
}

/// Caps for the exhaustive oracles.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleLimits {
    /// Maximum total quota `Σ h(v)` the exact OPT search will accept.
    pub max_total_quota: u64,
    /// Maximum number of explored states before giving up.
    pub max_states: u64,
}

impl Default for OracleLimits {
    fn default() -> Self {
        Self {
            max_total_quota: 24,
            max_states: 5_000_000,
        }
    }
}

/// Bitmask helpers for tiny task sets (`t ≤ 24`).
struct MaskCtx {
    t: usize,
    pred_mask: Vec<u32>,
    label: Vec<u32>,
}

impl MaskCtx {
    fn new(graph: &TaskGraph) -> Result<Self> {
        let t = graph.task_count();
        if t > 24 {
            return Err(Error::ResourceLimit("exact oracles require t ≤ 24".into()));
        }
        let pred_mask = (0..t as u32)
            .map(|v| {
                graph
                    .predecessors(TaskId(v))
                    .iter()
                    .fold(0u32, |m, u| m | 1 << u.0)
            })
            .collect();
        let label = (0..t as u32).map(|v| graph.label(TaskId(v))).collect();
        Ok(Self { t, pred_mask, label })
    }

    fn full(&self) -> u32 {
        (1u32 << self.t) - 1
    }

    fn is_closed(&self, set: u32) -> bool {
        (0..self.t).all(|v| set & (1 << v) == 0 || self.pred_mask[v] & !set == 0)
    }
}

/// Exact `W_OPT`: the minimum total work over all deterministic per-vertex
/// task selections, by exhaustive search with memoization on the knowledge
/// profile of vertices that still feed unprocessed ones.
pub fn opt_exact(dag: &CompDag, graph: &TaskGraph, limits: &OracleLimits) -> Result<u64> {
    if dag.task_count() != graph.task_count() {
        return Err(Error::InvalidArgument("pattern and task graph disagree on t".into()));
    }
    if dag.total_quota() > limits.max_total_quota {
        return Err(Error::ResourceLimit(alloc::format!(
            "total quota {} exceeds cap {}",
            dag.total_quota(),
            limits.max_total_quota
        )));
    }
    let ctx = MaskCtx::new(graph)?;
    let order = dag
        .topological_ids()
        .ok_or(Error::PreconditionViolation("pattern is cyclic".into()))?;
    let position: BTreeMap<usize, usize> = order.iter().enumerate().map(|(i, &id)| (id, i)).collect();
    // last_use[i]: the latest topo position whose knowledge_in reads vertex i.
    let mut last_use: Vec<usize> = (0..order.len()).collect();
    for (to_pos, &id) in order.iter().enumerate() {
        for parent in dag.parents(id)? {
            let from_pos = position[&parent];
            last_use[from_pos] = last_use[from_pos].max(to_pos);
        }
    }
    struct Search<'a> {
        dag: &'a CompDag,
        ctx: MaskCtx,
        order: Vec<usize>,
        position: BTreeMap<usize, usize>,
        last_use: Vec<usize>,
        memo: BTreeMap<(usize, Vec<u32>), u64>,
        states: u64,
        max_states: u64,
    }
    impl Search<'_> {
        /// Minimum work over vertices `pos..`, given knowledge_out masks of
        /// all processed vertices.
        fn run(&mut self, pos: usize, knowledge: &mut Vec<u32>) -> Result<u64> {
            if pos == self.order.len() {
                return Ok(0);
            }
            self.states += 1;
            if self.states > self.max_states {
                return Err(Error::ResourceLimit("state cap exceeded in exact OPT".into()));
            }
            let key_profile: Vec<u32> = (0..pos)
                .map(|i| if self.last_use[i] >= pos { knowledge[i] } else { 0 })
                .collect();
            if let Some(&cached) = self.memo.get(&(pos, key_profile.clone())) {
                return Ok(cached);
            }
            let id = self.order[pos];
            let k_in = self
                .dag
                .parents(id)
                .unwrap()
                .into_iter()
                .fold(0u32, |m, parent| m | knowledge[self.position[&parent]]);
            let quota = self.dag.vertex(id).unwrap().quota as u64;
            let missing = (self.ctx.t - k_in.count_ones() as usize) as u64;
            let exec = quota.min(missing) as u32;
            let target = k_in.count_ones() + exec;
            let mut best = u64::MAX;
            // Every dependency-closed superset of k_in of the right size is
            // reachable by executing its new tasks in topological order.
            for set in 0..=self.ctx.full() {
                if set & k_in != k_in
                    || set.count_ones() != target
                    || !self.ctx.is_closed(set)
                {
                    continue;
                }
                knowledge.push(set);
                let rest = self.run(pos + 1, knowledge)?;
                knowledge.pop();
                best = best.min(exec as u64 + rest);
            }
            debug_assert_ne!(best, u64::MAX, "some closed superset always exists");
            self.memo.insert((pos, key_profile), best);
            Ok(best)
        }
    }
    let mut search = Search {
        dag,
        ctx,
        order,
        position,
        last_use,
        memo: BTreeMap::new(),
        states: 0,
        max_states: limits.max_states,
    };
    let mut knowledge = Vec::new();
    search.run(0, &mut knowledge)
}

/// Exact expected work of a policy: enumerates every random choice path
/// with its probability and returns `E[W]` as an exact rational.
pub fn expected_work_exact(
    dag: &CompDag,
    graph: &TaskGraph,
    policy: &SchedulerPolicy,
    limits: &OracleLimits,
) -> Result<BigRational> {
    if dag.task_count() != graph.task_count() {
        return Err(Error::InvalidArgument("pattern and task graph disagree on t".into()));
    }
    let ctx = MaskCtx::new(graph)?;
    let order = dag
        .topological_ids()
        .ok_or(Error::PreconditionViolation("pattern is cyclic".into()))?;
    let position: BTreeMap<usize, usize> = order.iter().enumerate().map(|(i, &id)| (id, i)).collect();
    struct Enumerate<'a> {
        dag: &'a CompDag,
        ctx: MaskCtx,
        order: Vec<usize>,
        position: BTreeMap<usize, usize>,
        kind: PolicyKind,
        states: u64,
        max_states: u64,
    }
    impl Enumerate<'_> {
        fn pool(&self, known: u32) -> Vec<u32> {
            let min_label = (0..self.ctx.t)
                .filter(|&v| known & (1 << v) == 0)
                .map(|v| self.ctx.label[v])
                .min()
                .expect("pool queried only while incomplete");
            (0..self.ctx.t as u32)
                .filter(|&v| known & (1 << v) == 0)
                .filter(|&v| match self.kind {
                    PolicyKind::ModifiedRs => self.ctx.label[v as usize] == min_label,
                    PolicyKind::EligibleRs => self.ctx.pred_mask[v as usize] & !known == 0,
                    PolicyKind::LowestLabelDet => self.ctx.label[v as usize] == min_label,
                })
                .collect()
        }

        /// Expected remaining work from `pos` on, given processed
        /// knowledge_out masks.
        fn vertices(&mut self, pos: usize, knowledge: &mut Vec<u32>) -> Result<BigRational> {
            if pos == self.order.len() {
                return Ok(BigRational::from_integer(BigInt::from(0)));
            }
            let id = self.order[pos];
            let k_in = self
                .dag
                .parents(id)
                .unwrap()
                .into_iter()
                .fold(0u32, |m, parent| m | knowledge[self.position[&parent]]);
            let quota = self.dag.vertex(id).unwrap().quota;
            self.within_vertex(pos, k_in, quota, knowledge)
        }

        /// Runs the selection loop of the vertex at `pos`, branching on
        /// every random choice.
        fn within_vertex(
            &mut self,
            pos: usize,
            known: u32,
            quota_left: u32,
            knowledge: &mut Vec<u32>,
        ) -> Result<BigRational> {
            self.states += 1;
            if self.states > self.max_states {
                return Err(Error::ResourceLimit(
                    "state cap exceeded in exact expectation".into(),
                ));
            }
            if quota_left == 0 || known == self.ctx.full() {
                knowledge.push(known);
                let rest = self.vertices(pos + 1, knowledge)?;
                knowledge.pop();
                return Ok(rest);
            }
            let pool = self.pool(known);
            let pool = if self.kind == PolicyKind::LowestLabelDet {
                alloc::vec![pool[0]]
            } else {
                pool
            };
            let prob = BigRational::new(BigInt::from(1), BigInt::from(pool.len()));
            let one = BigRational::from_integer(BigInt::from(1));
            let mut acc = BigRational::from_integer(BigInt::from(0));
            for task in pool {
                let rest =
                    self.within_vertex(pos, known | 1 << task, quota_left - 1, knowledge)?;
                acc += prob.clone() * (one.clone() + rest);
            }
            Ok(acc)
        }
    }
    let mut enumerate = Enumerate {
        dag,
        ctx,
        order,
        position,
        kind: policy.kind,
        states: 0,
        max_states: limits.max_states,
    };
    let mut knowledge = Vec::new();
    enumerate.vertices(0, &mut knowledge)
}
