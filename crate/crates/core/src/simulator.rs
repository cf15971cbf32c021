//! Executes a scheduler policy over a computation DAG.
//!
//! Vertices are processed in topological order. A vertex's incoming
//! knowledge is the union of its predecessors' outgoing knowledge (the
//! merged group shares everything known so far); the group then selects and
//! executes tasks one at a time until its quota is exhausted or it knows
//! all `t` tasks are complete. Work counts executions per vertex.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use rand::Rng;

use crate::computation_dag::CompDag;
use crate::error::{Error, Result};
use crate::rng::{self, Stream};
use crate::scheduling::{PolicyKind, SchedulerPolicy};
use crate::task_graph::{TaskGraph, TaskId, TaskSet};

/// Per-vertex execution record of a single run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexTrace {
    pub vertex: usize,
    /// Tasks executed at this vertex, in order. Never contains duplicates:
    /// the pool is always drawn from tasks outside the group's knowledge.
    pub executed: Vec<TaskId>,
    pub knowledge_in: TaskSet,
    pub knowledge_out: TaskSet,
}

/// Outcome of one run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WorkReport {
    pub total_work: u64,
    pub traces: Vec<VertexTrace>,
    /// True iff every terminal vertex ends knowing all `t` tasks.
    pub terminal_complete: bool,
}

impl WorkReport {
    pub fn trace(&self, vertex: usize) -> Option<&VertexTrace> {
        self.traces.iter().find(|tr| tr.vertex == vertex)
    }
}

/// Incremental task selector for one vertex; equivalent to repeated
/// [`crate::scheduling::choose_next`] calls but amortized O(1) per pick.
enum Selector {
    /// Pool = incomplete tasks of the minimal incomplete level. Serves
    /// Modified-RS and the deterministic baseline, and eligible-RS on
    /// complete leveled graphs (where eligibility coincides with the
    /// minimal level).
    MinLevel {
        level: usize,
        pool: Vec<TaskId>,
        deterministic: bool,
        cursor: usize,
    },
    /// Pool = all dependency-eligible incomplete tasks, maintained through
    /// predecessor counters. Serves eligible-RS on explicit DAGs.
    Eligible { unmet: Vec<u32>, pool: Vec<TaskId> },
}

impl Selector {
    fn new(policy: &SchedulerPolicy, graph: &TaskGraph, known: &TaskSet) -> Self {
        let use_eligible =
            policy.kind == PolicyKind::EligibleRs && !graph.is_complete_leveled();
        if use_eligible {
            let t = graph.task_count();
            let mut unmet = alloc::vec![0u32; t];
            let mut pool = Vec::new();
            for v in 0..t as u32 {
                let v = TaskId(v);
                if known.contains(v) {
                    continue;
                }
                let missing = graph
                    .predecessors(v)
                    .iter()
                    .filter(|&&u| !known.contains(u))
                    .count() as u32;
                unmet[v.index()] = missing;
                if missing == 0 {
                    pool.push(v);
                }
            }
            Selector::Eligible { unmet, pool }
        } else {
            Selector::MinLevel {
                level: 0,
                pool: Vec::new(),
                deterministic: policy.kind == PolicyKind::LowestLabelDet,
                cursor: 0,
            }
        }
    }

    fn next(&mut self, graph: &TaskGraph, known: &TaskSet, rng: &mut Stream) -> Option<TaskId> {
        match self {
            Selector::MinLevel {
                level,
                pool,
                deterministic,
                cursor,
            } => {
                while *cursor >= pool.len() {
                    if *level >= graph.level_count() {
                        return None;
                    }
                    pool.clear();
                    *cursor = 0;
                    pool.extend(
                        graph
                            .level_tasks(*level)
                            .iter()
                            .copied()
                            .filter(|&v| !known.contains(v)),
                    );
                    *level += 1;
                }
                if *deterministic {
                    let task = pool[*cursor];
                    *cursor += 1;
                    Some(task)
                } else {
                    let idx = rng.gen_range(*cursor..pool.len());
                    let task = pool[idx];
                    pool.swap_remove(idx);
                    Some(task)
                }
            }
            Selector::Eligible { unmet, pool } => {
                if pool.is_empty() {
                    return None;
                }
                let idx = rng.gen_range(0..pool.len());
                let task = pool.swap_remove(idx);
                for succ in graph.successors(task) {
                    let counter = &mut unmet[succ.index()];
                    *counter -= 1;
                    if *counter == 0 && !known.contains(succ) {
                        pool.push(succ);
                    }
                }
                Some(task)
            }
        }
    }
}

/// Runs `policy` over the pattern, propagating knowledge along edges.
/// Deterministic given identical inputs and seed.
pub fn run(
    dag: &CompDag,
    graph: &TaskGraph,
    policy: &SchedulerPolicy,
    seed: u64,
) -> Result<WorkReport> {
    if dag.task_count() != graph.task_count() {
        return Err(Error::InvalidArgument("pattern and task graph disagree on t".into()));
    }
    let violations = dag.validate();
    if !violations.is_empty() {
        return Err(Error::InvalidPattern(violations));
    }
    let t = graph.task_count();
    let order = dag.topological_ids().expect("validated DAG is acyclic");
    let mut rng = rng::stream_from_seed(seed);
    let mut knowledge_out: BTreeMap<usize, TaskSet> = BTreeMap::new();
    let mut traces = Vec::with_capacity(order.len());
    let mut terminal_complete = true;
    for id in order {
        let mut known = TaskSet::new(t);
        for parent in dag.parents(id)? {
            known.union_with(&knowledge_out[&parent]);
        }
        let knowledge_in = known.clone();
        let quota = dag.vertex(id)?.quota;
        let mut executed = Vec::new();
        let mut selector = Selector::new(policy, graph, &known);
        while (executed.len() as u32) < quota && known.len() < t {
            let task = selector
                .next(graph, &known, &mut rng)
                .ok_or_else(|| {
                    Error::PreconditionViolation(
                        "scheduler found no selectable task while incomplete".into(),
                    )
                })?;
            known.insert(task);
            executed.push(task);
        }
        if dag.out_degree(id)? == 0 && known.len() < t {
            terminal_complete = false;
        }
        traces.push(VertexTrace {
            vertex: id,
            executed,
            knowledge_in,
            knowledge_out: known.clone(),
        });
        knowledge_out.insert(id, known);
    }
    let total_work = traces.iter().map(|tr| tr.executed.len() as u64).sum();
    Ok(WorkReport {
        total_work,
        traces,
        terminal_complete,
    })
}

/// Summary statistics over independent trials.
#[derive(Debug, Clone, PartialEq)]
pub struct McSummary {
    pub trials: u64,
    pub master_seed: u64,
    pub mean_work: f64,
    /// Sample standard deviation of total work (0 for a single trial).
    pub std_dev: f64,
    pub min_work: u64,
    pub max_work: u64,
    /// Mean executed-task count per vertex id.
    pub per_vertex_mean: BTreeMap<usize, f64>,
}

impl McSummary {
    /// Standard error of the mean.
    pub fn std_error(&self) -> f64 {
        if self.trials == 0 {
            0.0
        } else {
            self.std_dev / (self.trials as f64).sqrt()
        }
    }
}

/// Runs `trials` independent trials with per-trial seeds derived from
/// `master_seed`; fully reproducible.
pub fn monte_carlo(
    dag: &CompDag,
    graph: &TaskGraph,
    policy: &SchedulerPolicy,
    trials: u64,
    master_seed: u64,
) -> Result<McSummary> {
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be at least 1".into()));
    }
    let mut sum = 0.0f64;
    let mut sum_sq = 0.0f64;
    let mut min_work = u64::MAX;
    let mut max_work = 0u64;
    let mut per_vertex: BTreeMap<usize, f64> = BTreeMap::new();
    for i in 0..trials {
        let report = run(dag, graph, policy, rng::trial_seed(master_seed, i))?;
        let work = report.total_work as f64;
        sum += work;
        sum_sq += work * work;
        min_work = min_work.min(report.total_work);
        max_work = max_work.max(report.total_work);
        for tr in &report.traces {
            *per_vertex.entry(tr.vertex).or_insert(0.0) += tr.executed.len() as f64;
        }
    }
    let n = trials as f64;
    let mean_work = sum / n;
    let std_dev = if trials > 1 {
        let var = (sum_sq - n * mean_work * mean_work) / (n - 1.0);
        var.max(0.0).sqrt()
    } else {
        0.0
    };
    for value in per_vertex.values_mut() {
        *value /= n;
    }
    Ok(McSummary {
        trials,
        master_seed,
        mean_work,
        std_dev,
        min_work,
        max_work,
        per_vertex_mean: per_vertex,
    })
}
