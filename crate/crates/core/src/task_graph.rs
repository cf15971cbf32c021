//! Leveled task dependency graphs.
//!
//! A task graph is a DAG over `t` tasks where an edge `(u, v)` means `v`
//! depends on `u`. Every task carries a label equal to its longest-path
//! depth from the independent tasks; tasks sharing a label form a level.
//! Complete leveled graphs (every level-`i+1` task depends on every
//! level-`i` task) are what the bound theorems assume and get an implicit
//! edge representation; arbitrary DAGs are accepted with explicit edges.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_rational::Ratio;

use crate::bitset::BitSet;
use crate::error::{Error, Result};

/// Identifier of a task, in `[0, t)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TaskId(pub u32);

impl TaskId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// A set of task identifiers; tracks completion / knowledge bookkeeping.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TaskSet(BitSet);

impl TaskSet {
    pub fn new(t: usize) -> Self {
        Self(BitSet::new(t))
    }

    pub fn full(t: usize) -> Self {
        Self(BitSet::full(t))
    }

    pub fn from_iter(t: usize, tasks: impl IntoIterator<Item = TaskId>) -> Self {
        let mut s = Self::new(t);
        for task in tasks {
            s.insert(task);
        }
        s
    }

    pub fn insert(&mut self, task: TaskId) -> bool {
        self.0.insert(task.index())
    }

    pub fn contains(&self, task: TaskId) -> bool {
        self.0.contains(task.index())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn capacity(&self) -> usize {
        self.0.capacity()
    }

    pub fn union_with(&mut self, other: &TaskSet) {
        self.0.union_with(&other.0)
    }

    pub fn is_subset(&self, other: &TaskSet) -> bool {
        self.0.is_subset(&other.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = TaskId> + '_ {
        self.0.iter().map(|i| TaskId(i as u32))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Deps {
    /// Every task of level `i+1` depends on every task of level `i`.
    CompleteLeveled,
    /// Explicit predecessor and successor lists, indexed by task.
    Explicit { preds: Vec<Vec<u32>>, succs: Vec<Vec<u32>> },
}

/// A `k`-level task dependency graph with per-task labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TaskGraph {
    t: usize,
    labels: Vec<u32>,
    levels: Vec<Vec<TaskId>>,
    fractions: Vec<Ratio<u64>>,
    deps: Deps,
}

impl TaskGraph {
    /// Builds the complete `k`-partite task DAG: every task of level `i+1`
    /// depends on every task of level `i`. Tasks are numbered level by
    /// level, so level 0 is `0..level_sizes[0]` and so on.
    pub fn build_leveled(level_sizes: &[usize]) -> Result<Self> {
        if level_sizes.is_empty() {
            return Err(Error::InvalidArgument("at least one level required".into()));
        }
        if level_sizes.contains(&0) {
            return Err(Error::InvalidArgument("level sizes must be positive".into()));
        }
        let t: usize = level_sizes.iter().sum();
        let mut labels = Vec::with_capacity(t);
        let mut levels = Vec::with_capacity(level_sizes.len());
        let mut next = 0u32;
        for (lvl, &size) in level_sizes.iter().enumerate() {
            let mut members = Vec::with_capacity(size);
            for _ in 0..size {
                labels.push(lvl as u32);
                members.push(TaskId(next));
                next += 1;
            }
            levels.push(members);
        }
        let fractions = level_sizes
            .iter()
            .map(|&n| Ratio::new(n as u64, t as u64))
            .collect();
        Ok(Self {
            t,
            labels,
            levels,
            fractions,
            deps: Deps::CompleteLeveled,
        })
    }

    /// Builds a task graph from an arbitrary acyclic edge set and assigns
    /// labels by longest-path depth from the in-degree-0 tasks (the fixed
    /// point of the overwrite labeling rule).
    pub fn label_dag(t: usize, edges: &[(TaskId, TaskId)]) -> Result<Self> {
        if t == 0 {
            return Err(Error::InvalidArgument("t must be positive".into()));
        }
        let mut preds: Vec<Vec<u32>> = vec![Vec::new(); t];
        let mut succs: Vec<Vec<u32>> = vec![Vec::new(); t];
        let mut indeg = vec![0usize; t];
        for &(u, v) in edges {
            if u.index() >= t || v.index() >= t {
                return Err(Error::InvalidArgument(format!(
                    "edge ({}, {}) out of range for t = {t}",
                    u.0, v.0
                )));
            }
            preds[v.index()].push(u.0);
            succs[u.index()].push(v.0);
            indeg[v.index()] += 1;
        }
        // Kahn topological order; longest-path labels in one pass.
        let mut labels = vec![0u32; t];
        let mut queue: Vec<u32> = (0..t as u32).filter(|&v| indeg[v as usize] == 0).collect();
        let mut seen = 0usize;
        let mut head = 0usize;
        while head < queue.len() {
            let v = queue[head] as usize;
            head += 1;
            seen += 1;
            for &w in &succs[v] {
                let w = w as usize;
                if labels[v] + 1 > labels[w] {
                    labels[w] = labels[v] + 1;
                }
                indeg[w] -= 1;
                if indeg[w] == 0 {
                    queue.push(w as u32);
                }
            }
        }
        if seen != t {
            return Err(Error::CyclicDependency);
        }
        let max_label = labels.iter().copied().max().unwrap_or(0) as usize;
        let mut levels = vec![Vec::new(); max_label + 1];
        for (v, &l) in labels.iter().enumerate() {
            levels[l as usize].push(TaskId(v as u32));
        }
        // Longest-path labels never leave a level empty.
        debug_assert!(levels.iter().all(|lvl| !lvl.is_empty()));
        let fractions = levels
            .iter()
            .map(|lvl| Ratio::new(lvl.len() as u64, t as u64))
            .collect();
        Ok(Self {
            t,
            labels,
            levels,
            fractions,
            deps: Deps::Explicit { preds, succs },
        })
    }

    pub fn task_count(&self) -> usize {
        self.t
    }

    pub fn label(&self, task: TaskId) -> u32 {
        self.labels[task.index()]
    }

    pub fn level_count(&self) -> usize {
        self.levels.len()
    }

    pub fn level_tasks(&self, level: usize) -> &[TaskId] {
        &self.levels[level]
    }

    pub fn level_sizes(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.len()).collect()
    }

    /// Fractions `α_1..α_k` of tasks per level, exact.
    pub fn level_fractions(&self) -> &[Ratio<u64>] {
        &self.fractions
    }

    pub fn is_complete_leveled(&self) -> bool {
        matches!(self.deps, Deps::CompleteLeveled)
    }

    /// Direct dependencies of `task`.
    pub fn predecessors(&self, task: TaskId) -> Vec<TaskId> {
        match &self.deps {
            Deps::CompleteLeveled => {
                let l = self.labels[task.index()] as usize;
                if l == 0 {
                    Vec::new()
                } else {
                    self.levels[l - 1].clone()
                }
            }
            Deps::Explicit { preds, .. } => {
                preds[task.index()].iter().map(|&u| TaskId(u)).collect()
            }
        }
    }

    /// Tasks directly depending on `task`.
    pub fn successors(&self, task: TaskId) -> Vec<TaskId> {
        match &self.deps {
            Deps::CompleteLeveled => {
                let l = self.labels[task.index()] as usize;
                if l + 1 >= self.levels.len() {
                    Vec::new()
                } else {
                    self.levels[l + 1].clone()
                }
            }
            Deps::Explicit { succs, .. } => {
                succs[task.index()].iter().map(|&u| TaskId(u)).collect()
            }
        }
    }

    /// All dependency edges `(u, v)`; materialized, so intended for small
    /// graphs (tests, file export).
    pub fn edges(&self) -> Vec<(TaskId, TaskId)> {
        let mut out = Vec::new();
        for v in 0..self.t as u32 {
            for u in self.predecessors(TaskId(v)) {
                out.push((u, TaskId(v)));
            }
        }
        out
    }

    /// True iff `set` contains every predecessor of each of its members.
    pub fn is_dependency_closed(&self, set: &TaskSet) -> bool {
        set.iter()
            .all(|v| self.predecessors(v).iter().all(|&u| set.contains(u)))
    }

    /// Incomplete tasks all of whose dependencies lie in `known_complete`.
    ///
    /// `known_complete` must itself be dependency-closed.
    pub fn eligible_tasks(&self, known_complete: &TaskSet) -> Result<TaskSet> {
        if !self.is_dependency_closed(known_complete) {
            return Err(Error::PreconditionViolation(
                "known_complete is not dependency-closed".into(),
            ));
        }
        let mut out = TaskSet::new(self.t);
        for v in 0..self.t as u32 {
            let v = TaskId(v);
            if known_complete.contains(v) {
                continue;
            }
            if self
                .predecessors(v)
                .iter()
                .all(|&u| known_complete.contains(u))
            {
                out.insert(v);
            }
        }
        Ok(out)
    }

    /// The incomplete tasks whose label is minimal among incomplete tasks.
    /// This is the selection pool of Modified-RS.
    pub fn minimal_label_incomplete(&self, known_complete: &TaskSet) -> Result<TaskSet> {
        let mut min_label = u32::MAX;
        for v in 0..self.t as u32 {
            if !known_complete.contains(TaskId(v)) {
                min_label = min_label.min(self.labels[v as usize]);
            }
        }
        if min_label == u32::MAX {
            return Err(Error::EmptyChoice);
        }
        let mut out = TaskSet::new(self.t);
        for &v in &self.levels[min_label as usize] {
            if !known_complete.contains(v) {
                out.insert(v);
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec::Vec;

    fn ids(v: &[u32]) -> Vec<TaskId> {
        v.iter().map(|&i| TaskId(i)).collect()
    }

    #[test]
    fn build_single_level() {
        let g = TaskGraph::build_leveled(&[3]).unwrap();
        assert_eq!(g.task_count(), 3);
        assert!(g.edges().is_empty());
        assert_eq!(g.level_sizes(), vec![3]);
        assert!((0..3).all(|v| g.label(TaskId(v)) == 0));
    }

    #[test]
    fn build_two_levels() {
        let g = TaskGraph::build_leveled(&[2, 2]).unwrap();
        assert_eq!(g.task_count(), 4);
        let mut edges = g.edges();
        edges.sort();
        assert_eq!(
            edges,
            vec![
                (TaskId(0), TaskId(2)),
                (TaskId(0), TaskId(3)),
                (TaskId(1), TaskId(2)),
                (TaskId(1), TaskId(3)),
            ]
        );
        assert_eq!(
            (0..4).map(|v| g.label(TaskId(v))).collect::<Vec<_>>(),
            vec![0, 0, 1, 1]
        );
    }

    #[test]
    fn fractions_exact() {
        let g = TaskGraph::build_leveled(&[4, 4]).unwrap();
        assert_eq!(g.level_fractions(), &[Ratio::new(1, 2), Ratio::new(1, 2)]);
    }

    #[test]
    fn build_rejects_bad_input() {
        assert!(matches!(
            TaskGraph::build_leveled(&[]),
            Err(Error::InvalidArgument(_))
        ));
        assert!(matches!(
            TaskGraph::build_leveled(&[2, 0]),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn label_diamond() {
        // 1→2, 1→3, 2→4, 3→4 (0 is an extra independent task)
        let edges = [
            (TaskId(1), TaskId(2)),
            (TaskId(1), TaskId(3)),
            (TaskId(2), TaskId(4)),
            (TaskId(3), TaskId(4)),
        ];
        let g = TaskGraph::label_dag(5, &edges).unwrap();
        assert_eq!(g.label(TaskId(1)), 0);
        assert_eq!(g.label(TaskId(2)), 1);
        assert_eq!(g.label(TaskId(3)), 1);
        assert_eq!(g.label(TaskId(4)), 2);
    }

    #[test]
    fn label_no_edges() {
        let g = TaskGraph::label_dag(5, &[]).unwrap();
        assert!((0..5).all(|v| g.label(TaskId(v)) == 0));
    }

    #[test]
    fn label_overwrite_rule() {
        // chain 0→1→2 plus shortcut 0→2: label of 2 is the longest path, 2.
        let edges = [
            (TaskId(0), TaskId(1)),
            (TaskId(1), TaskId(2)),
            (TaskId(0), TaskId(2)),
        ];
        let g = TaskGraph::label_dag(3, &edges).unwrap();
        assert_eq!(g.label(TaskId(0)), 0);
        assert_eq!(g.label(TaskId(1)), 1);
        assert_eq!(g.label(TaskId(2)), 2);
    }

    #[test]
    fn label_detects_cycle() {
        let edges = [(TaskId(0), TaskId(1)), (TaskId(1), TaskId(0))];
        assert_eq!(TaskGraph::label_dag(2, &edges), Err(Error::CyclicDependency));
    }

    #[test]
    fn eligible_on_leveled() {
        let g = TaskGraph::build_leveled(&[2, 2]).unwrap();
        let empty = TaskSet::new(4);
        assert_eq!(
            g.eligible_tasks(&empty).unwrap().iter().collect::<Vec<_>>(),
            ids(&[0, 1])
        );
        let k01 = TaskSet::from_iter(4, ids(&[0, 1]));
        assert_eq!(
            g.eligible_tasks(&k01).unwrap().iter().collect::<Vec<_>>(),
            ids(&[2, 3])
        );
        let k0 = TaskSet::from_iter(4, ids(&[0]));
        assert_eq!(
            g.eligible_tasks(&k0).unwrap().iter().collect::<Vec<_>>(),
            ids(&[1])
        );
    }

    #[test]
    fn eligible_rejects_unclosed() {
        let g = TaskGraph::build_leveled(&[2, 2]).unwrap();
        let k = TaskSet::from_iter(4, ids(&[2]));
        assert!(matches!(
            g.eligible_tasks(&k),
            Err(Error::PreconditionViolation(_))
        ));
    }

    #[test]
    fn minimal_label_incomplete_cases() {
        let g = TaskGraph::build_leveled(&[2, 2]).unwrap();
        let k0 = TaskSet::from_iter(4, ids(&[0]));
        assert_eq!(
            g.minimal_label_incomplete(&k0).unwrap().iter().collect::<Vec<_>>(),
            ids(&[1])
        );
        let k01 = TaskSet::from_iter(4, ids(&[0, 1]));
        assert_eq!(
            g.minimal_label_incomplete(&k01).unwrap().iter().collect::<Vec<_>>(),
            ids(&[2, 3])
        );
        let g3 = TaskGraph::build_leveled(&[3]).unwrap();
        assert_eq!(
            g3.minimal_label_incomplete(&TaskSet::new(3))
                .unwrap()
                .iter()
                .collect::<Vec<_>>(),
            ids(&[0, 1, 2])
        );
        assert_eq!(
            g.minimal_label_incomplete(&TaskSet::full(4)),
            Err(Error::EmptyChoice)
        );
    }

    #[test]
    fn label_dag_reproduces_build_leveled() {
        let leveled = TaskGraph::build_leveled(&[2, 3, 1]).unwrap();
        let relabeled = TaskGraph::label_dag(6, &leveled.edges()).unwrap();
        for v in 0..6 {
            assert_eq!(leveled.label(TaskId(v)), relabeled.label(TaskId(v)));
        }
        assert_eq!(leveled.level_sizes(), relabeled.level_sizes());
    }
}
