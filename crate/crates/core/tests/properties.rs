//! Randomized property checks over the structural invariants.

use proptest::collection::vec;
use proptest::prelude::*;

use doall_core::adversary_patterns::{gen_random, RandomSpec};
use doall_core::scheduling::SchedulerPolicy;
use doall_core::simulator;
use doall_core::task_graph::{TaskGraph, TaskId, TaskSet};

/// Random acyclic edge list over `t` tasks (edges only go forward).
fn arb_task_dag() -> impl Strategy<Value = (usize, Vec<(u32, u32)>)> {
    (2usize..=8).prop_flat_map(|t| {
        let pairs: Vec<(u32, u32)> = (0..t as u32)
            .flat_map(|u| (u + 1..t as u32).map(move |v| (u, v)))
            .collect();
        let n = pairs.len();
        (Just(t), Just(pairs), vec(any::<bool>(), n)).prop_map(|(t, pairs, mask)| {
            let edges = pairs
                .into_iter()
                .zip(mask)
                .filter_map(|(e, keep)| keep.then_some(e))
                .collect();
            (t, edges)
        })
    })
}

fn graph_from(t: usize, edges: &[(u32, u32)]) -> TaskGraph {
    let edges: Vec<(TaskId, TaskId)> = edges.iter().map(|&(u, v)| (TaskId(u), TaskId(v))).collect();
    TaskGraph::label_dag(t, &edges).unwrap()
}

/// A random dependency-closed knowledge set: take tasks in label order up
/// to a cutoff, dropping any task whose predecessors are not all present.
fn closed_set(graph: &TaskGraph, keep: &[bool]) -> TaskSet {
    let t = graph.task_count();
    let mut order: Vec<TaskId> = (0..t as u32).map(TaskId).collect();
    order.sort_by_key(|&id| graph.label(id));
    let mut set = TaskSet::new(t);
    for (i, &id) in order.iter().enumerate() {
        let deps_met = graph.predecessors(id).iter().all(|&p| set.contains(p));
        if deps_met && keep[i % keep.len()] {
            set.insert(id);
        }
    }
    set
}

proptest! {
    #[test]
    fn labels_strictly_increase_along_edges((t, edges) in arb_task_dag()) {
        let graph = graph_from(t, &edges);
        for (u, v) in graph.edges() {
            prop_assert!(graph.label(u) < graph.label(v));
        }
    }

    #[test]
    fn label_is_longest_path_length((t, edges) in arb_task_dag()) {
        let graph = graph_from(t, &edges);
        // independent recomputation by relaxation until stable
        let mut label = vec![0u32; t];
        loop {
            let mut changed = false;
            for &(u, v) in &edges {
                let want = label[u as usize] + 1;
                if label[v as usize] < want {
                    label[v as usize] = want;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        for id in 0..t as u32 {
            prop_assert_eq!(graph.label(TaskId(id)), label[id as usize]);
        }
    }

    #[test]
    fn minimal_label_pool_within_eligible(
        (t, edges) in arb_task_dag(),
        keep in vec(any::<bool>(), 8),
    ) {
        let graph = graph_from(t, &edges);
        let known = closed_set(&graph, &keep);
        if known.len() == graph.task_count() {
            return Ok(());
        }
        let eligible = graph.eligible_tasks(&known).unwrap();
        let minimal = graph.minimal_label_incomplete(&known).unwrap();
        prop_assert!(!minimal.is_empty());
        prop_assert!(minimal.is_subset(&eligible));
        let min_label = minimal.iter().map(|id| graph.label(id)).min().unwrap();
        for id in minimal.iter() {
            prop_assert_eq!(graph.label(id), min_label);
        }
        for id in eligible.iter() {
            prop_assert!(graph.label(id) >= min_label);
        }
    }

    #[test]
    fn random_patterns_run_to_completion(
        seed in any::<u64>(),
        p in 1usize..=5,
        t in 1usize..=10,
        depth in 1usize..=3,
    ) {
        let spec = RandomSpec { p, t, depth, split_prob: 0.5, max_quota: 4 };
        let dag = gen_random(&spec, seed).unwrap();
        prop_assert!(dag.validate().is_empty());
        let graph = TaskGraph::build_leveled(&[t]).unwrap();
        let run = simulator::run(&dag, &graph, &SchedulerPolicy::modified_rs(), seed).unwrap();
        prop_assert!(run.terminal_complete);
        prop_assert!(run.total_work >= t as u64);
        prop_assert!(run.total_work <= dag.total_quota());
    }

    #[test]
    fn normalize_preserves_structure(
        seed in any::<u64>(),
        p in 2usize..=5,
        t in 2usize..=12,
    ) {
        let spec = RandomSpec { p, t, depth: 3, split_prob: 0.5, max_quota: 5 };
        let dag = gen_random(&spec, seed).unwrap();
        let normalized = dag.normalize_split().unwrap();
        prop_assert!(normalized.validate().is_empty());
        prop_assert_eq!(normalized.total_quota(), dag.total_quota());
        prop_assert!(normalized.vertex_count() >= dag.vertex_count());
        let again = normalized.normalize_split().unwrap();
        prop_assert_eq!(again.vertices(), normalized.vertices());
    }
}
