//! Cooperative execution of dependent tasks on a partitionable network.
//!
//! `p` processors must complete `t` idempotent tasks while an adversarial
//! communication medium merges and splits them into groups. The medium's
//! history is a computational (p,t)-DAG: each vertex is a processor group
//! with a work quota, each edge carries the processors that flow between
//! groups. Task dependencies form a leveled task DAG.
//!
//! The crate provides:
//!
//! - [`task_graph`]: leveled task DAGs, the longest-path labeling procedure,
//!   and eligibility queries;
//! - [`computation_dag`]: computational (p,t)-DAGs, validation, saturation
//!   classification, normalization splits, and poset/computation width;
//! - [`scheduling`]: the Modified-RS policy and baselines, plus exact
//!   brute-force oracles for OPT and expected work on tiny instances;
//! - [`simulator`]: execution of a policy over a computation DAG with
//!   knowledge propagation and work accounting;
//! - [`adversary_patterns`]: generators for the lower-bound patterns and
//!   random well-formed patterns;
//! - [`analysis`]: closed-form competitive-ratio bounds, empirical ratios,
//!   and concentration checks.
//!
//! The crate is `no_std` (with `alloc`); all IO, file formats, and the CLI
//! live in the companion `doall-cli` crate.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod adversary_patterns;
pub mod analysis;
pub mod bitset;
pub mod computation_dag;
pub mod error;
pub mod rng;
pub mod scheduling;
pub mod simulator;
pub mod task_graph;

pub use computation_dag::{CompDag, CompVertex, ProcessorSet, SaturationReport};
pub use error::{Error, Result};
pub use scheduling::{PolicyKind, SchedulerPolicy};
pub use simulator::{VertexTrace, WorkReport};
pub use task_graph::{TaskGraph, TaskId, TaskSet};
