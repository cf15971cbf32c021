//! Generators for computation patterns: the lower-bound merge/split
//! constructions, trivial baselines, random well-formed patterns, and a
//! hand-built 15-processor example history.
//!
//! Merge vertices carry quota 0 (they only exchange knowledge); the final
//! run-to-completion stage gives every branch quota `t` so that all maximal
//! path sums reach `t`.

use alloc::format;
use alloc::vec::Vec;

use num_rational::Ratio;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::computation_dag::{CompDag, CompVertex, ProcessorSet};
use crate::error::{Error, Result};
use crate::rng;

/// Descriptor for [`generate`].
#[derive(Debug, Clone, PartialEq)]
pub enum PatternSpec {
    /// One group of all `p` processors with quota `t`.
    SingleGroup { p: usize, t: usize },
    /// `p` singleton groups, never communicating, each with quota `t`.
    Isolated { p: usize, t: usize },
    /// The two-round lower-bound pattern with `w` branches.
    TwoLevelLb { w: usize, t: usize, alpha: Ratio<u64> },
    /// The `k`-round lower-bound pattern; `fractions` must sum to 1.
    KLevelLb { w: usize, t: usize, fractions: Vec<Ratio<u64>> },
    /// Layered random merge/split pattern.
    Random(RandomSpec),
}

/// Knobs for [`gen_random`].
#[derive(Debug, Clone, PartialEq)]
pub struct RandomSpec {
    pub p: usize,
    pub t: usize,
    /// Number of reconfiguration layers; 1 means no reconfiguration at all
    /// (a partition of `[1, p]` into initial vertices with quota `t`).
    pub depth: usize,
    /// Probability of cutting the shuffled processor list between two
    /// adjacent positions when forming a layer's partition. Higher values
    /// mean more, smaller groups.
    pub split_prob: f64,
    /// Quotas of non-final layers are drawn uniformly from `0..=max_quota`.
    pub max_quota: u32,
}

pub fn generate(spec: &PatternSpec, seed: u64) -> Result<CompDag> {
    match spec {
        PatternSpec::SingleGroup { p, t } => gen_single_group(*p, *t),
        PatternSpec::Isolated { p, t } => gen_isolated(*p, *t),
        PatternSpec::TwoLevelLb { w, t, alpha } => gen_two_level_lb(*w, *t, *alpha),
        PatternSpec::KLevelLb { w, t, fractions } => gen_k_level_lb(*w, *t, fractions),
        PatternSpec::Random(spec) => gen_random(spec, seed),
    }
}

/// One vertex holding all `p` processors with quota `t`.
pub fn gen_single_group(p: usize, t: usize) -> Result<CompDag> {
    check_positive(p, t)?;
    CompDag::new(
        p,
        t,
        alloc::vec![CompVertex {
            id: 0,
            quota: t as u32,
            group: ProcessorSet::all(p),
        }],
        Vec::new(),
    )
}

/// `p` isolated singleton vertices, each with quota `t`.
pub fn gen_isolated(p: usize, t: usize) -> Result<CompDag> {
    check_positive(p, t)?;
    let vertices = (0..p)
        .map(|i| CompVertex {
            id: i,
            quota: t as u32,
            group: ProcessorSet::from_iter(p, [i as u32 + 1]),
        })
        .collect();
    CompDag::new(p, t, vertices, Vec::new())
}

fn check_positive(p: usize, t: usize) -> Result<()> {
    if p == 0 || t == 0 {
        return Err(Error::InvalidArgument("p and t must be positive".into()));
    }
    if t > u32::MAX as usize {
        return Err(Error::InvalidArgument("t too large".into()));
    }
    Ok(())
}

/// Per-branch quota `α·t/w` as an integer, or an error if not integral.
fn branch_quota(alpha: Ratio<u64>, t: usize, w: usize) -> Result<u32> {
    let q = alpha * Ratio::new(t as u64, w as u64);
    if !q.is_integer() {
        return Err(Error::InvalidArgument(format!(
            "per-branch quota {}·{t}/{w} is not an integer",
            alpha
        )));
    }
    Ok(*q.numer() as u32)
}

/// The two-round lower-bound pattern: `w` singleton branches complete
/// `α·t/w` tasks each, merge, split into `w` branches completing
/// `(1−α)·t/w` each, merge again, then split into `w` run-to-completion
/// tails with quota `t`.
///
/// Vertex layout: `0..w` first round, `w` first merge, `w+1..2w+1` second
/// round, `2w+1` second merge, `2w+2..3w+2` tails.
pub fn gen_two_level_lb(w: usize, t: usize, alpha: Ratio<u64>) -> Result<CompDag> {
    check_positive(w, t)?;
    check_fraction(alpha)?;
    let q1 = branch_quota(alpha, t, w)?;
    let q2 = branch_quota(Ratio::from_integer(1) - alpha, t, w)?;
    build_rounds(w, t, &[q1, q2])
}

/// The `k`-round lower-bound pattern: round `i` gives each of the `w`
/// branches quota `α_i·t/w`, followed by a merge; a final split into `w`
/// tails with quota `t` closes the pattern.
pub fn gen_k_level_lb(w: usize, t: usize, fractions: &[Ratio<u64>]) -> Result<CompDag> {
    check_positive(w, t)?;
    if fractions.is_empty() {
        return Err(Error::InvalidArgument("at least one fraction required".into()));
    }
    let sum: Ratio<u64> = fractions.iter().sum();
    if sum != Ratio::from_integer(1) {
        return Err(Error::InvalidArgument("fractions must sum to 1".into()));
    }
    let quotas: Vec<u32> = fractions
        .iter()
        .map(|&f| {
            check_fraction(f)?;
            branch_quota(f, t, w)
        })
        .collect::<Result<_>>()?;
    build_rounds(w, t, &quotas)
}

fn check_fraction(f: Ratio<u64>) -> Result<()> {
    if f > Ratio::from_integer(1) {
        return Err(Error::InvalidArgument("fraction must lie in [0, 1]".into()));
    }
    Ok(())
}

/// `k` rounds of (`w` singleton branches, merge), then `w` tails of quota `t`.
/// The merge after round `i` (0-based) has id `i·(w+1) + w`.
fn build_rounds(w: usize, t: usize, round_quotas: &[u32]) -> Result<CompDag> {
    let p = w;
    let all = ProcessorSet::all(p);
    let single = |j: usize| ProcessorSet::from_iter(p, [j as u32 + 1]);
    let mut vertices = Vec::new();
    let mut edges = Vec::new();
    for (r, &q) in round_quotas.iter().enumerate() {
        let base = r * (w + 1);
        let merge = base + w;
        for j in 0..w {
            vertices.push(CompVertex {
                id: base + j,
                quota: q,
                group: single(j),
            });
            if r > 0 {
                // previous merge splits into this round's branches
                edges.push((base - 1, base + j, single(j)));
            }
            edges.push((base + j, merge, single(j)));
        }
        vertices.push(CompVertex {
            id: merge,
            quota: 0,
            group: all.clone(),
        });
    }
    let tail_base = round_quotas.len() * (w + 1);
    let last_merge = tail_base - 1;
    for j in 0..w {
        vertices.push(CompVertex {
            id: tail_base + j,
            quota: t as u32,
            group: single(j),
        });
        edges.push((last_merge, tail_base + j, single(j)));
    }
    CompDag::new(p, t, vertices, edges)
}

/// Id of the merge vertex after round `round` (0-based) in the patterns
/// built by [`gen_two_level_lb`] and [`gen_k_level_lb`].
pub fn merge_vertex_id(w: usize, round: usize) -> usize {
    round * (w + 1) + w
}

/// A layered random merge/split pattern. Each layer is an independent
/// random partition of `[1, p]`; edges between consecutive layers carry the
/// group intersections, which makes the conservation law hold by
/// construction. Non-final quotas are random; final-layer quotas are `t`.
pub fn gen_random(spec: &RandomSpec, seed: u64) -> Result<CompDag> {
    check_positive(spec.p, spec.t)?;
    if spec.depth == 0 {
        return Err(Error::InvalidArgument("depth must be at least 1".into()));
    }
    if !(0.0..=1.0).contains(&spec.split_prob) {
        return Err(Error::InvalidArgument("split_prob must lie in [0, 1]".into()));
    }
    let mut rng = rng::stream_from_seed(seed);
    let mut vertices: Vec<CompVertex> = Vec::new();
    let mut edges: Vec<(usize, usize, ProcessorSet)> = Vec::new();
    let mut prev_layer: Vec<usize> = Vec::new(); // vertex ids of previous layer
    let mut next_id = 0;
    for layer in 0..spec.depth {
        let final_layer = layer + 1 == spec.depth;
        let groups = random_partition(spec.p, spec.split_prob, &mut rng);
        let mut this_layer = Vec::with_capacity(groups.len());
        for group in groups {
            let quota = if final_layer {
                spec.t as u32
            } else {
                rng.gen_range(0..=spec.max_quota)
            };
            let id = next_id;
            next_id += 1;
            for &prev in &prev_layer {
                let pv = vertices.iter().find(|v| v.id == prev).unwrap();
                let mut flow = pv.group.clone();
                flow.intersect_with(&group);
                if !flow.is_empty() {
                    edges.push((prev, id, flow));
                }
            }
            vertices.push(CompVertex { id, quota, group });
            this_layer.push(id);
        }
        prev_layer = this_layer;
    }
    CompDag::new(spec.p, spec.t, vertices, edges)
}

/// A random partition of `[1, p]`: shuffle, then cut between adjacent
/// positions with probability `split_prob`.
fn random_partition(p: usize, split_prob: f64, rng: &mut rng::Stream) -> Vec<ProcessorSet> {
    let mut procs: Vec<u32> = (1..=p as u32).collect();
    procs.shuffle(rng);
    let mut groups = Vec::new();
    let mut current = ProcessorSet::new(p);
    for (i, &proc) in procs.iter().enumerate() {
        if i > 0 && rng.gen_bool(split_prob) {
            groups.push(core::mem::replace(&mut current, ProcessorSet::new(p)));
        }
        current.insert(proc);
    }
    groups.push(current);
    groups
}

/// A hand-built 15-processor merge/split history with 14 group vertices,
/// used as the canonical well-formed example pattern. `t` scales the
/// run-to-completion quotas; any `t ≥ 1` validates.
pub fn fifteen_processor_example(t: u32) -> CompDag {
    let p = 15;
    let g = |procs: &[u32]| ProcessorSet::from_iter(p, procs.iter().copied());
    let vertex = |id: usize, quota: u32, procs: &[u32]| CompVertex {
        id,
        quota,
        group: g(procs),
    };
    let vertices = alloc::vec![
        vertex(1, 6, &[1, 2, 3]),
        vertex(2, 4, &[4, 5]),
        vertex(3, 7, &[6, 7]),
        vertex(4, t, &[8, 9]),
        vertex(5, 3, &[10, 11]),
        vertex(6, 8, &[12, 13, 14, 15]),
        vertex(7, 5, &[1, 2, 3, 4, 5]),
        vertex(8, 5, &[7, 10, 11]),
        vertex(9, 2, &[1, 2, 3, 4, 5, 6]),
        vertex(10, 2, &[10, 11]),
        vertex(11, 9, &[7]),
        vertex(12, t, &[1, 2, 3, 4, 5, 6, 11]),
        vertex(13, t, &[10]),
        vertex(14, t, &[7, 12, 13, 14, 15]),
    ];
    let edges = alloc::vec![
        (1, 7, g(&[1, 2, 3])),
        (2, 7, g(&[4, 5])),
        (3, 9, g(&[6])),
        (3, 8, g(&[7])),
        (7, 9, g(&[1, 2, 3, 4, 5])),
        (5, 8, g(&[10, 11])),
        (8, 10, g(&[10, 11])),
        (8, 11, g(&[7])),
        (9, 12, g(&[1, 2, 3, 4, 5, 6])),
        (10, 12, g(&[11])),
        (10, 13, g(&[10])),
        (11, 14, g(&[7])),
        (6, 14, g(&[12, 13, 14, 15])),
    ];
    CompDag::new(p, t as usize, vertices, edges).expect("fixture is structurally sound")
}
