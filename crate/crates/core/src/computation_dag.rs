//! Computational (p,t)-DAGs: the adversary's history of group merges and
//! splits, with per-vertex work quotas and per-edge processor flows.
//!
//! Validation checks the well-formedness clauses (acyclicity, initial
//! partition, flow conservation with disjoint unions, maximal-path weight);
//! derived queries compute predecessor/successor graphs, poset width via
//! Dilworth (minimum chain cover by bipartite matching on the transitive
//! closure), computation width, saturation classification, and the
//! normalization split.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::bitset::BitSet;
use crate::error::{Error, Result};
use crate::task_graph::TaskGraph;

/// A nonempty set of processors out of `[1, p]`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ProcessorSet {
    bits: BitSet,
}

impl ProcessorSet {
    pub fn new(p: usize) -> Self {
        Self { bits: BitSet::new(p) }
    }

    /// The full set `{1, ..., p}`.
    pub fn all(p: usize) -> Self {
        Self { bits: BitSet::full(p) }
    }

    pub fn from_iter(p: usize, procs: impl IntoIterator<Item = u32>) -> Self {
        let mut s = Self::new(p);
        for proc in procs {
            s.insert(proc);
        }
        s
    }

    /// Inserts processor `proc` (1-based).
    pub fn insert(&mut self, proc: u32) -> bool {
        assert!(proc >= 1, "processors are numbered from 1");
        self.bits.insert(proc as usize - 1)
    }

    pub fn contains(&self, proc: u32) -> bool {
        proc >= 1 && self.bits.contains(proc as usize - 1)
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn is_disjoint(&self, other: &ProcessorSet) -> bool {
        self.bits.is_disjoint(&other.bits)
    }

    pub fn union_with(&mut self, other: &ProcessorSet) {
        self.bits.union_with(&other.bits)
    }

    pub fn intersect_with(&mut self, other: &ProcessorSet) {
        self.bits.intersect_with(&other.bits)
    }

    pub fn capacity(&self) -> usize {
        self.bits.capacity()
    }

    /// Members, 1-based and ascending.
    pub fn iter(&self) -> impl Iterator<Item = u32> + '_ {
        self.bits.iter().map(|i| i as u32 + 1)
    }
}

/// A processor group vertex: work quota and member set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompVertex {
    pub id: usize,
    /// Work quota `h(v)`: number of task executions allotted before the
    /// next reconfiguration. Zero is allowed (pure merge points).
    pub quota: u32,
    pub group: ProcessorSet,
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct EdgeRec {
    from: usize, // vertex index
    to: usize,   // vertex index
    flow: ProcessorSet,
}

/// One violated well-formedness clause, reported as data by [`CompDag::validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    Cyclic,
    EmptyGroup { vertex: usize },
    EmptyFlow { from: usize, to: usize },
    /// Groups of in-degree-0 vertices overlap or do not cover `[1, p]`.
    InitialCondition { detail: String },
    /// Incoming flows do not disjointly union to the vertex group.
    ConservationIn { vertex: usize, detail: String },
    /// Outgoing flows do not disjointly union to the vertex group.
    ConservationOut { vertex: usize, detail: String },
    /// A maximal path whose quota sum falls short of `t`.
    PathWeight { terminal: usize, sum: u64 },
}

impl core::fmt::Display for Violation {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            Violation::Cyclic => write!(f, "graph contains a cycle"),
            Violation::EmptyGroup { vertex } => write!(f, "vertex {vertex} has an empty group"),
            Violation::EmptyFlow { from, to } => {
                write!(f, "edge ({from}, {to}) carries an empty flow")
            }
            Violation::InitialCondition { detail } => {
                write!(f, "initial condition violated: {detail}")
            }
            Violation::ConservationIn { vertex, detail } => {
                write!(f, "incoming conservation violated at vertex {vertex}: {detail}")
            }
            Violation::ConservationOut { vertex, detail } => {
                write!(f, "outgoing conservation violated at vertex {vertex}: {detail}")
            }
            Violation::PathWeight { terminal, sum } => {
                write!(f, "maximal path ending at vertex {terminal} has quota sum {sum} < t")
            }
        }
    }
}

/// Saturation classification of a computation DAG.
///
/// A vertex is saturated when the total quota of its predecessor graph
/// (itself included) does not exceed `t`; its group then performs exactly
/// its quota under any non-idling scheduler.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SaturationReport {
    /// `H(P(v))` per vertex id: quota sum over the predecessor graph.
    pub predecessor_work: BTreeMap<usize, u64>,
    pub saturated: Vec<usize>,
    pub unsaturated: Vec<usize>,
    /// When a task graph was supplied: for each level `i`, the saturated
    /// vertices whose predecessor work reaches the level threshold
    /// `α_{i+1}·t` (= that level's task count).
    pub level_unsaturated: Option<Vec<Vec<usize>>>,
}

/// A computational (p,t)-DAG.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompDag {
    p: usize,
    t: usize,
    vertices: Vec<CompVertex>,
    edges: Vec<EdgeRec>,
    index_of: BTreeMap<usize, usize>,
    out_adj: Vec<Vec<usize>>, // edge indices
    in_adj: Vec<Vec<usize>>,  // edge indices
}

impl CompDag {
    /// Assembles a DAG from vertices and `(from_id, to_id, flow)` edges.
    /// Structural errors (duplicate ids, unknown endpoints) fail here;
    /// the well-formedness clauses are checked by [`validate`](Self::validate).
    pub fn new(
        p: usize,
        t: usize,
        vertices: Vec<CompVertex>,
        edges: Vec<(usize, usize, ProcessorSet)>,
    ) -> Result<Self> {
        if p == 0 {
            return Err(Error::InvalidArgument("p must be positive".into()));
        }
        let mut index_of = BTreeMap::new();
        for (i, v) in vertices.iter().enumerate() {
            if index_of.insert(v.id, i).is_some() {
                return Err(Error::InvalidArgument(format!("duplicate vertex id {}", v.id)));
            }
        }
        let mut recs = Vec::with_capacity(edges.len());
        let mut out_adj = vec![Vec::new(); vertices.len()];
        let mut in_adj = vec![Vec::new(); vertices.len()];
        for (from_id, to_id, flow) in edges {
            let &from = index_of
                .get(&from_id)
                .ok_or(Error::UnknownVertex(from_id))?;
            let &to = index_of.get(&to_id).ok_or(Error::UnknownVertex(to_id))?;
            out_adj[from].push(recs.len());
            in_adj[to].push(recs.len());
            recs.push(EdgeRec { from, to, flow });
        }
        Ok(Self {
            p,
            t,
            vertices,
            edges: recs,
            index_of,
            out_adj,
            in_adj,
        })
    }

    pub fn processor_count(&self) -> usize {
        self.p
    }

    pub fn task_count(&self) -> usize {
        self.t
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertices(&self) -> &[CompVertex] {
        &self.vertices
    }

    pub fn vertex(&self, id: usize) -> Result<&CompVertex> {
        self.index_of
            .get(&id)
            .map(|&i| &self.vertices[i])
            .ok_or(Error::UnknownVertex(id))
    }

    pub fn contains_vertex(&self, id: usize) -> bool {
        self.index_of.contains_key(&id)
    }

    /// Edges as `(from_id, to_id, flow)`.
    pub fn edge_list(&self) -> impl Iterator<Item = (usize, usize, &ProcessorSet)> + '_ {
        self.edges
            .iter()
            .map(|e| (self.vertices[e.from].id, self.vertices[e.to].id, &e.flow))
    }

    pub fn in_degree(&self, id: usize) -> Result<usize> {
        let &i = self.index_of.get(&id).ok_or(Error::UnknownVertex(id))?;
        Ok(self.in_adj[i].len())
    }

    pub fn out_degree(&self, id: usize) -> Result<usize> {
        let &i = self.index_of.get(&id).ok_or(Error::UnknownVertex(id))?;
        Ok(self.out_adj[i].len())
    }

    /// Predecessor vertex ids of `id` (direct).
    pub fn parents(&self, id: usize) -> Result<Vec<usize>> {
        let &i = self.index_of.get(&id).ok_or(Error::UnknownVertex(id))?;
        Ok(self.in_adj[i]
            .iter()
            .map(|&e| self.vertices[self.edges[e].from].id)
            .collect())
    }

    pub fn total_quota(&self) -> u64 {
        self.vertices.iter().map(|v| v.quota as u64).sum()
    }

    /// Vertex indices in topological order, or `None` on a cycle.
    fn topo_indices(&self) -> Option<Vec<usize>> {
        let n = self.vertices.len();
        let mut indeg: Vec<usize> = (0..n).map(|i| self.in_adj[i].len()).collect();
        let mut order: Vec<usize> = (0..n).filter(|&i| indeg[i] == 0).collect();
        let mut head = 0;
        while head < order.len() {
            let v = order[head];
            head += 1;
            for &e in &self.out_adj[v] {
                let w = self.edges[e].to;
                indeg[w] -= 1;
                if indeg[w] == 0 {
                    order.push(w);
                }
            }
        }
        (order.len() == n).then_some(order)
    }

    /// Vertex ids in topological order, or `None` on a cycle.
    pub fn topological_ids(&self) -> Option<Vec<usize>> {
        self.topo_indices()
            .map(|o| o.into_iter().map(|i| self.vertices[i].id).collect())
    }

    /// Reflexive descendant sets (by vertex index): `reach[i]` contains `j`
    /// iff `i ≤ j` in the vertex poset. Bitset rows over the closure.
    fn reflexive_reachability(&self) -> Option<Vec<BitSet>> {
        let order = self.topo_indices()?;
        let n = self.vertices.len();
        let mut reach: Vec<BitSet> = (0..n)
            .map(|i| {
                let mut b = BitSet::new(n);
                b.insert(i);
                b
            })
            .collect();
        for &v in order.iter().rev() {
            for &e in &self.out_adj[v] {
                let w = self.edges[e].to;
                let (a, b) = if v < w {
                    let (l, r) = reach.split_at_mut(w);
                    (&mut l[v], &r[0])
                } else {
                    let (l, r) = reach.split_at_mut(v);
                    (&mut r[0], &l[w])
                };
                a.union_with(b);
            }
        }
        Some(reach)
    }

    /// Checks every well-formedness clause and reports all violations.
    /// An empty list means the DAG is well formed.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        for v in &self.vertices {
            if v.group.is_empty() {
                out.push(Violation::EmptyGroup { vertex: v.id });
            }
        }
        for e in &self.edges {
            if e.flow.is_empty() {
                out.push(Violation::EmptyFlow {
                    from: self.vertices[e.from].id,
                    to: self.vertices[e.to].id,
                });
            }
        }
        // Initial condition: groups of in-degree-0 vertices partition [1, p].
        let mut seen = ProcessorSet::new(self.p);
        let mut overlap = false;
        for (i, v) in self.vertices.iter().enumerate() {
            if self.in_adj[i].is_empty() {
                if !seen.is_disjoint(&v.group) {
                    overlap = true;
                }
                seen.union_with(&v.group);
            }
        }
        if overlap {
            out.push(Violation::InitialCondition {
                detail: "initial groups overlap".into(),
            });
        }
        if seen.len() != self.p {
            out.push(Violation::InitialCondition {
                detail: format!(
                    "initial groups cover {} of {} processors",
                    seen.len(),
                    self.p
                ),
            });
        }
        // Conservation: incoming and outgoing flows disjointly union to the group.
        let conservation_detail = |adj: &[usize], group: &ProcessorSet| -> Option<String> {
            if adj.is_empty() {
                return None;
            }
            let mut union = ProcessorSet::new(self.p);
            for &e in adj {
                let flow = &self.edges[e].flow;
                if !union.is_disjoint(flow) {
                    return Some("flows overlap".into());
                }
                union.union_with(flow);
            }
            (union != *group).then(|| "flow union differs from the vertex group".into())
        };
        for (i, v) in self.vertices.iter().enumerate() {
            if let Some(detail) = conservation_detail(&self.in_adj[i], &v.group) {
                out.push(Violation::ConservationIn { vertex: v.id, detail });
            }
            if let Some(detail) = conservation_detail(&self.out_adj[i], &v.group) {
                out.push(Violation::ConservationOut { vertex: v.id, detail });
            }
        }
        match self.topo_indices() {
            None => out.push(Violation::Cyclic),
            Some(order) => {
                // Minimum quota sum over paths from an initial vertex to v.
                let n = self.vertices.len();
                let mut min_sum = vec![u64::MAX; n];
                for &v in &order {
                    let best_in = self.in_adj[v]
                        .iter()
                        .map(|&e| min_sum[self.edges[e].from])
                        .min()
                        .unwrap_or(0);
                    min_sum[v] = best_in + self.vertices[v].quota as u64;
                }
                for (v, &sum) in min_sum.iter().enumerate() {
                    if self.out_adj[v].is_empty() && sum < self.t as u64 {
                        out.push(Violation::PathWeight {
                            terminal: self.vertices[v].id,
                            sum: min_sum[v],
                        });
                    }
                }
            }
        }
        out
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_empty()
    }

    fn induced_subgraph(&self, keep: &BitSet) -> CompDag {
        let vertices: Vec<CompVertex> = (0..self.vertices.len())
            .filter(|&i| keep.contains(i))
            .map(|i| self.vertices[i].clone())
            .collect();
        let edges: Vec<(usize, usize, ProcessorSet)> = self
            .edges
            .iter()
            .filter(|e| keep.contains(e.from) && keep.contains(e.to))
            .map(|e| {
                (
                    self.vertices[e.from].id,
                    self.vertices[e.to].id,
                    e.flow.clone(),
                )
            })
            .collect();
        CompDag::new(self.p, self.t, vertices, edges).expect("subgraph of a well-indexed DAG")
    }

    /// The union of all paths terminating at `id`: the subgraph induced by
    /// `{u : u ≤ id}`.
    pub fn predecessor_graph(&self, id: usize) -> Result<CompDag> {
        let &target = self.index_of.get(&id).ok_or(Error::UnknownVertex(id))?;
        let reach = self
            .reflexive_reachability()
            .ok_or(Error::PreconditionViolation("graph is cyclic".into()))?;
        let mut keep = BitSet::new(self.vertices.len());
        for (i, row) in reach.iter().enumerate() {
            if row.contains(target) {
                keep.insert(i);
            }
        }
        Ok(self.induced_subgraph(&keep))
    }

    /// The union of all paths originating at `id`: the subgraph induced by
    /// `{u : id ≤ u}`.
    pub fn successor_graph(&self, id: usize) -> Result<CompDag> {
        let &source = self.index_of.get(&id).ok_or(Error::UnknownVertex(id))?;
        let reach = self
            .reflexive_reachability()
            .ok_or(Error::PreconditionViolation("graph is cyclic".into()))?;
        Ok(self.induced_subgraph(&reach[source]))
    }

    /// Width of the vertex poset: the maximum antichain size, computed as
    /// `|V|` minus a maximum matching of the transitive-closure bipartite
    /// graph (Dilworth / minimum chain cover).
    pub fn poset_width(&self) -> Result<usize> {
        let reach = self
            .reflexive_reachability()
            .ok_or(Error::PreconditionViolation("graph is cyclic".into()))?;
        let n = self.vertices.len();
        // Strict order adjacency: u -> v iff u < v.
        let adj: Vec<Vec<usize>> = (0..n)
            .map(|u| reach[u].iter().filter(|&v| v != u).collect())
            .collect();
        Ok(n - hopcroft_karp(n, n, &adj))
    }

    /// `cw(C) = max_v w(S(v))`.
    pub fn computation_width(&self) -> Result<usize> {
        let reach = self
            .reflexive_reachability()
            .ok_or(Error::PreconditionViolation("graph is cyclic".into()))?;
        let mut best = 0;
        for row in &reach {
            let sub = self.induced_subgraph(row);
            best = best.max(sub.poset_width()?);
        }
        Ok(best)
    }

    /// `H(P(v))` for every vertex: the quota sum over the predecessor graph
    /// of `v`, itself included.
    pub fn predecessor_work(&self) -> Result<BTreeMap<usize, u64>> {
        let reach = self
            .reflexive_reachability()
            .ok_or(Error::PreconditionViolation("graph is cyclic".into()))?;
        let n = self.vertices.len();
        let mut out = BTreeMap::new();
        for i in 0..n {
            let mut sum = 0u64;
            for (u, r) in reach.iter().enumerate() {
                if r.contains(i) {
                    sum += self.vertices[u].quota as u64;
                }
            }
            out.insert(self.vertices[i].id, sum);
        }
        Ok(out)
    }

    /// Partitions vertices into saturated (`H(P(v)) ≤ t`) and unsaturated.
    /// With a task graph supplied, additionally lists per level the
    /// saturated vertices whose predecessor work reaches that level's
    /// threshold `α_i·t`.
    pub fn classify_saturation(&self, tasks: Option<&TaskGraph>) -> Result<SaturationReport> {
        let work = self.predecessor_work()?;
        let mut saturated = Vec::new();
        let mut unsaturated = Vec::new();
        for v in &self.vertices {
            if work[&v.id] <= self.t as u64 {
                saturated.push(v.id);
            } else {
                unsaturated.push(v.id);
            }
        }
        let level_unsaturated = tasks.map(|g| {
            g.level_sizes()
                .iter()
                .map(|&threshold| {
                    saturated
                        .iter()
                        .copied()
                        .filter(|id| work[id] >= threshold as u64)
                        .collect()
                })
                .collect()
        });
        Ok(SaturationReport {
            predecessor_work: work,
            saturated,
            unsaturated,
            level_unsaturated,
        })
    }

    /// Splits every unsaturated vertex whose strict-predecessor quota sum
    /// falls short of `t` into a saturated head (absorbing the first
    /// `t − Σ_{u<v} h(u)` units) and an unsaturated tail, joined by an edge
    /// carrying the whole group. Afterwards every unsaturated vertex `v`
    /// satisfies `Σ_{u<v} h(u) ≥ t`.
    pub fn normalize_split(&self) -> Result<CompDag> {
        let violations = self.validate();
        if !violations.is_empty() {
            return Err(Error::InvalidPattern(violations));
        }
        let work = self.predecessor_work()?;
        let t = self.t as u64;
        let mut next_id = self.vertices.iter().map(|v| v.id).max().unwrap_or(0) + 1;
        let mut vertices = Vec::new();
        let mut edges: Vec<(usize, usize, ProcessorSet)> = Vec::new();
        // Id that outgoing edges of the original vertex should leave from.
        let mut tail_id: BTreeMap<usize, usize> = BTreeMap::new();
        for v in &self.vertices {
            let total = work[&v.id];
            let strict = total - v.quota as u64;
            if total > t && strict < t {
                let head_quota = (t - strict) as u32;
                vertices.push(CompVertex {
                    id: v.id,
                    quota: head_quota,
                    group: v.group.clone(),
                });
                let tail = next_id;
                next_id += 1;
                vertices.push(CompVertex {
                    id: tail,
                    quota: v.quota - head_quota,
                    group: v.group.clone(),
                });
                edges.push((v.id, tail, v.group.clone()));
                tail_id.insert(v.id, tail);
            } else {
                vertices.push(v.clone());
                tail_id.insert(v.id, v.id);
            }
        }
        for e in &self.edges {
            let from = tail_id[&self.vertices[e.from].id];
            let to = self.vertices[e.to].id; // incoming edges enter the head
            edges.push((from, to, e.flow.clone()));
        }
        CompDag::new(self.p, self.t, vertices, edges)
    }
}

/// Maximum bipartite matching via Hopcroft–Karp. `adj[u]` lists the right
/// vertices adjacent to left vertex `u`.
pub fn hopcroft_karp(left: usize, right: usize, adj: &[Vec<usize>]) -> usize {
    const NIL: usize = usize::MAX;
    let mut match_l = vec![NIL; left];
    let mut match_r = vec![NIL; right];
    let mut dist = vec![u32::MAX; left];
    let mut queue = Vec::with_capacity(left);
    let mut matching = 0;

    loop {
        // BFS layering from free left vertices.
        queue.clear();
        for u in 0..left {
            if match_l[u] == NIL {
                dist[u] = 0;
                queue.push(u);
            } else {
                dist[u] = u32::MAX;
            }
        }
        let mut found_augmenting = false;
        let mut head = 0;
        while head < queue.len() {
            let u = queue[head];
            head += 1;
            for &v in &adj[u] {
                match match_r[v] {
                    NIL => found_augmenting = true,
                    w => {
                        if dist[w] == u32::MAX {
                            dist[w] = dist[u] + 1;
                            queue.push(w);
                        }
                    }
                }
            }
        }
        if !found_augmenting {
            return matching;
        }
        // DFS augmentation along the layering.
        fn dfs(
            u: usize,
            adj: &[Vec<usize>],
            dist: &mut [u32],
            match_l: &mut [usize],
            match_r: &mut [usize],
        ) -> bool {
            for i in 0..adj[u].len() {
                let v = adj[u][i];
                let w = match_r[v];
                if w == NIL
                    || (dist[w] == dist[u] + 1 && dfs(w, adj, dist, match_l, match_r))
                {
                    match_l[u] = v;
                    match_r[v] = u;
                    return true;
                }
            }
            dist[u] = u32::MAX;
            false
        }
        for u in 0..left {
            if match_l[u] == NIL && dfs(u, adj, &mut dist, &mut match_l, &mut match_r) {
                matching += 1;
            }
        }
    }
}
