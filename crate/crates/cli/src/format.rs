//! JSON file formats for computation patterns and task graphs.

use anyhow::{bail, Context};
use serde::{Deserialize, Serialize};

use doall_core::computation_dag::{CompDag, CompVertex, ProcessorSet};
use doall_core::task_graph::{TaskGraph, TaskId};

/// On-disk form of a computation pattern.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PatternFile {
    pub p: usize,
    pub t: usize,
    pub vertices: Vec<VertexRec>,
    pub edges: Vec<EdgeRec>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VertexRec {
    pub id: usize,
    pub h: u32,
    pub group: Vec<u32>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EdgeRec {
    pub from: usize,
    pub to: usize,
    pub phi: Vec<u32>,
}

impl PatternFile {
    pub fn from_dag(dag: &CompDag) -> Self {
        Self {
            p: dag.processor_count(),
            t: dag.task_count(),
            vertices: dag
                .vertices()
                .iter()
                .map(|v| VertexRec {
                    id: v.id,
                    h: v.quota,
                    group: v.group.iter().collect(),
                })
                .collect(),
            edges: dag
                .edge_list()
                .map(|(from, to, flow)| EdgeRec {
                    from,
                    to,
                    phi: flow.iter().collect(),
                })
                .collect(),
        }
    }

    pub fn to_dag(&self) -> anyhow::Result<CompDag> {
        let p = self.p;
        let vertices = self
            .vertices
            .iter()
            .map(|v| CompVertex {
                id: v.id,
                quota: v.h,
                group: ProcessorSet::from_iter(p, v.group.iter().copied()),
            })
            .collect();
        let edges = self
            .edges
            .iter()
            .map(|e| (e.from, e.to, ProcessorSet::from_iter(p, e.phi.iter().copied())))
            .collect();
        CompDag::new(p, self.t, vertices, edges).context("malformed pattern file")
    }
}

/// On-disk form of a task graph: either complete leveled (just the level
/// sizes) or an explicit edge list over tasks `0..t`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TasksFile {
    Leveled { levels: Vec<usize> },
    Explicit { t: usize, edges: Vec<(u32, u32)> },
}

impl TasksFile {
    pub fn to_graph(&self) -> anyhow::Result<TaskGraph> {
        match self {
            TasksFile::Leveled { levels } => {
                TaskGraph::build_leveled(levels).context("malformed levels")
            }
            TasksFile::Explicit { t, edges } => {
                let edges: Vec<(TaskId, TaskId)> = edges
                    .iter()
                    .map(|&(u, v)| (TaskId(u), TaskId(v)))
                    .collect();
                TaskGraph::label_dag(*t, &edges).context("malformed task edges")
            }
        }
    }

    pub fn from_levels(levels: &[usize]) -> Self {
        TasksFile::Leveled { levels: levels.to_vec() }
    }
}

pub fn read_pattern(path: &std::path::Path) -> anyhow::Result<CompDag> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))?;
    let file: PatternFile = serde_json::from_str(&text)
        .with_context(|| format!("parsing {}", path.display()))?;
    file.to_dag()
}

pub fn read_tasks(path: &std::path::Path) -> anyhow::Result<TaskGraph> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))?;
    let file: TasksFile = serde_json::from_str(&text)
        .with_context(|| format!("parsing {}", path.display()))?;
    file.to_graph()
}

pub fn write_json<T: Serialize>(path: &std::path::Path, value: &T) -> anyhow::Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

/// Parses `"1/2"`, `"0.5"`, or `"1"` as an exact rational.
pub fn parse_ratio(s: &str) -> anyhow::Result<num_rational::Ratio<u64>> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let numer: u64 = n.trim().parse().context("numerator")?;
        let denom: u64 = d.trim().parse().context("denominator")?;
        if denom == 0 {
            bail!("zero denominator in {s:?}");
        }
        return Ok(num_rational::Ratio::new(numer, denom));
    }
    if let Some((int, frac)) = s.split_once('.') {
        let int: u64 = if int.is_empty() { 0 } else { int.parse().context("integer part")? };
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            bail!("bad decimal {s:?}");
        }
        if frac.len() > 18 {
            bail!("too many decimal digits in {s:?}");
        }
        let scale = 10u64.pow(frac.len() as u32);
        let frac_val: u64 = frac.parse()?;
        return Ok(num_rational::Ratio::new(int * scale + frac_val, scale));
    }
    let int: u64 = s.parse().with_context(|| format!("bad rational {s:?}"))?;
    Ok(num_rational::Ratio::from_integer(int))
}

#[cfg(test)]
mod tests {
    use super::*;
    use doall_core::adversary_patterns;
    use num_rational::Ratio;

    #[test]
    fn pattern_round_trip() {
        let dag = adversary_patterns::fifteen_processor_example(50);
        let file = PatternFile::from_dag(&dag);
        let json = serde_json::to_string(&file).unwrap();
        let back: PatternFile = serde_json::from_str(&json).unwrap();
        let dag2 = back.to_dag().unwrap();
        assert_eq!(dag.vertices(), dag2.vertices());
        assert_eq!(dag.processor_count(), dag2.processor_count());
        assert_eq!(dag.task_count(), dag2.task_count());
        let e1: Vec<_> = dag.edge_list().map(|(f, t, phi)| (f, t, phi.clone())).collect();
        let e2: Vec<_> = dag2.edge_list().map(|(f, t, phi)| (f, t, phi.clone())).collect();
        assert_eq!(e1, e2);
    }

    #[test]
    fn tasks_both_forms() {
        let leveled: TasksFile = serde_json::from_str(r#"{"levels":[2,3]}"#).unwrap();
        let g = leveled.to_graph().unwrap();
        assert_eq!(g.level_sizes(), vec![2, 3]);

        let explicit: TasksFile =
            serde_json::from_str(r#"{"t":3,"edges":[[0,1],[1,2]]}"#).unwrap();
        let g = explicit.to_graph().unwrap();
        assert_eq!(g.task_count(), 3);
        assert_eq!(g.label(TaskId(2)), 2);
    }

    #[test]
    fn ratio_parsing() {
        assert_eq!(parse_ratio("1/2").unwrap(), Ratio::new(1, 2));
        assert_eq!(parse_ratio("0.5").unwrap(), Ratio::new(1, 2));
        assert_eq!(parse_ratio("0.25").unwrap(), Ratio::new(1, 4));
        assert_eq!(parse_ratio("1").unwrap(), Ratio::from_integer(1));
        assert!(parse_ratio("1/0").is_err());
        assert!(parse_ratio("x").is_err());
    }
}
