// SPDX-License-Identifier: Apache-2.0

//! Reduction from all-permutations supersequence (APS) to relaxation validity.
//!
//! Given `T` over `{1, ..., n}`, build the complete digraph on `2n + 1`
//! vertices `s = 0, x_i = 2i - 1, y_i = 2i` with special edges
//! `e_i = (x_i, y_i)`. Take a valid base schedule `Q` (plain round-robin),
//! strip every special edge to get `R`, and emit
//!
//! ```text
//! S = (R, e_{t_1}) (R, e_{t_2}) ... (R, e_{t_|T|}) R
//! ```
//!
//! Special edges then occur in `S` exactly once per entry of `T`, in order,
//! and `S` is valid iff `T` contains every permutation of `{1, ..., n}`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Digraph, Edge, SimplePath, VertexId};
use crate::schedule::{round_robin, Schedule};

#[derive(Debug, Error)]
pub enum ReductionError {
    #[error("APS alphabet must be non-empty")]
    EmptyAlphabet,
    #[error("symbol {symbol} at position {position} is outside 1..={n}")]
    SymbolOutOfRange { symbol: usize, position: usize, n: usize },
}

/// An APS instance: does `sequence` contain every permutation of `{1, ..., n}`?
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ApsInstance {
    pub n: usize,
    #[serde(rename = "T")]
    pub sequence: Vec<usize>,
}

impl ApsInstance {
    pub fn new(n: usize, sequence: Vec<usize>) -> Result<Self, ReductionError> {
        let instance = ApsInstance { n, sequence };
        instance.check()?;
        Ok(instance)
    }

    /// Re-checks the symbol range, e.g. after deserializing.
    pub fn check(&self) -> Result<(), ReductionError> {
        if self.n == 0 {
            return Err(ReductionError::EmptyAlphabet);
        }
        match self.sequence.iter().position(|&t| t == 0 || t > self.n) {
            Some(position) => Err(ReductionError::SymbolOutOfRange {
                symbol: self.sequence[position],
                position,
                n: self.n,
            }),
            None => Ok(()),
        }
    }
}

/// `x_i` for a 1-based symbol `i`.
pub fn x_vertex(i: usize) -> VertexId {
    VertexId(2 * i - 1)
}

/// `y_i` for a 1-based symbol `i`.
pub fn y_vertex(i: usize) -> VertexId {
    VertexId(2 * i)
}

/// `e_i = (x_i, y_i)`.
pub fn special_edge(i: usize) -> Edge {
    Edge::new(x_vertex(i), y_vertex(i))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReductionOutput {
    pub instance: ApsInstance,
    pub graph: Digraph,
    pub schedule: Schedule,
    /// `e_1, ..., e_n`.
    pub special_edges: Vec<Edge>,
    /// Start offsets of `S_1, ..., S_|T|` and of the trailing `R`.
    pub block_boundaries: Vec<usize>,
    /// `|R|`.
    pub stripped_length: usize,
    /// `|Q|`.
    pub base_length: usize,
}

impl ReductionOutput {
    pub fn manifest(&self) -> ReductionManifest {
        ReductionManifest {
            n: self.instance.n,
            sequence: self.instance.sequence.clone(),
            vertex_count: self.graph.vertex_count(),
            special_edges: self.special_edges.iter().map(|e| [e.tail().index(), e.head().index()]).collect(),
            block_boundaries: self.block_boundaries.clone(),
            base_length: self.base_length,
            stripped_length: self.stripped_length,
            schedule_length: self.schedule.len(),
        }
    }
}

/// Serializable summary written next to the reduced graph and schedule.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionManifest {
    pub n: usize,
    #[serde(rename = "T")]
    pub sequence: Vec<usize>,
    pub vertex_count: usize,
    pub special_edges: Vec<[usize; 2]>,
    pub block_boundaries: Vec<usize>,
    pub base_length: usize,
    pub stripped_length: usize,
    pub schedule_length: usize,
}

/// `Q`: round-robin with `2n` rounds on the complete digraph with `2n + 1`
/// vertices, of length `2n * (2n + 1) * 2n`.
pub fn build_base_schedule(n: usize) -> Schedule {
    let g = Digraph::complete(2 * n + 1).expect("2n + 1 >= 1");
    round_robin(&g, (2 * n).max(1)).expect("at least one round")
}

/// `q` with every occurrence of the given edges removed.
pub fn strip_special_edges(q: &Schedule, specials: &[Edge]) -> Schedule {
    Schedule::new(q.vertex_count(), q.iter().copied().filter(|e| !specials.contains(e)).collect())
}

/// Builds `S` for `inst`. `|S| = (|T| + 1) |R| + |T|`.
pub fn aps_to_validity(inst: &ApsInstance) -> Result<ReductionOutput, ReductionError> {
    inst.check()?;
    let n = inst.n;
    let graph = Digraph::complete(2 * n + 1).expect("2n + 1 >= 1");
    let special_edges: Vec<Edge> = (1..=n).map(special_edge).collect();
    let q = build_base_schedule(n);
    let r = strip_special_edges(&q, &special_edges);

    let mut schedule = Schedule::empty(graph.vertex_count());
    let mut block_boundaries = Vec::with_capacity(inst.sequence.len() + 1);
    for &t in &inst.sequence {
        block_boundaries.push(schedule.len());
        schedule.extend_from(&r);
        schedule.push(special_edges[t - 1]);
    }
    block_boundaries.push(schedule.len());
    schedule.extend_from(&r);

    Ok(ReductionOutput {
        instance: inst.clone(),
        graph,
        schedule,
        special_edges,
        block_boundaries,
        stripped_length: r.len(),
        base_length: q.len(),
    })
}

/// Recovers the permutation encoded by a gadget-shaped witness.
///
/// A witness has gadget shape when it reads `(s, x_a, y_a, x_b, y_b, ...)`
/// with at least one special edge. If it uses only `j < n` special edges,
/// the remaining symbols are appended in ascending order; every extension of
/// a missing partial permutation is missing too. Any other shape yields
/// `None`.
pub fn decode_witness(witness: &SimplePath, out: &ReductionOutput) -> Option<Vec<usize>> {
    let n = out.instance.n;
    let vertices = witness.vertices();
    if vertices.first() != Some(&out.graph.source()) || vertices.len() < 3 || vertices.len().is_multiple_of(2) {
        return None;
    }
    let mut perm = Vec::with_capacity(n);
    for pair in vertices[1..].chunks(2) {
        let (x, y) = (pair[0].index(), pair[1].index());
        if x % 2 == 0 || y != x + 1 {
            return None;
        }
        perm.push(x.div_ceil(2));
    }
    let rest: Vec<usize> = (1..=n).filter(|i| !perm.contains(i)).collect();
    perm.extend(rest);
    Some(perm)
}
