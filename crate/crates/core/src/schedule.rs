// SPDX-License-Identifier: Apache-2.0

//! Non-adaptive relaxation schedules and the classical generators.
//!
//! A [`Schedule`] is a fixed sequence of edges to relax, chosen before any
//! weight is known. Three generators are provided:
//!
//! * [`round_robin`]: every edge, lexicographically, repeated `rounds` times.
//! * [`yen`]: alternate passes over the forward and backward edges of a
//!   vertex order. Both edge classes are acyclic, and each pass visits its
//!   class in topological order.
//! * [`randomized_yen`]: [`yen`] over a vertex order drawn from a seeded RNG.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{parse_pair, strip_comment, Digraph, Edge, GraphError, VertexId};

#[derive(Debug, Error)]
pub enum ScheduleError {
    #[error("round-robin needs at least one round")]
    ZeroRounds,
    #[error("Yen's schedule needs at least one half-pass")]
    ZeroHalfPasses,
    #[error("this generator requires a complete digraph")]
    NotComplete,
    #[error("vertex order is not a permutation of 0..{n}")]
    InvalidOrder { n: usize },
    #[error("schedule targets {schedule} vertices but the graph has {graph}")]
    VertexCountMismatch { schedule: usize, graph: usize },
    #[error("step {index} relaxes {edge}, which is not an edge of the graph")]
    StepNotAnEdge { index: usize, edge: Edge },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("malformed schedule JSON: {0}")]
    Json(#[from] serde_json::Error),
}

/// A finite sequence of edge relaxations for a graph on `n` vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Schedule {
    n: usize,
    steps: Vec<Edge>,
}

impl Schedule {
    pub fn new(n: usize, steps: Vec<Edge>) -> Self {
        Schedule { n, steps }
    }

    pub fn empty(n: usize) -> Self {
        Schedule { n, steps: Vec::new() }
    }

    /// Number of vertices of the graph this schedule is written for.
    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn steps(&self) -> &[Edge] {
        &self.steps
    }

    /// The length `L` of the schedule.
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Edge> {
        self.steps.iter()
    }

    pub fn push(&mut self, edge: Edge) {
        self.steps.push(edge);
    }

    pub fn extend_from(&mut self, other: &Schedule) {
        self.steps.extend_from_slice(&other.steps);
    }

    /// Checks that the schedule was written for `g` and only relaxes edges of `g`.
    pub fn check_targets(&self, g: &Digraph) -> Result<(), ScheduleError> {
        if self.n != g.vertex_count() {
            return Err(ScheduleError::VertexCountMismatch {
                schedule: self.n,
                graph: g.vertex_count(),
            });
        }
        match self.steps.iter().position(|&e| !g.has_edge(e)) {
            Some(index) => Err(ScheduleError::StepNotAnEdge { index, edge: self.steps[index] }),
            None => Ok(()),
        }
    }

    /// One `u v` line per step.
    pub fn to_text(&self) -> String {
        let mut text = String::with_capacity(self.steps.len() * 6);
        for edge in &self.steps {
            text.push_str(&format!("{} {}\n", edge.tail(), edge.head()));
        }
        text
    }

    /// Parses the `u v` line format for a graph on `n` vertices. Blank lines
    /// and `#` comments are skipped.
    pub fn from_text(text: &str, n: usize) -> Result<Self, ScheduleError> {
        let mut steps = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let body = strip_comment(line);
            if body.is_empty() {
                continue;
            }
            let (u, v) = parse_pair(body, i + 1)?;
            for w in [u, v] {
                if w >= n {
                    return Err(GraphError::VertexOutOfRange { vertex: VertexId(w), n }.into());
                }
            }
            steps.push(Edge::try_new(u, v)?);
        }
        Ok(Schedule { n, steps })
    }

    pub fn to_document(&self, header: ScheduleHeader) -> ScheduleDocument {
        ScheduleDocument {
            header,
            steps: self.steps.iter().map(|e| [e.tail().index(), e.head().index()]).collect(),
        }
    }

    pub fn from_document(doc: &ScheduleDocument) -> Result<Self, ScheduleError> {
        let n = doc.header.n;
        let mut steps = Vec::with_capacity(doc.steps.len());
        for &[u, v] in &doc.steps {
            for w in [u, v] {
                if w >= n {
                    return Err(GraphError::VertexOutOfRange { vertex: VertexId(w), n }.into());
                }
            }
            steps.push(Edge::try_new(u, v)?);
        }
        Ok(Schedule { n, steps })
    }

    /// Reads either format: JSON when the first non-blank character is `{`,
    /// the line format otherwise. The line format needs the vertex count.
    pub fn parse(text: &str, n: usize) -> Result<Self, ScheduleError> {
        if text.trim_start().starts_with('{') {
            let doc: ScheduleDocument = serde_json::from_str(text)?;
            let schedule = Schedule::from_document(&doc)?;
            if schedule.n != n {
                return Err(ScheduleError::VertexCountMismatch { schedule: schedule.n, graph: n });
            }
            Ok(schedule)
        } else {
            Schedule::from_text(text, n)
        }
    }
}

impl<'a> IntoIterator for &'a Schedule {
    type Item = &'a Edge;
    type IntoIter = std::slice::Iter<'a, Edge>;

    fn into_iter(self) -> Self::IntoIter {
        self.steps.iter()
    }
}

/// Describes how a schedule file was produced.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScheduleHeader {
    pub n: usize,
    pub generator: String,
    #[serde(default)]
    pub parameters: BTreeMap<String, u64>,
    #[serde(default)]
    pub seed: Option<u64>,
}

/// JSON form of a schedule: a header plus `[u, v]` pairs in step order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScheduleDocument {
    pub header: ScheduleHeader,
    pub steps: Vec<[usize; 2]>,
}

/// A permutation of the vertices. Position 0 comes first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexOrder {
    order: Vec<VertexId>,
    position: Vec<usize>,
}

impl VertexOrder {
    pub fn new(order: Vec<VertexId>) -> Result<Self, ScheduleError> {
        let n = order.len();
        let mut position = vec![usize::MAX; n];
        for (pos, v) in order.iter().enumerate() {
            if v.index() >= n || position[v.index()] != usize::MAX {
                return Err(ScheduleError::InvalidOrder { n });
            }
            position[v.index()] = pos;
        }
        Ok(VertexOrder { order, position })
    }

    pub fn identity(n: usize) -> Self {
        VertexOrder {
            order: (0..n).map(VertexId).collect(),
            position: (0..n).collect(),
        }
    }

    /// A uniformly random order.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let mut order: Vec<VertexId> = (0..n).map(VertexId).collect();
        order.shuffle(rng);
        VertexOrder::new(order).expect("a shuffle is a permutation")
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.order
    }

    pub fn position(&self, v: VertexId) -> usize {
        self.position[v.index()]
    }

    /// True if `edge` goes from an earlier to a later vertex.
    pub fn is_forward(&self, edge: Edge) -> bool {
        self.position(edge.tail()) < self.position(edge.head())
    }
}

/// The standard schedule: all edges of `g` in lexicographic order, `rounds` times.
pub fn round_robin(g: &Digraph, rounds: usize) -> Result<Schedule, ScheduleError> {
    if rounds == 0 {
        return Err(ScheduleError::ZeroRounds);
    }
    let mut steps = Vec::with_capacity(rounds * g.edge_count());
    for _ in 0..rounds {
        steps.extend_from_slice(g.edges());
    }
    Ok(Schedule::new(g.vertex_count(), steps))
}

/// Yen's schedule over a complete digraph.
///
/// Odd half-passes (the 1st, 3rd, ...) relax every forward edge, taking tails
/// in ascending order position and, for each tail, heads in ascending order
/// position. Even half-passes relax every backward edge, taking tails in
/// descending order position. Each half-pass has `n(n-1)/2` steps.
pub fn yen(g: &Digraph, order: &VertexOrder, half_passes: usize) -> Result<Schedule, ScheduleError> {
    if half_passes == 0 {
        return Err(ScheduleError::ZeroHalfPasses);
    }
    if !g.is_complete() {
        return Err(ScheduleError::NotComplete);
    }
    let n = g.vertex_count();
    if order.len() != n {
        return Err(ScheduleError::InvalidOrder { n });
    }

    let vs = order.vertices();
    let mut forward = Vec::with_capacity(n * (n - 1) / 2);
    for (i, &tail) in vs.iter().enumerate() {
        for &head in &vs[i + 1..] {
            forward.push(Edge::new(tail, head));
        }
    }
    let mut backward = Vec::with_capacity(n * (n - 1) / 2);
    for (i, &tail) in vs.iter().enumerate().rev() {
        for &head in vs[..i].iter().rev() {
            backward.push(Edge::new(tail, head));
        }
    }

    let mut steps = Vec::with_capacity(half_passes * forward.len());
    for pass in 0..half_passes {
        steps.extend_from_slice(if pass % 2 == 0 { &forward } else { &backward });
    }
    Ok(Schedule::new(n, steps))
}

/// [`yen`] with `half_passes = n` over an order drawn from a ChaCha8 stream
/// seeded with `seed`.
pub fn randomized_yen(g: &Digraph, seed: u64) -> Result<Schedule, ScheduleError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let order = VertexOrder::random(g.vertex_count(), &mut rng);
    yen(g, &order, g.vertex_count())
}
