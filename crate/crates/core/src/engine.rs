// SPDX-License-Identifier: Apache-2.0

//! Schedule execution under exact relaxation semantics.
//!
//! Relaxing `(u, v)` performs `d(v) <- min(d(v), d(u) + w(u, v))`, starting
//! from `d(source) = 0` and `d(v) = +inf` elsewhere. Weights are exact
//! (integers or rationals) and infinity is a distinct value rather than a
//! large sentinel, so every comparison here is exact.
//!
//! [`exact_distances`] is a ground-truth oracle built on all-pairs dynamic
//! programming. It shares no code with [`run_schedule`].

use std::fmt;
use std::ops::Add;

use num_rational::Rational64;
use num_traits::Zero;
use thiserror::Error;

use crate::graph::{parse_pair, strip_comment, Digraph, Edge, GraphError, SimplePath, VertexId};
use crate::schedule::{Schedule, ScheduleError};

/// Exact edge weights. Implemented for `i64` and [`Rational64`] among others.
pub trait Weight: Copy + Ord + fmt::Debug + fmt::Display + Zero + Add<Output = Self> {}

impl<T> Weight for T where T: Copy + Ord + fmt::Debug + fmt::Display + Zero + Add<Output = T> {}

/// A tentative or final distance. `Finite(_) < Infinite` for every finite value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Distance<W> {
    Finite(W),
    Infinite,
}

impl<W: Weight> Distance<W> {
    pub fn is_finite(self) -> bool {
        matches!(self, Distance::Finite(_))
    }

    pub fn finite(self) -> Option<W> {
        match self {
            Distance::Finite(w) => Some(w),
            Distance::Infinite => None,
        }
    }

    /// `self + w`, with `inf + w = inf`.
    #[inline]
    pub fn extend(self, w: W) -> Self {
        match self {
            Distance::Finite(d) => Distance::Finite(d + w),
            Distance::Infinite => Distance::Infinite,
        }
    }
}

impl<W: fmt::Display> fmt::Display for Distance<W> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Distance::Finite(w) => write!(f, "{w}"),
            Distance::Infinite => f.write_str("inf"),
        }
    }
}

/// Distances from the source, indexed by vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistanceVector<W> {
    values: Vec<Distance<W>>,
}

impl<W: Weight> DistanceVector<W> {
    /// `0` at `source`, `+inf` elsewhere.
    pub fn initial(n: usize, source: VertexId) -> Self {
        let mut values = vec![Distance::Infinite; n];
        values[source.index()] = Distance::Finite(W::zero());
        DistanceVector { values }
    }

    pub fn from_values(values: Vec<Distance<W>>) -> Self {
        DistanceVector { values }
    }

    pub fn get(&self, v: VertexId) -> Distance<W> {
        self.values[v.index()]
    }

    pub fn as_slice(&self) -> &[Distance<W>] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Applies one relaxation; returns true if `d(head)` decreased.
    #[inline]
    pub fn relax(&mut self, edge: Edge, w: W) -> bool {
        let candidate = self.values[edge.tail().index()].extend(w);
        let slot = &mut self.values[edge.head().index()];
        if candidate < *slot {
            *slot = candidate;
            true
        } else {
            false
        }
    }
}

/// Weights on the edges of one graph, stored as an `n x n` table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightAssignment<W> {
    n: usize,
    table: Vec<Option<W>>,
}

impl<W: Weight> WeightAssignment<W> {
    /// Assigns `f(e)` to every edge `e` of `g`.
    pub fn from_fn(g: &Digraph, mut f: impl FnMut(Edge) -> W) -> Self {
        let n = g.vertex_count();
        let mut table = vec![None; n * n];
        for &e in g.edges() {
            table[e.tail().index() * n + e.head().index()] = Some(f(e));
        }
        WeightAssignment { n, table }
    }

    pub fn uniform(g: &Digraph, w: W) -> Self {
        Self::from_fn(g, |_| w)
    }

    /// Builds an assignment from explicit entries, which must cover every
    /// edge of `g` exactly once and nothing else.
    pub fn from_entries(g: &Digraph, entries: impl IntoIterator<Item = (Edge, W)>) -> Result<Self, EngineError> {
        let n = g.vertex_count();
        let mut table = vec![None; n * n];
        for (e, w) in entries {
            if !g.has_edge(e) {
                return Err(EngineError::UnknownEdge(e));
            }
            let slot = &mut table[e.tail().index() * n + e.head().index()];
            if slot.replace(w).is_some() {
                return Err(EngineError::DuplicateWeight(e));
            }
        }
        let assignment = WeightAssignment { n, table };
        assignment.check_total(g)?;
        Ok(assignment)
    }

    pub fn get(&self, e: Edge) -> Option<W> {
        let (u, v) = (e.tail().index(), e.head().index());
        if u >= self.n || v >= self.n {
            return None;
        }
        self.table[u * self.n + v]
    }

    /// Applies `f` to every weight.
    pub fn map<U: Weight>(&self, mut f: impl FnMut(W) -> U) -> WeightAssignment<U> {
        WeightAssignment {
            n: self.n,
            table: self.table.iter().map(|w| w.map(&mut f)).collect(),
        }
    }

    /// Checks that every edge of `g` carries a weight.
    pub fn check_total(&self, g: &Digraph) -> Result<(), EngineError> {
        if self.n != g.vertex_count() {
            return Err(EngineError::VertexCountMismatch { weights: self.n, graph: g.vertex_count() });
        }
        match g.edges().iter().find(|&&e| self.get(e).is_none()) {
            Some(&e) => Err(EngineError::MissingWeight(e)),
            None => Ok(()),
        }
    }

    fn weight_of(&self, e: Edge) -> W {
        self.table[e.tail().index() * self.n + e.head().index()].expect("weights checked total")
    }
}

/// Vertices whose distance is undefined because a negative cycle is reachable
/// from the source and passes through them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NegativeCycle {
    pub vertices: Vec<VertexId>,
}

impl fmt::Display for NegativeCycle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list: Vec<String> = self.vertices.iter().map(|v| v.to_string()).collect();
        write!(f, "negative cycle reachable from the source through vertices [{}]", list.join(", "))
    }
}

#[derive(Debug, Error)]
pub enum EngineError {
    #[error(transparent)]
    Schedule(#[from] ScheduleError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("edge {0} has no weight")]
    MissingWeight(Edge),
    #[error("edge {0} is weighted twice")]
    DuplicateWeight(Edge),
    #[error("{0} is not an edge of the graph")]
    UnknownEdge(Edge),
    #[error("weights are for {weights} vertices but the graph has {graph}")]
    VertexCountMismatch { weights: usize, graph: usize },
    #[error("{0}")]
    NegativeCycle(NegativeCycle),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// Executes `s` on `(g, w)` and returns the final tentative distances.
///
/// The schedule is checked against `g` before any step runs.
pub fn run_schedule<W: Weight>(g: &Digraph, w: &WeightAssignment<W>, s: &Schedule) -> Result<DistanceVector<W>, EngineError> {
    s.check_targets(g)?;
    w.check_total(g)?;
    let mut d = DistanceVector::initial(g.vertex_count(), g.source());
    for &edge in s {
        let before = d.get(edge.head());
        d.relax(edge, w.weight_of(edge));
        debug_assert!(d.get(edge.head()) <= before, "relaxation increased d({})", edge.head());
    }
    Ok(d)
}

/// True single-source distances, via Floyd-Warshall over all pairs.
///
/// Fails with [`EngineError::NegativeCycle`] when some vertex lies on a
/// negative cycle and is reachable from the source. Negative cycles that the
/// source cannot reach do not affect any source distance and are ignored.
pub fn exact_distances<W: Weight>(g: &Digraph, w: &WeightAssignment<W>) -> Result<DistanceVector<W>, EngineError> {
    w.check_total(g)?;
    let n = g.vertex_count();
    let mut dist = vec![Distance::<W>::Infinite; n * n];
    for i in 0..n {
        dist[i * n + i] = Distance::Finite(W::zero());
    }
    for &e in g.edges() {
        let cell = &mut dist[e.tail().index() * n + e.head().index()];
        *cell = (*cell).min(Distance::Finite(w.weight_of(e)));
    }
    for k in 0..n {
        for i in 0..n {
            let Distance::Finite(ik) = dist[i * n + k] else { continue };
            for j in 0..n {
                if let Distance::Finite(kj) = dist[k * n + j] {
                    let candidate = Distance::Finite(ik + kj);
                    if candidate < dist[i * n + j] {
                        dist[i * n + j] = candidate;
                    }
                }
            }
        }
    }

    let s = g.source().index();
    let zero = Distance::Finite(W::zero());
    let on_cycle: Vec<VertexId> = (0..n)
        .filter(|&v| dist[v * n + v] < zero && dist[s * n + v].is_finite())
        .map(VertexId)
        .collect();
    if !on_cycle.is_empty() {
        return Err(EngineError::NegativeCycle(NegativeCycle { vertices: on_cycle }));
    }
    Ok(DistanceVector::from_values(dist[s * n..(s + 1) * n].to_vec()))
}

/// Weight 0 on the edges of `p` and 1 everywhere else.
///
/// A schedule computes `d(last vertex of p) = 0` under these weights exactly
/// when it contains `p`.
pub fn adversarial_weights(g: &Digraph, p: &SimplePath) -> Result<WeightAssignment<i64>, EngineError> {
    p.check_rooted_in(g)?;
    let on_path: Vec<Edge> = p.edges().collect();
    Ok(WeightAssignment::from_fn(g, |e| if on_path.contains(&e) { 0 } else { 1 }))
}

/// True iff some edge could still lower a distance in `d`.
///
/// After a valid schedule this certifies a negative cycle reachable from the
/// source. After an invalid schedule it may also just mean the schedule
/// stopped early.
pub fn detect_negative_cycle_residue<W: Weight>(g: &Digraph, w: &WeightAssignment<W>, d: &DistanceVector<W>) -> bool {
    g.edges().iter().any(|&e| match (d.get(e.tail()), w.get(e)) {
        (Distance::Finite(du), Some(we)) => Distance::Finite(du + we) < d.get(e.head()),
        _ => false,
    })
}

/// Parses a decimal (`-2.5`), fraction (`7/3`) or integer weight.
pub fn parse_rational(word: &str) -> Option<Rational64> {
    if let Some((num, den)) = word.split_once('/') {
        let num: i64 = num.trim().parse().ok()?;
        let den: i64 = den.trim().parse().ok()?;
        return (den != 0).then(|| Rational64::new(num, den));
    }
    if let Some((int, frac)) = word.split_once('.') {
        let negative = int.starts_with('-');
        let int_part: i64 = match int.trim_start_matches(['-', '+']) {
            "" => 0,
            digits => digits.parse().ok()?,
        };
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) || frac.len() > 18 {
            return None;
        }
        let scale = 10i64.checked_pow(frac.len() as u32)?;
        let frac_part: i64 = frac.parse().ok()?;
        let magnitude = int_part.checked_mul(scale)?.checked_add(frac_part)?;
        let numer = if negative { -magnitude } else { magnitude };
        return Some(Rational64::new(numer, scale));
    }
    word.parse::<i64>().ok().map(Rational64::from_integer)
}

/// Parses the `u v w` line format. Every edge of `g` must be listed exactly once.
pub fn parse_weights(text: &str, g: &Digraph) -> Result<WeightAssignment<Rational64>, EngineError> {
    let mut entries = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let body = strip_comment(line);
        if body.is_empty() {
            continue;
        }
        let line_no = i + 1;
        let (pair, weight) = body.rsplit_once(char::is_whitespace).ok_or(EngineError::Parse {
            line: line_no,
            message: format!("expected `u v w`, found `{body}`"),
        })?;
        let (u, v) = parse_pair(pair.trim(), line_no)?;
        let w = parse_rational(weight).ok_or(EngineError::Parse {
            line: line_no,
            message: format!("`{weight}` is not an integer or rational weight"),
        })?;
        let edge = Edge::try_new(u, v)?;
        entries.push((edge, w));
    }
    WeightAssignment::from_entries(g, entries)
}

/// Writes the `u v w` line format in edge order.
pub fn weights_to_text<W: Weight>(g: &Digraph, w: &WeightAssignment<W>) -> String {
    let mut text = String::new();
    for &e in g.edges() {
        if let Some(weight) = w.get(e) {
            text.push_str(&format!("{} {} {}\n", e.tail(), e.head(), weight));
        }
    }
    text
}
