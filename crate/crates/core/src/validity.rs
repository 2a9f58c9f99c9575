// SPDX-License-Identifier: Apache-2.0

//! Deciding whether a schedule is a valid relaxation sequence.
//!
//! A schedule contains a path when the path's edges occur in it as a
//! subsequence, in path order. A schedule is valid for a graph when it
//! contains every simple path starting at the source; under non-adaptive
//! relaxation this is the same as computing correct distances for every
//! weight assignment without negative cycles.
//!
//! The decision problem is co-NP-complete, so everything here is exhaustive
//! and metered by a [`Budget`] of path-extension steps. Running out of budget
//! is reported as [`ValidityError::BudgetExceeded`], never as "invalid".

use std::collections::HashMap;

use serde::Serialize;
use thiserror::Error;

use crate::graph::{Digraph, Edge, SimplePath, VertexId};
use crate::schedule::{Schedule, ScheduleError};

pub const DEFAULT_BUDGET: u64 = 100_000_000;

/// Cap on the number of path-extension steps a search may take.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    limit: u64,
}

impl Budget {
    pub const fn new(limit: u64) -> Self {
        Budget { limit }
    }

    pub const fn limit(self) -> u64 {
        self.limit
    }
}

impl Default for Budget {
    fn default() -> Self {
        Budget::new(DEFAULT_BUDGET)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("search budget of {limit} path-extension steps exhausted")]
pub struct BudgetExceeded {
    pub limit: u64,
}

#[derive(Debug, Error)]
pub enum ValidityError {
    #[error(transparent)]
    BudgetExceeded(#[from] BudgetExceeded),
    #[error(transparent)]
    Schedule(#[from] ScheduleError),
    #[error("k = {k} is out of range for a graph on {n} vertices")]
    KOutOfRange { k: usize, n: usize },
    #[error("witness search supports at most 64 vertices, got {0}")]
    TooManyVertices(usize),
}

struct Meter {
    used: u64,
    limit: u64,
}

impl Meter {
    fn new(budget: Budget) -> Self {
        Meter { used: 0, limit: budget.limit }
    }

    #[inline]
    fn tick(&mut self) -> Result<(), BudgetExceeded> {
        self.used += 1;
        if self.used > self.limit {
            Err(BudgetExceeded { limit: self.limit })
        } else {
            Ok(())
        }
    }
}

/// Number of schedule steps consumed by a greedy match so far.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct ContainmentCursor(usize);

impl ContainmentCursor {
    pub const START: ContainmentCursor = ContainmentCursor(0);

    pub fn position(self) -> usize {
        self.0
    }

    /// Matches `edge` at its earliest occurrence at or after the cursor.
    pub fn advance(self, steps: &[Edge], edge: Edge) -> Option<ContainmentCursor> {
        steps[self.0..]
            .iter()
            .position(|&e| e == edge)
            .map(|offset| ContainmentCursor(self.0 + offset + 1))
    }
}

/// Per-edge occurrence lists, for `O(log L)` cursor advances.
#[derive(Debug, Clone)]
pub struct ScheduleIndex {
    n: usize,
    occurrences: Vec<Vec<u32>>,
}

impl ScheduleIndex {
    pub fn new(s: &Schedule) -> Self {
        let n = s.vertex_count();
        let mut occurrences = vec![Vec::new(); n * n];
        for (i, e) in s.iter().enumerate() {
            occurrences[e.tail().index() * n + e.head().index()].push(i as u32);
        }
        ScheduleIndex { n, occurrences }
    }

    /// Same result as [`ContainmentCursor::advance`] on the indexed schedule.
    #[inline]
    pub fn advance(&self, cursor: ContainmentCursor, edge: Edge) -> Option<ContainmentCursor> {
        let list = &self.occurrences[edge.tail().index() * self.n + edge.head().index()];
        let at = list.partition_point(|&pos| (pos as usize) < cursor.0);
        list.get(at).map(|&pos| ContainmentCursor(pos as usize + 1))
    }
}

/// True iff the edges of `p` occur in `s` in path order.
///
/// Greedy earliest-occurrence matching decides subsequence containment
/// exactly: any match can be shifted left onto the greedy one.
pub fn contains_path(s: &Schedule, p: &SimplePath) -> bool {
    let steps = s.steps();
    let mut cursor = ContainmentCursor::START;
    for edge in p.edges() {
        match cursor.advance(steps, edge) {
            Some(next) => cursor = next,
            None => return false,
        }
    }
    true
}

/// Outcome of an exhaustive validity check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidityReport {
    pub valid: bool,
    #[serde(serialize_with = "serialize_witness")]
    pub witness: Option<SimplePath>,
    pub paths_checked: u64,
}

fn serialize_witness<S: serde::Serializer>(witness: &Option<SimplePath>, ser: S) -> Result<S::Ok, S::Error> {
    witness.as_ref().map(SimplePath::indices).serialize(ser)
}

struct Enumerator<'a> {
    graph: &'a Digraph,
    index: ScheduleIndex,
    meter: Meter,
    on_path: Vec<bool>,
    path: Vec<VertexId>,
    checked: u64,
}

impl<'a> Enumerator<'a> {
    fn new(s: &Schedule, g: &'a Digraph, budget: Budget) -> Self {
        let mut on_path = vec![false; g.vertex_count()];
        on_path[g.source().index()] = true;
        Enumerator {
            graph: g,
            index: ScheduleIndex::new(s),
            meter: Meter::new(budget),
            on_path,
            path: vec![g.source()],
            checked: 0,
        }
    }

    /// Walks every k-path in lexicographic order, carrying the greedy cursor
    /// along shared prefixes. Returns the first k-path not contained.
    fn first_uncontained(&mut self, k: usize, cursor: Option<ContainmentCursor>) -> Result<Option<SimplePath>, BudgetExceeded> {
        if self.path.len() == k + 1 {
            self.checked += 1;
            return Ok(match cursor {
                Some(_) => None,
                None => Some(SimplePath::new(self.path.clone()).expect("enumerated paths are simple")),
            });
        }
        let tail = *self.path.last().expect("path holds the source");
        for &head in self.graph.out_neighbors(tail) {
            if self.on_path[head.index()] {
                continue;
            }
            self.meter.tick()?;
            let next = cursor.and_then(|c| self.index.advance(c, Edge::new(tail, head)));
            self.path.push(head);
            self.on_path[head.index()] = true;
            let found = self.first_uncontained(k, next)?;
            self.on_path[head.index()] = false;
            self.path.pop();
            if found.is_some() {
                return Ok(found);
            }
        }
        Ok(None)
    }
}

/// Checks that `s` contains every k-path of `g`.
///
/// On failure the witness is the first uncontained k-path in lexicographic
/// order.
pub fn is_k_valid(s: &Schedule, g: &Digraph, k: usize, budget: Budget) -> Result<ValidityReport, ValidityError> {
    s.check_targets(g)?;
    if k >= g.vertex_count() {
        return Err(ValidityError::KOutOfRange { k, n: g.vertex_count() });
    }
    let mut walker = Enumerator::new(s, g, budget);
    let witness = walker.first_uncontained(k, Some(ContainmentCursor::START))?;
    Ok(ValidityReport {
        valid: witness.is_none(),
        witness,
        paths_checked: walker.checked,
    })
}

/// Checks k-validity for every `k` in `1..n`, sharing one budget.
///
/// All lengths are checked because containing every maximal path does not by
/// itself imply containing the shorter ones on incomplete graphs.
pub fn is_valid(s: &Schedule, g: &Digraph, budget: Budget) -> Result<ValidityReport, ValidityError> {
    s.check_targets(g)?;
    let mut walker = Enumerator::new(s, g, budget);
    for k in 1..g.vertex_count() {
        if let Some(witness) = walker.first_uncontained(k, Some(ContainmentCursor::START))? {
            return Ok(ValidityReport {
                valid: false,
                witness: Some(witness),
                paths_checked: walker.checked,
            });
        }
    }
    Ok(ValidityReport {
        valid: true,
        witness: None,
        paths_checked: walker.checked,
    })
}

/// Options for [`find_violating_path_with`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WitnessSearch {
    pub budget: Budget,
    /// Skip a (vertex, visited set) state already explored without success
    /// from a cursor at or beyond the current one.
    pub dominance_pruning: bool,
}

impl Default for WitnessSearch {
    fn default() -> Self {
        WitnessSearch {
            budget: Budget::default(),
            dominance_pruning: true,
        }
    }
}

/// Some simple source path not contained in `s`, or `None` if `s` is valid.
pub fn find_violating_path(s: &Schedule, g: &Digraph, budget: Budget) -> Result<Option<SimplePath>, ValidityError> {
    find_violating_path_with(s, g, WitnessSearch { budget, ..WitnessSearch::default() })
}

/// Depth-first search over states (current vertex, visited set, cursor).
///
/// Paths are extended in lexicographic order and the search stops at the
/// first edge that cannot be matched, so the witness is the shortest
/// uncontained prefix of the first such path.
pub fn find_violating_path_with(s: &Schedule, g: &Digraph, options: WitnessSearch) -> Result<Option<SimplePath>, ValidityError> {
    s.check_targets(g)?;
    if g.vertex_count() > 64 {
        return Err(ValidityError::TooManyVertices(g.vertex_count()));
    }
    let mut search = WitnessSearcher {
        graph: g,
        index: ScheduleIndex::new(s),
        meter: Meter::new(options.budget),
        prune: options.dominance_pruning,
        explored: HashMap::new(),
        path: vec![g.source()],
    };
    let source = g.source();
    if search.extend(source, 1u64 << source.index(), ContainmentCursor::START)? {
        Ok(Some(SimplePath::new(search.path).expect("search paths are simple")))
    } else {
        Ok(None)
    }
}

struct WitnessSearcher<'a> {
    graph: &'a Digraph,
    index: ScheduleIndex,
    meter: Meter,
    prune: bool,
    // (vertex, visited mask) -> furthest cursor from which the state was
    // fully explored without finding a violation.
    explored: HashMap<(usize, u64), usize>,
    path: Vec<VertexId>,
}

impl WitnessSearcher<'_> {
    fn extend(&mut self, at: VertexId, visited: u64, cursor: ContainmentCursor) -> Result<bool, BudgetExceeded> {
        let key = (at.index(), visited);
        if self.prune {
            if let Some(&done) = self.explored.get(&key) {
                if done >= cursor.position() {
                    return Ok(false);
                }
            }
        }
        for &head in self.graph.out_neighbors(at) {
            let bit = 1u64 << head.index();
            if visited & bit != 0 {
                continue;
            }
            self.meter.tick()?;
            self.path.push(head);
            match self.index.advance(cursor, Edge::new(at, head)) {
                None => return Ok(true),
                Some(next) => {
                    if self.extend(head, visited | bit, next)? {
                        return Ok(true);
                    }
                }
            }
            self.path.pop();
        }
        if self.prune {
            let entry = self.explored.entry(key).or_insert(0);
            *entry = (*entry).max(cursor.position());
        }
        Ok(false)
    }
}
