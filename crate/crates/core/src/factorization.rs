// SPDX-License-Identifier: Apache-2.0

//! Matching families and permutation supersequences.
//!
//! The non-source vertices of a complete digraph are split into disjoint
//! matchings, each oriented both ways. For any valid schedule `S` and any
//! oriented matching `F`, the subsequence of `S` made of `F`'s edges must
//! contain every permutation of `F`: otherwise chaining the edges of a missing
//! permutation through connector edges gives a simple source path that `S`
//! does not contain (see [`gadget_path`]). The subsequences for different
//! members are disjoint, so
//!
//! ```text
//! |S| >= (number of members) * c(member size)
//! ```
//!
//! where `c(k)` is the length of the shortest sequence over `k` symbols
//! containing all `k!` permutations. [`shortest_universal_length`] computes
//! `c(k)` exactly for small `k`, and [`audit_lower_bound`] turns all of this
//! into a report for a concrete schedule.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::{BigRational, Rational64};
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::graph::{Digraph, Edge, GraphError, SimplePath, VertexId};
use crate::schedule::Schedule;

/// Largest alphabet accepted by [`contains_all_permutations`] by default.
pub const DEFAULT_MAX_ALPHABET: usize = 8;

/// Largest `k` for which [`shortest_universal_length`] runs.
pub const MAX_EXACT_UNIVERSAL: usize = 4;

#[derive(Debug, Error)]
pub enum FactorizationError {
    #[error("a 1-factorization needs at least 2 vertices, got {0}")]
    TooFewVertices(usize),
    #[error("the matching family needs a complete digraph on at least 4 vertices")]
    FamilyUndefined,
    #[error("symbol is not in the declared alphabet")]
    UnknownSymbol,
    #[error("alphabet contains a repeated symbol")]
    RepeatedSymbol,
    #[error("alphabet of size {size} exceeds the permutation limit of {limit}")]
    AlphabetTooLarge { size: usize, limit: usize },
    #[error("exact universal-sequence search is limited to k <= {MAX_EXACT_UNIVERSAL}, got {0}")]
    SearchTooLarge(usize),
    #[error("gadget edges {0} and {1} share an endpoint")]
    IncidentEdges(Edge, Edge),
    #[error("gadget edge {0} touches the source")]
    TouchesSource(Edge),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Pairwise non-incident undirected pairs, each stored as `(low, high)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matching {
    pairs: Vec<(VertexId, VertexId)>,
}

impl Matching {
    pub fn pairs(&self) -> &[(VertexId, VertexId)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

/// Splits the complete graph on `vertices` into disjoint matchings with the
/// circle method.
///
/// With an even count `N` this yields `N - 1` perfect matchings. With an odd
/// count the highest-indexed vertex is left out, yielding `N - 2` matchings
/// of size `(N - 1) / 2`.
pub fn one_factorization(vertices: &[VertexId]) -> Result<Vec<Matching>, FactorizationError> {
    if vertices.len() < 2 {
        return Err(FactorizationError::TooFewVertices(vertices.len()));
    }
    let mut sorted = vertices.to_vec();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(FactorizationError::RepeatedSymbol);
    }
    if sorted.len() % 2 == 1 {
        sorted.pop();
    }

    // Fix the last vertex; rotate the remaining m = N - 1 around a circle.
    let fixed = sorted[sorted.len() - 1];
    let ring = &sorted[..sorted.len() - 1];
    let m = ring.len();
    let ordered = |a: VertexId, b: VertexId| if a < b { (a, b) } else { (b, a) };
    let rounds = (0..m)
        .map(|r| {
            let mut pairs = vec![ordered(fixed, ring[r])];
            for i in 1..=(m - 1) / 2 {
                pairs.push(ordered(ring[(r + i) % m], ring[(r + m - i) % m]));
            }
            pairs.sort_unstable();
            Matching { pairs }
        })
        .collect();
    Ok(rounds)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    /// Every edge runs from the lower to the higher index.
    Ascending,
    /// Every edge runs from the higher to the lower index.
    Descending,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrientedMatching {
    edges: Vec<Edge>,
    orientation: Orientation,
}

impl OrientedMatching {
    pub fn new(matching: &Matching, orientation: Orientation) -> Self {
        let edges = matching
            .pairs
            .iter()
            .map(|&(lo, hi)| match orientation {
                Orientation::Ascending => Edge::new(lo, hi),
                Orientation::Descending => Edge::new(hi, lo),
            })
            .collect();
        OrientedMatching { edges, orientation }
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn contains(&self, e: Edge) -> bool {
        self.edges.contains(&e)
    }
}

/// Pairwise disjoint oriented matchings, ordered `F_1, H_1, F_2, H_2, ...`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatchingFamily {
    members: Vec<OrientedMatching>,
}

impl MatchingFamily {
    pub fn members(&self) -> &[OrientedMatching] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Size of each member; all members have the same size.
    pub fn member_size(&self) -> usize {
        self.members.first().map_or(0, OrientedMatching::len)
    }
}

/// Builds the `2(n - 3)` oriented matchings over the non-source vertices of a
/// complete digraph on `n >= 4` vertices.
///
/// The first `n - 3` matchings of [`one_factorization`] are kept and each is
/// oriented ascending and then descending. Members have `(n - 2) / 2` edges
/// for even `n` and `(n - 1) / 2` for odd `n`.
pub fn build_family(g: &Digraph) -> Result<MatchingFamily, FactorizationError> {
    let n = g.vertex_count();
    if n < 4 || !g.is_complete() {
        return Err(FactorizationError::FamilyUndefined);
    }
    let others: Vec<VertexId> = g.vertices().filter(|&v| v != g.source()).collect();
    let members = one_factorization(&others)?
        .iter()
        .take(n - 3)
        .flat_map(|m| [OrientedMatching::new(m, Orientation::Ascending), OrientedMatching::new(m, Orientation::Descending)])
        .collect();
    Ok(MatchingFamily { members })
}

/// A sequence over a finite, explicitly declared alphabet.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolSequence<T> {
    alphabet: Vec<T>,
    symbols: Vec<usize>,
}

impl<T: Clone + PartialEq> SymbolSequence<T> {
    pub fn new(alphabet: Vec<T>, items: impl IntoIterator<Item = T>) -> Result<Self, FactorizationError> {
        for (i, a) in alphabet.iter().enumerate() {
            if alphabet[..i].contains(a) {
                return Err(FactorizationError::RepeatedSymbol);
            }
        }
        let symbols = items
            .into_iter()
            .map(|item| alphabet.iter().position(|a| *a == item).ok_or(FactorizationError::UnknownSymbol))
            .collect::<Result<_, _>>()?;
        Ok(SymbolSequence { alphabet, symbols })
    }

    pub fn alphabet(&self) -> &[T] {
        &self.alphabet
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &T> + '_ {
        self.symbols.iter().map(|&i| &self.alphabet[i])
    }

    /// Positions into the alphabet.
    pub fn indices(&self) -> &[usize] {
        &self.symbols
    }
}

impl SymbolSequence<usize> {
    /// A sequence over `{1, ..., n}`.
    pub fn over_range(n: usize, items: &[usize]) -> Result<Self, FactorizationError> {
        SymbolSequence::new((1..=n).collect(), items.iter().copied())
    }
}

/// The subsequence of `s` consisting of steps in `f`, in schedule order.
pub fn extract_subsequence(s: &Schedule, f: &OrientedMatching) -> SymbolSequence<Edge> {
    let symbols = s.iter().filter_map(|&e| f.edges.iter().position(|&m| m == e)).collect();
    SymbolSequence { alphabet: f.edges.clone(), symbols }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PermutationCoverage<T> {
    /// Every permutation of the alphabet is a subsequence.
    Universal,
    /// The lexicographically first permutation (by alphabet position) that is
    /// not a subsequence.
    Missing(Vec<T>),
}

impl<T> PermutationCoverage<T> {
    pub fn is_universal(&self) -> bool {
        matches!(self, PermutationCoverage::Universal)
    }
}

/// Checks whether `t` contains every permutation of its alphabet, for
/// alphabets of at most [`DEFAULT_MAX_ALPHABET`] symbols.
pub fn contains_all_permutations<T: Clone + PartialEq>(t: &SymbolSequence<T>) -> Result<PermutationCoverage<T>, FactorizationError> {
    contains_all_permutations_with_limit(t, DEFAULT_MAX_ALPHABET)
}

pub fn contains_all_permutations_with_limit<T: Clone + PartialEq>(
    t: &SymbolSequence<T>,
    max_alphabet: usize,
) -> Result<PermutationCoverage<T>, FactorizationError> {
    let k = t.alphabet.len();
    if k > max_alphabet {
        return Err(FactorizationError::AlphabetTooLarge { size: k, limit: max_alphabet });
    }
    let mut positions = vec![Vec::new(); k];
    for (i, &sym) in t.symbols.iter().enumerate() {
        positions[sym].push(i);
    }
    let mut prefix = Vec::with_capacity(k);
    Ok(match first_missing(&positions, k, &mut prefix, 0) {
        None => PermutationCoverage::Universal,
        Some(perm) => PermutationCoverage::Missing(perm.into_iter().map(|i| t.alphabet[i].clone()).collect()),
    })
}

// Depth-first over permutation prefixes in lexicographic order, matching
// greedily. The first prefix that fails to match, completed with the unused
// symbols in ascending order, is the lexicographically first missing
// permutation.
fn first_missing(positions: &[Vec<usize>], k: usize, prefix: &mut Vec<usize>, cursor: usize) -> Option<Vec<usize>> {
    if prefix.len() == k {
        return None;
    }
    for sym in 0..k {
        if prefix.contains(&sym) {
            continue;
        }
        let list = &positions[sym];
        let at = list.partition_point(|&p| p < cursor);
        prefix.push(sym);
        match list.get(at) {
            None => {
                let mut perm = prefix.clone();
                perm.extend((0..k).filter(|s| !prefix.contains(s)));
                return Some(perm);
            }
            Some(&pos) => {
                if let Some(perm) = first_missing(positions, k, prefix, pos + 1) {
                    return Some(perm);
                }
            }
        }
        prefix.pop();
    }
    None
}

/// Exact length of the shortest sequence over `k` symbols that contains all
/// `k!` permutations, for `k <= 4`.
///
/// Iterative deepening over candidate lengths. Candidates introduce new
/// symbols in increasing order (relabelling symmetry), never repeat a symbol
/// immediately (the second copy cannot advance any permutation), and are cut
/// when some permutation has more symbols left than the remaining length.
pub fn shortest_universal_length(k: usize) -> Result<usize, FactorizationError> {
    if k > MAX_EXACT_UNIVERSAL {
        return Err(FactorizationError::SearchTooLarge(k));
    }
    if k == 0 {
        return Ok(0);
    }
    let perms = permutations(k);
    let progress = vec![0u8; perms.len()];
    let mut length = k;
    loop {
        if universal_within(&perms, k, &progress, length, None, 0) {
            return Ok(length);
        }
        length += 1;
    }
}

fn permutations(k: usize) -> Vec<Vec<u8>> {
    fn build(k: usize, current: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
        if current.len() == k {
            out.push(current.clone());
            return;
        }
        for s in 0..k as u8 {
            if !current.contains(&s) {
                current.push(s);
                build(k, current, out);
                current.pop();
            }
        }
    }
    let mut out = Vec::new();
    build(k, &mut Vec::with_capacity(k), &mut out);
    out
}

fn universal_within(perms: &[Vec<u8>], k: usize, progress: &[u8], remaining: usize, last: Option<u8>, introduced: u8) -> bool {
    let worst = progress.iter().map(|&p| k - p as usize).max().unwrap_or(0);
    if worst == 0 {
        return true;
    }
    if worst > remaining {
        return false;
    }
    let limit = (introduced as usize + 1).min(k) as u8;
    for sym in 0..limit {
        if Some(sym) == last {
            continue;
        }
        let next: Vec<u8> = perms
            .iter()
            .zip(progress)
            .map(|(perm, &p)| if (p as usize) < k && perm[p as usize] == sym { p + 1 } else { p })
            .collect();
        let introduced = introduced.max(sym + 1);
        if universal_within(perms, k, &next, remaining - 1, Some(sym), introduced) {
            return true;
        }
    }
    false
}

/// Evaluates `length > k^2 - c_eps * k^(7/4 + eps)` exactly.
///
/// The power is irrational in general; the comparison is settled by raising
/// both sides to the denominator of the exponent, in big-integer arithmetic.
///
/// Panics unless `7/4 + eps > 0`; `k = 0` is treated as `0^(positive) = 0`.
pub fn kleitman_bound_holds(k: u64, length: u64, eps: Rational64, c_eps: Rational64) -> bool {
    let exponent = Rational64::new(7, 4) + eps;
    assert!(exponent.is_positive(), "exponent 7/4 + eps must be positive");
    let k_sq = BigInt::from(k) * BigInt::from(k);
    let gap = BigRational::from_integer(k_sq - BigInt::from(length));
    let c = BigRational::new(BigInt::from(*c_eps.numer()), BigInt::from(*c_eps.denom()));

    // length > k^2 - c * x  <=>  c * x > gap, where x = k^exponent >= 0.
    if c.is_zero() || k == 0 {
        return BigRational::zero() > gap;
    }
    let threshold = gap / &c;
    let a = (*exponent.numer()) as u32;
    let b = (*exponent.denom()) as u32;
    // x^b = k^a, so for r >= 0, x <=> r is decided by k^a <=> r^b.
    let compare_x_to = |r: &BigRational| -> Ordering {
        if r.is_negative() {
            return Ordering::Greater;
        }
        let lhs = num_traits::pow(BigInt::from(k), a as usize) * num_traits::pow(r.denom().clone(), b as usize);
        let rhs = num_traits::pow(r.numer().clone(), b as usize);
        lhs.cmp(&rhs)
    };
    if c.is_positive() {
        compare_x_to(&threshold) == Ordering::Greater
    } else {
        compare_x_to(&threshold) == Ordering::Less
    }
}

/// `1 - length / k^2`: how far `length` falls short of `k^2`, relative to it.
pub fn square_deficit(k: u64, length: u64) -> Rational64 {
    assert!(k > 0, "k must be positive");
    Rational64::one() - Rational64::new(length as i64, (k * k) as i64)
}

/// The simple source path `(s, x_1, y_1, x_2, y_2, ...)` through the given
/// edges `(x_i, y_i)`, joined by connector edges `(s, x_1), (y_1, x_2), ...`.
pub fn gadget_path(edges: &[Edge], g: &Digraph) -> Result<SimplePath, FactorizationError> {
    let s = g.source();
    for (i, &e) in edges.iter().enumerate() {
        if e.tail() == s || e.head() == s {
            return Err(FactorizationError::TouchesSource(e));
        }
        if let Some(&other) = edges[..i].iter().find(|&&other| other.touches(e)) {
            return Err(FactorizationError::IncidentEdges(other, e));
        }
    }
    let mut vertices = Vec::with_capacity(2 * edges.len() + 1);
    vertices.push(s);
    for e in edges {
        vertices.push(e.tail());
        vertices.push(e.head());
    }
    let path = SimplePath::new(vertices)?;
    path.check_rooted_in(g)?;
    Ok(path)
}

/// Lower-bound audit of one schedule against the matching family of its graph.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LowerBoundAudit {
    pub n: usize,
    pub family_size: usize,
    pub member_size: usize,
    pub per_member_lengths: Vec<usize>,
    pub all_universal: bool,
    /// Exact `c(member_size)` when it is within the exact search range.
    pub universal_length: Option<usize>,
    /// `family_size * universal_length`: no valid schedule is shorter.
    pub certified_lower_bound: Option<usize>,
    pub schedule_length: usize,
    /// `schedule_length / certified_lower_bound`.
    pub ratio: Option<f64>,
}

/// Extracts each family member's subsequence from `s` and checks it for
/// permutation universality.
///
/// `all_universal` must hold for every valid schedule; a valid schedule
/// with a non-universal member would contradict the gadget construction.
pub fn audit_lower_bound(s: &Schedule, g: &Digraph) -> Result<LowerBoundAudit, FactorizationError> {
    let family = build_family(g)?;
    let mut per_member_lengths = Vec::with_capacity(family.len());
    let mut all_universal = true;
    for member in family.members() {
        let sub = extract_subsequence(s, member);
        per_member_lengths.push(sub.len());
        all_universal &= contains_all_permutations(&sub)?.is_universal();
    }
    let member_size = family.member_size();
    let universal_length = shortest_universal_length(member_size).ok();
    let certified_lower_bound = universal_length.map(|c| c * family.len());
    Ok(LowerBoundAudit {
        n: g.vertex_count(),
        family_size: family.len(),
        member_size,
        per_member_lengths,
        all_universal,
        universal_length,
        certified_lower_bound,
        schedule_length: s.len(),
        ratio: certified_lower_bound.map(|b| s.len() as f64 / b as f64),
    })
}
