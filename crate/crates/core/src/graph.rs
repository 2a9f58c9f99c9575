// SPDX-License-Identifier: Apache-2.0

//! Directed graphs, edges and simple paths.
//!
//! Vertices are dense indices in `[0, n)`. The source is vertex 0 unless a
//! graph is built with an explicit source. Graphs are simple: no loops and no
//! parallel edges. Edges are kept in lexicographic `(tail, head)` order, which
//! is also the order in which out-neighbours are visited during enumeration.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct VertexId(pub usize);

impl VertexId {
    #[inline]
    pub const fn index(self) -> usize {
        self.0
    }
}

impl From<usize> for VertexId {
    fn from(index: usize) -> Self {
        VertexId(index)
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A directed edge `(tail, head)` with `tail != head`.
///
/// The derived ordering is lexicographic by `(tail, head)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge {
    tail: VertexId,
    head: VertexId,
}

impl Edge {
    /// Builds the edge `(tail, head)`.
    ///
    /// Panics if `tail == head`; use [`Edge::try_new`] for unchecked input.
    pub fn new(tail: impl Into<VertexId>, head: impl Into<VertexId>) -> Self {
        match Self::try_new(tail, head) {
            Ok(edge) => edge,
            Err(err) => panic!("{err}"),
        }
    }

    pub fn try_new(tail: impl Into<VertexId>, head: impl Into<VertexId>) -> Result<Self, GraphError> {
        let (tail, head) = (tail.into(), head.into());
        if tail == head {
            return Err(GraphError::SelfLoop(tail));
        }
        Ok(Edge { tail, head })
    }

    #[inline]
    pub const fn tail(self) -> VertexId {
        self.tail
    }

    #[inline]
    pub const fn head(self) -> VertexId {
        self.head
    }

    pub const fn reversed(self) -> Edge {
        Edge { tail: self.head, head: self.tail }
    }

    /// True if the two edges share an endpoint.
    pub fn touches(self, other: Edge) -> bool {
        self.tail == other.tail || self.tail == other.head || self.head == other.tail || self.head == other.head
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.tail, self.head)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("a graph needs at least one vertex")]
    NoVertices,
    #[error("self-loop at vertex {0}")]
    SelfLoop(VertexId),
    #[error("vertex {vertex} is out of range for a graph on {n} vertices")]
    VertexOutOfRange { vertex: VertexId, n: usize },
    #[error("duplicate edge {0}")]
    DuplicateEdge(Edge),
    #[error("a path needs at least one vertex")]
    EmptyPath,
    #[error("vertex {0} occurs more than once in the path")]
    RepeatedVertex(VertexId),
    #[error("path starts at {found}, not at the source {root}")]
    NotRooted { found: VertexId, root: VertexId },
    #[error("path step {0} is not an edge of the graph")]
    MissingEdge(Edge),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// A simple directed graph with a distinguished source vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Digraph {
    n: usize,
    source: VertexId,
    edges: Vec<Edge>,
    // n * n table: slot[tail * n + head] = index into `edges`.
    slot: Vec<Option<u32>>,
    out: Vec<Vec<VertexId>>,
}

impl Digraph {
    /// Builds a graph on `n` vertices. Edge order in the input does not matter.
    pub fn new(n: usize, source: VertexId, edges: impl IntoIterator<Item = Edge>) -> Result<Self, GraphError> {
        if n == 0 {
            return Err(GraphError::NoVertices);
        }
        check_vertex(source, n)?;
        let mut edges: Vec<Edge> = edges.into_iter().collect();
        for edge in &edges {
            check_vertex(edge.tail, n)?;
            check_vertex(edge.head, n)?;
        }
        edges.sort_unstable();
        if let Some(pair) = edges.windows(2).find(|pair| pair[0] == pair[1]) {
            return Err(GraphError::DuplicateEdge(pair[0]));
        }

        let mut slot = vec![None; n * n];
        let mut out = vec![Vec::new(); n];
        for (i, edge) in edges.iter().enumerate() {
            slot[edge.tail.0 * n + edge.head.0] = Some(i as u32);
            out[edge.tail.0].push(edge.head);
        }
        Ok(Digraph { n, source, edges, slot, out })
    }

    /// The complete digraph on `n` vertices with source 0.
    pub fn complete(n: usize) -> Result<Self, GraphError> {
        let edges = (0..n).flat_map(|u| (0..n).filter(move |&v| v != u).map(move |v| Edge::new(u, v)));
        Digraph::new(n, VertexId(0), edges)
    }

    #[inline]
    pub fn vertex_count(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    #[inline]
    pub fn source(&self) -> VertexId {
        self.source
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        (0..self.n).map(VertexId)
    }

    /// All edges in lexicographic order.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Out-neighbours of `v` in ascending index order.
    pub fn out_neighbors(&self, v: VertexId) -> &[VertexId] {
        &self.out[v.0]
    }

    pub fn has_edge(&self, edge: Edge) -> bool {
        self.edge_index(edge).is_some()
    }

    /// Position of `edge` in [`Digraph::edges`].
    pub fn edge_index(&self, edge: Edge) -> Option<usize> {
        if edge.tail.0 >= self.n || edge.head.0 >= self.n {
            return None;
        }
        self.slot[edge.tail.0 * self.n + edge.head.0].map(|i| i as usize)
    }

    pub fn is_complete(&self) -> bool {
        self.edges.len() == self.n * (self.n - 1)
    }

    /// Parses the line format
    ///
    /// ```text
    /// n <count> source <index>
    /// <u> <v>
    /// ...
    /// ```
    ///
    /// or the single line `complete <n>`. Blank lines and `#` comments are
    /// ignored.
    pub fn from_text(text: &str) -> Result<Self, GraphError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, line)| (i + 1, strip_comment(line)))
            .filter(|(_, line)| !line.is_empty());

        let (header_line, header) = lines.next().ok_or(GraphError::Parse {
            line: 1,
            message: "missing header".to_string(),
        })?;
        let words: Vec<&str> = header.split_whitespace().collect();
        match words.as_slice() {
            ["complete", n] => {
                let n = parse_index(n, header_line)?;
                if let Some((line, _)) = lines.next() {
                    return Err(GraphError::Parse {
                        line,
                        message: "a `complete` declaration takes no edge lines".to_string(),
                    });
                }
                Digraph::complete(n)
            }
            ["n", n, "source", source] => {
                let n = parse_index(n, header_line)?;
                let source = VertexId(parse_index(source, header_line)?);
                let mut edges = Vec::new();
                for (line, body) in lines {
                    let (u, v) = parse_pair(body, line)?;
                    edges.push(Edge::try_new(u, v)?);
                }
                Digraph::new(n, source, edges)
            }
            _ => Err(GraphError::Parse {
                line: header_line,
                message: format!("expected `n <count> source <index>` or `complete <n>`, found `{header}`"),
            }),
        }
    }

    /// Writes the format read by [`Digraph::from_text`]. Complete graphs
    /// rooted at 0 use the one-line form.
    pub fn to_text(&self) -> String {
        if self.is_complete() && self.source.0 == 0 {
            return format!("complete {}\n", self.n);
        }
        let mut text = format!("n {} source {}\n", self.n, self.source);
        for edge in &self.edges {
            text.push_str(&format!("{} {}\n", edge.tail, edge.head));
        }
        text
    }
}

fn check_vertex(v: VertexId, n: usize) -> Result<(), GraphError> {
    if v.0 >= n {
        Err(GraphError::VertexOutOfRange { vertex: v, n })
    } else {
        Ok(())
    }
}

pub(crate) fn strip_comment(line: &str) -> &str {
    line.split('#').next().unwrap_or("").trim()
}

fn parse_index(word: &str, line: usize) -> Result<usize, GraphError> {
    word.parse().map_err(|_| GraphError::Parse {
        line,
        message: format!("`{word}` is not a vertex index"),
    })
}

/// Parses a `u v` line.
pub(crate) fn parse_pair(body: &str, line: usize) -> Result<(usize, usize), GraphError> {
    let words: Vec<&str> = body.split_whitespace().collect();
    match words.as_slice() {
        [u, v] => Ok((parse_index(u, line)?, parse_index(v, line)?)),
        _ => Err(GraphError::Parse {
            line,
            message: format!("expected `u v`, found `{body}`"),
        }),
    }
}

/// A path without repeated vertices. A path with `k + 1` vertices has `k`
/// edges and is called a k-path when it starts at the source.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SimplePath {
    vertices: Vec<VertexId>,
}

impl SimplePath {
    pub fn new(vertices: Vec<VertexId>) -> Result<Self, GraphError> {
        if vertices.is_empty() {
            return Err(GraphError::EmptyPath);
        }
        let mut sorted = vertices.clone();
        sorted.sort_unstable();
        if let Some(pair) = sorted.windows(2).find(|pair| pair[0] == pair[1]) {
            return Err(GraphError::RepeatedVertex(pair[0]));
        }
        Ok(SimplePath { vertices })
    }

    pub fn from_indices(indices: &[usize]) -> Result<Self, GraphError> {
        SimplePath::new(indices.iter().copied().map(VertexId).collect())
    }

    /// The zero-edge path consisting of `v` alone.
    pub fn trivial(v: VertexId) -> Self {
        SimplePath { vertices: vec![v] }
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.vertices
    }

    pub fn indices(&self) -> Vec<usize> {
        self.vertices.iter().map(|v| v.0).collect()
    }

    pub fn first(&self) -> VertexId {
        self.vertices[0]
    }

    pub fn last(&self) -> VertexId {
        self.vertices[self.vertices.len() - 1]
    }

    /// Number of edges, i.e. `k` for a k-path.
    pub fn edge_count(&self) -> usize {
        self.vertices.len() - 1
    }

    /// Consecutive-pair edges in path order.
    pub fn edges(&self) -> impl ExactSizeIterator<Item = Edge> + '_ {
        self.vertices.windows(2).map(|pair| Edge { tail: pair[0], head: pair[1] })
    }

    /// Checks that the path starts at the source of `g` and walks along
    /// edges of `g`.
    pub fn check_rooted_in(&self, g: &Digraph) -> Result<(), GraphError> {
        if self.first() != g.source() {
            return Err(GraphError::NotRooted { found: self.first(), root: g.source() });
        }
        for &v in &self.vertices {
            check_vertex(v, g.vertex_count())?;
        }
        match self.edges().find(|&e| !g.has_edge(e)) {
            Some(e) => Err(GraphError::MissingEdge(e)),
            None => Ok(()),
        }
    }
}

impl fmt::Display for SimplePath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, v) in self.vertices.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{v}")?;
        }
        f.write_str(")")
    }
}

/// Lazily yields every simple path from the source of `g` with exactly `k`
/// edges, each once, in lexicographic order of vertex sequences.
///
/// `k > n - 1` yields nothing.
pub fn enumerate_k_paths(g: &Digraph, k: usize) -> KPaths<'_> {
    let mut on_path = vec![false; g.vertex_count()];
    on_path[g.source().0] = true;
    KPaths {
        graph: g,
        k,
        path: vec![g.source()],
        next_neighbor: vec![0],
        on_path,
        state: if k >= g.vertex_count() { EnumState::Done } else { EnumState::Fresh },
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum EnumState {
    Fresh,
    Running,
    Done,
}

/// Iterator returned by [`enumerate_k_paths`].
#[derive(Debug, Clone)]
pub struct KPaths<'g> {
    graph: &'g Digraph,
    k: usize,
    path: Vec<VertexId>,
    next_neighbor: Vec<usize>,
    on_path: Vec<bool>,
    state: EnumState,
}

impl KPaths<'_> {
    fn pop(&mut self) {
        if let Some(v) = self.path.pop() {
            self.on_path[v.0] = false;
            self.next_neighbor.pop();
        }
    }
}

impl Iterator for KPaths<'_> {
    type Item = SimplePath;

    fn next(&mut self) -> Option<SimplePath> {
        match self.state {
            EnumState::Done => return None,
            EnumState::Fresh if self.k == 0 => {
                self.state = EnumState::Done;
                return Some(SimplePath::trivial(self.graph.source()));
            }
            EnumState::Fresh => self.state = EnumState::Running,
            EnumState::Running => {
                // The previous call yielded a full path; drop its endpoint.
                self.pop();
            }
        }

        loop {
            let Some(&tail) = self.path.last() else {
                self.state = EnumState::Done;
                return None;
            };
            let depth = self.path.len() - 1;
            let neighbors = self.graph.out_neighbors(tail);
            let mut extended = false;
            while self.next_neighbor[depth] < neighbors.len() {
                let head = neighbors[self.next_neighbor[depth]];
                self.next_neighbor[depth] += 1;
                if !self.on_path[head.0] {
                    self.path.push(head);
                    self.on_path[head.0] = true;
                    self.next_neighbor.push(0);
                    extended = true;
                    break;
                }
            }
            if !extended {
                self.pop();
                continue;
            }
            if self.path.len() == self.k + 1 {
                debug_assert!(SimplePath::new(self.path.clone()).is_ok());
                return Some(SimplePath { vertices: self.path.clone() });
            }
        }
    }
}
