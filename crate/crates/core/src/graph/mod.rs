//! Undirected simple graphs, vertex sets, BFS layering and the chordal
//! machinery shared by every decomposition pipeline.
//!
//! Vertices are `0..n`. Adjacency lists are kept sorted so that every
//! traversal visits neighbors in ascending id order, which is what makes the
//! constructions in this crate deterministic.

mod chordal;
mod embedding;
pub mod generate;
mod parse;

pub use chordal::{greedy_chordalize, is_perfect_elimination_ordering, mcs_ordering};
pub use embedding::{contract_into, faces, triangulate_embedded, Embedding};
pub use parse::{parse_graph, parse_ratio, parse_weighted_graph, write_graph, write_weighted_graph};

use std::collections::VecDeque;
use std::fmt;

use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type Ratio = BigRational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("line {line}: {msg}")]
    Malformed { line: usize, msg: String },
    #[error("vertex {vertex} out of range (n = {n})")]
    OutOfRange { vertex: usize, n: usize },
    #[error("duplicate edge {0}-{1}")]
    DuplicateEdge(usize, usize),
    #[error("loop at vertex {0}")]
    Loop(usize),
    #[error("invalid rotation system: {0}")]
    InvalidRotation(String),
    #[error("graph is disconnected")]
    Disconnected,
    #[error("graph has no embedding")]
    MissingEmbedding,
    #[error("cannot triangulate face {face:?} without a multi-edge")]
    ForcedMultiEdge { face: Vec<usize> },
    #[error("{0}")]
    Precondition(String),
}

/// Sorted, duplicate-free list of vertex ids.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexSet(Vec<usize>);

impl VertexSet {
    pub fn new() -> Self {
        VertexSet(Vec::new())
    }

    /// Builds a set from arbitrary ids, sorting and deduplicating.
    pub fn from_unsorted(mut ids: Vec<usize>) -> Self {
        ids.sort_unstable();
        ids.dedup();
        VertexSet(ids)
    }

    /// Accepts ids that are already strictly increasing.
    pub fn from_sorted(ids: Vec<usize>) -> Option<Self> {
        if ids.windows(2).all(|w| w[0] < w[1]) {
            Some(VertexSet(ids))
        } else {
            None
        }
    }

    pub fn range(n: usize) -> Self {
        VertexSet((0..n).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<usize> {
        self.0
    }

    pub fn union(&self, other: &VertexSet) -> VertexSet {
        let mut out = Vec::with_capacity(self.len() + other.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].cmp(&other.0[j]) {
                std::cmp::Ordering::Less => {
                    out.push(self.0[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(other.0[j]);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    out.push(self.0[i]);
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.0[i..]);
        out.extend_from_slice(&other.0[j..]);
        VertexSet(out)
    }

    pub fn intersection(&self, other: &VertexSet) -> VertexSet {
        VertexSet(self.iter().filter(|&v| other.contains(v)).collect())
    }

    pub fn difference(&self, other: &VertexSet) -> VertexSet {
        VertexSet(self.iter().filter(|&v| !other.contains(v)).collect())
    }

    pub fn is_subset(&self, other: &VertexSet) -> bool {
        self.iter().all(|v| other.contains(v))
    }

    pub fn is_disjoint(&self, other: &VertexSet) -> bool {
        self.iter().all(|v| !other.contains(v))
    }

    /// Boolean membership mask over `0..n`.
    pub fn mask(&self, n: usize) -> Vec<bool> {
        let mut m = vec![false; n];
        for v in self.iter() {
            m[v] = true;
        }
        m
    }
}

impl FromIterator<usize> for VertexSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        VertexSet::from_unsorted(iter.into_iter().collect())
    }
}

impl fmt::Display for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "}}")
    }
}

/// Non-negative exact weight per vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightFunction(Vec<Ratio>);

impl WeightFunction {
    pub fn new(weights: Vec<Ratio>) -> Result<Self, GraphError> {
        if let Some(v) = weights.iter().position(|w| w < &Ratio::zero()) {
            return Err(GraphError::Precondition(format!("negative weight at vertex {v}")));
        }
        Ok(WeightFunction(weights))
    }

    pub fn uniform(n: usize) -> Self {
        WeightFunction(vec![Ratio::from_integer(1.into()); n])
    }

    pub fn get(&self, v: usize) -> &Ratio {
        &self.0[v]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[Ratio] {
        &self.0
    }

    pub fn of(&self, set: &VertexSet) -> Ratio {
        set.iter().fold(Ratio::zero(), |acc, v| acc + &self.0[v])
    }

    pub fn total(&self) -> Ratio {
        self.0.iter().fold(Ratio::zero(), |acc, w| acc + w)
    }
}

/// Vertex order in which the earlier neighbors of each vertex induce a
/// clique (when the graph is chordal).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EliminationOrdering(pub Vec<usize>);

impl EliminationOrdering {
    pub fn positions(&self) -> Vec<usize> {
        let mut pos = vec![usize::MAX; self.0.len()];
        for (i, &v) in self.0.iter().enumerate() {
            pos[v] = i;
        }
        pos
    }

    pub fn first(&self) -> Option<usize> {
        self.0.first().copied()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    adj: Vec<Vec<usize>>,
    m: usize,
    embedding: Option<Embedding>,
}

impl Graph {
    pub fn new(n: usize) -> Self {
        Graph { adj: vec![Vec::new(); n], m: 0, embedding: None }
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        let mut g = Graph::new(n);
        for &(u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<(), GraphError> {
        let n = self.n();
        for x in [u, v] {
            if x >= n {
                return Err(GraphError::OutOfRange { vertex: x, n });
            }
        }
        if u == v {
            return Err(GraphError::Loop(u));
        }
        match self.adj[u].binary_search(&v) {
            Ok(_) => Err(GraphError::DuplicateEdge(u.min(v), u.max(v))),
            Err(pos) => {
                self.adj[u].insert(pos, v);
                let pos = self.adj[v].binary_search(&u).unwrap_err();
                self.adj[v].insert(pos, u);
                self.m += 1;
                Ok(())
            }
        }
    }

    pub fn remove_edge(&mut self, u: usize, v: usize) -> bool {
        match self.adj[u].binary_search(&v) {
            Ok(i) => {
                self.adj[u].remove(i);
                let j = self.adj[v].binary_search(&u).unwrap();
                self.adj[v].remove(j);
                self.m -= 1;
                true
            }
            Err(_) => false,
        }
    }

    /// Adds the edge unless it is already present; returns whether it was new.
    pub fn ensure_edge(&mut self, u: usize, v: usize) -> bool {
        if u == v || self.has_edge(u, v) {
            return false;
        }
        self.add_edge(u, v).is_ok()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n() && self.adj[u].binary_search(&v).is_ok()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Edges as `(u, v)` with `u < v`, lexicographically sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.m);
        for (u, nb) in self.adj.iter().enumerate() {
            for &v in nb {
                if u < v {
                    out.push((u, v));
                }
            }
        }
        out
    }

    pub fn embedding(&self) -> Option<&Embedding> {
        self.embedding.as_ref()
    }

    /// Attaches a rotation system after validating it against this graph.
    pub fn set_embedding(&mut self, emb: Embedding) -> Result<(), GraphError> {
        emb.validate(self)?;
        self.embedding = Some(emb);
        Ok(())
    }

    pub fn clear_embedding(&mut self) {
        self.embedding = None;
    }

    pub fn is_clique(&self, set: &[usize]) -> bool {
        set.iter()
            .enumerate()
            .all(|(i, &u)| set[i + 1..].iter().all(|&v| self.has_edge(u, v)))
    }

    /// Induced subgraph on `set`; vertex `i` of the result is `set[i]`.
    pub fn induced(&self, set: &VertexSet) -> Graph {
        let mut local = vec![usize::MAX; self.n()];
        for (i, v) in set.iter().enumerate() {
            local[v] = i;
        }
        let mut adj = vec![Vec::new(); set.len()];
        let mut m = 0;
        for (i, v) in set.iter().enumerate() {
            for &w in &self.adj[v] {
                if local[w] != usize::MAX {
                    adj[i].push(local[w]);
                    if i < local[w] {
                        m += 1;
                    }
                }
            }
        }
        Graph { adj, m, embedding: None }
    }

    /// `G - removed` on the original vertex ids: removed vertices stay as
    /// isolated ids but are reported separately by callers via the mask.
    pub fn alive_mask(&self, removed: &VertexSet) -> Vec<bool> {
        let mut alive = vec![true; self.n()];
        for v in removed.iter() {
            alive[v] = false;
        }
        alive
    }

    /// Connected components of the subgraph induced by `alive`, each sorted,
    /// listed by smallest vertex.
    pub fn components_within(&self, alive: &[bool]) -> Vec<VertexSet> {
        let n = self.n();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        let mut queue = VecDeque::new();
        for s in 0..n {
            if !alive[s] || seen[s] {
                continue;
            }
            seen[s] = true;
            queue.push_back(s);
            let mut comp = Vec::new();
            while let Some(u) = queue.pop_front() {
                comp.push(u);
                for &w in &self.adj[u] {
                    if alive[w] && !seen[w] {
                        seen[w] = true;
                        queue.push_back(w);
                    }
                }
            }
            out.push(VertexSet::from_unsorted(comp));
        }
        out
    }

    pub fn components(&self) -> Vec<VertexSet> {
        self.components_within(&vec![true; self.n()])
    }

    pub fn is_connected(&self) -> bool {
        self.n() <= 1 || self.components().len() == 1
    }

    /// BFS distances from `src` inside the `alive` vertices (`usize::MAX` when
    /// unreachable).
    pub fn bfs_distances_within(&self, src: usize, alive: &[bool]) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.n()];
        let mut queue = VecDeque::new();
        dist[src] = 0;
        queue.push_back(src);
        while let Some(u) = queue.pop_front() {
            for &w in &self.adj[u] {
                if alive[w] && dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    pub fn bfs_distances(&self, src: usize) -> Vec<usize> {
        self.bfs_distances_within(src, &vec![true; self.n()])
    }

    /// BFS parent pointers from `src` (ties broken by ascending id since the
    /// queue is fed in sorted adjacency order).
    pub fn bfs_tree(&self, src: usize) -> Vec<Option<usize>> {
        let mut parent = vec![None; self.n()];
        let mut seen = vec![false; self.n()];
        let mut queue = VecDeque::new();
        seen[src] = true;
        queue.push_back(src);
        while let Some(u) = queue.pop_front() {
            for &w in &self.adj[u] {
                if !seen[w] {
                    seen[w] = true;
                    parent[w] = Some(u);
                    queue.push_back(w);
                }
            }
        }
        parent
    }

    /// Clique number of a chordal graph read off an elimination ordering.
    pub fn clique_number_along(&self, order: &EliminationOrdering) -> usize {
        let pos = order.positions();
        (0..self.n())
            .map(|v| 1 + self.adj[v].iter().filter(|&&w| pos[w] < pos[v]).count())
            .max()
            .unwrap_or(0)
    }
}

/// Distance layers `L_0 = {v}, L_1, ...` of a connected graph.
pub fn bfs_layers(g: &Graph, v: usize) -> Result<Vec<VertexSet>, GraphError> {
    if v >= g.n() {
        return Err(GraphError::OutOfRange { vertex: v, n: g.n() });
    }
    let dist = g.bfs_distances(v);
    if dist.contains(&usize::MAX) {
        return Err(GraphError::Disconnected);
    }
    Ok(layers_from_distances(&dist, None))
}

/// Groups vertices by distance; vertices with `usize::MAX` or masked out are
/// skipped.
pub fn layers_from_distances(dist: &[usize], alive: Option<&[bool]>) -> Vec<VertexSet> {
    let depth = dist.iter().filter(|&&d| d != usize::MAX).max().copied();
    let Some(depth) = depth else { return Vec::new() };
    let mut layers = vec![Vec::new(); depth + 1];
    for (v, &d) in dist.iter().enumerate() {
        if d != usize::MAX && alive.is_none_or(|a| a[v]) {
            layers[d].push(v);
        }
    }
    layers.into_iter().map(VertexSet).collect()
}
