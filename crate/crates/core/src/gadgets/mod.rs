//! Weighted lower-bound gadgets `T_d(H)`, complete binary trees `B_d` and
//! complete `k`-ary trees, with exhaustive certification of deletion
//! lower bounds.

mod certify;

pub use certify::{lb_certify, lb_experiment, Certificate, ExperimentRow, Family, TABLE_HEADER};

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::graph::{write_weighted_graph, Graph, GraphError, Ratio, VertexSet, WeightFunction};
use crate::parameters::ParamError;
use crate::ratio::{format_ratio, int};

pub const DEFAULT_SIZE_CAP: usize = 50_000;
pub const MAX_BINARY_DEPTH: usize = 20;
pub const MAX_GADGET_DEPTH: usize = 4096;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GadgetError {
    #[error("gadget {name} would have {count} vertices, above the cap {cap}")]
    SizeCap { name: String, count: BigUint, cap: usize },
    #[error("binary tree depth {0} exceeds {MAX_BINARY_DEPTH}")]
    TooDeep(usize),
    #[error("gadget depth {0} exceeds {MAX_GADGET_DEPTH}")]
    GadgetTooDeep(usize),
    #[error("{0}")]
    BadParameter(String),
    #[error("search over {n} vertices exceeds the cap {cap}")]
    SearchCap { n: usize, cap: usize },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Param(#[from] ParamError),
}

/// The graph `H` of a gadget together with its weight function.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Inner {
    pub name: String,
    pub graph: Graph,
    pub weights: WeightFunction,
}

impl Inner {
    pub fn new(name: impl Into<String>, graph: Graph, weights: WeightFunction) -> Result<Self, GadgetError> {
        if weights.len() != graph.n() || graph.n() == 0 || weights.total().is_zero() {
            return Err(GadgetError::BadParameter("inner weights must be nonzero, one per vertex".into()));
        }
        Ok(Inner { name: name.into(), graph, weights })
    }

    /// `P_k` with `p_k`, all weights 1.
    pub fn path(k: usize) -> Result<Self, GadgetError> {
        Inner::new(format!("P{k}"), crate::graph::generate::path(k), WeightFunction::uniform(k))
    }

    /// `kK_1` with unit weights.
    pub fn edgeless(k: usize) -> Result<Self, GadgetError> {
        Inner::new(format!("{k}K1"), Graph::new(k), WeightFunction::uniform(k))
    }

    /// `B_k` with `t_k`.
    pub fn binary(k: usize) -> Result<Self, GadgetError> {
        let b = build_binary_tree(k)?;
        Inner::new(format!("B{k}"), b.graph, b.weights)
    }

    /// Complete `arity`-ary tree of depth `k`, weight `arity^-depth`.
    pub fn tree(arity: usize, k: usize) -> Result<Self, GadgetError> {
        let t = build_kary_tree(arity, k, DEFAULT_SIZE_CAP)?;
        Inner::new(format!("T{arity}ary{k}"), t.graph, t.weights)
    }
}

/// A weighted gadget; vertex 0 is the handle and every jug is a contiguous
/// id range starting at its handle.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GadgetGraph {
    pub name: String,
    pub graph: Graph,
    pub handle: usize,
    /// End (exclusive) of the jug of each vertex.
    pub jug_end: Vec<usize>,
    /// `i` such that the vertex is the handle of a copy of `T_i`.
    pub level: Vec<usize>,
    pub weights: WeightFunction,
}

impl GadgetGraph {
    pub fn jug(&self, v: usize) -> VertexSet {
        VertexSet::from_sorted((v..self.jug_end[v]).collect()).unwrap()
    }

    /// Neighbors of `v` inside its jug.
    pub fn jug_neighbors(&self, v: usize) -> Vec<usize> {
        self.graph.neighbors(v).iter().copied().filter(|&u| u > v && u < self.jug_end[v]).collect()
    }

    /// Checks `Σ_{u ∈ N_J(x)} w(u) = w(x)` for every `x` of level at least 1.
    pub fn check_weight_recursion(&self) -> Result<(), String> {
        for x in 0..self.graph.n() {
            if self.level[x] == 0 {
                continue;
            }
            let sum: Ratio = self.jug_neighbors(x).iter().map(|&u| self.weights.get(u).clone()).sum();
            if &sum != self.weights.get(x) {
                return Err(format!("jug neighbors of {x} weigh {sum}, not {}", self.weights.get(x)));
            }
        }
        Ok(())
    }

    /// Graph file with a weight section and the handle in a comment.
    pub fn to_file(&self) -> String {
        format!("# {} handle {}\n{}", self.name, self.handle, write_weighted_graph(&self.graph, Some(&self.weights)))
    }
}

/// `|V(T_d(H))|` for `|V(H)| = h`.
pub fn td_gadget_order(h: usize, d: usize) -> BigUint {
    (0..d).fold(BigUint::one(), |n, _| BigUint::one() + BigUint::from(h) * n)
}

struct Builder {
    edges: Vec<(usize, usize)>,
    weights: Vec<Ratio>,
    jug_end: Vec<usize>,
    level: Vec<usize>,
}

impl Builder {
    fn vertex(&mut self, w: Ratio, level: usize) -> usize {
        self.weights.push(w);
        self.jug_end.push(0);
        self.level.push(level);
        self.weights.len() - 1
    }

    fn td(&mut self, h: &Inner, share: &[Ratio], d: usize, scale: Ratio) -> usize {
        let v = self.vertex(scale.clone(), d);
        if d > 0 {
            let xs: Vec<usize> = share.iter().map(|s| self.td(h, share, d - 1, &scale * s)).collect();
            for (a, b) in h.graph.edges() {
                self.edges.push((xs[a], xs[b]));
            }
            for &x in &xs {
                self.edges.push((v, x));
            }
        }
        self.jug_end[v] = self.weights.len();
        v
    }

    fn finish(self, name: String) -> GadgetGraph {
        let n = self.weights.len();
        GadgetGraph {
            name,
            graph: Graph::from_edges(n, &self.edges).expect("gadget edges are simple"),
            handle: 0,
            jug_end: self.jug_end,
            level: self.level,
            weights: WeightFunction::new(self.weights).expect("gadget weights are nonnegative"),
        }
    }
}

fn new_builder() -> Builder {
    Builder { edges: Vec::new(), weights: Vec::new(), jug_end: Vec::new(), level: Vec::new() }
}

fn check_cap(name: &str, count: BigUint, cap: usize) -> Result<(), GadgetError> {
    if count > BigUint::from(cap) {
        return Err(GadgetError::SizeCap { name: name.into(), count, cap });
    }
    Ok(())
}

/// `T_d(H)` with the weights `w_d`.
pub fn build_td_gadget(inner: &Inner, d: usize, cap: usize) -> Result<GadgetGraph, GadgetError> {
    let name = format!("T{d}({})", inner.name);
    if d > MAX_GADGET_DEPTH {
        return Err(GadgetError::GadgetTooDeep(d));
    }
    check_cap(&name, td_gadget_order(inner.graph.n(), d), cap)?;
    let total = inner.weights.total();
    let share: Vec<Ratio> = inner.weights.as_slice().iter().map(|w| w / &total).collect();
    let mut b = new_builder();
    b.td(inner, &share, d, int(1));
    Ok(b.finish(name))
}

/// Complete `arity`-ary tree of depth `d` in preorder, weight `arity^-depth`.
pub fn build_kary_tree(arity: usize, d: usize, cap: usize) -> Result<GadgetGraph, GadgetError> {
    if arity == 0 {
        return Err(GadgetError::BadParameter("arity must be positive".into()));
    }
    let name = format!("{arity}-ary tree of depth {d}");
    if d > MAX_GADGET_DEPTH {
        return Err(GadgetError::GadgetTooDeep(d));
    }
    let count: BigUint = (0..=d).map(|i| BigUint::from(arity).pow(i as u32)).sum();
    check_cap(&name, count, cap)?;
    fn grow(b: &mut Builder, arity: usize, d: usize, w: Ratio) -> usize {
        let v = b.vertex(w.clone(), d);
        if d > 0 {
            let child_w = w / int(arity as i64);
            for _ in 0..arity {
                let c = grow(b, arity, d - 1, child_w.clone());
                b.edges.push((v, c));
            }
        }
        b.jug_end[v] = b.weights.len();
        v
    }
    let mut b = new_builder();
    grow(&mut b, arity, d, int(1));
    Ok(b.finish(name))
}

/// `B_d` with `t_d`.
pub fn build_binary_tree(d: usize) -> Result<GadgetGraph, GadgetError> {
    if d > MAX_BINARY_DEPTH {
        return Err(GadgetError::TooDeep(d));
    }
    let mut g = build_kary_tree(2, d, usize::MAX)?;
    g.name = format!("B{d}");
    Ok(g)
}

/// Canonical string of the weighted rooted tree at `root`; two trees are
/// isomorphic as weighted rooted trees iff their strings agree.
pub fn rooted_tree_code(g: &Graph, w: &WeightFunction, root: usize) -> Option<String> {
    if g.m() + 1 != g.n() || !g.is_connected() {
        return None;
    }
    let parent = g.bfs_tree(root);
    let mut order = vec![root];
    let mut i = 0;
    while i < order.len() {
        let v = order[i];
        i += 1;
        order.extend(g.neighbors(v).iter().copied().filter(|&u| parent[u] == Some(v)));
    }
    let mut code: BTreeMap<usize, String> = BTreeMap::new();
    for &v in order.iter().rev() {
        let mut kids: Vec<String> =
            g.neighbors(v).iter().filter(|&&u| parent[u] == Some(v)).map(|u| code.remove(u).unwrap()).collect();
        kids.sort();
        code.insert(v, format!("({}{})", format_ratio(w.get(v)), kids.concat()));
    }
    code.remove(&root)
}
