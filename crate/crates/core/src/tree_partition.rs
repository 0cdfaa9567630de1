//! Rooted tree partitions of bounded-treewidth, bounded-degree graphs, their
//! depth-a order, and the resulting star-fragility distributions.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use std::collections::BTreeMap;

use crate::graph::{Graph, GraphError, Ratio, VertexSet};
use crate::parameters::{exact_treewidth, star_without, treewidth_upper, verify_tree_decomposition, TreeDecompositionWitness};
use crate::separators::{normalize_split, split_loop, verify_split, SepError};
use crate::td_frag::{planar_tw_layering, TdFragError};
use crate::thin::{compose, inv, uniform_on_disjoint, ThinDistribution, ThinError, EXPLICIT_LIMIT};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TpError {
    #[error("graph is not connected")]
    Disconnected,
    #[error("maximum degree {actual} exceeds {delta}")]
    DegreeExceeded { actual: usize, delta: usize },
    #[error("{0}")]
    BadParameter(String),
    #[error("tree decomposition is not valid for the graph")]
    InvalidWitness,
    #[error("no tree decomposition of width below {k} found (best {width})")]
    WidthExceeded { k: usize, width: usize },
    #[error(transparent)]
    Split(#[from] SepError),
    #[error("tree partition invalid: {0}")]
    Invalid(String),
    #[error("star bound violated: component of order {order} exceeds {bound}")]
    StarBound { order: usize, bound: usize },
    #[error(transparent)]
    Thin(#[from] ThinError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Layering(#[from] TdFragError),
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct TpNode {
    pub parent: Option<usize>,
    pub beta: VertexSet,
    pub sigma: VertexSet,
    pub gamma: VertexSet,
    pub kappa: VertexSet,
    pub branching: bool,
}

/// Nodes are stored parents first; node 0 is the root.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootedTreePartition {
    pub nodes: Vec<TpNode>,
    pub delta: usize,
    pub k: usize,
    pub b: usize,
    pub s: usize,
}

impl RootedTreePartition {
    /// Partition without construction bookkeeping.
    pub fn from_parts(parent: Vec<Option<usize>>, beta: Vec<VertexSet>) -> Self {
        let nodes = parent.into_iter().zip(beta).map(|(parent, beta)| TpNode { parent, beta, ..TpNode::default() }).collect();
        RootedTreePartition { nodes, delta: 0, k: 0, b: 0, s: 0 }
    }

    pub fn depths(&self) -> Vec<usize> {
        let mut depth = vec![0; self.nodes.len()];
        for (i, node) in self.nodes.iter().enumerate() {
            if let Some(p) = node.parent {
                depth[i] = depth[p] + 1;
            }
        }
        depth
    }

    fn children(&self) -> Vec<Vec<usize>> {
        let mut ch = vec![Vec::new(); self.nodes.len()];
        for (i, node) in self.nodes.iter().enumerate() {
            if let Some(p) = node.parent {
                ch[p].push(i);
            }
        }
        ch
    }

    pub fn to_file(&self) -> TreePartitionFile {
        TreePartitionFile {
            nodes: self.nodes.len(),
            parent: self.nodes.iter().map(|x| x.parent).collect(),
            beta: self.nodes.iter().map(|x| x.beta.clone()).collect(),
            kappa: self.nodes.iter().map(|x| x.kappa.clone()).collect(),
            branching: self.nodes.iter().map(|x| x.branching).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreePartitionFile {
    pub nodes: usize,
    pub parent: Vec<Option<usize>>,
    pub beta: Vec<VertexSet>,
    pub kappa: Vec<VertexSet>,
    pub branching: Vec<bool>,
}

impl TreePartitionFile {
    pub fn to_partition(&self) -> Result<RootedTreePartition, TpError> {
        let n = self.nodes;
        if [self.parent.len(), self.beta.len(), self.kappa.len(), self.branching.len()].iter().any(|&l| l != n) {
            return Err(TpError::Invalid("field lengths differ from node count".into()));
        }
        if self.parent.iter().enumerate().any(|(i, p)| p.map_or(i != 0, |p| p >= i)) {
            return Err(TpError::Invalid("parents must precede children and node 0 must be the only root".into()));
        }
        let mut tp = RootedTreePartition::from_parts(self.parent.clone(), self.beta.clone());
        for (node, (kappa, &br)) in tp.nodes.iter_mut().zip(self.kappa.iter().zip(&self.branching)) {
            node.kappa = kappa.clone();
            node.branching = br;
        }
        Ok(tp)
    }
}

fn pow(base: usize, e: usize) -> usize {
    base.saturating_pow(e as u32)
}

/// Partition and edge conditions only.
pub fn verify_tree_partition(g: &Graph, tp: &RootedTreePartition) -> Result<(), TpError> {
    let bad = |m: String| Err(TpError::Invalid(m));
    let mut owner = vec![usize::MAX; g.n()];
    for (i, node) in tp.nodes.iter().enumerate() {
        if let Some(p) = node.parent {
            if p >= i {
                return bad(format!("node {i} precedes its parent"));
            }
        } else if i != 0 {
            return bad(format!("node {i} is a second root"));
        }
        for v in node.beta.iter() {
            if v >= g.n() {
                return bad(format!("vertex {v} out of range"));
            }
            if owner[v] != usize::MAX {
                return bad(format!("vertex {v} lies in two bags"));
            }
            owner[v] = i;
        }
    }
    if let Some(v) = owner.iter().position(|&o| o == usize::MAX) {
        return bad(format!("vertex {v} lies in no bag"));
    }
    for (u, v) in g.edges() {
        let (x, y) = (owner[u], owner[v]);
        if x != y && tp.nodes[x].parent != Some(y) && tp.nodes[y].parent != Some(x) {
            return bad(format!("edge {u}-{v} joins non-adjacent nodes {x} and {y}"));
        }
    }
    Ok(())
}

/// Partition and edge conditions plus every bookkeeping invariant of the
/// construction: boundary sizes, boundary degrees, branching fan-out, core
/// sizes and the depth gap between nested branching nodes.
pub fn verify_goodtp(g: &Graph, tp: &RootedTreePartition) -> Result<(), TpError> {
    verify_tree_partition(g, tp)?;
    let bad = |m: String| Err(TpError::Invalid(m));
    let d1 = tp.delta.saturating_sub(1);
    let gamma_cap = pow(d1, tp.b.saturating_sub(1)).saturating_mul(tp.s);
    let p = pow(d1, tp.b);
    let children = tp.children();
    let depth = tp.depths();
    // β of each subtree, to check σ
    let mut below: Vec<VertexSet> = tp.nodes.iter().map(|x| x.beta.clone()).collect();
    for i in (1..tp.nodes.len()).rev() {
        let p = tp.nodes[i].parent.unwrap();
        below[p] = below[p].union(&below[i]);
    }
    for (i, node) in tp.nodes.iter().enumerate() {
        if !node.kappa.is_subset(&node.beta) {
            return bad(format!("core of node {i} is not inside its bag"));
        }
        if let Some(z) = node.parent {
            if node.sigma != below[i] {
                return bad(format!("σ of node {i} is not the union of its subtree"));
            }
            if !node.gamma.is_subset(&tp.nodes[z].beta) {
                return bad(format!("γ of node {i} is not inside the parent bag"));
            }
            if node.gamma.len() > gamma_cap {
                return bad(format!("|γ| = {} at node {i} exceeds {gamma_cap}", node.gamma.len()));
            }
            for x in node.gamma.iter() {
                let inside = g.neighbors(x).iter().filter(|&&u| node.sigma.contains(u)).count();
                if inside > d1 {
                    return bad(format!("vertex {x} of γ({i}) has {inside} neighbors in σ"));
                }
            }
            for x in node.sigma.iter() {
                if let Some(&u) = g.neighbors(x).iter().find(|&&u| !node.sigma.contains(u) && !node.gamma.contains(u)) {
                    return bad(format!("neighbor {u} of σ({i}) lies outside σ ∪ γ"));
                }
            }
        }
        if node.branching {
            if children[i].len() >= 6 * p {
                return bad(format!("branching node {i} has {} children", children[i].len()));
            }
            if node.kappa.len() >= 6 * p * tp.k {
                return bad(format!("branching node {i} has core of size {}", node.kappa.len()));
            }
            let mut up = node.parent;
            while let Some(x) = up {
                if tp.nodes[x].branching && depth[i] - depth[x] < tp.b {
                    return bad(format!("branching nodes {x} and {i} are closer than {}", tp.b));
                }
                up = tp.nodes[x].parent;
            }
        } else if !node.kappa.is_empty() {
            return bad(format!("non-branching node {i} has a core"));
        }
    }
    Ok(())
}

/// The construction for connected `g` with a decomposition of width below `k`
/// and maximum degree at most `delta`: the root bag is the least edge, a node
/// takes the vertices `W` of `σ` adjacent to `γ` when `W` is small and
/// otherwise splits `G[σ]` around `W`.
pub fn build_goodtp(
    g: &Graph,
    td: &TreeDecompositionWitness,
    k: usize,
    delta: usize,
    a: usize,
    b: usize,
) -> Result<RootedTreePartition, TpError> {
    if delta < 3 {
        return Err(TpError::BadParameter("delta must be at least 3".into()));
    }
    if b == 0 || b > a {
        return Err(TpError::BadParameter(format!("need 1 <= b <= a, got b = {b}, a = {a}")));
    }
    if g.max_degree() > delta {
        return Err(TpError::DegreeExceeded { actual: g.max_degree(), delta });
    }
    if !g.is_connected() {
        return Err(TpError::Disconnected);
    }
    if td.width >= k {
        return Err(TpError::WidthExceeded { k, width: td.width });
    }
    if !verify_tree_decomposition(g, td) {
        return Err(TpError::InvalidWitness);
    }
    let s = 12 * k;
    let mut tp = RootedTreePartition { nodes: Vec::new(), delta, k, b, s };
    let n = g.n();
    if n < 3 {
        tp.nodes.push(TpNode { beta: VertexSet::range(n), ..TpNode::default() });
        return Ok(tp);
    }
    let (u, v) = g.edges().into_iter().min().unwrap();
    let root: VertexSet = [u, v].into_iter().collect();
    tp.nodes.push(TpNode { beta: root.clone(), ..TpNode::default() });
    let d1 = delta - 1;
    let small = pow(d1, b - 1).saturating_mul(s);
    let p = pow(d1, b);
    let mut queue = std::collections::VecDeque::new();
    queue.push_back((0usize, VertexSet::range(n).difference(&root), root));
    while let Some((parent, sigma, gamma)) = queue.pop_front() {
        let id = tp.nodes.len();
        let in_gamma = gamma.mask(n);
        let w: VertexSet = sigma.iter().filter(|&x| g.neighbors(x).iter().any(|&y| in_gamma[y])).collect();
        if w.len() <= small {
            let rest = sigma.difference(&w);
            tp.nodes.push(TpNode { parent: Some(parent), beta: w.clone(), sigma, gamma, ..TpNode::default() });
            if !rest.is_empty() {
                queue.push_back((id, rest, w));
            }
            continue;
        }
        if w.len() > p.saturating_mul(s) {
            return Err(TpError::Invalid(format!("|W| = {} exceeds (Δ-1)^b·s at node {id}", w.len())));
        }
        let h = g.induced(&sigma);
        let local = |x: usize| sigma.as_slice().binary_search(&x).unwrap();
        let lift = |set: &VertexSet| -> VertexSet { set.iter().map(|x| sigma.as_slice()[x]).collect() };
        let local_w: VertexSet = w.iter().map(local).collect();
        let split = split_loop(&h, &td.restrict_to(&sigma), &local_w, s, k, p);
        let split = normalize_split(&split, &h, &local_w);
        verify_split(&h, &local_w, &split)?;
        let c = lift(&split.c);
        let beta = w.union(&c);
        let in_beta = beta.mask(n);
        let parts: Vec<VertexSet> = split.parts.iter().map(lift).collect();
        tp.nodes.push(TpNode { parent: Some(parent), beta: beta.clone(), sigma, gamma, kappa: c, branching: true });
        for e in parts {
            let in_e = e.mask(n);
            let boundary: VertexSet = beta.iter().filter(|&x| g.neighbors(x).iter().any(|&y| in_e[y])).collect();
            debug_assert!(boundary.iter().all(|x| in_beta[x]));
            queue.push_back((id, e, boundary));
        }
    }
    verify_goodtp(g, &tp)?;
    Ok(tp)
}

/// Largest `|β(S)|` over subtrees `S` of depth at most `a - 2`; 0 for `a = 1`.
pub fn depth_a_order(tp: &RootedTreePartition, a: usize) -> usize {
    if a < 2 || tp.nodes.is_empty() {
        return 0;
    }
    let children = tp.children();
    let mut f: Vec<usize> = tp.nodes.iter().map(|x| x.beta.len()).collect();
    for _ in 0..a - 2 {
        f = (0..tp.nodes.len()).map(|i| tp.nodes[i].beta.len() + children[i].iter().map(|&c| f[c]).sum::<usize>()).collect();
    }
    f.into_iter().max().unwrap_or(0)
}

/// Classes `X_i`: union of the bags at depth `≡ i (mod a)`.
pub fn depth_classes(tp: &RootedTreePartition, a: usize) -> Vec<VertexSet> {
    let depth = tp.depths();
    (0..a)
        .map(|i| {
            VertexSet::from_unsorted(
                tp.nodes.iter().enumerate().filter(|(x, _)| depth[*x] % a == i).flat_map(|(_, node)| node.beta.iter()).collect(),
            )
        })
        .collect()
}

/// Uniform distribution on the depth classes, with every class checked to
/// leave components of order at most the depth-a order.
pub fn tp_to_distribution(g: &Graph, tp: &RootedTreePartition, a: usize) -> Result<(ThinDistribution, usize), TpError> {
    if a == 0 {
        return Err(TpError::BadParameter("a must be positive".into()));
    }
    let bound = depth_a_order(tp, a);
    let classes = depth_classes(tp, a);
    for x in &classes {
        let order = star_without(g, x);
        if order > bound {
            return Err(TpError::StarBound { order, bound });
        }
    }
    Ok((uniform_on_disjoint(&classes, a)?, bound))
}

/// Largest integer `r` with `r^b <= x`.
fn floor_root(x: &BigUint, b: usize) -> BigUint {
    let (mut lo, mut hi) = (BigUint::zero(), BigUint::one());
    while hi.pow(b as u32) <= *x {
        hi <<= 1;
    }
    while &lo + 1u32 < hi {
        let mid: BigUint = (&lo + &hi) >> 1;
        if mid.pow(b as u32) <= *x {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// `12k(Δ-1)^a((Δ-1)^(b-1) + 6^(a/b))`, rounded down when `b` does not divide `a`.
pub fn goodtp_bound(k: usize, delta: usize, a: usize, b: usize) -> BigUint {
    assert!(delta >= 2 && b >= 1);
    let d1 = BigUint::from(delta - 1);
    let c = BigUint::from(12 * k) * d1.pow(a as u32);
    let first = &c * d1.pow(b as u32 - 1);
    let second = floor_root(&(c.pow(b as u32) * BigUint::from(6u32).pow(a as u32)), b);
    first + second
}

/// `b` balancing the two terms of the bound, clamped to `[1, a]`.
pub fn choose_b(delta: usize, a: usize) -> usize {
    if delta <= 2 {
        return a.max(1);
    }
    let raw = (a as f64 * 6f64.ln() / ((delta - 1) as f64).ln()).sqrt().round() as usize;
    raw.clamp(1, a.max(1))
}

#[derive(Clone, Debug)]
pub struct StarFragility {
    pub distribution: ThinDistribution,
    pub bound: BigUint,
    pub b: usize,
    /// Largest depth-a order over the component partitions.
    pub order: usize,
    pub partitions: Vec<(VertexSet, RootedTreePartition)>,
}

/// Decomposition of width below `k` for every component, from the min-fill
/// heuristic or, for small components, exactly.
pub fn decomposition_below(g: &Graph, k: usize) -> Result<TreeDecompositionWitness, TpError> {
    let (width, td) = treewidth_upper(g);
    if width < k {
        return Ok(td);
    }
    match exact_treewidth(g) {
        Some((w, td)) if w < k => Ok(td),
        _ => Err(TpError::WidthExceeded { k, width }),
    }
}

/// Star-fragility distribution at `a` for a graph of treewidth below `k`
/// and maximum degree at most `delta`, with `b` from `choose_b`.
pub fn star_fragile_tw(g: &Graph, k: usize, delta: usize, a: usize) -> Result<StarFragility, TpError> {
    star_fragile_tw_with(g, k, delta, a, choose_b(delta, a))
}

/// As `star_fragile_tw` with a given `b`. Components are partitioned
/// separately and their classes of equal index are merged.
pub fn star_fragile_tw_with(g: &Graph, k: usize, delta: usize, a: usize, b: usize) -> Result<StarFragility, TpError> {
    star_fragile_tw_from(g, None, k, delta, a, b)
}

/// As `star_fragile_tw_with`, starting from a decomposition of `g` of width
/// below `k` when one is given.
pub fn star_fragile_tw_from(
    g: &Graph,
    td: Option<&TreeDecompositionWitness>,
    k: usize,
    delta: usize,
    a: usize,
    b: usize,
) -> Result<StarFragility, TpError> {
    if a == 0 {
        return Err(TpError::BadParameter("a must be positive".into()));
    }
    let bound = goodtp_bound(k, delta, a, b);
    let mut classes = vec![Vec::new(); a];
    let mut order = 0;
    let mut partitions = Vec::new();
    for comp in g.components() {
        let h = g.induced(&comp);
        let td = match td {
            Some(td) => td.restrict_to(&comp),
            None => decomposition_below(&h, k)?,
        };
        let tp = build_goodtp(&h, &td, k, delta, a, b)?;
        order = order.max(depth_a_order(&tp, a));
        for (i, x) in depth_classes(&tp, a).into_iter().enumerate() {
            classes[i].extend(x.iter().map(|v| comp.as_slice()[v]));
        }
        partitions.push((comp, tp));
    }
    if BigUint::from(order) > bound {
        return Err(TpError::Invalid(format!("depth-{a} order {order} exceeds the bound {bound}")));
    }
    let classes: Vec<VertexSet> = classes.into_iter().map(VertexSet::from_unsorted).collect();
    for x in &classes {
        let worst = star_without(g, x);
        if worst > order {
            return Err(TpError::StarBound { order: worst, bound: order });
        }
    }
    Ok(StarFragility { distribution: uniform_on_disjoint(&classes, a)?, bound, b, order, partitions })
}

/// Outer and inner rates: `a' = ⌈2^√a⌉` doubled until `1/a' + 1/a'' < 1/a`,
/// with `a'' = a + 1`.
pub fn planar_rates(a: usize) -> (usize, usize) {
    let inner = a + 1;
    let mut outer = 2f64.powf((a as f64).sqrt()).ceil() as usize;
    while inv(outer) + inv(inner) >= inv(a) {
        outer *= 2;
    }
    (outer, inner)
}

#[derive(Clone, Debug)]
pub struct PlanarStarFragility {
    pub distribution: ThinDistribution,
    pub bound: BigUint,
    pub outer: usize,
    pub inner: usize,
    pub b: usize,
    /// `1/a' + 1/a''`.
    pub certificate: Ratio,
}

/// Star-fragility of an embedded planar graph: a layering class `X` at rate
/// `a'` leaves treewidth below `k = 3a' - 2`, and `G - X` is partitioned at
/// rate `a''`. The result draws `X` and then a class of `G - X`.
pub fn star_fragile_planar(g: &Graph, delta: usize, a: usize, seed: u64) -> Result<PlanarStarFragility, TpError> {
    if a == 0 {
        return Err(TpError::BadParameter("a must be positive".into()));
    }
    if g.embedding().is_none() {
        return Err(GraphError::MissingEmbedding.into());
    }
    if g.max_degree() > delta {
        return Err(TpError::DegreeExceeded { actual: g.max_degree(), delta });
    }
    let (outer, inner) = planar_rates(a);
    let k = 3 * outer - 2;
    let b = choose_b(delta, inner);
    let bound = goodtp_bound(k, delta, inner, b);
    let layering = planar_tw_layering(g, outer)?;
    let mut family = BTreeMap::new();
    for (x, td) in layering.classes.iter().zip(&layering.witnesses) {
        let rest = VertexSet::range(g.n()).difference(x);
        let h = g.induced(&rest);
        let local_td = td.restrict_to(&rest);
        let r = star_fragile_tw_from(&h, Some(&local_td), k, delta, inner, b)?;
        if BigUint::from(r.order) > bound {
            return Err(TpError::Invalid(format!("inner order {} exceeds {bound}", r.order)));
        }
        let lifted = r
            .distribution
            .entries()
            .unwrap()
            .iter()
            .map(|(y, p)| (y.iter().map(|v| rest.as_slice()[v]).collect(), p.clone()))
            .collect();
        family.insert(x.clone(), ThinDistribution::explicit(lifted, inv(inner))?);
    }
    let distribution = compose(&layering.distribution, &family, EXPLICIT_LIMIT, seed)?;
    let certificate = inv(outer) + inv(inner);
    Ok(PlanarStarFragility { distribution, bound, outer, inner, b, certificate })
}

/// `bound` as a machine integer when it fits.
pub fn bound_to_usize(bound: &BigUint) -> Option<usize> {
    bound.to_usize()
}
