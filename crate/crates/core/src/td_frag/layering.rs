use std::collections::{HashMap, VecDeque};

use super::TdFragError;
use crate::graph::{contract_into, faces, triangulate_embedded, Graph, VertexSet};
use crate::parameters::{exact_treewidth, treewidth_upper, verify_tree_decomposition, TreeDecompositionWitness};
use crate::thin::{uniform_on_disjoint, ThinDistribution};

/// Components up to this order get an exact treewidth check.
pub const EXACT_COMPONENT_MAX: usize = 10;

/// BFS distance of every vertex from the lowest vertex of its component.
pub fn forest_distances(g: &Graph) -> Vec<usize> {
    let mut dist = vec![usize::MAX; g.n()];
    for comp in g.components() {
        let root = comp.as_slice()[0];
        let d = g.bfs_distances(root);
        for v in comp.iter() {
            dist[v] = d[v];
        }
    }
    dist
}

/// A connected set `H` of consecutive BFS layers, as an embedded minor: the
/// layers below `H` are contracted into one vertex `x`, everything above is
/// deleted. When `H` reaches layer 0 nothing is contracted and the root is
/// the BFS root.
#[derive(Clone, Debug)]
pub struct BlockMinor {
    pub graph: Graph,
    /// Original id of each minor vertex; `None` for `x`.
    pub to_orig: Vec<Option<usize>>,
    /// `x`, or the BFS root when nothing was contracted.
    pub root: usize,
    pub contracted: bool,
}

pub fn block_minor(g: &Graph, dist: &[usize], h: &VertexSet) -> Result<BlockMinor, TdFragError> {
    let lowest = h.iter().min_by_key(|&v| (dist[v], v)).ok_or_else(|| TdFragError::BadParameter("empty block".into()))?;
    let dmin = dist[lowest];
    let (keep, ball) = if dmin == 0 {
        (h.clone(), VertexSet::new())
    } else {
        let comp_of_h = g.bfs_distances(lowest);
        let ball: VertexSet = (0..g.n()).filter(|&v| comp_of_h[v] != usize::MAX && dist[v] < dmin).collect();
        (h.union(&ball), ball)
    };
    let (graph, map, x) = contract_into(g, &keep, &ball)?;
    let mut to_orig = vec![None; graph.n()];
    for v in h.iter() {
        to_orig[map[v].expect("block vertex survives")] = Some(v);
    }
    let root = match x {
        Some(x) => x,
        None => map[lowest].unwrap(),
    };
    Ok(BlockMinor { graph, to_orig, root, contracted: x.is_some() })
}

/// Tree decomposition of an embedded connected planar graph from a BFS tree
/// rooted at `root`: one bag per face of a triangulation holding the root
/// paths of its corners, joined along the dual edges of non-tree edges.
/// Width is below three times the tree depth plus one; `drop` is removed
/// from every bag.
pub fn face_decomposition(g: &Graph, root: usize, drop: Option<usize>) -> Option<TreeDecompositionWitness> {
    let strip = |set: VertexSet| match drop {
        Some(x) => set.difference(&[x].into_iter().collect()),
        None => set,
    };
    if g.n() < 3 {
        let bag = strip(VertexSet::range(g.n()));
        return Some(TreeDecompositionWitness { width: bag.len().saturating_sub(1), bags: vec![bag], tree: vec![None] });
    }
    let t = triangulate_embedded(g).ok()?;
    let parent = t.bfs_tree(root);
    let fs = faces(&t).ok()?;
    let root_path = |mut v: usize| {
        let mut out = vec![v];
        while let Some(p) = parent[v] {
            out.push(p);
            v = p;
        }
        out
    };
    let mut face_of = HashMap::new();
    for (i, f) in fs.iter().enumerate() {
        for j in 0..f.len() {
            face_of.insert((f[j], f[(j + 1) % f.len()]), i);
        }
    }
    let mut dual = vec![Vec::new(); fs.len()];
    for (u, v) in t.edges() {
        if parent[u] == Some(v) || parent[v] == Some(u) {
            continue;
        }
        let (a, b) = (*face_of.get(&(u, v))?, *face_of.get(&(v, u))?);
        dual[a].push(b);
        dual[b].push(a);
    }
    let mut tree = vec![None; fs.len()];
    let mut seen = vec![false; fs.len()];
    seen[0] = true;
    let mut queue = VecDeque::from([0]);
    while let Some(f) = queue.pop_front() {
        for &h in &dual[f] {
            if !seen[h] {
                seen[h] = true;
                tree[h] = Some(f);
                queue.push_back(h);
            }
        }
    }
    if seen.contains(&false) {
        return None;
    }
    let bags: Vec<VertexSet> =
        fs.iter().map(|f| strip(VertexSet::from_unsorted(f.iter().flat_map(|&v| root_path(v)).collect()))).collect();
    let width = bags.iter().map(VertexSet::len).max().unwrap_or(1).saturating_sub(1);
    Some(TreeDecompositionWitness { width, bags, tree })
}

/// Uniform layering distribution with a decomposition of `G - X_i` for every class.
#[derive(Clone, Debug)]
pub struct Layering {
    pub distribution: ThinDistribution,
    pub bound: usize,
    pub classes: Vec<VertexSet>,
    pub witnesses: Vec<TreeDecompositionWitness>,
}

fn component_decomposition(g: &Graph, dist: &[usize], h: &VertexSet, bound: usize) -> Option<TreeDecompositionWitness> {
    let local = g.induced(h);
    if h.len() <= EXACT_COMPONENT_MAX {
        return exact_treewidth(&local).map(|(_, w)| w.lift_from(h));
    }
    if g.embedding().is_some() {
        if let Ok(minor) = block_minor(g, dist, h) {
            let drop = minor.contracted.then_some(minor.root);
            if let Some(w) = face_decomposition(&minor.graph, minor.root, drop) {
                let lifted = TreeDecompositionWitness {
                    width: w.width,
                    bags: w.bags.iter().map(|b| b.iter().map(|v| minor.to_orig[v].unwrap()).collect()).collect(),
                    tree: w.tree,
                };
                if lifted.width <= bound {
                    return Some(lifted);
                }
            }
        }
    }
    let (_, w) = treewidth_upper(&local);
    Some(w.lift_from(h))
}

/// Uniform distribution on the classes `X_i` of BFS layers `≡ i (mod a)`,
/// each component rooted at its lowest vertex. Every `G - X_i` comes with a
/// checked decomposition of width at most `3a - 3`; the bound holds for
/// planar inputs and a failure is reported as an error.
pub fn planar_tw_layering(g: &Graph, a: usize) -> Result<Layering, TdFragError> {
    if a == 0 {
        return Err(TdFragError::BadParameter("a must be positive".into()));
    }
    let bound = 3 * a - 3;
    let dist = forest_distances(g);
    let classes: Vec<VertexSet> = (0..a).map(|i| (0..g.n()).filter(|&v| dist[v] % a == i).collect()).collect();
    let mut witnesses = Vec::with_capacity(a);
    for (class, x) in classes.iter().enumerate() {
        let alive = g.alive_mask(x);
        let mut bags = Vec::new();
        let mut tree = Vec::new();
        for h in g.components_within(&alive) {
            let w = component_decomposition(g, &dist, &h, bound)
                .ok_or_else(|| TdFragError::Witness(format!("no decomposition for class {class}")))?;
            if w.width > bound || !verify_tree_decomposition(&g.induced(&h), &w.restrict_to(&h)) {
                return Err(TdFragError::WidthUnverified { class, size: h.len(), width: w.width, bound });
            }
            let offset = bags.len();
            bags.extend(w.bags);
            tree.extend(w.tree.into_iter().map(|p| p.map(|p| p + offset)));
        }
        let width = bags.iter().map(VertexSet::len).max().unwrap_or(1).saturating_sub(1);
        witnesses.push(TreeDecompositionWitness { width, bags, tree });
    }
    Ok(Layering { distribution: uniform_on_disjoint(&classes, a)?, bound, classes, witnesses })
}
