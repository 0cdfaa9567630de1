use serde::{Deserialize, Serialize};

use crate::graph::{greedy_chordalize, EliminationOrdering, Graph, VertexSet};

/// Tree decomposition: `bags[i]` hangs below `tree[i]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeDecompositionWitness {
    #[serde(rename = "depth_or_width")]
    pub width: usize,
    #[serde(rename = "parent_map_or_bags")]
    pub bags: Vec<VertexSet>,
    pub tree: Vec<Option<usize>>,
}

impl TreeDecompositionWitness {
    /// Restriction to `set`, relabeled so that local vertex `i` is `set[i]`.
    /// The tree is kept; roots of a forest are chained into one tree.
    pub fn restrict_to(&self, set: &VertexSet) -> TreeDecompositionWitness {
        let local = |v: usize| set.as_slice().binary_search(&v).ok();
        let bags: Vec<VertexSet> =
            self.bags.iter().map(|b| VertexSet::from_unsorted(b.iter().filter_map(local).collect())).collect();
        let mut tree = self.tree.clone();
        let mut last_root = None;
        for (i, p) in tree.iter_mut().enumerate() {
            if p.is_none() {
                *p = last_root;
                last_root = Some(i);
            }
        }
        let width = bags.iter().map(VertexSet::len).max().unwrap_or(1).saturating_sub(1);
        TreeDecompositionWitness { width, bags, tree }
    }

    /// Maps local ids back through `set` (inverse of `restrict_to`).
    pub fn lift_from(&self, set: &VertexSet) -> TreeDecompositionWitness {
        TreeDecompositionWitness {
            width: self.width,
            bags: self.bags.iter().map(|b| b.iter().map(|v| set.as_slice()[v]).collect()).collect(),
            tree: self.tree.clone(),
        }
    }
}

/// Checks the decomposition against `g - x`.
pub fn verify_tree_decomposition_without(g: &Graph, x: &VertexSet, w: &TreeDecompositionWitness) -> bool {
    let k = w.bags.len();
    if w.tree.len() != k {
        return false;
    }
    // acyclic parent pointers
    for start in 0..k {
        let mut cur = start;
        let mut steps = 0;
        while let Some(p) = w.tree[cur] {
            if p >= k || steps > k {
                return false;
            }
            cur = p;
            steps += 1;
        }
    }
    if w.bags.iter().any(|b| b.len() > w.width + 1 || b.iter().any(|v| v >= g.n() || x.contains(v))) {
        return false;
    }
    for v in (0..g.n()).filter(|&v| !x.contains(v)) {
        let holding = (0..k).filter(|&i| w.bags[i].contains(v)).count();
        let linked = (0..k)
            .filter(|&i| w.bags[i].contains(v) && w.tree[i].is_some_and(|p| w.bags[p].contains(v)))
            .count();
        if holding == 0 || holding != linked + 1 {
            return false;
        }
    }
    g.edges().into_iter().filter(|&(u, v)| !x.contains(u) && !x.contains(v)).all(|(u, v)| {
        w.bags.iter().any(|b| b.contains(u) && b.contains(v))
    })
}

pub fn verify_tree_decomposition(g: &Graph, w: &TreeDecompositionWitness) -> bool {
    verify_tree_decomposition_without(g, &VertexSet::new(), w)
}

/// Clique tree of a chordal graph `h` along an elimination ordering: the bag
/// of `v` is `v` with its earlier neighbors, hung below the bag of the latest
/// earlier neighbor. Roots of different components are chained together.
pub fn clique_tree(h: &Graph, order: &EliminationOrdering) -> TreeDecompositionWitness {
    let pos = order.positions();
    let mut bags = Vec::with_capacity(h.n());
    let mut tree = Vec::with_capacity(h.n());
    let mut last_root: Option<usize> = None;
    for (i, &v) in order.0.iter().enumerate() {
        let earlier: Vec<usize> = h.neighbors(v).iter().copied().filter(|&w| pos[w] < i).collect();
        let parent = earlier.iter().copied().max_by_key(|&w| pos[w]).map(|w| pos[w]);
        let mut bag = earlier;
        bag.push(v);
        bags.push(VertexSet::from_unsorted(bag));
        match parent {
            Some(p) => tree.push(Some(p)),
            None => {
                tree.push(last_root);
                last_root = Some(i);
            }
        }
    }
    let width = bags.iter().map(|b| b.len()).max().unwrap_or(1) - 1;
    TreeDecompositionWitness { width, bags, tree }
}

/// Width of the clique tree of the min-fill chordalization.
pub fn treewidth_upper(g: &Graph) -> (usize, TreeDecompositionWitness) {
    let (h, order) = greedy_chordalize(g);
    let w = clique_tree(&h, &order);
    (w.width, w)
}

/// Fill-in graph of an elimination sequence, with the matching
/// earlier-neighbors ordering.
fn fill_along(g: &Graph, sequence: &[usize]) -> (Graph, EliminationOrdering) {
    let mut h = g.clone();
    h.clear_embedding();
    let mut done = vec![false; g.n()];
    for &v in sequence {
        let later: Vec<usize> = h.neighbors(v).iter().copied().filter(|&w| !done[w]).filter(|&w| w != v).collect();
        for i in 0..later.len() {
            for j in i + 1..later.len() {
                h.ensure_edge(later[i], later[j]);
            }
        }
        done[v] = true;
    }
    let mut order = sequence.to_vec();
    order.reverse();
    (h, EliminationOrdering(order))
}

pub const EXACT_TW_MAX: usize = 20;

/// Exact treewidth by dynamic programming over vertex subsets (feasible up to
/// about 20 vertices), with an optimal decomposition.
pub fn exact_treewidth(g: &Graph) -> Option<(usize, TreeDecompositionWitness)> {
    let n = g.n();
    if n > EXACT_TW_MAX {
        return None;
    }
    if n == 0 {
        return Some((0, TreeDecompositionWitness { width: 0, bags: vec![], tree: vec![] }));
    }
    let adj: Vec<u32> = (0..n).map(|v| g.neighbors(v).iter().fold(0, |m, &w| m | 1 << w)).collect();
    // q(s, v): vertices outside s and v reachable from v through s
    let q = |s: u32, v: usize| -> u32 {
        let mut reach = 1u32 << v;
        let mut frontier = reach;
        let mut out = 0u32;
        while frontier != 0 {
            let mut next = 0;
            let mut f = frontier;
            while f != 0 {
                let u = f.trailing_zeros() as usize;
                f &= f - 1;
                next |= adj[u];
            }
            out |= next & !s & !(1 << v);
            next &= s & !reach;
            reach |= next;
            frontier = next;
        }
        out.count_ones()
    };
    let full = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
    let mut tw = vec![u8::MAX; 1 << n];
    let mut choice = vec![0u8; 1 << n];
    tw[0] = 0;
    for s in 1..=full {
        let mut best = u8::MAX;
        let mut f = s;
        while f != 0 {
            let v = f.trailing_zeros() as usize;
            f &= f - 1;
            let rest = s & !(1 << v);
            let val = tw[rest as usize].max(q(rest, v) as u8);
            if val < best {
                best = val;
                choice[s as usize] = v as u8;
            }
        }
        tw[s as usize] = best;
    }
    let mut sequence = Vec::with_capacity(n);
    let mut s = full;
    while s != 0 {
        let v = choice[s as usize] as usize;
        sequence.push(v);
        s &= !(1 << v);
    }
    sequence.reverse();
    let (h, order) = fill_along(g, &sequence);
    let w = clique_tree(&h, &order);
    debug_assert_eq!(w.width, tw[full as usize] as usize);
    Some((w.width, w))
}
