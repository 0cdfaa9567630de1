//! Balanced separations with respect to a marked vertex set, and the iterated
//! splitting of a bounded-treewidth graph into pieces that each meet the
//! marked set in few vertices.

use thiserror::Error;

use crate::graph::{Graph, VertexSet};
use crate::parameters::{verify_tree_decomposition, TreeDecompositionWitness};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SepError {
    #[error("tree decomposition is not valid for the graph")]
    InvalidWitness,
    #[error("{0}")]
    Precondition(String),
    #[error("split invariant violated: {0}")]
    Invariant(String),
}

/// `(a, b)` with `a ∪ b = V` and no edge between `a - b` and `b - a`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Separation {
    pub a: VertexSet,
    pub b: VertexSet,
}

impl Separation {
    pub fn order(&self) -> usize {
        self.a.intersection(&self.b).len()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitResult {
    pub c: VertexSet,
    pub parts: Vec<VertexSet>,
    pub s: usize,
    pub p: usize,
    pub k: usize,
    pub normalized: bool,
}

fn children_of(tree: &[Option<usize>]) -> (Vec<Vec<usize>>, Vec<usize>) {
    let mut children = vec![Vec::new(); tree.len()];
    let mut roots = Vec::new();
    for (i, p) in tree.iter().enumerate() {
        match p {
            Some(p) => children[*p].push(i),
            None => roots.push(i),
        }
    }
    (children, roots)
}

fn subtree_vertices(td: &TreeDecompositionWitness, children: &[Vec<usize>], top: usize, n: usize) -> Vec<bool> {
    let mut seen = vec![false; n];
    let mut stack = vec![top];
    while let Some(t) = stack.pop() {
        for v in td.bags[t].iter() {
            seen[v] = true;
        }
        stack.extend_from_slice(&children[t]);
    }
    seen
}

/// Separation of order at most `width + 1` with `|Z - a|, |Z - b| <= 2|Z|/3`.
/// Walks from the root towards the child whose side holds more than half of
/// `Z`, then splits the sides of the final bag greedily by `Z`-mass.
pub fn balanced_z_separation(g: &Graph, td: &TreeDecompositionWitness, z: &VertexSet) -> Result<Separation, SepError> {
    if !verify_tree_decomposition(g, td) {
        return Err(SepError::InvalidWitness);
    }
    if z.iter().any(|v| v >= g.n()) {
        return Err(SepError::Precondition("marked set is not a vertex subset".into()));
    }
    Ok(centroid_separation(g.n(), td, z))
}

fn centroid_separation(n: usize, td: &TreeDecompositionWitness, z: &VertexSet) -> Separation {
    if td.bags.is_empty() {
        return Separation { a: VertexSet::new(), b: VertexSet::range(n) };
    }
    let mut tree = td.tree.clone();
    let (_, roots) = children_of(&tree);
    for w in roots.windows(2) {
        tree[w[1]] = Some(w[0]);
    }
    let (children, roots) = children_of(&tree);
    let in_z = z.mask(n);
    let total = z.len();
    let mut t = roots[0];
    loop {
        let bag = td.bags[t].mask(n);
        let heavy = children[t].iter().copied().find(|&c| {
            let side = subtree_vertices(td, &children, c, n);
            let mass = (0..n).filter(|&v| side[v] && !bag[v] && in_z[v]).count();
            2 * mass > total
        });
        match heavy {
            Some(c) => t = c,
            None => break,
        }
    }
    let bag = td.bags[t].mask(n);
    let mut owner = vec![usize::MAX; n];
    let mut pieces: Vec<(usize, Vec<usize>)> = Vec::new();
    for &c in &children[t] {
        let side = subtree_vertices(td, &children, c, n);
        let verts: Vec<usize> = (0..n).filter(|&v| side[v] && !bag[v]).collect();
        for &v in &verts {
            owner[v] = pieces.len();
        }
        let mass = verts.iter().filter(|&&v| in_z[v]).count();
        pieces.push((mass, verts));
    }
    let rest: Vec<usize> = (0..n).filter(|&v| !bag[v] && owner[v] == usize::MAX).collect();
    let mass = rest.iter().filter(|&&v| in_z[v]).count();
    pieces.push((mass, rest));

    let m: usize = pieces.iter().map(|p| p.0).sum();
    let mut order: Vec<usize> = (0..pieces.len()).collect();
    order.sort_by_key(|&i| (std::cmp::Reverse(pieces[i].0), i));
    let mut side_a = vec![false; pieces.len()];
    let mut acc = 0;
    for i in order {
        if 3 * acc >= m {
            break;
        }
        side_a[i] = true;
        acc += pieces[i].0;
    }
    let sep: Vec<usize> = td.bags[t].iter().collect();
    let mut a = sep.clone();
    let mut b = sep;
    for (i, (_, verts)) in pieces.into_iter().enumerate() {
        if side_a[i] {
            a.extend(verts);
        } else {
            b.extend(verts);
        }
    }
    Separation { a: VertexSet::from_unsorted(a), b: VertexSet::from_unsorted(b) }
}

/// Checks the separation and balance conditions exactly.
pub fn verify_separation(g: &Graph, sep: &Separation, z: &VertexSet, max_order: usize) -> Result<(), String> {
    if sep.a.union(&sep.b) != VertexSet::range(g.n()) {
        return Err("sides do not cover the graph".into());
    }
    if sep.order() > max_order {
        return Err(format!("order {} exceeds {max_order}", sep.order()));
    }
    let only_a = sep.a.difference(&sep.b);
    let only_b = sep.b.difference(&sep.a);
    if let Some((u, v)) = g.edges().into_iter().find(|&(u, v)| {
        (only_a.contains(u) && only_b.contains(v)) || (only_b.contains(u) && only_a.contains(v))
    }) {
        return Err(format!("edge {u}-{v} crosses the separation"));
    }
    for side in [&sep.a, &sep.b] {
        if 3 * z.difference(side).len() > 2 * z.len() {
            return Err("unbalanced with respect to the marked set".into());
        }
    }
    Ok(())
}

/// Repeatedly splits the earliest-created part `X` with `|X ∩ (C ∪ W)| > s`
/// by a balanced separation of `G[X]` with respect to `X ∩ (C ∪ W)`, adding
/// the separator to `C`. Requires a decomposition of width below `k`,
/// `s >= 12k` and `|W| <= p*s`.
pub fn iterated_split(
    g: &Graph,
    td: &TreeDecompositionWitness,
    w: &VertexSet,
    s: usize,
    k: usize,
    p: usize,
) -> Result<SplitResult, SepError> {
    if s < 12 * k {
        return Err(SepError::Precondition(format!("s = {s} is below 12k = {}", 12 * k)));
    }
    if w.len() > p * s {
        return Err(SepError::Precondition(format!("|W| = {} exceeds p*s = {}", w.len(), p * s)));
    }
    if td.width >= k {
        return Err(SepError::Precondition(format!("decomposition width {} is not below k = {k}", td.width)));
    }
    if !verify_tree_decomposition(g, td) {
        return Err(SepError::InvalidWitness);
    }
    Ok(split_loop(g, td, w, s, k, p))
}

pub(crate) fn split_loop(
    g: &Graph,
    td: &TreeDecompositionWitness,
    w: &VertexSet,
    s: usize,
    k: usize,
    p: usize,
) -> SplitResult {
    let mut parts = vec![VertexSet::range(g.n())];
    let mut c = VertexSet::new();
    let mut rounds = 0;
    while let Some(i) = parts.iter().position(|x| x.intersection(&c.union(w)).len() > s) {
        // a valid decomposition never needs this many rounds; the verifier reports the failure
        if rounds > 6 * p + g.n() {
            break;
        }
        rounds += 1;
        let x = parts.remove(i);
        let z = x.intersection(&c.union(w));
        let local_td = td.restrict_to(&x);
        let local_z: VertexSet = z.iter().map(|v| x.as_slice().binary_search(&v).unwrap()).collect();
        let sep = centroid_separation(x.len(), &local_td, &local_z);
        let lift = |set: &VertexSet| -> VertexSet { set.iter().map(|v| x.as_slice()[v]).collect() };
        let (d, b) = (lift(&sep.a), lift(&sep.b));
        c = c.union(&d.intersection(&b));
        parts.push(d);
        parts.push(b);
    }
    SplitResult { c, parts, s, p, k, normalized: false }
}

/// Post-processing into a partition of `V - (C ∪ W)`: drop `W` from `C`, strip
/// `C ∪ W` from the parts, drop empty parts, and move every vertex of `C` whose
/// neighbors all lie in a single part into that part, until nothing moves.
pub fn normalize_split(r: &SplitResult, g: &Graph, w: &VertexSet) -> SplitResult {
    let mut c = r.c.difference(w);
    let cw = c.union(w);
    let mut parts: Vec<VertexSet> = r.parts.iter().map(|a| a.difference(&cw)).filter(|e| !e.is_empty()).collect();
    let n = g.n();
    loop {
        let mut part_of = vec![usize::MAX; n];
        for (i, e) in parts.iter().enumerate() {
            for v in e.iter() {
                part_of[v] = i;
            }
        }
        let mover = c.iter().find_map(|v| {
            let nb = g.neighbors(v);
            let first = *nb.first()?;
            let i = part_of[first];
            (i != usize::MAX && nb.iter().all(|&u| part_of[u] == i)).then_some((v, i))
        });
        match mover {
            Some((v, i)) => {
                c = c.difference(&[v].into_iter().collect());
                parts[i] = parts[i].union(&[v].into_iter().collect());
            }
            None => break,
        }
    }
    SplitResult { c, parts, s: r.s, p: r.p, k: r.k, normalized: true }
}

/// Independent check of every invariant of a split result.
pub fn verify_split(g: &Graph, w: &VertexSet, r: &SplitResult) -> Result<(), SepError> {
    let fail = |msg: String| Err(SepError::Invariant(msg));
    if r.c.len() >= 6 * r.p * r.k {
        return fail(format!("|C| = {} is not below 6pk = {}", r.c.len(), 6 * r.p * r.k));
    }
    if r.parts.len() >= 6 * r.p {
        return fail(format!("{} parts, not below 6p = {}", r.parts.len(), 6 * r.p));
    }
    let n = g.n();
    let cw = r.c.union(w);
    if !r.normalized {
        for (i, a) in r.parts.iter().enumerate() {
            if a.is_empty() {
                return fail(format!("part {i} is empty"));
            }
            if a.intersection(&cw).len() > r.s {
                return fail(format!("part {i} meets C ∪ W in more than s vertices"));
            }
            for b in &r.parts[i + 1..] {
                if !a.intersection(b).is_subset(&r.c) {
                    return fail(format!("part {i} overlaps a later part outside C"));
                }
            }
        }
        let covered: VertexSet = r.parts.iter().flat_map(|a| a.iter()).collect();
        if covered != VertexSet::range(n) {
            return fail("parts do not cover V".into());
        }
        for (u, v) in g.edges() {
            if !r.parts.iter().any(|a| a.contains(u) && a.contains(v)) {
                return fail(format!("edge {u}-{v} lies in no part"));
            }
        }
        return Ok(());
    }
    if !r.c.is_disjoint(w) {
        return fail("C meets W".into());
    }
    let mut part_of = vec![usize::MAX; n];
    for (i, e) in r.parts.iter().enumerate() {
        if e.is_empty() {
            return fail(format!("part {i} is empty"));
        }
        for v in e.iter() {
            if part_of[v] != usize::MAX || cw.contains(v) {
                return fail(format!("vertex {v} is not in exactly one of C ∪ W and the parts"));
            }
            part_of[v] = i;
        }
    }
    if let Some(v) = (0..n).find(|&v| part_of[v] == usize::MAX && !cw.contains(v)) {
        return fail(format!("vertex {v} is uncovered"));
    }
    for (i, e) in r.parts.iter().enumerate() {
        let boundary = cw.iter().filter(|&x| g.neighbors(x).iter().any(|&u| e.contains(u))).count();
        if boundary > r.s {
            return fail(format!("part {i} has {boundary} neighbors in C ∪ W, more than s"));
        }
    }
    for v in r.c.iter() {
        let nb = g.neighbors(v);
        if nb.is_empty() {
            continue;
        }
        let touches_cw = nb.iter().any(|&u| cw.contains(u));
        let mut touched: Vec<usize> = nb.iter().map(|&u| part_of[u]).filter(|&i| i != usize::MAX).collect();
        touched.sort_unstable();
        touched.dedup();
        if !touches_cw && touched.len() < 2 {
            return fail(format!("vertex {v} of C touches only one part"));
        }
    }
    for (u, v) in g.edges() {
        let (pu, pv) = (part_of[u], part_of[v]);
        if pu != usize::MAX && pv != usize::MAX && pu != pv {
            return fail(format!("edge {u}-{v} joins two parts"));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::generate::{path, random_series_parallel, random_tree};
    use crate::parameters::{exact_treewidth, treewidth_upper};

    fn set(v: &[usize]) -> VertexSet {
        v.iter().copied().collect()
    }

    #[test]
    fn separation_examples() {
        let p5 = path(5);
        let (_, td) = treewidth_upper(&p5);
        let z = VertexSet::range(5);
        let sep = balanced_z_separation(&p5, &td, &z).unwrap();
        verify_separation(&p5, &sep, &z, 2).unwrap();
        assert!(z.difference(&sep.a).len() <= 3 && z.difference(&sep.b).len() <= 3);

        let sep = balanced_z_separation(&p5, &td, &set(&[])).unwrap();
        verify_separation(&p5, &sep, &set(&[]), 2).unwrap();

        let star = Graph::from_edges(5, &[(0, 1), (0, 2), (0, 3), (0, 4)]).unwrap();
        let (_, td) = treewidth_upper(&star);
        let leaves = set(&[1, 2, 3, 4]);
        let sep = balanced_z_separation(&star, &td, &leaves).unwrap();
        verify_separation(&star, &sep, &leaves, 2).unwrap();
        assert!(sep.a.intersection(&sep.b).contains(0));
    }

    #[test]
    fn invalid_witness_rejected() {
        let p5 = path(5);
        let (_, mut td) = treewidth_upper(&p5);
        td.bags.pop();
        td.tree.pop();
        assert_eq!(balanced_z_separation(&p5, &td, &set(&[0])), Err(SepError::InvalidWitness));
    }

    #[test]
    fn split_examples() {
        let p = path(60);
        let (_, td) = treewidth_upper(&p);
        // loop never runs
        let r = iterated_split(&p, &td, &set(&[1, 2, 3]), 24, 2, 1).unwrap();
        assert_eq!(r.parts, vec![VertexSet::range(60)]);
        assert!(r.c.is_empty());

        let w: VertexSet = (0..48).collect();
        let r = iterated_split(&p, &td, &w, 24, 2, 2).unwrap();
        verify_split(&p, &w, &r).unwrap();
        assert!(r.parts.len() < 12 && r.c.len() < 24);
        let nr = normalize_split(&r, &p, &w);
        verify_split(&p, &w, &nr).unwrap();

        assert!(matches!(iterated_split(&p, &td, &w, 23, 2, 3), Err(SepError::Precondition(_))));
    }

    #[test]
    fn normalize_moves_single_part_vertices() {
        // path 0-1-2-3-4, C = {3}, W = {}, parts {0,1,2,3} and {3,4}
        let p5 = path(5);
        let r = SplitResult {
            c: set(&[3]),
            parts: vec![set(&[0, 1, 2, 3]), set(&[3, 4])],
            s: 12,
            p: 1,
            k: 1,
            normalized: false,
        };
        let nr = normalize_split(&r, &p5, &set(&[]));
        // 3 touches both parts and stays
        assert_eq!(nr.c, set(&[3]));
        let r = SplitResult { c: set(&[4]), parts: vec![set(&[0, 1, 2, 3, 4]), set(&[4])], ..r };
        let nr = normalize_split(&r, &p5, &set(&[]));
        assert!(nr.c.is_empty());
        assert_eq!(nr.parts, vec![VertexSet::range(5)]);
    }

    #[test]
    fn splits_on_small_graphs_with_exact_decompositions() {
        for seed in 0..40 {
            let g = if seed % 2 == 0 { random_tree(10, 3, seed) } else { random_series_parallel(10, 4, seed) };
            let (tw, td) = exact_treewidth(&g).unwrap();
            let k = tw + 1;
            let s = 12 * k;
            // |W| <= p*s with a tiny s forces splitting only for large W
            for p in 1..=2 {
                let w = VertexSet::range(g.n());
                let r = iterated_split(&g, &td, &w, s, k, p).unwrap();
                verify_split(&g, &w, &r).unwrap();
                assert!(r.parts.len() < 6 * p);
                verify_split(&g, &w, &normalize_split(&r, &g, &w)).unwrap();
            }
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(48))]
            #[test]
            fn splits_satisfy_invariants(seed in 0u64..10_000, n in 30usize..200, frac in 0.3f64..1.0) {
                let g = if seed % 2 == 0 { random_tree(n, 4, seed) } else { random_series_parallel(n, 4, seed) };
                let (tw, td) = treewidth_upper(&g);
                let k = tw + 1;
                let s = 12 * k;
                let w: VertexSet = (0..((n as f64 * frac) as usize)).collect();
                let p = w.len().div_ceil(s).max(1);
                let r = iterated_split(&g, &td, &w, s, k, p).unwrap();
                prop_assert!(verify_split(&g, &w, &r).is_ok());
                let nr = normalize_split(&r, &g, &w);
                prop_assert!(verify_split(&g, &w, &nr).is_ok(), "{:?}", verify_split(&g, &w, &nr));
            }

            #[test]
            fn centroid_separations_balance(seed in 0u64..10_000, n in 2usize..120, pick in 1usize..5) {
                let g = random_series_parallel(n, 4, seed);
                let (tw, td) = treewidth_upper(&g);
                let z: VertexSet = (0..n).filter(|v| v % pick == 0).collect();
                let sep = balanced_z_separation(&g, &td, &z).unwrap();
                prop_assert!(verify_separation(&g, &sep, &z, tw + 1).is_ok());
            }
        }
    }
}
