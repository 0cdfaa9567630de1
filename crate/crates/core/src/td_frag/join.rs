use std::collections::BTreeMap;

use super::TdFragError;
use crate::graph::{Graph, VertexSet};
use crate::parameters::TreedepthWitness;

fn on_chain(w: &TreedepthWitness, anc: usize, mut v: usize) -> bool {
    loop {
        if v == anc {
            return true;
        }
        match w.parent.get(&v) {
            Some(Some(p)) => v = *p,
            _ => return false,
        }
    }
}

/// Joins a witness for `H` with witnesses for `H_i - V(H)`: the forest of
/// each part hangs below the deepest vertex of `H_i ∩ V(H)`, which must lie
/// on one root-leaf path of the `H` forest. The depth field is
/// `depth(h) + max depth(part)`. With `clique_checks` each `H_i ∩ V(H)` is
/// also checked to be a clique of `g`.
pub fn td_witness_join(
    g: &Graph,
    h: &TreedepthWitness,
    parts: &[(VertexSet, TreedepthWitness)],
    clique_checks: bool,
) -> Result<TreedepthWitness, TdFragError> {
    let fail = |m: String| Err(TdFragError::Join(m));
    let vh: VertexSet = h.parent.keys().copied().collect();
    let Some(depth) = h.depths() else { return fail("witness for H is not a forest".into()) };
    let mut parent = h.parent.clone();
    let mut owner: BTreeMap<usize, usize> = BTreeMap::new();
    let mut extra = 0;
    for (i, (hi, w)) in parts.iter().enumerate() {
        let rest = hi.difference(&vh);
        if !w.parent.keys().copied().eq(rest.iter()) {
            return fail(format!("witness of part {i} does not cover exactly H_{i} - V(H)"));
        }
        for v in rest.iter() {
            if let Some(j) = owner.insert(v, i) {
                return fail(format!("parts {j} and {i} share vertex {v} outside H"));
            }
        }
        let mut k: Vec<usize> = hi.intersection(&vh).into_vec();
        if clique_checks && !g.is_clique(&k) {
            return fail(format!("H_{i} ∩ H is not a clique"));
        }
        k.sort_by_key(|v| depth[v]);
        if k.windows(2).any(|p| !on_chain(h, p[0], p[1])) {
            return fail(format!("H_{i} ∩ H does not lie on one root-leaf path"));
        }
        let attach = k.last().copied();
        for (&v, &p) in &w.parent {
            parent.insert(v, p.or(attach));
        }
        extra = extra.max(w.depth);
    }
    Ok(TreedepthWitness { depth: h.depth + extra, parent })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::generate::complete;
    use crate::parameters::verify_td_witness;

    fn set(v: &[usize]) -> VertexSet {
        v.iter().copied().collect()
    }

    fn roots(vs: &[usize]) -> TreedepthWitness {
        TreedepthWitness { depth: 1, parent: vs.iter().map(|&v| (v, None)).collect() }
    }

    #[test]
    fn join_examples() {
        let star = Graph::from_edges(4, &[(0, 1), (0, 2), (0, 3)]).unwrap();
        let h = roots(&[0]);
        assert_eq!(td_witness_join(&star, &h, &[], true).unwrap(), h);

        let j = td_witness_join(&star, &h, &[(set(&[0, 1, 2, 3]), roots(&[1, 2, 3]))], true).unwrap();
        assert_eq!(j.depth, 2);
        assert!(verify_td_witness(&star, &j));

        // two triangles on the edge 0-1
        let g = Graph::from_edges(4, &[(0, 1), (0, 2), (1, 2), (0, 3), (1, 3)]).unwrap();
        let h = TreedepthWitness { depth: 2, parent: [(0, None), (1, Some(0))].into_iter().collect() };
        let j = td_witness_join(&g, &h, &[(set(&[0, 1, 2]), roots(&[2])), (set(&[0, 1, 3]), roots(&[3]))], true).unwrap();
        assert_eq!(j.depth, 3);
        assert_eq!(j.parent[&2], Some(1));
        assert!(verify_td_witness(&g, &j));
    }

    #[test]
    fn join_errors() {
        let p = Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        let h = roots(&[0, 2]);
        let err = td_witness_join(&p, &h, &[(set(&[0, 1, 2]), roots(&[1]))], true).unwrap_err();
        assert!(matches!(err, TdFragError::Join(m) if m.contains("clique")));
        let k = complete(3);
        let h = roots(&[0]);
        let err = td_witness_join(&k, &h, &[(set(&[0, 1]), roots(&[1])), (set(&[0, 1, 2]), roots(&[1, 2]))], true).unwrap_err();
        assert!(matches!(err, TdFragError::Join(m) if m.contains("share")));
        let err = td_witness_join(&k, &h, &[(set(&[0, 1]), roots(&[2]))], true).unwrap_err();
        assert!(matches!(err, TdFragError::Join(m) if m.contains("cover")));
    }

    mod props {
        use super::*;
        use crate::parameters::exact_treedepth;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(64))]
            #[test]
            fn joined_depth_is_bounded(clique in 1usize..4, sizes in proptest::collection::vec(1usize..5, 0..4), seed in 0u64..1000) {
                // H is a clique; each part is a random tree glued to a subset of it
                use rand::{Rng, SeedableRng};
                let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
                let n = clique + sizes.iter().sum::<usize>();
                let mut g = Graph::new(n);
                for u in 0..clique { for v in u + 1..clique { g.add_edge(u, v).unwrap(); } }
                let mut parts = Vec::new();
                let mut next = clique;
                for &s in &sizes {
                    let verts: Vec<usize> = (next..next + s).collect();
                    next += s;
                    for i in 1..s { g.add_edge(verts[i], verts[rng.gen_range(0..i)]).unwrap(); }
                    let glue: Vec<usize> = (0..clique).filter(|_| rng.gen_bool(0.5)).collect();
                    for &c in &glue { g.add_edge(c, verts[rng.gen_range(0..s)]).unwrap(); }
                    let local = g.induced(&verts.iter().copied().collect());
                    let (_, w) = exact_treedepth(&local, 25).unwrap();
                    let w = TreedepthWitness { depth: w.depth, parent: w.parent.iter().map(|(&v, p)| (verts[v], p.map(|p| verts[p]))).collect() };
                    parts.push((glue.iter().copied().chain(verts.iter().copied()).collect::<VertexSet>(), w));
                }
                let h = TreedepthWitness { depth: clique, parent: (0..clique).map(|v| (v, v.checked_sub(1))).collect() };
                let j = td_witness_join(&g, &h, &parts, true).unwrap();
                prop_assert!(verify_td_witness(&g, &j));
                prop_assert!(j.depth <= clique + parts.iter().map(|p| p.1.depth).max().unwrap_or(0));
            }
        }
    }
}
