use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use super::ParamError;
use crate::graph::{Graph, VertexSet};

pub const DEFAULT_TD_BUDGET: usize = 25;

/// Rooted forest certifying `td <= depth`: every tree has depth at most
/// `depth - 1` (roots at depth 0) and every edge joins an ancestor to a
/// descendant.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreedepthWitness {
    #[serde(rename = "depth_or_width")]
    pub depth: usize,
    #[serde(rename = "parent_map_or_bags", with = "string_keys")]
    pub parent: BTreeMap<usize, Option<usize>>,
}

mod string_keys {
    use std::collections::BTreeMap;

    use serde::de::Error;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(m: &BTreeMap<usize, Option<usize>>, s: S) -> Result<S::Ok, S::Error> {
        s.collect_map(m.iter().map(|(k, v)| (k.to_string(), v)))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BTreeMap<usize, Option<usize>>, D::Error> {
        BTreeMap::<String, Option<usize>>::deserialize(d)?
            .into_iter()
            .map(|(k, v)| k.parse().map(|k| (k, v)).map_err(|_| D::Error::custom(format!("bad vertex key {k:?}"))))
            .collect()
    }
}

impl TreedepthWitness {
    /// Depth of each vertex in the forest, or `None` when the parent map has a
    /// cycle or points outside its own vertex set.
    pub fn depths(&self) -> Option<BTreeMap<usize, usize>> {
        let mut depth: BTreeMap<usize, usize> = BTreeMap::new();
        for &v in self.parent.keys() {
            let mut chain = Vec::new();
            let mut cur = v;
            let base = loop {
                if let Some(&d) = depth.get(&cur) {
                    break d + 1;
                }
                if chain.len() > self.parent.len() {
                    return None;
                }
                chain.push(cur);
                match self.parent.get(&cur)? {
                    None => break 0,
                    Some(p) => cur = *p,
                }
            };
            for (i, &u) in chain.iter().rev().enumerate() {
                depth.insert(u, base + i);
            }
        }
        Some(depth)
    }

    fn is_ancestor(&self, anc: usize, mut v: usize) -> bool {
        loop {
            if v == anc {
                return true;
            }
            match self.parent.get(&v) {
                Some(Some(p)) => v = *p,
                _ => return false,
            }
        }
    }

    /// Height of the forest counted in vertices.
    pub fn height(&self) -> Option<usize> {
        self.depths().map(|d| d.values().map(|&x| x + 1).max().unwrap_or(0))
    }
}

/// Checks the witness against `g`: it must cover exactly `V(g)`.
pub fn verify_td_witness(g: &Graph, w: &TreedepthWitness) -> bool {
    verify_td_witness_without(g, &VertexSet::new(), w)
}

/// Checks the witness against `g - x`.
pub fn verify_td_witness_without(g: &Graph, x: &VertexSet, w: &TreedepthWitness) -> bool {
    let alive: Vec<usize> = (0..g.n()).filter(|&v| !x.contains(v)).collect();
    if !w.parent.keys().copied().eq(alive.iter().copied()) {
        return false;
    }
    let Some(depths) = w.depths() else { return false };
    if depths.values().any(|&d| d + 1 > w.depth) {
        return false;
    }
    for (u, v) in g.edges() {
        if x.contains(u) || x.contains(v) {
            continue;
        }
        let (deep, shallow) = if depths[&u] >= depths[&v] { (u, v) } else { (v, u) };
        if !w.is_ancestor(shallow, deep) {
            return false;
        }
    }
    true
}

/// Exact treedepth over vertex subsets of a graph with at most 64 vertices,
/// memoized on connected subsets. Reusable across many queries on the same
/// graph.
pub struct TreedepthSolver {
    adj: Vec<u64>,
    memo: HashMap<u64, Memo>,
    budget: usize,
}

/// `root` is set when `value` is exact; otherwise `value` is a lower bound.
#[derive(Clone, Copy)]
struct Memo {
    value: u32,
    root: Option<u32>,
}

fn bits(mut m: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if m == 0 {
            None
        } else {
            let i = m.trailing_zeros() as usize;
            m &= m - 1;
            Some(i)
        }
    })
}

fn ceil_log2_plus1(n: u32) -> u32 {
    // ceil(log2(n + 1))
    32 - n.leading_zeros()
}

impl TreedepthSolver {
    pub fn new(g: &Graph, budget: usize) -> Result<Self, ParamError> {
        if g.n() > 64 {
            return Err(ParamError::TooLarge { n: g.n(), max: 64 });
        }
        let adj = (0..g.n()).map(|v| g.neighbors(v).iter().fold(0u64, |m, &w| m | 1 << w)).collect();
        Ok(TreedepthSolver { adj, memo: HashMap::new(), budget })
    }

    pub fn full_mask(&self) -> u64 {
        if self.adj.len() == 64 {
            u64::MAX
        } else {
            (1u64 << self.adj.len()) - 1
        }
    }

    pub fn mask_of(set: &VertexSet) -> u64 {
        set.iter().fold(0, |m, v| m | 1 << v)
    }

    pub fn components(&self, mask: u64) -> Vec<u64> {
        let mut rest = mask;
        let mut out = Vec::new();
        while rest != 0 {
            let start = rest & rest.wrapping_neg();
            let mut comp = start;
            let mut frontier = start;
            while frontier != 0 {
                let mut next = 0;
                for v in bits(frontier) {
                    next |= self.adj[v];
                }
                next &= mask & !comp;
                comp |= next;
                frontier = next;
            }
            out.push(comp);
            rest &= !comp;
        }
        out
    }

    fn lower_bound(&self, comp: u64) -> u32 {
        let n = comp.count_ones();
        let first = comp.trailing_zeros() as usize;
        // BFS eccentricity twice gives a long induced path
        let far = |s: usize| -> (usize, u32) {
            let mut seen = 1u64 << s;
            let mut frontier = seen;
            let mut last = s;
            let mut d = 0;
            loop {
                let mut next = 0;
                for v in bits(frontier) {
                    next |= self.adj[v];
                }
                next &= comp & !seen;
                if next == 0 {
                    return (last, d);
                }
                last = next.trailing_zeros() as usize;
                seen |= next;
                frontier = next;
                d += 1;
            }
        };
        let (a, _) = far(first);
        let (_, diam) = far(a);
        let path_lb = ceil_log2_plus1(diam + 1);
        // greedy clique, starting from each vertex
        let mut clique_lb = 1;
        for s in bits(comp) {
            let mut cand = self.adj[s] & comp;
            let mut size = 1;
            while cand != 0 {
                let v = bits(cand).max_by_key(|&v| (self.adj[v] & cand).count_ones()).unwrap();
                size += 1;
                cand &= self.adj[v];
            }
            clique_lb = clique_lb.max(size);
        }
        path_lb.max(clique_lb).min(n)
    }

    fn connected(&mut self, comp: u64) -> u32 {
        self.solve(comp, comp.count_ones() + 1)
    }

    /// Exact treedepth of `comp` when it is below `limit`, otherwise some
    /// lower bound that is at least `limit`.
    fn solve(&mut self, comp: u64, limit: u32) -> u32 {
        let n = comp.count_ones();
        if n == 1 {
            return 1;
        }
        let known = match self.memo.get(&comp) {
            Some(&Memo { value, root: Some(_) }) => return value,
            Some(&Memo { value, root: None }) if value >= limit => return value,
            Some(&Memo { value, .. }) => value,
            None => 0,
        };
        let lb = self.lower_bound(comp).max(known);
        if lb >= limit {
            self.memo.insert(comp, Memo { value: lb, root: None });
            return lb;
        }
        let mut best = limit;
        let mut best_root = None;
        let mut order: Vec<usize> = bits(comp).collect();
        order.sort_by_key(|&v| std::cmp::Reverse((self.adj[v] & comp).count_ones()));
        for v in order {
            if best <= lb {
                break;
            }
            let mut comps = self.components(comp & !(1 << v));
            comps.sort_by_key(|c| std::cmp::Reverse(c.count_ones()));
            let mut cur = 0;
            let mut ok = true;
            for c in comps {
                if 1 + self.lower_bound(c) >= best {
                    ok = false;
                    break;
                }
                cur = cur.max(self.solve(c, best - 1));
                if 1 + cur >= best {
                    ok = false;
                    break;
                }
            }
            if ok {
                best = 1 + cur;
                best_root = Some(v as u32);
            }
        }
        self.memo.insert(comp, Memo { value: best, root: best_root });
        best
    }

    fn check_budget(&self, comps: &[u64]) -> Result<(), ParamError> {
        match comps.iter().map(|c| c.count_ones() as usize).max() {
            Some(size) if size > self.budget => Err(ParamError::BudgetExceeded { size, budget: self.budget }),
            _ => Ok(()),
        }
    }

    /// Treedepth of the subgraph induced by `mask`.
    pub fn treedepth(&mut self, mask: u64) -> Result<usize, ParamError> {
        let comps = self.components(mask);
        self.check_budget(&comps)?;
        Ok(comps.into_iter().map(|c| self.connected(c)).max().unwrap_or(0) as usize)
    }

    /// Optimal elimination forest of the subgraph induced by `mask`.
    pub fn witness(&mut self, mask: u64) -> Result<TreedepthWitness, ParamError> {
        let depth = self.treedepth(mask)?;
        let mut parent = BTreeMap::new();
        let mut stack: Vec<(u64, Option<usize>)> = self.components(mask).into_iter().map(|c| (c, None)).collect();
        while let Some((comp, p)) = stack.pop() {
            let root = if comp.count_ones() == 1 {
                comp.trailing_zeros() as usize
            } else {
                self.connected(comp);
                self.memo[&comp].root.expect("exact entry") as usize
            };
            parent.insert(root, p);
            for c in self.components(comp & !(1 << root)) {
                stack.push((c, Some(root)));
            }
        }
        Ok(TreedepthWitness { depth, parent })
    }
}

/// Exact treedepth with a witness forest. Every component must have at most
/// `budget` vertices.
pub fn exact_treedepth(g: &Graph, budget: usize) -> Result<(usize, TreedepthWitness), ParamError> {
    exact_treedepth_without(g, &VertexSet::new(), budget)
}

/// Exact treedepth of `g - x`, with the witness on the original vertex ids.
pub fn exact_treedepth_without(
    g: &Graph,
    x: &VertexSet,
    budget: usize,
) -> Result<(usize, TreedepthWitness), ParamError> {
    let mut alive = vec![true; g.n()];
    for v in x.iter() {
        alive[v] = false;
    }
    let mut depth = 0;
    let mut parent = BTreeMap::new();
    for comp in g.components_within(&alive) {
        if comp.len() > budget {
            return Err(ParamError::BudgetExceeded { size: comp.len(), budget });
        }
        let h = g.induced(&comp);
        let mut solver = TreedepthSolver::new(&h, budget)?;
        let w = solver.witness(solver.full_mask())?;
        depth = depth.max(w.depth);
        for (v, p) in w.parent {
            parent.insert(comp.as_slice()[v], p.map(|p| comp.as_slice()[p]));
        }
    }
    Ok((depth, TreedepthWitness { depth, parent }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::generate::{complete, complete_tree, path};

    // plain memoized definition, no bounds or pruning
    fn oracle(g: &Graph) -> usize {
        fn go(adj: &[u64], s: u64, memo: &mut HashMap<u64, usize>) -> usize {
            if s == 0 {
                return 0;
            }
            if let Some(&t) = memo.get(&s) {
                return t;
            }
            // components
            let mut comps = Vec::new();
            let mut rest = s;
            while rest != 0 {
                let mut comp = rest & rest.wrapping_neg();
                loop {
                    let grown = bits(comp).fold(comp, |m, v| m | (adj[v] & s));
                    if grown == comp {
                        break;
                    }
                    comp = grown;
                }
                comps.push(comp);
                rest &= !comp;
            }
            let t = if comps.len() > 1 {
                comps.into_iter().map(|c| go(adj, c, memo)).max().unwrap()
            } else {
                1 + bits(s).map(|v| go(adj, s & !(1 << v), memo)).min().unwrap()
            };
            memo.insert(s, t);
            t
        }
        let adj: Vec<u64> = (0..g.n()).map(|v| g.neighbors(v).iter().fold(0, |m, &w| m | 1 << w)).collect();
        go(&adj, (1u64 << g.n()) - 1, &mut HashMap::new())
    }

    #[test]
    fn examples() {
        assert_eq!(exact_treedepth(&path(3), 25).unwrap().0, 2);
        assert_eq!(exact_treedepth(&complete(4), 25).unwrap().0, 4);
        let b3 = complete_tree(2, 3);
        assert_eq!(b3.n(), 15);
        assert_eq!(oracle(&b3), 4);
        let (t, w) = exact_treedepth(&b3, 25).unwrap();
        assert_eq!(t, 4);
        assert!(verify_td_witness(&b3, &w));
    }

    #[test]
    fn paths_and_cliques() {
        for n in 1..=20 {
            let (t, w) = exact_treedepth(&path(n), 25).unwrap();
            assert_eq!(t as u32, ceil_log2_plus1(n as u32), "P{n}");
            assert!(verify_td_witness(&path(n), &w));
        }
        for n in 1..=8 {
            assert_eq!(exact_treedepth(&complete(n), 25).unwrap().0, n);
        }
    }

    #[test]
    fn budget_is_enforced() {
        let err = exact_treedepth(&path(30), 25).unwrap_err();
        assert_eq!(err, ParamError::BudgetExceeded { size: 30, budget: 25 });
        assert_eq!(exact_treedepth(&Graph::new(0), 25).unwrap().0, 0);
    }

    #[test]
    fn witness_examples() {
        let p3 = path(3);
        let mid = TreedepthWitness { depth: 2, parent: BTreeMap::from([(0, Some(1)), (1, None), (2, Some(1))]) };
        assert!(verify_td_witness(&p3, &mid));
        let chain = TreedepthWitness { depth: 2, parent: BTreeMap::from([(0, None), (1, Some(0)), (2, Some(1))]) };
        assert!(!verify_td_witness(&p3, &chain));
        let mut tri = p3.clone();
        tri.add_edge(0, 2).unwrap();
        let siblings = TreedepthWitness { depth: 2, parent: BTreeMap::from([(0, Some(1)), (1, None), (2, Some(1))]) };
        assert!(!verify_td_witness(&tri, &siblings));
        let cyclic = TreedepthWitness { depth: 9, parent: BTreeMap::from([(0, Some(1)), (1, Some(0)), (2, None)]) };
        assert!(!verify_td_witness(&p3, &cyclic));
    }

    #[test]
    fn matches_oracle_on_random_graphs() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..150 {
            let n = rng.gen_range(1..=11);
            let p = rng.gen_range(0.1..0.7);
            let mut g = Graph::new(n);
            for u in 0..n {
                for v in u + 1..n {
                    if rng.gen_bool(p) {
                        g.add_edge(u, v).unwrap();
                    }
                }
            }
            let (t, w) = exact_treedepth(&g, 25).unwrap();
            assert_eq!(t, oracle(&g), "{:?}", g.edges());
            assert!(verify_td_witness(&g, &w));
        }
    }
}
