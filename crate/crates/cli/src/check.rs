//! Stand-alone checks of a run document. Nothing here calls the library's
//! verifiers: only the file formats are shared with the producer.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use fragile::graph::{parse_graph, Ratio};
use fragile::parameters::{Param, Witness};
use fragile::thin::{Derivation, DistributionFile};
use num_bigint::BigUint;

use crate::doc::RunDocument;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub outcome: Option<usize>,
    pub msg: String,
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.outcome {
            Some(i) => write!(f, "outcome {i}: {}", self.msg),
            None => f.write_str(&self.msg),
        }
    }
}

fn fail<T>(outcome: Option<usize>, msg: impl Into<String>) -> Result<T, Violation> {
    Err(Violation { outcome, msg: msg.into() })
}

struct Host {
    n: usize,
    adj: Vec<Vec<usize>>,
    edges: Vec<(usize, usize)>,
}

fn ratio(p: u64, q: u64) -> Ratio {
    Ratio::new(p.into(), q.into())
}

fn derivation_bound(d: &Derivation) -> Ratio {
    match d {
        Derivation::Leaf { eps, .. } => eps.clone(),
        Derivation::Compose { outer, inner } => derivation_bound(outer) + derivation_bound(inner),
        Derivation::Max { parts } => parts.iter().map(derivation_bound).max().unwrap_or_else(|| ratio(0, 1)),
    }
}

fn ceil_log2(a: usize) -> usize {
    let mut k = 0;
    while (1usize << k) < a {
        k += 1;
    }
    k
}

/// The bound the document's class and rate must carry, where it has a closed form.
fn expected_bound(doc: &RunDocument) -> Result<Option<BigUint>, Violation> {
    let a = doc.a;
    let big = |x: usize| BigUint::from(x);
    Ok(match (doc.param, doc.class.as_str()) {
        (Param::Tw, "planar") => Some(big(3 * a - 3)),
        (Param::Td, "outerplanar") => Some(big(2 * a * (1 + ceil_log2(a)))),
        (Param::Td, "planar-chordal") => Some(big(8 * a * a * (2 + ceil_log2(a)))),
        (Param::Td, "planar") => Some(big(384) * big(a).pow(3) * big(3 + ceil_log2(a))),
        (Param::Td, c) if c.starts_with("tw:") => {
            let t = doc.t.ok_or(Violation { outcome: None, msg: "treewidth used is missing".into() })?;
            Some((BigUint::from(1u32) << (t * (t + 1) / 2 + 1)) * big(a).pow(t as u32))
        }
        _ => None,
    })
}

fn alive_mask(host: &Host, set: &[usize], i: usize) -> Result<Vec<bool>, Violation> {
    let mut alive = vec![true; host.n];
    for &v in set {
        if v >= host.n {
            return fail(Some(i), format!("vertex {v} out of range"));
        }
        alive[v] = false;
    }
    Ok(alive)
}

fn largest_component(host: &Host, alive: &[bool]) -> usize {
    let mut seen = vec![false; host.n];
    let mut best = 0;
    for s in 0..host.n {
        if !alive[s] || seen[s] {
            continue;
        }
        seen[s] = true;
        let mut queue = VecDeque::from([s]);
        let mut size = 0;
        while let Some(u) = queue.pop_front() {
            size += 1;
            for &w in &host.adj[u] {
                if alive[w] && !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        best = best.max(size);
    }
    best
}

fn check_forest(host: &Host, alive: &[bool], parent: &BTreeMap<usize, Option<usize>>, claimed: usize, bound: &BigUint, i: usize) -> Result<usize, Violation> {
    let expect: BTreeSet<usize> = (0..host.n).filter(|&v| alive[v]).collect();
    let have: BTreeSet<usize> = parent.keys().copied().collect();
    if expect != have {
        return fail(Some(i), "witness vertex set differs from V(G) - Z");
    }
    let mut depth: BTreeMap<usize, usize> = BTreeMap::new();
    for &v in parent.keys() {
        let mut chain = vec![v];
        let mut cur = v;
        let base = loop {
            if let Some(&d) = depth.get(&cur) {
                chain.pop();
                break d + 1;
            }
            match parent[&cur] {
                None => break 0,
                Some(p) => {
                    if !have.contains(&p) {
                        return fail(Some(i), format!("parent {p} of {cur} is not a witness vertex"));
                    }
                    if chain.len() > have.len() {
                        return fail(Some(i), "witness parent map has a cycle");
                    }
                    chain.push(p);
                    cur = p;
                }
            }
        };
        for (k, &u) in chain.iter().rev().enumerate() {
            depth.insert(u, base + k);
        }
    }
    let height = depth.values().map(|&d| d + 1).max().unwrap_or(0);
    if height > claimed || BigUint::from(height) > *bound {
        return fail(Some(i), format!("witness height {height} exceeds depth {claimed} or bound {bound}"));
    }
    let is_ancestor = |anc: usize, mut v: usize| loop {
        if v == anc {
            return true;
        }
        match parent[&v] {
            Some(p) => v = p,
            None => return false,
        }
    };
    for &(u, v) in &host.edges {
        if alive[u] && alive[v] {
            let (deep, shallow) = if depth[&u] >= depth[&v] { (u, v) } else { (v, u) };
            if !is_ancestor(shallow, deep) {
                return fail(Some(i), format!("ancestor condition fails on edge {u}-{v}"));
            }
        }
    }
    Ok(height)
}

fn check_decomposition(host: &Host, alive: &[bool], bags: &[Vec<usize>], tree: &[Option<usize>], bound: &BigUint, i: usize) -> Result<usize, Violation> {
    if bags.len() != tree.len() {
        return fail(Some(i), "bag and tree lengths differ");
    }
    let k = bags.len();
    for (j, p) in tree.iter().enumerate() {
        let mut cur = Some(j);
        let mut steps = 0;
        while let Some(c) = cur {
            steps += 1;
            if steps > k + 1 {
                return fail(Some(i), "decomposition tree has a cycle");
            }
            cur = match tree.get(c) {
                Some(&q) => q,
                None => return fail(Some(i), format!("tree parent {c} out of range")),
            };
        }
        if p.is_some_and(|p| p >= k) {
            return fail(Some(i), "tree parent out of range");
        }
    }
    let mut holders: Vec<Vec<usize>> = vec![Vec::new(); host.n];
    for (j, bag) in bags.iter().enumerate() {
        for &v in bag {
            if v >= host.n || !alive[v] {
                return fail(Some(i), format!("bag {j} holds {v}, which is not in G - Z"));
            }
            holders[v].push(j);
        }
    }
    for v in (0..host.n).filter(|&v| alive[v]) {
        if holders[v].is_empty() {
            return fail(Some(i), format!("coverage fails: vertex {v} is in no bag"));
        }
        // bags holding v must induce a connected subtree: exactly one has its parent outside
        let inside: BTreeSet<usize> = holders[v].iter().copied().collect();
        let tops = holders[v].iter().filter(|&&j| tree[j].is_none_or(|p| !inside.contains(&p))).count();
        if tops != 1 {
            return fail(Some(i), format!("running intersection fails for vertex {v}"));
        }
    }
    for &(u, v) in &host.edges {
        if alive[u] && alive[v] && !holders[u].iter().any(|j| bags[*j].contains(&v)) {
            return fail(Some(i), format!("edge coverage fails on {u}-{v}"));
        }
    }
    let width = bags.iter().map(Vec::len).max().unwrap_or(1).saturating_sub(1);
    if BigUint::from(width) > *bound {
        return fail(Some(i), format!("width {width} exceeds the bound {bound}"));
    }
    Ok(width)
}

/// Checks the document and returns one verdict per outcome.
pub fn check_document(doc: &RunDocument) -> Result<Vec<String>, Violation> {
    let g = parse_graph(&doc.graph).or_else(|e| fail(None, format!("graph: {e}")))?;
    let host = Host { n: g.n(), adj: (0..g.n()).map(|v| g.neighbors(v).to_vec()).collect(), edges: g.edges() };
    if doc.a == 0 {
        return fail(None, "a must be positive");
    }
    let bound: BigUint = doc.bound.parse().or_else(|_| fail(None, format!("bad bound {:?}", doc.bound)))?;
    if let Some(expected) = expected_bound(doc)? {
        if expected != bound {
            return fail(None, format!("bound {bound} differs from the formula value {expected}"));
        }
    }
    let limit = ratio(1, doc.a as u64);
    match &doc.distribution {
        DistributionFile::Explicit { eps, entries } => {
            let mut total = ratio(0, 1);
            let mut marginal: BTreeMap<usize, Ratio> = BTreeMap::new();
            for e in entries {
                if e.prob < ratio(0, 1) {
                    return fail(None, "probability mass: negative probability");
                }
                total += &e.prob;
                for v in e.set.iter() {
                    if v >= host.n {
                        return fail(None, format!("support vertex {v} out of range"));
                    }
                    *marginal.entry(v).or_insert_with(|| ratio(0, 1)) += &e.prob;
                }
            }
            if total != ratio(1, 1) {
                return fail(None, format!("probability mass sums to {total}, not 1"));
            }
            if let Some((v, m)) = marginal.iter().find(|(_, m)| *m > eps) {
                return fail(None, format!("thinness fails: vertex {v} has marginal {m} above {eps}"));
            }
            if *eps > limit {
                return fail(None, format!("thinness certificate {eps} above 1/{}", doc.a));
            }
            for (j, e) in entries.iter().enumerate() {
                if !doc.outcomes.iter().any(|o| o.set == e.set) {
                    return fail(None, format!("support set {j} has no outcome record"));
                }
            }
        }
        DistributionFile::Sampler { eps, derivation, samples, .. } => {
            let derived = derivation_bound(derivation);
            if derived != *eps {
                return fail(None, format!("derivation gives {derived}, file claims {eps}"));
            }
            if *eps > limit {
                return fail(None, format!("thinness certificate {eps} above 1/{}", doc.a));
            }
            if samples.len() != doc.outcomes.len() || samples.iter().zip(&doc.outcomes).any(|(s, o)| *s != o.set) {
                return fail(None, "outcome records differ from the sampled sets");
            }
        }
    }
    let mut verdicts = Vec::with_capacity(doc.outcomes.len());
    for (i, o) in doc.outcomes.iter().enumerate() {
        let alive = alive_mask(&host, o.set.as_slice(), i)?;
        let value = match (doc.param, &o.witness) {
            (Param::Star, _) => {
                let s = largest_component(&host, &alive);
                if BigUint::from(s) > bound {
                    return fail(Some(i), format!("largest component {s} exceeds the bound {bound}"));
                }
                s
            }
            (Param::Td, Some(Witness::Treedepth(w))) => check_forest(&host, &alive, &w.parent, w.depth, &bound, i)?,
            (Param::Tw, Some(Witness::TreeDecomposition(w))) => {
                let bags: Vec<Vec<usize>> = w.bags.iter().map(|b| b.as_slice().to_vec()).collect();
                check_decomposition(&host, &alive, &bags, &w.tree, &bound, i)?
            }
            _ => return fail(Some(i), format!("missing or mismatched {} witness", doc.param)),
        };
        verdicts.push(format!("outcome {i}: {} {value} <= {bound} ok", doc.param));
    }
    Ok(verdicts)
}
