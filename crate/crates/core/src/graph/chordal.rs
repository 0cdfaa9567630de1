use std::collections::BTreeSet;

use super::{EliminationOrdering, Graph};

/// Maximum-cardinality search, ties by ascending id. The visit order is
/// returned as an elimination ordering (earlier neighbors form a clique iff
/// the graph is chordal); the flag is the result of checking that directly.
pub fn mcs_ordering(g: &Graph) -> (EliminationOrdering, bool) {
    let n = g.n();
    let mut weight = vec![0usize; n];
    let mut done = vec![false; n];
    let mut order = Vec::with_capacity(n);
    for _ in 0..n {
        let mut best = None;
        for v in 0..n {
            if done[v] {
                continue;
            }
            match best {
                None => best = Some(v),
                Some(b) if weight[v] > weight[b] => best = Some(v),
                _ => {}
            }
        }
        let v = best.expect("unvisited vertex remains");
        done[v] = true;
        order.push(v);
        for &w in g.neighbors(v) {
            if !done[w] {
                weight[w] += 1;
            }
        }
    }
    let order = EliminationOrdering(order);
    let chordal = is_perfect_elimination_ordering(g, &order);
    (order, chordal)
}

/// True iff, for every vertex, its neighbors that come earlier in `order`
/// induce a clique.
pub fn is_perfect_elimination_ordering(g: &Graph, order: &EliminationOrdering) -> bool {
    if order.0.len() != g.n() {
        return false;
    }
    let pos = order.positions();
    if pos.contains(&usize::MAX) {
        return false;
    }
    (0..g.n()).all(|v| {
        let earlier: Vec<usize> =
            g.neighbors(v).iter().copied().filter(|&w| pos[w] < pos[v]).collect();
        g.is_clique(&earlier)
    })
}

/// Min-fill elimination game (ties by degree, then ascending id). Returns the chordal
/// supergraph and an elimination ordering of it in the earlier-neighbors
/// sense, i.e. the reverse of the elimination sequence.
pub fn greedy_chordalize(g: &Graph) -> (Graph, EliminationOrdering) {
    let n = g.n();
    let mut work: Vec<BTreeSet<usize>> =
        (0..n).map(|v| g.neighbors(v).iter().copied().collect()).collect();
    let mut eliminated = vec![false; n];
    let mut filled = g.clone();
    filled.clear_embedding();
    let mut sequence = Vec::with_capacity(n);

    let fill_of = |work: &Vec<BTreeSet<usize>>, v: usize| -> usize {
        let nb: Vec<usize> = work[v].iter().copied().collect();
        let mut missing = 0;
        for i in 0..nb.len() {
            for j in i + 1..nb.len() {
                if !work[nb[i]].contains(&nb[j]) {
                    missing += 1;
                }
            }
        }
        missing
    };

    for _ in 0..n {
        let mut best: Option<(usize, usize, usize)> = None;
        for v in 0..n {
            if eliminated[v] {
                continue;
            }
            let key = (fill_of(&work, v), work[v].len(), v);
            if best.is_none_or(|b| key < b) {
                best = Some(key);
            }
        }
        let (_, _, v) = best.expect("vertex remains");
        let nb: Vec<usize> = work[v].iter().copied().collect();
        for i in 0..nb.len() {
            for j in i + 1..nb.len() {
                let (a, b) = (nb[i], nb[j]);
                if work[a].insert(b) {
                    work[b].insert(a);
                    filled.ensure_edge(a, b);
                }
            }
        }
        for &w in &nb {
            work[w].remove(&v);
        }
        work[v].clear();
        eliminated[v] = true;
        sequence.push(v);
    }
    sequence.reverse();
    (filled, EliminationOrdering(sequence))
}
