//! Seeded generators for the test corpora: grids, random plane
//! triangulations, outerplanar and series-parallel graphs, trees.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Embedding, Graph};

pub fn path(n: usize) -> Graph {
    let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
    Graph::from_edges(n, &edges).unwrap()
}

pub fn cycle(n: usize) -> Graph {
    let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
    Graph::from_edges(n, &edges).unwrap()
}

pub fn complete(n: usize) -> Graph {
    let mut g = Graph::new(n);
    for u in 0..n {
        for v in u + 1..n {
            g.add_edge(u, v).unwrap();
        }
    }
    g
}

/// `w x h` grid with its planar rotation system; vertex `(x, y)` is `y*w + x`.
pub fn grid(w: usize, h: usize) -> Graph {
    let mut g = Graph::new(w * h);
    let mut rotation = vec![Vec::new(); w * h];
    for y in 0..h {
        for x in 0..w {
            let v = y * w + x;
            if x + 1 < w {
                g.add_edge(v, v + 1).unwrap();
                rotation[v].push(v + 1);
            }
            if y + 1 < h {
                g.add_edge(v, v + w).unwrap();
                rotation[v].push(v + w);
            }
            if x > 0 {
                rotation[v].push(v - 1);
            }
            if y > 0 {
                rotation[v].push(v - w);
            }
        }
    }
    g.set_embedding(Embedding::new(rotation)).expect("grid rotation is planar");
    g
}

/// Complete rooted tree where every internal vertex has `arity` children and
/// the leaves are at depth `depth`; vertex 0 is the root, BFS numbering.
pub fn complete_tree(arity: usize, depth: usize) -> Graph {
    let mut n = 1usize;
    let mut level = 1usize;
    for _ in 0..depth {
        level *= arity;
        n += level;
    }
    let mut g = Graph::new(n);
    for v in 1..n {
        g.add_edge((v - 1) / arity, v).unwrap();
    }
    g
}

/// Random tree on `n` vertices with maximum degree at most `max_deg`.
pub fn random_tree(n: usize, max_deg: usize, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = Graph::new(n);
    for v in 1..n {
        let candidates: Vec<usize> = (0..v).filter(|&u| g.degree(u) < max_deg).collect();
        let u = *candidates.choose(&mut rng).expect("degree cap leaves room");
        g.add_edge(u, v).unwrap();
    }
    g
}

/// Random connected series-parallel graph (a partial 2-tree) with maximum
/// degree at most `max_deg`.
pub fn random_series_parallel(n: usize, max_deg: usize, seed: u64) -> Graph {
    assert!(max_deg >= 3);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = Graph::new(n.max(2));
    g.add_edge(0, 1).unwrap();
    for w in 2..n {
        let edges: Vec<(usize, usize)> = g
            .edges()
            .into_iter()
            .filter(|&(u, v)| u < w && v < w && g.degree(u) < max_deg && g.degree(v) < max_deg)
            .collect();
        if !edges.is_empty() && rng.gen_bool(0.6) {
            let (u, v) = edges[rng.gen_range(0..edges.len())];
            g.add_edge(u, w).unwrap();
            g.add_edge(v, w).unwrap();
        } else {
            let cands: Vec<usize> = (0..w).filter(|&u| g.degree(u) < max_deg).collect();
            let u = *cands.choose(&mut rng).expect("degree cap leaves room");
            g.add_edge(u, w).unwrap();
        }
    }
    // thin out a few edges while staying connected
    let edges = g.edges();
    for (u, v) in edges {
        if rng.gen_bool(0.15) {
            g.remove_edge(u, v);
            if !g.is_connected() {
                g.add_edge(u, v).unwrap();
            }
        }
    }
    g
}

pub fn fan(k: usize) -> Graph {
    let mut g = Graph::new(k + 1);
    for i in 1..=k {
        g.add_edge(0, i).unwrap();
        if i > 1 {
            g.add_edge(i - 1, i).unwrap();
        }
    }
    g
}

/// Random triangulated polygon on `n >= 3` vertices (maximal outerplanar),
/// optionally thinned to a random connected outerplanar graph.
pub fn random_outerplanar(n: usize, thin: bool, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = cycle(n);
    let mut stack = vec![(0..n).collect::<Vec<usize>>()];
    while let Some(poly) = stack.pop() {
        if poly.len() <= 3 {
            continue;
        }
        let k = poly.len();
        let i = rng.gen_range(0..k);
        let j = (i + rng.gen_range(2..k - 1)) % k;
        let (i, j) = (i.min(j), i.max(j));
        g.ensure_edge(poly[i], poly[j]);
        stack.push(poly[i..=j].to_vec());
        let mut other = poly[j..].to_vec();
        other.extend_from_slice(&poly[..=i]);
        stack.push(other);
    }
    if thin {
        for (u, v) in g.edges() {
            if rng.gen_bool(0.3) {
                g.remove_edge(u, v);
                if !g.is_connected() {
                    g.add_edge(u, v).unwrap();
                }
            }
        }
    }
    g
}

/// Random plane triangulation on `n >= 3` vertices: random face insertions
/// (a stacked triangulation) followed by `flips` random edge flips.
pub fn random_triangulation(n: usize, flips: usize, seed: u64) -> Graph {
    assert!(n >= 3);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = complete(3);
    let mut rot: Vec<Vec<usize>> = vec![vec![1, 2], vec![2, 0], vec![0, 1]];
    let mut faces: Vec<[usize; 3]> = vec![[0, 1, 2], [0, 2, 1]];
    let ins = |rot: &mut Vec<Vec<usize>>, v: usize, after: usize, new: usize| {
        let i = rot[v].iter().position(|&x| x == after).unwrap();
        rot[v].insert(i + 1, new);
    };
    for v in 3..n {
        let fi = rng.gen_range(0..faces.len());
        let [a, b, c] = faces.swap_remove(fi);
        let mut grown = Graph::new(v + 1);
        for (x, y) in g.edges() {
            grown.add_edge(x, y).unwrap();
        }
        g = grown;
        for x in [a, b, c] {
            g.add_edge(x, v).unwrap();
        }
        ins(&mut rot, b, a, v);
        ins(&mut rot, c, b, v);
        ins(&mut rot, a, c, v);
        rot.push(vec![b, a, c]);
        faces.extend([[a, b, v], [b, c, v], [c, a, v]]);
    }
    let succ = |rot: &Vec<Vec<usize>>, v: usize, u: usize| {
        let i = rot[v].iter().position(|&x| x == u).unwrap();
        rot[v][(i + 1) % rot[v].len()]
    };
    for _ in 0..flips {
        let edges = g.edges();
        let (u, v) = edges[rng.gen_range(0..edges.len())];
        let x = succ(&rot, v, u);
        let y = succ(&rot, u, v);
        if x == y || g.has_edge(x, y) || g.degree(u) <= 3 || g.degree(v) <= 3 {
            continue;
        }
        ins(&mut rot, x, v, y);
        ins(&mut rot, y, u, x);
        rot[u].retain(|&w| w != v);
        rot[v].retain(|&w| w != u);
        g.remove_edge(u, v);
        g.add_edge(x, y).unwrap();
    }
    g.set_embedding(Embedding::new(rot)).expect("triangulation rotation is planar");
    g
}
