use std::collections::{HashMap, HashSet};

use super::TdFragError;
use crate::graph::{faces, mcs_ordering, Graph, VertexSet};

/// Partition of a triangulation into connected parts, each covered by at
/// most three geodesics, with a chordal quotient.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrigeodesicPartition {
    pub parts: Vec<VertexSet>,
    pub geodesics: Vec<Vec<Vec<usize>>>,
    pub part_of: Vec<usize>,
    pub quotient: Graph,
}

const UNASSIGNED: usize = usize::MAX;

fn not_tri(m: impl Into<String>) -> TdFragError {
    TdFragError::NotTriangulation(m.into())
}

fn invariant(m: impl Into<String>) -> TdFragError {
    TdFragError::Witness(m.into())
}

/// Recursive tripod decomposition along the BFS tree from `root`. The face
/// at the root is the first part; each region bounded by at most three parts
/// is split by the root paths of a trichromatic face.
pub fn trigeodesic_partition(g: &Graph, root: usize) -> Result<TrigeodesicPartition, TdFragError> {
    if g.embedding().is_none() {
        return Err(not_tri("graph has no embedding"));
    }
    if g.n() < 3 || root >= g.n() || !g.is_connected() {
        return Err(not_tri(format!("need a connected graph on at least 3 vertices, root {root} of {}", g.n())));
    }
    let fs = faces(g)?;
    if fs.iter().any(|f| f.len() != 3 || f[0] == f[1] || f[1] == f[2] || f[0] == f[2]) || fs.len() != 2 * g.n() - 4 {
        return Err(not_tri("some face is not a triangle"));
    }
    let mut face_of = HashMap::new();
    for (i, f) in fs.iter().enumerate() {
        for j in 0..3 {
            face_of.insert((f[j], f[(j + 1) % 3]), i);
        }
    }
    let parent = g.bfs_tree(root);
    let n = g.n();
    let mut part_of = vec![UNASSIGNED; n];
    let mut geodesics: Vec<Vec<Vec<usize>>> = Vec::new();

    let f0 = fs.iter().position(|f| f.contains(&root)).expect("root lies on a face");
    let others: Vec<usize> = fs[f0].iter().copied().filter(|&v| v != root).collect();
    for &v in &fs[f0] {
        part_of[v] = 0;
    }
    geodesics.push(vec![vec![others[0], root], vec![others[1]]]);

    let mut stack: Vec<Vec<usize>> = vec![(0..fs.len()).filter(|&i| i != f0).collect()];
    while let Some(region) = stack.pop() {
        let mut in_region = vec![false; fs.len()];
        for &f in &region {
            in_region[f] = true;
        }
        // boundary cycle
        let mut next = HashMap::new();
        for &f in &region {
            for j in 0..3 {
                let (a, b) = (fs[f][j], fs[f][(j + 1) % 3]);
                if !in_region[face_of[&(b, a)]] && next.insert(a, b).is_some() {
                    return Err(invariant("region boundary is not a simple cycle"));
                }
            }
        }
        let start = *next.keys().min().ok_or_else(|| invariant("region without boundary"))?;
        let mut cycle = vec![start];
        let mut cur = next[&start];
        while cur != start {
            if cycle.len() > next.len() {
                return Err(invariant("region boundary is not a simple cycle"));
            }
            cycle.push(cur);
            cur = *next.get(&cur).ok_or_else(|| invariant("region boundary is open"))?;
        }
        if cycle.len() != next.len() {
            return Err(invariant("region boundary is not a simple cycle"));
        }
        let mut pos = vec![UNASSIGNED; n];
        for (i, &v) in cycle.iter().enumerate() {
            pos[v] = i;
        }
        let interior =
            region.iter().flat_map(|&f| fs[f].iter().copied()).any(|v| pos[v] == UNASSIGNED);
        if !interior {
            continue;
        }

        // three contiguous arcs refining the part runs
        let len = cycle.len();
        if let Some(s) = (0..len).find(|&i| part_of[cycle[i]] != part_of[cycle[(i + len - 1) % len]]) {
            cycle.rotate_left(s);
            for (i, &v) in cycle.iter().enumerate() {
                pos[v] = i;
            }
        }
        let mut cuts: Vec<usize> =
            (0..len).filter(|&i| i == 0 || part_of[cycle[i]] != part_of[cycle[i - 1]]).collect();
        if cuts.len() > 3 {
            return Err(invariant(format!("region boundary meets {} part runs", cuts.len())));
        }
        let mut extra = 1;
        while cuts.len() < 3 {
            if !cuts.contains(&extra) {
                cuts.push(extra);
            }
            extra += 1;
        }
        cuts.sort_unstable();
        let arc_at = |i: usize| cuts.iter().rposition(|&c| c <= i).unwrap();
        let hit = |mut v: usize| -> Result<usize, TdFragError> {
            while pos[v] == UNASSIGNED {
                v = parent[v].ok_or_else(|| invariant("root path leaves no trace on the region boundary"))?;
            }
            Ok(v)
        };

        let mut chosen = None;
        for &f in &region {
            let colors: Vec<usize> = fs[f].iter().map(|&v| hit(v).map(|h| arc_at(pos[h]))).collect::<Result<_, _>>()?;
            if colors[0] != colors[1] && colors[1] != colors[2] && colors[0] != colors[2] {
                chosen = Some(f);
                break;
            }
        }
        let f = chosen.ok_or_else(|| invariant("no trichromatic face"))?;

        let mut walls: HashSet<(usize, usize)> = HashSet::new();
        let mut wall = |a: usize, b: usize| {
            walls.insert((a.min(b), a.max(b)));
        };
        for j in 0..3 {
            wall(fs[f][j], fs[f][(j + 1) % 3]);
        }
        let mut legs = Vec::new();
        for &v in &fs[f] {
            let mut leg = Vec::new();
            let mut u = v;
            while pos[u] == UNASSIGNED {
                if part_of[u] != UNASSIGNED || leg.contains(&u) {
                    return Err(invariant(format!("tripod leg meets assigned vertex {u}")));
                }
                leg.push(u);
                let p = parent[u].expect("interior vertex is not the root");
                wall(u, p);
                u = p;
            }
            if !leg.is_empty() {
                legs.push(leg);
            }
        }
        if !legs.is_empty() {
            let id = geodesics.len();
            for leg in &legs {
                for &u in leg {
                    if part_of[u] != UNASSIGNED {
                        return Err(invariant(format!("tripod legs overlap at {u}")));
                    }
                    part_of[u] = id;
                }
            }
            geodesics.push(legs);
        }

        // subregions: flood fill across non-wall edges
        let mut seen = vec![false; fs.len()];
        seen[f] = true;
        for &s in &region {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut comp = vec![s];
            let mut i = 0;
            while i < comp.len() {
                let c = comp[i];
                i += 1;
                for j in 0..3 {
                    let (a, b) = (fs[c][j], fs[c][(j + 1) % 3]);
                    let t = face_of[&(b, a)];
                    if in_region[t] && !seen[t] && !walls.contains(&(a.min(b), a.max(b))) {
                        seen[t] = true;
                        comp.push(t);
                    }
                }
            }
            comp.sort_unstable();
            stack.push(comp);
        }
    }

    if let Some(v) = part_of.iter().position(|&p| p == UNASSIGNED) {
        return Err(invariant(format!("vertex {v} left unassigned")));
    }
    let mut members = vec![Vec::new(); geodesics.len()];
    for (v, &p) in part_of.iter().enumerate() {
        members[p].push(v);
    }
    let parts: Vec<VertexSet> = members.into_iter().map(VertexSet::from_unsorted).collect();
    let quotient = quotient_graph(g, &part_of, parts.len());
    let out = TrigeodesicPartition { parts, geodesics, part_of, quotient };
    verify_trigeodesic(g, &out).map_err(invariant)?;
    Ok(out)
}

/// `G/P` for the part map `part_of`.
pub fn quotient_graph(g: &Graph, part_of: &[usize], k: usize) -> Graph {
    let mut q = Graph::new(k);
    for (u, v) in g.edges() {
        if part_of[u] != part_of[v] {
            q.ensure_edge(part_of[u], part_of[v]);
        }
    }
    q
}

/// Checks the partition, part connectivity, the geodesic covers and the
/// quotient (chordal, clique number at most four), from scratch.
pub fn verify_trigeodesic(g: &Graph, p: &TrigeodesicPartition) -> Result<(), String> {
    let n = g.n();
    let mut owner = vec![UNASSIGNED; n];
    for (i, part) in p.parts.iter().enumerate() {
        for v in part.iter() {
            if v >= n || owner[v] != UNASSIGNED {
                return Err(format!("vertex {v} is out of range or in two parts"));
            }
            owner[v] = i;
        }
    }
    if owner.contains(&UNASSIGNED) || owner != p.part_of {
        return Err("parts do not partition the vertex set consistently".into());
    }
    if p.geodesics.len() != p.parts.len() {
        return Err("one geodesic cover per part expected".into());
    }
    for (i, (part, paths)) in p.parts.iter().zip(&p.geodesics).enumerate() {
        if part.is_empty() || g.components_within(&part.mask(n)).len() != 1 {
            return Err(format!("part {i} is empty or disconnected"));
        }
        if paths.len() > 3 || paths.iter().any(Vec::is_empty) {
            return Err(format!("part {i} has {} covering paths", paths.len()));
        }
        let covered = VertexSet::from_unsorted(paths.concat());
        if covered != *part || paths.iter().map(Vec::len).sum::<usize>() != part.len() {
            return Err(format!("geodesics of part {i} do not cover it exactly"));
        }
        for path in paths {
            if path.windows(2).any(|w| !g.has_edge(w[0], w[1])) {
                return Err(format!("path {path:?} of part {i} is not a path"));
            }
            let d = g.bfs_distances(path[0]);
            if path.iter().enumerate().any(|(k, &v)| d[v] != k) {
                return Err(format!("path {path:?} of part {i} is not a geodesic"));
            }
        }
    }
    if p.quotient != quotient_graph(g, &p.part_of, p.parts.len()) {
        return Err("quotient does not match the parts".into());
    }
    let (order, chordal) = mcs_ordering(&p.quotient);
    if !chordal {
        return Err("quotient is not chordal".into());
    }
    let omega = p.quotient.clique_number_along(&order);
    if omega > 4 {
        return Err(format!("quotient clique number {omega} exceeds 4"));
    }
    Ok(())
}
