//! Rotation systems: face tracing, Euler validation, triangulation and
//! minor construction (vertex deletion plus contraction of a connected set).
//!
//! Faces are traced with the rule `next(u -> v) = (v -> succ_v(u))`, where
//! `succ_v` is the cyclic successor in the rotation at `v`.

use super::{Graph, GraphError, VertexSet};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Embedding {
    rotation: Vec<Vec<usize>>,
}

impl Embedding {
    pub fn new(rotation: Vec<Vec<usize>>) -> Self {
        Embedding { rotation }
    }

    pub fn rotation(&self, v: usize) -> &[usize] {
        &self.rotation[v]
    }

    pub fn rotations(&self) -> &[Vec<usize>] {
        &self.rotation
    }

    fn succ(&self, v: usize, u: usize) -> usize {
        let rot = &self.rotation[v];
        let i = rot.iter().position(|&x| x == u).expect("dart exists");
        rot[(i + 1) % rot.len()]
    }

    fn insert_after(&mut self, v: usize, after: usize, new: usize) {
        let rot = &mut self.rotation[v];
        let i = rot.iter().position(|&x| x == after).expect("angle exists");
        rot.insert(i + 1, new);
    }

    /// Checks that each rotation is a permutation of the neighborhood and that
    /// every connected component satisfies `n - m + f = 2`.
    pub fn validate(&self, g: &Graph) -> Result<(), GraphError> {
        if self.rotation.len() != g.n() {
            return Err(GraphError::InvalidRotation(format!(
                "{} rotations for {} vertices",
                self.rotation.len(),
                g.n()
            )));
        }
        for v in 0..g.n() {
            let mut sorted = self.rotation[v].clone();
            sorted.sort_unstable();
            if sorted != g.neighbors(v) {
                return Err(GraphError::InvalidRotation(format!(
                    "rotation at {v} is not a permutation of its neighbors"
                )));
            }
        }
        let faces = trace_faces(g.n(), self);
        for comp in g.components() {
            let n_c = comp.len();
            let m_c: usize = comp.iter().map(|v| g.degree(v)).sum::<usize>() / 2;
            if m_c == 0 {
                continue;
            }
            let f_c = faces.iter().filter(|f| comp.contains(f[0])).count();
            if n_c + f_c != m_c + 2 {
                return Err(GraphError::InvalidRotation(format!(
                    "Euler check fails on component containing {}: n={n_c} m={m_c} f={f_c}",
                    comp.as_slice()[0]
                )));
            }
        }
        Ok(())
    }
}

fn trace_faces(n: usize, emb: &Embedding) -> Vec<Vec<usize>> {
    let mut used: Vec<Vec<bool>> = (0..n).map(|v| vec![false; emb.rotation[v].len()]).collect();
    let mut faces = Vec::new();
    for u in 0..n {
        for i in 0..emb.rotation[u].len() {
            if used[u][i] {
                continue;
            }
            let mut face = Vec::new();
            let (mut a, mut b) = (u, emb.rotation[u][i]);
            loop {
                let idx = emb.rotation[a].iter().position(|&x| x == b).unwrap();
                if used[a][idx] {
                    break;
                }
                used[a][idx] = true;
                face.push(a);
                let c = emb.succ(b, a);
                a = b;
                b = c;
            }
            faces.push(face);
        }
    }
    faces
}

/// Face boundary walks of an embedded graph.
pub fn faces(g: &Graph) -> Result<Vec<Vec<usize>>, GraphError> {
    let emb = g.embedding().ok_or(GraphError::MissingEmbedding)?;
    Ok(trace_faces(g.n(), emb))
}

fn find_chord(g: &Graph, face: &[usize]) -> Option<(usize, usize)> {
    let k = face.len();
    for i in 0..k {
        let (a, c) = (face[i], face[(i + 2) % k]);
        if a != c && !g.has_edge(a, c) {
            return Some((i, (i + 2) % k));
        }
    }
    for i in 0..k {
        for step in 3..k - 1 {
            let j = (i + step) % k;
            let (a, c) = (face[i], face[j]);
            if a != c && !g.has_edge(a, c) {
                return Some((i, j));
            }
        }
    }
    None
}

/// Adds chords until every face is a triangle. Input edges and the input
/// rotation order are preserved; new edges are placed inside the face they
/// split.
pub fn triangulate_embedded(g: &Graph) -> Result<Graph, GraphError> {
    let mut emb = g.embedding().ok_or(GraphError::MissingEmbedding)?.clone();
    if !g.is_connected() {
        return Err(GraphError::Disconnected);
    }
    if g.n() < 3 {
        return Err(GraphError::Precondition("triangulation needs at least 3 vertices".into()));
    }
    let mut out = g.clone();
    out.clear_embedding();
    loop {
        let fs = trace_faces(out.n(), &emb);
        let Some(face) = fs.into_iter().find(|f| f.len() > 3) else { break };
        let k = face.len();
        let (i, j) = find_chord(&out, &face).ok_or_else(|| GraphError::ForcedMultiEdge { face: face.clone() })?;
        let (a, c) = (face[i], face[j]);
        let before_a = face[(i + k - 1) % k];
        let before_c = face[(j + k - 1) % k];
        emb.insert_after(a, before_a, c);
        emb.insert_after(c, before_c, a);
        out.add_edge(a, c)?;
    }
    out.set_embedding(emb)?;
    Ok(out)
}

/// Builds the embedded minor obtained by keeping only `keep`, then
/// contracting the connected set `ball` (a subset of `keep`) into one vertex.
/// Loops and parallel edges created by the contraction are dropped.
///
/// Returns the minor, the old-to-new vertex map (`None` for removed or
/// absorbed vertices) and the new id of the contracted vertex.
pub fn contract_into(
    g: &Graph,
    keep: &VertexSet,
    ball: &VertexSet,
) -> Result<(Graph, Vec<Option<usize>>, Option<usize>), GraphError> {
    let emb = g.embedding().ok_or(GraphError::MissingEmbedding)?;
    if !ball.is_subset(keep) {
        return Err(GraphError::Precondition("contracted set must be kept".into()));
    }
    let n = g.n();
    let kept = keep.mask(n);
    // dart arrays
    let mut tail = Vec::new();
    let mut head = Vec::new();
    let mut rot: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut dart_of = std::collections::HashMap::new();
    for u in keep.iter() {
        for &v in emb.rotation(u) {
            if kept[v] {
                let d = tail.len();
                tail.push(u);
                head.push(v);
                rot[u].push(d);
                dart_of.insert((u, v), d);
            }
        }
    }
    let twin: Vec<usize> = (0..tail.len()).map(|d| dart_of[&(head[d], tail[d])]).collect();
    let mut alive = vec![true; tail.len()];

    let root = ball.as_slice().first().copied();
    if let Some(root) = root {
        let in_ball = ball.mask(n);
        let mut merged = vec![false; n];
        merged[root] = true;
        loop {
            let Some(pos) = rot[root].iter().position(|&d| in_ball[head[d]] && !merged[head[d]]) else {
                break;
            };
            let d = rot[root][pos];
            let w = head[d];
            let t = twin[d];
            let wrot = std::mem::take(&mut rot[w]);
            let tpos = wrot.iter().position(|&x| x == t).unwrap();
            let seq: Vec<usize> = (1..wrot.len()).map(|k| wrot[(tpos + k) % wrot.len()]).collect();
            for &e in &seq {
                tail[e] = root;
                head[twin[e]] = root;
            }
            rot[root].splice(pos..=pos, seq);
            alive[d] = false;
            alive[t] = false;
            merged[w] = true;
            // drop loops
            let loops: Vec<usize> = rot[root].iter().copied().filter(|&e| head[e] == root).collect();
            for e in loops {
                alive[e] = false;
            }
            rot[root].retain(|&e| alive[e]);
        }
        if ball.iter().any(|v| !merged[v]) {
            return Err(GraphError::Precondition("contracted set is not connected".into()));
        }
        // drop parallel edges at the contracted vertex
        let mut seen_heads = std::collections::HashSet::new();
        let mut drop = Vec::new();
        for &e in &rot[root] {
            if !seen_heads.insert(head[e]) {
                drop.push(e);
            }
        }
        for e in drop {
            alive[e] = false;
            alive[twin[e]] = false;
        }
        for v in keep.iter() {
            rot[v].retain(|&e| alive[e]);
        }
    }

    let absorbed = |v: usize| root.is_some_and(|r| v != r && ball.contains(v));
    let mut map = vec![None; n];
    let mut next = 0;
    for v in keep.iter() {
        if !absorbed(v) {
            map[v] = Some(next);
            next += 1;
        }
    }
    let mut out = Graph::new(next);
    let mut rotation = vec![Vec::new(); next];
    for v in keep.iter() {
        let Some(nv) = map[v] else { continue };
        for &e in &rot[v] {
            let nw = map[head[e]].expect("dart head survives");
            rotation[nv].push(nw);
            if nv < nw {
                out.add_edge(nv, nw)?;
            }
        }
    }
    out.set_embedding(Embedding::new(rotation))?;
    let x = root.and_then(|r| map[r]);
    Ok((out, map, x))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn embedded_cycle(n: usize) -> Graph {
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        let mut g = Graph::from_edges(n, &edges).unwrap();
        let rot = (0..n).map(|i| vec![(i + n - 1) % n, (i + 1) % n]).collect();
        g.set_embedding(Embedding::new(rot)).unwrap();
        g
    }

    #[test]
    fn triangle_is_fixed_point() {
        let k3 = embedded_cycle(3);
        let t = triangulate_embedded(&k3).unwrap();
        assert_eq!(t.m(), 3);
    }

    #[test]
    fn square_gets_two_chords() {
        let c4 = embedded_cycle(4);
        assert_eq!(faces(&c4).unwrap().len(), 2);
        let t = triangulate_embedded(&c4).unwrap();
        // two quadrilateral faces, one chord each
        assert_eq!(t.m(), 6);
        assert!(faces(&t).unwrap().iter().all(|f| f.len() == 3));
    }

    #[test]
    fn tree_triangulates_to_euler_count() {
        let mut g = Graph::from_edges(4, &[(0, 1), (0, 2), (0, 3)]).unwrap();
        g.set_embedding(Embedding::new(vec![vec![1, 2, 3], vec![0], vec![0], vec![0]])).unwrap();
        let t = triangulate_embedded(&g).unwrap();
        assert_eq!(t.m(), 3 * 4 - 6);
        assert_eq!(faces(&t).unwrap().len(), 2 * 4 - 4);
    }

    #[test]
    fn invalid_rotation_rejected() {
        // K4 with a rotation that is not planar
        let mut g = Graph::from_edges(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap();
        let bad = Embedding::new(vec![vec![1, 2, 3], vec![0, 2, 3], vec![0, 1, 3], vec![0, 1, 2]]);
        assert!(g.set_embedding(bad).is_err());
    }

    #[test]
    fn contraction_of_cycle_arc() {
        let c6 = embedded_cycle(6);
        let keep = VertexSet::range(6);
        let ball: VertexSet = [0, 1, 5].into_iter().collect();
        let (m, map, x) = contract_into(&c6, &keep, &ball).unwrap();
        assert_eq!(m.n(), 4);
        assert_eq!(m.m(), 4);
        assert_eq!(x, map[0]);
        assert!(m.embedding().is_some());
    }
}
