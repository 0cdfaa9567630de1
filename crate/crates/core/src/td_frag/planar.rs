use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigUint;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::layered::{ceil_log2, LayeredSampler, Outcome, Stage, TdFragility, WitnessSampler};
use super::{block_minor, forest_distances, trigeodesic_partition, TdFragError};
use crate::graph::{mcs_ordering, triangulate_embedded, Graph, VertexSet};
use crate::parameters::TreedepthWitness;
use crate::thin::{inv, Derivation, SetSampler};

/// `384a³(3 + ⌈log2 a⌉)`.
pub fn planar_td_bound(a: usize) -> BigUint {
    BigUint::from(384u32) * BigUint::from(a).pow(3) * BigUint::from(3 + ceil_log2(a))
}

/// One component `H` of `G - X_i`: its parts (original ids, the contracted
/// vertex dropped) and a planar-chordal sampler on the quotient.
struct BlockPlan {
    parts: Vec<Vec<usize>>,
    sampler: LayeredSampler,
}

/// Statistics of the partitions built for one offset.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OffsetSummary {
    pub offset: usize,
    pub blocks: usize,
    pub max_part: usize,
    pub max_quotient: usize,
}

pub struct PlanarSampler {
    classes: Vec<VertexSet>,
    plans: Vec<Vec<BlockPlan>>,
}

impl fmt::Debug for PlanarSampler {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PlanarSampler").field("offsets", &self.classes.len()).finish()
    }
}

/// Replaces every surviving quotient vertex by the chain of its part, in
/// increasing id order; children hang below the last vertex of the nearest
/// ancestor whose chain is nonempty.
fn lift(parts: &[Vec<usize>], w: &TreedepthWitness) -> TreedepthWitness {
    let mut parent = BTreeMap::new();
    let mut memo: BTreeMap<usize, Option<usize>> = BTreeMap::new();
    fn tail(q: Option<usize>, parts: &[Vec<usize>], w: &TreedepthWitness, memo: &mut BTreeMap<usize, Option<usize>>) -> Option<usize> {
        let q = q?;
        if let Some(&t) = memo.get(&q) {
            return t;
        }
        let t = match parts[q].last() {
            Some(&v) => Some(v),
            None => tail(w.parent[&q], parts, w, memo),
        };
        memo.insert(q, t);
        t
    }
    for (&q, &p) in &w.parent {
        let mut above = tail(p, parts, w, &mut memo);
        for &v in &parts[q] {
            parent.insert(v, above);
            above = Some(v);
        }
    }
    let mut out = TreedepthWitness { depth: 0, parent };
    out.depth = out.height().expect("lifted witness is a forest");
    out
}

impl SetSampler for PlanarSampler {
    fn draw(&self, rng: &mut ChaCha8Rng) -> VertexSet {
        self.draw_with_witness(rng).0
    }
}

impl WitnessSampler for PlanarSampler {
    fn draw_with_witness(&self, rng: &mut ChaCha8Rng) -> Outcome {
        let i = rng.gen_range(0..self.classes.len());
        let mut z = self.classes[i].clone().into_vec();
        let mut ws = Vec::new();
        for plan in &self.plans[i] {
            let (y, w) = plan.sampler.draw_with_witness(rng);
            z.extend(y.iter().flat_map(|q| plan.parts[q].iter().copied()));
            ws.push(lift(&plan.parts, &w));
        }
        let depth = ws.iter().map(|w| w.depth).max().unwrap_or(0);
        let parent = ws.into_iter().flat_map(|w| w.parent).collect();
        (VertexSet::from_unsorted(z), TreedepthWitness { depth, parent })
    }
}

fn plan_block(g: &Graph, dist: &[usize], h: &VertexSet, a: usize) -> Result<(BlockPlan, usize), TdFragError> {
    let minor = block_minor(g, dist, h)?;
    let (parts, q) = if minor.graph.n() < 3 {
        (vec![h.as_slice().to_vec()], Graph::new(1))
    } else {
        let t = triangulate_embedded(&minor.graph)?;
        let p = trigeodesic_partition(&t, minor.root)?;
        if let Some(big) = p.parts.iter().find(|part| part.len() >= 12 * a) {
            return Err(TdFragError::Witness(format!("part of {} vertices, not below 12a = {}", big.len(), 12 * a)));
        }
        let parts = p.parts.iter().map(|part| part.iter().filter_map(|v| minor.to_orig[v]).collect()).collect();
        (parts, p.quotient)
    };
    let max_part = parts.iter().map(Vec::len).max().unwrap_or(0);
    let (order, chordal) = mcs_ordering(&q);
    if !chordal {
        return Err(TdFragError::NotChordal);
    }
    let sampler = LayeredSampler::new(q, order.positions(), Stage::layered(2, Stage::Paths), 2 * a)?;
    Ok((BlockPlan { parts, sampler }, max_part))
}

/// Treedepth-fragility of embedded planar graphs at rate
/// `384a³(3 + ⌈log2 a⌉)`: BFS layers mod `2a`, then per component of the
/// rest a trigeodesic partition of the triangulated block minor and the
/// planar-chordal construction on its quotient at `2a`.
pub fn td_frag_planar(g: &Graph, a: usize, seed: u64) -> Result<(TdFragility, Vec<OffsetSummary>), TdFragError> {
    if a == 0 {
        return Err(TdFragError::BadParameter("a must be positive".into()));
    }
    if g.embedding().is_none() {
        return Err(TdFragError::Graph(crate::graph::GraphError::MissingEmbedding));
    }
    let period = 2 * a;
    let dist = forest_distances(g);
    let classes: Vec<VertexSet> = (0..period).map(|i| (0..g.n()).filter(|&v| dist[v] % period == i).collect()).collect();
    let mut plans = Vec::with_capacity(period);
    let mut summaries = Vec::with_capacity(period);
    for (i, x) in classes.iter().enumerate() {
        let mut row = Vec::new();
        let mut summary = OffsetSummary { offset: i, blocks: 0, max_part: 0, max_quotient: 0 };
        for h in g.components_within(&g.alive_mask(x)) {
            let (plan, max_part) = plan_block(g, &dist, &h, a)?;
            summary.blocks += 1;
            summary.max_part = summary.max_part.max(max_part);
            summary.max_quotient = summary.max_quotient.max(plan.parts.len());
            row.push(plan);
        }
        plans.push(row);
        summaries.push(summary);
    }
    let derivation = Derivation::Compose {
        outer: Box::new(Derivation::leaf(format!("bfs layers mod {period}"), inv(period))),
        inner: Box::new(Stage::layered(2, Stage::Paths).derivation(period)),
    };
    let sampler = Arc::new(PlanarSampler { classes, plans });
    let f = TdFragility::new("planar", a, planar_td_bound(a), "384a³(3+⌈log2 a⌉)".into(), derivation, sampler, seed);
    Ok((f, summaries))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::generate::{grid, random_triangulation};
    use crate::ratio::ratio;

    #[test]
    fn bound_values() {
        assert_eq!(planar_td_bound(1), BigUint::from(1152u32));
        assert_eq!(planar_td_bound(2), BigUint::from(384u32 * 8 * 4));
    }

    #[test]
    fn lift_replaces_parts_by_chains() {
        let parts = vec![vec![0, 1], vec![], vec![2, 3, 4]];
        let w = TreedepthWitness { depth: 3, parent: [(0, None), (1, Some(0)), (2, Some(1))].into_iter().collect() };
        let l = lift(&parts, &w);
        assert_eq!(l.parent[&2], Some(1));
        assert_eq!(l.parent[&0], None);
        assert_eq!(l.depth, 5);
    }

    #[test]
    fn planar_outcomes_verify() {
        for (k, g) in [grid(6, 6), random_triangulation(50, 30, 3), random_triangulation(60, 0, 9)].iter().enumerate() {
            for a in 1..=3 {
                let (f, summaries) = td_frag_planar(g, a, k as u64).unwrap();
                assert_eq!(f.distribution.eps(), ratio(1, a as i64));
                assert!(summaries.iter().all(|s| s.max_part < 12 * a));
                for i in 0..40 {
                    let (z, w) = f.outcome(11, i);
                    assert_eq!(z, f.distribution.sample(11, i));
                    f.check_outcome(g, &z, &w).unwrap();
                }
            }
        }
    }

    #[test]
    fn requires_embedding() {
        let g = crate::graph::generate::complete(4);
        assert!(td_frag_planar(&g, 1, 0).is_err());
    }
}
