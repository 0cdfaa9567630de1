use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::Zero;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{td_witness_join, TdFragError};
use crate::graph::{greedy_chordalize, mcs_ordering, Graph, Ratio, VertexSet};
use crate::parameters::{verify_td_witness_without, verify_tree_decomposition, TreeDecompositionWitness, TreedepthWitness};
use crate::thin::{inv, stream_rng, Derivation, SetSampler, ThinDistribution};

/// One level of the layered recursion.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Stage {
    /// Nothing is deleted; the graph must have no edges.
    Edgeless,
    /// Every component must be a path; one position class mod the rate is deleted.
    Paths,
    /// BFS layers mod twice the rate from the first vertex of the ordering;
    /// each surviving layer recurses at twice the rate.
    Layered(Box<Stage>),
}

impl Stage {
    pub fn layered(levels: usize, base: Stage) -> Stage {
        (0..levels).fold(base, |s, _| Stage::Layered(Box::new(s)))
    }

    pub fn derivation(&self, rate: usize) -> Derivation {
        match self {
            Stage::Edgeless => Derivation::leaf("edgeless", Ratio::zero()),
            Stage::Paths => Derivation::leaf(format!("path positions mod {rate}"), inv(rate)),
            Stage::Layered(inner) => Derivation::Compose {
                outer: Box::new(Derivation::leaf(format!("bfs layers mod {}", 2 * rate), inv(2 * rate))),
                inner: Box::new(inner.derivation(2 * rate)),
            },
        }
    }
}

pub type Outcome = (VertexSet, TreedepthWitness);

/// Sampler that also produces a treedepth witness for the complement of each draw.
pub trait WitnessSampler: SetSampler {
    fn draw_with_witness(&self, rng: &mut ChaCha8Rng) -> Outcome;
}

/// Witness restricted to `set`: each vertex hangs below its nearest ancestor in `set`.
pub fn restrict_witness(w: &TreedepthWitness, set: &VertexSet) -> TreedepthWitness {
    let parent = set
        .iter()
        .map(|v| {
            let mut p = w.parent[&v];
            while let Some(x) = p {
                if set.contains(x) {
                    break;
                }
                p = w.parent[&x];
            }
            (v, p)
        })
        .collect();
    TreedepthWitness { depth: w.depth, parent }
}

fn union_witnesses(ws: Vec<TreedepthWitness>) -> TreedepthWitness {
    let depth = ws.iter().map(|w| w.depth).max().unwrap_or(0);
    let parent = ws.into_iter().flat_map(|w| w.parent).collect();
    TreedepthWitness { depth, parent }
}

fn lift_witness(w: &TreedepthWitness, ids: &[usize]) -> TreedepthWitness {
    TreedepthWitness { depth: w.depth, parent: w.parent.iter().map(|(&v, p)| (ids[v], p.map(|p| ids[p]))).collect() }
}

/// Balanced elimination of a path given in order: the middle vertex is the
/// root of each segment, for height `⌈log2(len + 1)⌉`.
pub fn path_witness(seq: &[usize]) -> TreedepthWitness {
    fn build(seq: &[usize], up: Option<usize>, out: &mut BTreeMap<usize, Option<usize>>) -> usize {
        if seq.is_empty() {
            return 0;
        }
        let mid = seq.len() / 2;
        out.insert(seq[mid], up);
        1 + build(&seq[..mid], Some(seq[mid]), out).max(build(&seq[mid + 1..], Some(seq[mid]), out))
    }
    let mut parent = BTreeMap::new();
    let depth = build(seq, None, &mut parent);
    TreedepthWitness { depth, parent }
}

/// Vertices of a path component in order from its lower-id end.
fn path_order(g: &Graph, comp: &VertexSet) -> Option<Vec<usize>> {
    let inside = |v: usize| comp.contains(v);
    let deg = |v: usize| g.neighbors(v).iter().filter(|&&u| inside(u)).count();
    let start = comp.iter().find(|&v| deg(v) <= 1)?;
    let mut seq = vec![start];
    let mut prev = usize::MAX;
    let mut cur = start;
    while let Some(&next) = g.neighbors(cur).iter().find(|&&u| inside(u) && u != prev) {
        if seq.len() >= comp.len() {
            return None;
        }
        seq.push(next);
        prev = cur;
        cur = next;
    }
    (seq.len() == comp.len() && comp.iter().all(|v| deg(v) <= 2)).then_some(seq)
}

/// BFS layers of one component from its earliest vertex in `pos`.
fn component_layers(g: &Graph, comp: &VertexSet, pos: &[usize]) -> Vec<VertexSet> {
    let root = comp.iter().min_by_key(|&v| pos[v]).unwrap();
    let dist = g.bfs_distances(root);
    let depth = comp.iter().map(|v| dist[v]).max().unwrap();
    let mut layers = vec![Vec::new(); depth + 1];
    for v in comp.iter() {
        layers[dist[v]].push(v);
    }
    layers.into_iter().map(VertexSet::from_unsorted).collect()
}

fn sub_positions(layer: &VertexSet, pos: &[usize]) -> Vec<usize> {
    layer.iter().map(|v| pos[v]).collect()
}

/// Checks every structural precondition the stage relies on, over all layers.
pub fn validate_stage(stage: &Stage, g: &Graph, pos: &[usize]) -> Result<(), TdFragError> {
    match stage {
        Stage::Edgeless => {
            if g.m() > 0 {
                return Err(TdFragError::Witness(format!("a layer of {} vertices still has edges", g.n())));
            }
        }
        Stage::Paths => {
            for comp in g.components() {
                if path_order(g, &comp).is_none() {
                    return Err(TdFragError::NotOuterplanar(format!("layer component {comp} is not a path")));
                }
            }
        }
        Stage::Layered(inner) => {
            for comp in g.components() {
                let layers = component_layers(g, &comp, pos);
                for (j, layer) in layers.iter().enumerate() {
                    if j > 0 {
                        let prev = layers[j - 1].mask(g.n());
                        let alive = layer.mask(g.n());
                        for c in g.components_within(&alive) {
                            let k: VertexSet =
                                c.iter().flat_map(|v| g.neighbors(v).iter().copied()).filter(|&u| prev[u]).collect();
                            if !g.is_clique(k.as_slice()) {
                                return Err(TdFragError::Join(format!("neighborhood {k} of a layer component is not a clique")));
                            }
                        }
                    }
                    validate_stage(inner, &g.induced(layer), &sub_positions(layer, pos))?;
                }
            }
        }
    }
    Ok(())
}

/// One draw of the stage on `g` at `rate`, with a witness for `g - Z`.
pub fn draw_stage(stage: &Stage, g: &Graph, pos: &[usize], rate: usize, rng: &mut ChaCha8Rng) -> Result<Outcome, TdFragError> {
    match stage {
        Stage::Edgeless => {
            if g.m() > 0 {
                return Err(TdFragError::Witness("edgeless stage reached a graph with edges".into()));
            }
            let parent = (0..g.n()).map(|v| (v, None)).collect();
            Ok((VertexSet::new(), TreedepthWitness { depth: usize::from(g.n() > 0), parent }))
        }
        Stage::Paths => {
            let mut z = Vec::new();
            let mut ws = Vec::new();
            for comp in g.components() {
                let seq = path_order(g, &comp).ok_or_else(|| TdFragError::NotOuterplanar(format!("component {comp} is not a path")))?;
                let off = rng.gen_range(0..rate);
                for segment in seq.iter().enumerate().collect::<Vec<_>>().split(|(p, _)| p % rate == off) {
                    let verts: Vec<usize> = segment.iter().map(|(_, &v)| v).collect();
                    ws.push(path_witness(&verts));
                }
                z.extend(seq.iter().enumerate().filter(|(p, _)| p % rate == off).map(|(_, &v)| v));
            }
            Ok((VertexSet::from_unsorted(z), union_witnesses(ws)))
        }
        Stage::Layered(inner) => {
            let period = 2 * rate;
            let mut z = Vec::new();
            let mut blocks = Vec::new();
            for comp in g.components() {
                let layers = component_layers(g, &comp, pos);
                let off = rng.gen_range(0..period);
                let mut block: Option<TreedepthWitness> = None;
                let mut prev = vec![false; g.n()];
                for (j, layer) in layers.iter().enumerate() {
                    if j % period == off {
                        z.extend(layer.iter());
                        blocks.extend(block.take());
                        prev = vec![false; g.n()];
                        continue;
                    }
                    let sub = g.induced(layer);
                    let (y, w) = draw_stage(inner, &sub, &sub_positions(layer, pos), period, rng)?;
                    let y: VertexSet = y.iter().map(|v| layer.as_slice()[v]).collect();
                    let w = lift_witness(&w, layer.as_slice());
                    z.extend(y.iter());
                    let survivors = layer.difference(&y);
                    block = Some(match block {
                        None => w,
                        Some(h) => {
                            let parts: Vec<(VertexSet, TreedepthWitness)> = g
                                .components_within(&survivors.mask(g.n()))
                                .into_iter()
                                .map(|c| {
                                    let k: Vec<usize> =
                                        c.iter().flat_map(|v| g.neighbors(v).iter().copied()).filter(|&u| prev[u]).collect();
                                    let hc = c.union(&VertexSet::from_unsorted(k));
                                    let wc = restrict_witness(&w, &c);
                                    (hc, wc)
                                })
                                .collect();
                            td_witness_join(g, &h, &parts, true)?
                        }
                    });
                    prev = survivors.mask(g.n());
                }
                blocks.extend(block);
            }
            Ok((VertexSet::from_unsorted(z), union_witnesses(blocks)))
        }
    }
}

/// Stage run on a chordal supergraph `h` of the input, with its ordering.
pub struct LayeredSampler {
    h: Graph,
    pos: Vec<usize>,
    stage: Stage,
    rate: usize,
}

impl fmt::Debug for LayeredSampler {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LayeredSampler").field("n", &self.h.n()).field("stage", &self.stage).field("rate", &self.rate).finish()
    }
}

impl LayeredSampler {
    /// Validates the stage on `h` once; later draws cannot fail.
    pub fn new(h: Graph, pos: Vec<usize>, stage: Stage, rate: usize) -> Result<Self, TdFragError> {
        validate_stage(&stage, &h, &pos)?;
        Ok(LayeredSampler { h, pos, stage, rate })
    }
}

impl SetSampler for LayeredSampler {
    fn draw(&self, rng: &mut ChaCha8Rng) -> VertexSet {
        self.draw_with_witness(rng).0
    }
}

impl WitnessSampler for LayeredSampler {
    fn draw_with_witness(&self, rng: &mut ChaCha8Rng) -> Outcome {
        draw_stage(&self.stage, &self.h, &self.pos, self.rate, rng).expect("stage validated at construction")
    }
}

/// A treedepth-fragility construction: the distribution, its depth bound,
/// and witnesses for every outcome.
#[derive(Clone)]
pub struct TdFragility {
    pub class: String,
    pub a: usize,
    pub bound: BigUint,
    pub bound_formula: String,
    /// Treewidth the bounded-treewidth construction actually ran with.
    pub t_used: Option<usize>,
    pub distribution: ThinDistribution,
    pub sampler: Arc<dyn WitnessSampler>,
    pub seed: u64,
}

impl fmt::Debug for TdFragility {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TdFragility").field("class", &self.class).field("a", &self.a).field("bound", &self.bound).finish()
    }
}

impl TdFragility {
    pub fn new(
        class: &str,
        a: usize,
        bound: BigUint,
        bound_formula: String,
        derivation: Derivation,
        sampler: Arc<dyn WitnessSampler>,
        seed: u64,
    ) -> Self {
        let set_sampler: Arc<dyn SetSampler> = Arc::new(Shim(sampler.clone()));
        TdFragility {
            class: class.into(),
            a,
            bound,
            bound_formula,
            t_used: None,
            distribution: ThinDistribution::sampler(seed, derivation, set_sampler),
            sampler,
            seed,
        }
    }

    /// Sample `index` of the stream for `seed`, with its witness; the set
    /// equals `distribution.sample(seed, index)`.
    pub fn outcome(&self, seed: u64, index: u64) -> Outcome {
        self.sampler.draw_with_witness(&mut stream_rng(seed, index))
    }

    /// Checks one outcome against `g`: the witness covers `G - Z`, respects
    /// every edge, and its depth is within the bound.
    pub fn check_outcome(&self, g: &Graph, z: &VertexSet, w: &TreedepthWitness) -> Result<(), TdFragError> {
        if !verify_td_witness_without(g, z, w) {
            return Err(TdFragError::Witness("witness does not verify against G - Z".into()));
        }
        if BigUint::from(w.depth) > self.bound {
            return Err(TdFragError::Witness(format!("witness depth {} exceeds the bound {}", w.depth, self.bound)));
        }
        Ok(())
    }
}

/// Machine-readable summary of a run.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TdReport {
    pub class: String,
    pub a: usize,
    pub bound_formula: String,
    pub bound_value: String,
    pub thinness_certificate: String,
    pub t_used: Option<usize>,
    pub outcomes_sampled: u64,
    pub witness_files: Vec<String>,
    pub verifier_verdicts: Vec<String>,
}

impl TdReport {
    pub fn all_pass(&self) -> bool {
        self.verifier_verdicts.iter().all(|v| v.ends_with("ok"))
    }
}

impl TdFragility {
    /// Draws `samples` outcomes for `seed` and checks each one.
    pub fn report(&self, g: &Graph, seed: u64, samples: u64) -> TdReport {
        let verifier_verdicts = (0..samples)
            .map(|i| {
                let (z, w) = self.outcome(seed, i);
                match self.check_outcome(g, &z, &w) {
                    Ok(()) => format!("outcome {i}: depth {} ok", w.depth),
                    Err(e) => format!("outcome {i}: {e}"),
                }
            })
            .collect();
        TdReport {
            class: self.class.clone(),
            a: self.a,
            bound_formula: self.bound_formula.clone(),
            bound_value: self.bound.to_string(),
            thinness_certificate: self.distribution.eps().to_string(),
            t_used: self.t_used,
            outcomes_sampled: samples,
            witness_files: Vec::new(),
            verifier_verdicts,
        }
    }
}

#[derive(Debug)]
struct Shim(Arc<dyn WitnessSampler>);

impl SetSampler for Shim {
    fn draw(&self, rng: &mut ChaCha8Rng) -> VertexSet {
        self.0.draw(rng)
    }
}

pub fn ceil_log2(a: usize) -> u32 {
    if a <= 1 {
        0
    } else {
        usize::BITS - (a - 1).leading_zeros()
    }
}

/// `2^(t(t+1)/2 + 1) a^t`.
pub fn tw_td_bound(t: usize, a: usize) -> BigUint {
    (BigUint::from(1u32) << (t * (t + 1) / 2 + 1)) * BigUint::from(a).pow(t as u32)
}

/// `2a(1 + ⌈log2 a⌉)`.
pub fn outerplanar_bound(a: usize) -> BigUint {
    BigUint::from(2 * a * (1 + ceil_log2(a) as usize))
}

/// `8a²(2 + ⌈log2 a⌉)`.
pub fn planar_chordal_bound(a: usize) -> BigUint {
    BigUint::from(8 * a * a * (2 + ceil_log2(a) as usize))
}

fn chordal_with_ordering(g: &Graph) -> (Graph, Vec<usize>, bool) {
    let (order, chordal) = mcs_ordering(g);
    let mut h = g.clone();
    h.clear_embedding();
    (h, order.positions(), chordal)
}

/// Treedepth-fragility of graphs of treewidth at most `t`. A non-chordal
/// input is completed along the supplied decomposition, or chordalized by
/// min-fill when none is given; the recursion depth is the larger of `t`
/// and the clique number of the chordal graph minus one.
pub fn td_frag_tw(
    g: &Graph,
    t: usize,
    a: usize,
    decomposition: Option<&TreeDecompositionWitness>,
    seed: u64,
) -> Result<TdFragility, TdFragError> {
    if a == 0 {
        return Err(TdFragError::BadParameter("a must be positive".into()));
    }
    let (h, pos) = match chordal_with_ordering(g) {
        (h, pos, true) => (h, pos),
        (mut h, _, false) => {
            match decomposition {
                Some(w) => {
                    if w.width > t || !verify_tree_decomposition(g, w) {
                        return Err(TdFragError::Witness(format!("width certificate fails for t = {t}")));
                    }
                    for bag in &w.bags {
                        let b = bag.as_slice();
                        for i in 0..b.len() {
                            for j in i + 1..b.len() {
                                h.ensure_edge(b[i], b[j]);
                            }
                        }
                    }
                }
                None => h = greedy_chordalize(g).0,
            }
            let (order, chordal) = mcs_ordering(&h);
            debug_assert!(chordal);
            (h, order.positions())
        }
    };
    let order = {
        let mut o: Vec<usize> = (0..h.n()).collect();
        o.sort_by_key(|&v| pos[v]);
        crate::graph::EliminationOrdering(o)
    };
    let omega = h.clique_number_along(&order);
    let t_used = t.max(omega.saturating_sub(1));
    let stage = Stage::layered(t_used, Stage::Edgeless);
    let derivation = stage.derivation(a);
    let bound = tw_td_bound(t_used, a);
    let formula = format!("2^(t(t+1)/2+1)·a^t with t = {t_used}");
    let sampler = Arc::new(LayeredSampler::new(h, pos, stage, a)?);
    let mut out = TdFragility::new("treewidth", a, bound, formula, derivation, sampler, seed);
    out.t_used = Some(t_used);
    Ok(out)
}

/// Treedepth-fragility of outerplanar graphs at rate `2a(1 + ⌈log2 a⌉)`.
pub fn td_frag_outerplanar(g: &Graph, a: usize, seed: u64) -> Result<TdFragility, TdFragError> {
    if a == 0 {
        return Err(TdFragError::BadParameter("a must be positive".into()));
    }
    let (h, pos) = match chordal_with_ordering(g) {
        (h, pos, true) => (h, pos),
        _ => {
            let (h, _) = greedy_chordalize(g);
            let (order, _) = mcs_ordering(&h);
            (h, order.positions())
        }
    };
    let stage = Stage::layered(1, Stage::Paths);
    let derivation = stage.derivation(a);
    let sampler = Arc::new(LayeredSampler::new(h, pos, stage, a)?);
    Ok(TdFragility::new("outerplanar", a, outerplanar_bound(a), "2a(1+⌈log2 a⌉)".into(), derivation, sampler, seed))
}

/// Treedepth-fragility of planar chordal graphs at rate `8a²(2 + ⌈log2 a⌉)`.
pub fn td_frag_planar_chordal(g: &Graph, a: usize, seed: u64) -> Result<TdFragility, TdFragError> {
    if a == 0 {
        return Err(TdFragError::BadParameter("a must be positive".into()));
    }
    let (h, pos, chordal) = chordal_with_ordering(g);
    if !chordal {
        return Err(TdFragError::NotChordal);
    }
    let stage = Stage::layered(2, Stage::Paths);
    let derivation = stage.derivation(a);
    let sampler = Arc::new(LayeredSampler::new(h, pos, stage, a)?);
    Ok(TdFragility::new("planar chordal", a, planar_chordal_bound(a), "8a²(2+⌈log2 a⌉)".into(), derivation, sampler, seed))
}
