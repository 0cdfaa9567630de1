//! Probability distributions on vertex subsets with certified per-vertex
//! marginals: construction, exact verification, composition and sampling.

mod coloring;

pub use coloring::{extract_breakable, from_fractional_coloring, to_fractional_coloring, FractionalColoring};

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Ratio, VertexSet};
use crate::ratio::{format_ratio, to_f64};

/// Default number of (set, probability) pairs above which compositions are
/// kept as samplers instead of being expanded.
pub const EXPLICIT_LIMIT: usize = 10_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ThinError {
    #[error("expected {expected} sets, got {got}")]
    WrongCount { expected: usize, got: usize },
    #[error("sets overlap in vertex {0}")]
    Overlap(usize),
    #[error("negative probability for set {0}")]
    NegativeProbability(VertexSet),
    #[error("probabilities sum to {0}, not 1")]
    Mass(String),
    #[error("vertex {vertex} has marginal {marginal} above the claimed {eps}")]
    ThinnessExceeded { vertex: usize, marginal: String, eps: String },
    #[error("operation needs an explicit distribution")]
    NotExplicit,
    #[error("no inner distribution for support set {0}")]
    MissingFamily(VertexSet),
    #[error("distribution is {actual}-thin but {needed}-thin is required")]
    InsufficientThinness { actual: String, needed: String },
    #[error("coloring uses {total} colors, more than {limit}")]
    ColoringTooLarge { total: String, limit: String },
    #[error("vertex {vertex} is covered only {cover}")]
    CoveringViolated { vertex: usize, cover: String },
    #[error("{0}")]
    BadParameter(String),
}

/// How a sampler's marginal bound was obtained. The bound of a composition is
/// the sum of the bounds of its two stages; `Max` collects alternatives (one
/// per component, or one per outer outcome).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum Derivation {
    Leaf {
        label: String,
        #[serde(with = "crate::ratio")]
        eps: Ratio,
    },
    Compose {
        outer: Box<Derivation>,
        inner: Box<Derivation>,
    },
    Max {
        parts: Vec<Derivation>,
    },
}

impl Derivation {
    pub fn leaf(label: impl Into<String>, eps: Ratio) -> Self {
        Derivation::Leaf { label: label.into(), eps }
    }

    pub fn bound(&self) -> Ratio {
        match self {
            Derivation::Leaf { eps, .. } => eps.clone(),
            Derivation::Compose { outer, inner } => outer.bound() + inner.bound(),
            Derivation::Max { parts } => parts.iter().map(Derivation::bound).max().unwrap_or_else(Ratio::zero),
        }
    }
}

/// Source of random vertex sets for sampler-backed distributions.
pub trait SetSampler: Send + Sync + fmt::Debug {
    fn draw(&self, rng: &mut ChaCha8Rng) -> VertexSet;
}

#[derive(Clone, Debug)]
pub struct Explicit {
    entries: Vec<(VertexSet, Ratio)>,
    eps: Ratio,
}

#[derive(Clone, Debug)]
pub struct Sampler {
    seed: u64,
    derivation: Derivation,
    sampler: Arc<dyn SetSampler>,
}

#[derive(Clone, Debug)]
pub enum ThinDistribution {
    Explicit(Explicit),
    Sampler(Sampler),
}

fn merge(entries: Vec<(VertexSet, Ratio)>) -> Result<Vec<(VertexSet, Ratio)>, ThinError> {
    let mut merged: BTreeMap<VertexSet, Ratio> = BTreeMap::new();
    for (set, p) in entries {
        if p < Ratio::zero() {
            return Err(ThinError::NegativeProbability(set));
        }
        *merged.entry(set).or_insert_with(Ratio::zero) += p;
    }
    Ok(merged.into_iter().filter(|(_, p)| !p.is_zero()).collect())
}

pub fn marginals_of(entries: &[(VertexSet, Ratio)]) -> BTreeMap<usize, Ratio> {
    let mut m: BTreeMap<usize, Ratio> = BTreeMap::new();
    for (set, p) in entries {
        for v in set.iter() {
            *m.entry(v).or_insert_with(Ratio::zero) += p;
        }
    }
    m
}

impl ThinDistribution {
    /// Explicit distribution, certified on construction: duplicate sets are
    /// merged, the mass must be exactly 1 and every marginal at most `eps`.
    pub fn explicit(entries: Vec<(VertexSet, Ratio)>, eps: Ratio) -> Result<Self, ThinError> {
        let entries = merge(entries)?;
        let total: Ratio = entries.iter().map(|(_, p)| p).sum();
        if !total.is_one() {
            return Err(ThinError::Mass(format_ratio(&total)));
        }
        let d = Explicit { entries, eps };
        if let Some((v, m)) = marginals_of(&d.entries).into_iter().find(|(_, m)| m > &d.eps) {
            return Err(ThinError::ThinnessExceeded { vertex: v, marginal: format_ratio(&m), eps: format_ratio(&d.eps) });
        }
        Ok(ThinDistribution::Explicit(d))
    }

    /// Point mass on one set; its thinness is 1 unless the set is empty.
    pub fn point(set: VertexSet) -> Self {
        let eps = if set.is_empty() { Ratio::zero() } else { Ratio::one() };
        ThinDistribution::Explicit(Explicit { entries: vec![(set, Ratio::one())], eps })
    }

    pub fn sampler(seed: u64, derivation: Derivation, sampler: Arc<dyn SetSampler>) -> Self {
        ThinDistribution::Sampler(Sampler { seed, derivation, sampler })
    }

    /// Certified marginal bound.
    pub fn eps(&self) -> Ratio {
        match self {
            ThinDistribution::Explicit(d) => d.eps.clone(),
            ThinDistribution::Sampler(s) => s.derivation.bound(),
        }
    }

    pub fn entries(&self) -> Option<&[(VertexSet, Ratio)]> {
        match self {
            ThinDistribution::Explicit(d) => Some(&d.entries),
            ThinDistribution::Sampler(_) => None,
        }
    }

    pub fn is_explicit(&self) -> bool {
        matches!(self, ThinDistribution::Explicit(_))
    }

    pub fn seed(&self) -> Option<u64> {
        match self {
            ThinDistribution::Explicit(_) => None,
            ThinDistribution::Sampler(s) => Some(s.seed),
        }
    }

    pub fn derivation(&self) -> Derivation {
        match self {
            ThinDistribution::Explicit(d) => Derivation::leaf("explicit", d.eps.clone()),
            ThinDistribution::Sampler(s) => s.derivation.clone(),
        }
    }

    pub fn support_len(&self) -> Option<usize> {
        self.entries().map(<[_]>::len)
    }

    pub fn draw(&self, rng: &mut ChaCha8Rng) -> VertexSet {
        match self {
            ThinDistribution::Explicit(d) => {
                let u: f64 = rng.gen();
                let mut acc = 0.0;
                for (set, p) in &d.entries {
                    acc += to_f64(p);
                    if u < acc {
                        return set.clone();
                    }
                }
                d.entries.last().map(|(s, _)| s.clone()).unwrap_or_default()
            }
            ThinDistribution::Sampler(s) => s.sampler.draw(rng),
        }
    }

    /// The `index`-th sample of the stream determined by `seed`; independent
    /// of how many other samples are drawn.
    pub fn sample(&self, seed: u64, index: u64) -> VertexSet {
        self.draw(&mut stream_rng(seed, index))
    }

    pub fn to_file(&self, samples: usize, seed: u64) -> DistributionFile {
        match self {
            ThinDistribution::Explicit(d) => DistributionFile::Explicit {
                eps: d.eps.clone(),
                entries: d.entries.iter().map(|(set, prob)| Entry { set: set.clone(), prob: prob.clone() }).collect(),
            },
            ThinDistribution::Sampler(s) => DistributionFile::Sampler {
                eps: s.derivation.bound(),
                seed: s.seed,
                derivation: s.derivation.clone(),
                samples: (0..samples as u64).map(|i| self.sample(seed, i)).collect(),
            },
        }
    }
}

/// Generator for sample `index` of the stream determined by `seed`.
pub fn stream_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Uniform distribution on `a` pairwise disjoint sets: each non-empty set has
/// probability `1/a` and the empty set collects `t/a` for the `t` empty ones.
pub fn uniform_on_disjoint(sets: &[VertexSet], a: usize) -> Result<ThinDistribution, ThinError> {
    if sets.len() != a {
        return Err(ThinError::WrongCount { expected: a, got: sets.len() });
    }
    let mut seen = BTreeMap::new();
    for set in sets {
        for v in set.iter() {
            if seen.insert(v, ()).is_some() {
                return Err(ThinError::Overlap(v));
            }
        }
    }
    let p = Ratio::new(1.into(), (a as i64).into());
    ThinDistribution::explicit(sets.iter().map(|s| (s.clone(), p.clone())).collect(), p)
}

/// Exact maximum marginal and the lowest vertex attaining it.
pub fn verify_thinness(d: &ThinDistribution) -> Result<(Ratio, Option<usize>), ThinError> {
    let entries = d.entries().ok_or(ThinError::NotExplicit)?;
    let mut best: (Ratio, Option<usize>) = (Ratio::zero(), None);
    for (v, m) in marginals_of(entries) {
        if best.1.is_none() || m > best.0 {
            best = (m, Some(v));
        }
    }
    Ok(best)
}

#[derive(Debug)]
struct ComposeSampler {
    outer: ThinDistribution,
    inner: BTreeMap<VertexSet, ThinDistribution>,
}

impl SetSampler for ComposeSampler {
    fn draw(&self, rng: &mut ChaCha8Rng) -> VertexSet {
        let x = self.outer.draw(rng);
        let y = self.inner[&x].draw(rng);
        x.union(&y)
    }
}

/// Distribution of `X ∪ Y` where `X ~ d1` and `Y ~ family[X]`. The marginal
/// bound is `eps(d1)` plus the largest bound in the family.
pub fn compose(
    d1: &ThinDistribution,
    family: &BTreeMap<VertexSet, ThinDistribution>,
    explicit_limit: usize,
    seed: u64,
) -> Result<ThinDistribution, ThinError> {
    let outer = d1.entries().ok_or(ThinError::NotExplicit)?;
    let mut parts = Vec::with_capacity(outer.len());
    let mut pairs = 0usize;
    let mut all_explicit = true;
    for (x, _) in outer {
        let d2 = family.get(x).ok_or_else(|| ThinError::MissingFamily(x.clone()))?;
        parts.push(d2.derivation());
        match d2.support_len() {
            Some(k) => pairs = pairs.saturating_add(k),
            None => all_explicit = false,
        }
    }
    let inner_eps = parts.iter().map(Derivation::bound).max().unwrap_or_else(Ratio::zero);
    if all_explicit && pairs <= explicit_limit {
        let mut entries = Vec::with_capacity(pairs);
        for (x, px) in outer {
            for (y, py) in family[x].entries().unwrap() {
                entries.push((x.union(y), px * py));
            }
        }
        return ThinDistribution::explicit(entries, d1.eps() + inner_eps);
    }
    let derivation = Derivation::Compose { outer: Box::new(d1.derivation()), inner: Box::new(Derivation::Max { parts }) };
    let inner = outer.iter().map(|(x, _)| (x.clone(), family[x].clone())).collect();
    Ok(ThinDistribution::sampler(seed, derivation, Arc::new(ComposeSampler { outer: d1.clone(), inner })))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Entry {
    pub set: VertexSet,
    #[serde(with = "crate::ratio")]
    pub prob: Ratio,
}

/// On-disk form of a distribution. Sampler files carry their derivation and a
/// batch of drawn sets instead of a support.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DistributionFile {
    Explicit {
        #[serde(with = "crate::ratio")]
        eps: Ratio,
        entries: Vec<Entry>,
    },
    Sampler {
        #[serde(with = "crate::ratio")]
        eps: Ratio,
        seed: u64,
        derivation: Derivation,
        #[serde(default)]
        samples: Vec<VertexSet>,
    },
}

impl DistributionFile {
    pub fn eps(&self) -> &Ratio {
        match self {
            DistributionFile::Explicit { eps, .. } | DistributionFile::Sampler { eps, .. } => eps,
        }
    }

    /// Rebuilds and re-certifies an explicit distribution.
    pub fn to_explicit(&self) -> Result<ThinDistribution, ThinError> {
        match self {
            DistributionFile::Explicit { eps, entries } => {
                ThinDistribution::explicit(entries.iter().map(|e| (e.set.clone(), e.prob.clone())).collect(), eps.clone())
            }
            DistributionFile::Sampler { .. } => Err(ThinError::NotExplicit),
        }
    }
}

/// `1/a` as an exact rational.
pub fn inv(a: usize) -> Ratio {
    Ratio::new(1.into(), (a as i64).into())
}
