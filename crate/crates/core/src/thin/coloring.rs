//! Conversions between thin distributions and fractional colorings, and
//! extraction of a light deletion set.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use super::{inv, marginals_of, verify_thinness, ThinDistribution, ThinError};
use crate::graph::{Graph, Ratio, VertexSet, WeightFunction};
use crate::ratio::format_ratio;

/// Weighted family of vertex sets covering every vertex at least once.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FractionalColoring {
    pub entries: Vec<(VertexSet, Ratio)>,
}

impl FractionalColoring {
    pub fn new(entries: Vec<(VertexSet, Ratio)>) -> Self {
        let mut merged: BTreeMap<VertexSet, Ratio> = BTreeMap::new();
        for (set, w) in entries {
            *merged.entry(set).or_insert_with(Ratio::zero) += w;
        }
        FractionalColoring { entries: merged.into_iter().filter(|(_, w)| !w.is_zero()).collect() }
    }

    /// Number of colors `|κ|`.
    pub fn total(&self) -> Ratio {
        self.entries.iter().map(|(_, w)| w).sum()
    }

    pub fn covering(&self, n: usize) -> Vec<Ratio> {
        let mut cover = vec![Ratio::zero(); n];
        for (v, c) in marginals_of(&self.entries) {
            if v < n {
                cover[v] = c;
            }
        }
        cover
    }

    pub fn verify_covering(&self, n: usize) -> Result<(), ThinError> {
        match self.covering(n).into_iter().enumerate().find(|(_, c)| c < &Ratio::one()) {
            Some((vertex, c)) => Err(ThinError::CoveringViolated { vertex, cover: format_ratio(&c) }),
            None => Ok(()),
        }
    }
}

fn scale(a: usize, num_offset: i64) -> Ratio {
    Ratio::new((a as i64 + num_offset).into(), (a as i64).into())
}

/// Colors `V(G) - X` with weight `(a+1)/a * Pr(X)`; needs a
/// `1/(a+1)`-thin explicit distribution and yields `1 + 1/a` colors.
pub fn to_fractional_coloring(d: &ThinDistribution, a: usize, g: &Graph) -> Result<FractionalColoring, ThinError> {
    if a == 0 {
        return Err(ThinError::BadParameter("a must be positive".into()));
    }
    let (actual, _) = verify_thinness(d)?;
    let needed = inv(a + 1);
    if actual > needed {
        return Err(ThinError::InsufficientThinness { actual: format_ratio(&actual), needed: format_ratio(&needed) });
    }
    let all = VertexSet::range(g.n());
    let factor = scale(a, 1);
    let k = FractionalColoring::new(
        d.entries().unwrap().iter().map(|(x, p)| (all.difference(x), &factor * p)).collect(),
    );
    k.verify_covering(g.n())?;
    Ok(k)
}

/// Deletes `V(G) - Y` with probability `(a-1)/a * κ(Y)`; leftover mass goes
/// to the empty set. Needs `a >= 2` and at most `1 + 1/(a-1)` colors.
pub fn from_fractional_coloring(k: &FractionalColoring, a: usize, g: &Graph) -> Result<ThinDistribution, ThinError> {
    if a < 2 {
        return Err(ThinError::BadParameter("a must be at least 2".into()));
    }
    let limit = Ratio::new((a as i64).into(), (a as i64 - 1).into());
    let total = k.total();
    if total > limit {
        return Err(ThinError::ColoringTooLarge { total: format_ratio(&total), limit: format_ratio(&limit) });
    }
    k.verify_covering(g.n())?;
    let all = VertexSet::range(g.n());
    let factor = scale(a, -1);
    let mut entries: Vec<(VertexSet, Ratio)> = k.entries.iter().map(|(y, w)| (all.difference(y), &factor * w)).collect();
    let used: Ratio = entries.iter().map(|(_, p)| p).sum();
    entries.push((VertexSet::new(), Ratio::one() - used));
    ThinDistribution::explicit(entries, inv(a))
}

/// Support set of least weight. For a `1/a`-thin distribution its weight is at
/// most `w(V)/a`; a larger minimum is reported as insufficient thinness.
pub fn extract_breakable(d: &ThinDistribution, w: &WeightFunction, a: usize) -> Result<VertexSet, ThinError> {
    let entries = d.entries().ok_or(ThinError::NotExplicit)?;
    if a == 0 {
        return Err(ThinError::BadParameter("a must be positive".into()));
    }
    let mut best: Option<(&VertexSet, Ratio)> = None;
    for (x, _) in entries {
        let wx = w.of(x);
        if best.as_ref().is_none_or(|(_, b)| &wx < b) {
            best = Some((x, wx));
        }
    }
    let (x, wx) = best.ok_or_else(|| ThinError::Mass("0".into()))?;
    if wx * Ratio::from_integer((a as i64).into()) > w.total() {
        let (actual, _) = verify_thinness(d)?;
        return Err(ThinError::InsufficientThinness { actual: format_ratio(&actual), needed: format_ratio(&inv(a)) });
    }
    Ok(x.clone())
}
