//! The three graph parameters (largest component, treedepth, treewidth),
//! their witnesses, and membership checks `f(G - X) <= b`.

mod treedepth;
mod treewidth;

pub use treedepth::{
    exact_treedepth, exact_treedepth_without, verify_td_witness, verify_td_witness_without, TreedepthSolver,
    TreedepthWitness, DEFAULT_TD_BUDGET,
};
pub use treewidth::{
    clique_tree, exact_treewidth, treewidth_upper, verify_tree_decomposition, verify_tree_decomposition_without,
    TreeDecompositionWitness, EXACT_TW_MAX,
};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Graph, VertexSet};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParamError {
    #[error("component of size {size} exceeds the exact treedepth budget {budget}")]
    BudgetExceeded { size: usize, budget: usize },
    #[error("graph with {n} vertices exceeds the solver limit {max}")]
    TooLarge { n: usize, max: usize },
    #[error("treewidth bound {bound} undecided: heuristic width {upper} on {n} vertices")]
    TreewidthUndecided { bound: usize, upper: usize, n: usize },
    #[error("unknown parameter {0:?} (expected star, td or tw)")]
    UnknownParam(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Param {
    Star,
    Td,
    Tw,
}

impl FromStr for Param {
    type Err = ParamError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "star" => Ok(Param::Star),
            "td" => Ok(Param::Td),
            "tw" => Ok(Param::Tw),
            other => Err(ParamError::UnknownParam(other.to_string())),
        }
    }
}

impl fmt::Display for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Param::Star => "star",
            Param::Td => "td",
            Param::Tw => "tw",
        })
    }
}

/// Largest component order; 0 for the empty graph.
pub fn star(g: &Graph) -> usize {
    g.components().iter().map(VertexSet::len).max().unwrap_or(0)
}

/// Largest component order of `g - x`.
pub fn star_without(g: &Graph, x: &VertexSet) -> usize {
    let mut alive = vec![true; g.n()];
    for v in x.iter() {
        alive[v] = false;
    }
    g.components_within(&alive).iter().map(VertexSet::len).max().unwrap_or(0)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    Treedepth(TreedepthWitness),
    TreeDecomposition(TreeDecompositionWitness),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Membership {
    pub holds: bool,
    /// Whether the parameter value was computed exactly rather than bounded
    /// by a supplied or heuristic witness.
    pub exact: bool,
    pub certificate: Option<Witness>,
}

/// Decides `f(G - X) <= b`. A supplied witness that verifies and meets the
/// bound is accepted as is; otherwise the value is computed exactly
/// (treedepth within `td_budget`, treewidth up to `EXACT_TW_MAX` vertices).
pub fn verify_membership(
    g: &Graph,
    param: Param,
    b: usize,
    x: &VertexSet,
    witness: Option<&Witness>,
    td_budget: usize,
) -> Result<Membership, ParamError> {
    match param {
        Param::Star => Ok(Membership { holds: star_without(g, x) <= b, exact: true, certificate: None }),
        Param::Td => {
            if let Some(Witness::Treedepth(w)) = witness {
                if w.depth <= b && verify_td_witness_without(g, x, w) {
                    return Ok(Membership { holds: true, exact: false, certificate: Some(Witness::Treedepth(w.clone())) });
                }
            }
            let (t, w) = exact_treedepth_without(g, x, td_budget)?;
            Ok(Membership { holds: t <= b, exact: true, certificate: Some(Witness::Treedepth(w)) })
        }
        Param::Tw => {
            if let Some(Witness::TreeDecomposition(w)) = witness {
                if w.width <= b && verify_tree_decomposition_without(g, x, w) {
                    return Ok(Membership {
                        holds: true,
                        exact: false,
                        certificate: Some(Witness::TreeDecomposition(w.clone())),
                    });
                }
            }
            let keep = VertexSet::range(g.n()).difference(x);
            let h = g.induced(&keep);
            let relabel = |w: TreeDecompositionWitness| w.lift_from(&keep);
            let (upper, uw) = treewidth_upper(&h);
            if upper <= b {
                return Ok(Membership {
                    holds: true,
                    exact: false,
                    certificate: Some(Witness::TreeDecomposition(relabel(uw))),
                });
            }
            match exact_treewidth(&h) {
                Some((t, w)) => Ok(Membership {
                    holds: t <= b,
                    exact: true,
                    certificate: Some(Witness::TreeDecomposition(relabel(w))),
                }),
                None => Err(ParamError::TreewidthUndecided { bound: b, upper, n: h.n() }),
            }
        }
    }
}
