use std::str::FromStr;

use fragile::graph::{write_graph, Graph};
use fragile::parameters::{Param, Witness};
use fragile::td_frag::{
    planar_tw_layering, td_frag_outerplanar, td_frag_planar, td_frag_planar_chordal, td_frag_tw, TdFragility,
};
use fragile::thin::DistributionFile;
use fragile::tree_partition::{star_fragile_planar, star_fragile_tw};

use crate::doc::{OutcomeRecord, RunDocument};
use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Class {
    Tw(usize),
    Outerplanar,
    Planar,
    PlanarChordal,
}

impl FromStr for Class {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "outerplanar" => Ok(Class::Outerplanar),
            "planar" => Ok(Class::Planar),
            "planar-chordal" => Ok(Class::PlanarChordal),
            other => other
                .strip_prefix("tw:")
                .and_then(|k| k.parse().ok())
                .map(Class::Tw)
                .ok_or_else(|| format!("unknown class {other:?} (expected tw:K, outerplanar, planar or planar-chordal)")),
        }
    }
}

impl std::fmt::Display for Class {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Class::Tw(k) => write!(f, "tw:{k}"),
            Class::Outerplanar => f.write_str("outerplanar"),
            Class::Planar => f.write_str("planar"),
            Class::PlanarChordal => f.write_str("planar-chordal"),
        }
    }
}

pub struct Request {
    pub param: Param,
    pub class: Class,
    pub a: usize,
    pub seed: u64,
    pub samples: usize,
    pub delta: Option<usize>,
}

fn td_document(g: &Graph, req: &Request, f: TdFragility) -> RunDocument {
    let outcomes = (0..req.samples as u64)
        .map(|i| {
            let (set, w) = f.outcome(req.seed, i);
            OutcomeRecord { set, witness: Some(Witness::Treedepth(w)) }
        })
        .collect();
    RunDocument {
        graph: write_graph(g),
        param: req.param,
        class: req.class.to_string(),
        a: req.a,
        seed: req.seed,
        t: f.t_used,
        bound: f.bound.to_string(),
        bound_formula: f.bound_formula.clone(),
        distribution: f.distribution.to_file(req.samples, req.seed),
        outcomes,
        report: None,
    }
}

fn unsupported(req: &Request) -> CliError {
    CliError::usage(format!("no construction for --param {} with --class {}", req.param, req.class))
}

/// Runs the construction selected by `--param` and `--class`.
pub fn build(g: &Graph, req: &Request) -> Result<RunDocument, CliError> {
    let delta = || req.delta.unwrap_or_else(|| g.max_degree().max(3));
    match (req.param, req.class) {
        (Param::Tw, Class::Planar) => {
            let l = planar_tw_layering(g, req.a)?;
            let outcomes = l
                .classes
                .iter()
                .zip(&l.witnesses)
                .map(|(x, w)| OutcomeRecord { set: x.clone(), witness: Some(Witness::TreeDecomposition(w.clone())) })
                .collect();
            Ok(RunDocument {
                graph: write_graph(g),
                param: req.param,
                class: req.class.to_string(),
                a: req.a,
                seed: req.seed,
                t: None,
                bound: l.bound.to_string(),
                bound_formula: "3a-3".into(),
                distribution: l.distribution.to_file(0, req.seed),
                outcomes,
                report: None,
            })
        }
        (Param::Star, Class::Tw(k)) => {
            let s = star_fragile_tw(g, k + 1, delta(), req.a)?;
            let entries = s.distribution.entries().expect("layer classes are explicit");
            let outcomes = entries.iter().map(|(set, _)| OutcomeRecord { set: set.clone(), witness: None }).collect();
            Ok(RunDocument {
                graph: write_graph(g),
                param: req.param,
                class: req.class.to_string(),
                a: req.a,
                seed: req.seed,
                t: None,
                bound: s.bound.to_string(),
                bound_formula: format!("12k(Δ-1)^a((Δ-1)^(b-1)+6^(a/b)) with k = {}, Δ = {}, b = {}", k + 1, delta(), s.b),
                distribution: s.distribution.to_file(0, req.seed),
                outcomes,
                report: None,
            })
        }
        (Param::Star, Class::Planar) => {
            let s = star_fragile_planar(g, delta(), req.a, req.seed)?;
            let file = s.distribution.to_file(req.samples, req.seed);
            let outcomes = match &file {
                DistributionFile::Sampler { samples, .. } => {
                    samples.iter().map(|set| OutcomeRecord { set: set.clone(), witness: None }).collect()
                }
                DistributionFile::Explicit { entries, .. } => {
                    entries.iter().map(|e| OutcomeRecord { set: e.set.clone(), witness: None }).collect()
                }
            };
            Ok(RunDocument {
                graph: write_graph(g),
                param: req.param,
                class: req.class.to_string(),
                a: req.a,
                seed: req.seed,
                t: None,
                bound: s.bound.to_string(),
                bound_formula: format!("star bound at a' = {}, a'' = {}, b = {}", s.outer, s.inner, s.b),
                distribution: file,
                outcomes,
                report: None,
            })
        }
        (Param::Td, Class::Tw(t)) => Ok(td_document(g, req, td_frag_tw(g, t, req.a, None, req.seed)?)),
        (Param::Td, Class::Outerplanar) => Ok(td_document(g, req, td_frag_outerplanar(g, req.a, req.seed)?)),
        (Param::Td, Class::PlanarChordal) => Ok(td_document(g, req, td_frag_planar_chordal(g, req.a, req.seed)?)),
        (Param::Td, Class::Planar) => Ok(td_document(g, req, td_frag_planar(g, req.a, req.seed)?.0)),
        _ => Err(unsupported(req)),
    }
}
