//! Fragility constructions for treewidth and treedepth: BFS layerings of
//! planar graphs, the treedepth-witness join, and the treedepth-fragility
//! pipelines for bounded treewidth, outerplanar, planar chordal and planar
//! graphs.

mod join;
mod layered;
mod layering;
mod planar;
mod trigeodesic;

pub use join::td_witness_join;
pub use layered::{
    ceil_log2, draw_stage, outerplanar_bound, path_witness, planar_chordal_bound, restrict_witness, td_frag_outerplanar,
    td_frag_planar_chordal, td_frag_tw, tw_td_bound, validate_stage, LayeredSampler, Outcome, Stage, TdFragility, TdReport,
    WitnessSampler,
};
pub use layering::{
    block_minor, face_decomposition, forest_distances, planar_tw_layering, BlockMinor, Layering, EXACT_COMPONENT_MAX,
};
pub use planar::{planar_td_bound, td_frag_planar, OffsetSummary, PlanarSampler};
pub use trigeodesic::{quotient_graph, trigeodesic_partition, verify_trigeodesic, TrigeodesicPartition};

use thiserror::Error;

use crate::graph::GraphError;
use crate::parameters::ParamError;
use crate::thin::ThinError;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TdFragError {
    #[error("{0}")]
    BadParameter(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Param(#[from] ParamError),
    #[error(transparent)]
    Thin(#[from] ThinError),
    #[error("class {class}: component of {size} vertices has certified width {width}, above {bound}")]
    WidthUnverified { class: usize, size: usize, width: usize, bound: usize },
    #[error("graph is not chordal")]
    NotChordal,
    #[error("input not outerplanar/chordalizable as claimed: {0}")]
    NotOuterplanar(String),
    #[error("not a triangulation: {0}")]
    NotTriangulation(String),
    #[error("witness join failed: {0}")]
    Join(String),
    #[error("witness check failed: {0}")]
    Witness(String),
}
