use std::fs;
use std::io::Write;
use std::path::Path;

use fragile::graph::VertexSet;
use fragile::parameters::{Param, Witness};
use fragile::thin::DistributionFile;
use serde::{Deserialize, Serialize};

use crate::CliError;

/// Everything `decompose` produces; `verify` re-checks it from this file alone.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunDocument {
    pub graph: String,
    pub param: Param,
    pub class: String,
    pub a: usize,
    pub seed: u64,
    /// Treewidth used by the bounded-treewidth treedepth construction.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<usize>,
    pub bound: String,
    pub bound_formula: String,
    pub distribution: DistributionFile,
    pub outcomes: Vec<OutcomeRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report: Option<Report>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutcomeRecord {
    pub set: VertexSet,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub class: String,
    pub param: Param,
    pub a: usize,
    pub bound_formula: String,
    pub bound_value: String,
    pub thinness_certificate: String,
    pub outcomes_sampled: usize,
    pub witness_files: Vec<String>,
    pub verifier_verdicts: Vec<String>,
}

pub fn read_text(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::io(format!("cannot read {}: {e}", path.display())))
}

/// Writes through a temporary file in the same directory and renames it.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = path.file_name().ok_or_else(|| CliError::io(format!("bad output path {}", path.display())))?;
    let tmp = dir.join(format!(".{}.tmp{}", name.to_string_lossy(), std::process::id()));
    let result = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(contents.as_bytes())?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    result.map_err(|e| {
        let _ = fs::remove_file(&tmp);
        CliError::io(format!("cannot write {}: {e}", path.display()))
    })
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}
