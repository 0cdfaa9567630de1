mod check;
mod decompose;
mod doc;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use fragile::gadgets::{
    build_binary_tree, build_kary_tree, build_td_gadget, lb_certify, lb_experiment, Family, GadgetError, Inner,
    DEFAULT_SIZE_CAP, TABLE_HEADER,
};
use fragile::graph::{parse_weighted_graph, Graph, GraphError, WeightFunction};
use fragile::parameters::{exact_treedepth, exact_treewidth, star, treewidth_upper, Param, ParamError, DEFAULT_TD_BUDGET};
use fragile::ratio::format_ratio;
use fragile::td_frag::TdFragError;
use fragile::tree_partition::TpError;
use serde_json::json;

use crate::decompose::{Class, Request};
use crate::doc::{read_text, to_json, write_atomic, Report, RunDocument};

pub const EXIT_OTHER: u8 = 1;
pub const EXIT_PARSE: u8 = 2;
pub const EXIT_CLASS: u8 = 3;
pub const EXIT_VERIFY: u8 = 4;

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub msg: String,
}

impl CliError {
    pub fn io(msg: String) -> Self {
        CliError { code: EXIT_OTHER, msg }
    }

    pub fn usage(msg: String) -> Self {
        CliError { code: EXIT_OTHER, msg }
    }

    fn parse(msg: String) -> Self {
        CliError { code: EXIT_PARSE, msg }
    }

    fn class(msg: String) -> Self {
        CliError { code: EXIT_CLASS, msg }
    }

    fn verify(msg: String) -> Self {
        CliError { code: EXIT_VERIFY, msg }
    }
}

impl From<TdFragError> for CliError {
    fn from(e: TdFragError) -> Self {
        match e {
            TdFragError::BadParameter(_) | TdFragError::Param(_) | TdFragError::Thin(_) => CliError::usage(e.to_string()),
            _ => CliError::class(e.to_string()),
        }
    }
}

impl From<TpError> for CliError {
    fn from(e: TpError) -> Self {
        match e {
            TpError::BadParameter(_) | TpError::Thin(_) => CliError::usage(e.to_string()),
            TpError::Split(_) | TpError::Invalid(_) | TpError::StarBound { .. } | TpError::InvalidWitness => {
                CliError::verify(e.to_string())
            }
            _ => CliError::class(e.to_string()),
        }
    }
}

impl From<GadgetError> for CliError {
    fn from(e: GadgetError) -> Self {
        CliError::usage(e.to_string())
    }
}

impl From<ParamError> for CliError {
    fn from(e: ParamError) -> Self {
        CliError::usage(e.to_string())
    }
}

#[derive(Parser, Debug)]
#[command(name = "fragile", version, about = "Thin deletion distributions for fractionally fragile graph classes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a distribution with a witness for every outcome.
    Decompose {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        a: usize,
        #[arg(long)]
        param: Param,
        #[arg(long)]
        class: Class,
        #[arg(long)]
        delta: Option<usize>,
        #[arg(long, env = "FRAGILE_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 16)]
        samples: usize,
    },
    /// Re-check a document written by decompose.
    Verify {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Write a weighted gadget graph.
    Gadget {
        /// Bd, Td, TdTd, TdPd or trees
        #[arg(long)]
        family: String,
        #[arg(long)]
        d: usize,
        /// path, edgeless, binary or tree (for --family Td)
        #[arg(long, default_value = "path")]
        inner: String,
        /// size of the inner graph
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long, default_value_t = 3)]
        delta: usize,
        #[arg(long, default_value_t = DEFAULT_SIZE_CAP)]
        cap: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Certify deletion lower bounds by exact search.
    Certify {
        /// ternary-trees, trees-delta-K, TdTd or TdPd; ignored with --in
        #[arg(long)]
        family: Option<String>,
        /// sizes, comma separated
        #[arg(long, value_delimiter = ',')]
        d: Vec<usize>,
        #[arg(long)]
        a: usize,
        #[arg(long = "in")]
        input: Option<PathBuf>,
        #[arg(long, default_value = "td")]
        param: Param,
        #[arg(long = "search-cap", default_value_t = 22)]
        search_cap: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate star, td and tw of a graph file.
    Params {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long = "budget-td", default_value_t = DEFAULT_TD_BUDGET)]
        budget_td: usize,
    },
}

fn load_graph(path: &Path) -> Result<(Graph, Option<WeightFunction>), CliError> {
    let text = read_text(path)?;
    parse_weighted_graph(&text).map_err(|e: GraphError| CliError::parse(format!("{}: {e}", path.display())))
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(p) => write_atomic(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn report_for(doc: &RunDocument, verdicts: Vec<String>, out: Option<&Path>) -> Report {
    Report {
        class: doc.class.clone(),
        param: doc.param,
        a: doc.a,
        bound_formula: doc.bound_formula.clone(),
        bound_value: doc.bound.clone(),
        thinness_certificate: format_ratio(doc.distribution.eps()),
        outcomes_sampled: doc.outcomes.len(),
        witness_files: out.map(|p| p.display().to_string()).into_iter().collect(),
        verifier_verdicts: verdicts,
    }
}

fn cmd_decompose(input: &Path, out: Option<&Path>, req: Request) -> Result<(), CliError> {
    let (g, _) = load_graph(input)?;
    let mut doc = decompose::build(&g, &req)?;
    let checked = check::check_document(&doc);
    let verdicts = match &checked {
        Ok(v) => v.clone(),
        Err(v) => vec![v.to_string()],
    };
    let report = report_for(&doc, verdicts, out);
    doc.report = Some(report.clone());
    if let Some(p) = out {
        write_atomic(p, &to_json(&doc))?;
    }
    print!("{}", to_json(&report));
    checked.map(|_| ()).map_err(|v| CliError::verify(format!("verification failed: {v}")))
}

fn cmd_verify(input: &Path) -> Result<(), CliError> {
    let text = read_text(input)?;
    let doc: RunDocument = serde_json::from_str(&text).map_err(|e| CliError::parse(format!("{}: {e}", input.display())))?;
    let verdicts = check::check_document(&doc).map_err(|v| CliError::verify(format!("verification failed: {v}")))?;
    println!("ok: {} outcomes verified", verdicts.len());
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_gadget(family: &str, d: usize, inner: &str, k: usize, delta: usize, cap: usize, out: Option<&Path>) -> Result<(), CliError> {
    let g = match family {
        "Bd" => build_binary_tree(d)?,
        "trees" => {
            if delta < 3 {
                return Err(CliError::usage("--delta must be at least 3".into()));
            }
            build_kary_tree(delta - 1, d, cap)?
        }
        "Td" => {
            let h = match inner {
                "path" => Inner::path(k)?,
                "edgeless" => Inner::edgeless(k)?,
                "binary" => Inner::binary(k)?,
                "tree" => Inner::tree(delta - 1, k)?,
                other => return Err(CliError::usage(format!("unknown inner graph {other:?}"))),
            };
            build_td_gadget(&h, d, cap)?
        }
        "TdTd" => build_td_gadget(&Inner::binary(d)?, d, cap)?,
        "TdPd" => build_td_gadget(&Inner::path(d)?, d, cap)?,
        other => return Err(CliError::usage(format!("unknown family {other:?} (expected Bd, Td, TdTd, TdPd or trees)"))),
    };
    emit(out, &g.to_file())
}

fn cmd_certify(
    family: Option<&str>,
    sizes: &[usize],
    a: usize,
    input: Option<&Path>,
    param: Param,
    search_cap: usize,
    out: Option<&Path>,
) -> Result<(), CliError> {
    if let Some(path) = input {
        let (g, w) = load_graph(path)?;
        let w = w.unwrap_or_else(|| WeightFunction::uniform(g.n()));
        let c = lb_certify(&g, &w, param, a, search_cap)?;
        println!("{TABLE_HEADER}");
        println!("{}\t{}\t{a}\t{}\t{}\t-", path.display(), g.n(), format_ratio(&c.budget), c.value);
        if let Some(p) = out {
            write_atomic(p, &to_json(&c))?;
        }
        return Ok(());
    }
    let family: Family = family.ok_or_else(|| CliError::usage("--family or --in is required".into()))?.parse()?;
    if sizes.is_empty() {
        return Err(CliError::usage("--d needs at least one size".into()));
    }
    let rows = lb_experiment(family, sizes, a, search_cap)?;
    println!("{TABLE_HEADER}");
    for r in &rows {
        println!("{}", r.table_line());
    }
    if let Some(p) = out {
        write_atomic(p, &to_json(&rows))?;
    }
    Ok(())
}

fn cmd_params(input: &Path, budget_td: usize) -> Result<(), CliError> {
    let (g, _) = load_graph(input)?;
    let td = exact_treedepth(&g, budget_td).ok().map(|(t, _)| t);
    let (tw, tw_exact) = match exact_treewidth(&g) {
        Some((t, _)) => (t, true),
        None => (treewidth_upper(&g).0, false),
    };
    let value = json!({
        "n": g.n(),
        "m": g.m(),
        "star": star(&g),
        "td": td,
        "tw": tw,
        "tw_exact": tw_exact,
    });
    print!("{}", to_json(&value));
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Decompose { input, out, a, param, class, delta, seed, samples } => {
            if a == 0 {
                return Err(CliError::usage("--a must be at least 1".into()));
            }
            cmd_decompose(&input, out.as_deref(), Request { param, class, a, seed, samples, delta })
        }
        Command::Verify { input } => cmd_verify(&input),
        Command::Gadget { family, d, inner, k, delta, cap, out } => cmd_gadget(&family, d, &inner, k, delta, cap, out.as_deref()),
        Command::Certify { family, d, a, input, param, search_cap, out } => {
            cmd_certify(family.as_deref(), &d, a, input.as_deref(), param, search_cap, out.as_deref())
        }
        Command::Params { input, budget_td } => cmd_params(&input, budget_td),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.msg);
            ExitCode::from(e.code)
        }
    }
}
