//! Command line front end: file formats, solver dispatch, generators and rendering.
//!
//! Exit codes are a stable contract: 0 yes, 1 no, 2 unknown (budget exhausted),
//! 3 input error.

pub mod dispatch;
pub mod format;
pub mod render;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use gridbed_core::embedding::{distance_approximation, validate, Validity};
use gridbed_core::oracle::min_distance_approximation;
use gridbed_core::reductions::sat::placement_from_assignment;
use gridbed_core::reductions::{
    batteries_brute_force, construct_3partition_witness, construct_batteries_witness, construct_naesat_witness, reduce_3partition,
    reduce_batteries_to_grid, reduce_naesat, reduce_sat_to_batteries, strip_pack, three_partition_brute_force, BatteriesAnswer,
    CnfFormula,
};
use gridbed_core::Answer;

use dispatch::{budget_from_env, solve_dispatch, Algo};
use format::LabeledGraph;
use render::RenderFormat;

pub const EXIT_YES: i32 = 0;
pub const EXIT_NO: i32 = 1;
pub const EXIT_UNKNOWN: i32 = 2;
pub const EXIT_INPUT_ERROR: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "gridbed", version, about = "Exact k x r grid graph embedding: solvers, checkers and certified generators")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide whether a graph has a k x r grid embedding.
    Solve(SolveArgs),
    /// Validate an embedding against a graph (exit 0 when valid, 1 otherwise).
    Check(CheckArgs),
    /// Distance approximation of an embedding, or its minimum over all k x r embeddings.
    Afparam(AfparamArgs),
    /// Generate hardness-reduction instances, optionally with a certified witness.
    #[command(subcommand)]
    Gen(GenCommand),
    /// Pack rectangles into a k x W strip through grid embedding.
    StripPack(StripPackArgs),
    /// Draw an embedding as ASCII art or SVG.
    Render(RenderArgs),
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long)]
    pub k: usize,
    #[arg(long)]
    pub r: usize,
    #[arg(long, value_enum, default_value_t = Algo::Auto)]
    pub algo: Algo,
    /// Node budget per solver stage; overrides GRIDBED_BUDGET.
    #[arg(long)]
    pub budget: Option<u64>,
    /// Where to write the witness embedding on a yes answer.
    #[arg(long)]
    pub witness: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long)]
    pub embedding: PathBuf,
}

#[derive(Debug, Args)]
pub struct AfparamArgs {
    #[arg(long)]
    pub graph: PathBuf,
    /// Report a_f of this embedding.
    #[arg(long, conflicts_with_all = ["k", "r"], required_unless_present_all = ["k", "r"])]
    pub embedding: Option<PathBuf>,
    /// With --r: report the minimum a_f over all k x r embeddings.
    #[arg(long, requires = "r")]
    pub k: Option<usize>,
    #[arg(long, requires = "k")]
    pub r: Option<usize>,
    #[arg(long)]
    pub budget: Option<u64>,
}

#[derive(Debug, Subcommand)]
pub enum GenCommand {
    /// CNF (DIMACS) to a Batteries instance; the witness is a placement.
    Sat2batteries(GenArgs),
    /// Batteries instance to a grid embedding instance; the witness is an embedding.
    Batteries2grid(GenArgs),
    /// 3-Partition instance to a 3 x r embedding instance.
    #[command(name = "3partition")]
    ThreePartition(PartitionArgs),
    /// NAE-SAT formula (DIMACS) to a tree embedding instance.
    Naesat(GenArgs),
}

#[derive(Debug, Args)]
pub struct GenArgs {
    /// Source instance.
    #[arg(long)]
    pub input: PathBuf,
    /// Where to write the generated instance (stdout when absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also solve the source instance and write the certified witness here.
    #[arg(long)]
    pub with_witness: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PartitionArgs {
    #[command(flatten)]
    pub common: GenArgs,
    /// Skip normalization; the numbers must already exceed 2 and only triples may
    /// reach the target.
    #[arg(long)]
    pub raw: bool,
}

#[derive(Debug, Args)]
pub struct StripPackArgs {
    /// Rectangles as HxW separated by commas, e.g. 2x3,1x2.
    #[arg(long)]
    pub rects: String,
    /// Strip height.
    #[arg(long)]
    pub k: usize,
    /// Strip width.
    #[arg(long)]
    pub width: usize,
    #[arg(long)]
    pub budget: Option<u64>,
    /// Where to write the embedding of the rectangle graph on a yes answer.
    #[arg(long)]
    pub witness: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Ascii,
    Svg,
}

#[derive(Debug, Args)]
pub struct RenderArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long)]
    pub embedding: PathBuf,
    #[arg(long, value_enum, default_value_t = FormatArg::Ascii)]
    pub format: FormatArg,
    /// Output file (stdout when absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn emit(out: &mut dyn Write, path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => write_file(p, text),
        None => Ok(out.write_all(text.as_bytes())?),
    }
}

fn load_graph(path: &Path) -> Result<LabeledGraph> {
    format::parse_graph(&read(path)?).with_context(|| format!("parsing {}", path.display()))
}

fn load_embedding(path: &Path) -> Result<gridbed_core::GridEmbedding> {
    format::parse_embedding(&read(path)?).with_context(|| format!("parsing {}", path.display()))
}

fn exit_code(answer: Answer) -> i32 {
    match answer {
        Answer::Yes => EXIT_YES,
        Answer::No => EXIT_NO,
        Answer::Unknown => EXIT_UNKNOWN,
    }
}

fn answer_word(answer: Answer) -> &'static str {
    match answer {
        Answer::Yes => "yes",
        Answer::No => "no",
        Answer::Unknown => "unknown",
    }
}

/// Runs one command, writing its report to `out`; returns the exit code. Errors are
/// input errors (exit code 3).
pub fn run(cli: Cli, out: &mut dyn Write) -> Result<i32> {
    match cli.command {
        Command::Solve(a) => solve(a, out),
        Command::Check(a) => check(a, out),
        Command::Afparam(a) => afparam(a, out),
        Command::Gen(g) => generate(g, out),
        Command::StripPack(a) => pack(a, out),
        Command::Render(a) => draw(a, out),
    }
}

fn solve(a: SolveArgs, out: &mut dyn Write) -> Result<i32> {
    let g = load_graph(&a.graph)?.graph;
    let budget = a.budget.map_or_else(budget_from_env, Ok)?;
    let rep = solve_dispatch(&g, a.k, a.r, a.algo, budget)?;
    writeln!(out, "answer: {}", answer_word(rep.result.answer))?;
    let stages: Vec<String> = rep.stages.iter().map(|s| format!("{}={} ({} nodes)", s.name, answer_word(s.answer), s.nodes)).collect();
    writeln!(out, "stages: {}", stages.join(", "))?;
    writeln!(out, "nodes: {}", rep.stages.iter().map(|s| s.nodes).sum::<u64>())?;
    writeln!(out, "elapsed_ms: {}", rep.result.stats.elapsed.as_millis())?;
    if let Some(af) = rep.achieved_a {
        writeln!(out, "a_f: {af}")?;
    }
    if let (Some(f), Some(path)) = (&rep.result.witness, &a.witness) {
        write_file(path, &format::serialize_embedding(f))?;
        writeln!(out, "witness: {}", path.display())?;
    }
    Ok(exit_code(rep.result.answer))
}

fn check(a: CheckArgs, out: &mut dyn Write) -> Result<i32> {
    let g = load_graph(&a.graph)?.graph;
    let f = load_embedding(&a.embedding)?;
    match validate(&g, &f) {
        Validity::Valid => {
            writeln!(out, "valid {} x {} embedding", f.k, f.r)?;
            if g.n() > 0 && g.is_connected() {
                writeln!(out, "a_f: {}", distance_approximation(&g, &f)?.a_f)?;
            }
            Ok(EXIT_YES)
        }
        Validity::Invalid(reason) => {
            writeln!(out, "invalid: {reason}")?;
            Ok(EXIT_NO)
        }
    }
}

fn afparam(a: AfparamArgs, out: &mut dyn Write) -> Result<i32> {
    let g = load_graph(&a.graph)?.graph;
    if let Some(path) = &a.embedding {
        let f = load_embedding(path)?;
        if let Validity::Invalid(reason) = validate(&g, &f) {
            bail!("embedding is invalid: {reason}");
        }
        let rep = distance_approximation(&g, &f)?;
        writeln!(out, "a_f: {}", rep.a_f)?;
        writeln!(out, "pair: {} {}", rep.witness_pair.0, rep.witness_pair.1)?;
        return Ok(EXIT_YES);
    }
    let (k, r) = (a.k.expect("clap requires k"), a.r.expect("clap requires r"));
    let budget = a.budget.map_or_else(budget_from_env, Ok)?;
    match min_distance_approximation(&g, k, r, budget)? {
        None => {
            writeln!(out, "a_G: unknown (budget exhausted)")?;
            Ok(EXIT_UNKNOWN)
        }
        Some(v) if v == g.n() => {
            writeln!(out, "a_G: {v} (no {k} x {r} embedding)")?;
            Ok(EXIT_NO)
        }
        Some(v) => {
            writeln!(out, "a_G: {v}")?;
            Ok(EXIT_YES)
        }
    }
}

fn generate(cmd: GenCommand, out: &mut dyn Write) -> Result<i32> {
    match cmd {
        GenCommand::Sat2batteries(a) => {
            let pi = CnfFormula::from_dimacs(&read(&a.input)?, false)?;
            let b = reduce_sat_to_batteries(&pi)?;
            emit(out, a.out.as_deref(), &format::serialize_batteries(&b))?;
            let Some(path) = &a.with_witness else { return Ok(EXIT_YES) };
            match pi.brute_force() {
                Some(alpha) => {
                    write_file(path, &format::serialize_placement(&placement_from_assignment(b.rows, &alpha)))?;
                    Ok(EXIT_YES)
                }
                None => Ok(EXIT_NO),
            }
        }
        GenCommand::Batteries2grid(a) => {
            let b = format::parse_batteries(&read(&a.input)?)?;
            let bg = reduce_batteries_to_grid(&b)?;
            let lg = LabeledGraph::with_labels(bg.graph.clone(), &bg.labels);
            emit(out, a.out.as_deref(), &format::serialize_graph(&lg))?;
            eprintln!("grid: {} x {}", bg.k(), bg.r());
            let Some(path) = &a.with_witness else { return Ok(EXIT_YES) };
            match batteries_brute_force(&b) {
                BatteriesAnswer::Yes(p) => {
                    let (_, f) = construct_batteries_witness(&b, &p)?;
                    write_file(path, &format::serialize_embedding(&f))?;
                    Ok(EXIT_YES)
                }
                BatteriesAnswer::No => Ok(EXIT_NO),
                BatteriesAnswer::TooLarge => Ok(EXIT_UNKNOWN),
            }
        }
        GenCommand::ThreePartition(a) => {
            let weights = format::parse_3partition(&read(&a.common.input)?)?;
            let pg = reduce_3partition(&weights, !a.raw)?;
            emit(out, a.common.out.as_deref(), &format::serialize_graph(&LabeledGraph::unlabeled(pg.graph.clone())))?;
            eprintln!("grid: {} x {}", pg.k, pg.r);
            let Some(path) = &a.common.with_witness else { return Ok(EXIT_YES) };
            match three_partition_brute_force(&pg.weights) {
                Some(triples) => {
                    write_file(path, &format::serialize_embedding(&construct_3partition_witness(&pg, &triples)?))?;
                    Ok(EXIT_YES)
                }
                None => Ok(EXIT_NO),
            }
        }
        GenCommand::Naesat(a) => {
            let pi = CnfFormula::from_dimacs(&read(&a.input)?, true)?;
            let ng = reduce_naesat(&pi)?;
            let lg = LabeledGraph::with_labels(ng.graph.clone(), &ng.labels);
            emit(out, a.out.as_deref(), &format::serialize_graph(&lg))?;
            eprintln!("grid: {} x {}", ng.k(), ng.r());
            let Some(path) = &a.with_witness else { return Ok(EXIT_YES) };
            match pi.brute_force() {
                Some(alpha) => {
                    write_file(path, &format::serialize_embedding(&construct_naesat_witness(&ng, &pi, &alpha)?))?;
                    Ok(EXIT_YES)
                }
                None => Ok(EXIT_NO),
            }
        }
    }
}

fn pack(a: StripPackArgs, out: &mut dyn Write) -> Result<i32> {
    let rects = format::parse_rectangles(&a.rects)?;
    let budget = a.budget.map_or_else(budget_from_env, Ok)?;
    let packing = strip_pack(&rects, a.k, a.width, budget)?;
    writeln!(out, "answer: {}", answer_word(packing.result.answer))?;
    writeln!(out, "scale: {}", packing.scale)?;
    for (i, p) in packing.placements.iter().flatten().enumerate() {
        writeln!(out, "rect {i}: row {} col {} height {} width {}", p.row, p.col, p.height, p.width)?;
    }
    if let (Some(f), Some(path)) = (&packing.result.witness, &a.witness) {
        write_file(path, &format::serialize_embedding(f))?;
    }
    Ok(exit_code(packing.result.answer))
}

fn draw(a: RenderArgs, out: &mut dyn Write) -> Result<i32> {
    let g = load_graph(&a.graph)?.graph;
    let f = load_embedding(&a.embedding)?;
    let format = match a.format {
        FormatArg::Ascii => RenderFormat::Ascii,
        FormatArg::Svg => RenderFormat::Svg,
    };
    emit(out, a.out.as_deref(), &render::render(&g, &f, format)?)?;
    Ok(EXIT_YES)
}
