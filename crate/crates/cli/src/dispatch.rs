//! Solver selection: routes an instance to the solver whose parameter suits it and
//! falls back to exhaustive search when a stage runs out of budget.

use std::fmt;
use std::time::Duration;

use anyhow::Result;
use gridbed_core::distance::solve_distance_fpt;
use gridbed_core::embedding::distance_approximation;
use gridbed_core::graph::{grid_necessary_filter, FilterVerdict};
use gridbed_core::oracle::brute_force_embed;
use gridbed_core::snapshot::solve_mcc_k;
use gridbed_core::tree::{solve_tree, TreeConstants};
use gridbed_core::{Answer, Graph, SolveResult, SolveStats};

/// Node budget when neither the command line nor `GRIDBED_BUDGET` sets one.
pub const DEFAULT_BUDGET: u64 = 20_000_000;

/// Which solver `solve` runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Algo {
    /// Exhaustive backtracking.
    Brute,
    /// Block/snapshot solver, parameterized by the largest component plus `k`.
    Snapshot,
    /// Column sweep, parameterized by the distance approximation plus `k`.
    Dp,
    /// Composition solver for trees.
    Tree,
    /// Picks by shape: trees go to `tree` then `dp`, disconnected graphs to
    /// `snapshot`, everything else to `dp`; `brute` finishes undecided runs.
    Auto,
}

impl fmt::Display for Algo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Algo::Brute => "brute",
            Algo::Snapshot => "snapshot",
            Algo::Dp => "dp",
            Algo::Tree => "tree",
            Algo::Auto => "auto",
        })
    }
}

/// One solver run inside a dispatch.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stage {
    pub name: &'static str,
    pub answer: Answer,
    pub nodes: u64,
}

/// Final answer with the stages that led to it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DispatchReport {
    pub result: SolveResult,
    pub stages: Vec<Stage>,
    /// `a_f` of the witness, for connected graphs with a yes answer.
    pub achieved_a: Option<usize>,
}

/// Budget from `GRIDBED_BUDGET`, else [`DEFAULT_BUDGET`].
pub fn budget_from_env() -> Result<u64> {
    match std::env::var("GRIDBED_BUDGET") {
        Ok(v) => v.trim().parse().map_err(|_| anyhow::anyhow!("GRIDBED_BUDGET=\"{v}\" is not a node count")),
        Err(_) => Ok(DEFAULT_BUDGET),
    }
}

fn run_stage(name: &'static str, g: &Graph, k: usize, r: usize, budget: u64) -> Result<SolveResult> {
    Ok(match name {
        "brute" => brute_force_embed(g, k, r, budget),
        "snapshot" => solve_mcc_k(g, k, r, budget),
        "dp" => solve_distance_fpt(g, k, r, budget)?.result,
        "tree" => solve_tree(g, k, r, budget, &TreeConstants::REDUCED)?.result,
        _ => unreachable!("unknown stage {name}"),
    })
}

/// Stages tried in order for `algo`; an explicit choice that does not apply to the
/// graph shape is an input error.
fn plan(g: &Graph, algo: Algo) -> Result<Vec<&'static str>> {
    let connected = g.is_connected();
    Ok(match algo {
        Algo::Brute => vec!["brute"],
        Algo::Snapshot => vec!["snapshot"],
        Algo::Dp => {
            anyhow::ensure!(connected, "the dp solver needs a connected graph");
            vec!["dp"]
        }
        Algo::Tree => {
            anyhow::ensure!(g.is_tree(), "the tree solver needs a tree");
            vec!["tree"]
        }
        Algo::Auto if g.is_tree() => vec!["tree", "dp", "brute"],
        Algo::Auto if !connected => vec!["snapshot", "brute"],
        Algo::Auto => vec!["dp", "brute"],
    })
}

/// Runs the stages for `algo` until one decides. Under `auto` the necessary filter
/// (degree, odd cycles, edge count) answers no before any search.
pub fn solve_dispatch(g: &Graph, k: usize, r: usize, algo: Algo, budget: u64) -> Result<DispatchReport> {
    let stages = plan(g, algo)?;
    if algo == Algo::Auto && g.n() > 0 && (g.n() > k * r || grid_necessary_filter(g) != FilterVerdict::Pass) {
        let result = SolveResult::no(SolveStats { nodes: 0, elapsed: Duration::ZERO });
        return Ok(DispatchReport { result, stages: vec![Stage { name: "filter", answer: Answer::No, nodes: 0 }], achieved_a: None });
    }
    let mut log = Vec::new();
    let mut last = None;
    for name in stages {
        let result = run_stage(name, g, k, r, budget)?;
        log.push(Stage { name, answer: result.answer, nodes: result.stats.nodes });
        let decided = result.answer != Answer::Unknown;
        last = Some(result);
        if decided {
            break;
        }
    }
    let result = last.expect("every plan has a stage");
    let achieved_a = match &result.witness {
        Some(f) if g.n() > 0 && g.is_connected() => Some(distance_approximation(g, f)?.a_f),
        _ => None,
    };
    Ok(DispatchReport { result, stages: log, achieved_a })
}
