//! Orchestration of the block solver: degenerate cases, the single-block packing
//! search, the walk search over snapshot tables, and the literal enumeration of
//! `(start, end, S', T)` used for cross-checking.

use std::collections::{HashMap, HashSet, VecDeque};
use std::time::Instant;

use super::ilp::{ilp_feasible, IlpOutcome, IlpSystem};
use super::trees::for_each_spanning_tree;
use super::{
    block_plan, build_digraph, build_ilp, class_shapes, compute_adjacency, enumerate_snapshots, realizable_snapshots,
    reconstruct_witness, BlockDigraph, BlockPlan, BlockSide, ClassIndex, CountingRule, Shape, Snapshot, SnapshotTables, TableStop,
};
use crate::embedding::{validate, GridEmbedding};
use crate::graph::{component_catalog, find_isomorphism, grid_necessary_filter, ComponentCatalog, FilterVerdict, Graph};
use crate::oracle::{Answer, Budget, SolveResult, SolveStats};

/// Tuning of [`solve_mcc_k_with`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MccOptions {
    pub budget: u64,
    pub rule: CountingRule,
}

impl MccOptions {
    pub fn new(budget: u64) -> Self {
        MccOptions { budget, rule: CountingRule::EndComplete }
    }
}

/// The flow certificate behind a multi-block yes answer.
#[derive(Debug, Clone)]
pub struct Certificate {
    pub plan: BlockPlan,
    pub digraph: BlockDigraph,
    pub tree_arcs: Vec<usize>,
    pub system: IlpSystem,
    pub x: Vec<i64>,
    pub blocks: Vec<Snapshot>,
}

/// Result plus the certificate when the block machinery produced the witness.
#[derive(Debug, Clone)]
pub struct MccReport {
    pub result: SolveResult,
    pub certificate: Option<Certificate>,
}

enum Stop {
    Budget,
    /// A snapshot table outgrew its cap.
    TooLarge,
}

type Step<T> = std::result::Result<T, Stop>;

fn need<T>(x: Option<T>) -> Step<T> {
    x.ok_or(Stop::Budget)
}

fn table<T>(x: std::result::Result<T, TableStop>) -> Step<T> {
    x.map_err(|e| match e {
        TableStop::Budget => Stop::Budget,
        TableStop::TooLarge => Stop::TooLarge,
    })
}

/// Decides whether `g` has a `k x r` grid embedding; parameterized by the largest
/// component size plus `k`.
pub fn solve_mcc_k(g: &Graph, k: usize, r: usize, budget: u64) -> SolveResult {
    solve_mcc_k_with(g, k, r, MccOptions::new(budget)).result
}

/// [`solve_mcc_k`] with explicit options, returning the flow certificate.
pub fn solve_mcc_k_with(g: &Graph, k: usize, r: usize, opts: MccOptions) -> MccReport {
    let started = Instant::now();
    let mut budget = Budget::new(opts.budget);
    let outcome = match run(g, k, r, opts.rule, &mut budget) {
        Err(Stop::TooLarge) => {
            let catalog = component_catalog(g);
            pack_components(g, &catalog, k, r, &mut budget).map(|f| f.map(|f| (f, None)))
        }
        other => other,
    };
    let stats = SolveStats { nodes: budget.used(), elapsed: started.elapsed() };
    match outcome {
        Err(_) => MccReport { result: SolveResult::unknown(stats), certificate: None },
        Ok(None) => MccReport { result: SolveResult::no(stats), certificate: None },
        Ok(Some((f, cert))) => {
            debug_assert!(validate(g, &f).is_valid());
            MccReport { result: SolveResult::yes(f, stats), certificate: cert }
        }
    }
}

type Found = Option<(GridEmbedding, Option<Certificate>)>;

/// Answers the cases that need no blocks; `None` when blocks are required.
fn degenerate(g: &Graph, k: usize, r: usize, catalog: &ComponentCatalog) -> Option<Found> {
    let n = g.n();
    if n == 0 {
        return Some(Some((GridEmbedding::new(k, r, 0), None)));
    }
    if k == 0 || r == 0 || n > k * r || grid_necessary_filter(g) != FilterVerdict::Pass {
        return Some(None);
    }
    if catalog.mcc() == 1 {
        let mut f = GridEmbedding::new(k, r, n);
        for v in 0..n {
            f.set(v, ((v / r) as i64 + 1, (v % r) as i64 + 1));
        }
        return Some(Some((f, None)));
    }
    None
}

fn run(g: &Graph, k: usize, r: usize, rule: CountingRule, budget: &mut Budget) -> Step<Found> {
    let catalog = component_catalog(g);
    if let Some(found) = degenerate(g, k, r, &catalog) {
        return Ok(found);
    }
    let mcc = catalog.mcc();
    if r < 2 {
        return pack_components(g, &catalog, k, r, budget).map(|f| f.map(|f| (f, None)));
    }
    let plan = block_plan(r, mcc).expect("mcc >= 2 and r >= 2");
    if plan.p == 1 {
        return pack_components(g, &catalog, k, r, budget).map(|f| f.map(|f| (f, None)));
    }
    let mut shapes = Vec::new();
    for (rep, _) in &catalog.classes {
        let s = need(class_shapes(rep, k, rep.n(), budget))?;
        if s.is_empty() {
            return Ok(None);
        }
        shapes.push(s);
    }
    let mut index = ClassIndex::new(&catalog);
    let per_class: Vec<usize> = catalog.classes.iter().map(|c| c.1).collect();
    let inner = table(realizable_snapshots(k, mcc, BlockSide::Open, &shapes, &per_class, g.n(), &mut index, budget))?;
    let last_w = plan.widths[plan.p - 1];
    let last = table(realizable_snapshots(k, last_w, BlockSide::Last, &shapes, &per_class, g.n(), &mut index, budget))?;
    let inner_adj = table(compute_adjacency(&inner, &inner, mcc, &mut index, budget))?;
    let last_adj = table(compute_adjacency(&inner, &last, mcc, &mut index, budget))?;
    let tables = SnapshotTables { inner, last, inner_adj, last_adj };
    let Some(walk) = find_walk(&tables, &catalog, plan.p, rule, budget)? else {
        return Ok(None);
    };
    certify_walk(g, &catalog, k, &plan, &tables, &walk, rule, budget)
}

/// Exact search for a `p`-block walk whose component counts match the catalog.
///
/// States are `(block, snapshot, counts so far)`; the first block must be a source,
/// the last a sink of the last block width. Returns snapshot ids per block (the
/// last id indexes `tables.last`).
fn find_walk(
    tables: &SnapshotTables,
    catalog: &ComponentCatalog,
    p: usize,
    rule: CountingRule,
    budget: &mut Budget,
) -> Step<Option<Vec<usize>>> {
    let num: Vec<usize> = catalog.classes.iter().map(|c| c.1).collect();
    let fits = |v: &[usize]| v.iter().zip(&num).all(|(a, b)| a <= b);
    let mut inner_out: Vec<Vec<usize>> = vec![Vec::new(); tables.inner.len()];
    for (i, e) in tables.inner_adj.iter().enumerate() {
        inner_out[e.left].push(i);
    }
    let mut last_out: Vec<Vec<usize>> = vec![Vec::new(); tables.inner.len()];
    for (i, e) in tables.last_adj.iter().enumerate() {
        if rule.is_sink(&tables.last[e.right]) && rule.closing_freq(e).is_some() {
            last_out[e.left].push(i);
        }
    }
    // layers[b] holds (snapshot, counts, parent index in layers[b-1]).
    let mut layers: Vec<Vec<(usize, Vec<usize>, usize)>> = Vec::new();
    let mut first = Vec::new();
    for (s, info) in tables.inner.iter().enumerate() {
        if info.source && fits(&info.freq_left) {
            first.push((s, info.freq_left.clone(), usize::MAX));
        }
    }
    layers.push(first);
    for b in 1..p {
        let mut next = Vec::new();
        let mut seen: HashSet<(usize, Vec<usize>)> = HashSet::new();
        for (pi, (s, counts, _)) in layers[b - 1].iter().enumerate() {
            let cen = &tables.inner[*s].freq_cen;
            let closing = b + 1 == p;
            let outs = if closing { &last_out[*s] } else { &inner_out[*s] };
            for &e in outs {
                if !budget.tick() {
                    return Err(Stop::Budget);
                }
                let entry = if closing { &tables.last_adj[e] } else { &tables.inner_adj[e] };
                let boun = if closing { rule.closing_freq(entry).expect("filtered") } else { &entry.boundary_freq };
                let mut c: Vec<usize> = counts.iter().zip(cen).zip(boun).map(|((a, b), d)| a + b + d).collect();
                if closing {
                    for (x, y) in c.iter_mut().zip(rule.end_freq(&tables.last[entry.right])) {
                        *x += y;
                    }
                    if c != num {
                        continue;
                    }
                } else if !fits(&c) {
                    continue;
                }
                if seen.insert((entry.right, c.clone())) {
                    next.push((entry.right, c, pi));
                }
            }
        }
        if next.is_empty() {
            return Ok(None);
        }
        layers.push(next);
    }
    let mut walk = vec![0; p];
    let mut idx = 0;
    for b in (0..p).rev() {
        let (s, _, parent) = &layers[b][idx];
        walk[b] = *s;
        idx = *parent;
    }
    Ok(Some(walk))
}

/// Builds `D(start, end, S')` for the nodes of `walk`, a spanning tree of the used
/// arcs, solves the flow system and reconstructs the witness from its solution.
#[allow(clippy::too_many_arguments)]
fn certify_walk(
    g: &Graph,
    catalog: &ComponentCatalog,
    k: usize,
    plan: &BlockPlan,
    tables: &SnapshotTables,
    walk: &[usize],
    rule: CountingRule,
    budget: &mut Budget,
) -> Step<Found> {
    let p = walk.len();
    let mut chosen: Vec<usize> = walk[1..p - 1].to_vec();
    chosen.sort();
    chosen.dedup();
    let d = build_digraph(walk[0], walk[p - 1], &chosen, tables, rule);
    let node_of = |b: usize| -> usize {
        if b == 0 {
            0
        } else if b + 1 == p {
            1
        } else {
            2 + chosen.binary_search(&walk[b]).expect("chosen")
        }
    };
    let arc_index: HashMap<(usize, usize), usize> =
        d.digraph.arcs().iter().enumerate().map(|(a, &(u, v))| ((u, v), a)).collect();
    let mut hint = vec![0i64; d.digraph.arc_count()];
    let mut used = Vec::new();
    for b in 0..p - 1 {
        let a = arc_index[&(node_of(b), node_of(b + 1))];
        hint[a] += 1;
        used.push(a);
    }
    let tree = spanning_tree_of(d.node_count(), d.digraph.arcs(), &used);
    let system = build_ilp(&d, &tree, p, tables, catalog, rule);
    let x = match ilp_feasible(&system, Some(&hint), budget) {
        IlpOutcome::Feasible(x) => x,
        IlpOutcome::Unknown => return Err(Stop::Budget),
        IlpOutcome::Infeasible => unreachable!("the walk's own flow satisfies the system"),
    };
    let f = reconstruct_witness(g, catalog, k, plan, &d, &x, tables).expect("a feasible flow yields an embedding");
    let blocks = super::flow_to_sequence(&d, &x, tables).expect("eulerian").into_iter().cloned().collect();
    let cert = Certificate { plan: plan.clone(), digraph: d, tree_arcs: tree, system, x, blocks };
    Ok(Some((f, Some(cert))))
}

/// Spanning tree (arc indices) of the underlying graph of the arcs in `used`.
fn spanning_tree_of(n: usize, arcs: &[(usize, usize)], used: &[usize]) -> Vec<usize> {
    let mut seen = vec![false; n];
    seen[0] = true;
    let mut tree = Vec::new();
    let mut queue = VecDeque::from([0usize]);
    let mut set: Vec<usize> = used.to_vec();
    set.sort();
    set.dedup();
    while let Some(u) = queue.pop_front() {
        for &a in &set {
            let (x, y) = arcs[a];
            let other = if x == u { y } else if y == u { x } else { continue };
            if !seen[other] {
                seen[other] = true;
                tree.push(a);
                queue.push_back(other);
            }
        }
    }
    tree.sort();
    tree
}

/// Exhaustive placement of whole components into the `k x r` lattice. Used when the
/// lattice is a single block and when a snapshot table outgrows its cap.
///
/// Components are placed largest first, each as one of its shapes at some
/// translation; occupancies already shown to fail for the remaining components
/// are memoized.
fn pack_components(g: &Graph, catalog: &ComponentCatalog, k: usize, r: usize, budget: &mut Budget) -> Step<Option<GridEmbedding>> {
    let mut shapes: Vec<Vec<Shape>> = Vec::new();
    for (rep, _) in &catalog.classes {
        shapes.push(need(class_shapes(rep, k, r, budget))?);
    }
    let words = (k * r).div_ceil(64);
    // Placements per class: (shape, row offset, col offset, occupancy bits).
    let mut placements: Vec<Vec<(usize, usize, usize, Vec<u64>)>> = Vec::new();
    for class_shapes in &shapes {
        let mut list = Vec::new();
        for (si, sh) in class_shapes.iter().enumerate() {
            if sh.height > k || sh.width > r {
                continue;
            }
            for ro in 0..=k - sh.height {
                for co in 0..=r - sh.width {
                    let mut bits = vec![0u64; words];
                    for &(a, b) in &sh.cells {
                        let i = (a + ro) * r + b + co;
                        bits[i / 64] |= 1 << (i % 64);
                    }
                    list.push((si, ro, co, bits));
                }
            }
        }
        placements.push(list);
    }
    let mut order: Vec<(usize, usize)> = Vec::new();
    for (c, members) in catalog.members.iter().enumerate() {
        for m in 0..members.len() {
            order.push((c, m));
        }
    }
    order.sort_by_key(|&(c, m)| (std::cmp::Reverse(catalog.classes[c].0.n()), c, m));
    let suffix: Vec<usize> = (0..=order.len()).map(|i| order[i..].iter().map(|&(c, _)| catalog.classes[c].0.n()).sum()).collect();

    struct Ctx<'a> {
        placements: &'a [Vec<(usize, usize, usize, Vec<u64>)>],
        order: &'a [(usize, usize)],
        suffix: &'a [usize],
        cells: usize,
        failed: HashSet<(usize, Vec<u64>)>,
        chosen: Vec<usize>,
    }
    fn rec(ctx: &mut Ctx, j: usize, occ: &mut Vec<u64>, budget: &mut Budget) -> Step<bool> {
        if j == ctx.order.len() {
            return Ok(true);
        }
        let used: usize = occ.iter().map(|w| w.count_ones() as usize).sum();
        if ctx.cells - used < ctx.suffix[j] || ctx.failed.contains(&(j, occ.clone())) {
            return Ok(false);
        }
        let class = ctx.order[j].0;
        // Identical components are placed in increasing placement order.
        let from = if j > 0 && ctx.order[j - 1].0 == class { ctx.chosen[j - 1] + 1 } else { 0 };
        for pi in from..ctx.placements[class].len() {
            if !budget.tick() {
                return Err(Stop::Budget);
            }
            let bits = &ctx.placements[class][pi].3;
            if bits.iter().zip(occ.iter()).any(|(a, b)| a & b != 0) {
                continue;
            }
            for (o, b) in occ.iter_mut().zip(bits) {
                *o |= b;
            }
            ctx.chosen.push(pi);
            let ok = rec(ctx, j + 1, occ, budget)?;
            if ok {
                return Ok(true);
            }
            ctx.chosen.pop();
            for (o, b) in occ.iter_mut().zip(bits) {
                *o &= !b;
            }
        }
        if from == 0 {
            ctx.failed.insert((j, occ.clone()));
        }
        Ok(false)
    }
    let mut ctx = Ctx { placements: &placements, order: &order, suffix: &suffix, cells: k * r, failed: HashSet::new(), chosen: Vec::new() };
    let mut occ = vec![0u64; words];
    if !rec(&mut ctx, 0, &mut occ, budget)? {
        return Ok(None);
    }
    let mut f = GridEmbedding::new(k, r, g.n());
    for (j, &(class, m)) in order.iter().enumerate() {
        let (si, ro, co, _) = &placements[class][ctx.chosen[j]];
        let sh = &shapes[class][*si];
        let member = &catalog.members[class][m];
        let mg = g.induced_subgraph(member);
        let iso = find_isomorphism(&mg, &catalog.classes[class].0).expect("member of its class");
        for (i, &v) in member.iter().enumerate() {
            let (a, b) = sh.map[iso[i]];
            f.set(v, ((a + ro) as i64 + 1, (b + co) as i64 + 1));
        }
    }
    Ok(Some(f))
}

/// Literal form of the block algorithm: every source `start`, every sink `end`,
/// every subset `S'` of the width-`mcc` snapshots (by increasing size, at most
/// `p - 2`), every spanning tree `T` of the underlying graph of `D(start, end, S')`,
/// and the flow system for that choice. Snapshot sets are all lattice subgraphs, so
/// this is only usable on tiny lattices.
pub fn solve_mcc_k_literal(g: &Graph, k: usize, r: usize, rule: CountingRule, budget: u64) -> MccReport {
    let started = Instant::now();
    let mut b = Budget::new(budget);
    let outcome = literal(g, k, r, rule, &mut b);
    let stats = SolveStats { nodes: b.used(), elapsed: started.elapsed() };
    match outcome {
        Err(_) => MccReport { result: SolveResult::unknown(stats), certificate: None },
        Ok(None) => MccReport { result: SolveResult::no(stats), certificate: None },
        Ok(Some((f, cert))) => {
            let result = if validate(g, &f).is_valid() {
                SolveResult::yes(f, stats)
            } else {
                // The flow counted components that the stamped blocks do not form.
                SolveResult { answer: Answer::Yes, witness: None, stats }
            };
            MccReport { result, certificate: cert }
        }
    }
}

fn literal(g: &Graph, k: usize, r: usize, rule: CountingRule, budget: &mut Budget) -> Step<Found> {
    let catalog = component_catalog(g);
    if let Some(found) = degenerate(g, k, r, &catalog) {
        return Ok(found);
    }
    let mcc = catalog.mcc();
    if r < 2 {
        return pack_components(g, &catalog, k, r, budget).map(|f| f.map(|f| (f, None)));
    }
    let plan = block_plan(r, mcc).expect("mcc >= 2 and r >= 2");
    if plan.p == 1 {
        return pack_components(g, &catalog, k, r, budget).map(|f| f.map(|f| (f, None)));
    }
    let mut index = ClassIndex::new(&catalog);
    let inner = need(enumerate_snapshots(k, mcc, BlockSide::Open, &catalog, budget))?;
    let last = need(enumerate_snapshots(k, plan.widths[plan.p - 1], BlockSide::Last, &catalog, budget))?;
    let inner_adj = table(compute_adjacency(&inner, &inner, mcc, &mut index, budget))?;
    let last_adj = table(compute_adjacency(&inner, &last, mcc, &mut index, budget))?;
    let tables = SnapshotTables { inner, last, inner_adj, last_adj };
    let p = plan.p;
    let sources: Vec<usize> = (0..tables.inner.len()).filter(|&s| tables.inner[s].source).collect();
    let sinks: Vec<usize> = (0..tables.last.len()).filter(|&s| rule.is_sink(&tables.last[s])).collect();
    let all: Vec<usize> = (0..tables.inner.len()).collect();
    let mut result: Step<Found> = Ok(None);
    for size in 0..=(p - 2).min(all.len()) {
        let mut subset: Vec<usize> = (0..size).collect();
        loop {
            let chosen: Vec<usize> = subset.iter().map(|&i| all[i]).collect();
            for &start in &sources {
                for &end in &sinks {
                    let d = build_digraph(start, end, &chosen, &tables, rule);
                    let und: Vec<(usize, usize)> = d.digraph.arcs().to_vec();
                    let loops: Vec<usize> = (0..und.len()).filter(|&a| und[a].0 == und[a].1).collect();
                    let proper: Vec<usize> = (0..und.len()).filter(|&a| und[a].0 != und[a].1).collect();
                    let edges: Vec<(usize, usize)> = proper.iter().map(|&a| und[a]).collect();
                    let _ = &loops;
                    let mut stop = false;
                    for_each_spanning_tree(d.node_count(), &edges, &mut |t| {
                        if !budget.tick() {
                            result = Err(Stop::Budget);
                            stop = true;
                            return true;
                        }
                        let tree: Vec<usize> = t.iter().map(|&i| proper[i]).collect();
                        let sys = build_ilp(&d, &tree, p, &tables, &catalog, rule);
                        match ilp_feasible(&sys, None, budget) {
                            IlpOutcome::Feasible(x) => {
                                let f = reconstruct_witness(g, &catalog, k, &plan, &d, &x, &tables);
                                let blocks: Vec<Snapshot> = super::flow_to_sequence(&d, &x, &tables)
                                    .map(|s| s.into_iter().cloned().collect())
                                    .unwrap_or_default();
                                let f = f.unwrap_or_else(|_| GridEmbedding::new(k, r, g.n()));
                                let cert = Certificate {
                                    plan: plan.clone(),
                                    digraph: d.clone(),
                                    tree_arcs: tree,
                                    system: sys,
                                    x,
                                    blocks,
                                };
                                result = Ok(Some((f, Some(cert))));
                                stop = true;
                                true
                            }
                            IlpOutcome::Unknown => {
                                result = Err(Stop::Budget);
                                stop = true;
                                true
                            }
                            IlpOutcome::Infeasible => false,
                        }
                    });
                    if stop {
                        return result;
                    }
                }
            }
            if !next_combination(&mut subset, all.len()) {
                break;
            }
        }
    }
    result
}

/// Advances `c` to the next `c.len()`-subset of `0..n` in lexicographic order.
fn next_combination(c: &mut [usize], n: usize) -> bool {
    let m = c.len();
    for i in (0..m).rev() {
        if c[i] < n - m + i {
            c[i] += 1;
            for j in i + 1..m {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}
