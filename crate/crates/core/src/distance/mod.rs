//! Column-sweep solver parameterized by the distance-approximation bound plus the
//! number of rows.
//!
//! With a vertex `v` pinned to column 0, every vertex `u` of an embedding `f` with
//! `a_f <= a` lies in a column between `d(v,u) - a - (k-1)` and `d(v,u)`. Bucketing
//! vertices by `d(v,u) / (k+a)` therefore confines bucket `i` to the blocks `i-1`
//! and `i` of width `k + a`, and the embedding can be built block by block from left
//! to right, carrying only the vertices of the next bucket already placed and the
//! last two columns.

use std::collections::HashMap;
use std::time::Instant;

use crate::embedding::{Cell, GridEmbedding};
use crate::error::{GridError, Result};
use crate::graph::{all_pairs_distances, grid_necessary_filter, FilterVerdict, Graph};
use crate::oracle::{Budget, SolveResult, SolveStats};

/// Vertices grouped by distance from the source in steps of `width = k + a`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BucketPartition {
    pub source: usize,
    pub width: usize,
    pub buckets: Vec<Vec<usize>>,
    pub bucket_of: Vec<usize>,
    pub dist: Vec<usize>,
}

/// Why a source vertex cannot be the leftmost vertex of an embedding with `a_f <= a`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BucketReject {
    /// The vertex would have to sit right of column `r`.
    TooFar { vertex: usize },
    /// More vertices than the `2k(k+a)` cells of two blocks.
    BucketTooLarge { bucket: usize },
}

/// Buckets `D_i = { u : floor(d(v,u) / (k+a)) = i }` for source `v`.
pub fn bucketize(g: &Graph, v: usize, k: usize, a: usize, r: usize) -> Result<std::result::Result<BucketPartition, BucketReject>> {
    if v >= g.n() {
        return Err(GridError::VertexOutOfRange { vertex: v, n: g.n() });
    }
    let d = crate::graph::distances_from(g, v);
    if d.iter().any(|x| x.is_none()) {
        return Err(GridError::Disconnected);
    }
    let dist: Vec<usize> = d.into_iter().map(|x| x.expect("connected")).collect();
    let width = k + a;
    for (u, &du) in dist.iter().enumerate() {
        // Leftmost possible column (0-based) of u.
        if du >= a + k && du - a - (k - 1) > r.saturating_sub(1) {
            return Ok(Err(BucketReject::TooFar { vertex: u }));
        }
    }
    let bucket_of: Vec<usize> = dist.iter().map(|&du| du / width).collect();
    let count = bucket_of.iter().max().map_or(0, |m| m + 1);
    let mut buckets = vec![Vec::new(); count];
    for (u, &b) in bucket_of.iter().enumerate() {
        buckets[b].push(u);
    }
    if let Some(i) = buckets.iter().position(|b| b.len() > 2 * k * width) {
        return Ok(Err(BucketReject::BucketTooLarge { bucket: i }));
    }
    Ok(Ok(BucketPartition { source: v, width, buckets, bucket_of, dist }))
}

/// DP state after a block: next-bucket vertices already placed, and the contents of
/// the block's last column and the column before it (one entry per row).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SweepState {
    pub used: Vec<usize>,
    pub right_col: Vec<Option<usize>>,
    pub prev_col: Vec<Option<usize>>,
}

impl SweepState {
    pub fn initial(k: usize) -> Self {
        SweepState { used: Vec::new(), right_col: vec![None; k], prev_col: vec![None; k] }
    }
}

/// One way of reaching a state: the parent state index in the previous layer and
/// the cells (1-based) assigned inside the block.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transition {
    pub parent: usize,
    pub placement: Vec<(usize, Cell)>,
}

/// States of one layer, each with every transition that reaches it.
pub type Layer = Vec<(SweepState, Vec<Transition>)>;

/// Fixed data of one sweep: graph, lattice, allowance and buckets.
pub struct SweepContext<'a> {
    pub g: &'a Graph,
    pub k: usize,
    pub r: usize,
    pub a: usize,
    pub part: &'a BucketPartition,
    apd: Vec<Vec<usize>>,
}

impl<'a> SweepContext<'a> {
    pub fn new(g: &'a Graph, k: usize, r: usize, a: usize, part: &'a BucketPartition) -> Self {
        let apd = all_pairs_distances(g)
            .into_iter()
            .map(|row| row.into_iter().map(|x| x.expect("connected")).collect())
            .collect();
        SweepContext { g, k, r, a, part, apd }
    }

    /// First column (0-based) and width of block `j`, if it lies inside the lattice.
    pub fn block(&self, j: usize) -> Option<(usize, usize)> {
        let c0 = j * self.part.width;
        (c0 < self.r).then(|| (c0, self.part.width.min(self.r - c0)))
    }

    /// Index of the last block that fits into the lattice.
    pub fn last_block(&self) -> usize {
        let need = self.part.buckets.len().saturating_sub(1);
        need.min((self.r - 1) / self.part.width)
    }

    fn bucket(&self, j: usize) -> &[usize] {
        self.part.buckets.get(j).map_or(&[], |b| b.as_slice())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum St {
    /// Placed in an earlier block but not in its last column.
    Before,
    /// In the previous block's last column at this row.
    PrevRight(usize),
    Here(usize, usize),
    Skipped,
    Undecided,
    /// Not placeable in this block (bucket beyond the next one).
    Later,
}

struct BlockSearch<'c, 'a> {
    ctx: &'c SweepContext<'a>,
    c0: usize,
    w: usize,
    order: Vec<usize>,
    optional: Vec<bool>,
    forced: Vec<Option<usize>>,
    st: Vec<St>,
    grid: Vec<Option<usize>>,
    prev: &'c SweepState,
    out: HashMap<SweepState, Vec<Vec<(usize, Cell)>>>,
    budget: &'c mut Budget,
}

impl<'c, 'a> BlockSearch<'c, 'a> {
    fn grid_distance(&self, x: usize, y: usize) -> Option<usize> {
        let cell = |s: St| match s {
            St::PrevRight(r) => Some((r as i64, self.c0 as i64 - 1)),
            St::Here(r, c) => Some((r as i64, (self.c0 + c) as i64)),
            _ => None,
        };
        let (p, q) = (cell(self.st[x])?, cell(self.st[y])?);
        Some(((p.0 - q.0).abs() + (p.1 - q.1).abs()) as usize)
    }

    fn at_lattice_end(&self) -> bool {
        self.c0 + self.w >= self.ctx.r
    }

    fn can_place(&self, u: usize, row: usize, col: usize) -> bool {
        let ctx = self.ctx;
        let du = ctx.part.dist[u];
        let gc = self.c0 + col;
        if gc > du || gc + ctx.a + ctx.k - 1 < du {
            return false;
        }
        for &y in ctx.g.neighbors(u) {
            let ok = match self.st[y] {
                St::Before => false,
                St::PrevRight(ry) => col == 0 && ry == row,
                St::Here(ry, cy) => ry.abs_diff(row) + cy.abs_diff(col) == 1,
                St::Skipped | St::Later => col + 1 == self.w && !self.at_lattice_end(),
                St::Undecided => true,
            };
            if !ok {
                return false;
            }
        }
        true
    }

    fn can_skip(&self, u: usize) -> bool {
        self.ctx.g.neighbors(u).iter().all(|&y| match self.st[y] {
            St::Here(_, cy) => cy + 1 == self.w && !self.at_lattice_end(),
            St::Before | St::PrevRight(_) => false,
            _ => true,
        })
    }

    fn gaps_ok(&self, u: usize) -> bool {
        let n = self.ctx.g.n();
        (0..n).all(|x| match self.grid_distance(u, x) {
            Some(df) if x != u => self.ctx.apd[u][x] <= df + self.ctx.a,
            _ => true,
        })
    }

    fn finish(&mut self) {
        let k = self.ctx.k;
        let mut pending_targets: Vec<usize> = Vec::new();
        for row in 0..k {
            if let Some(x) = self.prev.right_col[row] {
                for &y in self.ctx.g.neighbors(x) {
                    if !matches!(self.st[y], St::Before | St::PrevRight(_) | St::Here(..)) {
                        return;
                    }
                }
            }
        }
        for &u in &self.order {
            if let St::Here(_, c) = self.st[u] {
                let pending: Vec<usize> = self
                    .ctx
                    .g
                    .neighbors(u)
                    .iter()
                    .copied()
                    .filter(|&y| matches!(self.st[y], St::Skipped | St::Later))
                    .collect();
                if pending.len() > 1 || (!pending.is_empty() && (c + 1 != self.w || self.at_lattice_end())) {
                    return;
                }
                pending_targets.extend(pending);
            }
        }
        let before = pending_targets.len();
        pending_targets.sort();
        pending_targets.dedup();
        if pending_targets.len() != before {
            return;
        }
        let col_of = |c: usize| -> Vec<Option<usize>> { (0..k).map(|row| self.grid[row * self.w + c]).collect() };
        let right_col = col_of(self.w - 1);
        let prev_col = if self.w >= 2 { col_of(self.w - 2) } else { self.prev.right_col.clone() };
        let mut used: Vec<usize> = self.order.iter().copied().filter(|&u| self.optional[u] && matches!(self.st[u], St::Here(..))).collect();
        used.sort();
        let placement: Vec<(usize, Cell)> = self
            .order
            .iter()
            .filter_map(|&u| match self.st[u] {
                St::Here(r, c) => Some((u, (r as i64 + 1, (self.c0 + c) as i64 + 1))),
                _ => None,
            })
            .collect();
        self.out.entry(SweepState { used, right_col, prev_col }).or_default().push(placement);
    }

    fn rec(&mut self, i: usize) -> bool {
        if !self.budget.tick() {
            return false;
        }
        if i == self.order.len() {
            self.finish();
            return true;
        }
        let u = self.order[i];
        let cells: Vec<(usize, usize)> = match self.forced[u] {
            Some(row) => vec![(row, 0)],
            None => (0..self.w).flat_map(|c| (0..self.ctx.k).map(move |row| (row, c))).collect(),
        };
        for (row, col) in cells {
            if self.grid[row * self.w + col].is_some() || !self.can_place(u, row, col) {
                continue;
            }
            self.st[u] = St::Here(row, col);
            self.grid[row * self.w + col] = Some(u);
            let ok = !self.gaps_ok(u) || self.rec(i + 1);
            self.grid[row * self.w + col] = None;
            self.st[u] = St::Undecided;
            if !ok {
                return false;
            }
        }
        if self.optional[u] && self.forced[u].is_none() && self.can_skip(u) {
            self.st[u] = St::Skipped;
            let ok = self.rec(i + 1);
            self.st[u] = St::Undecided;
            if !ok {
                return false;
            }
        }
        true
    }
}

/// Successor states of `prev` for block `j`: every placement of the bucket-`j`
/// vertices not yet placed plus any subset of bucket `j+1` inside the block, such
/// that edges have unit length, vertices off the block's last column keep all
/// their neighbours, a last-column vertex leaves at most one neighbour for the cell
/// to its right, and pairwise gaps inside the block stay within `a`.
///
/// Returns `None` when the budget runs out.
pub fn sweep_iteration(ctx: &SweepContext, j: usize, prev: &[SweepState], budget: &mut Budget) -> Option<Layer> {
    let n = ctx.g.n();
    let mut merged: HashMap<SweepState, Vec<Transition>> = HashMap::new();
    let Some((c0, w)) = ctx.block(j) else { return Some(Vec::new()) };
    for (pi, state) in prev.iter().enumerate() {
        let mut st = vec![St::Later; n];
        for b in 0..j.min(ctx.part.buckets.len()) {
            for &u in ctx.bucket(b) {
                st[u] = St::Before;
            }
        }
        for &u in &state.used {
            st[u] = St::Before;
        }
        for (row, x) in state.right_col.iter().enumerate() {
            if let Some(x) = *x {
                st[x] = St::PrevRight(row);
            }
        }
        let mut optional = vec![false; n];
        let mut order = Vec::new();
        for &u in ctx.bucket(j) {
            if st[u] == St::Later {
                st[u] = St::Undecided;
                order.push(u);
            }
        }
        for &u in ctx.bucket(j + 1) {
            st[u] = St::Undecided;
            optional[u] = true;
            order.push(u);
        }
        let mut forced = vec![None; n];
        let mut impossible = false;
        for (row, x) in state.right_col.iter().enumerate() {
            if let Some(x) = *x {
                for &y in ctx.g.neighbors(x) {
                    match st[y] {
                        St::Undecided => {
                            if forced[y].is_some_and(|r| r != row) {
                                impossible = true;
                            }
                            forced[y] = Some(row);
                        }
                        St::Later => impossible = true,
                        _ => {}
                    }
                }
            }
        }
        if impossible {
            continue;
        }
        order.sort_by_key(|&u| (forced[u].is_none(), ctx.part.dist[u], u));
        let mut search = BlockSearch {
            ctx,
            c0,
            w,
            order,
            optional,
            forced,
            st,
            grid: vec![None; ctx.k * w],
            prev: state,
            out: HashMap::new(),
            budget,
        };
        if !search.rec(0) {
            return None;
        }
        for (s, placements) in search.out {
            let entry = merged.entry(s).or_default();
            entry.extend(placements.into_iter().map(|placement| Transition { parent: pi, placement }));
        }
    }
    let mut layer: Layer = merged.into_iter().collect();
    layer.sort_by(|x, y| x.0.cmp(&y.0));
    Some(layer)
}

/// All layers of the sweep for one source; layer `j` holds the states after block `j`.
pub fn sweep_layers(ctx: &SweepContext, budget: &mut Budget) -> Option<Vec<Layer>> {
    let mut layers: Vec<Layer> = Vec::new();
    let mut states = vec![SweepState::initial(ctx.k)];
    for j in 0..=ctx.last_block() {
        let layer = sweep_iteration(ctx, j, &states, budget)?;
        states = layer.iter().map(|(s, _)| s.clone()).collect();
        layers.push(layer);
        if states.is_empty() {
            break;
        }
    }
    Some(layers)
}

/// Whether a state after the last block leaves nothing unplaced.
fn is_final(ctx: &SweepContext, j: usize, s: &SweepState) -> bool {
    if j != ctx.last_block() {
        return false;
    }
    let next = ctx.bucket(j + 1);
    s.used.len() == next.len() && ctx.part.buckets.len() <= j + 2
}

/// Follows parent pointers from the final states, keeping only chains whose
/// accumulated embedding has every gap `d(x,y) - d_f(x,y)` within `a`.
fn extract_witness(ctx: &SweepContext, layers: &[Layer], budget: &mut Budget) -> Option<Option<GridEmbedding>> {
    let Some(last) = layers.len().checked_sub(1) else { return Some(None) };
    if last != ctx.last_block() {
        return Some(None);
    }
    fn dfs(
        ctx: &SweepContext,
        layers: &[Layer],
        j: usize,
        idx: usize,
        acc: &mut Vec<(usize, Cell)>,
        budget: &mut Budget,
    ) -> Option<bool> {
        for t in &layers[j][idx].1 {
            if !budget.tick() {
                return None;
            }
            let base = acc.len();
            let mut ok = true;
            for &(u, cu) in &t.placement {
                for &(x, cx) in acc.iter() {
                    let df = ((cu.0 - cx.0).abs() + (cu.1 - cx.1).abs()) as usize;
                    if ctx.apd[u][x] > df + ctx.a {
                        ok = false;
                        break;
                    }
                }
                if !ok {
                    break;
                }
                acc.push((u, cu));
            }
            if ok {
                if j == 0 {
                    return Some(true);
                }
                if dfs(ctx, layers, j - 1, t.parent, acc, budget)? {
                    return Some(true);
                }
            }
            acc.truncate(base);
        }
        Some(false)
    }
    for idx in 0..layers[last].len() {
        if !is_final(ctx, last, &layers[last][idx].0) {
            continue;
        }
        let mut acc = Vec::new();
        if dfs(ctx, layers, last, idx, &mut acc, budget)? {
            let mut f = GridEmbedding::new(ctx.k, ctx.r, ctx.g.n());
            for (u, c) in acc {
                f.set(u, c);
            }
            return Some(Some(f));
        }
    }
    Some(None)
}

/// Outcome of [`solve_with_a`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SweepOutcome {
    Yes(GridEmbedding),
    No,
    Unknown,
}

/// Decides whether a connected graph has a `k x r` embedding `f` with `a_f <= a`,
/// trying every vertex as the leftmost one.
pub fn solve_with_a(g: &Graph, k: usize, r: usize, a: usize, budget: &mut Budget) -> Result<SweepOutcome> {
    if !g.is_connected() {
        return Err(GridError::Disconnected);
    }
    if g.n() == 0 {
        return Ok(SweepOutcome::Yes(GridEmbedding::new(k, r, 0)));
    }
    if k == 0 || r == 0 || g.n() > k * r {
        return Ok(SweepOutcome::No);
    }
    for v in 0..g.n() {
        let part = match bucketize(g, v, k, a, r)? {
            Ok(p) => p,
            Err(_) => continue,
        };
        let ctx = SweepContext::new(g, k, r, a, &part);
        let Some(layers) = sweep_layers(&ctx, budget) else { return Ok(SweepOutcome::Unknown) };
        match extract_witness(&ctx, &layers, budget) {
            None => return Ok(SweepOutcome::Unknown),
            Some(Some(f)) => return Ok(SweepOutcome::Yes(f)),
            Some(None) => {}
        }
    }
    Ok(SweepOutcome::No)
}

/// Result of [`solve_distance_fpt`]: the answer plus the smallest `a` that worked.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistanceSolve {
    pub result: SolveResult,
    pub achieved_a: Option<usize>,
}

/// Decides whether a connected graph is a `k x r` grid graph by trying
/// `a = 0, 1, ..., |V|-1` in turn; the first success also yields the minimum
/// distance approximation over all embeddings.
pub fn solve_distance_fpt(g: &Graph, k: usize, r: usize, budget: u64) -> Result<DistanceSolve> {
    if !g.is_connected() {
        return Err(GridError::Disconnected);
    }
    let started = Instant::now();
    let mut b = Budget::new(budget);
    let stats = |b: &Budget| SolveStats { nodes: b.used(), elapsed: started.elapsed() };
    if g.n() > 0 && grid_necessary_filter(g) != FilterVerdict::Pass {
        return Ok(DistanceSolve { result: SolveResult::no(stats(&b)), achieved_a: None });
    }
    for a in 0..g.n().max(1) {
        match solve_with_a(g, k, r, a, &mut b)? {
            SweepOutcome::Yes(f) => return Ok(DistanceSolve { result: SolveResult::yes(f, stats(&b)), achieved_a: Some(a) }),
            SweepOutcome::Unknown => return Ok(DistanceSolve { result: SolveResult::unknown(stats(&b)), achieved_a: None }),
            SweepOutcome::No => {}
        }
    }
    Ok(DistanceSolve { result: SolveResult::no(stats(&b)), achieved_a: None })
}
