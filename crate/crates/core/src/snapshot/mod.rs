//! Block decomposition solver parameterized by the largest component size plus the
//! number of rows.
//!
//! The `k x r` lattice is cut into `p` blocks of width `mcc` that share boundary
//! columns. A snapshot is what an embedding looks like inside one block; adjacent
//! blocks must agree on their shared column. An embedding corresponds to a walk
//! `start -> ... -> end` through the snapshot adjacency relation whose component
//! counts match the catalog, which is expressed as an integer flow system and
//! turned back into an embedding through an Eulerian path.

pub mod euler;
pub mod ilp;
mod solve;
pub mod trees;

use std::collections::{HashMap, HashSet};

use crate::embedding::GridEmbedding;
use crate::error::{GridError, Result};
use crate::graph::{find_isomorphism, ComponentCatalog, Graph, MultiDigraph};
use crate::oracle::{for_each_embedding, Budget};

pub use solve::{solve_mcc_k, solve_mcc_k_literal, solve_mcc_k_with, Certificate, MccOptions, MccReport};

use ilp::{Family, IlpSystem, Relation};

/// Most snapshots one table may hold before the block solver gives up on tables.
pub const MAX_SNAPSHOTS: usize = 200_000;

/// Most adjacency entries one table may hold.
pub const MAX_ADJACENCY: usize = 2_000_000;

/// Why a snapshot or adjacency table was not built.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableStop {
    /// The node budget ran out.
    Budget,
    /// The table outgrew [`MAX_SNAPSHOTS`] or [`MAX_ADJACENCY`].
    TooLarge,
}

/// A cell of a block lattice as `(row, col)`, both 0-based.
pub type LCell = (usize, usize);

/// Split of the `r` columns into blocks that share one column with their neighbours.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockPlan {
    pub p: usize,
    pub widths: Vec<usize>,
    /// 0-based first column of every block.
    pub starts: Vec<usize>,
}

/// Blocks of width `mcc` overlapping in one column; the last block keeps the
/// remaining `r - (p-1)(mcc-1)` columns. A single block covers everything when
/// `r <= mcc`.
pub fn block_plan(r: usize, mcc: usize) -> Result<BlockPlan> {
    if mcc < 2 || r < 2 {
        return Err(GridError::InvalidInstance(format!("block plan needs mcc >= 2 and r >= 2 (mcc={mcc}, r={r})")));
    }
    if r <= mcc {
        return Ok(BlockPlan { p: 1, widths: vec![r], starts: vec![0] });
    }
    let p = (r - 1).div_ceil(mcc - 1);
    let last = r - (p - 1) * (mcc - 1);
    let mut widths = vec![mcc; p - 1];
    widths.push(last);
    let starts = (0..p).map(|i| i * (mcc - 1)).collect();
    Ok(BlockPlan { p, widths, starts })
}

/// Occupied cells and realized edges of one block.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Snapshot {
    pub k: usize,
    pub w: usize,
    pub cells: Vec<LCell>,
    /// Unit-adjacent occupied pairs `(a, b)` with `a < b`.
    pub edges: Vec<(LCell, LCell)>,
}

/// Contents of one column: occupied rows and rows `i` with a vertical edge `i -- i+1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ColumnSignature {
    pub rows: Vec<usize>,
    pub vertical: Vec<usize>,
}

/// Position of a snapshot component relative to the two boundary columns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ComponentKind {
    /// Touches neither boundary column or both of them.
    Full,
    /// Touches only the left boundary column.
    Left,
    /// Touches only the right boundary column.
    Right,
}

/// A connected component of a snapshot.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SnapComponent {
    pub cells: Vec<LCell>,
    pub edges: Vec<(LCell, LCell)>,
    pub touches_left: bool,
    pub touches_right: bool,
}

impl SnapComponent {
    pub fn kind(&self) -> ComponentKind {
        match (self.touches_left, self.touches_right) {
            (true, false) => ComponentKind::Left,
            (false, true) => ComponentKind::Right,
            _ => ComponentKind::Full,
        }
    }
}

fn norm_edge(a: LCell, b: LCell) -> (LCell, LCell) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Connected components of a cell/edge structure, each with sorted cells and edges.
fn cell_components(cells: &[LCell], edges: &[(LCell, LCell)]) -> Vec<(Vec<LCell>, Vec<(LCell, LCell)>)> {
    let index: HashMap<LCell, usize> = cells.iter().enumerate().map(|(i, &c)| (c, i)).collect();
    let mut adj = vec![Vec::new(); cells.len()];
    for &(a, b) in edges {
        let (i, j) = (index[&a], index[&b]);
        adj[i].push(j);
        adj[j].push(i);
    }
    let mut comp = vec![usize::MAX; cells.len()];
    let mut out: Vec<(Vec<LCell>, Vec<(LCell, LCell)>)> = Vec::new();
    for s in 0..cells.len() {
        if comp[s] != usize::MAX {
            continue;
        }
        let id = out.len();
        comp[s] = id;
        let mut stack = vec![s];
        let mut part = Vec::new();
        while let Some(u) = stack.pop() {
            part.push(cells[u]);
            for &v in &adj[u] {
                if comp[v] == usize::MAX {
                    comp[v] = id;
                    stack.push(v);
                }
            }
        }
        part.sort();
        out.push((part, Vec::new()));
    }
    for &(a, b) in edges {
        out[comp[index[&a]]].1.push((a, b));
    }
    for part in &mut out {
        part.1.sort();
    }
    out
}

impl Snapshot {
    /// Builds a snapshot; cells and edges are sorted and deduplicated.
    pub fn new(k: usize, w: usize, mut cells: Vec<LCell>, edges: Vec<(LCell, LCell)>) -> Self {
        cells.sort();
        cells.dedup();
        let mut edges: Vec<_> = edges.into_iter().map(|(a, b)| norm_edge(a, b)).collect();
        edges.sort();
        edges.dedup();
        debug_assert!(cells.iter().all(|&(r, c)| r < k && c < w));
        debug_assert!(edges.iter().all(|&(a, b)| {
            cells.binary_search(&a).is_ok()
                && cells.binary_search(&b).is_ok()
                && a.0.abs_diff(b.0) + a.1.abs_diff(b.1) == 1
        }));
        Snapshot { k, w, cells, edges }
    }

    pub fn empty(k: usize, w: usize) -> Self {
        Snapshot { k, w, cells: Vec::new(), edges: Vec::new() }
    }

    pub fn column(&self, col: usize) -> ColumnSignature {
        let rows = self.cells.iter().filter(|c| c.1 == col).map(|c| c.0).collect();
        let vertical = self.edges.iter().filter(|(a, b)| a.1 == col && b.1 == col).map(|(a, _)| a.0).collect();
        ColumnSignature { rows, vertical }
    }

    pub fn left_signature(&self) -> ColumnSignature {
        self.column(0)
    }

    pub fn right_signature(&self) -> ColumnSignature {
        self.column(self.w - 1)
    }

    pub fn components(&self) -> Vec<SnapComponent> {
        cell_components(&self.cells, &self.edges)
            .into_iter()
            .map(|(cells, edges)| {
                let touches_left = cells.iter().any(|c| c.1 == 0);
                let touches_right = cells.iter().any(|c| c.1 + 1 == self.w);
                SnapComponent { cells, edges, touches_left, touches_right }
            })
            .collect()
    }
}

/// Graph of a cell structure with vertices numbered in sorted cell order.
fn cells_to_graph(cells: &[LCell], edges: &[(LCell, LCell)]) -> Graph {
    let index: HashMap<LCell, usize> = cells.iter().enumerate().map(|(i, &c)| (c, i)).collect();
    let mut g = Graph::new(cells.len());
    for &(a, b) in edges {
        g.add_edge(index[&a], index[&b]).expect("snapshot edges are simple");
    }
    g
}

/// Memoized lookup of the catalog class of a cell structure.
pub struct ClassIndex<'a> {
    catalog: &'a ComponentCatalog,
    cache: HashMap<(Vec<LCell>, Vec<(LCell, LCell)>), Option<usize>>,
}

impl<'a> ClassIndex<'a> {
    pub fn new(catalog: &'a ComponentCatalog) -> Self {
        ClassIndex { catalog, cache: HashMap::new() }
    }

    pub fn catalog(&self) -> &ComponentCatalog {
        self.catalog
    }

    /// Class of the connected structure, or `None` if it is not a catalog class.
    pub fn class_of(&mut self, cells: &[LCell], edges: &[(LCell, LCell)]) -> Option<usize> {
        let r0 = cells.iter().map(|c| c.0).min().unwrap_or(0);
        let c0 = cells.iter().map(|c| c.1).min().unwrap_or(0);
        let sh = |c: LCell| (c.0 - r0, c.1 - c0);
        let key: (Vec<LCell>, Vec<(LCell, LCell)>) =
            (cells.iter().map(|&c| sh(c)).collect(), edges.iter().map(|&(a, b)| (sh(a), sh(b))).collect());
        if let Some(&hit) = self.cache.get(&key) {
            return hit;
        }
        let g = cells_to_graph(&key.0, &key.1);
        let class = self
            .catalog
            .classes
            .iter()
            .position(|(rep, _)| rep.n() == g.n() && rep.edge_count() == g.edge_count() && find_isomorphism(rep, &g).is_some());
        self.cache.insert(key, class);
        class
    }
}

/// A snapshot with its classification tables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SnapshotInfo {
    pub snapshot: Snapshot,
    /// Every left-only component is a catalog class.
    pub source: bool,
    /// Every right-only component is a catalog class.
    pub sink: bool,
    /// Every component avoiding the left column is a catalog class.
    pub sink_closed: bool,
    /// Per class: full components (touching neither boundary or both).
    pub freq_cen: Vec<usize>,
    /// Per class: left-only components.
    pub freq_left: Vec<usize>,
    /// Per class: right-only components.
    pub freq_right: Vec<usize>,
    /// Per class: components avoiding the left column.
    pub freq_closed: Vec<usize>,
}

/// Classifies a snapshot; `None` when some full component is not a catalog class.
///
/// In the last block a component touching the left column may continue into the
/// previous block even when it also reaches the right column, so there it is never
/// treated as full.
pub fn analyse_snapshot(snapshot: Snapshot, side: BlockSide, index: &mut ClassIndex) -> Option<SnapshotInfo> {
    let t = index.catalog().classes.len();
    let mut info = SnapshotInfo {
        snapshot: snapshot.clone(),
        source: true,
        sink: true,
        sink_closed: true,
        freq_cen: vec![0; t],
        freq_left: vec![0; t],
        freq_right: vec![0; t],
        freq_closed: vec![0; t],
    };
    for comp in snapshot.components() {
        let class = index.class_of(&comp.cells, &comp.edges);
        match comp.kind() {
            ComponentKind::Full if side == BlockSide::Last && comp.touches_left => {}
            ComponentKind::Full => info.freq_cen[class?] += 1,
            ComponentKind::Left => match class {
                Some(c) => info.freq_left[c] += 1,
                None => info.source = false,
            },
            ComponentKind::Right => match class {
                Some(c) => info.freq_right[c] += 1,
                None => info.sink = false,
            },
        }
        if !comp.touches_left {
            match class {
                Some(c) => info.freq_closed[c] += 1,
                None => info.sink_closed = false,
            }
        }
    }
    Some(info)
}

/// Unit-adjacent cell pairs of the `k x w` lattice.
fn lattice_pairs(cells: &[LCell]) -> Vec<(LCell, LCell)> {
    let set: HashSet<LCell> = cells.iter().copied().collect();
    let mut out = Vec::new();
    for &(r, c) in cells {
        if set.contains(&(r, c + 1)) {
            out.push(((r, c), (r, c + 1)));
        }
        if set.contains(&(r + 1, c)) {
            out.push(((r, c), (r + 1, c)));
        }
    }
    out
}

/// Every subgraph of the `k x w` lattice whose full components are catalog classes.
///
/// Returns `None` when the budget runs out; intended for small lattices only.
pub fn enumerate_snapshots(
    k: usize,
    w: usize,
    side: BlockSide,
    catalog: &ComponentCatalog,
    budget: &mut Budget,
) -> Option<Vec<SnapshotInfo>> {
    let cells: Vec<LCell> = (0..k).flat_map(|r| (0..w).map(move |c| (r, c))).collect();
    assert!(cells.len() < 32, "literal enumeration is limited to small lattices");
    let mut index = ClassIndex::new(catalog);
    let mut out = Vec::new();
    for mask in 0u64..(1u64 << cells.len()) {
        let chosen: Vec<LCell> = (0..cells.len()).filter(|&i| mask >> i & 1 == 1).map(|i| cells[i]).collect();
        let pairs = lattice_pairs(&chosen);
        assert!(pairs.len() < 32, "literal enumeration is limited to small lattices");
        for emask in 0u64..(1u64 << pairs.len()) {
            if !budget.tick() {
                return None;
            }
            let edges: Vec<_> = (0..pairs.len()).filter(|&i| emask >> i & 1 == 1).map(|i| pairs[i]).collect();
            if let Some(info) = analyse_snapshot(Snapshot::new(k, w, chosen.clone(), edges), side, &mut index) {
                out.push(info);
            }
        }
    }
    Some(out)
}

/// An embedding of a class representative up to translation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Shape {
    /// Cells with minimum row and column 0.
    pub cells: Vec<LCell>,
    pub edges: Vec<(LCell, LCell)>,
    pub height: usize,
    pub width: usize,
    /// Cell of every representative vertex.
    pub map: Vec<LCell>,
}

/// All shapes of `rep` that fit into `rows x cols`, deduplicated by image.
pub fn class_shapes(rep: &Graph, rows: usize, cols: usize, budget: &mut Budget) -> Option<Vec<Shape>> {
    let s = rep.n();
    let (kk, rr) = (rows.min(s), cols.min(s));
    let mut seen: HashSet<(Vec<LCell>, Vec<(LCell, LCell)>)> = HashSet::new();
    let mut out = Vec::new();
    let done = for_each_embedding(rep, kk, rr, false, budget, &mut |f| {
        let (r0, _, c0, _) = f.extents().expect("nonempty");
        let map: Vec<LCell> = (0..s)
            .map(|v| {
                let (row, col) = f.get(v).expect("total");
                ((row - r0) as usize, (col - c0) as usize)
            })
            .collect();
        let mut cells = map.clone();
        cells.sort();
        let mut edges: Vec<_> = rep.edges().iter().map(|&(u, v)| norm_edge(map[u], map[v])).collect();
        edges.sort();
        if seen.insert((cells.clone(), edges.clone())) {
            let height = cells.iter().map(|c| c.0).max().expect("nonempty") + 1;
            let width = cells.iter().map(|c| c.1).max().expect("nonempty") + 1;
            out.push(Shape { cells, edges, height, width, map });
        }
        false
    });
    done.map(|_| out)
}

/// Which boundaries of a block may be crossed by components.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlockSide {
    /// Components may extend past both boundary columns.
    Open,
    /// The block is the last one: nothing extends past its right column.
    Last,
}

/// The snapshots that arise as block restrictions of placements of catalog shapes:
/// pairwise disjoint pieces, at most `per_class[c]` of them from class `c`, with at
/// most `max_cells` occupied cells.
///
/// Every block restriction of a `k`-row embedding of the catalog's graph is among
/// them, since each component meets a block in the restriction of one placement.
/// Each of them belongs to the full snapshot set.
#[allow(clippy::too_many_arguments)]
pub fn realizable_snapshots(
    k: usize,
    w: usize,
    side: BlockSide,
    shapes: &[Vec<Shape>],
    per_class: &[usize],
    max_cells: usize,
    index: &mut ClassIndex,
    budget: &mut Budget,
) -> std::result::Result<Vec<SnapshotInfo>, TableStop> {
    type Piece = (usize, Vec<LCell>, Vec<(LCell, LCell)>);
    let mut piece_set: HashSet<Piece> = HashSet::new();
    for (class, class_shapes) in shapes.iter().enumerate() {
        for sh in class_shapes {
            if sh.height > k {
                continue;
            }
            let lo = -(sh.width as i64 - 1);
            let hi = match side {
                BlockSide::Open => w as i64 - 1,
                BlockSide::Last => w as i64 - sh.width as i64,
            };
            for ro in 0..=(k - sh.height) {
                for co in lo..=hi {
                    let place = |c: LCell| -> Option<LCell> {
                        let col = c.1 as i64 + co;
                        (col >= 0 && col < w as i64).then_some((c.0 + ro, col as usize))
                    };
                    let cells: Vec<LCell> = sh.cells.iter().filter_map(|&c| place(c)).collect();
                    if cells.is_empty() {
                        continue;
                    }
                    let edges: Vec<_> =
                        sh.edges.iter().filter_map(|&(a, b)| Some((place(a)?, place(b)?))).collect();
                    piece_set.insert((class, cells, edges));
                }
            }
        }
    }
    let mut pieces: Vec<Piece> = piece_set.into_iter().collect();
    pieces.sort();
    struct Ctx<'p> {
        pieces: &'p [Piece],
        k: usize,
        w: usize,
        occupied: Vec<bool>,
        chosen: Vec<usize>,
        left: Vec<usize>,
        found: HashSet<Snapshot>,
    }
    fn rec(ctx: &mut Ctx, i: usize, cells_left: usize, budget: &mut Budget) -> std::result::Result<(), TableStop> {
        if !budget.tick() {
            return Err(TableStop::Budget);
        }
        if i == ctx.pieces.len() {
            let mut cells = Vec::new();
            let mut edges = Vec::new();
            for &j in &ctx.chosen {
                cells.extend_from_slice(&ctx.pieces[j].1);
                edges.extend_from_slice(&ctx.pieces[j].2);
            }
            ctx.found.insert(Snapshot::new(ctx.k, ctx.w, cells, edges));
            if ctx.found.len() > MAX_SNAPSHOTS {
                return Err(TableStop::TooLarge);
            }
            return Ok(());
        }
        rec(ctx, i + 1, cells_left, budget)?;
        let (class, cells, _) = &ctx.pieces[i];
        let w = ctx.w;
        if ctx.left[*class] > 0 && cells.len() <= cells_left && cells.iter().all(|&(r, c)| !ctx.occupied[r * w + c]) {
            for &(r, c) in cells {
                ctx.occupied[r * w + c] = true;
            }
            ctx.left[*class] -= 1;
            ctx.chosen.push(i);
            let res = rec(ctx, i + 1, cells_left - cells.len(), budget);
            ctx.chosen.pop();
            ctx.left[*class] += 1;
            for &(r, c) in cells {
                ctx.occupied[r * w + c] = false;
            }
            res?;
        }
        Ok(())
    }
    let mut ctx = Ctx {
        pieces: &pieces,
        k,
        w,
        occupied: vec![false; k * w],
        chosen: Vec::new(),
        left: per_class.to_vec(),
        found: HashSet::new(),
    };
    rec(&mut ctx, 0, max_cells, budget)?;
    let mut snaps: Vec<Snapshot> = ctx.found.into_iter().collect();
    snaps.sort();
    Ok(snaps.into_iter().filter_map(|s| analyse_snapshot(s, side, index)).collect())
}

/// One pair of snapshots that may occupy consecutive blocks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdjacencyEntry {
    pub left: usize,
    pub right: usize,
    /// Per class: components meeting the shared column but neither outer boundary.
    pub boundary_freq: Vec<usize>,
    /// Per class: components meeting the shared column but not the left outer
    /// boundary, or `None` if one of them is not a catalog class. Used when the
    /// right snapshot is the last block.
    pub closing_freq: Option<Vec<usize>>,
}

/// Pairs `(a, b)` of `lefts x rights` whose shared column agrees, whose components
/// through the shared column span at most `mcc` columns, and whose components
/// meeting the shared column but neither outer boundary are catalog classes.
pub fn compute_adjacency(
    lefts: &[SnapshotInfo],
    rights: &[SnapshotInfo],
    mcc: usize,
    index: &mut ClassIndex,
    budget: &mut Budget,
) -> std::result::Result<Vec<AdjacencyEntry>, TableStop> {
    let t = index.catalog().classes.len();
    let mut by_left: HashMap<ColumnSignature, Vec<usize>> = HashMap::new();
    for (j, s) in rights.iter().enumerate() {
        by_left.entry(s.snapshot.left_signature()).or_default().push(j);
    }
    let mut out = Vec::new();
    for (i, a) in lefts.iter().enumerate() {
        let sa = &a.snapshot;
        let Some(candidates) = by_left.get(&sa.right_signature()) else { continue };
        let mid = sa.w - 1;
        for &j in candidates {
            if !budget.tick() {
                return Err(TableStop::Budget);
            }
            let sb = &rights[j].snapshot;
            let last = mid + sb.w - 1;
            let shift = |c: LCell| (c.0, c.1 + mid);
            let mut cells = sa.cells.clone();
            cells.extend(sb.cells.iter().map(|&c| shift(c)));
            cells.sort();
            cells.dedup();
            let mut edges = sa.edges.clone();
            edges.extend(sb.edges.iter().map(|&(x, y)| (shift(x), shift(y))));
            edges.sort();
            edges.dedup();
            let mut ok = true;
            let mut boundary = vec![0; t];
            let mut closing = Some(vec![0; t]);
            for (cc, ce) in cell_components(&cells, &edges) {
                if !cc.iter().any(|c| c.1 == mid) {
                    continue;
                }
                let lo = cc.iter().map(|c| c.1).min().expect("nonempty");
                let hi = cc.iter().map(|c| c.1).max().expect("nonempty");
                if hi - lo + 1 > mcc {
                    ok = false;
                    break;
                }
                if lo == 0 {
                    continue;
                }
                let class = index.class_of(&cc, &ce);
                if hi != last {
                    match class {
                        Some(c) => boundary[c] += 1,
                        None => {
                            ok = false;
                            break;
                        }
                    }
                }
                match (class, closing.as_mut()) {
                    (Some(c), Some(v)) => v[c] += 1,
                    (None, _) => closing = None,
                    _ => {}
                }
            }
            if ok {
                out.push(AdjacencyEntry { left: i, right: j, boundary_freq: boundary, closing_freq: closing });
                if out.len() > MAX_ADJACENCY {
                    return Err(TableStop::TooLarge);
                }
            }
        }
    }
    Ok(out)
}

/// How the component counting charges the last block.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CountingRule {
    /// The end snapshot contributes its right-only components, arcs into it their
    /// components that avoid both outer boundaries, and sinks need right-only
    /// components to be catalog classes.
    RightOnly,
    /// The end snapshot contributes every component avoiding its left column, arcs
    /// into it every shared-column component avoiding the left outer boundary, and
    /// sinks need all those components to be catalog classes.
    EndComplete,
}

impl CountingRule {
    pub fn is_sink(self, s: &SnapshotInfo) -> bool {
        match self {
            CountingRule::RightOnly => s.sink,
            CountingRule::EndComplete => s.sink_closed,
        }
    }

    pub fn end_freq(self, s: &SnapshotInfo) -> &[usize] {
        match self {
            CountingRule::RightOnly => &s.freq_right,
            CountingRule::EndComplete => &s.freq_closed,
        }
    }

    /// Counting coefficients of an arc into the end block, `None` if unusable.
    pub fn closing_freq(self, e: &AdjacencyEntry) -> Option<&[usize]> {
        match self {
            CountingRule::RightOnly => Some(&e.boundary_freq),
            CountingRule::EndComplete => e.closing_freq.as_deref(),
        }
    }
}

/// Snapshot universe shared by the block-digraph builders: snapshots of width
/// `mcc` (start and intermediate blocks), snapshots of the last block's width, and
/// their adjacency relations.
#[derive(Debug, Clone)]
pub struct SnapshotTables {
    pub inner: Vec<SnapshotInfo>,
    pub last: Vec<SnapshotInfo>,
    pub inner_adj: Vec<AdjacencyEntry>,
    pub last_adj: Vec<AdjacencyEntry>,
}

impl SnapshotTables {
    fn lookup(list: &[AdjacencyEntry]) -> HashMap<(usize, usize), usize> {
        list.iter().enumerate().map(|(i, e)| ((e.left, e.right), i)).collect()
    }
}

/// Block digraph `D(start, end, S')`: node 0 is start, node 1 is end, node `2 + i`
/// is `chosen[i]`. Start and the chosen snapshots index `tables.inner`; end indexes
/// `tables.last`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockDigraph {
    pub start: usize,
    pub end: usize,
    pub chosen: Vec<usize>,
    pub digraph: MultiDigraph,
    /// Adjacency entry of every arc: `(into_last, index)` into `inner_adj` or `last_adj`.
    pub arc_entries: Vec<(bool, usize)>,
}

impl BlockDigraph {
    pub fn node_count(&self) -> usize {
        self.chosen.len() + 2
    }
}

/// Builds `D(start, end, chosen)`: every adjacency between its nodes becomes an arc,
/// except arcs into start and arcs out of end. Loops appear for self-adjacent
/// snapshots. Arcs into end are kept only when the rule can count them.
pub fn build_digraph(start: usize, end: usize, chosen: &[usize], tables: &SnapshotTables, rule: CountingRule) -> BlockDigraph {
    let inner = SnapshotTables::lookup(&tables.inner_adj);
    let last = SnapshotTables::lookup(&tables.last_adj);
    let n = chosen.len() + 2;
    let snap_of = |node: usize| if node == 0 { start } else { chosen[node - 2] };
    let mut digraph = MultiDigraph::new(n);
    let mut arc_entries = Vec::new();
    let sources: Vec<usize> = std::iter::once(0).chain(2..n).collect();
    for &u in &sources {
        for v in 2..n {
            if let Some(&e) = inner.get(&(snap_of(u), snap_of(v))) {
                digraph.add_arc(u, v);
                arc_entries.push((false, e));
            }
        }
        if let Some(&e) = last.get(&(snap_of(u), end)) {
            if rule.closing_freq(&tables.last_adj[e]).is_some() {
                digraph.add_arc(u, 1);
                arc_entries.push((true, e));
            }
        }
    }
    BlockDigraph { start, end, chosen: chosen.to_vec(), digraph, arc_entries }
}

/// The flow system over the arcs of `d` for a block plan with `p` blocks, the
/// given spanning-tree arcs and the catalog multiplicities.
pub fn build_ilp(
    d: &BlockDigraph,
    tree_arcs: &[usize],
    p: usize,
    tables: &SnapshotTables,
    catalog: &ComponentCatalog,
    rule: CountingRule,
) -> IlpSystem {
    let arcs = d.digraph.arcs();
    let m = arcs.len();
    let mut sys = IlpSystem::new(m, 0, p as i64 - 1);
    let n = d.node_count();
    for v in 2..n {
        let mut terms = Vec::new();
        for (a, &(x, y)) in arcs.iter().enumerate() {
            let coeff = (y == v) as i64 - (x == v) as i64;
            if coeff != 0 {
                terms.push((a, coeff));
            }
        }
        sys.push(Family::Conservation, terms, Relation::Eq, 0);
    }
    let out0: Vec<_> = (0..m).filter(|&a| arcs[a].0 == 0).map(|a| (a, 1)).collect();
    sys.push(Family::StartFlow, out0, Relation::Eq, 1);
    let in1: Vec<_> = (0..m).filter(|&a| arcs[a].1 == 1).map(|a| (a, 1)).collect();
    sys.push(Family::EndFlow, in1, Relation::Eq, 1);
    sys.push(Family::PathLength, (0..m).map(|a| (a, 1)).collect(), Relation::Eq, p as i64 - 1);
    let start = &tables.inner[d.start];
    let end = &tables.last[d.end];
    for class in 0..catalog.classes.len() {
        let mut terms = Vec::new();
        for (a, &(x, _)) in arcs.iter().enumerate() {
            let from = if x == 0 { d.start } else { d.chosen[x - 2] };
            let (into_last, e) = d.arc_entries[a];
            let boun = if into_last {
                rule.closing_freq(&tables.last_adj[e]).expect("filtered in build_digraph")[class]
            } else {
                tables.inner_adj[e].boundary_freq[class]
            };
            let coeff = (tables.inner[from].freq_cen[class] + boun) as i64;
            if coeff != 0 {
                terms.push((a, coeff));
            }
        }
        let rhs = catalog.num(class) as i64 - start.freq_left[class] as i64 - rule.end_freq(end)[class] as i64;
        sys.push(Family::Counting, terms, Relation::Eq, rhs);
    }
    for &a in tree_arcs {
        sys.push(Family::TreeArc, vec![(a, 1)], Relation::Ge, 1);
    }
    for a in 0..m {
        sys.push(Family::NonNegative, vec![(a, 1)], Relation::Ge, 0);
    }
    sys
}

/// Block sequence (snapshots of blocks `1..=p`) encoded by a flow on `d`.
pub fn flow_to_sequence<'t>(d: &BlockDigraph, x: &[i64], tables: &'t SnapshotTables) -> Result<Vec<&'t Snapshot>> {
    let mut multi = MultiDigraph::new(d.node_count());
    for (a, &(u, v)) in d.digraph.arcs().iter().enumerate() {
        if x[a] < 0 {
            return Err(GridError::InconsistentFlow(format!("negative flow on arc {a}")));
        }
        multi.add_arcs(u, v, x[a] as usize);
    }
    let walk = euler::eulerian_path(&multi, 0, 1)?;
    Ok(walk
        .iter()
        .map(|&node| match node {
            0 => &tables.inner[d.start].snapshot,
            1 => &tables.last[d.end].snapshot,
            v => &tables.inner[d.chosen[v - 2]].snapshot,
        })
        .collect())
}

/// Stamps the block sequence into the `k x r` lattice and maps every lattice
/// component onto a distinct component of `g` of the same class.
pub fn stamp_blocks(g: &Graph, catalog: &ComponentCatalog, k: usize, plan: &BlockPlan, blocks: &[&Snapshot]) -> Result<GridEmbedding> {
    if blocks.len() != plan.p {
        return Err(GridError::InconsistentFlow(format!("{} blocks for a plan of {}", blocks.len(), plan.p)));
    }
    let mut cells = Vec::new();
    let mut edges = Vec::new();
    for (b, s) in blocks.iter().enumerate() {
        if s.w != plan.widths[b] || s.k != k {
            return Err(GridError::InconsistentFlow(format!("block {b} has the wrong width")));
        }
        let off = plan.starts[b];
        cells.extend(s.cells.iter().map(|&(r, c)| (r, c + off)));
        edges.extend(s.edges.iter().map(|&(x, y)| ((x.0, x.1 + off), (y.0, y.1 + off))));
    }
    cells.sort();
    cells.dedup();
    edges.sort();
    edges.dedup();
    let r = plan.starts[plan.p - 1] + plan.widths[plan.p - 1];
    let mut f = GridEmbedding::new(k, r, g.n());
    let mut next_member = vec![0usize; catalog.classes.len()];
    for (cc, ce) in cell_components(&cells, &edges) {
        let h = cells_to_graph(&cc, &ce);
        let class = catalog
            .class_of(&h)
            .ok_or_else(|| GridError::InconsistentFlow("a stamped component is not a catalog class".into()))?;
        let idx = next_member[class];
        let member = catalog.members[class]
            .get(idx)
            .ok_or_else(|| GridError::InconsistentFlow(format!("class {class} used too often")))?;
        next_member[class] += 1;
        let mg = g.induced_subgraph(member);
        let iso = find_isomorphism(&h, &mg).expect("same class");
        for (i, &(row, col)) in cc.iter().enumerate() {
            f.set(member[iso[i]], (row as i64 + 1, col as i64 + 1));
        }
    }
    if (0..catalog.classes.len()).any(|c| next_member[c] != catalog.num(c)) {
        return Err(GridError::InconsistentFlow("component multiset differs from the catalog".into()));
    }
    Ok(f)
}

/// Witness of a flow: Eulerian block sequence, stamping, and component mapping.
pub fn reconstruct_witness(
    g: &Graph,
    catalog: &ComponentCatalog,
    k: usize,
    plan: &BlockPlan,
    d: &BlockDigraph,
    x: &[i64],
    tables: &SnapshotTables,
) -> Result<GridEmbedding> {
    let blocks = flow_to_sequence(d, x, tables)?;
    stamp_blocks(g, catalog, k, plan, &blocks)
}

#[cfg(test)]
mod tests;
