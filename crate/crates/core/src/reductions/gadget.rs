//! The reduction from Batteries to grid embedding: grid frame, battery gadgets,
//! the assembled graph `G_B`, and the constructive witness for yes-instances.
//!
//! Coordinates follow the construction: rows `0..=12m+4`, columns `0..=8n+4`, with
//! gadget `(i, j)` (1-based) occupying the local window offset by
//! `(12(i-1), 8(j-1))`. Its rectangle is the boundary cycle of local rows `2..=14`
//! and columns `2..=10`, split by the separator line on local row 8 into a top half
//! and a bottom half. Witness cells add one to both coordinates.
//!
//! Each side of a battery (positive `P`, negative `N`) is a rigid body hanging from
//! the separator cell `(8, 6)` together with two horizontal arms of length two. The
//! voltage edge extends arm `B` by one leaf. The side on top shares the lane of local
//! row 7 with the two wire vertices `(7, 3)` and `(7, 9)`, so a charged top side
//! pushes one of the wire vertices into the neighbouring gadget. The bodies leave
//! different holes next to the rectangle's top and bottom sides, which forces the
//! synchronization pendants of vertically adjacent gadgets to agree on the sign.

use std::collections::{BTreeSet, HashMap};

use crate::embedding::{validate, Cell, GridEmbedding};
use crate::error::{GridError, Result};
use crate::graph::Graph;

use super::sat::{placement_check, BatteriesInstance, Placement, Sign};

/// Local rows of the top half touched by the bodies and the lane.
const BODY_ROWS: std::ops::RangeInclusive<i64> = 3..=6;
const HALF_COLS: std::ops::RangeInclusive<i64> = 3..=9;
const LANE_ROW: i64 = 7;
const SEPARATOR_ROW: i64 = 8;
const ROOT_COL: i64 = 6;

/// One of the two sides of a battery gadget.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    Positive,
    Negative,
}

impl Side {
    fn tag(self) -> &'static str {
        match self {
            Side::Positive => "P",
            Side::Negative => "N",
        }
    }

    /// Cells of the top-half body adjacent to the rectangle's top side that stay free.
    fn holes(self) -> &'static [i64] {
        match self {
            Side::Positive => &[6],
            Side::Negative => &[5, 7],
        }
    }
}

/// How the wire vertices of a gadget sit relative to its rectangle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WireMode {
    /// Both wire vertices inside; needs voltage 0 on the top side.
    BothInside,
    /// Left wire vertex inside, right one in the next gadget.
    LeftInside,
    /// Left wire vertex in the previous gadget, right one inside.
    RightInside,
}

/// Vertex roles of a battery gadget. Side indices are 1-based: index 1 is the root
/// attached to the separator, then the body in row-major order of the top layout,
/// then the arm vertices `A1, A2, B1, B2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GadgetRole {
    Side(Side, usize),
    /// Leaf of the voltage edge, attached to `B2` of its side.
    Voltage(Side),
    /// Wire vertex 1 (left) or 2 (right).
    Wire(usize),
    /// Synchronization vertex `1..=3` on the top side, `4..=6` on the bottom side.
    Sync(usize),
}

/// Body cells of `side` in its top layout, row-major.
fn body_cells(side: Side) -> Vec<Cell> {
    let mut cells = Vec::new();
    for r in BODY_ROWS {
        for c in HALF_COLS {
            if r == *BODY_ROWS.start() && side.holes().contains(&c) {
                continue;
            }
            cells.push((r, c));
        }
    }
    cells
}

/// Number of vertices of one side (root, body, four arm vertices).
pub fn side_size(side: Side) -> usize {
    1 + body_cells(side).len() + 4
}

/// Index of `A1` within a side; `A2`, `B1`, `B2` follow.
fn arm_base(side: Side) -> usize {
    2 + body_cells(side).len()
}

/// Edges among the side's vertices, as pairs of 1-based side indices.
pub fn side_edges(side: Side) -> Vec<(usize, usize)> {
    let body = body_cells(side);
    let index: HashMap<Cell, usize> = body.iter().enumerate().map(|(k, &c)| (c, k + 2)).collect();
    let mut edges = Vec::new();
    for (&(r, c), &u) in &index {
        for next in [(r + 1, c), (r, c + 1)] {
            if let Some(&v) = index.get(&next) {
                edges.push((u.min(v), u.max(v)));
            }
        }
    }
    edges.push((1, index[&(LANE_ROW - 1, ROOT_COL)]));
    let a = arm_base(side);
    edges.extend([(1, a), (a, a + 1), (1, a + 2), (a + 2, a + 3)]);
    edges.sort_unstable();
    edges
}

/// Side vertex named by one of the letters `a..=h`: the arms of the positive side
/// are `a, b` (arm A) and `c, d` (arm B), those of the negative side `e..=h`.
pub fn lettered_vertex(letter: char) -> Option<(Side, usize)> {
    let (side, offset) = match letter {
        'a'..='d' => (Side::Positive, letter as usize - 'a' as usize),
        'e'..='h' => (Side::Negative, letter as usize - 'e' as usize),
        _ => return None,
    };
    Some((side, arm_base(side) + offset))
}

/// Canonical local coordinates of every gadget vertex for one variant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GadgetLayout {
    pub sign: Sign,
    pub mode: WireMode,
    pub voltage: (bool, bool),
    pub cells: Vec<(GadgetRole, Cell)>,
}

impl GadgetLayout {
    /// Layout of the gadget `(x1, x2)` with the given sign and wire mode. Voltage
    /// leaves are present exactly for the charged sides; both wire vertices and all
    /// six synchronization vertices are always listed.
    pub fn canonical(sign: Sign, mode: WireMode, x1: bool, x2: bool) -> Result<Self> {
        let (top, bottom) = match sign {
            Sign::Plus => (Side::Positive, Side::Negative),
            Sign::Minus => (Side::Negative, Side::Positive),
        };
        let charged = |s: Side| match s {
            Side::Positive => x1,
            Side::Negative => x2,
        };
        if mode == WireMode::BothInside && charged(top) {
            return Err(GridError::InvalidInstance("both wire vertices fit inside only when the top side carries no voltage".into()));
        }
        let mut cells = Vec::new();
        let b_on_left = mode == WireMode::RightInside;
        for (side, on_top) in [(top, true), (bottom, false)] {
            let place = |(r, c): Cell| if on_top { (r, c) } else { (2 * SEPARATOR_ROW - r, c) };
            cells.push((GadgetRole::Side(side, 1), place((LANE_ROW, ROOT_COL))));
            for (k, &cell) in body_cells(side).iter().enumerate() {
                cells.push((GadgetRole::Side(side, k + 2), place(cell)));
            }
            let b_left = on_top && b_on_left;
            let (a_dir, b_dir) = if b_left { (1, -1) } else { (-1, 1) };
            let base = arm_base(side);
            cells.push((GadgetRole::Side(side, base), place((LANE_ROW, ROOT_COL + a_dir))));
            cells.push((GadgetRole::Side(side, base + 1), place((LANE_ROW, ROOT_COL + 2 * a_dir))));
            cells.push((GadgetRole::Side(side, base + 2), place((LANE_ROW, ROOT_COL + b_dir))));
            cells.push((GadgetRole::Side(side, base + 3), place((LANE_ROW, ROOT_COL + 2 * b_dir))));
            if charged(side) {
                cells.push((GadgetRole::Voltage(side), place((LANE_ROW, ROOT_COL + 3 * b_dir))));
            }
        }
        let left_inside = mode != WireMode::RightInside;
        let right_inside = mode != WireMode::LeftInside;
        cells.push((GadgetRole::Wire(1), (LANE_ROW, if left_inside { 3 } else { 1 })));
        cells.push((GadgetRole::Wire(2), (LANE_ROW, if right_inside { 9 } else { 11 })));
        for s in 1..=3 {
            let col = 4 + s as i64;
            let top_hole = top.holes().contains(&col);
            let bottom_hole = bottom.holes().contains(&col);
            cells.push((GadgetRole::Sync(s), (if top_hole { 3 } else { 1 }, col)));
            cells.push((GadgetRole::Sync(s + 3), (if bottom_hole { 13 } else { 15 }, col)));
        }
        cells.sort();
        Ok(GadgetLayout { sign, mode, voltage: (x1, x2), cells })
    }

    pub fn cell(&self, role: GadgetRole) -> Option<Cell> {
        self.cells.iter().find(|(r, _)| *r == role).map(|&(_, c)| c)
    }
}

/// A graph together with one lattice cell per vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoordinateGraph {
    pub graph: Graph,
    pub cells: Vec<Cell>,
}

/// Cells of the `m x n` grid frame: three-cell-thick bands along the four sides of
/// the box `[0, 12m+4] x [0, 8n+4]`.
pub fn frame_cells(m: usize, n: usize) -> BTreeSet<Cell> {
    let (rows, cols) = (12 * m as i64 + 4, 8 * n as i64 + 4);
    let mut set = BTreeSet::new();
    for r in 0..=rows {
        for c in 0..=cols {
            if r <= 2 || r >= rows - 2 || c <= 2 || c >= cols - 2 {
                set.insert((r, c));
            }
        }
    }
    set
}

fn unit_adjacency(cells: &[Cell]) -> Vec<(usize, usize)> {
    let index: HashMap<Cell, usize> = cells.iter().enumerate().map(|(k, &c)| (c, k)).collect();
    let mut edges = Vec::new();
    for (u, &(r, c)) in cells.iter().enumerate() {
        for next in [(r + 1, c), (r, c + 1)] {
            if let Some(&v) = index.get(&next) {
                edges.push((u, v));
            }
        }
    }
    edges
}

/// The `m x n` grid frame with unit-adjacency edges; vertex `v` sits at `cells[v]`
/// (row-major order).
pub fn grid_frame(m: usize, n: usize) -> Result<CoordinateGraph> {
    if m == 0 || n == 0 {
        return Err(GridError::InvalidInstance("grid frame needs m, n >= 1".into()));
    }
    let cells: Vec<Cell> = frame_cells(m, n).into_iter().collect();
    let graph = Graph::from_edges(cells.len(), &unit_adjacency(&cells))?;
    Ok(CoordinateGraph { graph, cells })
}

/// Cells of the rigid skeleton: the frame plus every rectangle side and separator.
fn skeleton_cells(m: usize, n: usize) -> BTreeSet<Cell> {
    let mut set = frame_cells(m, n);
    let (m, n) = (m as i64, n as i64);
    for t in 1..=2 * m {
        for c in 2..=8 * n + 2 {
            set.insert((6 * (t - 1) + 2, c));
        }
    }
    for j in 1..=n {
        for r in 2..=12 * m + 2 {
            set.insert((r, 8 * (j - 1) + 2));
        }
    }
    set
}

/// Output of [`reduce_batteries_to_grid`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BatteriesGraph {
    pub graph: Graph,
    /// `frame:(r,c)` and `line:(r,c)` for the skeleton, `gadget:(i,j):P:k`,
    /// `gadget:(i,j):N:k`, `gadget:(i,j):P:volt`, `gadget:(i,j):N:volt` for the sides,
    /// `wire:(i,j)` for `0 <= j <= n` and `sync:(i,j):s` for `1 <= i < m`.
    pub labels: Vec<String>,
    pub index: HashMap<String, usize>,
    pub m: usize,
    pub n: usize,
}

impl BatteriesGraph {
    /// Witness lattice rows.
    pub fn k(&self) -> usize {
        12 * self.m + 5
    }

    /// Witness lattice columns.
    pub fn r(&self) -> usize {
        8 * self.n + 5
    }

    pub fn id(&self, label: &str) -> Option<usize> {
        self.index.get(label).copied()
    }
}

fn side_label(i: usize, j: usize, side: Side, k: usize) -> String {
    format!("gadget:({i},{j}):{}:{k}", side.tag())
}

fn voltage_label(i: usize, j: usize, side: Side) -> String {
    format!("gadget:({i},{j}):{}:volt", side.tag())
}

fn cell_label(prefix: &str, (r, c): Cell) -> String {
    format!("{prefix}:({r},{c})")
}

struct Builder {
    labels: Vec<String>,
    index: HashMap<String, usize>,
    edges: Vec<(usize, usize)>,
}

impl Builder {
    fn vertex(&mut self, label: String) -> usize {
        let id = self.labels.len();
        self.index.insert(label.clone(), id);
        self.labels.push(label);
        id
    }

    fn edge(&mut self, a: &str, b: &str) {
        self.edges.push((self.index[a], self.index[b]));
    }
}

/// Label of the skeleton vertex at global cell `cell`.
fn skeleton_label(frame: &BTreeSet<Cell>, cell: Cell) -> String {
    cell_label(if frame.contains(&cell) { "frame" } else { "line" }, cell)
}

/// Builds `G_B`: the skeleton, one gadget per battery with its voltage edges, the
/// shared wire vertices, and the synchronization vertices of interior rectangle
/// sides (the top side of row 1 and the bottom side of row `m` get none).
pub fn reduce_batteries_to_grid(b: &BatteriesInstance) -> Result<BatteriesGraph> {
    let (m, n) = (b.rows, b.cols);
    let frame = frame_cells(m, n);
    let skeleton: Vec<Cell> = skeleton_cells(m, n).into_iter().collect();
    let mut bld = Builder { labels: Vec::new(), index: HashMap::new(), edges: Vec::new() };
    for &cell in &skeleton {
        bld.vertex(skeleton_label(&frame, cell));
    }
    bld.edges.extend(unit_adjacency(&skeleton));
    for i in 1..=m {
        for j in 1..=n {
            let (x1, x2) = b.cell(i - 1, j - 1);
            let (r0, c0) = (12 * (i as i64 - 1), 8 * (j as i64 - 1));
            let anchor = skeleton_label(&frame, (r0 + SEPARATOR_ROW, c0 + ROOT_COL));
            for side in [Side::Positive, Side::Negative] {
                for k in 1..=side_size(side) {
                    bld.vertex(side_label(i, j, side, k));
                }
                for (u, v) in side_edges(side) {
                    bld.edge(&side_label(i, j, side, u), &side_label(i, j, side, v));
                }
                bld.edge(&side_label(i, j, side, 1), &anchor);
                let charged = if side == Side::Positive { x1 } else { x2 };
                if charged {
                    bld.vertex(voltage_label(i, j, side));
                    bld.edge(&voltage_label(i, j, side), &side_label(i, j, side, arm_base(side) + 3));
                }
            }
        }
    }
    for i in 1..=m {
        for j in 0..=n {
            let label = format!("wire:({i},{j})");
            bld.vertex(label.clone());
            let anchor = skeleton_label(&frame, (12 * (i as i64 - 1) + LANE_ROW, 8 * j as i64 + 2));
            bld.edge(&label, &anchor);
        }
    }
    for i in 1..m {
        for j in 1..=n {
            for s in 1..=3 {
                let label = format!("sync:({i},{j}):{s}");
                bld.vertex(label.clone());
                let anchor = skeleton_label(&frame, (12 * i as i64 + 2, 8 * (j as i64 - 1) + 4 + s as i64));
                bld.edge(&label, &anchor);
            }
        }
    }
    let graph = Graph::from_edges(bld.labels.len(), &bld.edges)?;
    Ok(BatteriesGraph { graph, labels: bld.labels, index: bld.index, m, n })
}

/// Gadget variants chosen for a correct and safe placement: in every row the first
/// gadget `k_i` transmitting voltage 0 keeps both wire vertices, gadgets left of it
/// keep only their left wire vertex, gadgets right of it only their right one.
pub fn witness_layouts(b: &BatteriesInstance, p: &Placement) -> Result<Vec<Vec<GadgetLayout>>> {
    let check = placement_check(b, p)?;
    if !(check.correct && check.safe) {
        return Err(GridError::PlacementNotCorrectSafe);
    }
    let mut rows = Vec::with_capacity(b.rows);
    for i in 0..b.rows {
        let k_i = (0..b.cols).find(|&j| !p.voltage(b, i, j)).expect("safe rows have an uncharged battery");
        let mut row = Vec::with_capacity(b.cols);
        for j in 0..b.cols {
            let mode = match j.cmp(&k_i) {
                std::cmp::Ordering::Less => WireMode::LeftInside,
                std::cmp::Ordering::Equal => WireMode::BothInside,
                std::cmp::Ordering::Greater => WireMode::RightInside,
            };
            let (x1, x2) = b.cell(i, j);
            row.push(GadgetLayout::canonical(p.sign(i, j), mode, x1, x2)?);
        }
        rows.push(row);
    }
    Ok(rows)
}

/// Embedding of `G_B` for a correct and safe placement, assembled by translating each
/// gadget's canonical layout by `(12(i-1), 8(j-1))` onto the fixed skeleton.
pub fn construct_batteries_witness(b: &BatteriesInstance, p: &Placement) -> Result<(BatteriesGraph, GridEmbedding)> {
    let layouts = witness_layouts(b, p)?;
    let gb = reduce_batteries_to_grid(b)?;
    let mut f = GridEmbedding::new(gb.k(), gb.r(), gb.graph.n());
    let mut put = |label: &str, (r, c): Cell| {
        f.set(gb.index[label], (r + 1, c + 1));
    };
    for label in &gb.labels {
        if let Some(cell) = parse_skeleton_label(label) {
            put(label, cell);
        }
    }
    for i in 1..=b.rows {
        for j in 1..=b.cols {
            let layout = &layouts[i - 1][j - 1];
            let offset = |(r, c): Cell| (r + 12 * (i as i64 - 1), c + 8 * (j as i64 - 1));
            for &(role, cell) in &layout.cells {
                let label = match role {
                    GadgetRole::Side(side, k) => side_label(i, j, side, k),
                    GadgetRole::Voltage(side) => voltage_label(i, j, side),
                    GadgetRole::Wire(1) if j == 1 => format!("wire:({i},0)"),
                    GadgetRole::Wire(2) => format!("wire:({i},{j})"),
                    GadgetRole::Sync(s) if s >= 4 && i < b.rows => format!("sync:({i},{j}):{}", s - 3),
                    _ => continue,
                };
                put(&label, offset(cell));
            }
        }
    }
    if !validate(&gb.graph, &f).is_valid() {
        return Err(GridError::InvalidInstance("assembled gadget layouts do not form an embedding".into()));
    }
    Ok((gb, f))
}

/// Global cell encoded in a `frame:(r,c)` or `line:(r,c)` label.
pub fn parse_skeleton_label(label: &str) -> Option<Cell> {
    let rest = label.strip_prefix("frame:").or_else(|| label.strip_prefix("line:"))?;
    let inner = rest.strip_prefix('(')?.strip_suffix(')')?;
    let (r, c) = inner.split_once(',')?;
    Some((r.parse().ok()?, c.parse().ok()?))
}
