//! The embedding data model: validation, grid distance, the distance
//! approximation parameter, grid directions, and the subgrid/agree/glue algebra.

use std::collections::HashMap;
use std::fmt;

use crate::error::{GridError, Result};
use crate::graph::{distances_from, Graph};

/// Lattice cell `(row, col)`. Public embeddings use 1-based coordinates; intermediate
/// results of the composition algebra may hold arbitrary integers.
pub type Cell = (i64, i64);

/// Partial injective map from vertices to lattice cells with nominal bounds `k x r`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GridEmbedding {
    pub k: usize,
    pub r: usize,
    pos: Vec<Option<Cell>>,
}

impl GridEmbedding {
    /// Empty embedding of a graph on `n` vertices into the `k x r` lattice.
    pub fn new(k: usize, r: usize, n: usize) -> Self {
        GridEmbedding { k, r, pos: vec![None; n] }
    }

    /// Builds an embedding from one cell per vertex.
    pub fn from_cells(k: usize, r: usize, cells: &[Cell]) -> Self {
        GridEmbedding { k, r, pos: cells.iter().copied().map(Some).collect() }
    }

    /// Size of the vertex universe (mapped or not).
    pub fn universe(&self) -> usize {
        self.pos.len()
    }

    pub fn set(&mut self, v: usize, cell: Cell) {
        self.pos[v] = Some(cell);
    }

    pub fn unset(&mut self, v: usize) {
        self.pos[v] = None;
    }

    pub fn get(&self, v: usize) -> Option<Cell> {
        self.pos.get(v).copied().flatten()
    }

    pub fn is_mapped(&self, v: usize) -> bool {
        self.get(v).is_some()
    }

    /// Mapped vertices in increasing order.
    pub fn vertices(&self) -> Vec<usize> {
        (0..self.pos.len()).filter(|&v| self.pos[v].is_some()).collect()
    }

    /// Map from occupied cell to the vertex sitting there (first one on collisions).
    pub fn cell_map(&self) -> HashMap<Cell, usize> {
        let mut m = HashMap::new();
        for (v, c) in self.pos.iter().enumerate() {
            if let Some(c) = c {
                m.entry(*c).or_insert(v);
            }
        }
        m
    }

    /// `(min_row, max_row, min_col, max_col)` over mapped vertices.
    pub fn extents(&self) -> Option<(i64, i64, i64, i64)> {
        let mut it = self.pos.iter().flatten();
        let &(r0, c0) = it.next()?;
        Some(it.fold((r0, r0, c0, c0), |(a, b, c, d), &(r, col)| (a.min(r), b.max(r), c.min(col), d.max(col))))
    }

    /// Number of occupied rows spanned (`length` of an embedding).
    pub fn length(&self) -> usize {
        self.extents().map_or(0, |(a, b, _, _)| (b - a + 1) as usize)
    }

    /// Number of occupied columns spanned (`width` of an embedding).
    pub fn width(&self) -> usize {
        self.extents().map_or(0, |(_, _, c, d)| (d - c + 1) as usize)
    }

    /// Moves every mapped vertex by `(dr, dc)`.
    pub fn translated(&self, dr: i64, dc: i64) -> Self {
        let pos = self.pos.iter().map(|p| p.map(|(r, c)| (r + dr, c + dc))).collect();
        GridEmbedding { k: self.k, r: self.r, pos }
    }

    /// Shifts to 1-based coordinates with the minimum row and column at 1 and sets
    /// the bounds to the occupied extents.
    pub fn normalized(&self) -> Self {
        match self.extents() {
            None => GridEmbedding { k: 0, r: 0, pos: self.pos.clone() },
            Some((r0, r1, c0, c1)) => {
                let mut f = self.translated(1 - r0, 1 - c0);
                f.k = (r1 - r0 + 1) as usize;
                f.r = (c1 - c0 + 1) as usize;
                f
            }
        }
    }

    /// Restriction to the given vertices (others become unmapped).
    pub fn restricted(&self, vertices: &[usize]) -> Self {
        let mut f = GridEmbedding::new(self.k, self.r, self.pos.len());
        for &v in vertices {
            f.pos[v] = self.pos[v];
        }
        f
    }

    /// Mirror across the horizontal axis of the `k x r` box.
    pub fn flipped_rows(&self) -> Self {
        let k = self.k as i64;
        let pos = self.pos.iter().map(|p| p.map(|(r, c)| (k + 1 - r, c))).collect();
        GridEmbedding { k: self.k, r: self.r, pos }
    }

    /// Mirror across the vertical axis of the `k x r` box.
    pub fn flipped_cols(&self) -> Self {
        let w = self.r as i64;
        let pos = self.pos.iter().map(|p| p.map(|(r, c)| (r, w + 1 - c))).collect();
        GridEmbedding { k: self.k, r: self.r, pos }
    }
}

/// Why an embedding fails validation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InvalidReason {
    /// Vertex universe differs from the graph's vertex count.
    WrongUniverse { expected: usize, found: usize },
    Unmapped(usize),
    OutOfBounds(usize),
    Collision(usize, usize),
    EdgeLength(usize, usize),
}

impl fmt::Display for InvalidReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InvalidReason::WrongUniverse { expected, found } => {
                write!(f, "embedding covers {found} vertices, graph has {expected}")
            }
            InvalidReason::Unmapped(v) => write!(f, "vertex {v} is unmapped"),
            InvalidReason::OutOfBounds(v) => write!(f, "vertex {v} lies outside the lattice"),
            InvalidReason::Collision(u, v) => write!(f, "vertices {u} and {v} share a cell"),
            InvalidReason::EdgeLength(u, v) => write!(f, "edge {{{u}, {v}}} does not have length 1"),
        }
    }
}

/// Result of [`validate`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Validity {
    Valid,
    Invalid(InvalidReason),
}

impl Validity {
    pub fn is_valid(&self) -> bool {
        matches!(self, Validity::Valid)
    }
}

/// Checks that `f` is total on `V(g)`, injective, inside `[k] x [r]`, and maps every
/// edge to a unit step.
pub fn validate(g: &Graph, f: &GridEmbedding) -> Validity {
    if f.universe() != g.n() {
        return Validity::Invalid(InvalidReason::WrongUniverse { expected: g.n(), found: f.universe() });
    }
    let mut seen: HashMap<Cell, usize> = HashMap::new();
    for v in 0..g.n() {
        let Some((r, c)) = f.get(v) else {
            return Validity::Invalid(InvalidReason::Unmapped(v));
        };
        if r < 1 || c < 1 || r > f.k as i64 || c > f.r as i64 {
            return Validity::Invalid(InvalidReason::OutOfBounds(v));
        }
        if let Some(&u) = seen.get(&(r, c)) {
            return Validity::Invalid(InvalidReason::Collision(u, v));
        }
        seen.insert((r, c), v);
    }
    for &(u, v) in g.edges() {
        if l1(f.get(u).expect("total"), f.get(v).expect("total")) != 1 {
            return Validity::Invalid(InvalidReason::EdgeLength(u, v));
        }
    }
    Validity::Valid
}

fn l1(a: Cell, b: Cell) -> usize {
    ((a.0 - b.0).abs() + (a.1 - b.1).abs()) as usize
}

/// L1 distance between the images of `u` and `v`.
pub fn grid_distance(f: &GridEmbedding, u: usize, v: usize) -> Result<usize> {
    let a = f.get(u).ok_or(GridError::UnmappedVertex(u))?;
    let b = f.get(v).ok_or(GridError::UnmappedVertex(v))?;
    Ok(l1(a, b))
}

/// Value of the distance approximation parameter together with a pair attaining it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DistanceReport {
    pub a_f: usize,
    pub witness_pair: (usize, usize),
}

/// Maximum over all pairs of graph distance minus grid distance.
///
/// Ties are broken towards the lexicographically smallest pair.
pub fn distance_approximation(g: &Graph, f: &GridEmbedding) -> Result<DistanceReport> {
    if !g.is_connected() {
        return Err(GridError::Disconnected);
    }
    let mut best = DistanceReport { a_f: 0, witness_pair: (0, 0) };
    for u in 0..g.n() {
        let du = distances_from(g, u);
        let fu = f.get(u).ok_or(GridError::UnmappedVertex(u))?;
        for v in u..g.n() {
            let fv = f.get(v).ok_or(GridError::UnmappedVertex(v))?;
            let d = du[v].expect("connected");
            let gap = d.saturating_sub(l1(fu, fv));
            if gap > best.a_f {
                best = DistanceReport { a_f: gap, witness_pair: (u, v) };
            }
        }
    }
    Ok(best)
}

/// Grid direction of an edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Direction {
    /// Row increases by one.
    Up,
    /// Row decreases by one.
    Down,
    /// Column increases by one.
    Right,
    /// Column decreases by one.
    Left,
}

impl Direction {
    pub const ALL: [Direction; 4] = [Direction::Up, Direction::Down, Direction::Right, Direction::Left];

    /// Cell offset `(dr, dc)` of one step.
    pub fn delta(self) -> (i64, i64) {
        match self {
            Direction::Up => (1, 0),
            Direction::Down => (-1, 0),
            Direction::Right => (0, 1),
            Direction::Left => (0, -1),
        }
    }

    pub fn opposite(self) -> Direction {
        match self {
            Direction::Up => Direction::Down,
            Direction::Down => Direction::Up,
            Direction::Right => Direction::Left,
            Direction::Left => Direction::Right,
        }
    }

    pub fn is_vertical(self) -> bool {
        matches!(self, Direction::Up | Direction::Down)
    }

    /// Direction of the unit step from `a` to `b`, if they are adjacent.
    pub fn between(a: Cell, b: Cell) -> Option<Direction> {
        match (b.0 - a.0, b.1 - a.1) {
            (1, 0) => Some(Direction::Up),
            (-1, 0) => Some(Direction::Down),
            (0, 1) => Some(Direction::Right),
            (0, -1) => Some(Direction::Left),
            _ => None,
        }
    }
}

/// Direction of the edge from `u` to `v` in `f`.
pub fn edge_direction(f: &GridEmbedding, u: usize, v: usize) -> Result<Direction> {
    let a = f.get(u).ok_or(GridError::UnmappedVertex(u))?;
    let b = f.get(v).ok_or(GridError::UnmappedVertex(v))?;
    Direction::between(a, b).ok_or(GridError::NotUnitDistance(u, v))
}

/// Per-direction edge counts along a path.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct DirectionProfile {
    pub up: usize,
    pub down: usize,
    pub left: usize,
    pub right: usize,
}

impl DirectionProfile {
    pub fn count(&self, d: Direction) -> usize {
        match d {
            Direction::Up => self.up,
            Direction::Down => self.down,
            Direction::Left => self.left,
            Direction::Right => self.right,
        }
    }

    fn bump(&mut self, d: Direction) {
        match d {
            Direction::Up => self.up += 1,
            Direction::Down => self.down += 1,
            Direction::Left => self.left += 1,
            Direction::Right => self.right += 1,
        }
    }
}

/// Counts the grid directions of consecutive pairs of `path` in `f`.
pub fn path_direction_profile(f: &GridEmbedding, path: &[usize]) -> Result<DirectionProfile> {
    let mut p = DirectionProfile::default();
    for w in path.windows(2) {
        p.bump(edge_direction(f, w[0], w[1])?);
    }
    Ok(p)
}

/// True iff some shift `(a, b)` places `f_small` inside `f_big` so that the window
/// `[1, k_small] x [1, r_small]` of `f_small` contains exactly the shifted images of
/// its own vertices under `f_big`.
pub fn is_subgrid(f_small: &GridEmbedding, f_big: &GridEmbedding) -> bool {
    let verts = f_small.vertices();
    let Some(&v0) = verts.first() else {
        return true;
    };
    let (Some(s0), Some(b0)) = (f_small.get(v0), f_big.get(v0)) else {
        return false;
    };
    let (a, b) = (s0.0 - b0.0, s0.1 - b0.1);
    for &v in &verts {
        match (f_small.get(v), f_big.get(v)) {
            (Some(s), Some(t)) if s == (t.0 + a, t.1 + b) => {}
            _ => return false,
        }
    }
    let small_cells = f_small.cell_map();
    for (v, cell) in f_big.pos.iter().enumerate() {
        let Some((r, c)) = cell else { continue };
        let (sr, sc) = (r + a, c + b);
        if sr >= 1 && sc >= 1 && sr <= f_small.k as i64 && sc <= f_small.r as i64
            && small_cells.get(&(sr, sc)) != Some(&v) {
                return false;
            }
    }
    true
}

fn collides_with_shift(f1: &GridEmbedding, f2: &GridEmbedding, shift: Cell) -> bool {
    let cells2 = f2.cell_map();
    for (v, cell) in f1.pos.iter().enumerate() {
        let Some((r, c)) = cell else { continue };
        if let Some(&u) = cells2.get(&(r + shift.0, c + shift.1)) {
            if u != v {
                return true;
            }
        }
    }
    false
}

/// Decides whether `f2` agrees with `f1`: some shift `(a, b)` with
/// `f2(u) = f1(u) + (a, b)` on shared vertices and no cell collision between
/// exclusive vertices. Returns the shift.
///
/// With an empty overlap the lexicographically smallest non-colliding shift of the
/// bounding-box scan is returned.
pub fn agrees(f1: &GridEmbedding, f2: &GridEmbedding) -> Option<Cell> {
    let shared: Vec<usize> = f1.vertices().into_iter().filter(|&v| f2.is_mapped(v)).collect();
    if let Some(&v) = shared.first() {
        let (p, q) = (f1.get(v)?, f2.get(v)?);
        let shift = (q.0 - p.0, q.1 - p.1);
        let aligned = shared.iter().all(|&u| {
            let (x, y) = (f1.get(u).expect("shared"), f2.get(u).expect("shared"));
            (y.0 - x.0, y.1 - x.1) == shift
        });
        return (aligned && !collides_with_shift(f1, f2, shift)).then_some(shift);
    }
    let (Some(e1), Some(e2)) = (f1.extents(), f2.extents()) else {
        return Some((0, 0));
    };
    for a in (e2.0 - e1.1 - 1)..=(e2.1 - e1.0 + 1) {
        for b in (e2.2 - e1.3 - 1)..=(e2.3 - e1.2 + 1) {
            if !collides_with_shift(f1, f2, (a, b)) {
                return Some((a, b));
            }
        }
    }
    None
}

/// Glues pieces sharing the vertex set `shared` into one embedding expressed in the
/// coordinate frame of the first piece (no normalization).
pub fn glue_raw(pieces: &[&GridEmbedding], shared: &[usize]) -> Result<GridEmbedding> {
    if shared.is_empty() {
        return Err(GridError::EmptyShared);
    }
    let first = pieces.first().ok_or(GridError::EmptyShared)?;
    let mut shifts = Vec::with_capacity(pieces.len());
    for (i, p) in pieces.iter().enumerate() {
        if shared.iter().any(|&u| !p.is_mapped(u)) {
            return Err(GridError::Disagreement(0, i));
        }
        shifts.push(agrees(first, p).ok_or(GridError::Disagreement(0, i))?);
    }
    for i in 0..pieces.len() {
        for j in i + 1..pieces.len() {
            if agrees(pieces[i], pieces[j]).is_none() {
                return Err(GridError::Disagreement(i, j));
            }
        }
    }
    let universe = pieces.iter().map(|p| p.universe()).max().unwrap_or(0);
    let mut out = GridEmbedding::new(first.k, first.r, universe);
    let mut occupied: HashMap<Cell, usize> = HashMap::new();
    for (i, p) in pieces.iter().enumerate() {
        let (a, b) = shifts[i];
        for v in p.vertices() {
            let (r, c) = p.get(v).expect("mapped");
            let cell = (r - a, c - b);
            if let Some(prev) = out.get(v) {
                if prev != cell {
                    return Err(GridError::Disagreement(0, i));
                }
                continue;
            }
            if let Some(&u) = occupied.get(&cell) {
                if u != v {
                    return Err(GridError::Disagreement(0, i));
                }
            }
            occupied.insert(cell, v);
            out.set(v, cell);
        }
    }
    Ok(out)
}

/// Glues pieces that pairwise agree through the shared set and re-normalizes the
/// result to 1-based coordinates with bounds equal to the occupied extents.
pub fn glue(pieces: &[&GridEmbedding], shared: &[usize]) -> Result<GridEmbedding> {
    Ok(glue_raw(pieces, shared)?.normalized())
}
