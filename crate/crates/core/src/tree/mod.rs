//! Trees: split-vertex classification, `(P,t)`-paths, the direction-constrained
//! sweep embedder, and the composition solver parameterized by the distance
//! approximation.
//!
//! A tree with a `k x r` embedding of small `a_f` has at most two split vertices;
//! removing them leaves branches that are each covered by a path moving mostly in
//! one grid direction. The solver guesses a small environment around every split
//! vertex, sweeps each branch along its path, and glues the branch embeddings.

use std::collections::{HashMap, HashSet, VecDeque};
use std::time::Instant;

use crate::embedding::{agrees, glue, glue_raw, validate, Cell, Direction, GridEmbedding};
use crate::error::{GridError, Result};
use crate::graph::{distances_from, Graph};
use crate::oracle::{Budget, SolveResult, SolveStats};

/// Verdict of [`classify_splits`].
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum SplitVerdict {
    /// No vertex has three or more large branches.
    NoSplit,
    /// A single vertex with exactly three large branches.
    OneSplit(usize),
    /// Two vertices with exactly three large branches each.
    TwoOneSplits(usize, usize),
    /// A single vertex with exactly four large branches.
    DoubleSplit(usize),
    /// Any other configuration: more than two split vertices, two split vertices of
    /// which one is double, or a vertex with five or more large branches. No
    /// embedding with distance approximation at the matching level exists.
    Excess(Vec<usize>),
}

/// Per-vertex counts of large branches at threshold `t`, with the resulting verdict.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitClassification {
    pub threshold: usize,
    pub verdict: SplitVerdict,
    /// Number of components of `T - v` with at least `threshold` vertices.
    pub large_counts: Vec<usize>,
}

/// Rooted view of a tree used to read off component sizes of `T - v`.
struct Rooted {
    parent: Vec<Option<usize>>,
    size: Vec<usize>,
}

impl Rooted {
    fn new(tree: &Graph) -> Self {
        let n = tree.n();
        let mut parent = vec![None; n];
        let mut order = Vec::with_capacity(n);
        let mut seen = vec![false; n];
        if n > 0 {
            seen[0] = true;
            let mut queue = VecDeque::from([0]);
            while let Some(u) = queue.pop_front() {
                order.push(u);
                for &w in tree.neighbors(u) {
                    if !seen[w] {
                        seen[w] = true;
                        parent[w] = Some(u);
                        queue.push_back(w);
                    }
                }
            }
        }
        let mut size = vec![1; n];
        for &u in order.iter().rev() {
            if let Some(p) = parent[u] {
                size[p] += size[u];
            }
        }
        Rooted { parent, size }
    }

    /// `(neighbour, size of its component in T - v)` for every neighbour of `v`.
    fn branch_sizes(&self, tree: &Graph, v: usize) -> Vec<(usize, usize)> {
        tree.neighbors(v)
            .iter()
            .map(|&w| if self.parent[w] == Some(v) { (w, self.size[w]) } else { (w, tree.n() - self.size[v]) })
            .collect()
    }
}

fn require_tree(tree: &Graph) -> Result<()> {
    if tree.n() == 0 || !tree.is_tree() {
        return Err(GridError::NotATree);
    }
    Ok(())
}

/// Counts, for every vertex, the components of `T - v` holding at least `t`
/// vertices and derives the split verdict.
pub fn classify_splits(tree: &Graph, t: usize) -> Result<SplitClassification> {
    require_tree(tree)?;
    let rooted = Rooted::new(tree);
    let large_counts: Vec<usize> = (0..tree.n())
        .map(|v| rooted.branch_sizes(tree, v).iter().filter(|&&(_, s)| s >= t).count())
        .collect();
    let splits: Vec<usize> = (0..tree.n()).filter(|&v| large_counts[v] >= 3).collect();
    let verdict = match splits.as_slice() {
        [] => SplitVerdict::NoSplit,
        &[v] if large_counts[v] == 3 => SplitVerdict::OneSplit(v),
        &[v] if large_counts[v] == 4 => SplitVerdict::DoubleSplit(v),
        &[v, w] if large_counts[v] == 3 && large_counts[w] == 3 => SplitVerdict::TwoOneSplits(v, w),
        _ => SplitVerdict::Excess(splits),
    };
    Ok(SplitClassification { threshold: t, verdict, large_counts })
}

/// A path `P` of a tree together with, for every vertex, its closest path vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PtPath {
    pub path: Vec<usize>,
    pub radius: usize,
    /// Closest path vertex of every covered vertex (earliest path index on ties);
    /// `usize::MAX` for vertices outside the covered part.
    pub pc: Vec<usize>,
}

impl PtPath {
    /// Largest graph distance from a tree vertex to the path.
    pub fn max_distance(tree: &Graph, path: &[usize]) -> usize {
        closest_on_path(tree, path).1.into_iter().max().unwrap_or(0)
    }
}

/// Multi-source BFS from the path vertices in path order: closest path vertex and
/// distance for every vertex reachable from the path.
fn closest_on_path(tree: &Graph, path: &[usize]) -> (Vec<usize>, Vec<usize>) {
    let n = tree.n();
    let mut pc = vec![usize::MAX; n];
    let mut dist = vec![usize::MAX; n];
    let mut queue = VecDeque::new();
    for &p in path {
        if dist[p] == usize::MAX {
            dist[p] = 0;
            pc[p] = p;
            queue.push_back(p);
        }
    }
    while let Some(u) = queue.pop_front() {
        for &w in tree.neighbors(u) {
            if dist[w] == usize::MAX {
                dist[w] = dist[u] + 1;
                pc[w] = pc[u];
                queue.push_back(w);
            }
        }
    }
    (pc, dist)
}

/// Orders a vertex set inducing a path from its smaller endpoint; `None` if the
/// set does not induce a path.
fn order_as_path(tree: &Graph, set: &[usize]) -> Option<Vec<usize>> {
    let inside: HashSet<usize> = set.iter().copied().collect();
    let deg = |v: usize| tree.neighbors(v).iter().filter(|w| inside.contains(w)).count();
    if set.iter().any(|&v| deg(v) > 2) {
        return None;
    }
    let start = if set.len() == 1 { set[0] } else { *set.iter().filter(|&&v| deg(v) == 1).min()? };
    let mut path = vec![start];
    let mut prev = usize::MAX;
    let mut cur = start;
    loop {
        let next = tree.neighbors(cur).iter().copied().filter(|w| inside.contains(w) && *w != prev).min();
        match next {
            Some(w) => {
                prev = cur;
                cur = w;
                path.push(w);
            }
            None => break,
        }
    }
    (path.len() == set.len()).then_some(path)
}

/// Finds a path `P` with every tree vertex within distance `t` of `P`.
///
/// Marks every vertex whose removal leaves at least two components with `t` or more
/// vertices. Without marks the path starts as the vertex minimising the largest
/// component; otherwise the marked set must induce a path. While some vertex lies
/// farther than `t` from the path, the path end it hangs from is extended one step
/// towards the deepest such vertex.
pub fn find_pt_path(tree: &Graph, t: usize) -> Result<Option<PtPath>> {
    require_tree(tree)?;
    let n = tree.n();
    let rooted = Rooted::new(tree);
    let sizes: Vec<Vec<(usize, usize)>> = (0..n).map(|v| rooted.branch_sizes(tree, v)).collect();
    let marked: Vec<usize> = (0..n).filter(|&v| sizes[v].iter().filter(|&&(_, s)| s >= t).count() >= 2).collect();
    let mut path = if marked.is_empty() {
        let centre = (0..n)
            .min_by_key(|&v| (sizes[v].iter().map(|&(_, s)| s).max().unwrap_or(0), v))
            .expect("nonempty tree");
        vec![centre]
    } else {
        match order_as_path(tree, &marked) {
            Some(p) => p,
            None => return Ok(None),
        }
    };
    loop {
        let (pc, dist) = closest_on_path(tree, &path);
        if dist.iter().all(|&d| d <= t) {
            return Ok(Some(PtPath { path, radius: t, pc }));
        }
        let mut extended = false;
        for front in [true, false] {
            let end = if front { path[0] } else { *path.last().expect("nonempty") };
            let deepest = (0..n).filter(|&v| pc[v] == end && dist[v] > t).max_by_key(|&v| (dist[v], std::cmp::Reverse(v)));
            let Some(mut v) = deepest else { continue };
            while dist[v] > 1 {
                v = *tree.neighbors(v).iter().find(|&&w| dist[w] + 1 == dist[v]).expect("BFS parent");
            }
            if front {
                path.insert(0, v);
            } else {
                path.push(v);
            }
            extended = true;
            break;
        }
        if !extended {
            return Ok(None);
        }
    }
}

/// Parameters of [`directional_sweep_embed`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepSpec {
    /// Allowed directions of the path edges: at most one vertical, at most one horizontal.
    pub directions: Vec<Direction>,
    /// Number of path edges allowed to point elsewhere.
    pub wrong_budget: usize,
    /// Fixed environment; its `k x r` box is a reserved window whose free cells stay empty.
    pub environment: Option<GridEmbedding>,
    /// Bounds on the occupied rows and columns of the result.
    pub k: usize,
    pub r: usize,
    /// Number of trailing path groups kept in the memo key.
    pub retain: usize,
}

impl SweepSpec {
    fn check(&self) -> Result<()> {
        let vertical = self.directions.iter().filter(|d| d.is_vertical()).count();
        let horizontal = self.directions.len() - vertical;
        if vertical > 1 || horizontal > 1 {
            return Err(GridError::InvalidInstance("at most one vertical and one horizontal direction".into()));
        }
        Ok(())
    }
}

/// Result of [`directional_sweep_embed`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SweepAnswer {
    /// Normalized embedding of the part plus the environment.
    Yes(GridEmbedding),
    No,
    Unknown,
}

type Extents = (i64, i64, i64, i64);
type MemoKey = (usize, Vec<(usize, Cell)>, usize, Option<Extents>);

struct Sweeper<'a> {
    tree: &'a Graph,
    spec: &'a SweepSpec,
    path: Vec<usize>,
    /// Placement order of the free vertices of every path group.
    groups: Vec<Vec<usize>>,
    group_of: Vec<Option<usize>>,
    pos: Vec<Option<Cell>>,
    occ: HashMap<Cell, usize>,
    forbidden: HashSet<Cell>,
    ext: Option<Extents>,
    wrong: usize,
    memo: HashSet<MemoKey>,
    /// Smallest group index of a vertex that blocked a cell in the current subtree.
    min_hit: usize,
    budget: &'a mut Budget,
}

fn grow(ext: Option<Extents>, c: Cell) -> Extents {
    match ext {
        None => (c.0, c.0, c.1, c.1),
        Some((a, b, x, y)) => (a.min(c.0), b.max(c.0), x.min(c.1), y.max(c.1)),
    }
}

impl Sweeper<'_> {
    fn fits(&self, e: Extents) -> bool {
        e.1 - e.0 < self.spec.k as i64 && e.3 - e.2 < self.spec.r as i64
    }

    fn key(&self, i: usize) -> MemoKey {
        let first = (i + 1).saturating_sub(self.spec.retain.max(1));
        let mut placed = Vec::new();
        for g in first..=i {
            for &v in &self.groups[g] {
                placed.push((v, self.pos[v].expect("placed group")));
            }
        }
        (i, placed, self.wrong, self.ext)
    }

    /// Cells to try for a free vertex with no placed neighbour.
    fn free_cells(&self, v: usize) -> Vec<Cell> {
        let Some((r0, r1, c0, c1)) = self.ext else { return vec![(0, 0)] };
        let (k, r) = (self.spec.k as i64, self.spec.r as i64);
        let dist = distances_from(self.tree, v);
        let mut cells = Vec::new();
        for row in (r1 - k + 1)..=(r0 + k - 1) {
            for col in (c1 - r + 1)..=(c0 + r - 1) {
                let close = self.occ.iter().all(|(&(a, b), &x)| {
                    dist[x].is_none_or(|d| (row - a).unsigned_abs() as usize + (col - b).unsigned_abs() as usize <= d)
                });
                if close {
                    cells.push((row, col));
                }
            }
        }
        cells
    }

    fn place_group(&mut self, i: usize, idx: usize) -> Option<bool> {
        if !self.budget.tick() {
            return None;
        }
        if idx == self.groups[i].len() {
            return self.finish_group(i);
        }
        let v = self.groups[i][idx];
        let anchors: Vec<Cell> = self.tree.neighbors(v).iter().filter_map(|&w| self.pos[w]).collect();
        let candidates: Vec<Cell> = match anchors.first() {
            Some(&(a, b)) => Direction::ALL.iter().map(|d| (a + d.delta().0, b + d.delta().1)).collect(),
            None => self.free_cells(v),
        };
        for c in candidates {
            if self.forbidden.contains(&c) {
                continue;
            }
            if let Some(&y) = self.occ.get(&c) {
                if let Some(g) = self.group_of[y] {
                    self.min_hit = self.min_hit.min(g);
                }
                continue;
            }
            if anchors.iter().any(|&(a, b)| (a - c.0).abs() + (b - c.1).abs() != 1) {
                continue;
            }
            let e = grow(self.ext, c);
            if !self.fits(e) {
                continue;
            }
            let saved = self.ext;
            self.ext = Some(e);
            self.pos[v] = Some(c);
            self.occ.insert(c, v);
            let res = self.place_group(i, idx + 1);
            if res != Some(false) {
                return res;
            }
            self.occ.remove(&c);
            self.pos[v] = None;
            self.ext = saved;
        }
        Some(false)
    }

    fn finish_group(&mut self, i: usize) -> Option<bool> {
        let mut step = 0;
        if i > 0 {
            let (a, b) = (self.pos[self.path[i - 1]].expect("placed"), self.pos[self.path[i]].expect("placed"));
            let d = Direction::between(a, b).expect("path edges are checked on placement");
            if !self.spec.directions.contains(&d) {
                step = 1;
            }
        }
        if self.wrong + step > self.spec.wrong_budget {
            return Some(false);
        }
        self.wrong += step;
        let res = if i + 1 == self.groups.len() { Some(true) } else { self.enter(i) };
        if res != Some(true) {
            self.wrong -= step;
        }
        res
    }

    /// Continues with group `i + 1` from the state reached after group `i`.
    fn enter(&mut self, i: usize) -> Option<bool> {
        let key = self.key(i);
        if self.memo.contains(&key) {
            return Some(false);
        }
        let outer = self.min_hit;
        self.min_hit = usize::MAX;
        let res = self.place_group(i + 1, 0);
        if res == Some(false) && self.min_hit >= (i + 1).saturating_sub(self.spec.retain.max(1)) {
            self.memo.insert(key);
        }
        self.min_hit = self.min_hit.min(outer);
        res
    }
}

/// Embeds the vertices `part` of `tree` group by group along `path`, where the
/// group of a path vertex is the subtree hanging from it inside `part`.
///
/// The environment's vertices keep their cells (vertices of `part` among them are
/// fixed), the free cells of its window stay empty, path edges point in one of the
/// allowed directions except for at most `wrong_budget` of them, and the occupied
/// rows and columns fit in `k x r`. States after each group are memoized on the
/// placements of the last `retain` groups, the wrong-direction count and the
/// extents; a failure is recorded only when no older group blocked a cell, so the
/// answer is exact for the given constraints.
pub fn directional_sweep_embed(
    tree: &Graph,
    part: &[usize],
    path: &PtPath,
    spec: &SweepSpec,
    budget: &mut Budget,
) -> Result<SweepAnswer> {
    spec.check()?;
    let n = tree.n();
    let mut in_part = vec![false; n];
    for &v in part {
        if v >= n {
            return Err(GridError::VertexOutOfRange { vertex: v, n });
        }
        in_part[v] = true;
    }
    let p = &path.path;
    if p.is_empty() || p.iter().any(|&v| v >= n || !in_part[v]) || p.windows(2).any(|w| !tree.has_edge(w[0], w[1])) {
        return Err(GridError::InvalidInstance("sweep path must be a path inside the part".into()));
    }
    let env = spec.environment.clone().unwrap_or_else(|| GridEmbedding::new(0, 0, n));
    let mut pos: Vec<Option<Cell>> = (0..n).map(|v| env.get(v)).collect();
    let fixed: Vec<bool> = pos.iter().map(Option::is_some).collect();
    let mut occ = HashMap::new();
    let mut ext = None;
    for v in 0..n {
        if let Some(c) = pos[v] {
            if occ.insert(c, v).is_some() {
                return Err(GridError::InvalidInstance("environment is not injective".into()));
            }
            ext = Some(grow(ext, c));
        }
    }
    let mut forbidden = HashSet::new();
    for row in 1..=env.k as i64 {
        for col in 1..=env.r as i64 {
            if !occ.contains_key(&(row, col)) {
                forbidden.insert((row, col));
            }
        }
    }
    // Groups: BFS inside the part from the path vertices.
    let part_graph_pc = {
        let mut pc = vec![usize::MAX; n];
        let mut queue = VecDeque::new();
        for (i, &v) in p.iter().enumerate() {
            pc[v] = i;
            queue.push_back(v);
        }
        while let Some(u) = queue.pop_front() {
            for &w in tree.neighbors(u) {
                if in_part[w] && pc[w] == usize::MAX {
                    pc[w] = pc[u];
                    queue.push_back(w);
                }
            }
        }
        pc
    };
    if part.iter().any(|&v| part_graph_pc[v] == usize::MAX) {
        return Err(GridError::InvalidInstance("part is not connected to the sweep path".into()));
    }
    let mut groups = Vec::with_capacity(p.len());
    let mut group_of = vec![None; n];
    for (i, &pv) in p.iter().enumerate() {
        let members: Vec<usize> = part.iter().copied().filter(|&v| part_graph_pc[v] == i).collect();
        let member_set: HashSet<usize> = members.iter().copied().collect();
        let seeded = |v: usize| fixed[v] || tree.neighbors(v).iter().any(|&w| fixed[w] || (i > 0 && w == p[i - 1] && v == pv));
        let mut seeds: Vec<usize> = members.iter().copied().filter(|&v| seeded(v)).collect();
        if seeds.is_empty() {
            seeds.push(pv);
        }
        let mut seen: HashSet<usize> = seeds.iter().copied().collect();
        let mut order = Vec::new();
        let mut queue: VecDeque<usize> = seeds.into_iter().collect();
        while let Some(u) = queue.pop_front() {
            if !fixed[u] {
                order.push(u);
                group_of[u] = Some(i);
            }
            for &w in tree.neighbors(u) {
                if member_set.contains(&w) && seen.insert(w) {
                    queue.push_back(w);
                }
            }
        }
        groups.push(order);
    }
    let mut s = Sweeper {
        tree,
        spec,
        path: p.clone(),
        groups,
        group_of,
        pos: std::mem::take(&mut pos),
        occ,
        forbidden,
        ext,
        wrong: 0,
        memo: HashSet::new(),
        min_hit: usize::MAX,
        budget,
    };
    if ext.is_some_and(|e| !s.fits(e)) {
        return Ok(SweepAnswer::No);
    }
    // Path edges between fixed vertices are checked here; the rest on placement.
    match s.place_group(0, 0) {
        None => Ok(SweepAnswer::Unknown),
        Some(false) => Ok(SweepAnswer::No),
        Some(true) => {
            let mut f = GridEmbedding::new(spec.k, spec.r, n);
            for v in 0..n {
                if let Some(c) = s.pos[v] {
                    f.set(v, c);
                }
            }
            let mut f = f.normalized();
            f.k = spec.k;
            f.r = spec.r;
            Ok(SweepAnswer::Yes(f))
        }
    }
}

/// Constants of the composition solver: split threshold `c_split * a^2`, window
/// side `c_win * a^2 + 1`, environment radius `c_env * a^2 + 1`, retained groups
/// `c_ret * a`, wrong-direction budget `c_bud * a`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TreeConstants {
    pub c_split: usize,
    pub c_win: usize,
    pub c_env: usize,
    pub c_ret: usize,
    pub c_bud: usize,
}

impl TreeConstants {
    /// Worst-case constants of the correctness argument.
    pub const WORST_CASE: TreeConstants = TreeConstants { c_split: 81, c_win: 366, c_env: 367, c_ret: 6, c_bud: 4 };
    /// Small constants for tests: yes answers stay sound, no answers are definitive
    /// only once the split threshold exceeds the tree size.
    pub const REDUCED: TreeConstants = TreeConstants { c_split: 1, c_win: 2, c_env: 0, c_ret: 6, c_bud: 4 };

    pub fn split_threshold(&self, a: usize) -> usize {
        self.c_split * a * a
    }

    pub fn window_side(&self, a: usize) -> usize {
        self.c_win * a * a + 1
    }

    pub fn env_radius(&self, a: usize) -> usize {
        self.c_env * a * a + 1
    }

    pub fn retain(&self, a: usize) -> usize {
        (self.c_ret * a).max(1)
    }

    pub fn wrong_budget(&self, a: usize) -> usize {
        self.c_bud * a
    }
}

/// Answer of [`solve_tree`] with the level `a` at which it was reached and the
/// split case that produced a yes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeSolve {
    pub result: SolveResult,
    pub achieved_a: Option<usize>,
    pub case: Option<SplitVerdict>,
}


mod compose;

pub use compose::solve_tree;
