//! Exhaustive exact solvers used as ground truth: the pruned backtracking embedder,
//! the per-component unrestricted embedder, the caterpillar-forest layout, and the
//! minimum distance approximation by enumeration.

use std::time::{Duration, Instant};

use crate::embedding::{distance_approximation, validate, Cell, GridEmbedding};
use crate::error::{GridError, Result};
use crate::graph::{all_pairs_distances, connected_components, grid_necessary_filter, FilterVerdict, Graph};

/// Three-valued answer of a budgeted decision procedure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Answer {
    Yes,
    No,
    /// The node budget ran out before the search could decide.
    Unknown,
}

/// Search statistics attached to every result.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SolveStats {
    pub nodes: u64,
    pub elapsed: Duration,
}

/// Answer plus witness; a `Yes` always carries a witness that validates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveResult {
    pub answer: Answer,
    pub witness: Option<GridEmbedding>,
    pub stats: SolveStats,
}

impl SolveResult {
    pub fn yes(witness: GridEmbedding, stats: SolveStats) -> Self {
        SolveResult { answer: Answer::Yes, witness: Some(witness), stats }
    }

    pub fn no(stats: SolveStats) -> Self {
        SolveResult { answer: Answer::No, witness: None, stats }
    }

    pub fn unknown(stats: SolveStats) -> Self {
        SolveResult { answer: Answer::Unknown, witness: None, stats }
    }
}

/// Node budget shared by the stages of one solve call.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    limit: u64,
    used: u64,
}

impl Budget {
    pub fn new(limit: u64) -> Self {
        Budget { limit, used: 0 }
    }

    pub fn unlimited() -> Self {
        Budget::new(u64::MAX)
    }

    /// Charges one node; returns false once the limit is exceeded.
    pub fn tick(&mut self) -> bool {
        self.used = self.used.saturating_add(1);
        self.used <= self.limit
    }

    pub fn used(&self) -> u64 {
        self.used
    }

    pub fn exhausted(&self) -> bool {
        self.used > self.limit
    }
}

/// Outcome of one recursive step of the search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Flow {
    Continue,
    Stop,
    Abort,
}

/// Order in which the backtracking search assigns vertices: components by
/// decreasing size, each in BFS order from a maximum-degree vertex.
fn search_order(g: &Graph) -> (Vec<usize>, Vec<Option<usize>>) {
    let mut comps = connected_components(g);
    comps.sort_by_key(|c| (std::cmp::Reverse(c.len()), c[0]));
    let mut order = Vec::with_capacity(g.n());
    let mut parent = Vec::with_capacity(g.n());
    let mut seen = vec![false; g.n()];
    for comp in comps {
        let root = *comp.iter().max_by_key(|&&v| (g.degree(v), std::cmp::Reverse(v))).expect("nonempty");
        seen[root] = true;
        let start = order.len();
        order.push(root);
        parent.push(None);
        let mut head = start;
        while head < order.len() {
            let u = order[head];
            head += 1;
            for &w in g.neighbors(u) {
                if !seen[w] {
                    seen[w] = true;
                    order.push(w);
                    parent.push(Some(u));
                }
            }
        }
    }
    (order, parent)
}

struct Search<'a> {
    g: &'a Graph,
    k: usize,
    r: usize,
    order: Vec<usize>,
    parent: Vec<Option<usize>>,
    pos: Vec<Option<Cell>>,
    grid: Vec<usize>,
    open: Vec<usize>,
    free: usize,
    symmetry: bool,
    limit: Option<(usize, Vec<Vec<Option<usize>>>)>,
    budget: &'a mut Budget,
}

const EMPTY: usize = usize::MAX;

impl<'a> Search<'a> {
    fn new(g: &'a Graph, k: usize, r: usize, symmetry: bool, limit: Option<usize>, budget: &'a mut Budget) -> Self {
        let (order, parent) = search_order(g);
        let limit = limit.map(|l| (l, all_pairs_distances(g)));
        Search {
            g,
            k,
            r,
            order,
            parent,
            pos: vec![None; g.n()],
            grid: vec![EMPTY; k * r],
            open: (0..g.n()).map(|v| g.degree(v)).collect(),
            free: k * r,
            symmetry,
            limit,
            budget,
        }
    }

    fn idx(&self, (row, col): Cell) -> Option<usize> {
        (row >= 1 && col >= 1 && row <= self.k as i64 && col <= self.r as i64)
            .then(|| (row as usize - 1) * self.r + col as usize - 1)
    }

    fn free_around(&self, c: Cell) -> usize {
        [(-1, 0), (1, 0), (0, -1), (0, 1)]
            .iter()
            .filter(|(dr, dc)| self.idx((c.0 + dr, c.1 + dc)).is_some_and(|i| self.grid[i] == EMPTY))
            .count()
    }

    fn candidates(&self, depth: usize) -> Vec<Cell> {
        match self.parent[depth] {
            Some(p) => {
                let (r, c) = self.pos[p].expect("parent placed first");
                [(r - 1, c), (r, c - 1), (r, c + 1), (r + 1, c)]
                    .into_iter()
                    .filter(|&x| self.idx(x).is_some_and(|i| self.grid[i] == EMPTY))
                    .collect()
            }
            None => {
                let mut out = Vec::new();
                for row in 1..=self.k as i64 {
                    for col in 1..=self.r as i64 {
                        if self.grid[self.idx((row, col)).expect("in range")] != EMPTY {
                            continue;
                        }
                        if depth == 0 && self.symmetry {
                            let in_quadrant = row <= (self.k as i64 + 1) / 2 && col <= (self.r as i64 + 1) / 2;
                            if !in_quadrant || (self.k == self.r && row > col) {
                                continue;
                            }
                        }
                        out.push((row, col));
                    }
                }
                out
            }
        }
    }

    fn consistent(&self, v: usize, c: Cell) -> bool {
        for &w in self.g.neighbors(v) {
            if let Some(p) = self.pos[w] {
                if (p.0 - c.0).abs() + (p.1 - c.1).abs() != 1 {
                    return false;
                }
            }
        }
        if let Some((lim, dist)) = &self.limit {
            for (u, p) in self.pos.iter().enumerate() {
                if let (Some(p), Some(d)) = (p, dist[v][u]) {
                    let df = ((p.0 - c.0).abs() + (p.1 - c.1).abs()) as usize;
                    if d > df + lim {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Every placed vertex must still have room for its unplaced neighbours.
    fn room_ok(&self, c: Cell) -> bool {
        let mut check = vec![c];
        for (dr, dc) in [(-1, 0), (1, 0), (0, -1), (0, 1)] {
            check.push((c.0 + dr, c.1 + dc));
        }
        for x in check {
            if let Some(i) = self.idx(x) {
                let u = self.grid[i];
                if u != EMPTY && self.open[u] > self.free_around(x) {
                    return false;
                }
            }
        }
        true
    }

    fn place(&mut self, v: usize, c: Cell) {
        let i = self.idx(c).expect("in range");
        self.grid[i] = v;
        self.pos[v] = Some(c);
        self.free -= 1;
        for &w in self.g.neighbors(v) {
            self.open[w] -= 1;
        }
    }

    fn unplace(&mut self, v: usize) {
        let c = self.pos[v].take().expect("placed");
        let i = self.idx(c).expect("in range");
        self.grid[i] = EMPTY;
        self.free += 1;
        for &w in self.g.neighbors(v) {
            self.open[w] += 1;
        }
    }

    fn witness(&self) -> GridEmbedding {
        let cells: Vec<Cell> = self.pos.iter().map(|p| p.expect("complete")).collect();
        GridEmbedding::from_cells(self.k, self.r, &cells)
    }

    fn run(&mut self, depth: usize, visit: &mut dyn FnMut(&GridEmbedding) -> bool) -> Flow {
        if depth == self.order.len() {
            return if visit(&self.witness()) { Flow::Stop } else { Flow::Continue };
        }
        if self.free < self.order.len() - depth {
            return Flow::Continue;
        }
        let v = self.order[depth];
        for c in self.candidates(depth) {
            if !self.budget.tick() {
                return Flow::Abort;
            }
            if !self.consistent(v, c) {
                continue;
            }
            self.place(v, c);
            let flow = if self.room_ok(c) { self.run(depth + 1, visit) } else { Flow::Continue };
            self.unplace(v);
            if flow != Flow::Continue {
                return flow;
            }
        }
        Flow::Continue
    }
}

fn trivially_impossible(g: &Graph, k: usize, r: usize) -> bool {
    g.n() > k * r || grid_necessary_filter(g) != FilterVerdict::Pass
}

/// Visits every `k x r` embedding of `g` (up to the lattice symmetries when
/// `symmetry` is set) until `visit` returns true. Returns `None` when the budget ran
/// out and otherwise whether the visit was stopped early.
pub fn for_each_embedding(
    g: &Graph,
    k: usize,
    r: usize,
    symmetry: bool,
    budget: &mut Budget,
    visit: &mut dyn FnMut(&GridEmbedding) -> bool,
) -> Option<bool> {
    if g.n() == 0 {
        return Some(visit(&GridEmbedding::new(k, r, 0)));
    }
    if k == 0 || r == 0 || trivially_impossible(g, k, r) {
        return Some(false);
    }
    let mut s = Search::new(g, k, r, symmetry, None, budget);
    match s.run(0, visit) {
        Flow::Abort => None,
        Flow::Stop => Some(true),
        Flow::Continue => Some(false),
    }
}

fn search_with_limit(g: &Graph, k: usize, r: usize, limit: Option<usize>, budget: &mut Budget) -> (Answer, Option<GridEmbedding>) {
    if g.n() == 0 {
        return (Answer::Yes, Some(GridEmbedding::new(k, r, 0)));
    }
    if k == 0 || r == 0 || trivially_impossible(g, k, r) {
        return (Answer::No, None);
    }
    let mut found = None;
    let mut s = Search::new(g, k, r, true, limit, budget);
    let flow = s.run(0, &mut |f| {
        found = Some(f.clone());
        true
    });
    match flow {
        Flow::Stop => (Answer::Yes, found),
        Flow::Continue => (Answer::No, None),
        Flow::Abort => (Answer::Unknown, None),
    }
}

/// Complete backtracking search for a `k x r` grid embedding of `g`.
///
/// Vertices are assigned in BFS order from a maximum-degree vertex of each
/// component; a non-root vertex is tried only on the free cells around its BFS
/// parent. The first vertex is pinned to the upper-left quadrant (and on or above
/// the diagonal when `k = r`). `budget` bounds the number of explored nodes.
pub fn brute_force_embed(g: &Graph, k: usize, r: usize, budget: u64) -> SolveResult {
    let start = Instant::now();
    let mut b = Budget::new(budget);
    let (answer, witness) = search_with_limit(g, k, r, None, &mut b);
    let stats = SolveStats { nodes: b.used(), elapsed: start.elapsed() };
    SolveResult { answer, witness, stats }
}

/// Embeds each component separately in its own `s x s` box and places the boxes
/// corner to corner along the diagonal of an `n x n` lattice.
pub fn embed_components_diagonally(g: &Graph, budget: u64) -> SolveResult {
    let start = Instant::now();
    let n = g.n();
    let mut f = GridEmbedding::new(n, n, n);
    let mut offset = 0i64;
    let mut nodes = 0;
    let mut unknown = false;
    for comp in connected_components(g) {
        let h = g.induced_subgraph(&comp);
        let s = comp.len();
        let res = brute_force_embed(&h, s, s, budget.saturating_sub(nodes));
        nodes += res.stats.nodes;
        match res.answer {
            Answer::Yes => {
                let w = res.witness.expect("yes carries a witness");
                for (i, &v) in comp.iter().enumerate() {
                    let (row, col) = w.get(i).expect("total");
                    f.set(v, (row + offset, col + offset));
                }
            }
            Answer::No => return SolveResult::no(SolveStats { nodes, elapsed: start.elapsed() }),
            Answer::Unknown => unknown = true,
        }
        offset += s as i64;
    }
    let stats = SolveStats { nodes, elapsed: start.elapsed() };
    if unknown {
        return SolveResult::unknown(stats);
    }
    debug_assert!(validate(g, &f).is_valid());
    SolveResult::yes(f, stats)
}

/// Outcome of the caterpillar-forest layout.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CaterpillarOutcome {
    /// Some component is not a caterpillar.
    NotApplicable,
    Solved(SolveResult),
}

/// Spine of a caterpillar tree (a longest path), or `None` if the tree is not one.
fn caterpillar_spine(h: &Graph) -> Option<Vec<usize>> {
    if !h.is_tree() {
        return None;
    }
    if h.n() == 1 {
        return Some(vec![0]);
    }
    let far = |s: usize| {
        let d = crate::graph::distances_from(h, s);
        (0..h.n()).max_by_key(|&v| (d[v], std::cmp::Reverse(v))).expect("nonempty")
    };
    let a = far(0);
    let b = far(a);
    let d = crate::graph::distances_from(h, b);
    let mut spine = vec![a];
    let mut cur = a;
    while cur != b {
        cur = *h.neighbors(cur).iter().find(|&&w| d[w] < d[cur]).expect("path to b");
        spine.push(cur);
    }
    let on_spine: Vec<bool> = (0..h.n()).map(|v| spine.contains(&v)).collect();
    for v in 0..h.n() {
        if !on_spine[v] && h.neighbors(v).iter().any(|&w| !on_spine[w]) {
            return None;
        }
    }
    Some(spine)
}

/// Caterpillar forests: every spine on one row, leaves above (and below when a
/// spine vertex has two), components left to right with one empty column between.
///
/// A layout that fits answers yes with its witness. A layout that does not fit is
/// not a proof of impossibility (paths may fold), so the exact search decides then.
pub fn embed_caterpillar_forest(g: &Graph, k: usize, r: usize, budget: u64) -> CaterpillarOutcome {
    let start = Instant::now();
    let comps = connected_components(g);
    let mut layouts = Vec::new();
    for comp in &comps {
        let h = g.induced_subgraph(comp);
        match caterpillar_spine(&h) {
            Some(spine) => layouts.push((comp.clone(), h, spine)),
            None => return CaterpillarOutcome::NotApplicable,
        }
    }
    let mut height = 1;
    let mut width = 0usize;
    for (_, h, spine) in &layouts {
        let leaves = spine.iter().map(|&s| h.degree(s) - spine_degree(h, spine, s)).max().unwrap_or(0);
        height = height.max(match leaves {
            0 => 1,
            1 => 2,
            _ => 3,
        });
        width += spine.len();
    }
    width += layouts.len().saturating_sub(1);
    let fits = g.max_degree() <= 4 && height <= k && width <= r;
    if !fits {
        return CaterpillarOutcome::Solved(brute_force_embed(g, k, r, budget));
    }
    let base_row = if height == 3 { 2 } else { 1 };
    let mut f = GridEmbedding::new(k, r, g.n());
    let mut col = 1i64;
    for (comp, h, spine) in &layouts {
        let on_spine: Vec<bool> = (0..h.n()).map(|v| spine.contains(&v)).collect();
        for &s in spine {
            f.set(comp[s], (base_row, col));
            let mut side = 1;
            for &w in h.neighbors(s) {
                if !on_spine[w] {
                    f.set(comp[w], (base_row + side, col));
                    side = -side;
                }
            }
            col += 1;
        }
        col += 1;
    }
    debug_assert!(validate(g, &f).is_valid());
    CaterpillarOutcome::Solved(SolveResult::yes(f, SolveStats { nodes: 0, elapsed: start.elapsed() }))
}

fn spine_degree(h: &Graph, spine: &[usize], s: usize) -> usize {
    h.neighbors(s).iter().filter(|w| spine.contains(w)).count()
}

/// Minimum of the distance approximation over all `k x r` embeddings of a connected
/// graph, `|V|` when none exists; `None` when the budget runs out.
///
/// Searches with an increasing cap `L` on every pair's gap `d(u,v) - d_f(u,v)`; the
/// first cap admitting an embedding is the minimum.
pub fn min_distance_approximation(g: &Graph, k: usize, r: usize, budget: u64) -> Result<Option<usize>> {
    if !g.is_connected() {
        return Err(GridError::Disconnected);
    }
    let mut b = Budget::new(budget);
    match search_with_limit(g, k, r, None, &mut b).0 {
        Answer::No => return Ok(Some(g.n())),
        Answer::Unknown => return Ok(None),
        Answer::Yes => {}
    }
    for cap in 0..g.n() {
        match search_with_limit(g, k, r, Some(cap), &mut b) {
            (Answer::Yes, Some(w)) => {
                debug_assert!(distance_approximation(g, &w).map(|d| d.a_f <= cap).unwrap_or(false));
                return Ok(Some(cap));
            }
            (Answer::Unknown, _) => return Ok(None),
            _ => {}
        }
    }
    Ok(Some(g.n()))
}

/// Top-left cell (1-based) and oriented height and width of one packed rectangle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RectPlacement {
    pub row: usize,
    pub col: usize,
    pub height: usize,
    pub width: usize,
}

/// Packs axis-parallel rectangles `(h, w)`, each optionally rotated by 90 degrees,
/// into a `k x strip` box by branch and bound.
///
/// The first free cell in column-major order is either covered by the top-left
/// corner of an unused rectangle or left empty; the search stops when the free area
/// drops below the area still to be packed. `Some(None)` means no packing exists,
/// `None` that the budget ran out.
pub fn pack_rectangles(rects: &[(usize, usize)], k: usize, strip: usize, budget: u64) -> Option<Option<Vec<RectPlacement>>> {
    struct Packer<'a> {
        rects: &'a [(usize, usize)],
        k: usize,
        strip: usize,
        grid: Vec<bool>,
        used: Vec<bool>,
        out: Vec<Option<RectPlacement>>,
        budget: Budget,
    }
    impl Packer<'_> {
        fn fits(&self, row: usize, col: usize, h: usize, w: usize) -> bool {
            row + h <= self.k && col + w <= self.strip && (row..row + h).all(|r| (col..col + w).all(|c| !self.grid[c * self.k + r]))
        }
        fn mark(&mut self, row: usize, col: usize, h: usize, w: usize, value: bool) {
            for r in row..row + h {
                for c in col..col + w {
                    self.grid[c * self.k + r] = value;
                }
            }
        }
        fn go(&mut self, from: usize, free: usize, need: usize) -> Option<bool> {
            if need == 0 {
                return Some(true);
            }
            if free < need {
                return Some(false);
            }
            if !self.budget.tick() {
                return None;
            }
            let cell = (from..self.grid.len()).find(|&x| !self.grid[x]).expect("free area is positive");
            let (col, row) = (cell / self.k, cell % self.k);
            let mut tried: Vec<(usize, usize)> = Vec::new();
            for i in 0..self.rects.len() {
                if self.used[i] {
                    continue;
                }
                let (a, b) = self.rects[i];
                for (h, w) in [(a, b), (b, a)] {
                    if tried.contains(&(h, w)) || !self.fits(row, col, h, w) {
                        continue;
                    }
                    tried.push((h, w));
                    self.used[i] = true;
                    self.mark(row, col, h, w, true);
                    self.out[i] = Some(RectPlacement { row: row + 1, col: col + 1, height: h, width: w });
                    let found = self.go(cell + 1, free - h * w, need - h * w)?;
                    if found {
                        return Some(true);
                    }
                    self.out[i] = None;
                    self.mark(row, col, h, w, false);
                    self.used[i] = false;
                }
            }
            self.grid[cell] = true;
            let found = self.go(cell + 1, free - 1, need)?;
            self.grid[cell] = false;
            Some(found)
        }
    }
    let need: usize = rects.iter().map(|&(h, w)| h * w).sum();
    let mut p = Packer {
        rects,
        k,
        strip,
        grid: vec![false; k * strip],
        used: vec![false; rects.len()],
        out: vec![None; rects.len()],
        budget: Budget::new(budget),
    };
    let found = p.go(0, k * strip, need)?;
    Some(found.then(|| p.out.into_iter().map(|x| x.expect("every rectangle is placed")).collect()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn path(n: usize) -> Graph {
        let e: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Graph::from_edges(n, &e).unwrap()
    }

    fn cycle(n: usize) -> Graph {
        let mut g = path(n);
        g.add_edge(n - 1, 0).unwrap();
        g
    }

    /// Plain enumeration of injective cell assignments in vertex-index order.
    fn unpruned(g: &Graph, k: usize, r: usize) -> bool {
        fn rec(g: &Graph, k: i64, r: i64, v: usize, pos: &mut Vec<Cell>) -> bool {
            if v == g.n() {
                return true;
            }
            for row in 1..=k {
                for col in 1..=r {
                    let c = (row, col);
                    if pos.contains(&c) {
                        continue;
                    }
                    let ok = g.neighbors(v).iter().filter(|&&w| w < v).all(|&w| {
                        let p = pos[w];
                        (p.0 - row).abs() + (p.1 - col).abs() == 1
                    });
                    if ok {
                        pos.push(c);
                        if rec(g, k, r, v + 1, pos) {
                            return true;
                        }
                        pos.pop();
                    }
                }
            }
            false
        }
        rec(g, k as i64, r as i64, 0, &mut Vec::new())
    }

    #[test]
    fn paths_and_cycles() {
        for n in 1..=8 {
            let res = brute_force_embed(&path(n), 1, n, u64::MAX);
            assert_eq!(res.answer, Answer::Yes);
            assert!(validate(&path(n), res.witness.as_ref().unwrap()).is_valid());
        }
        assert_eq!(brute_force_embed(&cycle(4), 2, 2, u64::MAX).answer, Answer::Yes);
        assert_eq!(brute_force_embed(&cycle(3), 5, 5, u64::MAX).answer, Answer::No);
        assert_eq!(brute_force_embed(&path(6), 1, 5, u64::MAX).answer, Answer::No);
    }

    #[test]
    fn budget_exhaustion_is_unknown() {
        let g = path(12);
        assert_eq!(brute_force_embed(&g, 3, 3, 5).answer, Answer::No);
        assert_eq!(brute_force_embed(&g, 4, 4, 3).answer, Answer::Unknown);
    }

    #[test]
    fn agrees_with_unpruned_enumerator() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        for _ in 0..150 {
            let n = rng.gen_range(1..=5);
            let mut g = Graph::new(n);
            for v in 1..n {
                let u = rng.gen_range(0..v);
                g.add_edge(u, v).unwrap();
            }
            for _ in 0..rng.gen_range(0..3) {
                let (u, v) = (rng.gen_range(0..n), rng.gen_range(0..n));
                if u != v && !g.has_edge(u, v) {
                    g.add_edge(u, v).unwrap();
                }
            }
            let (k, r) = (rng.gen_range(1..=3), rng.gen_range(1..=4));
            let res = brute_force_embed(&g, k, r, u64::MAX);
            assert_eq!(res.answer == Answer::Yes, unpruned(&g, k, r), "{g:?} {k}x{r}");
            if let Some(w) = res.witness {
                assert!(validate(&g, &w).is_valid());
            }
        }
    }

    #[test]
    fn diagonal_components() {
        let g = Graph::from_edges(6, &[(0, 1), (1, 2), (3, 4), (4, 5)]).unwrap();
        let res = embed_components_diagonally(&g, u64::MAX);
        assert_eq!(res.answer, Answer::Yes);
        let w = res.witness.unwrap();
        assert_eq!((w.k, w.r), (6, 6));
        assert!(validate(&g, &w).is_valid());
        let g = Graph::from_edges(5, &[(0, 1), (1, 2), (2, 0), (3, 4)]).unwrap();
        assert_eq!(embed_components_diagonally(&g, u64::MAX).answer, Answer::No);
    }

    #[test]
    fn diagonal_matches_whole_graph_search() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
        for _ in 0..5 {
            let mut g = Graph::new(0);
            for _ in 0..5 {
                let s = rng.gen_range(1..=3);
                let base = g.n();
                for _ in 0..s {
                    g.add_vertex();
                }
                for v in 1..s {
                    g.add_edge(base + rng.gen_range(0..v), base + v).unwrap();
                }
            }
            let d = embed_components_diagonally(&g, u64::MAX);
            let b = brute_force_embed(&g, g.n(), g.n(), u64::MAX);
            assert_eq!(d.answer, b.answer);
            let w = d.witness.unwrap();
            assert!(validate(&g, &w).is_valid());
        }
    }

    #[test]
    fn caterpillar_layouts() {
        match embed_caterpillar_forest(&path(10), 1, 10, u64::MAX) {
            CaterpillarOutcome::Solved(res) => assert_eq!(res.answer, Answer::Yes),
            other => panic!("{other:?}"),
        }
        let mut g = path(4);
        for s in 0..4 {
            let l = g.add_vertex();
            g.add_edge(s, l).unwrap();
        }
        match embed_caterpillar_forest(&g, 2, 4, u64::MAX) {
            CaterpillarOutcome::Solved(res) => {
                assert_eq!(res.answer, Answer::Yes);
                assert!(validate(&g, res.witness.as_ref().unwrap()).is_valid());
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(embed_caterpillar_forest(&cycle(4), 2, 2, u64::MAX), CaterpillarOutcome::NotApplicable);
    }

    #[test]
    fn caterpillar_forests_agree_with_search() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
        for _ in 0..60 {
            let mut g = Graph::new(0);
            while g.n() < 12 {
                let spine = rng.gen_range(1..=4);
                let base = g.n();
                for _ in 0..spine {
                    g.add_vertex();
                }
                for i in 1..spine {
                    g.add_edge(base + i - 1, base + i).unwrap();
                }
                for i in 0..spine {
                    if g.n() < 12 && rng.gen_bool(0.4) {
                        let l = g.add_vertex();
                        g.add_edge(base + i, l).unwrap();
                    }
                }
            }
            let r = rng.gen_range(4..=9);
            let out = embed_caterpillar_forest(&g, 3, r, u64::MAX);
            let CaterpillarOutcome::Solved(res) = out else { panic!("forest of caterpillars") };
            assert_eq!(res.answer, brute_force_embed(&g, 3, r, u64::MAX).answer);
            if let Some(w) = res.witness {
                assert!(validate(&g, &w).is_valid());
            }
        }
    }

    #[test]
    fn min_distance_values() {
        assert_eq!(min_distance_approximation(&path(8), 8, 8, u64::MAX).unwrap(), Some(0));
        assert_eq!(min_distance_approximation(&cycle(3), 3, 3, u64::MAX).unwrap(), Some(3));
        assert_eq!(min_distance_approximation(&path(4), 2, 2, u64::MAX).unwrap(), Some(2));
        assert_eq!(min_distance_approximation(&Graph::new(2), 2, 2, u64::MAX), Err(GridError::Disconnected));
    }

    #[test]
    fn min_distance_matches_enumeration_on_trees() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(8);
        for _ in 0..40 {
            let n = rng.gen_range(2..=7);
            let mut g = Graph::new(n);
            for v in 1..n {
                g.add_edge(rng.gen_range(0..v), v).unwrap();
            }
            let (k, r) = (rng.gen_range(1..=3), rng.gen_range(2..=5));
            let mut best = n;
            let mut b = Budget::unlimited();
            for_each_embedding(&g, k, r, false, &mut b, &mut |f| {
                best = best.min(distance_approximation(&g, f).unwrap().a_f);
                false
            });
            assert_eq!(min_distance_approximation(&g, k, r, u64::MAX).unwrap(), Some(best));
        }
    }
}
