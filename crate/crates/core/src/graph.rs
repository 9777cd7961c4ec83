//! Graph representation, traversal, components, small-graph isomorphism and
//! cheap necessary conditions for being a grid graph.

use std::collections::{BTreeMap, VecDeque};

use crate::error::{GridError, Result};

/// Simple undirected graph on the dense vertex set `0..n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Graph {
    n: usize,
    adj: Vec<Vec<usize>>,
    edges: Vec<(usize, usize)>,
}

impl Graph {
    /// Edgeless graph on `n` vertices.
    pub fn new(n: usize) -> Self {
        Graph { n, adj: vec![Vec::new(); n], edges: Vec::new() }
    }

    /// Builds a graph from an edge list, rejecting loops, duplicates and bad endpoints.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = Graph::new(n);
        for &(u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    /// Adds the undirected edge `{u, v}`.
    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<()> {
        for w in [u, v] {
            if w >= self.n {
                return Err(GridError::VertexOutOfRange { vertex: w, n: self.n });
            }
        }
        if u == v {
            return Err(GridError::SelfLoop(u));
        }
        if self.has_edge(u, v) {
            return Err(GridError::DuplicateEdge(u.min(v), u.max(v)));
        }
        let pos = self.adj[u].binary_search(&v).unwrap_err();
        self.adj[u].insert(pos, v);
        let pos = self.adj[v].binary_search(&u).unwrap_err();
        self.adj[v].insert(pos, u);
        let e = (u.min(v), u.max(v));
        let pos = self.edges.binary_search(&e).unwrap_err();
        self.edges.insert(pos, e);
        Ok(())
    }

    /// Appends a fresh isolated vertex and returns its id.
    pub fn add_vertex(&mut self) -> usize {
        self.adj.push(Vec::new());
        self.n += 1;
        self.n - 1
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges as sorted pairs `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Sorted neighbour list of `v`.
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n && self.adj[u].binary_search(&v).is_ok()
    }

    /// Subgraph induced by `vertices`; vertex `vertices[i]` becomes `i`.
    pub fn induced_subgraph(&self, vertices: &[usize]) -> Graph {
        let mut index = vec![usize::MAX; self.n];
        for (i, &v) in vertices.iter().enumerate() {
            index[v] = i;
        }
        let mut h = Graph::new(vertices.len());
        for &(u, v) in &self.edges {
            if index[u] != usize::MAX && index[v] != usize::MAX {
                h.add_edge(index[u], index[v]).expect("induced edges are simple");
            }
        }
        h
    }

    /// Disjoint union; vertices of `other` are shifted by `self.n()`.
    pub fn disjoint_union(&self, other: &Graph) -> Graph {
        let mut g = self.clone();
        let off = self.n;
        for _ in 0..other.n {
            g.add_vertex();
        }
        for &(u, v) in &other.edges {
            g.add_edge(u + off, v + off).expect("shifted edges are simple");
        }
        g
    }

    pub fn is_connected(&self) -> bool {
        self.n <= 1 || connected_components(self).len() == 1
    }

    /// True iff the graph is connected and has exactly `n - 1` edges.
    pub fn is_tree(&self) -> bool {
        self.n >= 1 && self.edges.len() + 1 == self.n && self.is_connected()
    }
}

/// Partition of the vertex set into connected components.
///
/// Components are listed in order of their smallest vertex and each part is sorted.
pub fn connected_components(g: &Graph) -> Vec<Vec<usize>> {
    let mut seen = vec![false; g.n()];
    let mut parts = Vec::new();
    for s in 0..g.n() {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        let mut part = vec![s];
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for &w in g.neighbors(u) {
                if !seen[w] {
                    seen[w] = true;
                    part.push(w);
                    queue.push_back(w);
                }
            }
        }
        part.sort_unstable();
        parts.push(part);
    }
    parts
}

/// Breadth-first distances from `v`; `None` marks unreachable vertices.
pub fn distances_from(g: &Graph, v: usize) -> Vec<Option<usize>> {
    let mut dist = vec![None; g.n()];
    dist[v] = Some(0);
    let mut queue = VecDeque::from([v]);
    while let Some(u) = queue.pop_front() {
        let du = dist[u].expect("queued vertices have a distance");
        for &w in g.neighbors(u) {
            if dist[w].is_none() {
                dist[w] = Some(du + 1);
                queue.push_back(w);
            }
        }
    }
    dist
}

/// All-pairs shortest path lengths by repeated breadth-first search.
pub fn all_pairs_distances(g: &Graph) -> Vec<Vec<Option<usize>>> {
    (0..g.n()).map(|v| distances_from(g, v)).collect()
}

/// Stable colour refinement over several graphs at once so colours are comparable.
fn refine_colors(graphs: &[&Graph]) -> Vec<Vec<usize>> {
    let mut colors: Vec<Vec<usize>> =
        graphs.iter().map(|g| (0..g.n()).map(|v| g.degree(v)).collect()).collect();
    let mut classes = usize::MAX;
    loop {
        let mut table: BTreeMap<(usize, Vec<usize>), usize> = BTreeMap::new();
        let mut sigs = Vec::with_capacity(graphs.len());
        for (gi, g) in graphs.iter().enumerate() {
            let mut gs = Vec::with_capacity(g.n());
            for v in 0..g.n() {
                let mut nb: Vec<usize> = g.neighbors(v).iter().map(|&w| colors[gi][w]).collect();
                nb.sort_unstable();
                let sig = (colors[gi][v], nb);
                table.entry(sig.clone()).or_insert(0);
                gs.push(sig);
            }
            sigs.push(gs);
        }
        for (i, val) in table.values_mut().enumerate() {
            *val = i;
        }
        let next: Vec<Vec<usize>> =
            sigs.iter().map(|gs| gs.iter().map(|s| table[s]).collect()).collect();
        let count = table.len();
        colors = next;
        if count == classes {
            return colors;
        }
        classes = count;
    }
}

/// Finds an isomorphism `g1 -> g2` as a vertex map, if one exists.
///
/// Colour refinement prunes the candidate sets and vertices are matched in an
/// order where each next vertex has as many already matched neighbours as possible.
pub fn find_isomorphism(g1: &Graph, g2: &Graph) -> Option<Vec<usize>> {
    if g1.n() != g2.n() || g1.edge_count() != g2.edge_count() {
        return None;
    }
    let n = g1.n();
    if n == 0 {
        return Some(Vec::new());
    }
    let colors = refine_colors(&[g1, g2]);
    let (c1, c2) = (&colors[0], &colors[1]);
    let mut h1 = c1.clone();
    let mut h2 = c2.clone();
    h1.sort_unstable();
    h2.sort_unstable();
    if h1 != h2 {
        return None;
    }
    let mut class_size: BTreeMap<usize, usize> = BTreeMap::new();
    for &c in c1 {
        *class_size.entry(c).or_insert(0) += 1;
    }
    let mut order = Vec::with_capacity(n);
    let mut placed = vec![false; n];
    let mut links = vec![0usize; n];
    for _ in 0..n {
        let v = (0..n)
            .filter(|&v| !placed[v])
            .min_by_key(|&v| (std::cmp::Reverse(links[v]), class_size[&c1[v]], v))
            .expect("some vertex is unplaced");
        placed[v] = true;
        order.push(v);
        for &w in g1.neighbors(v) {
            links[w] += 1;
        }
    }
    let mut map = vec![usize::MAX; n];
    let mut used = vec![false; n];
    if iso_extend(g1, g2, c1, c2, &order, 0, &mut map, &mut used) {
        Some(map)
    } else {
        None
    }
}

#[allow(clippy::too_many_arguments)]
fn iso_extend(
    g1: &Graph,
    g2: &Graph,
    c1: &[usize],
    c2: &[usize],
    order: &[usize],
    depth: usize,
    map: &mut [usize],
    used: &mut [bool],
) -> bool {
    if depth == order.len() {
        return true;
    }
    let v = order[depth];
    let anchor = g1.neighbors(v).iter().copied().find(|&w| map[w] != usize::MAX);
    let candidates: Vec<usize> = match anchor {
        Some(w) => g2.neighbors(map[w]).to_vec(),
        None => (0..g2.n()).collect(),
    };
    for x in candidates {
        if used[x] || c2[x] != c1[v] {
            continue;
        }
        let consistent = order[..depth].iter().all(|&w| g1.has_edge(v, w) == g2.has_edge(x, map[w]));
        if !consistent {
            continue;
        }
        map[v] = x;
        used[x] = true;
        if iso_extend(g1, g2, c1, c2, order, depth + 1, map, used) {
            return true;
        }
        map[v] = usize::MAX;
        used[x] = false;
    }
    false
}

/// True iff an edge-preserving bijection exists.
pub fn are_isomorphic(g1: &Graph, g2: &Graph) -> bool {
    find_isomorphism(g1, g2).is_some()
}

/// Canonical adjacency code: the lexicographically smallest upper-triangle bit string
/// over all vertex orders compatible with the refined colour classes.
///
/// Intended for graphs with at most 10 vertices; two graphs have equal codes iff
/// they are isomorphic.
pub fn canonical_code(g: &Graph) -> (usize, Vec<bool>) {
    let n = g.n();
    assert!(n <= 10, "canonical_code is meant for small graphs");
    let colors = refine_colors(&[g]).pop().expect("one graph");
    // Vertices must appear grouped by colour, colour classes in increasing order.
    let mut slots: Vec<usize> = colors.clone();
    slots.sort_unstable();
    let mut best: Option<Vec<bool>> = None;
    let mut perm = Vec::with_capacity(n);
    let mut used = vec![false; n];
    canon_rec(g, &colors, &slots, &mut perm, &mut used, &mut best);
    (n, best.unwrap_or_default())
}

fn canon_rec(
    g: &Graph,
    colors: &[usize],
    slots: &[usize],
    perm: &mut Vec<usize>,
    used: &mut [bool],
    best: &mut Option<Vec<bool>>,
) {
    let n = g.n();
    if perm.len() == n {
        let mut code = Vec::with_capacity(n * n.saturating_sub(1) / 2);
        for i in 0..n {
            for j in i + 1..n {
                code.push(g.has_edge(perm[i], perm[j]));
            }
        }
        if best.as_ref().is_none_or(|b| code < *b) {
            *best = Some(code);
        }
        return;
    }
    let slot = slots[perm.len()];
    for v in 0..n {
        if used[v] || colors[v] != slot {
            continue;
        }
        used[v] = true;
        perm.push(v);
        canon_rec(g, colors, slots, perm, used, best);
        perm.pop();
        used[v] = false;
    }
}

/// Non-isomorphic connected components with their multiplicities.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentCatalog {
    /// Representative graph and multiplicity per class.
    pub classes: Vec<(Graph, usize)>,
    /// Class index of every vertex of the source graph.
    pub vertex_to_class: Vec<usize>,
    /// Components of the source graph (sorted vertex lists) grouped by class.
    pub members: Vec<Vec<Vec<usize>>>,
}

impl ComponentCatalog {
    /// Largest component size (0 for the empty graph).
    pub fn mcc(&self) -> usize {
        self.classes.iter().map(|(g, _)| g.n()).max().unwrap_or(0)
    }

    /// Index of the class isomorphic to `h`, if any.
    pub fn class_of(&self, h: &Graph) -> Option<usize> {
        self.classes.iter().position(|(rep, _)| are_isomorphic(rep, h))
    }

    pub fn num(&self, class: usize) -> usize {
        self.classes[class].1
    }
}

/// Groups the connected components of `g` into isomorphism classes.
pub fn component_catalog(g: &Graph) -> ComponentCatalog {
    let mut classes: Vec<(Graph, usize)> = Vec::new();
    let mut members: Vec<Vec<Vec<usize>>> = Vec::new();
    let mut vertex_to_class = vec![0; g.n()];
    for part in connected_components(g) {
        let h = g.induced_subgraph(&part);
        let idx = match classes.iter().position(|(rep, _)| are_isomorphic(rep, &h)) {
            Some(i) => {
                classes[i].1 += 1;
                i
            }
            None => {
                classes.push((h, 1));
                members.push(Vec::new());
                classes.len() - 1
            }
        };
        for &v in &part {
            vertex_to_class[v] = idx;
        }
        members[idx].push(part);
    }
    ComponentCatalog { classes, vertex_to_class, members }
}

/// Reason reported by [`grid_necessary_filter`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FilterReason {
    /// A vertex of degree above four.
    Degree(usize),
    /// Some component contains an odd cycle.
    OddCycle,
    /// More than `2n` edges.
    TooManyEdges,
}

/// Outcome of the necessary-condition filter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FilterVerdict {
    Pass,
    Fail(FilterReason),
}

/// Rejects graphs that certainly are not grid graphs: maximum degree above 4,
/// an odd cycle, or more than `2n` edges.
pub fn grid_necessary_filter(g: &Graph) -> FilterVerdict {
    if let Some(v) = (0..g.n()).find(|&v| g.degree(v) > 4) {
        return FilterVerdict::Fail(FilterReason::Degree(v));
    }
    if g.edge_count() > 2 * g.n() {
        return FilterVerdict::Fail(FilterReason::TooManyEdges);
    }
    let mut side: Vec<Option<bool>> = vec![None; g.n()];
    for s in 0..g.n() {
        if side[s].is_some() {
            continue;
        }
        side[s] = Some(false);
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            let su = side[u].expect("queued vertices are coloured");
            for &w in g.neighbors(u) {
                match side[w] {
                    None => {
                        side[w] = Some(!su);
                        queue.push_back(w);
                    }
                    Some(sw) if sw == su => return FilterVerdict::Fail(FilterReason::OddCycle),
                    Some(_) => {}
                }
            }
        }
    }
    FilterVerdict::Pass
}

/// Directed multigraph with loops, stored as an arc multiset.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct MultiDigraph {
    n: usize,
    arcs: Vec<(usize, usize)>,
}

impl MultiDigraph {
    pub fn new(n: usize) -> Self {
        MultiDigraph { n, arcs: Vec::new() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Adds one copy of the arc `u -> v` (loops allowed).
    pub fn add_arc(&mut self, u: usize, v: usize) {
        assert!(u < self.n && v < self.n, "arc endpoint out of range");
        self.arcs.push((u, v));
    }

    /// Adds `count` parallel copies of `u -> v`.
    pub fn add_arcs(&mut self, u: usize, v: usize, count: usize) {
        for _ in 0..count {
            self.add_arc(u, v);
        }
    }

    pub fn arcs(&self) -> &[(usize, usize)] {
        &self.arcs
    }

    pub fn arc_count(&self) -> usize {
        self.arcs.len()
    }

    /// Number of parallel copies of `u -> v`.
    pub fn multiplicity(&self, u: usize, v: usize) -> usize {
        self.arcs.iter().filter(|&&a| a == (u, v)).count()
    }

    pub fn out_degree(&self, v: usize) -> usize {
        self.arcs.iter().filter(|a| a.0 == v).count()
    }

    pub fn in_degree(&self, v: usize) -> usize {
        self.arcs.iter().filter(|a| a.1 == v).count()
    }

    /// Replaces `u` and `v` by a single vertex `w` that inherits every incident arc;
    /// arcs between `u` and `v` become loops on `w`.
    ///
    /// `w` receives id `min(u, v)`, the larger id is removed and the ids above it
    /// shift down by one. Returns the new digraph and the old-to-new id map.
    pub fn join_vertices(&self, u: usize, v: usize) -> Result<(MultiDigraph, Vec<usize>)> {
        if u == v {
            return Err(GridError::SelfJoin(u));
        }
        for x in [u, v] {
            if x >= self.n {
                return Err(GridError::VertexOutOfRange { vertex: x, n: self.n });
            }
        }
        let (keep, drop) = (u.min(v), u.max(v));
        let map: Vec<usize> = (0..self.n)
            .map(|x| match x {
                x if x == drop => keep,
                x if x > drop => x - 1,
                x => x,
            })
            .collect();
        let mut d = MultiDigraph::new(self.n - 1);
        for &(a, b) in &self.arcs {
            d.add_arc(map[a], map[b]);
        }
        Ok((d, map))
    }
}
