//! Spanning-tree enumeration of an undirected multigraph by contraction and deletion.

/// Minimal union-find used to track contracted vertices.
#[derive(Clone)]
struct Dsu {
    parent: Vec<usize>,
}

impl Dsu {
    fn new(n: usize) -> Self {
        Dsu { parent: (0..n).collect() }
    }

    fn find(&self, mut x: usize) -> usize {
        while self.parent[x] != x {
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra] = rb;
        true
    }
}

/// Whether the contracted vertices can still be joined using edges `from..`.
fn still_connectable(n: usize, dsu: &Dsu, edges: &[(usize, usize)], from: usize) -> bool {
    let mut d = dsu.clone();
    let mut comps = (0..n).filter(|&v| d.find(v) == v).count();
    for &(u, v) in &edges[from..] {
        if d.union(u, v) {
            comps -= 1;
        }
    }
    comps <= 1
}

fn rec(
    n: usize,
    edges: &[(usize, usize)],
    i: usize,
    dsu: &mut Dsu,
    chosen: &mut Vec<usize>,
    visit: &mut dyn FnMut(&[usize]) -> bool,
) -> bool {
    if chosen.len() + 1 == n {
        return visit(chosen);
    }
    if i == edges.len() || !still_connectable(n, dsu, edges, i) {
        return false;
    }
    let (u, v) = edges[i];
    if dsu.find(u) != dsu.find(v) {
        let saved = dsu.clone();
        dsu.union(u, v);
        chosen.push(i);
        let stop = rec(n, edges, i + 1, dsu, chosen, visit);
        chosen.pop();
        *dsu = saved;
        if stop {
            return true;
        }
    }
    rec(n, edges, i + 1, dsu, chosen, visit)
}

/// Calls `visit` with the edge indices of every spanning tree of the multigraph on
/// `n` vertices, each tree exactly once, until `visit` returns true. Loops are never
/// part of a tree and parallel edges yield distinct trees. Returns whether `visit`
/// stopped the enumeration.
pub fn for_each_spanning_tree(n: usize, edges: &[(usize, usize)], visit: &mut dyn FnMut(&[usize]) -> bool) -> bool {
    if n == 0 {
        return false;
    }
    let mut dsu = Dsu::new(n);
    rec(n, edges, 0, &mut dsu, &mut Vec::new(), visit)
}

/// All spanning trees as sorted edge-index lists; empty when the graph is disconnected.
pub fn enumerate_spanning_trees(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for_each_spanning_tree(n, edges, &mut |t| {
        out.push(t.to_vec());
        false
    });
    out
}
