//! The reduction from NAE-SAT to grid embedding of trees of pathwidth 2: one pair of
//! caterpillars per variable hanging from a base path, flanked by two boundary pairs
//! with double leaves and two stars.

use std::collections::HashMap;

use crate::embedding::{validate, Cell, GridEmbedding};
use crate::error::{GridError, Result};
use crate::graph::Graph;

use super::sat::CnfFormula;

/// Output of [`reduce_naesat`]. Caterpillar `i` ranges over `0..=n+1`; `bar` selects
/// the caterpillar of the negated literal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NaeGraph {
    pub graph: Graph,
    pub labels: Vec<String>,
    pub index: HashMap<String, usize>,
    pub n: usize,
    pub m: usize,
}

impl NaeGraph {
    pub fn id(&self, label: &str) -> Option<usize> {
        self.index.get(label).copied()
    }

    fn must(&self, label: &str) -> usize {
        self.index[label]
    }

    /// Number of leaves attached to the main path of caterpillar `(i, bar)`.
    pub fn leaf_count(&self, i: usize, bar: bool) -> usize {
        let main: Vec<usize> = (1..=2 * self.m + 1).map(|j| self.must(&main_label(i, bar, j))).collect();
        main.iter().map(|&v| self.graph.neighbors(v).iter().filter(|&&w| self.graph.degree(w) == 1 && !main.contains(&w)).count()).sum()
    }

    /// Lattice rows of the canonical witness.
    pub fn k(&self) -> usize {
        4 * self.m + 3
    }

    /// Lattice columns of the canonical witness.
    pub fn r(&self) -> usize {
        2 * self.n + 9
    }
}

fn bar_tag(bar: bool) -> &'static str {
    if bar {
        "vbar"
    } else {
        "v"
    }
}

fn main_label(i: usize, bar: bool, j: usize) -> String {
    format!("{}:{i}:{j}", bar_tag(bar))
}

/// Label of a leaf; `second` names the extra leaf of a boundary caterpillar.
fn leaf_label(i: usize, bar: bool, j: usize, second: bool) -> String {
    let stem = if bar { "ubar" } else { "u" };
    format!("{stem}{}:{i}:{j}", if second { "'" } else { "" })
}

/// Builds the tree for `pi` (clauses read as NAE constraints; the flag is ignored).
///
/// Base path `b_0 - b'_0 - b_1 - ... - b_n - b'_n - b_{n+1}`; main paths
/// `v^1_i - ... - v^{2m+1}_i` attached to `b_i` through `v^1_i`; odd leaves `u^j_i`
/// when the literal is absent from clause `(j+1)/2`; even leaves for `1 <= i <= n-1`;
/// two leaves at every `v^j` with `j <= 2m` of the boundary caterpillars; star
/// centres `s*`, `t*` with leaves `s1..s4`, `t1..t4`, attached through `s1 - b_0` and
/// `t1 - b_{n+1}`.
pub fn reduce_naesat(pi: &CnfFormula) -> Result<NaeGraph> {
    let (n, m) = (pi.n, pi.m());
    if m == 0 {
        return Err(GridError::InvalidInstance("NAE-SAT reduction needs at least one clause".into()));
    }
    let mut labels = Vec::new();
    let mut index = HashMap::new();
    let mut edges: Vec<(usize, usize)> = Vec::new();
    let mut add = |label: String, labels: &mut Vec<String>| {
        index.insert(label.clone(), labels.len());
        labels.push(label);
        labels.len() - 1
    };
    let mut base = Vec::new();
    for i in 0..=n + 1 {
        base.push(add(format!("b:{i}"), &mut labels));
        if i <= n {
            base.push(add(format!("b':{i}"), &mut labels));
        }
    }
    for w in base.windows(2) {
        edges.push((w[0], w[1]));
    }
    for i in 0..=n + 1 {
        let b_i = base[2 * i];
        for bar in [false, true] {
            let main: Vec<usize> = (1..=2 * m + 1).map(|j| add(main_label(i, bar, j), &mut labels)).collect();
            edges.push((b_i, main[0]));
            for w in main.windows(2) {
                edges.push((w[0], w[1]));
            }
            let literal = if bar { -(i as i32) } else { i as i32 };
            for j in 1..=2 * m {
                let count = if i == 0 || i == n + 1 {
                    2
                } else if j % 2 == 1 {
                    usize::from(!pi.contains(j.div_ceil(2) - 1, literal))
                } else {
                    usize::from(i < n)
                };
                for second in [false, true].into_iter().take(count) {
                    let leaf = add(leaf_label(i, bar, j, second), &mut labels);
                    edges.push((main[j - 1], leaf));
                }
            }
        }
    }
    for (centre, stem, anchor) in [("s*", "s", base[0]), ("t*", "t", base[2 * n + 2])] {
        let c = add(centre.to_string(), &mut labels);
        for q in 1..=4 {
            let leaf = add(format!("{stem}{q}"), &mut labels);
            edges.push((c, leaf));
            if q == 1 {
                edges.push((leaf, anchor));
            }
        }
    }
    let graph = Graph::from_edges(labels.len(), &edges)?;
    Ok(NaeGraph { graph, labels, index, n, m })
}

/// The forward-direction embedding for an NAE assignment (`alpha[i-1]` is `x_i`).
///
/// The base path runs along the middle row between the stars. The caterpillar of the
/// true literal of each variable points up and the other one down; the boundary pairs
/// point both ways. Even leaves lean right. In every row of odd leaves the first
/// caterpillar without a leaf is the free position: leaves before it lean right, after
/// it left.
pub fn construct_naesat_witness(g: &NaeGraph, pi: &CnfFormula, alpha: &[bool]) -> Result<GridEmbedding> {
    if alpha.len() != pi.n || pi.n != g.n || pi.m() != g.m || !pi.nae_satisfied_by(alpha) {
        return Err(GridError::NotNaeSatisfying);
    }
    let (n, m) = (g.n, g.m);
    let centre = 2 * m as i64 + 2;
    let col = |i: usize| 4 + 2 * i as i64;
    let mut f = GridEmbedding::new(g.k(), g.r(), g.graph.n());
    let mut put = |label: &str, cell: Cell| f.set(g.must(label), cell);
    for i in 0..=n + 1 {
        put(&format!("b:{i}"), (centre, col(i)));
        if i <= n {
            put(&format!("b':{i}"), (centre, col(i) + 1));
        }
    }
    let (s_col, t_col) = (col(0) - 2, col(n + 1) + 2);
    put("s1", (centre, s_col + 1));
    put("s*", (centre, s_col));
    put("s3", (centre, s_col - 1));
    put("s2", (centre - 1, s_col));
    put("s4", (centre + 1, s_col));
    put("t1", (centre, t_col - 1));
    put("t*", (centre, t_col));
    put("t3", (centre, t_col + 1));
    put("t2", (centre - 1, t_col));
    put("t4", (centre + 1, t_col));
    for up in [true, false] {
        let dir: i64 = if up { -1 } else { 1 };
        // Caterpillar of index i on this side: the true literal's one above B.
        let bar_of = |i: usize| -> bool {
            if i == 0 || i == n + 1 {
                !up
            } else {
                alpha[i - 1] != up
            }
        };
        for i in 0..=n + 1 {
            for j in 1..=2 * m + 1 {
                put(&main_label(i, bar_of(i), j), (centre + dir * j as i64, col(i)));
            }
        }
        for j in 1..=2 * m {
            let row = centre + dir * j as i64;
            for i in [0, n + 1] {
                put(&leaf_label(i, bar_of(i), j, false), (row, col(i) - 1));
                put(&leaf_label(i, bar_of(i), j, true), (row, col(i) + 1));
            }
            let has_leaf = |i: usize| g.index.contains_key(&leaf_label(i, bar_of(i), j, false));
            let free = if j % 2 == 1 {
                (1..=n).find(|&i| !has_leaf(i)).ok_or(GridError::NotNaeSatisfying)?
            } else {
                n
            };
            for i in (1..=n).filter(|&i| has_leaf(i)) {
                let side = if i < free { 1 } else { -1 };
                put(&leaf_label(i, bar_of(i), j, false), (row, col(i) + side));
            }
        }
    }
    if !validate(&g.graph, &f).is_valid() {
        return Err(GridError::InvalidInstance("canonical NAE-SAT layout failed to validate".into()));
    }
    Ok(f)
}
