//! The reduction from 3-Partition to `3 x r` grid embedding: `m` rigid containers of
//! inner width `B` plus one path per number.

use crate::embedding::{validate, GridEmbedding};
use crate::error::{GridError, Result};
use crate::graph::Graph;

/// Output of [`reduce_3partition`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionGraph {
    pub graph: Graph,
    /// Numbers after normalization; path `i` has `weights[i]` vertices.
    pub weights: Vec<u64>,
    /// Target triple sum after normalization.
    pub bound: u64,
    pub m: usize,
    /// Always 3.
    pub k: usize,
    /// `m (B + 4)`.
    pub r: usize,
}

impl PartitionGraph {
    fn width(&self) -> usize {
        self.bound as usize + 4
    }

    /// Id of `c^j_i` (`j` and `i` 1-based).
    pub fn c(&self, j: usize, i: usize) -> usize {
        (j - 1) * 2 * self.width() + i - 1
    }

    /// Id of `s^j_i` (`j` and `i` 1-based).
    pub fn s(&self, j: usize, i: usize) -> usize {
        (j - 1) * 2 * self.width() + self.width() + i - 1
    }

    /// Id of the `t`-th vertex (1-based) of path `P_i` (0-based `i`).
    pub fn p(&self, i: usize, t: usize) -> usize {
        let before: u64 = self.weights[..i].iter().sum();
        self.m * 2 * self.width() + before as usize + t - 1
    }
}

/// Adds `sum W` to every number and `3 sum W` to the target, so that only triples can
/// reach the target and every number exceeds 2.
pub fn normalize_3partition(weights: &[u64]) -> (Vec<u64>, u64) {
    let total: u64 = weights.iter().sum();
    let m = (weights.len() / 3).max(1) as u64;
    (weights.iter().map(|w| w + total).collect(), total / m + 3 * total)
}

/// Builds the container graph. `normalize = false` certifies that the numbers already
/// exceed 2 and only triples reach the target.
pub fn reduce_3partition(weights: &[u64], normalize: bool) -> Result<PartitionGraph> {
    if weights.is_empty() || !weights.len().is_multiple_of(3) {
        return Err(GridError::InvalidInstance(format!("3-Partition needs 3m numbers, got {}", weights.len())));
    }
    if weights.contains(&0) {
        return Err(GridError::InvalidInstance("numbers must be positive".into()));
    }
    let m = weights.len() / 3;
    let total: u64 = weights.iter().sum();
    if !total.is_multiple_of(m as u64) {
        return Err(GridError::InvalidInstance(format!("sum {total} is not divisible by m = {m}")));
    }
    let (weights, bound) = if normalize {
        normalize_3partition(weights)
    } else {
        if weights.iter().any(|&w| w <= 2) {
            return Err(GridError::InvalidInstance("unnormalized numbers must exceed 2".into()));
        }
        (weights.to_vec(), total / m as u64)
    };
    let width = bound as usize + 4;
    let n = m * 2 * width + weights.iter().sum::<u64>() as usize;
    let mut edges = Vec::new();
    for j in 0..m {
        let base = j * 2 * width;
        let c = |i: usize| base + i - 1;
        let s = |i: usize| base + width + i - 1;
        for i in 1..width {
            edges.push((c(i), c(i + 1)));
        }
        for i in 2..width {
            edges.push((c(i), s(i)));
        }
        for i in 2..width - 1 {
            edges.push((s(i), s(i + 1)));
        }
        edges.push((c(2), s(1)));
        edges.push((c(width - 1), s(width)));
    }
    let mut next = m * 2 * width;
    for &w in &weights {
        for t in 1..w as usize {
            edges.push((next + t - 1, next + t));
        }
        next += w as usize;
    }
    let graph = Graph::from_edges(n, &edges)?;
    Ok(PartitionGraph { graph, weights, bound, m, k: 3, r: m * width })
}

/// The forward-direction embedding: containers on rows 2 and 3 with the end pendants
/// on row 1, and the three paths of triple `j` laid out left to right on row 1 of
/// container `j`. `partition[j]` lists indices into the numbers.
pub fn construct_3partition_witness(pg: &PartitionGraph, partition: &[[usize; 3]]) -> Result<GridEmbedding> {
    if partition.len() != pg.m {
        return Err(GridError::InvalidPartition(format!("{} triples for m = {}", partition.len(), pg.m)));
    }
    let mut used = vec![false; pg.weights.len()];
    for triple in partition {
        for &i in triple {
            if i >= used.len() || std::mem::replace(&mut used[i], true) {
                return Err(GridError::InvalidPartition(format!("index {i} is out of range or repeated")));
            }
        }
        let sum: u64 = triple.iter().map(|&i| pg.weights[i]).sum();
        if sum != pg.bound {
            return Err(GridError::InvalidPartition(format!("triple {triple:?} sums to {sum}, not {}", pg.bound)));
        }
    }
    let width = pg.width();
    let mut f = GridEmbedding::new(pg.k, pg.r, pg.graph.n());
    for (j0, triple) in partition.iter().enumerate() {
        let j = j0 + 1;
        let offset = (j0 * width) as i64;
        for i in 1..=width {
            f.set(pg.c(j, i), (2, offset + i as i64));
        }
        for i in 2..width {
            f.set(pg.s(j, i), (3, offset + i as i64));
        }
        f.set(pg.s(j, 1), (1, offset + 2));
        f.set(pg.s(j, width), (1, offset + width as i64 - 1));
        let mut col = offset + 2;
        for &path in triple {
            for t in 1..=pg.weights[path] as usize {
                f.set(pg.p(path, t), (1, col + t as i64));
            }
            col += pg.weights[path] as i64;
        }
    }
    if !validate(&pg.graph, &f).is_valid() {
        return Err(GridError::InvalidPartition("the triples do not yield an embedding".into()));
    }
    Ok(f)
}

/// Finds a partition of `weights` into triples of equal sum by backtracking, always
/// completing the triple that contains the smallest unused index.
pub fn three_partition_brute_force(weights: &[u64]) -> Option<Vec<[usize; 3]>> {
    if weights.is_empty() || !weights.len().is_multiple_of(3) {
        return None;
    }
    let m = weights.len() / 3;
    let total: u64 = weights.iter().sum();
    if !total.is_multiple_of(m as u64) {
        return None;
    }
    let target = total / m as u64;
    let mut used = vec![false; weights.len()];
    let mut out = Vec::with_capacity(m);
    fn go(w: &[u64], target: u64, used: &mut [bool], out: &mut Vec<[usize; 3]>) -> bool {
        let Some(a) = used.iter().position(|&u| !u) else {
            return true;
        };
        used[a] = true;
        for b in a + 1..w.len() {
            if used[b] || w[a] + w[b] >= target {
                continue;
            }
            used[b] = true;
            for c in b + 1..w.len() {
                if !used[c] && w[a] + w[b] + w[c] == target {
                    used[c] = true;
                    out.push([a, b, c]);
                    if go(w, target, used, out) {
                        return true;
                    }
                    out.pop();
                    used[c] = false;
                }
            }
            used[b] = false;
        }
        used[a] = false;
        false
    }
    go(weights, target, &mut used, &mut out).then_some(out)
}
