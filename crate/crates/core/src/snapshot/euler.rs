//! Eulerian paths of directed multigraphs (Hierholzer).

use crate::error::{GridError, Result};
use crate::graph::MultiDigraph;

/// Vertex sequence of an Eulerian path from `start` to `end` that uses every arc of
/// `d` exactly once.
pub fn eulerian_path(d: &MultiDigraph, start: usize, end: usize) -> Result<Vec<usize>> {
    let n = d.n();
    if start >= n || end >= n {
        return Err(GridError::InconsistentFlow("endpoint outside the digraph".into()));
    }
    for v in 0..n {
        let bal = d.out_degree(v) as i64 - d.in_degree(v) as i64;
        let want = match (v == start, v == end) {
            (true, false) => 1,
            (false, true) => -1,
            _ => 0,
        };
        if bal != want {
            return Err(GridError::InconsistentFlow(format!("vertex {v} has imbalance {bal}")));
        }
    }
    let mut out: Vec<Vec<usize>> = vec![Vec::new(); n];
    for &(u, v) in d.arcs().iter().rev() {
        out[u].push(v);
    }
    let mut stack = vec![start];
    let mut path = Vec::new();
    while let Some(&u) = stack.last() {
        match out[u].pop() {
            Some(v) => stack.push(v),
            None => path.push(stack.pop().expect("nonempty")),
        }
    }
    path.reverse();
    if path.len() != d.arc_count() + 1 {
        return Err(GridError::InconsistentFlow("arcs are not connected to start".into()));
    }
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn loop_used_twice() {
        let mut d = MultiDigraph::new(3);
        d.add_arc(0, 1);
        d.add_arcs(1, 1, 2);
        d.add_arc(1, 2);
        let p = eulerian_path(&d, 0, 2).unwrap();
        assert_eq!(p, vec![0, 1, 1, 1, 2]);
        assert_eq!(p.len() - 1, d.arc_count());
    }

    #[test]
    fn detours_are_spliced() {
        let mut d = MultiDigraph::new(4);
        for (u, v) in [(0, 1), (1, 2), (2, 1), (1, 3), (3, 1), (1, 2)] {
            d.add_arc(u, v);
        }
        let p = eulerian_path(&d, 0, 2).unwrap();
        assert_eq!(p.len(), 7);
        let mut used: Vec<(usize, usize)> = p.windows(2).map(|w| (w[0], w[1])).collect();
        let mut arcs = d.arcs().to_vec();
        used.sort();
        arcs.sort();
        assert_eq!(used, arcs);
    }

    #[test]
    fn disconnected_or_unbalanced_rejected() {
        let mut d = MultiDigraph::new(4);
        d.add_arc(0, 1);
        d.add_arc(2, 3);
        d.add_arc(3, 2);
        assert!(eulerian_path(&d, 0, 1).is_err());
        let mut d = MultiDigraph::new(2);
        d.add_arcs(0, 1, 2);
        assert!(eulerian_path(&d, 0, 1).is_err());
    }
}
