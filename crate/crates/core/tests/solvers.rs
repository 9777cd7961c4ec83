//! Cross-solver agreement on small instances, checked against exhaustive search.

use gridbed_core::distance::solve_distance_fpt;
use gridbed_core::embedding::validate;
use gridbed_core::oracle::{brute_force_embed, pack_rectangles};
use gridbed_core::reductions::strip_pack;
use gridbed_core::snapshot::solve_mcc_k;
use gridbed_core::tree::{solve_tree, TreeConstants};
use gridbed_core::{Answer, Graph};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn path_forest(sizes: &[usize]) -> Graph {
    let mut g = Graph::new(0);
    for &s in sizes {
        let mut prev = g.add_vertex();
        for _ in 1..s {
            let v = g.add_vertex();
            g.add_edge(prev, v).unwrap();
            prev = v;
        }
    }
    g
}

fn random_connected(rng: &mut ChaCha8Rng, n: usize, extra: usize) -> Graph {
    let mut g = Graph::new(n);
    for v in 1..n {
        let u = rng.gen_range(0..v);
        g.add_edge(u, v).unwrap();
    }
    for _ in 0..extra {
        let (u, v) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if u != v && !g.neighbors(u).contains(&v) {
            g.add_edge(u, v).unwrap();
        }
    }
    g
}

#[test]
fn snapshot_solver_on_path_forests_in_one_row() {
    let mut lists: Vec<Vec<usize>> = vec![vec![]];
    let mut all = Vec::new();
    for _ in 0..3 {
        let mut next = Vec::new();
        for l in &lists {
            for s in *l.last().unwrap_or(&1)..=4 {
                let mut m = l.clone();
                m.push(s);
                next.push(m);
            }
        }
        all.extend(next.iter().cloned());
        lists = next;
    }
    for sizes in all {
        let g = path_forest(&sizes);
        for r in 2..=9 {
            let expect = brute_force_embed(&g, 1, r, u64::MAX).answer;
            let got = solve_mcc_k(&g, 1, r, u64::MAX);
            assert_eq!(got.answer, expect, "paths {sizes:?} in 1x{r}");
            if let Some(f) = &got.witness {
                assert!(validate(&g, f).is_valid());
            }
        }
    }
}

#[test]
fn all_solvers_agree_on_random_connected_graphs() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..60 {
        let n = rng.gen_range(2..=7);
        let extra = rng.gen_range(0..=2);
        let g = random_connected(&mut rng, n, extra);
        let (k, r) = (rng.gen_range(1..=3), rng.gen_range(1..=5));
        let expect = brute_force_embed(&g, k, r, u64::MAX).answer;
        assert_eq!(solve_mcc_k(&g, k, r, u64::MAX).answer, expect, "snapshot on {:?} in {k}x{r}", g.edges());
        assert_eq!(solve_distance_fpt(&g, k, r, u64::MAX).unwrap().result.answer, expect, "dp on {:?}", g.edges());
        if g.is_tree() {
            let got = solve_tree(&g, k, r, u64::MAX, &TreeConstants::REDUCED).unwrap().result.answer;
            assert_eq!(got, expect, "tree solver on {:?} in {k}x{r}", g.edges());
        }
    }
}

#[test]
fn strip_packing_with_oversized_snapshot_tables() {
    // Four unit-width rectangles give blocks of width 12 over 6 rows after doubling,
    // whose snapshot table exceeds its cap; the answer comes from component packing.
    let rects = [(1, 1), (2, 1), (3, 1), (1, 1)];
    let via = strip_pack(&rects, 3, 8, u64::MAX).unwrap();
    assert_eq!(via.result.answer, Answer::Yes);
    assert!(pack_rectangles(&rects, 3, 8, u64::MAX).unwrap().is_some());
    let places = via.placements.unwrap();
    assert_eq!(places.len(), rects.len());
    let mut grid = [[false; 8]; 3];
    for p in &places {
        for row in p.row..p.row + p.height {
            for col in p.col..p.col + p.width {
                assert!(!grid[row - 1][col - 1], "overlap at ({row}, {col})");
                grid[row - 1][col - 1] = true;
            }
        }
    }
}
