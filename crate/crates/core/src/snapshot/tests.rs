use super::*;
use crate::embedding::validate;
use crate::graph::{component_catalog, connected_components};
use crate::oracle::brute_force_embed;
use crate::Answer;
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

fn union(parts: &[Graph]) -> Graph {
    parts.iter().fold(Graph::new(0), |acc, h| acc.disjoint_union(h))
}

#[test]
fn block_plan_examples() {
    let plan = block_plan(8, 3).unwrap();
    assert_eq!(plan.p, 4);
    assert_eq!(plan.widths, vec![3, 3, 3, 2]);
    assert_eq!(plan.starts, vec![0, 2, 4, 6]);
    let plan = block_plan(7, 3).unwrap();
    assert_eq!(plan.widths, vec![3, 3, 3]);
    assert_eq!(block_plan(3, 5).unwrap().widths, vec![3]);
    assert!(block_plan(5, 1).is_err());
    assert!(block_plan(1, 3).is_err());
}

#[test]
fn block_plan_arithmetic() {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
    for _ in 0..500 {
        let (r, mcc) = (rng.gen_range(2..60), rng.gen_range(2..12));
        let plan = block_plan(r, mcc).unwrap();
        assert_eq!(plan.widths.iter().sum::<usize>(), r + plan.p - 1);
        let last = plan.starts[plan.p - 1] + plan.widths[plan.p - 1];
        assert_eq!(last, r);
        assert!(plan.widths.iter().all(|&w| w >= 2 && w <= mcc.max(r.min(mcc))));
        for b in 1..plan.p {
            assert_eq!(plan.starts[b], plan.starts[b - 1] + plan.widths[b - 1] - 1);
        }
    }
}

/// Snapshot filter recomputed from scratch: flood fill and brute-force isomorphism.
fn independent_snapshot_count(k: usize, w: usize, catalog: &ComponentCatalog) -> usize {
    let cells: Vec<LCell> = (0..k).flat_map(|r| (0..w).map(move |c| (r, c))).collect();
    let mut count = 0;
    for mask in 0u32..(1 << cells.len()) {
        let chosen: Vec<LCell> = (0..cells.len()).filter(|&i| mask >> i & 1 == 1).map(|i| cells[i]).collect();
        let mut pairs = Vec::new();
        for (i, a) in chosen.iter().enumerate() {
            for b in &chosen[i + 1..] {
                if a.0.abs_diff(b.0) + a.1.abs_diff(b.1) == 1 {
                    pairs.push((*a, *b));
                }
            }
        }
        for emask in 0u32..(1 << pairs.len()) {
            let edges: Vec<_> = (0..pairs.len()).filter(|&i| emask >> i & 1 == 1).map(|i| pairs[i]).collect();
            let n = chosen.len();
            let mut g = Graph::new(n);
            for &(a, b) in &edges {
                let ia = chosen.iter().position(|&c| c == a).unwrap();
                let ib = chosen.iter().position(|&c| c == b).unwrap();
                g.add_edge(ia, ib).unwrap();
            }
            let ok = connected_components(&g).iter().all(|comp| {
                let left = comp.iter().any(|&v| chosen[v].1 == 0);
                let right = comp.iter().any(|&v| chosen[v].1 == w - 1);
                if left != right {
                    return true;
                }
                let h = g.induced_subgraph(comp);
                catalog.classes.iter().any(|(rep, _)| brute_iso(rep, &h))
            });
            count += ok as usize;
        }
    }
    count
}

fn brute_iso(a: &Graph, b: &Graph) -> bool {
    if a.n() != b.n() || a.edge_count() != b.edge_count() {
        return false;
    }
    fn perms(n: usize) -> Vec<Vec<usize>> {
        if n == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for p in perms(n - 1) {
            for i in 0..n {
                let mut q = p.clone();
                q.insert(i, n - 1);
                out.push(q);
            }
        }
        out
    }
    perms(a.n()).into_iter().any(|p| a.edges().iter().all(|&(u, v)| b.has_edge(p[u], p[v])))
}

#[test]
fn snapshots_of_a_two_cell_row() {
    let catalog = component_catalog(&path(2));
    let snaps = enumerate_snapshots(1, 2, BlockSide::Open, &catalog, &mut Budget::unlimited()).unwrap();
    // Empty, two single cells, the edgeless pair (one left-only and one right-only
    // cell) and the pair joined by an edge (a full P2).
    assert_eq!(snaps.len(), 5);
    assert_eq!(snaps.len(), independent_snapshot_count(1, 2, &catalog));
}

#[test]
fn empty_catalog_keeps_only_boundary_components() {
    let catalog = component_catalog(&Graph::new(0));
    for (k, w) in [(1, 3), (2, 2), (2, 3)] {
        let snaps = enumerate_snapshots(k, w, BlockSide::Open, &catalog, &mut Budget::unlimited()).unwrap();
        for s in &snaps {
            assert!(s.snapshot.components().iter().all(|c| c.kind() != ComponentKind::Full));
        }
        assert_eq!(snaps.len(), independent_snapshot_count(k, w, &catalog));
    }
}

#[test]
fn snapshot_counts_match_independent_enumeration() {
    for g in [path(2), path(3), cycle(4), union(&[path(2), path(1)])] {
        let catalog = component_catalog(&g);
        let snaps = enumerate_snapshots(2, 2, BlockSide::Open, &catalog, &mut Budget::unlimited()).unwrap();
        assert_eq!(snaps.len(), independent_snapshot_count(2, 2, &catalog));
    }
}

#[test]
fn adjacency_basic_cases() {
    let catalog = component_catalog(&path(2));
    let mut index = ClassIndex::new(&catalog);
    let a = analyse_snapshot(Snapshot::new(1, 2, vec![(0, 1)], vec![]), BlockSide::Open, &mut index).unwrap();
    let b = analyse_snapshot(Snapshot::empty(1, 2), BlockSide::Open, &mut index).unwrap();
    let adj = compute_adjacency(&[a], &[b.clone()], 2, &mut index, &mut Budget::unlimited()).unwrap();
    assert!(adj.is_empty());
    let adj = compute_adjacency(&[b.clone()], &[b], 2, &mut index, &mut Budget::unlimited()).unwrap();
    assert_eq!(adj.len(), 1);
    assert_eq!(adj[0].boundary_freq, vec![0]);
}

/// Adjacency recomputed from the `k x (2w-1)` lattice directly.
fn direct_adjacency(k: usize, w: usize, snaps: &[SnapshotInfo], catalog: &ComponentCatalog) -> HashSet<(usize, usize)> {
    let width = 2 * w - 1;
    let cells: Vec<LCell> = (0..k).flat_map(|r| (0..width).map(move |c| (r, c))).collect();
    let pos: HashMap<&Snapshot, usize> = snaps.iter().enumerate().map(|(i, s)| (&s.snapshot, i)).collect();
    let mut out = HashSet::new();
    for mask in 0u32..(1 << cells.len()) {
        let chosen: Vec<LCell> = (0..cells.len()).filter(|&i| mask >> i & 1 == 1).map(|i| cells[i]).collect();
        let mut pairs = Vec::new();
        for (i, a) in chosen.iter().enumerate() {
            for b in &chosen[i + 1..] {
                if a.0.abs_diff(b.0) + a.1.abs_diff(b.1) == 1 {
                    pairs.push((*a, *b));
                }
            }
        }
        for emask in 0u32..(1 << pairs.len()) {
            let edges: Vec<_> = (0..pairs.len()).filter(|&i| emask >> i & 1 == 1).map(|i| pairs[i]).collect();
            let half = |lo: usize| {
                let cs: Vec<LCell> = chosen.iter().filter(|c| c.1 >= lo && c.1 < lo + w).map(|c| (c.0, c.1 - lo)).collect();
                let es: Vec<_> = edges
                    .iter()
                    .filter(|(a, b)| a.1 >= lo && b.1 >= lo && a.1 < lo + w && b.1 < lo + w)
                    .map(|(a, b)| ((a.0, a.1 - lo), (b.0, b.1 - lo)))
                    .collect();
                Snapshot::new(k, w, cs, es)
            };
            let (Some(&i), Some(&j)) = (pos.get(&half(0)), pos.get(&half(w - 1))) else { continue };
            let n = chosen.len();
            let mut g = Graph::new(n);
            for &(a, b) in &edges {
                let ia = chosen.iter().position(|&c| c == a).unwrap();
                let ib = chosen.iter().position(|&c| c == b).unwrap();
                g.add_edge(ia, ib).unwrap();
            }
            let ok = connected_components(&g).iter().all(|comp| {
                let cols: Vec<usize> = comp.iter().map(|&v| chosen[v].1).collect();
                if !cols.contains(&(w - 1)) {
                    return true;
                }
                let (lo, hi) = (*cols.iter().min().unwrap(), *cols.iter().max().unwrap());
                if hi - lo + 1 > w {
                    return false;
                }
                if lo == 0 || hi == width - 1 {
                    return true;
                }
                let h = g.induced_subgraph(comp);
                catalog.classes.iter().any(|(rep, _)| brute_iso(rep, &h))
            });
            if ok {
                out.insert((i, j));
            }
        }
    }
    out
}

#[test]
fn adjacency_matches_direct_lattice_enumeration() {
    for g in [path(2), union(&[path(2), path(1)])] {
        let catalog = component_catalog(&g);
        let snaps = enumerate_snapshots(2, 2, BlockSide::Open, &catalog, &mut Budget::unlimited()).unwrap();
        let mut index = ClassIndex::new(&catalog);
        let adj = compute_adjacency(&snaps, &snaps, 2, &mut index, &mut Budget::unlimited()).unwrap();
        let got: HashSet<(usize, usize)> = adj.iter().map(|e| (e.left, e.right)).collect();
        assert_eq!(got.len(), adj.len());
        assert_eq!(got, direct_adjacency(2, 2, &snaps, &catalog));
    }
}

fn tables_for(g: &Graph, k: usize, w: usize, last_w: usize) -> (ComponentCatalog, SnapshotTables) {
    let catalog = component_catalog(g);
    let mut index = ClassIndex::new(&catalog);
    let mut b = Budget::unlimited();
    let inner = enumerate_snapshots(k, w, BlockSide::Open, &catalog, &mut b).unwrap();
    let last = enumerate_snapshots(k, last_w, BlockSide::Last, &catalog, &mut b).unwrap();
    let inner_adj = compute_adjacency(&inner, &inner, w, &mut index, &mut b).unwrap();
    let last_adj = compute_adjacency(&inner, &last, w, &mut index, &mut b).unwrap();
    (catalog.clone(), SnapshotTables { inner, last, inner_adj, last_adj })
}

fn find(list: &[SnapshotInfo], s: &Snapshot) -> usize {
    list.iter().position(|x| &x.snapshot == s).unwrap()
}

#[test]
fn digraph_construction() {
    let (_, tables) = tables_for(&path(2), 1, 2, 2);
    let empty = find(&tables.inner, &Snapshot::empty(1, 2));
    let end_empty = find(&tables.last, &Snapshot::empty(1, 2));
    let d = build_digraph(empty, end_empty, &[], &tables, CountingRule::EndComplete);
    assert_eq!(d.digraph.arcs(), &[(0, 1)]);
    let d = build_digraph(empty, end_empty, &[empty], &tables, CountingRule::EndComplete);
    assert!(d.digraph.arcs().contains(&(2, 2)));
    assert!(d.digraph.arcs().iter().all(|&(u, v)| v != 0 && u != 1));

    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
    let inner_pairs: HashSet<(usize, usize)> = tables.inner_adj.iter().map(|e| (e.left, e.right)).collect();
    let last_pairs: HashSet<(usize, usize)> = tables.last_adj.iter().map(|e| (e.left, e.right)).collect();
    for _ in 0..50 {
        let start = rng.gen_range(0..tables.inner.len());
        let end = rng.gen_range(0..tables.last.len());
        let mut chosen: Vec<usize> = (0..tables.inner.len()).filter(|_| rng.gen_bool(0.4)).collect();
        chosen.sort();
        let d = build_digraph(start, end, &chosen, &tables, CountingRule::RightOnly);
        let snap = |x: usize| if x == 0 { start } else { chosen[x - 2] };
        let mut expect = HashSet::new();
        for u in std::iter::once(0).chain(2..chosen.len() + 2) {
            for v in 2..chosen.len() + 2 {
                if inner_pairs.contains(&(snap(u), snap(v))) {
                    expect.insert((u, v));
                }
            }
            if last_pairs.contains(&(snap(u), end)) {
                expect.insert((u, 1));
            }
        }
        let got: HashSet<(usize, usize)> = d.digraph.arcs().iter().copied().collect();
        assert_eq!(got, expect);
    }
}

#[test]
fn two_block_stamping() {
    // P3 in a 1 x 4 row: blocks of widths 3 and 2 sharing column 2.
    let g = path(3);
    let (catalog, tables) = tables_for(&g, 1, 3, 2);
    let plan = block_plan(4, 3).unwrap();
    assert_eq!(plan.widths, vec![3, 2]);
    let row = Snapshot::new(1, 3, vec![(0, 0), (0, 1), (0, 2)], vec![((0, 0), (0, 1)), ((0, 1), (0, 2))]);
    let start = find(&tables.inner, &row);
    let end = find(&tables.last, &Snapshot::new(1, 2, vec![(0, 0)], vec![]));
    let d = build_digraph(start, end, &[], &tables, CountingRule::EndComplete);
    assert_eq!(d.digraph.arcs(), &[(0, 1)]);
    let sys = build_ilp(&d, &[0], 2, &tables, &catalog, CountingRule::EndComplete);
    assert!(sys.is_satisfied_by(&[1]));
    let f = reconstruct_witness(&g, &catalog, 1, &plan, &d, &[1], &tables).unwrap();
    assert!(crate::embedding::validate(&g, &f).is_valid());
}

#[test]
fn loop_flow_visits_loop_twice() {
    // P2, K1, K1, P2 in a 1 x 6 row; the middle blocks repeat the edgeless pair.
    let g = union(&[path(2), path(1), path(1), path(2)]);
    let (catalog, tables) = tables_for(&g, 1, 2, 2);
    let plan = block_plan(6, 2).unwrap();
    assert_eq!(plan.p, 5);
    let joined = Snapshot::new(1, 2, vec![(0, 0), (0, 1)], vec![((0, 0), (0, 1))]);
    let apart = Snapshot::new(1, 2, vec![(0, 0), (0, 1)], vec![]);
    let s = find(&tables.inner, &joined);
    let m = find(&tables.inner, &apart);
    let e = find(&tables.last, &joined);
    let d = build_digraph(s, e, &[m], &tables, CountingRule::EndComplete);
    let arcs = d.digraph.arcs();
    let x: Vec<i64> = arcs
        .iter()
        .map(|&(u, v)| match (u, v) {
            (0, 2) | (2, 1) => 1,
            (2, 2) => 2,
            _ => 0,
        })
        .collect();
    let tree: Vec<usize> = (0..arcs.len()).filter(|&a| matches!(arcs[a], (0, 2) | (2, 1))).collect();
    let sys = build_ilp(&d, &tree, plan.p, &tables, &catalog, CountingRule::EndComplete);
    assert!(sys.audit(&x).iter().all(|&(_, ok)| ok));
    let seq = flow_to_sequence(&d, &x, &tables).unwrap();
    assert_eq!(seq.len(), 5);
    assert_eq!(seq.iter().filter(|s| ***s == apart).count(), 3);
    let f = stamp_blocks(&g, &catalog, 1, &plan, &seq).unwrap();
    assert!(crate::embedding::validate(&g, &f).is_valid());
}

#[test]
fn solve_examples() {
    let three_p2 = union(&[path(2), path(2), path(2)]);
    assert_eq!(solve_mcc_k(&three_p2, 2, 3, u64::MAX).answer, Answer::Yes);
    let c4c4 = union(&[cycle(4), cycle(4)]);
    let yes = solve_mcc_k(&c4c4, 2, 4, u64::MAX);
    assert_eq!(yes.answer, Answer::Yes);
    assert!(crate::embedding::validate(&c4c4, yes.witness.as_ref().unwrap()).is_valid());
    assert_eq!(solve_mcc_k(&c4c4, 2, 3, u64::MAX).answer, Answer::No);
    assert_eq!(solve_mcc_k(&Graph::new(5), 2, 2, u64::MAX).answer, Answer::No);
    assert_eq!(solve_mcc_k(&Graph::new(4), 2, 2, u64::MAX).answer, Answer::Yes);
    assert_eq!(solve_mcc_k(&cycle(3), 3, 3, u64::MAX).answer, Answer::No);
}

#[test]
fn certificates_satisfy_every_family() {
    let g = union(&[path(3), path(2), cycle(4)]);
    let report = solve_mcc_k_with(&g, 2, 9, MccOptions::new(u64::MAX));
    assert_eq!(report.result.answer, Answer::Yes);
    let cert = report.certificate.expect("multi-block instance");
    assert!(cert.system.audit(&cert.x).iter().all(|&(_, ok)| ok));
    assert_eq!(cert.blocks.len(), cert.plan.p);
    assert_eq!(cert.x.iter().sum::<i64>() as usize, cert.plan.p - 1);
}

fn random_forest(rng: &mut impl Rng, max_parts: usize, max_size: usize) -> Graph {
    let parts = rng.gen_range(1..=max_parts);
    let mut g = Graph::new(0);
    for _ in 0..parts {
        let s = rng.gen_range(1..=max_size);
        let base = g.n();
        for _ in 0..s {
            g.add_vertex();
        }
        for v in 1..s {
            g.add_edge(base + rng.gen_range(0..v), base + v).unwrap();
        }
        if s >= 4 && rng.gen_bool(0.3) {
            let (u, v) = (base + rng.gen_range(0..s), base + rng.gen_range(0..s));
            if u != v && !g.has_edge(u, v) {
                g.add_edge(u, v).unwrap();
            }
        }
    }
    g
}

#[test]
fn agrees_with_brute_force_on_random_graphs() {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(31);
    for _ in 0..150 {
        let g = random_forest(&mut rng, 3, 3);
        let (k, r) = (rng.gen_range(1..=3), rng.gen_range(1..=7));
        let res = solve_mcc_k(&g, k, r, u64::MAX);
        let truth = brute_force_embed(&g, k, r, u64::MAX).answer;
        assert_eq!(res.answer, truth, "{g:?} in {k}x{r}");
        if let Some(w) = res.witness {
            assert!(crate::embedding::validate(&g, &w).is_valid());
        }
    }
}

#[test]
fn literal_loop_agrees_on_tiny_instances() {
    let cases = [
        (union(&[path(2), path(2)]), 1, 4),
        (union(&[path(2), path(2)]), 1, 5),
        (union(&[path(2), path(1)]), 1, 3),
        (union(&[path(2), path(2), path(1)]), 1, 5),
        (path(3), 1, 4),
        (union(&[path(2), path(2)]), 2, 3),
    ];
    for (g, k, r) in cases {
        let truth = brute_force_embed(&g, k, r, u64::MAX).answer;
        let lit = solve_mcc_k_literal(&g, k, r, CountingRule::EndComplete, 50_000_000);
        assert_eq!(lit.result.answer, truth, "{g:?} {k}x{r}");
        if let Some(cert) = lit.certificate {
            assert!(cert.system.audit(&cert.x).iter().all(|&(_, ok)| ok));
        }
        assert_eq!(solve_mcc_k(&g, k, r, u64::MAX).answer, truth);
    }
}

#[test]
fn right_only_counting_misses_a_full_last_block() {
    // Two P2s in a 1 x 4 row: the only layout puts a whole P2 into the last block,
    // which the right-only counting never charges.
    let g = union(&[path(2), path(2)]);
    assert_eq!(brute_force_embed(&g, 1, 4, u64::MAX).answer, Answer::Yes);
    let lit = solve_mcc_k_literal(&g, 1, 4, CountingRule::RightOnly, 50_000_000);
    assert_eq!(lit.result.answer, Answer::No);
    let dp = solve_mcc_k_with(&g, 1, 4, MccOptions { budget: u64::MAX, rule: CountingRule::RightOnly });
    assert_eq!(dp.result.answer, Answer::No);
    assert_eq!(solve_mcc_k(&g, 1, 4, u64::MAX).answer, Answer::Yes);
}

#[test]
fn budget_exhaustion_is_unknown() {
    let g = union(&[path(3), path(3), path(3)]);
    assert_eq!(solve_mcc_k(&g, 3, 9, 10).answer, Answer::Unknown);
}


#[test]
fn components_crossing_into_a_narrow_last_block() {
    // Two equal paths filling a row exactly: the second path crosses into a last
    // block narrower than the largest component and touches both of its columns.
    for (m, r) in [(3, 6), (4, 8)] {
        let g = union(&[path(m), path(m)]);
        let report = solve_mcc_k_with(&g, 1, r, MccOptions::new(u64::MAX));
        assert_eq!(report.result.answer, Answer::Yes, "two P{m} in 1x{r}");
        assert!(validate(&g, report.result.witness.as_ref().unwrap()).is_valid());
        assert_eq!(report.certificate.unwrap().plan.widths.last(), Some(&2));
    }
}
