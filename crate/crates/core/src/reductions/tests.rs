use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::gadget::{frame_cells, lettered_vertex, parse_skeleton_label, side_edges, side_size, witness_layouts};
use super::sat::placement_from_assignment;
use super::*;
use crate::embedding::{distance_approximation, validate, Cell, GridEmbedding};
use crate::graph::{grid_necessary_filter, FilterVerdict, Graph};
use crate::oracle::{brute_force_embed, pack_rectangles, Answer};

fn figure_formula() -> CnfFormula {
    CnfFormula::new(2, vec![vec![-1, 2], vec![1, 2]], false).unwrap()
}

fn figure_batteries() -> BatteriesInstance {
    BatteriesInstance::new(vec![vec![(true, false), (false, true)], vec![(false, true), (false, true)]]).unwrap()
}

fn random_formula(rng: &mut ChaCha8Rng, n: usize, max_clauses: usize, nae: bool) -> CnfFormula {
    let m = rng.gen_range(1..=max_clauses);
    let clauses = (0..m)
        .map(|_| {
            let width = rng.gen_range(1..=n.min(3));
            let mut vars: Vec<i32> = (1..=n as i32).collect();
            for i in (1..vars.len()).rev() {
                vars.swap(i, rng.gen_range(0..=i));
            }
            vars[..width].iter().map(|&v| if rng.gen_bool(0.5) { v } else { -v }).collect()
        })
        .collect();
    CnfFormula::new(n, clauses, nae).unwrap()
}

#[test]
fn formula_validation_and_dimacs() {
    assert!(CnfFormula::new(2, vec![vec![]], false).is_err());
    assert!(CnfFormula::new(2, vec![vec![3]], false).is_err());
    assert!(CnfFormula::new(2, vec![vec![0]], false).is_err());
    let pi = figure_formula();
    let text = pi.to_dimacs();
    assert_eq!(text, "p cnf 2 2\n-1 2 0\n1 2 0\n");
    assert_eq!(CnfFormula::from_dimacs(&format!("c comment\n{text}"), false).unwrap(), pi);
    assert!(CnfFormula::from_dimacs("p cnf 2 3\n1 0\n", false).is_err());
    assert!(CnfFormula::from_dimacs("1 2 0\n", false).is_err());
    let split = CnfFormula::from_dimacs("p cnf 3 1\n1 -2\n3 0\n", false).unwrap();
    assert_eq!(split.clauses, vec![vec![1, -2, 3]]);
}

#[test]
fn reduce_one_examples() {
    let b = reduce_sat_to_batteries(&figure_formula()).unwrap();
    assert_eq!(b, figure_batteries());
    let single = reduce_sat_to_batteries(&CnfFormula::new(1, vec![vec![1]], false).unwrap()).unwrap();
    assert_eq!(single.cells, vec![vec![(false, true)]]);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..200 {
        let pi = random_formula(&mut rng, 3, 4, false);
        let b = reduce_sat_to_batteries(&pi).unwrap();
        assert_eq!((b.rows, b.cols), (pi.m(), 3));
        for (i, clause) in pi.clauses.iter().enumerate() {
            for j in 0..3 {
                let var = j as i32 + 1;
                assert_eq!(b.cell(i, j).0, !clause.iter().any(|&l| l == var));
                assert_eq!(b.cell(i, j).1, !clause.iter().any(|&l| l == -var));
            }
        }
    }
}

#[test]
fn placement_check_examples() {
    let b = figure_batteries();
    let p = Placement::from_columns(2, &[Sign::Minus, Sign::Plus]);
    assert_eq!(placement_check(&b, &p).unwrap(), PlacementCheck { correct: true, safe: true });
    let skew = Placement { signs: vec![vec![Sign::Minus, Sign::Plus], vec![Sign::Plus, Sign::Plus]] };
    assert!(!placement_check(&b, &skew).unwrap().correct);
    let ones = BatteriesInstance::new(vec![vec![(true, true); 3]; 2]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..20 {
        let signs = (0..2).map(|_| (0..3).map(|_| if rng.gen_bool(0.5) { Sign::Plus } else { Sign::Minus }).collect()).collect();
        assert!(!placement_check(&ones, &Placement { signs }).unwrap().safe);
    }
    assert!(placement_check(&ones, &Placement::from_columns(1, &[Sign::Plus; 3])).is_err());
}

#[test]
fn batteries_brute_force_examples() {
    assert!(matches!(batteries_brute_force(&figure_batteries()), BatteriesAnswer::Yes(_)));
    let ones = BatteriesInstance::new(vec![vec![(true, true); 2]; 3]).unwrap();
    assert_eq!(batteries_brute_force(&ones), BatteriesAnswer::No);
    let wide = BatteriesInstance::new(vec![vec![(false, false); 21]]).unwrap();
    assert_eq!(batteries_brute_force(&wide), BatteriesAnswer::TooLarge);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..300 {
        let pi = random_formula(&mut rng, 3, 3, false);
        let b = reduce_sat_to_batteries(&pi).unwrap();
        let sat = pi.brute_force();
        match batteries_brute_force(&b) {
            BatteriesAnswer::Yes(p) => {
                let check = placement_check(&b, &p).unwrap();
                assert!(check.correct && check.safe);
                let assignment: Vec<bool> = (0..3).map(|j| p.sign(0, j) == Sign::Plus).collect();
                assert!(pi.satisfied_by(&assignment));
            }
            BatteriesAnswer::No => assert!(sat.is_none(), "{pi:?}"),
            BatteriesAnswer::TooLarge => unreachable!(),
        }
        if let Some(a) = sat {
            let p = placement_from_assignment(pi.m(), &a);
            let check = placement_check(&b, &p).unwrap();
            assert!(check.correct && check.safe);
        }
    }
}

/// The frame vertex set enumerated directly from its four defining bands.
fn frame_by_definition(m: usize, n: usize) -> HashSet<Cell> {
    let (m, n) = (m as i64, n as i64);
    let mut set = HashSet::new();
    for k in 0..=12 * m + 4 {
        for l in 0..=8 * n + 4 {
            let top = k <= 2;
            let bottom = (12 * m + 2..=12 * m + 4).contains(&k);
            let left = l <= 2;
            let right = (8 * n + 2..=8 * n + 4).contains(&l);
            if top || bottom || left || right {
                set.insert((k, l));
            }
        }
    }
    set
}

#[test]
fn grid_frame_matches_definition() {
    for (m, n) in [(1, 1), (1, 2), (2, 3)] {
        let frame = grid_frame(m, n).unwrap();
        let expected = frame_by_definition(m, n);
        assert_eq!(frame.cells.iter().copied().collect::<HashSet<_>>(), expected);
        let mut unit = 0;
        for a in &expected {
            for b in &expected {
                if (a.0 - b.0).abs() + (a.1 - b.1).abs() == 1 {
                    unit += 1;
                }
            }
        }
        assert_eq!(frame.graph.edge_count(), unit / 2);
        assert!(frame.graph.is_connected());
        assert!(frame.graph.max_degree() <= 4);
        let f = GridEmbedding::from_cells(12 * m + 5, 8 * n + 5, &frame.cells.iter().map(|&(r, c)| (r + 1, c + 1)).collect::<Vec<_>>());
        assert!(validate(&frame.graph, &f).is_valid());
        let top_cols: Vec<i64> = frame.cells.iter().filter(|c| c.0 == 0).map(|c| c.1).collect();
        assert_eq!(top_cols, (0..=8 * n as i64 + 4).collect::<Vec<_>>());
    }
    let f12 = grid_frame(1, 2).unwrap();
    assert_eq!(f12.graph.n(), 21 * 3 * 2 + 11 * 3 * 2);
    assert!(grid_frame(0, 1).is_err());
}

#[test]
fn gadget_layout_tables() {
    assert_eq!(side_size(Side::Positive), 32);
    assert_eq!(side_size(Side::Negative), 31);
    for side in [Side::Positive, Side::Negative] {
        let edges = side_edges(side);
        let h = Graph::from_edges(side_size(side), &edges.iter().map(|&(u, v)| (u - 1, v - 1)).collect::<Vec<_>>()).unwrap();
        assert!(h.is_connected());
    }
    assert_eq!(lettered_vertex('a'), Some((Side::Positive, 29)));
    assert_eq!(lettered_vertex('h'), Some((Side::Negative, 31)));
    assert_eq!(lettered_vertex('z'), None);
    let skeleton: HashSet<Cell> = {
        let mut s = HashSet::new();
        for c in 2..=10 {
            s.insert((2, c));
            s.insert((8, c));
            s.insert((14, c));
        }
        for r in 2..=14 {
            s.insert((r, 2));
            s.insert((r, 10));
        }
        s
    };
    for sign in [Sign::Plus, Sign::Minus] {
        for mode in [WireMode::BothInside, WireMode::LeftInside, WireMode::RightInside] {
            for (x1, x2) in [(false, false), (false, true), (true, false), (true, true)] {
                let top_charged = if sign == Sign::Plus { x1 } else { x2 };
                let Ok(layout) = GadgetLayout::canonical(sign, mode, x1, x2) else {
                    assert!(mode == WireMode::BothInside && top_charged);
                    continue;
                };
                let cells: Vec<Cell> = layout.cells.iter().map(|&(_, c)| c).collect();
                let distinct: HashSet<Cell> = cells.iter().copied().collect();
                assert_eq!(distinct.len(), cells.len(), "{sign:?} {mode:?} {x1} {x2}");
                assert!(distinct.iter().all(|c| !skeleton.contains(c)));
                assert!(distinct.iter().all(|&(r, c)| (1..=15).contains(&r) && (1..=11).contains(&c)));
                let top_root = if sign == Sign::Plus { Side::Positive } else { Side::Negative };
                assert_eq!(layout.cell(GadgetRole::Side(top_root, 1)), Some((7, 6)));
                let syncs_out: Vec<usize> = (1..=6)
                    .filter(|&s| {
                        let (r, _) = layout.cell(GadgetRole::Sync(s)).unwrap();
                        r == 1 || r == 15
                    })
                    .collect();
                let expected = if sign == Sign::Plus { vec![1, 3, 5] } else { vec![2, 4, 6] };
                assert_eq!(syncs_out, expected);
                let w1_inside = layout.cell(GadgetRole::Wire(1)) == Some((7, 3));
                let w2_inside = layout.cell(GadgetRole::Wire(2)) == Some((7, 9));
                assert_eq!((w1_inside, w2_inside), match mode {
                    WireMode::BothInside => (true, true),
                    WireMode::LeftInside => (true, false),
                    WireMode::RightInside => (false, true),
                });
            }
        }
    }
}

#[test]
fn reduce_two_structure() {
    let one = BatteriesInstance::new(vec![vec![(false, false)]]).unwrap();
    let g = reduce_batteries_to_grid(&one).unwrap();
    let skeleton = g.labels.iter().filter(|l| parse_skeleton_label(l).is_some()).count();
    assert_eq!(skeleton, frame_cells(1, 1).len() + 7);
    assert_eq!(g.graph.n(), skeleton + side_size(Side::Positive) + side_size(Side::Negative) + 2);
    let charged = BatteriesInstance::new(vec![vec![(true, true)]]).unwrap();
    assert_eq!(reduce_batteries_to_grid(&charged).unwrap().graph.n(), g.graph.n() + 2);

    let fig = reduce_batteries_to_grid(&figure_batteries()).unwrap();
    for (i, j, x1, x2) in [(1, 1, true, false), (1, 2, false, true), (2, 1, false, true), (2, 2, false, true)] {
        assert_eq!(fig.id(&format!("gadget:({i},{j}):P:volt")).is_some(), x1);
        assert_eq!(fig.id(&format!("gadget:({i},{j}):N:volt")).is_some(), x2);
        let p_root = fig.id(&format!("gadget:({i},{j}):P:1")).unwrap();
        let n_root = fig.id(&format!("gadget:({i},{j}):N:1")).unwrap();
        let anchor = fig.id(&format!("line:({},{})", 12 * (i - 1) + 8, 8 * (j - 1) + 6)).unwrap();
        assert!(fig.graph.has_edge(p_root, anchor) && fig.graph.has_edge(n_root, anchor));
    }
    assert_eq!(fig.labels.iter().filter(|l| l.starts_with("sync:")).count(), 6);
    assert_eq!(fig.labels.iter().filter(|l| l.starts_with("wire:")).count(), 6);
    assert!(fig.id("sync:(2,1):1").is_none());
    assert!(fig.graph.is_connected());
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..20 {
        let b = random_batteries(&mut rng, 3, 3);
        assert_eq!(grid_necessary_filter(&reduce_batteries_to_grid(&b).unwrap().graph), FilterVerdict::Pass);
    }
}

fn random_batteries(rng: &mut ChaCha8Rng, max_rows: usize, max_cols: usize) -> BatteriesInstance {
    let rows = rng.gen_range(1..=max_rows);
    let cols = rng.gen_range(1..=max_cols);
    let cells = (0..rows).map(|_| (0..cols).map(|_| (rng.gen_bool(0.5), rng.gen_bool(0.5))).collect()).collect();
    BatteriesInstance::new(cells).unwrap()
}

#[test]
fn batteries_witness_examples() {
    let b = figure_batteries();
    let p = Placement::from_columns(2, &[Sign::Minus, Sign::Plus]);
    let (g, f) = construct_batteries_witness(&b, &p).unwrap();
    assert!(validate(&g.graph, &f).is_valid());
    assert_eq!((f.k, f.r), (29, 21));
    let one = BatteriesInstance::new(vec![vec![(false, false)]]).unwrap();
    let (g1, f1) = construct_batteries_witness(&one, &Placement::from_columns(1, &[Sign::Plus])).unwrap();
    assert!(validate(&g1.graph, &f1).is_valid());
    let bad = Placement::from_columns(2, &[Sign::Plus, Sign::Minus]);
    assert_eq!(construct_batteries_witness(&b, &bad).unwrap_err(), crate::GridError::PlacementNotCorrectSafe);
}

#[test]
fn batteries_witnesses_on_random_yes_instances() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let mut checked = 0;
    while checked < 25 {
        let b = random_batteries(&mut rng, 3, 3);
        let BatteriesAnswer::Yes(p) = batteries_brute_force(&b) else { continue };
        let (g, f) = construct_batteries_witness(&b, &p).unwrap();
        assert!(validate(&g.graph, &f).is_valid());
        let layouts = witness_layouts(&b, &p).unwrap();
        assert!(layouts.iter().all(|row| row.iter().filter(|l| l.mode == WireMode::BothInside).count() == 1));
        if checked < 6 {
            assert!(distance_approximation(&g.graph, &f).unwrap().a_f <= 234);
        }
        checked += 1;
    }
}

/// Extends an embedding fixed on some vertices to all of `g` by backtracking, always
/// branching on the unplaced vertex with the fewest candidate cells among those with
/// a placed neighbour; `None` when the node budget runs out.
fn extend_fixed(g: &Graph, fixed: &[Option<Cell>], budget: &mut u64) -> Option<bool> {
    struct Search<'a> {
        g: &'a Graph,
        pos: Vec<Option<Cell>>,
        used: HashSet<Cell>,
        left: usize,
    }
    impl Search<'_> {
        fn candidates(&self, v: usize) -> Vec<Cell> {
            let anchor = self.g.neighbors(v).iter().find_map(|&w| self.pos[w]).expect("has a placed neighbour");
            [(-1, 0), (1, 0), (0, -1), (0, 1)]
                .into_iter()
                .map(|(dr, dc)| (anchor.0 + dr, anchor.1 + dc))
                .filter(|cell| !self.used.contains(cell))
                .filter(|cell| {
                    self.g.neighbors(v).iter().all(|&w| self.pos[w].map_or(true, |c| (c.0 - cell.0).abs() + (c.1 - cell.1).abs() == 1))
                })
                .collect()
        }
        fn go(&mut self, budget: &mut u64) -> Option<bool> {
            if self.left == 0 {
                return Some(true);
            }
            if *budget == 0 {
                return None;
            }
            *budget -= 1;
            let mut best: Option<(usize, Vec<Cell>)> = None;
            for v in 0..self.g.n() {
                if self.pos[v].is_some() || !self.g.neighbors(v).iter().any(|&w| self.pos[w].is_some()) {
                    continue;
                }
                let cands = self.candidates(v);
                if best.as_ref().map_or(true, |b| cands.len() < b.1.len()) {
                    let done = cands.len() <= 1;
                    best = Some((v, cands));
                    if done {
                        break;
                    }
                }
            }
            let (v, cands) = best.expect("connected to the fixed part");
            for cell in cands {
                self.pos[v] = Some(cell);
                self.used.insert(cell);
                self.left -= 1;
                let found = self.go(budget)?;
                if found {
                    return Some(true);
                }
                self.left += 1;
                self.used.remove(&cell);
                self.pos[v] = None;
            }
            Some(false)
        }
    }
    let mut s = Search {
        g,
        pos: fixed.to_vec(),
        used: fixed.iter().flatten().copied().collect(),
        left: fixed.iter().filter(|c| c.is_none()).count(),
    };
    s.go(budget)
}

/// With the rigid skeleton pinned to its canonical cells, `G_B` embeds exactly when
/// the Batteries instance is a yes-instance.
#[test]
fn gadget_graph_is_embeddable_exactly_for_yes_instances() {
    let mut instances: Vec<BatteriesInstance> = Vec::new();
    let pairs = [(false, false), (false, true), (true, false), (true, true)];
    for &a in &pairs {
        instances.push(BatteriesInstance::new(vec![vec![a]]).unwrap());
        for &b in &pairs {
            instances.push(BatteriesInstance::new(vec![vec![a, b]]).unwrap());
            instances.push(BatteriesInstance::new(vec![vec![a], vec![b]]).unwrap());
        }
    }
    instances.push(figure_batteries());
    for b in instances {
        let g = reduce_batteries_to_grid(&b).unwrap();
        let fixed: Vec<Option<Cell>> = g.labels.iter().map(|l| parse_skeleton_label(l)).collect();
        let mut budget = 2_000_000;
        let embeddable = extend_fixed(&g.graph, &fixed, &mut budget).expect("search finishes");
        let yes = matches!(batteries_brute_force(&b), BatteriesAnswer::Yes(_));
        assert_eq!(embeddable, yes, "{:?}", b.cells);
    }
}

#[test]
fn three_partition_reduction() {
    let pg = reduce_3partition(&[5, 5, 5], true).unwrap();
    assert_eq!(pg.bound, 15 + 3 * 15);
    assert_eq!(pg.weights, vec![20, 20, 20]);
    assert_eq!((pg.k, pg.r), (3, 64));
    assert_eq!(pg.graph.n(), 2 * 64 + 60);
    let container = pg.graph.induced_subgraph(&(0..128).collect::<Vec<_>>());
    assert!(container.is_connected());
    assert_eq!(container.degree(pg.c(1, 2)), 4);
    assert_eq!(container.degree(pg.c(1, 63)), 4);
    assert_eq!(container.edge_count(), 63 + 62 + 61 + 2);
    let f = construct_3partition_witness(&pg, &[[0, 1, 2]]).unwrap();
    assert!(validate(&pg.graph, &f).is_valid());
    assert!(reduce_3partition(&[1, 2, 3, 4, 5, 6], true).is_err());
    assert!(reduce_3partition(&[1, 2], true).is_err());
    assert!(reduce_3partition(&[2, 3, 4], false).is_err());
    let two = reduce_3partition(&[3, 4, 5, 3, 4, 5], true).unwrap();
    assert!(construct_3partition_witness(&two, &[[0, 1, 3], [2, 4, 5]]).is_err());
    assert!(construct_3partition_witness(&two, &[[0, 1, 2], [0, 4, 5]]).is_err());
    assert!(construct_3partition_witness(&two, &[[0, 1, 2], [3, 4, 5]]).is_ok());
}

#[test]
fn three_partition_random_witnesses() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..40 {
        let m = rng.gen_range(1..=3);
        let mut w: Vec<u64> = Vec::new();
        for _ in 0..m {
            let (a, b) = (rng.gen_range(1..=6), rng.gen_range(1..=6));
            w.extend([a, b, 14 - a - b]);
        }
        let partition = three_partition_brute_force(&w).expect("built as a yes-instance");
        let pg = reduce_3partition(&w, true).unwrap();
        let f = construct_3partition_witness(&pg, &partition).unwrap();
        assert!(validate(&pg.graph, &f).is_valid());
        assert_eq!((f.k, f.r), (3, m * (pg.bound as usize + 4)));
    }
    assert!(three_partition_brute_force(&[3, 3, 3, 3, 3, 5]).is_none());
}

#[test]
fn three_partition_agrees_with_exact_search_when_small() {
    let pg = reduce_3partition(&[3, 3, 3], false).unwrap();
    assert_eq!((pg.k, pg.r), (3, 13));
    let yes = brute_force_embed(&pg.graph, 3, 13, 5_000_000);
    assert_eq!(yes.answer, Answer::Yes);
    let no = brute_force_embed(&pg.graph, 3, 12, 5_000_000);
    assert_eq!(no.answer, Answer::No);
}

fn figure_nae() -> CnfFormula {
    CnfFormula::new(3, vec![vec![-1, -2, -3], vec![-1, 2, -3]], true).unwrap()
}

#[test]
fn naesat_structure() {
    let pi = figure_nae();
    let g = reduce_naesat(&pi).unwrap();
    assert!(g.graph.is_tree());
    assert!(g.graph.max_degree() <= 4);
    assert_eq!(grid_necessary_filter(&g.graph), FilterVerdict::Pass);
    // Odd leaves where the literal is absent, even leaves for variables 1 and 2.
    let expected = [
        ((0, false), 8),
        ((0, true), 8),
        ((1, false), 4),
        ((1, true), 2),
        ((2, false), 3),
        ((2, true), 3),
        ((3, false), 2),
        ((3, true), 0),
        ((4, false), 8),
        ((4, true), 8),
    ];
    for ((i, bar), leaves) in expected {
        assert_eq!(g.leaf_count(i, bar), leaves, "caterpillar {i} {bar}");
    }
    let base = 2 * 3 + 3;
    let mains = 2 * 5 * 5;
    let leaves: usize = expected.iter().map(|e| e.1).sum();
    assert_eq!(g.graph.n(), base + mains + leaves + 10);

    let single = reduce_naesat(&CnfFormula::new(1, vec![vec![1]], true).unwrap()).unwrap();
    assert_eq!(single.leaf_count(1, false), 0);
    assert_eq!(single.leaf_count(1, true), 1);
    assert_eq!(single.leaf_count(0, false), 4);
    assert_eq!(single.graph.n(), 5 + 6 * 3 + (0 + 1 + 4 * 4) + 10);
    assert!(single.graph.is_tree());
}

#[test]
fn naesat_witnesses() {
    let pi = figure_nae();
    let g = reduce_naesat(&pi).unwrap();
    let f = construct_naesat_witness(&g, &pi, &[true, false, false]).unwrap();
    assert!(validate(&g.graph, &f).is_valid());
    assert_eq!(construct_naesat_witness(&g, &pi, &[true, true, true]).unwrap_err(), crate::GridError::NotNaeSatisfying);
    let pos = CnfFormula::new(3, vec![vec![1, 2, 3]], true).unwrap();
    let gp = reduce_naesat(&pos).unwrap();
    assert!(validate(&gp.graph, &construct_naesat_witness(&gp, &pos, &[true, false, true]).unwrap()).is_valid());
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..60 {
        let n = rng.gen_range(1..=4);
        let pi = random_formula(&mut rng, n, 3, true);
        let g = reduce_naesat(&pi).unwrap();
        assert!(g.graph.is_tree());
        for mask in 0..1u32 << n {
            let alpha: Vec<bool> = (0..n).map(|j| mask >> j & 1 == 1).collect();
            let out = construct_naesat_witness(&g, &pi, &alpha);
            if pi.nae_satisfied_by(&alpha) {
                assert!(validate(&g.graph, &out.unwrap()).is_valid());
            } else {
                assert!(out.is_err());
            }
        }
    }
}

#[test]
fn strip_packing_examples() {
    let yes = strip_pack(&[(2, 2), (2, 2)], 2, 4, 1_000_000).unwrap();
    assert_eq!(yes.result.answer, Answer::Yes);
    assert_eq!(yes.scale, 1);
    let places = yes.placements.unwrap();
    assert_eq!(places.len(), 2);
    let no = strip_pack(&[(2, 2), (2, 3)], 2, 4, 1_000_000).unwrap();
    assert_eq!(no.result.answer, Answer::No);
    let thin = strip_pack(&[(1, 2), (1, 2)], 1, 4, 1_000_000).unwrap();
    assert_eq!(thin.scale, 2);
    assert_eq!(thin.result.answer, Answer::Yes);
    let thin_places = thin.placements.unwrap();
    assert!(thin_places.iter().all(|p| p.row == 1 && p.height == 1 && p.width == 2));
    assert!(strip_pack(&[(0, 2)], 1, 4, 10).is_err());
}

fn check_packing(rects: &[(usize, usize)], k: usize, w: usize, places: &[oracle::RectPlacement]) {
    let mut used = HashSet::new();
    for (p, &(h, wd)) in places.iter().zip(rects) {
        assert!((p.height, p.width) == (h, wd) || (p.height, p.width) == (wd, h));
        assert!(p.row >= 1 && p.col >= 1 && p.row + p.height - 1 <= k && p.col + p.width - 1 <= w);
        for r in p.row..p.row + p.height {
            for c in p.col..p.col + p.width {
                assert!(used.insert((r, c)));
            }
        }
    }
}

use crate::oracle;

#[test]
fn strip_packing_matches_direct_packer() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..12 {
        let count = rng.gen_range(1..=3);
        let rects: Vec<(usize, usize)> = (0..count).map(|_| (rng.gen_range(1..=3), rng.gen_range(1..=3))).collect();
        let k = rng.gen_range(1..=3);
        let w = rng.gen_range(1..=5);
        let direct = pack_rectangles(&rects, k, w, 10_000_000).expect("small");
        let via = strip_pack(&rects, k, w, 50_000_000).unwrap();
        assert_ne!(via.result.answer, Answer::Unknown);
        assert_eq!(via.result.answer == Answer::Yes, direct.is_some(), "{rects:?} in {k}x{w}");
        if let Some(places) = &via.placements {
            check_packing(&rects, k, w, places);
        }
        if let Some(places) = &direct {
            check_packing(&rects, k, w, places);
        }
    }
}
