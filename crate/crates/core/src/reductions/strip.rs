//! Strip packing through grid embedding: every rectangle becomes a solid rectangular
//! grid graph and the disjoint union is embedded into the strip.

use std::time::Instant;

use crate::embedding::GridEmbedding;
use crate::error::{GridError, Result};
use crate::graph::{connected_components, Graph};
use crate::oracle::{Answer, RectPlacement, SolveResult, SolveStats};
use crate::snapshot::solve_mcc_k;

/// Output of [`strip_pack`].
#[derive(Debug, Clone)]
pub struct StripPacking {
    pub result: SolveResult,
    /// 2 when some rectangle has a unit side and every dimension was doubled, else 1.
    pub scale: usize,
    /// One placement per input rectangle (in input units) on yes answers.
    pub placements: Option<Vec<RectPlacement>>,
    /// The graph handed to the embedding solver.
    pub graph: Graph,
}

/// Solid `h x w` grid graphs, one per rectangle, in input order with row-major ids.
pub fn rectangles_graph(rects: &[(usize, usize)]) -> Graph {
    let n: usize = rects.iter().map(|&(h, w)| h * w).sum();
    let mut edges = Vec::new();
    let mut base = 0;
    for &(h, w) in rects {
        for r in 0..h {
            for c in 0..w {
                let v = base + r * w + c;
                if c + 1 < w {
                    edges.push((v, v + 1));
                }
                if r + 1 < h {
                    edges.push((v, v + w));
                }
            }
        }
        base += h * w;
    }
    Graph::from_edges(n, &edges).expect("rectangle edges are well formed")
}

/// Decides whether the rectangles fit into a `k x strip` box (rotations allowed).
///
/// Unit sides make a rectangle flexible as a graph, so in that case all dimensions
/// and the strip are doubled first. A yes witness is decoded into placements; after
/// doubling the placements are compacted towards the top-left corner, which lands
/// every rectangle on even coordinates, and then halved.
pub fn strip_pack(rects: &[(usize, usize)], k: usize, strip: usize, budget: u64) -> Result<StripPacking> {
    if rects.iter().any(|&(h, w)| h == 0 || w == 0) {
        return Err(GridError::InvalidInstance("rectangle dimensions must be positive".into()));
    }
    let started = Instant::now();
    let scale = if rects.iter().any(|&(h, w)| h == 1 || w == 1) { 2 } else { 1 };
    let scaled: Vec<(usize, usize)> = rects.iter().map(|&(h, w)| (h * scale, w * scale)).collect();
    let graph = rectangles_graph(&scaled);
    if graph.n() == 0 {
        let f = GridEmbedding::new(k * scale, strip * scale, 0);
        let stats = SolveStats { nodes: 0, elapsed: started.elapsed() };
        return Ok(StripPacking { result: SolveResult::yes(f, stats), scale, placements: Some(Vec::new()), graph });
    }
    let result = solve_mcc_k(&graph, k * scale, strip * scale, budget);
    let placements = match (&result.answer, &result.witness) {
        (Answer::Yes, Some(f)) => Some(decode(&graph, &scaled, f, scale)?),
        _ => None,
    };
    Ok(StripPacking { result, scale, placements, graph })
}

/// Bounding boxes of the rectangle components, compacted and divided by `scale`.
fn decode(graph: &Graph, scaled: &[(usize, usize)], f: &GridEmbedding, scale: usize) -> Result<Vec<RectPlacement>> {
    let mut boxes: Vec<(i64, i64, i64, i64)> = Vec::with_capacity(scaled.len());
    let mut comps = connected_components(graph);
    comps.sort_by_key(|c| c.iter().copied().min());
    for comp in &comps {
        let cells: Vec<_> = comp.iter().map(|&v| f.get(v).ok_or(GridError::UnmappedVertex(v))).collect::<Result<_>>()?;
        let r0 = cells.iter().map(|c| c.0).min().expect("nonempty");
        let r1 = cells.iter().map(|c| c.0).max().expect("nonempty");
        let c0 = cells.iter().map(|c| c.1).min().expect("nonempty");
        let c1 = cells.iter().map(|c| c.1).max().expect("nonempty");
        boxes.push((r0 - 1, c0 - 1, r1 - r0 + 1, c1 - c0 + 1));
    }
    if scale > 1 {
        compact(&mut boxes);
    }
    let s = scale as i64;
    boxes
        .into_iter()
        .map(|(r, c, h, w)| {
            if r % s != 0 || c % s != 0 {
                return Err(GridError::InvalidInstance("compacted packing is not aligned".into()));
            }
            Ok(RectPlacement { row: (r / s) as usize + 1, col: (c / s) as usize + 1, height: (h / s) as usize, width: (w / s) as usize })
        })
        .collect()
}

/// Slides boxes `(row, col, height, width)` up and left until none can move.
fn compact(boxes: &mut [(i64, i64, i64, i64)]) {
    let overlap = |a0: i64, a1: i64, b0: i64, b1: i64| a0 < b1 && b0 < a1;
    loop {
        let mut moved = false;
        for i in 0..boxes.len() {
            let (r, c, h, w) = boxes[i];
            let top = (0..boxes.len())
                .filter(|&o| o != i && overlap(c, c + w, boxes[o].1, boxes[o].1 + boxes[o].3) && boxes[o].0 + boxes[o].2 <= r)
                .map(|o| boxes[o].0 + boxes[o].2)
                .max()
                .unwrap_or(0);
            if top < r {
                boxes[i].0 = top;
                moved = true;
            }
            let r = boxes[i].0;
            let left = (0..boxes.len())
                .filter(|&o| o != i && overlap(r, r + h, boxes[o].0, boxes[o].0 + boxes[o].2) && boxes[o].1 + boxes[o].3 <= c)
                .map(|o| boxes[o].1 + boxes[o].3)
                .max()
                .unwrap_or(0);
            if left < c {
                boxes[i].1 = left;
                moved = true;
            }
        }
        if !moved {
            return;
        }
    }
}
