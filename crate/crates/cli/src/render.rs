//! ASCII and SVG drawings of validated embeddings.

use std::fmt::Write as _;

use anyhow::{bail, Result};
use gridbed_core::embedding::{validate, Validity};
use gridbed_core::{Graph, GridEmbedding};

/// Output format of [`render`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RenderFormat {
    Ascii,
    Svg,
}

/// Pixels between neighbouring lattice points in SVG output.
const UNIT: i64 = 24;
/// Blank border around the lattice in SVG output.
const MARGIN: i64 = 12;

pub fn render(g: &Graph, f: &GridEmbedding, format: RenderFormat) -> Result<String> {
    if let Validity::Invalid(reason) = validate(g, f) {
        bail!("cannot render an invalid embedding: {reason}");
    }
    Ok(match format {
        RenderFormat::Ascii => ascii(g, f),
        RenderFormat::Svg => svg(g, f),
    })
}

/// `+` for vertices and `-` or `|` for edges on a `(2k-1) x (2r-1)` canvas; trailing
/// blanks are trimmed from every line.
fn ascii(g: &Graph, f: &GridEmbedding) -> String {
    let (h, w) = ((2 * f.k).saturating_sub(1), (2 * f.r).saturating_sub(1));
    let mut canvas = vec![vec![' '; w]; h];
    let at = |v: usize| {
        let (row, col) = f.get(v).expect("validated");
        (2 * (row - 1) as usize, 2 * (col - 1) as usize)
    };
    for v in 0..g.n() {
        let (y, x) = at(v);
        canvas[y][x] = '+';
    }
    for &(u, v) in g.edges() {
        let ((y1, x1), (y2, x2)) = (at(u), at(v));
        canvas[(y1 + y2) / 2][(x1 + x2) / 2] = if y1 == y2 { '-' } else { '|' };
    }
    let mut out = String::new();
    for line in canvas {
        let line: String = line.into_iter().collect();
        out.push_str(line.trim_end());
        out.push('\n');
    }
    out
}

/// Lattice points as a light grid path, edges as `<line>` elements and vertices as
/// `<circle>` elements, all in integer coordinates.
fn svg(g: &Graph, f: &GridEmbedding) -> String {
    let px = |i: i64| MARGIN + (i - 1) * UNIT;
    let (width, height) = (2 * MARGIN + (f.r as i64 - 1).max(0) * UNIT, 2 * MARGIN + (f.k as i64 - 1).max(0) * UNIT);
    let mut out = String::new();
    let mut emit = |s: String| {
        out.push_str(&s);
        out.push('\n');
    };
    emit(format!(r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">"#));
    let mut lattice = String::new();
    for row in 1..=f.k as i64 {
        write!(lattice, "M{} {}H{}", px(1), px(row), px(f.r as i64)).expect("writing to a string");
    }
    for col in 1..=f.r as i64 {
        write!(lattice, "M{} {}V{}", px(col), px(1), px(f.k as i64)).expect("writing to a string");
    }
    emit(format!(r##"<path d="{lattice}" stroke="#dddddd" stroke-width="1" fill="none"/>"##));
    for &(u, v) in g.edges() {
        let ((r1, c1), (r2, c2)) = (f.get(u).expect("validated"), f.get(v).expect("validated"));
        emit(format!(r##"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="#222222" stroke-width="3"/>"##, px(c1), px(r1), px(c2), px(r2)));
    }
    for v in 0..g.n() {
        let (row, col) = f.get(v).expect("validated");
        emit(format!(r##"<circle cx="{}" cy="{}" r="5" fill="#1f77b4"><title>{v}</title></circle>"##, px(col), px(row)));
    }
    emit("</svg>".to_string());
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn horizontal_path() {
        let p3 = Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        let f = GridEmbedding::from_cells(1, 3, &[(1, 1), (1, 2), (1, 3)]);
        assert_eq!(render(&p3, &f, RenderFormat::Ascii).unwrap(), "+-+-+\n");
    }

    #[test]
    fn square_block() {
        let c4 = Graph::from_edges(4, &[(0, 1), (1, 3), (3, 2), (2, 0)]).unwrap();
        let f = GridEmbedding::from_cells(2, 2, &[(1, 1), (1, 2), (2, 1), (2, 2)]);
        let text = render(&c4, &f, RenderFormat::Ascii).unwrap();
        assert_eq!(text, "+-+\n| |\n+-+\n");
        assert_eq!(text.matches('+').count(), 4);
    }

    #[test]
    fn non_induced_edges_are_not_drawn() {
        let p4 = Graph::from_edges(4, &[(0, 1), (1, 3), (3, 2)]).unwrap();
        let f = GridEmbedding::from_cells(2, 2, &[(1, 1), (1, 2), (2, 1), (2, 2)]);
        assert_eq!(render(&p4, &f, RenderFormat::Ascii).unwrap(), "+-+\n  |\n+-+\n");
    }

    #[test]
    fn invalid_embeddings_are_rejected() {
        let p2 = Graph::from_edges(2, &[(0, 1)]).unwrap();
        let f = GridEmbedding::from_cells(2, 2, &[(1, 1), (2, 2)]);
        assert!(render(&p2, &f, RenderFormat::Svg).is_err());
    }

    #[test]
    fn svg_has_one_segment_per_edge_and_is_deterministic() {
        let g = Graph::from_edges(5, &[(0, 1), (1, 2), (2, 3), (3, 0), (2, 4)]).unwrap();
        let f = GridEmbedding::from_cells(3, 3, &[(1, 1), (1, 2), (2, 2), (2, 1), (3, 2)]);
        let a = render(&g, &f, RenderFormat::Svg).unwrap();
        assert_eq!(a, render(&g, &f, RenderFormat::Svg).unwrap());
        assert_eq!(a.matches("<line ").count(), g.edge_count());
        assert_eq!(a.matches("<circle ").count(), g.n());
    }
}
