//! Text formats read and written by the command line tool.
//!
//! * Graphs: `gridbed-graph v1`, then `n <count>`, then one `<u> <v>` line per edge.
//!   Optional `label <v> <name>` lines attach names to vertices.
//! * Embeddings: `gridbed-embedding v1`, `n <count>`, `grid <k> <r>`, then one
//!   `<vertex> <row> <col>` line per mapped vertex (1-based coordinates).
//! * Batteries: `gridbed-batteries v1`, `r <rows> c <cols>`, then row-major `<x1> <x2>`
//!   pairs of bits.
//! * 3-Partition: `gridbed-3partition v1`, `m <m>`, then `3m` positive integers.
//! * Placements: `gridbed-placement v1`, then one `+` or `-` per column.
//!
//! Everywhere `#` starts a comment and blank lines are ignored.

use std::collections::{BTreeMap, HashSet};
use std::fmt::Write as _;

use anyhow::{anyhow, bail, ensure, Context, Result};
use gridbed_core::reductions::{BatteriesInstance, Placement, Sign};
use gridbed_core::{Graph, GridEmbedding};

pub const GRAPH_HEADER: &str = "gridbed-graph v1";
pub const EMBEDDING_HEADER: &str = "gridbed-embedding v1";
pub const BATTERIES_HEADER: &str = "gridbed-batteries v1";
pub const PARTITION_HEADER: &str = "gridbed-3partition v1";
pub const PLACEMENT_HEADER: &str = "gridbed-placement v1";

/// A graph together with the optional vertex names found in its file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledGraph {
    pub graph: Graph,
    pub labels: BTreeMap<usize, String>,
}

impl LabeledGraph {
    pub fn unlabeled(graph: Graph) -> Self {
        LabeledGraph { graph, labels: BTreeMap::new() }
    }

    /// Names every vertex; `labels[v]` belongs to vertex `v`.
    pub fn with_labels(graph: Graph, labels: &[String]) -> Self {
        LabeledGraph { graph, labels: labels.iter().cloned().enumerate().collect() }
    }
}

/// Non-comment lines with their 1-based line numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, line)| {
        let body = line.split('#').next().unwrap_or("").trim();
        (!body.is_empty()).then_some((i + 1, body))
    })
}

fn expect_header<'a>(lines: &mut impl Iterator<Item = (usize, &'a str)>, header: &str) -> Result<()> {
    match lines.next() {
        Some((_, line)) if line == header => Ok(()),
        Some((no, line)) => bail!("line {no}: expected header \"{header}\", found \"{line}\""),
        None => bail!("empty input: expected header \"{header}\""),
    }
}

fn number<T: std::str::FromStr>(token: &str, no: usize, what: &str) -> Result<T> {
    token.parse().map_err(|_| anyhow!("line {no}: {what} \"{token}\" is not a valid number"))
}

/// Reads `<keyword> <value>` pairs from one line, in order.
fn keyed<const N: usize>(line: (usize, &str), keys: [&str; N]) -> Result<[usize; N]> {
    let (no, body) = line;
    let tokens: Vec<&str> = body.split_whitespace().collect();
    ensure!(tokens.len() == 2 * N, "line {no}: expected \"{}\"", keys.map(|k| format!("{k} <{k}>")).join(" "));
    let mut out = [0; N];
    for (i, key) in keys.iter().enumerate() {
        ensure!(tokens[2 * i] == *key, "line {no}: expected keyword \"{key}\", found \"{}\"", tokens[2 * i]);
        out[i] = number(tokens[2 * i + 1], no, key)?;
    }
    Ok(out)
}

pub fn parse_graph(text: &str) -> Result<LabeledGraph> {
    let mut lines = content_lines(text);
    expect_header(&mut lines, GRAPH_HEADER)?;
    let count = lines.next().ok_or_else(|| anyhow!("missing \"n <count>\" line"))?;
    let [n] = keyed(count, ["n"])?;
    let mut graph = Graph::new(n);
    let mut labels = BTreeMap::new();
    for (no, body) in lines {
        let tokens: Vec<&str> = body.split_whitespace().collect();
        if tokens[0] == "label" {
            ensure!(tokens.len() == 3, "line {no}: expected \"label <vertex> <name>\"");
            let v: usize = number(tokens[1], no, "vertex")?;
            ensure!(v < n, "line {no}: vertex {v} out of range for n = {n}");
            ensure!(labels.insert(v, tokens[2].to_string()).is_none(), "line {no}: vertex {v} is labeled twice");
            continue;
        }
        ensure!(tokens.len() == 2, "line {no}: expected an edge \"<u> <v>\"");
        let u: usize = number(tokens[0], no, "vertex")?;
        let v: usize = number(tokens[1], no, "vertex")?;
        graph.add_edge(u, v).with_context(|| format!("line {no}"))?;
    }
    Ok(LabeledGraph { graph, labels })
}

pub fn serialize_graph(g: &LabeledGraph) -> String {
    let mut out = format!("{GRAPH_HEADER}\nn {}\n", g.graph.n());
    for (v, name) in &g.labels {
        writeln!(out, "label {v} {name}").expect("writing to a string");
    }
    for &(u, v) in g.graph.edges() {
        writeln!(out, "{u} {v}").expect("writing to a string");
    }
    out
}

pub fn parse_embedding(text: &str) -> Result<GridEmbedding> {
    let mut lines = content_lines(text);
    expect_header(&mut lines, EMBEDDING_HEADER)?;
    let [n] = keyed(lines.next().ok_or_else(|| anyhow!("missing \"n <count>\" line"))?, ["n"])?;
    let grid = lines.next().ok_or_else(|| anyhow!("missing \"grid <k> <r>\" line"))?;
    let (no, body) = grid;
    let tokens: Vec<&str> = body.split_whitespace().collect();
    ensure!(tokens.len() == 3 && tokens[0] == "grid", "line {no}: expected \"grid <k> <r>\"");
    let k: usize = number(tokens[1], no, "k")?;
    let r: usize = number(tokens[2], no, "r")?;
    let mut f = GridEmbedding::new(k, r, n);
    let mut cells = HashSet::new();
    for (no, body) in lines {
        let tokens: Vec<&str> = body.split_whitespace().collect();
        ensure!(tokens.len() == 3, "line {no}: expected \"<vertex> <row> <col>\"");
        let v: usize = number(tokens[0], no, "vertex")?;
        let row: i64 = number(tokens[1], no, "row")?;
        let col: i64 = number(tokens[2], no, "col")?;
        ensure!(v < n, "line {no}: vertex {v} out of range for n = {n}");
        ensure!(!f.is_mapped(v), "line {no}: vertex {v} is placed twice");
        ensure!((1..=k as i64).contains(&row) && (1..=r as i64).contains(&col), "line {no}: cell ({row}, {col}) lies outside the {k} x {r} grid");
        ensure!(cells.insert((row, col)), "line {no}: cell ({row}, {col}) is used twice");
        f.set(v, (row, col));
    }
    Ok(f)
}

pub fn serialize_embedding(f: &GridEmbedding) -> String {
    let mut out = format!("{EMBEDDING_HEADER}\nn {}\ngrid {} {}\n", f.universe(), f.k, f.r);
    for v in f.vertices() {
        let (row, col) = f.get(v).expect("listed vertices are mapped");
        writeln!(out, "{v} {row} {col}").expect("writing to a string");
    }
    out
}

fn bit(token: &str, no: usize) -> Result<bool> {
    match token {
        "0" => Ok(false),
        "1" => Ok(true),
        _ => bail!("line {no}: expected a bit, found \"{token}\""),
    }
}

pub fn parse_batteries(text: &str) -> Result<BatteriesInstance> {
    let mut lines = content_lines(text);
    expect_header(&mut lines, BATTERIES_HEADER)?;
    let [rows, cols] = keyed(lines.next().ok_or_else(|| anyhow!("missing \"r <rows> c <cols>\" line"))?, ["r", "c"])?;
    let bits = lines
        .flat_map(|(no, body)| body.split_whitespace().map(move |t| (no, t)))
        .map(|(no, t)| bit(t, no))
        .collect::<Result<Vec<bool>>>()?;
    ensure!(bits.len() == 2 * rows * cols, "expected {} bits for a {rows} x {cols} instance, found {}", 2 * rows * cols, bits.len());
    let cells = bits.chunks(2 * cols).map(|row| row.chunks(2).map(|p| (p[0], p[1])).collect()).collect();
    Ok(BatteriesInstance::new(cells)?)
}

pub fn serialize_batteries(b: &BatteriesInstance) -> String {
    let mut out = format!("{BATTERIES_HEADER}\nr {} c {}\n", b.rows, b.cols);
    for i in 0..b.rows {
        let row: Vec<String> = (0..b.cols)
            .map(|j| {
                let (x1, x2) = b.cell(i, j);
                format!("{} {}", u8::from(x1), u8::from(x2))
            })
            .collect();
        writeln!(out, "{}", row.join("  ")).expect("writing to a string");
    }
    out
}

pub fn parse_3partition(text: &str) -> Result<Vec<u64>> {
    let mut lines = content_lines(text);
    expect_header(&mut lines, PARTITION_HEADER)?;
    let [m] = keyed(lines.next().ok_or_else(|| anyhow!("missing \"m <m>\" line"))?, ["m"])?;
    let weights = lines
        .flat_map(|(no, body)| body.split_whitespace().map(move |t| (no, t)))
        .map(|(no, t)| number::<u64>(t, no, "number"))
        .collect::<Result<Vec<u64>>>()?;
    ensure!(weights.len() == 3 * m, "expected {} numbers for m = {m}, found {}", 3 * m, weights.len());
    Ok(weights)
}

pub fn serialize_3partition(weights: &[u64]) -> String {
    let body: Vec<String> = weights.iter().map(u64::to_string).collect();
    format!("{PARTITION_HEADER}\nm {}\n{}\n", weights.len() / 3, body.join(" "))
}

/// Writes the sign of every column of a column-uniform placement.
pub fn serialize_placement(p: &Placement) -> String {
    let signs: Vec<String> = p.signs.first().map(|row| row.iter().map(Sign::to_string).collect()).unwrap_or_default();
    format!("{PLACEMENT_HEADER}\n{}\n", signs.join(" "))
}

pub fn parse_placement(text: &str, rows: usize) -> Result<Placement> {
    let mut lines = content_lines(text);
    expect_header(&mut lines, PLACEMENT_HEADER)?;
    let columns = lines
        .flat_map(|(no, body)| body.split_whitespace().map(move |t| (no, t)))
        .map(|(no, t)| match t {
            "+" => Ok(Sign::Plus),
            "-" => Ok(Sign::Minus),
            _ => bail!("line {no}: expected + or -, found \"{t}\""),
        })
        .collect::<Result<Vec<Sign>>>()?;
    Ok(Placement::from_columns(rows, &columns))
}

/// Parses `HxW` rectangle lists such as `2x3,1x2`.
pub fn parse_rectangles(spec: &str) -> Result<Vec<(usize, usize)>> {
    spec.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| {
            let (h, w) = s.trim().split_once('x').ok_or_else(|| anyhow!("rectangle \"{s}\" is not of the form HxW"))?;
            let h: usize = h.parse().with_context(|| format!("rectangle \"{s}\""))?;
            let w: usize = w.parse().with_context(|| format!("rectangle \"{s}\""))?;
            ensure!(h > 0 && w > 0, "rectangle \"{s}\" has a zero side");
            Ok((h, w))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use gridbed_core::embedding::validate;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn parses_a_single_edge() {
        let g = parse_graph("gridbed-graph v1\nn 2\n0 1").unwrap();
        assert_eq!(g.graph.n(), 2);
        assert_eq!(g.graph.edges(), &[(0, 1)]);
    }

    #[test]
    fn graph_errors_carry_line_numbers() {
        let dup = parse_graph("gridbed-graph v1\nn 3\n0 1\n# comment\n1 0\n").unwrap_err();
        assert!(format!("{dup:#}").contains("line 5"), "{dup:#}");
        let bad = parse_graph("gridbed-graph v1\nn 3\n0 x\n").unwrap_err();
        assert!(format!("{bad:#}").contains("line 3"));
        assert!(parse_graph("gridbed-graph v2\nn 1\n").is_err());
        assert!(parse_graph("gridbed-graph v1\nn 2\n0 5\n").is_err());
    }

    #[test]
    fn graph_round_trip_on_random_graphs() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let n = rng.gen_range(0..12);
            let mut g = Graph::new(n);
            for u in 0..n {
                for v in u + 1..n {
                    if rng.gen_bool(0.3) {
                        g.add_edge(u, v).unwrap();
                    }
                }
            }
            let mut lg = LabeledGraph::unlabeled(g);
            if n > 0 && rng.gen_bool(0.5) {
                lg.labels.insert(rng.gen_range(0..n), "name".into());
            }
            let text = serialize_graph(&lg);
            assert_eq!(parse_graph(&text).unwrap(), lg);
            assert_eq!(serialize_graph(&parse_graph(&text).unwrap()), text);
        }
    }

    #[test]
    fn embedding_examples() {
        let f = parse_embedding("gridbed-embedding v1\nn 2\ngrid 1 2\n0 1 1\n1 1 2\n").unwrap();
        let p2 = Graph::from_edges(2, &[(0, 1)]).unwrap();
        assert!(validate(&p2, &f).is_valid());
        assert!(parse_embedding("gridbed-embedding v1\nn 2\ngrid 1 2\n0 1 1\n1 1 1\n").is_err());
        assert!(parse_embedding("gridbed-embedding v1\nn 2\ngrid 1 2\n0 1 1\n1 2 1\n").is_err());
        assert!(parse_embedding("gridbed-embedding v1\nn 2\ngrid 1 2\n0 1 1\n0 1 2\n").is_err());
    }

    #[test]
    fn embedding_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let (k, r) = (rng.gen_range(1..5), rng.gen_range(1..7));
            let n = rng.gen_range(0..=k * r);
            let mut cells: Vec<(i64, i64)> = (1..=k as i64).flat_map(|i| (1..=r as i64).map(move |j| (i, j))).collect();
            for i in (1..cells.len()).rev() {
                cells.swap(i, rng.gen_range(0..=i));
            }
            let mut f = GridEmbedding::new(k, r, n + 1);
            for v in 0..n {
                f.set(v, cells[v]);
            }
            let text = serialize_embedding(&f);
            assert_eq!(parse_embedding(&text).unwrap(), f);
        }
    }

    #[test]
    fn batteries_partition_and_placement_round_trips() {
        let b = BatteriesInstance::new(vec![vec![(true, false), (false, true)], vec![(false, true), (false, true)]]).unwrap();
        assert_eq!(parse_batteries(&serialize_batteries(&b)).unwrap(), b);
        assert!(parse_batteries("gridbed-batteries v1\nr 1 c 1\n1\n").is_err());
        assert!(parse_batteries("gridbed-batteries v1\nr 1 c 1\n1 2\n").is_err());
        let w = vec![1, 2, 3, 4, 5, 6];
        assert_eq!(parse_3partition(&serialize_3partition(&w)).unwrap(), w);
        assert!(parse_3partition("gridbed-3partition v1\nm 1\n1 2\n").is_err());
        let p = Placement::from_columns(2, &[Sign::Minus, Sign::Plus]);
        assert_eq!(parse_placement(&serialize_placement(&p), 2).unwrap(), p);
    }

    #[test]
    fn rectangle_lists() {
        assert_eq!(parse_rectangles("2x3, 1x1").unwrap(), vec![(2, 3), (1, 1)]);
        assert!(parse_rectangles("2x").is_err());
        assert!(parse_rectangles("0x2").is_err());
    }
}
