//! CNF formulas, the Batteries problem, and the reduction from SAT to Batteries.

use std::fmt;

use crate::error::{GridError, Result};

/// A CNF formula over variables `1..=n`; literal `+j` is `x_j`, `-j` is its negation.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CnfFormula {
    pub n: usize,
    pub clauses: Vec<Vec<i32>>,
    /// Read the clauses in the not-all-equal sense.
    pub nae: bool,
}

impl CnfFormula {
    /// Checks that no clause is empty and every literal names a declared variable.
    pub fn new(n: usize, clauses: Vec<Vec<i32>>, nae: bool) -> Result<Self> {
        for (i, clause) in clauses.iter().enumerate() {
            if clause.is_empty() {
                return Err(GridError::InvalidInstance(format!("clause {} is empty", i + 1)));
            }
            for &lit in clause {
                if lit == 0 || lit.unsigned_abs() as usize > n {
                    return Err(GridError::InvalidInstance(format!("literal {lit} in clause {} is out of range", i + 1)));
                }
            }
        }
        Ok(CnfFormula { n, clauses, nae })
    }

    pub fn m(&self) -> usize {
        self.clauses.len()
    }

    /// True when clause `i` (0-based) contains the literal `lit`.
    pub fn contains(&self, i: usize, lit: i32) -> bool {
        self.clauses[i].contains(&lit)
    }

    fn literal_value(lit: i32, assignment: &[bool]) -> bool {
        let value = assignment[lit.unsigned_abs() as usize - 1];
        if lit > 0 {
            value
        } else {
            !value
        }
    }

    /// Every clause has a true literal. `assignment[j-1]` is the value of `x_j`.
    pub fn satisfied_by(&self, assignment: &[bool]) -> bool {
        self.clauses.iter().all(|c| c.iter().any(|&l| Self::literal_value(l, assignment)))
    }

    /// Every clause has both a true and a false literal.
    pub fn nae_satisfied_by(&self, assignment: &[bool]) -> bool {
        self.clauses.iter().all(|c| {
            c.iter().any(|&l| Self::literal_value(l, assignment)) && c.iter().any(|&l| !Self::literal_value(l, assignment))
        })
    }

    /// Satisfaction in the sense selected by the `nae` flag.
    pub fn accepts(&self, assignment: &[bool]) -> bool {
        if self.nae {
            self.nae_satisfied_by(assignment)
        } else {
            self.satisfied_by(assignment)
        }
    }

    /// First accepting assignment in binary counting order, `x_1` least significant.
    ///
    /// Returns `None` for unsatisfiable formulas. Intended for `n <= 24`.
    pub fn brute_force(&self) -> Option<Vec<bool>> {
        assert!(self.n <= 24, "brute force over {} variables", self.n);
        (0u32..1 << self.n).map(|mask| (0..self.n).map(|j| mask >> j & 1 == 1).collect::<Vec<_>>()).find(|a| self.accepts(a))
    }

    /// Parses DIMACS CNF: `c` comment lines, a `p cnf <n> <m>` header, and clauses
    /// terminated by `0` (possibly spanning lines).
    pub fn from_dimacs(text: &str, nae: bool) -> Result<Self> {
        let mut header: Option<(usize, usize)> = None;
        let mut clauses = Vec::new();
        let mut current = Vec::new();
        for (no, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('c') || line.starts_with('%') {
                continue;
            }
            let bad = |what: &str| GridError::InvalidInstance(format!("line {}: {what}", no + 1));
            if line.starts_with('p') {
                let parts: Vec<&str> = line.split_whitespace().collect();
                if parts.len() != 4 || parts[1] != "cnf" || header.is_some() {
                    return Err(bad("malformed problem line"));
                }
                let n = parts[2].parse().map_err(|_| bad("bad variable count"))?;
                let m = parts[3].parse().map_err(|_| bad("bad clause count"))?;
                header = Some((n, m));
                continue;
            }
            if header.is_none() {
                return Err(bad("clause before the problem line"));
            }
            for tok in line.split_whitespace() {
                let lit: i32 = tok.parse().map_err(|_| bad("bad literal"))?;
                if lit == 0 {
                    clauses.push(std::mem::take(&mut current));
                } else {
                    current.push(lit);
                }
            }
        }
        let (n, m) = header.ok_or_else(|| GridError::InvalidInstance("missing problem line".into()))?;
        if !current.is_empty() {
            clauses.push(current);
        }
        if clauses.len() != m {
            return Err(GridError::InvalidInstance(format!("header announces {m} clauses, found {}", clauses.len())));
        }
        CnfFormula::new(n, clauses, nae)
    }

    pub fn to_dimacs(&self) -> String {
        let mut out = format!("p cnf {} {}\n", self.n, self.m());
        for clause in &self.clauses {
            for lit in clause {
                out.push_str(&format!("{lit} "));
            }
            out.push_str("0\n");
        }
        out
    }
}

/// Orientation of one battery: `Plus` puts the positive side on top.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Plus,
    Minus,
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        })
    }
}

/// A matrix of batteries, each a pair `(x1, x2)` of positive and negative voltages.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BatteriesInstance {
    pub rows: usize,
    pub cols: usize,
    pub cells: Vec<Vec<(bool, bool)>>,
}

impl BatteriesInstance {
    pub fn new(cells: Vec<Vec<(bool, bool)>>) -> Result<Self> {
        let rows = cells.len();
        let cols = cells.first().map_or(0, Vec::len);
        if rows == 0 || cols == 0 {
            return Err(GridError::InvalidInstance("a batteries instance needs at least one cell".into()));
        }
        if cells.iter().any(|row| row.len() != cols) {
            return Err(GridError::InvalidInstance("rows of different lengths".into()));
        }
        Ok(BatteriesInstance { rows, cols, cells })
    }

    /// Voltage `(x1, x2)` of the battery at 0-based `(i, j)`.
    pub fn cell(&self, i: usize, j: usize) -> (bool, bool) {
        self.cells[i][j]
    }
}

/// An orientation for every battery.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Placement {
    pub signs: Vec<Vec<Sign>>,
}

impl Placement {
    /// Same sign in every row of each column.
    pub fn from_columns(rows: usize, columns: &[Sign]) -> Self {
        Placement { signs: vec![columns.to_vec(); rows] }
    }

    pub fn sign(&self, i: usize, j: usize) -> Sign {
        self.signs[i][j]
    }

    /// Voltage transmitted upward by the battery at `(i, j)`: `x1` under `+`, `x2` under `-`.
    pub fn voltage(&self, b: &BatteriesInstance, i: usize, j: usize) -> bool {
        let (x1, x2) = b.cell(i, j);
        match self.sign(i, j) {
            Sign::Plus => x1,
            Sign::Minus => x2,
        }
    }
}

/// Flags reported by [`placement_check`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PlacementCheck {
    pub correct: bool,
    pub safe: bool,
}

/// Correct: vertically adjacent batteries share their sign. Safe: every row has a
/// battery transmitting voltage 0, i.e. the row sum is at most `cols - 1`.
pub fn placement_check(b: &BatteriesInstance, p: &Placement) -> Result<PlacementCheck> {
    if p.signs.len() != b.rows || p.signs.iter().any(|row| row.len() != b.cols) {
        return Err(GridError::DimensionMismatch(format!("placement does not cover a {}x{} instance", b.rows, b.cols)));
    }
    let correct = (0..b.rows.saturating_sub(1)).all(|i| (0..b.cols).all(|j| p.sign(i, j) == p.sign(i + 1, j)));
    let safe = (0..b.rows).all(|i| (0..b.cols).filter(|&j| p.voltage(b, i, j)).count() < b.cols);
    Ok(PlacementCheck { correct, safe })
}

/// Largest column count accepted by [`batteries_brute_force`].
pub const BATTERIES_MAX_COLS: usize = 20;

/// Outcome of [`batteries_brute_force`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BatteriesAnswer {
    Yes(Placement),
    No,
    /// More than [`BATTERIES_MAX_COLS`] columns.
    TooLarge,
}

/// Decides Batteries by enumerating one sign per column; correct placements are
/// exactly the column-uniform ones. Column signs are tried in binary counting order
/// with bit `j` set meaning `-` in column `j`.
pub fn batteries_brute_force(b: &BatteriesInstance) -> BatteriesAnswer {
    if b.cols > BATTERIES_MAX_COLS {
        return BatteriesAnswer::TooLarge;
    }
    for mask in 0u32..1 << b.cols {
        let columns: Vec<Sign> = (0..b.cols).map(|j| if mask >> j & 1 == 1 { Sign::Minus } else { Sign::Plus }).collect();
        let p = Placement::from_columns(b.rows, &columns);
        let check = placement_check(b, &p).expect("dimensions match by construction");
        if check.safe {
            return BatteriesAnswer::Yes(p);
        }
    }
    BatteriesAnswer::No
}

/// The `m x n` instance with `x1 = 0` exactly when `x_j` occurs in clause `i` and
/// `x2 = 0` exactly when its negation does.
pub fn reduce_sat_to_batteries(pi: &CnfFormula) -> Result<BatteriesInstance> {
    let cells = (0..pi.m())
        .map(|i| (1..=pi.n as i32).map(|j| (!pi.contains(i, j), !pi.contains(i, -j))).collect())
        .collect();
    BatteriesInstance::new(cells)
}

/// Column-uniform placement encoding an assignment: `+` for true, `-` for false.
pub fn placement_from_assignment(rows: usize, assignment: &[bool]) -> Placement {
    let columns: Vec<Sign> = assignment.iter().map(|&v| if v { Sign::Plus } else { Sign::Minus }).collect();
    Placement::from_columns(rows, &columns)
}
