//! Bounded integer feasibility: linear systems over box-bounded integer variables,
//! solved by depth-first search with interval propagation.

use crate::oracle::Budget;

/// Which equation family of the block-flow system a constraint belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    /// Flow conservation at every snapshot other than start and end.
    Conservation,
    /// Unit out-flow of the start snapshot.
    StartFlow,
    /// Unit in-flow of the end snapshot.
    EndFlow,
    /// Total flow equals `p - 1`.
    PathLength,
    /// Per-class component counting.
    Counting,
    /// Spanning-tree arcs carry flow at least one.
    TreeArc,
    /// Every arc carries non-negative flow.
    NonNegative,
}

impl Family {
    pub const ALL: [Family; 7] = [
        Family::Conservation,
        Family::StartFlow,
        Family::EndFlow,
        Family::PathLength,
        Family::Counting,
        Family::TreeArc,
        Family::NonNegative,
    ];

    /// Short label used in reports.
    pub fn label(self) -> &'static str {
        match self {
            Family::Conservation => "conservation",
            Family::StartFlow => "start-flow",
            Family::EndFlow => "end-flow",
            Family::PathLength => "path-length",
            Family::Counting => "counting",
            Family::TreeArc => "tree-arc",
            Family::NonNegative => "non-negative",
        }
    }
}

/// Comparison operator of a linear constraint.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Relation {
    Eq,
    Ge,
    Le,
}

/// `sum coeff * x[var]  (relation)  rhs`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Constraint {
    pub family: Family,
    pub terms: Vec<(usize, i64)>,
    pub relation: Relation,
    pub rhs: i64,
}

impl Constraint {
    pub fn holds(&self, x: &[i64]) -> bool {
        let lhs: i64 = self.terms.iter().map(|&(v, a)| a * x[v]).sum();
        match self.relation {
            Relation::Eq => lhs == self.rhs,
            Relation::Ge => lhs >= self.rhs,
            Relation::Le => lhs <= self.rhs,
        }
    }
}

/// Integer system with every variable bounded to `[lower, upper]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IlpSystem {
    pub variables: usize,
    pub lower: i64,
    pub upper: i64,
    pub constraints: Vec<Constraint>,
}

impl IlpSystem {
    pub fn new(variables: usize, lower: i64, upper: i64) -> Self {
        IlpSystem { variables, lower, upper, constraints: Vec::new() }
    }

    pub fn push(&mut self, family: Family, terms: Vec<(usize, i64)>, relation: Relation, rhs: i64) {
        self.constraints.push(Constraint { family, terms, relation, rhs });
    }

    /// Re-evaluates every constraint and bound, reporting per family whether all hold.
    pub fn audit(&self, x: &[i64]) -> Vec<(Family, bool)> {
        let in_box = x.len() == self.variables && x.iter().all(|&v| v >= self.lower && v <= self.upper);
        Family::ALL
            .iter()
            .map(|&fam| {
                let ok = self.constraints.iter().filter(|c| c.family == fam).all(|c| c.holds(x));
                (fam, ok && in_box)
            })
            .collect()
    }

    pub fn is_satisfied_by(&self, x: &[i64]) -> bool {
        self.audit(x).iter().all(|&(_, ok)| ok)
    }
}

/// Outcome of [`ilp_feasible`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IlpOutcome {
    Feasible(Vec<i64>),
    Infeasible,
    /// Budget exhausted before the box was covered.
    Unknown,
}

/// Tightens bounds to a fixpoint; returns false on an empty domain.
fn propagate(sys: &IlpSystem, lo: &mut [i64], hi: &mut [i64]) -> bool {
    loop {
        let mut changed = false;
        for c in &sys.constraints {
            let (mut min, mut max) = (0i64, 0i64);
            for &(v, a) in &c.terms {
                if a >= 0 {
                    min += a * lo[v];
                    max += a * hi[v];
                } else {
                    min += a * hi[v];
                    max += a * lo[v];
                }
            }
            let (need_le, need_ge) = match c.relation {
                Relation::Eq => (true, true),
                Relation::Le => (true, false),
                Relation::Ge => (false, true),
            };
            if (need_le && min > c.rhs) || (need_ge && max < c.rhs) {
                return false;
            }
            for &(v, a) in &c.terms {
                if a == 0 {
                    continue;
                }
                let (own_min, own_max) = if a > 0 { (a * lo[v], a * hi[v]) } else { (a * hi[v], a * lo[v]) };
                if need_le {
                    // a * x <= rhs - (min - own_min)
                    let slack = c.rhs - (min - own_min);
                    if a > 0 {
                        let bound = slack.div_euclid(a);
                        if bound < hi[v] {
                            hi[v] = bound;
                            changed = true;
                        }
                    } else {
                        let bound = -((slack).div_euclid(-a));
                        if bound > lo[v] {
                            lo[v] = bound;
                            changed = true;
                        }
                    }
                }
                if need_ge {
                    // a * x >= rhs - (max - own_max)
                    let need = c.rhs - (max - own_max);
                    if a > 0 {
                        let bound = -((-need).div_euclid(a));
                        if bound > lo[v] {
                            lo[v] = bound;
                            changed = true;
                        }
                    } else {
                        let bound = floor_div(need, a);
                        if bound < hi[v] {
                            hi[v] = bound;
                            changed = true;
                        }
                    }
                }
                if lo[v] > hi[v] {
                    return false;
                }
            }
        }
        if !changed {
            return true;
        }
    }
}

/// Floor of `a / b` for `b != 0`.
fn floor_div(a: i64, b: i64) -> i64 {
    let q = a / b;
    if (a % b != 0) && ((a < 0) != (b < 0)) {
        q - 1
    } else {
        q
    }
}

fn search(
    sys: &IlpSystem,
    lo: Vec<i64>,
    hi: Vec<i64>,
    hint: Option<&[i64]>,
    budget: &mut Budget,
) -> IlpOutcome {
    if !budget.tick() {
        return IlpOutcome::Unknown;
    }
    let (mut lo, mut hi) = (lo, hi);
    if !propagate(sys, &mut lo, &mut hi) {
        return IlpOutcome::Infeasible;
    }
    let pick = (0..sys.variables).filter(|&v| lo[v] < hi[v]).min_by_key(|&v| (hi[v] - lo[v], v));
    let Some(v) = pick else {
        return if sys.is_satisfied_by(&lo) { IlpOutcome::Feasible(lo) } else { IlpOutcome::Infeasible };
    };
    let mut values: Vec<i64> = (lo[v]..=hi[v]).collect();
    if let Some(h) = hint {
        if let Some(pos) = values.iter().position(|&x| x == h[v]) {
            let hv = values.remove(pos);
            values.insert(0, hv);
        }
    }
    let mut unknown = false;
    for val in values {
        let (mut l2, mut h2) = (lo.clone(), hi.clone());
        l2[v] = val;
        h2[v] = val;
        match search(sys, l2, h2, hint, budget) {
            IlpOutcome::Feasible(x) => return IlpOutcome::Feasible(x),
            IlpOutcome::Unknown => {
                unknown = true;
                break;
            }
            IlpOutcome::Infeasible => {}
        }
    }
    if unknown {
        IlpOutcome::Unknown
    } else {
        IlpOutcome::Infeasible
    }
}

/// Finds an integer point of the system inside its box, or proves none exists.
///
/// `hint` (one value per variable) only changes the order in which values are
/// tried; the result is a feasible point whenever one exists.
pub fn ilp_feasible(sys: &IlpSystem, hint: Option<&[i64]>, budget: &mut Budget) -> IlpOutcome {
    if sys.lower > sys.upper {
        return IlpOutcome::Infeasible;
    }
    let lo = vec![sys.lower; sys.variables];
    let hi = vec![sys.upper; sys.variables];
    search(sys, lo, hi, hint, budget)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn single_variable_forced() {
        let mut sys = IlpSystem::new(1, 0, 4);
        sys.push(Family::PathLength, vec![(0, 1)], Relation::Eq, 4);
        assert_eq!(ilp_feasible(&sys, None, &mut Budget::unlimited()), IlpOutcome::Feasible(vec![4]));
    }

    #[test]
    fn contradictory_start_and_length() {
        let mut sys = IlpSystem::new(1, 0, 0);
        sys.push(Family::StartFlow, vec![(0, 1)], Relation::Eq, 1);
        sys.push(Family::PathLength, vec![(0, 1)], Relation::Eq, 0);
        assert_eq!(ilp_feasible(&sys, None, &mut Budget::unlimited()), IlpOutcome::Infeasible);
    }

    #[test]
    fn negative_coefficients_and_inequalities() {
        let mut sys = IlpSystem::new(3, 0, 5);
        sys.push(Family::Conservation, vec![(0, 1), (1, -1)], Relation::Eq, 0);
        sys.push(Family::Counting, vec![(0, 2), (2, -3)], Relation::Ge, 4);
        sys.push(Family::TreeArc, vec![(2, 1)], Relation::Ge, 1);
        sys.push(Family::PathLength, vec![(0, 1), (1, 1), (2, 1)], Relation::Le, 9);
        match ilp_feasible(&sys, None, &mut Budget::unlimited()) {
            IlpOutcome::Feasible(x) => assert!(sys.is_satisfied_by(&x)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn planted_solutions_are_recovered() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        for _ in 0..200 {
            let n = rng.gen_range(1..6);
            let planted: Vec<i64> = (0..n).map(|_| rng.gen_range(0..4)).collect();
            let mut sys = IlpSystem::new(n, 0, 3);
            for _ in 0..rng.gen_range(1..5) {
                let terms: Vec<(usize, i64)> = (0..n).map(|v| (v, rng.gen_range(-2..3))).collect();
                let lhs: i64 = terms.iter().map(|&(v, a)| a * planted[v]).sum();
                let rel = [Relation::Eq, Relation::Ge, Relation::Le][rng.gen_range(0..3)];
                sys.push(Family::Counting, terms, rel, lhs);
            }
            match ilp_feasible(&sys, None, &mut Budget::unlimited()) {
                IlpOutcome::Feasible(x) => assert!(sys.is_satisfied_by(&x)),
                other => panic!("planted system reported {other:?}"),
            }
        }
    }

    #[test]
    fn infeasibility_matches_box_enumeration() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(23);
        for _ in 0..200 {
            let n = rng.gen_range(1..4);
            let mut sys = IlpSystem::new(n, 0, 3);
            for _ in 0..rng.gen_range(1..4) {
                let terms: Vec<(usize, i64)> = (0..n).map(|v| (v, rng.gen_range(-3..4))).collect();
                let rel = [Relation::Eq, Relation::Ge, Relation::Le][rng.gen_range(0..3)];
                sys.push(Family::Counting, terms, rel, rng.gen_range(-4..8));
            }
            let mut any = false;
            let total = 4usize.pow(n as u32);
            for code in 0..total {
                let x: Vec<i64> = (0..n).map(|i| ((code / 4usize.pow(i as u32)) % 4) as i64).collect();
                any |= sys.is_satisfied_by(&x);
            }
            let out = ilp_feasible(&sys, None, &mut Budget::unlimited());
            assert_eq!(matches!(out, IlpOutcome::Feasible(_)), any);
        }
    }
}
