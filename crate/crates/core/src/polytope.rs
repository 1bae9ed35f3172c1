//! Brute-force vertex enumeration for small polytopes.
//!
//! Every choice of `d - #equalities` inequality rows is made active together
//! with all equality rows; when the resulting square system is nonsingular its
//! solution is a candidate vertex, kept if it satisfies every constraint within
//! tolerance. Cost is combinatorial, so callers gate it by dimension.

use nalgebra::{DMatrix, DVector};

use crate::lp::Constraint;

/// Relative singular-value threshold below which an active set is skipped.
const RANK_TOL: f64 = 1e-10;

/// A polytope `{v : ineq rows ≤, eq rows =}` in `dim` coordinates.
#[derive(Clone, Debug, Default)]
pub struct Polytope {
    pub dim: usize,
    pub ineq: Vec<Constraint>,
    pub eq: Vec<Constraint>,
}

impl Polytope {
    pub fn new(dim: usize) -> Self {
        Self {
            dim,
            ineq: Vec::new(),
            eq: Vec::new(),
        }
    }

    pub fn leq(mut self, coeffs: Vec<f64>, rhs: f64) -> Self {
        debug_assert_eq!(coeffs.len(), self.dim);
        self.ineq.push(Constraint { coeffs, rhs });
        self
    }

    pub fn equal(mut self, coeffs: Vec<f64>, rhs: f64) -> Self {
        debug_assert_eq!(coeffs.len(), self.dim);
        self.eq.push(Constraint { coeffs, rhs });
        self
    }

    pub fn contains(&self, point: &[f64], tol: f64) -> bool {
        let dot = |c: &Constraint| c.coeffs.iter().zip(point).map(|(a, b)| a * b).sum::<f64>();
        self.ineq.iter().all(|c| dot(c) <= c.rhs + tol) && self.eq.iter().all(|c| (dot(c) - c.rhs).abs() <= tol)
    }

    /// All vertices, deduplicated within `tol` (max-norm), in discovery order.
    pub fn vertices(&self, tol: f64) -> Vec<Vec<f64>> {
        let free = self.dim.saturating_sub(self.eq.len());
        let mut found: Vec<Vec<f64>> = Vec::new();
        if free > self.ineq.len() {
            return found;
        }
        for active in Combinations::new(self.ineq.len(), free) {
            let rows: Vec<&Constraint> = self.eq.iter().chain(active.iter().map(|&i| &self.ineq[i])).collect();
            let Some(point) = solve_square(&rows, self.dim) else {
                continue;
            };
            if !self.contains(&point, tol) {
                continue;
            }
            let duplicate = found
                .iter()
                .any(|v| v.iter().zip(&point).all(|(a, b)| (a - b).abs() <= tol));
            if !duplicate {
                found.push(point);
            }
        }
        found
    }

    /// Maximum of `objective` over the vertices, with a maximizing vertex.
    /// Only meaningful for pointed polytopes on which the maximum is finite.
    pub fn maximize(&self, objective: &[f64], tol: f64) -> Option<(Vec<f64>, f64)> {
        let mut best: Option<(Vec<f64>, f64)> = None;
        for v in self.vertices(tol) {
            let value: f64 = objective.iter().zip(&v).map(|(c, x)| c * x).sum();
            if best.as_ref().is_none_or(|(_, b)| value > *b) {
                best = Some((v, value));
            }
        }
        best
    }
}

fn solve_square(rows: &[&Constraint], dim: usize) -> Option<Vec<f64>> {
    if rows.len() != dim {
        return None;
    }
    if dim == 0 {
        return Some(Vec::new());
    }
    let a = DMatrix::from_fn(dim, dim, |r, c| rows[r].coeffs[c]);
    let b = DVector::from_iterator(dim, rows.iter().map(|r| r.rhs));
    let sv = a.clone().svd(false, false).singular_values;
    let largest = sv.max();
    if largest == 0.0 || sv.min() <= RANK_TOL * largest {
        return None;
    }
    a.lu().solve(&b).map(|x| x.iter().copied().collect())
}

/// Lexicographic `k`-subsets of `0..n`.
pub(crate) struct Combinations {
    n: usize,
    current: Option<Vec<usize>>,
}

impl Combinations {
    pub(crate) fn new(n: usize, k: usize) -> Self {
        Self {
            n,
            current: (k <= n).then(|| (0..k).collect()),
        }
    }
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let out = self.current.clone()?;
        let k = out.len();
        let mut next = out.clone();
        let mut i = k;
        loop {
            if i == 0 {
                self.current = None;
                break;
            }
            i -= 1;
            if next[i] < self.n - k + i {
                next[i] += 1;
                for j in i + 1..k {
                    next[j] = next[j - 1] + 1;
                }
                self.current = Some(next);
                break;
            }
        }
        Some(out)
    }
}
