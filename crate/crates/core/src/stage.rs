//! Normal-form stage games: the victim's robust best response against a
//! finite set of attacker mixtures, and the attacker's best response against
//! the worst point of the victim's best-response polytope.
//!
//! The attacker's problem `max_y min_{x ∈ BR} xᵀBy` is solved through the dual
//! of the inner minimization, which turns it into a single maximization LP
//! over `(y, w, α)`.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::lp::{solve_lp_with, LinearProgram, LpConfig, LpSolution};
use crate::polytope::Polytope;

/// Largest victim action count accepted by [`victim_br_vertices`].
pub const MAX_VERTEX_DIM: usize = 6;

/// Coordinates closer than this are treated as the same vertex.
pub const VERTEX_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverConfig {
    pub lp: LpConfig,
    /// Cap on the number of base policies `K` in a belief.
    pub max_belief_size: usize,
    /// Cap on `H · |S| · max(n, m, K)` for whole-game solves.
    pub max_work: u128,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            lp: LpConfig::default(),
            max_belief_size: 64,
            max_work: 10_000_000,
        }
    }
}

/// Outcome of the attacker's stage best response.
#[derive(Clone, Debug, PartialEq)]
pub struct StageBR {
    /// Attacker mixed strategy. Any optimal vertex of the attacker LP; ties
    /// are resolved by the deterministic pivot order.
    pub y_star: Vec<f64>,
    /// The victim's worst-case value.
    pub z_star: f64,
    /// The attacker's worst-case value `z*·1ᵀw* − α*`.
    pub v2_star: f64,
    pub w_star: Vec<f64>,
    pub alpha_star: f64,
}

fn check_finite(mat: &DMatrix<f64>, what: &str) -> Result<()> {
    if mat.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite(format!("{what} has non-finite entries")))
    }
}

pub fn victim_br_lp(a_prime: &DMatrix<f64>) -> Result<(Vec<f64>, f64)> {
    victim_br_lp_with(a_prime, &LpConfig::default())
}

/// Solves `max z s.t. z ≤ xᵀA'e_j ∀j, 1ᵀx = 1, x ≥ 0` for `a_prime = A·Πᵀ`.
pub fn victim_br_lp_with(a_prime: &DMatrix<f64>, cfg: &LpConfig) -> Result<(Vec<f64>, f64)> {
    let (n, k) = a_prime.shape();
    if n == 0 || k == 0 {
        return Err(Error::Dimension(format!(
            "victim LP needs a non-empty matrix, got {n}x{k}"
        )));
    }
    check_finite(a_prime, "A'")?;
    // variables: x_0..x_{n-1}, z
    let mut objective = vec![0.0; n + 1];
    objective[n] = 1.0;
    let mut simplex_row = vec![1.0; n + 1];
    simplex_row[n] = 0.0;
    let mut lp = LinearProgram::new(n + 1)
        .maximize(objective)
        .equal(simplex_row, 1.0)
        .free(n);
    for j in 0..k {
        let mut row: Vec<f64> = a_prime.column(j).iter().map(|a| -a).collect();
        row.push(1.0);
        lp = lp.leq(row, 0.0);
    }
    match solve_lp_with(&lp, cfg)? {
        LpSolution::Optimal { mut point, .. } => {
            let z = point.pop().expect("z is the last variable");
            Ok((point, z))
        }
        other => Err(Error::Inconsistent(format!(
            "victim LP is always feasible and bounded, solver reported {:?}",
            other.status()
        ))),
    }
}

pub fn attacker_br_lp(z_star: f64, a_prime: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<StageBR> {
    attacker_br_lp_with(z_star, a_prime, b, &LpConfig::default())
}

/// Solves `max z*·1ᵀw − α s.t. α + e_iᵀBy − e_iᵀA'w ≥ 0 ∀i, 1ᵀy = 1, y ≥ 0,
/// w ≥ 0`. `z_star` must be the optimal victim value for `a_prime`, otherwise
/// the program is unbounded and this reports an inconsistency.
pub fn attacker_br_lp_with(z_star: f64, a_prime: &DMatrix<f64>, b: &DMatrix<f64>, cfg: &LpConfig) -> Result<StageBR> {
    let (n, k) = a_prime.shape();
    let m = b.ncols();
    if b.nrows() != n || n == 0 || k == 0 || m == 0 {
        return Err(Error::Dimension(format!(
            "attacker LP needs A' (n x K) and B (n x m) with matching n, got {n}x{k} and {}x{m}",
            b.nrows()
        )));
    }
    if !z_star.is_finite() {
        return Err(Error::NonFinite("z*".into()));
    }
    check_finite(a_prime, "A'")?;
    check_finite(b, "B")?;
    // variables: y_0..y_{m-1}, w_0..w_{K-1}, alpha
    let dim = m + k + 1;
    let alpha = m + k;
    let mut objective = vec![0.0; dim];
    objective[m..m + k].fill(z_star);
    objective[alpha] = -1.0;
    let mut simplex_row = vec![0.0; dim];
    simplex_row[..m].fill(1.0);
    let mut lp = LinearProgram::new(dim)
        .maximize(objective)
        .equal(simplex_row, 1.0)
        .free(alpha);
    for i in 0..n {
        // -alpha - (B y)_i + (A' w)_i <= 0
        let mut row = vec![0.0; dim];
        for j in 0..m {
            row[j] = -b[(i, j)];
        }
        for j in 0..k {
            row[m + j] = a_prime[(i, j)];
        }
        row[alpha] = -1.0;
        lp = lp.leq(row, 0.0);
    }
    match solve_lp_with(&lp, cfg)? {
        LpSolution::Optimal { point, .. } => {
            let y_star = point[..m].to_vec();
            let w_star = point[m..m + k].to_vec();
            let alpha_star = point[alpha];
            let v2_star = z_star * w_star.iter().sum::<f64>() - alpha_star;
            Ok(StageBR {
                y_star,
                z_star,
                v2_star,
                w_star,
                alpha_star,
            })
        }
        other => Err(Error::Inconsistent(format!(
            "attacker LP reported {:?}; z* = {z_star} is not the victim optimum for A'",
            other.status()
        ))),
    }
}

pub fn nf_attacker_best_response(pi_rows: &DMatrix<f64>, a: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<StageBR> {
    nf_attacker_best_response_with(pi_rows, a, b, &SolverConfig::default())
}

/// The attacker's best response in the normal-form game `(A, B)` when the
/// victim believes the attacker mixes the rows of `pi_rows` (`K × m`).
pub fn nf_attacker_best_response_with(
    pi_rows: &DMatrix<f64>,
    a: &DMatrix<f64>,
    b: &DMatrix<f64>,
    cfg: &SolverConfig,
) -> Result<StageBR> {
    let (k, m) = pi_rows.shape();
    if a.shape() != b.shape() || a.ncols() != m {
        return Err(Error::Dimension(format!(
            "stage game needs A, B of equal shape with {m} columns, got {:?} and {:?}",
            a.shape(),
            b.shape()
        )));
    }
    if k == 0 || k > cfg.max_belief_size {
        return Err(Error::Guard {
            what: "belief size K",
            limit: cfg.max_belief_size as u128,
            actual: k as u128,
        });
    }
    for (idx, row) in pi_rows.row_iter().enumerate() {
        let sum: f64 = row.iter().sum();
        if row.iter().any(|p| !p.is_finite() || *p < 0.0) || (sum - 1.0).abs() > 1e-9 {
            return Err(Error::Policy(format!("belief row {idx} is not a distribution")));
        }
    }
    let a_prime = a * pi_rows.transpose();
    let (_, z_star) = victim_br_lp_with(&a_prime, &cfg.lp)?;
    attacker_br_lp_with(z_star, &a_prime, b, &cfg.lp)
}

/// The victim's best-response polytope `{x ∈ Δ(n) : xᵀA'e_j ≥ z* ∀j}` as a
/// polytope in `n` coordinates.
pub fn victim_br_polytope(a_prime: &DMatrix<f64>, z_star: f64) -> Polytope {
    let (n, k) = a_prime.shape();
    let mut p = Polytope::new(n).equal(vec![1.0; n], 1.0);
    for j in 0..k {
        p = p.leq(a_prime.column(j).iter().map(|a| -a).collect(), -z_star);
    }
    for i in 0..n {
        let mut row = vec![0.0; n];
        row[i] = -1.0;
        p = p.leq(row, 0.0);
    }
    p
}

/// Every vertex of the victim's best-response polytope, by brute-force
/// enumeration of active constraint sets. Restricted to `n ≤ 6`.
pub fn victim_br_vertices(a_prime: &DMatrix<f64>, z_star: f64) -> Result<Vec<Vec<f64>>> {
    let n = a_prime.nrows();
    if n > MAX_VERTEX_DIM {
        return Err(Error::Guard {
            what: "victim action count for vertex enumeration",
            limit: MAX_VERTEX_DIM as u128,
            actual: n as u128,
        });
    }
    check_finite(a_prime, "A'")?;
    let vertices = victim_br_polytope(a_prime, z_star).vertices(VERTEX_TOL);
    if vertices.is_empty() {
        return Err(Error::Inconsistent(format!(
            "victim best-response polytope at z* = {z_star} is empty"
        )));
    }
    Ok(vertices)
}
