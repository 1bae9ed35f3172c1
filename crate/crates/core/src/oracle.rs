//! Brute-force oracles for small instances: simplex grids, exact vertex
//! enumeration, and enumeration of every deterministic fake policy.
//!
//! Nothing here sits on the solve path. Every entry point is gated by a size
//! guard because the cost grows exponentially.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::game::{MarkovGame, MarkovPolicy, Player};
use crate::inception::{argmax_lowest, exploit_fixed_fake};
use crate::polytope::Polytope;
use crate::stage::{victim_br_vertices, VERTEX_TOL};

/// Largest number of deterministic policies [`enumerate_deterministic_policies`]
/// will produce.
pub const MAX_ENUMERATED_POLICIES: u128 = 4096;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec {
    step: f64,
    max_dim: usize,
}

impl GridSpec {
    pub fn new(step: f64) -> Result<Self> {
        Self::with_max_dim(step, 4)
    }

    pub fn with_max_dim(step: f64, max_dim: usize) -> Result<Self> {
        if !(step > 0.0 && step <= 0.5) {
            return Err(Error::NonFinite(format!("grid step must lie in (0, 0.5], got {step}")));
        }
        Ok(Self { step, max_dim })
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn max_dim(&self) -> usize {
        self.max_dim
    }

    /// Subdivisions per unit; the effective step `1/N` never exceeds `step`.
    fn divisions(&self) -> usize {
        (1.0 / self.step - 1e-9).ceil() as usize
    }

    fn guard(&self, dim: usize) -> Result<()> {
        if dim > self.max_dim {
            return Err(Error::Guard {
                what: "grid dimension",
                limit: self.max_dim as u128,
                actual: dim as u128,
            });
        }
        Ok(())
    }
}

/// Calls `visit` on every point of `Δ(dim)` whose coordinates are multiples
/// of `1/divisions`.
pub fn for_each_simplex_point(dim: usize, divisions: usize, mut visit: impl FnMut(&[f64])) {
    fn recurse(
        counts: &mut Vec<usize>,
        left: usize,
        dim: usize,
        div: f64,
        point: &mut [f64],
        visit: &mut dyn FnMut(&[f64]),
    ) {
        if counts.len() + 1 == dim {
            counts.push(left);
            for (p, &c) in point.iter_mut().zip(counts.iter()) {
                *p = c as f64 / div;
            }
            visit(point);
            counts.pop();
            return;
        }
        for c in 0..=left {
            counts.push(c);
            recurse(counts, left - c, dim, div, point, visit);
            counts.pop();
        }
    }
    if dim == 0 {
        return;
    }
    let mut point = vec![0.0; dim];
    recurse(
        &mut Vec::with_capacity(dim),
        divisions,
        dim,
        divisions as f64,
        &mut point,
        &mut visit,
    );
}

/// Largest `max − min` within any column.
pub fn column_range(mat: &DMatrix<f64>) -> f64 {
    mat.column_iter().map(|c| c.max() - c.min()).fold(0.0, f64::max)
}

/// Largest `max − min` within any row.
pub fn row_range(mat: &DMatrix<f64>) -> f64 {
    mat.row_iter().map(|r| r.max() - r.min()).fold(0.0, f64::max)
}

/// `max_{x on grid} min_j xᵀA'e_j`. For `n ≤ 3` this is within
/// `column_range(A')·step` below the exact value.
pub fn grid_victim_value(a_prime: &DMatrix<f64>, spec: &GridSpec) -> Result<f64> {
    let (n, k) = a_prime.shape();
    spec.guard(n)?;
    let mut best = f64::NEG_INFINITY;
    for_each_simplex_point(n, spec.divisions(), |x| {
        let worst = (0..k)
            .map(|j| x.iter().enumerate().map(|(i, xi)| xi * a_prime[(i, j)]).sum::<f64>())
            .fold(f64::INFINITY, f64::min);
        best = best.max(worst);
    });
    Ok(best)
}

/// `max_{y on grid} min_{x ∈ BR vertices} xᵀBy`, with the inner minimum taken
/// exactly over the vertices of the victim's best-response polytope at
/// `z_star`. For `m ≤ 3` this is within `row_range(B)·step` below the exact
/// value.
pub fn grid_attacker_value(a_prime: &DMatrix<f64>, b: &DMatrix<f64>, z_star: f64, spec: &GridSpec) -> Result<f64> {
    let (n, m) = b.shape();
    spec.guard(n)?;
    spec.guard(m)?;
    let vertices = victim_br_vertices(a_prime, z_star)?;
    // Each vertex's payoff row xᵀB.
    let rows: Vec<Vec<f64>> = vertices
        .iter()
        .map(|x| (0..m).map(|j| (0..n).map(|i| x[i] * b[(i, j)]).sum()).collect())
        .collect();
    let mut best = f64::NEG_INFINITY;
    for_each_simplex_point(m, spec.divisions(), |y| {
        let worst = rows
            .iter()
            .map(|row| row.iter().zip(y).map(|(r, p)| r * p).sum::<f64>())
            .fold(f64::INFINITY, f64::min);
        best = best.max(worst);
    });
    Ok(best)
}

/// `max_{y on grid} min_i (By)_i`, the attacker's unconstrained security
/// value.
pub fn grid_security_value(b: &DMatrix<f64>, spec: &GridSpec) -> Result<f64> {
    let (n, m) = b.shape();
    spec.guard(m)?;
    let mut best = f64::NEG_INFINITY;
    for_each_simplex_point(m, spec.divisions(), |y| {
        let worst = (0..n)
            .map(|i| (0..m).map(|j| b[(i, j)] * y[j]).sum::<f64>())
            .fold(f64::INFINITY, f64::min);
        best = best.max(worst);
    });
    Ok(best)
}

/// Exact `max_{x ∈ Δ(n)} min_j xᵀA'e_j` by enumerating the vertices of the
/// `(x, z)` feasible region.
pub fn exact_victim_value(a_prime: &DMatrix<f64>) -> Result<f64> {
    let (n, k) = a_prime.shape();
    if n > crate::stage::MAX_VERTEX_DIM {
        return Err(Error::Guard {
            what: "victim action count for vertex enumeration",
            limit: crate::stage::MAX_VERTEX_DIM as u128,
            actual: n as u128,
        });
    }
    let dim = n + 1;
    let mut simplex = vec![1.0; dim];
    simplex[n] = 0.0;
    let mut p = Polytope::new(dim).equal(simplex, 1.0);
    for j in 0..k {
        let mut row: Vec<f64> = a_prime.column(j).iter().map(|a| -a).collect();
        row.push(1.0);
        p = p.leq(row, 0.0);
    }
    for i in 0..n {
        let mut row = vec![0.0; dim];
        row[i] = -1.0;
        p = p.leq(row, 0.0);
    }
    let mut objective = vec![0.0; dim];
    objective[n] = 1.0;
    p.maximize(&objective, VERTEX_TOL)
        .map(|(_, v)| v)
        .ok_or_else(|| Error::Inconsistent("victim region has no vertex".into()))
}

/// Exact `max_{y ∈ Δ(m)} min_{x ∈ BR} xᵀBy` by vertex enumeration of the
/// best-response polytope and then of the `(y, t)` region.
pub fn exact_attacker_value(a_prime: &DMatrix<f64>, b: &DMatrix<f64>, z_star: f64) -> Result<f64> {
    let (n, m) = b.shape();
    let vertices = victim_br_vertices(a_prime, z_star)?;
    let dim = m + 1;
    let mut simplex = vec![1.0; dim];
    simplex[m] = 0.0;
    let mut p = Polytope::new(dim).equal(simplex, 1.0);
    for x in &vertices {
        // t - xᵀBy <= 0
        let mut row: Vec<f64> = (0..m).map(|j| -(0..n).map(|i| x[i] * b[(i, j)]).sum::<f64>()).collect();
        row.push(1.0);
        p = p.leq(row, 0.0);
    }
    for j in 0..m {
        let mut row = vec![0.0; dim];
        row[j] = -1.0;
        p = p.leq(row, 0.0);
    }
    let mut objective = vec![0.0; dim];
    objective[m] = 1.0;
    p.maximize(&objective, VERTEX_TOL)
        .map(|(_, v)| v)
        .ok_or_else(|| Error::Inconsistent("attacker region has no vertex".into()))
}

/// Re-solves a stage game with payoff matrices `(q1, q2)` and believed
/// attacker mixtures `pi_rows` by exact enumeration, returning the victim and
/// attacker worst-case values.
pub fn resolve_stage_exact(q1: &DMatrix<f64>, q2: &DMatrix<f64>, pi_rows: &DMatrix<f64>) -> Result<(f64, f64)> {
    let a_prime = q1 * pi_rows.transpose();
    let v1 = exact_victim_value(&a_prime)?;
    let v2 = exact_attacker_value(&a_prime, q2, v1)?;
    Ok((v1, v2))
}

/// The victim's classical best-response values against a fixed attacker
/// policy, by plain finite-horizon value iteration. Returns `V_{1,h}(s)`
/// indexed `h * S + s` for `h` in `0..=H`.
pub fn victim_best_response_values(g: &MarkovGame, pi2: &MarkovPolicy) -> Result<Vec<f64>> {
    g.check_policy(pi2, Player::Attacker)?;
    let sn = g.num_states();
    let (n, m) = g.action_counts();
    let mut v = vec![0.0; (g.horizon() + 1) * sn];
    for h in (0..g.horizon()).rev() {
        let (head, tail) = v.split_at_mut((h + 1) * sn);
        let next = &tail[..sn];
        for s in 0..sn {
            let y = pi2.dist(h, s);
            let reward = g.reward(Player::Victim, h, s);
            head[h * sn + s] = (0..n)
                .map(|a1| {
                    (0..m)
                        .map(|a2| {
                            let cont: f64 = g.transition(h, s, a1, a2).iter().zip(next).map(|(p, w)| p * w).sum();
                            y[a2] * (reward[(a1, a2)] + cont)
                        })
                        .sum::<f64>()
                })
                .fold(f64::NEG_INFINITY, f64::max);
        }
    }
    Ok(v)
}

/// Every deterministic attacker policy, in lexicographic order of the
/// per-(h, s) actions with the last stage varying fastest.
pub fn enumerate_deterministic_policies(
    g: &MarkovGame,
    player: Player,
) -> Result<impl Iterator<Item = MarkovPolicy> + '_> {
    let actions = g.num_actions(player);
    let stages = g.horizon() * g.num_states();
    let count = (actions as u128).checked_pow(stages as u32).unwrap_or(u128::MAX);
    if count > MAX_ENUMERATED_POLICIES {
        return Err(Error::Guard {
            what: "number of deterministic policies",
            limit: MAX_ENUMERATED_POLICIES,
            actual: count,
        });
    }
    let (horizon, sn) = (g.horizon(), g.num_states());
    Ok((0..count).map(move |mut index| {
        let mut picks = vec![0usize; stages];
        for slot in picks.iter_mut().rev() {
            *slot = (index % actions as u128) as usize;
            index /= actions as u128;
        }
        MarkovPolicy::deterministic(player, horizon, sn, actions, |h, s| picks[h * sn + s])
    }))
}

/// The best deterministic fake policy by exhaustive search: each candidate is
/// scored by the attacker's worst-case value when the victim believes it.
/// Lowest-lexicographic policy wins ties.
pub fn brute_force_inception(g: &MarkovGame) -> Result<(MarkovPolicy, f64)> {
    let mut policies = Vec::new();
    let mut values = Vec::new();
    for pi in enumerate_deterministic_policies(g, Player::Attacker)? {
        values.push(exploit_fixed_fake(g, &pi)?.values.root(Player::Attacker));
        policies.push(pi);
    }
    let best = argmax_lowest(&values);
    Ok((policies.swap_remove(best), values[best]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{intro_attacker, intro_game, intro_victim};

    fn col(values: &[f64]) -> DMatrix<f64> {
        DMatrix::from_column_slice(values.len(), 1, values)
    }

    #[test]
    fn grid_point_counts() {
        let mut count = 0;
        for_each_simplex_point(3, 4, |p| {
            assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            count += 1;
        });
        assert_eq!(count, 15);
    }

    #[test]
    fn grid_victim_examples() {
        let spec = GridSpec::new(1e-3).unwrap();
        assert!((grid_victim_value(&col(&[0.0, 1.0]), &spec).unwrap() - 1.0).abs() <= 1e-3);
        assert!((grid_victim_value(&intro_victim(), &spec).unwrap() - 0.5).abs() <= 1e-3);
        assert_eq!(grid_victim_value(&DMatrix::zeros(3, 2), &spec).unwrap(), 0.0);
    }

    #[test]
    fn grid_attacker_examples() {
        let spec = GridSpec::new(1e-3).unwrap();
        let left = grid_attacker_value(&col(&[0.0, 1.0]), &intro_attacker(), 1.0, &spec).unwrap();
        assert!(left.abs() <= 1e-3);
        let right = grid_attacker_value(&col(&[1.0, 0.0]), &intro_attacker(), 1.0, &spec).unwrap();
        assert!((right - 5.0).abs() <= 5e-3);
        let zero = grid_attacker_value(&col(&[1.0, 0.0]), &DMatrix::zeros(2, 2), 1.0, &spec).unwrap();
        assert_eq!(zero, 0.0);
    }

    #[test]
    fn grid_guards() {
        assert!(GridSpec::new(0.0).is_err());
        assert!(GridSpec::new(0.6).is_err());
        let spec = GridSpec::new(0.5).unwrap();
        assert!(matches!(
            grid_victim_value(&DMatrix::zeros(5, 1), &spec),
            Err(Error::Guard { .. })
        ));
    }

    #[test]
    fn exact_values_on_intro() {
        assert!((exact_victim_value(&intro_victim()).unwrap() - 0.5).abs() < 1e-12);
        let (v1, v2) = resolve_stage_exact(
            &intro_victim(),
            &intro_attacker(),
            &DMatrix::from_row_slice(1, 2, &[0.0, 1.0]),
        )
        .unwrap();
        assert!((v1 - 1.0).abs() < 1e-12);
        assert!((v2 - 5.0).abs() < 1e-12);
    }

    #[test]
    fn enumeration_counts_and_order() {
        let g = intro_game();
        let all: Vec<_> = enumerate_deterministic_policies(&g, Player::Attacker)
            .unwrap()
            .collect();
        assert_eq!(all.len(), 2);
        assert_eq!(all[0].action(0, 0), Some(0));

        let g = crate::random::random_game(
            &mut crate::random::rng(1),
            crate::random::GameShape {
                n: 2,
                m: 2,
                states: 2,
                horizon: 2,
            },
        );
        let all: Vec<_> = enumerate_deterministic_policies(&g, Player::Attacker)
            .unwrap()
            .collect();
        assert_eq!(all.len(), 16);
        assert!((0..2).all(|h| (0..2).all(|s| all[0].action(h, s) == Some(0))));
        assert_eq!(all[1].action(1, 1), Some(1));
        for (i, a) in all.iter().enumerate() {
            assert!(all[i + 1..].iter().all(|b| a != b));
        }
    }

    #[test]
    fn enumeration_guard() {
        let g = crate::random::random_game(
            &mut crate::random::rng(1),
            crate::random::GameShape {
                n: 1,
                m: 3,
                states: 4,
                horizon: 2,
            },
        );
        assert!(matches!(
            enumerate_deterministic_policies(&g, Player::Attacker),
            Err(Error::Guard { .. })
        ));
    }

    #[test]
    fn brute_force_on_intro() {
        let (pi, value) = brute_force_inception(&intro_game()).unwrap();
        assert_eq!(pi.action(0, 0), Some(1));
        assert!((value - 5.0).abs() < 1e-12);

        let indifferent = MarkovGame::normal_form(intro_victim(), DMatrix::zeros(2, 2)).unwrap();
        let (pi, value) = brute_force_inception(&indifferent).unwrap();
        assert_eq!(pi.action(0, 0), Some(0));
        assert_eq!(value, 0.0);
    }
}
