//! Property checks shared by the proptest suite and the acceptance run.
//!
//! Each check builds its own seeded instance and returns `Err` with a
//! description of the first violation.

#![allow(dead_code, clippy::neg_cmp_op_on_partial_ord)]

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use mg_inception::game::{
    belief_membership, evaluate_policy, stage_mix_matrix, BeliefSet, MarkovGame, MarkovPolicy, Player,
};
use mg_inception::inception::{
    check_iota_dominance, design_dominant_rewards, exploit_fixed_fake, policy_inception, InceptionConfig,
};
use mg_inception::io::{read_game, read_policy, write_game, write_policy};
use mg_inception::lp::{solve_lp, LinearProgram};
use mg_inception::markov::{markov_attacker_best_response, q_from_v};
use mg_inception::oracle::{
    brute_force_inception, column_range, enumerate_deterministic_policies, grid_security_value, grid_victim_value,
    victim_best_response_values, GridSpec,
};
use mg_inception::random::{distribution, matrix, random_belief, random_game, random_policy, rng, GameShape};
use mg_inception::sim::simulate;
use mg_inception::stage::{nf_attacker_best_response, victim_br_lp, victim_br_vertices};

pub type Check = Result<(), String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

pub fn close(actual: f64, expected: f64, tol: f64, what: &str) -> Check {
    ensure!(
        (actual - expected).abs() <= tol,
        "{what}: {actual} vs {expected} (diff {:e} > {tol:e})",
        (actual - expected).abs()
    );
    Ok(())
}

fn fail<E: std::fmt::Display>(what: &str) -> impl FnOnce(E) -> String + '_ {
    move |e| format!("{what}: {e}")
}

pub fn shape(n: usize, m: usize, states: usize, horizon: usize) -> GameShape {
    GameShape { n, m, states, horizon }
}

/// A stage instance: payoffs `a`, `b` and `k` believed attacker mixtures.
pub struct StageCase {
    pub a: DMatrix<f64>,
    pub b: DMatrix<f64>,
    pub pi_rows: DMatrix<f64>,
}

impl StageCase {
    pub fn new(seed: u64, n: usize, m: usize, k: usize) -> Self {
        let mut r = rng(seed);
        let a = matrix(&mut r, n, m, -1.0, 1.0);
        let b = matrix(&mut r, n, m, -1.0, 1.0);
        let rows: Vec<f64> = (0..k).flat_map(|_| distribution(&mut r, m)).collect();
        Self {
            a,
            b,
            pi_rows: DMatrix::from_row_slice(k, m, &rows),
        }
    }

    pub fn a_prime(&self) -> DMatrix<f64> {
        &self.a * self.pi_rows.transpose()
    }
}

/// Monte Carlo returns by direct sampling, independent of the library
/// simulator. Returns means and standard errors per player.
pub fn rollout_estimate(
    g: &MarkovGame,
    pi1: &MarkovPolicy,
    pi2: &MarkovPolicy,
    episodes: usize,
    seed: u64,
) -> ([f64; 2], [f64; 2]) {
    fn draw(r: &mut ChaCha8Rng, probs: &[f64]) -> usize {
        let u: f64 = r.random();
        let mut acc = 0.0;
        for (i, p) in probs.iter().enumerate() {
            acc += p;
            if u < acc {
                return i;
            }
        }
        probs.iter().rposition(|p| *p > 0.0).unwrap()
    }
    let mut r = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let mut sum = [0.0; 2];
    let mut sq = [0.0; 2];
    for _ in 0..episodes {
        let mut s = draw(&mut r, g.mu());
        let mut ret = [0.0; 2];
        for h in 0..g.horizon() {
            let a1 = draw(&mut r, pi1.dist(h, s));
            let a2 = draw(&mut r, pi2.dist(h, s));
            ret[0] += g.reward(Player::Victim, h, s)[(a1, a2)];
            ret[1] += g.reward(Player::Attacker, h, s)[(a1, a2)];
            s = draw(&mut r, g.transition(h, s, a1, a2));
        }
        for i in 0..2 {
            sum[i] += ret[i];
            sq[i] += ret[i] * ret[i];
        }
    }
    let e = episodes as f64;
    let mean = [sum[0] / e, sum[1] / e];
    let se = [0, 1].map(|i| ((sq[i] - e * mean[i] * mean[i]) / (e - 1.0)).max(0.0).sqrt() / e.sqrt());
    (mean, se)
}

// ---- game model ----

/// Scaling one player's rewards by `c` scales that player's values by `c`;
/// exactly for powers of two, to round-off otherwise.
pub fn evaluation_scales_linearly(seed: u64, c: f64) -> Check {
    let mut r = rng(seed);
    let g = random_game(&mut r, shape(2, 3, 2, 3));
    let pi1 = random_policy(&mut r, Player::Victim, 3, 2, 2);
    let pi2 = random_policy(&mut r, Player::Attacker, 3, 2, 3);
    let base = evaluate_policy(&g, &pi1, &pi2).map_err(fail("evaluate"))?;
    let exact = c.abs().log2().fract() == 0.0;
    for player in Player::BOTH {
        let scaled = evaluate_policy(&g.scale_rewards(player, c), &pi1, &pi2).map_err(fail("evaluate"))?;
        for h in 0..=3 {
            for s in 0..2 {
                let (got, want) = (scaled.get(player, h, s), c * base.get(player, h, s));
                if exact {
                    ensure!(got == want, "player {player} (h={h}, s={s}): {got} != {want}");
                } else {
                    close(got, want, 1e-12 * want.abs().max(1.0), "scaled value")?;
                }
            }
        }
        let other = Player::BOTH[1 - player.index()];
        ensure!(
            scaled.root(other) == base.root(other),
            "scaling player {player} moved player {other}'s value"
        );
    }
    Ok(())
}

pub fn evaluation_matches_rollouts(seed: u64, episodes: usize) -> Check {
    let mut r = rng(seed);
    let g = random_game(&mut r, shape(2, 2, 3, 3));
    let pi1 = random_policy(&mut r, Player::Victim, 3, 3, 2);
    let pi2 = random_policy(&mut r, Player::Attacker, 3, 3, 2);
    let exact = evaluate_policy(&g, &pi1, &pi2).map_err(fail("evaluate"))?;
    let (mean, se) = rollout_estimate(&g, &pi1, &pi2, episodes, seed);
    for player in Player::BOTH {
        let i = player.index();
        close(
            mean[i],
            exact.root(player),
            3.0 * se[i],
            &format!("player {player} rollout mean"),
        )?;
    }
    Ok(())
}

pub fn base_policies_are_members(seed: u64, k: usize) -> Check {
    let mut r = rng(seed);
    let g = random_game(&mut r, shape(2, 3, 2, 2));
    let b = random_belief(&mut r, &g, k);
    for (i, p) in b.base().iter().enumerate() {
        ensure!(belief_membership(&b, p), "base policy {i} not a member");
    }
    Ok(())
}

// ---- LP engine ----

struct RandomLp {
    c: Vec<f64>,
    g: Vec<Vec<f64>>,
    h: Vec<f64>,
    e: Vec<Vec<f64>>,
    f: Vec<f64>,
}

/// A feasible, bounded LP `max cᵀx, Gx ≤ h, Ex = f, x ≥ 0`: feasibility from a
/// planted point, boundedness from a budget row.
fn random_lp(seed: u64, vars: usize, ineqs: usize, eqs: usize) -> RandomLp {
    let mut r = rng(seed);
    let x0: Vec<f64> = (0..vars).map(|_| r.random_range(0.0..1.0)).collect();
    let row = |r: &mut ChaCha8Rng| -> Vec<f64> { (0..vars).map(|_| r.random_range(-1.0..1.0)).collect() };
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let mut g: Vec<Vec<f64>> = (0..ineqs).map(|_| row(&mut r)).collect();
    g.push(vec![1.0; vars]);
    let h = g.iter().map(|gi| dot(gi, &x0) + r.random_range(0.0..0.5)).collect();
    let e: Vec<Vec<f64>> = (0..eqs).map(|_| row(&mut r)).collect();
    let f = e.iter().map(|ei| dot(ei, &x0)).collect();
    let c = row(&mut r);
    RandomLp { c, g, h, e, f }
}

/// Optimal value of the primal and of its dual, the latter written out by
/// hand: `min hᵀu + fᵀv` s.t. `Gᵀu + Eᵀv ≥ c`, `u ≥ 0`, `v` free.
pub fn lp_strong_duality(seed: u64, vars: usize, ineqs: usize, eqs: usize) -> Check {
    let p = random_lp(seed, vars, ineqs, eqs);
    let mut primal = LinearProgram::new(vars).maximize(p.c.clone());
    for (gi, hi) in p.g.iter().zip(&p.h) {
        primal = primal.leq(gi.clone(), *hi);
    }
    for (ei, fi) in p.e.iter().zip(&p.f) {
        primal = primal.equal(ei.clone(), *fi);
    }
    let (nu, nv) = (p.g.len(), p.e.len());
    let mut objective: Vec<f64> = p.h.iter().map(|x| -x).collect();
    objective.extend(p.f.iter().map(|x| -x));
    let mut dual = LinearProgram::new(nu + nv).maximize(objective);
    for j in 0..vars {
        let mut coeffs: Vec<f64> = p.g.iter().map(|gi| -gi[j]).collect();
        coeffs.extend(p.e.iter().map(|ei| -ei[j]));
        dual = dual.leq(coeffs, -p.c[j]);
    }
    for v in 0..nv {
        dual = dual.free(nu + v);
    }
    let (_, primal_value) = solve_lp(&primal)
        .map_err(fail("primal"))?
        .optimal()
        .ok_or("primal not optimal")?;
    let (_, dual_value) = solve_lp(&dual)
        .map_err(fail("dual"))?
        .optimal()
        .ok_or("dual not optimal")?;
    close(primal_value, -dual_value, 1e-8, "primal vs dual optimum")
}

pub fn lp_row_permutation(seed: u64, vars: usize, ineqs: usize, eqs: usize) -> Check {
    let p = random_lp(seed, vars, ineqs, eqs);
    let build = |order: &[usize], eq_order: &[usize]| {
        let mut lp = LinearProgram::new(vars).maximize(p.c.clone());
        for &i in order {
            lp = lp.leq(p.g[i].clone(), p.h[i]);
        }
        for &i in eq_order {
            lp = lp.equal(p.e[i].clone(), p.f[i]);
        }
        lp
    };
    let order: Vec<usize> = (0..p.g.len()).collect();
    let eq_order: Vec<usize> = (0..p.e.len()).collect();
    let mut shuffled = order.clone();
    let mut eq_shuffled = eq_order.clone();
    let mut r = rng(seed.wrapping_add(1));
    for i in (1..shuffled.len()).rev() {
        shuffled.swap(i, r.random_range(0..=i));
    }
    eq_shuffled.reverse();
    let value = |lp: &LinearProgram| -> Result<f64, String> {
        solve_lp(lp)
            .map_err(fail("solve"))?
            .optimal()
            .map(|(_, v)| v)
            .ok_or_else(|| "not optimal".to_string())
    };
    close(
        value(&build(&shuffled, &eq_shuffled))?,
        value(&build(&order, &eq_order))?,
        1e-9,
        "permuted LP value",
    )
}

// ---- stage solver ----

pub fn stage_duality_consistency(seed: u64, n: usize, m: usize, k: usize) -> Check {
    let case = StageCase::new(seed, n, m, k);
    let br = nf_attacker_best_response(&case.pi_rows, &case.a, &case.b).map_err(fail("stage solve"))?;
    let vertices = victim_br_vertices(&case.a_prime(), br.z_star).map_err(fail("vertices"))?;
    let worst = vertices
        .iter()
        .map(|x| {
            (case.b.transpose() * DMatrix::from_column_slice(n, 1, x))
                .dot(&DMatrix::from_column_slice(m, 1, &br.y_star))
        })
        .fold(f64::INFINITY, f64::min);
    close(worst, br.v2_star, 1e-7, "min over best-response vertices vs v2*")
}

pub fn stage_vertex_membership(seed: u64, n: usize, m: usize, k: usize) -> Check {
    let case = StageCase::new(seed, n, m, k);
    let a_prime = case.a_prime();
    let (_, z) = victim_br_lp(&a_prime).map_err(fail("victim LP"))?;
    let vertices = victim_br_vertices(&a_prime, z).map_err(fail("vertices"))?;
    ensure!(!vertices.is_empty(), "no vertices");
    for x in &vertices {
        let worst = (0..k)
            .map(|j| x.iter().enumerate().map(|(i, xi)| xi * a_prime[(i, j)]).sum::<f64>())
            .fold(f64::INFINITY, f64::min);
        ensure!(worst >= z - 1e-8, "vertex {x:?} worst column {worst} below z* {z}");
        ensure!(x.iter().all(|v| *v >= -1e-9), "vertex {x:?} has negative entries");
        close(x.iter().sum(), 1.0, 1e-9, "vertex mass")?;
    }
    Ok(())
}

/// Dropping believed mixtures can only help the victim.
pub fn stage_belief_monotonicity(seed: u64, n: usize, m: usize, k: usize) -> Check {
    let case = StageCase::new(seed, n, m, k);
    let a_prime = case.a_prime();
    let (_, full) = victim_br_lp(&a_prime).map_err(fail("victim LP"))?;
    for keep in 1..k {
        let (_, sub) = victim_br_lp(&a_prime.columns(0, keep).into_owned()).map_err(fail("victim LP"))?;
        ensure!(sub >= full - 1e-9, "{keep} of {k} columns: z* {sub} < {full}");
    }
    Ok(())
}

pub fn stage_beats_security_value(seed: u64, n: usize, m: usize, k: usize) -> Check {
    let case = StageCase::new(seed, n, m, k);
    let br = nf_attacker_best_response(&case.pi_rows, &case.a, &case.b).map_err(fail("stage solve"))?;
    let security = grid_security_value(&case.b, &GridSpec::new(1e-2).unwrap()).map_err(fail("grid"))?;
    ensure!(
        br.v2_star >= security - 1e-7,
        "v2* {} below security value {security}",
        br.v2_star
    );
    Ok(())
}

// ---- Markov solver ----

pub fn markov_optimality_equations(seed: u64, sh: GameShape, k: usize) -> Check {
    let mut r = rng(seed);
    let g = random_game(&mut r, sh);
    let b = random_belief(&mut r, &g, k);
    let report = markov_attacker_best_response(&g, &b).map_err(fail("solve"))?;
    let grid = GridSpec::new(1e-2).unwrap();
    for h in 0..sh.horizon {
        for s in 0..sh.states {
            let mix = stage_mix_matrix(&b, h, s).map_err(fail("mix"))?;
            let a_prime = report.q.get(Player::Victim, h, s) * mix.transpose();
            let (_, z) = victim_br_lp(&a_prime).map_err(fail("victim LP"))?;
            let v1 = report.values.get(Player::Victim, h, s);
            close(v1, z, 1e-9, &format!("V1* at (h={h}, s={s}) vs stage LP"))?;
            if sh.n <= 3 && sh.m <= 3 && k <= 3 {
                let approx = grid_victim_value(&a_prime, &grid).map_err(fail("grid"))?;
                close(v1, approx, 1e-2, &format!("V1* at (h={h}, s={s}) vs grid"))?;
            }
        }
    }
    Ok(())
}

/// Every stagewise choice of best-response vertex, played against the
/// attacker's policy, gives the attacker at least its worst-case value.
pub fn markov_guarantee_realized(seed: u64, sh: GameShape, k: usize) -> Check {
    let mut r = rng(seed);
    let g = random_game(&mut r, sh);
    let b = random_belief(&mut r, &g, k);
    let report = markov_attacker_best_response(&g, &b).map_err(fail("solve"))?;
    let (horizon, sn) = (sh.horizon, sh.states);
    let mut options: Vec<Vec<Vec<f64>>> = Vec::new();
    for h in 0..horizon {
        for s in 0..sn {
            let mix = stage_mix_matrix(&b, h, s).map_err(fail("mix"))?;
            let a_prime = report.q.get(Player::Victim, h, s) * mix.transpose();
            let z = report.values.get(Player::Victim, h, s);
            let vertices = victim_br_vertices(&a_prime, z).map_err(fail("vertices"))?;
            options.push(vertices.into_iter().map(|x| tidy(&x)).collect());
        }
    }
    let total: usize = options.iter().map(Vec::len).product();
    ensure!(total <= 4096, "too many vertex policies to enumerate: {total}");
    let v2 = report.values.root(Player::Attacker);
    for mut index in 0..total {
        let mut entries = vec![vec![Vec::new(); sn]; horizon];
        for (stage, opts) in options.iter().enumerate() {
            entries[stage / sn][stage % sn] = opts[index % opts.len()].clone();
            index /= opts.len();
        }
        let pi1 = MarkovPolicy::new(Player::Victim, sh.n, entries).map_err(fail("vertex policy"))?;
        let realized = evaluate_policy(&g, &pi1, &report.pi2_star).map_err(fail("evaluate"))?;
        ensure!(
            realized.root(Player::Attacker) >= v2 - 1e-6,
            "vertex policy gives attacker {} < V2* {v2}",
            realized.root(Player::Attacker)
        );
    }
    Ok(())
}

/// Clips round-off from a computed distribution.
fn tidy(x: &[f64]) -> Vec<f64> {
    let clipped: Vec<f64> = x.iter().map(|v| v.max(0.0)).collect();
    let total: f64 = clipped.iter().sum();
    clipped.iter().map(|v| v / total).collect()
}

/// Against a single believed policy the victim's worst-case value is its
/// ordinary best-response value.
pub fn markov_singleton_reduction(seed: u64, sh: GameShape) -> Check {
    let mut r = rng(seed);
    let g = random_game(&mut r, sh);
    let pi2 = random_policy(&mut r, Player::Attacker, sh.horizon, sh.states, sh.m);
    let report =
        markov_attacker_best_response(&g, &BeliefSet::singleton(pi2.clone()).unwrap()).map_err(fail("solve"))?;
    let classical = victim_best_response_values(&g, &pi2).map_err(fail("value iteration"))?;
    for h in 0..=sh.horizon {
        for s in 0..sh.states {
            close(
                report.values.get(Player::Victim, h, s),
                classical[h * sh.states + s],
                1e-9,
                &format!("V1* at (h={h}, s={s}) vs value iteration"),
            )?;
        }
    }
    Ok(())
}

pub fn q_matches_direct_sum(seed: u64, sh: GameShape) -> Check {
    let mut r = rng(seed);
    let g = random_game(&mut r, sh);
    let h = r.random_range(0..sh.horizon);
    let v_next: Vec<f64> = (0..sh.states).map(|_| r.random_range(-3.0..3.0)).collect();
    for player in Player::BOTH {
        let q = q_from_v(&g, player, h, &v_next).map_err(fail("q_from_v"))?;
        for (s, q_s) in q.iter().enumerate() {
            for a1 in 0..sh.n {
                for a2 in 0..sh.m {
                    let mut direct = g.reward(player, h, s)[(a1, a2)];
                    for (s2, v) in v_next.iter().enumerate() {
                        direct += g.transition(h, s, a1, a2)[s2] * v;
                    }
                    close(q_s[(a1, a2)], direct, 1e-12, "Q entry")?;
                }
            }
        }
    }
    Ok(())
}

// ---- inception ----

/// The returned inception value is at least what any fixed deterministic
/// fake policy achieves.
pub fn inception_dominates_fixed_fakes(seed: u64, sh: GameShape) -> Check {
    let g = random_game(&mut rng(seed), sh);
    let result = policy_inception(&g).map_err(fail("inception"))?;
    let v_hat = result.attacker_value();
    for pi in enumerate_deterministic_policies(&g, Player::Attacker).map_err(fail("enumerate"))? {
        let v = exploit_fixed_fake(&g, &pi)
            .map_err(fail("exploit"))?
            .values
            .root(Player::Attacker);
        ensure!(
            v_hat >= v - 1e-8,
            "fake policy {:?} reaches {v}, inception only {v_hat}",
            actions(&pi)
        );
    }
    Ok(())
}

pub fn actions(pi: &MarkovPolicy) -> Vec<usize> {
    (0..pi.horizon())
        .flat_map(|h| (0..pi.num_states()).map(move |s| (h, s)))
        .map(|(h, s)| pi.action(h, s).unwrap_or(usize::MAX))
        .collect()
}

pub fn reward_design_dominant(seed: u64, sh: GameShape, iota: f64) -> Check {
    let mut r = rng(seed);
    let g = random_game(&mut r, sh);
    let pi: Vec<usize> = (0..sh.horizon * sh.states).map(|_| r.random_range(0..sh.m)).collect();
    let dagger = MarkovPolicy::deterministic(Player::Attacker, sh.horizon, sh.states, sh.m, |h, s| {
        pi[h * sh.states + s]
    });
    let rewards = design_dominant_rewards(&dagger, &InceptionConfig::new(iota).unwrap(), &g).map_err(fail("design"))?;
    let fake = g.with_rewards(Player::Attacker, &rewards).map_err(fail("fake game"))?;
    let check = check_iota_dominance(&fake, &dagger, iota).map_err(fail("check"))?;
    ensure!(check.holds, "designed rewards not dominant: {:?}", check.witness);
    Ok(())
}

/// Sets of maximising candidates, compared at a relative `1e-9`.
fn argmax_set(values: &[f64]) -> Vec<usize> {
    let best = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let tol = 1e-9 * best.abs().max(1.0);
    (0..values.len()).filter(|&j| values[j] >= best - tol).collect()
}

pub fn inception_scale_covariant(seed: u64, sh: GameShape, c: f64) -> Check {
    let g = random_game(&mut rng(seed), sh);
    let scaled = g.scale_rewards(Player::Victim, c).scale_rewards(Player::Attacker, c);
    let a = policy_inception(&g).map_err(fail("inception"))?;
    let b = policy_inception(&scaled).map_err(fail("inception"))?;
    for h in 0..sh.horizon {
        for s in 0..sh.states {
            let (sa, sb) = (
                argmax_set(a.candidates.stage(Player::Attacker, h, s)),
                argmax_set(b.candidates.stage(Player::Attacker, h, s)),
            );
            ensure!(sa == sb, "argmax sets differ at (h={h}, s={s}): {sa:?} vs {sb:?}");
        }
    }
    ensure!(
        a.pi2_dagger == b.pi2_dagger,
        "fake policies differ after scaling by {c}"
    );
    close(
        b.attacker_value(),
        c * a.attacker_value(),
        1e-9 * c.max(1.0),
        "scaled inception value",
    )
}

// ---- oracles ----

pub fn grid_victim_agrees(seed: u64, n: usize, m: usize, k: usize, delta: f64) -> Check {
    let case = StageCase::new(seed, n, m, k);
    let a_prime = case.a_prime();
    let (_, z) = victim_br_lp(&a_prime).map_err(fail("victim LP"))?;
    let grid = grid_victim_value(&a_prime, &GridSpec::new(delta).unwrap()).map_err(fail("grid"))?;
    close(z, grid, column_range(&a_prime) * delta + 1e-9, "victim LP vs grid")
}

/// The exhaustive search returns the largest exploit value and visits
/// `m^(H·S)` distinct policies.
pub fn brute_force_is_max(seed: u64, sh: GameShape) -> Check {
    let g = random_game(&mut rng(seed), sh);
    let (best_pi, best) = brute_force_inception(&g).map_err(fail("brute force"))?;
    let mut seen = std::collections::HashSet::new();
    for pi in enumerate_deterministic_policies(&g, Player::Attacker).map_err(fail("enumerate"))? {
        let v = exploit_fixed_fake(&g, &pi)
            .map_err(fail("exploit"))?
            .values
            .root(Player::Attacker);
        // Candidates within a relative 1e-12 count as tied.
        ensure!(
            best >= v - 1e-12 * best.abs().max(1.0),
            "policy {:?} beats the maximum: {v} > {best}",
            actions(&pi)
        );
        seen.insert(actions(&pi));
    }
    let expected = sh.m.pow((sh.horizon * sh.states) as u32);
    ensure!(
        seen.len() == expected,
        "{} distinct policies, expected {expected}",
        seen.len()
    );
    let v = exploit_fixed_fake(&g, &best_pi)
        .map_err(fail("exploit"))?
        .values
        .root(Player::Attacker);
    ensure!(v == best, "returned policy scores {v}, not {best}");
    Ok(())
}

// ---- files and simulation ----

pub fn game_round_trip(seed: u64, sh: GameShape) -> Check {
    let mut r = rng(seed);
    let g = random_game(&mut r, sh);
    let b = random_belief(&mut r, &g, 2);
    let dir = tempfile::tempdir().map_err(fail("tempdir"))?;
    let path = dir.path().join("game.json");
    write_game(&path, &g, Some(&b)).map_err(fail("write"))?;
    let (back, beliefs) = read_game(&path).map_err(fail("read"))?;
    ensure!(bits_equal_games(&g, &back), "game changed on round trip");
    let beliefs = beliefs.ok_or("beliefs lost")?;
    for (p, q) in b.base().iter().zip(beliefs.base()) {
        ensure!(bits(&p.entries()) == bits(&q.entries()), "belief changed on round trip");
    }
    let pi1 = random_policy(&mut r, Player::Victim, sh.horizon, sh.states, sh.n);
    let policy_path = dir.path().join("policy.json");
    write_policy(&policy_path, &pi1).map_err(fail("write policy"))?;
    let back = read_policy(&policy_path, Player::Victim, &g).map_err(fail("read policy"))?;
    ensure!(
        bits(&pi1.entries()) == bits(&back.entries()),
        "policy changed on round trip"
    );
    Ok(())
}

fn bits(entries: &[Vec<Vec<f64>>]) -> Vec<u64> {
    entries.iter().flatten().flatten().map(|v| v.to_bits()).collect()
}

fn bits_equal_games(a: &MarkovGame, b: &MarkovGame) -> bool {
    let matrices = |g: &MarkovGame| -> Vec<u64> {
        Player::BOTH
            .iter()
            .flat_map(|p| g.reward_tensor(*p).matrices)
            .flat_map(|mat| mat.iter().map(|v| v.to_bits()).collect::<Vec<_>>())
            .collect()
    };
    let transitions = |g: &MarkovGame| -> Vec<u64> {
        let (n, m) = g.action_counts();
        let mut out = Vec::new();
        for h in 0..g.horizon() {
            for s in 0..g.num_states() {
                for a1 in 0..n {
                    for a2 in 0..m {
                        out.extend(g.transition(h, s, a1, a2).iter().map(|v| v.to_bits()));
                    }
                }
            }
        }
        out
    };
    let mu = |g: &MarkovGame| -> Vec<u64> { g.mu().iter().map(|v| v.to_bits()).collect() };
    matrices(a) == matrices(b) && transitions(a) == transitions(b) && mu(a) == mu(b)
}

pub fn simulation_reproducible(seed: u64) -> Check {
    let mut r = rng(seed);
    let g = random_game(&mut r, shape(2, 2, 3, 2));
    let pi1 = random_policy(&mut r, Player::Victim, 2, 3, 2);
    let pi2 = random_policy(&mut r, Player::Attacker, 2, 3, 2);
    let a = simulate(&g, &pi1, &pi2, 500, seed).map_err(fail("simulate"))?;
    let b = simulate(&g, &pi1, &pi2, 500, seed).map_err(fail("simulate"))?;
    ensure!(
        a.mean.map(f64::to_bits) == b.mean.map(f64::to_bits)
            && a.std_error.map(f64::to_bits) == b.std_error.map(f64::to_bits),
        "same seed, different statistics"
    );
    ensure!(
        random_game(&mut rng(seed), shape(2, 2, 2, 2)) == random_game(&mut rng(seed), shape(2, 2, 2, 2)),
        "generator not reproducible"
    );
    Ok(())
}
