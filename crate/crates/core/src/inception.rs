//! Dominant-policy inception: choosing the deterministic fake attacker policy
//! that maximizes the attacker's true worst-case value once the victim
//! best-responds to it, designing fake rewards that make that policy
//! strictly dominant, and checking the dominance margin.

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::game::{BeliefSet, MarkovGame, MarkovPolicy, Player, RewardTensor, ValueTables};
use crate::markov::{check_work, markov_attacker_best_response_with, stage_q, BRSolveReport};
use crate::stage::{nf_attacker_best_response_with, SolverConfig};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InceptionConfig {
    iota: f64,
}

impl InceptionConfig {
    /// `iota` is the dominance gap and must be a positive finite number.
    pub fn new(iota: f64) -> Result<Self> {
        if iota.is_finite() && iota > 0.0 {
            Ok(Self { iota })
        } else {
            Err(Error::InvalidIota(iota))
        }
    }

    pub fn iota(&self) -> f64 {
        self.iota
    }
}

/// `V̂_{i,h}(s, j)` for every step, state and candidate column `j`.
#[derive(Clone, Debug, PartialEq)]
pub struct CandidateValues {
    num_states: usize,
    m: usize,
    values: [Vec<f64>; 2],
}

impl CandidateValues {
    pub fn get(&self, player: Player, h: usize, s: usize, j: usize) -> f64 {
        self.values[player.index()][(h * self.num_states + s) * self.m + j]
    }

    /// Candidate values across columns at `(h, s)`.
    pub fn stage(&self, player: Player, h: usize, s: usize) -> &[f64] {
        let start = (h * self.num_states + s) * self.m;
        &self.values[player.index()][start..start + self.m]
    }
}

#[derive(Clone, Debug)]
pub struct InceptionResult {
    /// The deterministic fake policy.
    pub pi2_dagger: MarkovPolicy,
    /// `V̂_{i,h}(s)`; the attacker root is the inception value.
    pub v_hat: ValueTables,
    pub candidates: CandidateValues,
}

impl InceptionResult {
    pub fn attacker_value(&self) -> f64 {
        self.v_hat.root(Player::Attacker)
    }

    pub fn victim_value(&self) -> f64 {
        self.v_hat.root(Player::Victim)
    }
}

/// Index of the largest value, lowest index on ties. Values within a relative
/// `1e-12` of the incumbent count as ties so solver round-off cannot reorder
/// exactly tied candidates.
pub(crate) fn argmax_lowest(values: &[f64]) -> usize {
    let mut best = 0;
    for (j, &v) in values.iter().enumerate().skip(1) {
        let tol = 1e-12 * values[best].abs().max(1.0);
        if v > values[best] + tol {
            best = j;
        }
    }
    best
}

pub fn policy_inception(g: &MarkovGame) -> Result<InceptionResult> {
    policy_inception_with(g, &SolverConfig::default())
}

/// Backward induction over deterministic fake policies. At each `(h, s)` every
/// pure attacker action `j` is tried as the single believed column against the
/// `V̂`-based stage game, and the column with the highest attacker value is
/// kept.
///
/// Candidates are single columns. Believed mixtures over a subset of columns
/// would pass several one-hot rows to the stage solver instead of one.
pub fn policy_inception_with(g: &MarkovGame, cfg: &SolverConfig) -> Result<InceptionResult> {
    g.ensure_valid()?;
    check_work(g, 1, cfg)?;
    let (horizon, num_states) = (g.horizon(), g.num_states());
    let (_, m) = g.action_counts();
    let mut v_hat = ValueTables::zeros(horizon, num_states);
    let mut candidates = CandidateValues {
        num_states,
        m,
        values: [vec![0.0; horizon * num_states * m], vec![0.0; horizon * num_states * m]],
    };
    let mut choice = vec![0usize; horizon * num_states];

    for h in (0..horizon).rev() {
        let next_victim = v_hat.layer(Player::Victim, h + 1).to_vec();
        let next_attacker = v_hat.layer(Player::Attacker, h + 1).to_vec();
        let solved: Vec<Vec<(f64, f64)>> = (0..num_states)
            .into_par_iter()
            .map(|s| {
                let q1 = stage_q(g, Player::Victim, h, s, &next_victim);
                let q2 = stage_q(g, Player::Attacker, h, s, &next_attacker);
                (0..m)
                    .map(|j| {
                        let row = DMatrix::from_fn(1, m, |_, a| if a == j { 1.0 } else { 0.0 });
                        let br = nf_attacker_best_response_with(&row, &q1, &q2, cfg)?;
                        Ok((br.z_star, br.v2_star))
                    })
                    .collect()
            })
            .collect::<Result<_>>()?;
        for (s, per_column) in solved.into_iter().enumerate() {
            let base = (h * num_states + s) * m;
            for (j, (v1, v2)) in per_column.into_iter().enumerate() {
                candidates.values[0][base + j] = v1;
                candidates.values[1][base + j] = v2;
            }
            let best = argmax_lowest(candidates.stage(Player::Attacker, h, s));
            choice[h * num_states + s] = best;
            v_hat.set(Player::Victim, h, s, candidates.get(Player::Victim, h, s, best));
            v_hat.set(Player::Attacker, h, s, candidates.get(Player::Attacker, h, s, best));
        }
    }
    v_hat.finish(g.mu());
    let pi2_dagger = MarkovPolicy::deterministic(Player::Attacker, horizon, num_states, m, |h, s| {
        choice[h * num_states + s]
    });
    Ok(InceptionResult {
        pi2_dagger,
        v_hat,
        candidates,
    })
}

/// Per-step reward coefficient `ι·(H−h)(H−h+1)/2` for the 0-indexed step `h`.
pub fn dominance_coefficient(iota: f64, horizon: usize, h: usize) -> f64 {
    let remaining = (horizon - h) as f64;
    iota * remaining * (remaining + 1.0) / 2.0
}

/// Fake attacker rewards paying the dominance coefficient on the fake
/// policy's column and zero elsewhere.
pub fn design_dominant_rewards(
    pi2_dagger: &MarkovPolicy,
    cfg: &InceptionConfig,
    g: &MarkovGame,
) -> Result<RewardTensor> {
    g.check_policy(pi2_dagger, Player::Attacker)?;
    let (n, m) = g.action_counts();
    let (horizon, num_states) = (g.horizon(), g.num_states());
    let mut matrices = Vec::with_capacity(horizon * num_states);
    for h in 0..horizon {
        let coef = dominance_coefficient(cfg.iota, horizon, h);
        for s in 0..num_states {
            let j = pi2_dagger
                .action(h, s)
                .ok_or_else(|| Error::Policy(format!("fake policy is not deterministic at (h={h}, s={s})")))?;
            matrices.push(DMatrix::from_fn(n, m, |_, a2| if a2 == j { coef } else { 0.0 }));
        }
    }
    Ok(RewardTensor {
        horizon,
        num_states,
        matrices,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DominanceViolation {
    pub h: usize,
    pub s: usize,
    pub a1: usize,
    pub a2: usize,
    /// Pessimistic value of following the fake policy.
    pub dominant: f64,
    /// Optimistic value of deviating to `a2`, plus the gap.
    pub deviation: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DominanceCheck {
    pub holds: bool,
    pub witness: Option<DominanceViolation>,
}

/// Continuation bounds under the attacker rewards of `g`: `upper` is the best
/// total over all joint actions, `lower` the worst total over victim actions
/// while the attacker follows `policy`. Both are indexed `h * S + s` with a
/// zero layer at `H`.
struct Continuations {
    upper: Vec<f64>,
    lower: Vec<f64>,
}

fn stage_margin(
    g: &MarkovGame,
    h: usize,
    s: usize,
    column: usize,
    iota: f64,
    upper_next: &[f64],
    lower_next: &[f64],
) -> Option<DominanceViolation> {
    let (n, m) = g.action_counts();
    let reward = g.reward(Player::Attacker, h, s);
    for a1 in 0..n {
        let dominant = reward[(a1, column)] + g.expected_next(h, s, a1, column, lower_next);
        for a2 in (0..m).filter(|&a2| a2 != column) {
            let deviation = reward[(a1, a2)] + g.expected_next(h, s, a1, a2, upper_next) + iota;
            let tol = 1e-12 * dominant.abs().max(deviation.abs()).max(1.0);
            if dominant < deviation - tol {
                return Some(DominanceViolation {
                    h,
                    s,
                    a1,
                    a2,
                    dominant,
                    deviation,
                });
            }
        }
    }
    None
}

impl Continuations {
    fn new(g: &MarkovGame) -> Self {
        let len = (g.horizon() + 1) * g.num_states();
        Self {
            upper: vec![0.0; len],
            lower: vec![0.0; len],
        }
    }

    fn layer(values: &[f64], h: usize, num_states: usize) -> &[f64] {
        &values[h * num_states..(h + 1) * num_states]
    }

    fn fill_stage(&mut self, g: &MarkovGame, h: usize, s: usize, column: usize) {
        let sn = g.num_states();
        let (n, m) = g.action_counts();
        let reward = g.reward(Player::Attacker, h, s);
        let upper_next = Self::layer(&self.upper, h + 1, sn);
        let lower_next = Self::layer(&self.lower, h + 1, sn);
        let mut upper = f64::NEG_INFINITY;
        let mut lower = f64::INFINITY;
        for a1 in 0..n {
            for a2 in 0..m {
                upper = upper.max(reward[(a1, a2)] + g.expected_next(h, s, a1, a2, upper_next));
            }
            lower = lower.min(reward[(a1, column)] + g.expected_next(h, s, a1, column, lower_next));
        }
        self.upper[h * sn + s] = upper;
        self.lower[h * sn + s] = lower;
    }
}

/// Stagewise check that `pi2_dagger` is `iota`-strictly dominant for the
/// attacker rewards of `g_fake`, using the pessimistic continuation of
/// following the policy against the optimistic continuation of any deviation.
/// Passing is sufficient for dominance. The first violation found, scanning
/// from the last step backwards, is returned as the witness.
pub fn check_iota_dominance(g_fake: &MarkovGame, pi2_dagger: &MarkovPolicy, iota: f64) -> Result<DominanceCheck> {
    g_fake.check_policy(pi2_dagger, Player::Attacker)?;
    let sn = g_fake.num_states();
    let mut bounds = Continuations::new(g_fake);
    for h in (0..g_fake.horizon()).rev() {
        for s in 0..sn {
            let column = pi2_dagger
                .action(h, s)
                .ok_or_else(|| Error::Policy(format!("fake policy is not deterministic at (h={h}, s={s})")))?;
            let upper_next = Continuations::layer(&bounds.upper, h + 1, sn);
            let lower_next = Continuations::layer(&bounds.lower, h + 1, sn);
            if let Some(violation) = stage_margin(g_fake, h, s, column, iota, upper_next, lower_next) {
                return Ok(DominanceCheck {
                    holds: false,
                    witness: Some(violation),
                });
            }
        }
        for s in 0..sn {
            let column = pi2_dagger.action(h, s).expect("checked above");
            bounds.fill_stage(g_fake, h, s, column);
        }
    }
    Ok(DominanceCheck {
        holds: true,
        witness: None,
    })
}

/// Recovers the deterministic policy that the attacker rewards of `g_fake`
/// make `iota`-dominant in the sense of [`check_iota_dominance`], if any.
/// This is the belief a rational victim forms from the fake rewards.
pub fn dominant_policy(g_fake: &MarkovGame, iota: f64) -> Option<MarkovPolicy> {
    let sn = g_fake.num_states();
    let (_, m) = g_fake.action_counts();
    let horizon = g_fake.horizon();
    let mut bounds = Continuations::new(g_fake);
    let mut columns = vec![0usize; horizon * sn];
    for h in (0..horizon).rev() {
        for s in 0..sn {
            let upper_next = Continuations::layer(&bounds.upper, h + 1, sn);
            let lower_next = Continuations::layer(&bounds.lower, h + 1, sn);
            columns[h * sn + s] =
                (0..m).find(|&j| stage_margin(g_fake, h, s, j, iota, upper_next, lower_next).is_none())?;
        }
        for s in 0..sn {
            bounds.fill_stage(g_fake, h, s, columns[h * sn + s]);
        }
    }
    Some(MarkovPolicy::deterministic(Player::Attacker, horizon, sn, m, |h, s| {
        columns[h * sn + s]
    }))
}

pub fn exploit_fixed_fake(g: &MarkovGame, pi2_dagger: &MarkovPolicy) -> Result<BRSolveReport> {
    exploit_fixed_fake_with(g, pi2_dagger, &SolverConfig::default())
}

/// The attacker's true worst-case best response when the victim believes the
/// attacker plays exactly `pi2_dagger`.
pub fn exploit_fixed_fake_with(g: &MarkovGame, pi2_dagger: &MarkovPolicy, cfg: &SolverConfig) -> Result<BRSolveReport> {
    if !pi2_dagger.is_deterministic() {
        return Err(Error::Policy("the fake policy must be deterministic".into()));
    }
    markov_attacker_best_response_with(g, &BeliefSet::singleton(pi2_dagger.clone())?, cfg)
}
