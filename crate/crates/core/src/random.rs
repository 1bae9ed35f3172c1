//! Seeded random instances for verification runs and tests.
//!
//! All generation goes through [`ChaCha8Rng`], so a seed reproduces the same
//! instance on every platform.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::game::{BeliefSet, MarkovGame, MarkovPolicy, Player};

pub type SeededRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// An independent stream for trial `trial` of a seeded batch. Trials can run
/// in any order, or in parallel, and still see the same instances.
pub fn trial_rng(seed: u64, trial: u64) -> SeededRng {
    let mut r = rng(seed);
    r.set_stream(trial);
    r
}

/// Dimensions of a random game.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GameShape {
    pub n: usize,
    pub m: usize,
    pub states: usize,
    pub horizon: usize,
}

impl std::str::FromStr for GameShape {
    type Err = String;

    /// Parses `n,m,S,H`.
    fn from_str(text: &str) -> Result<Self, String> {
        let parts: Vec<usize> = text
            .split(',')
            .map(|p| {
                p.trim()
                    .parse::<usize>()
                    .map_err(|e| format!("bad shape component {p:?}: {e}"))
            })
            .collect::<Result<_, _>>()?;
        match parts.as_slice() {
            &[n, m, states, horizon] if n > 0 && m > 0 && states > 0 && horizon > 0 => {
                Ok(Self { n, m, states, horizon })
            }
            _ => Err(format!("expected four positive integers n,m,S,H, got {text:?}")),
        }
    }
}

/// A probability vector from normalized uniform weights.
pub fn distribution(rng: &mut impl Rng, len: usize) -> Vec<f64> {
    let weights: Vec<f64> = (0..len).map(|_| rng.random::<f64>() + 1e-3).collect();
    let total: f64 = weights.iter().sum();
    let mut dist: Vec<f64> = weights.iter().map(|w| w / total).collect();
    // Put the rounding residue on the largest entry so the sum is 1 to within
    // an ulp or two.
    let residue = 1.0 - dist.iter().sum::<f64>();
    let largest = (0..len).fold(0, |best, i| if dist[i] > dist[best] { i } else { best });
    dist[largest] += residue;
    dist
}

pub fn matrix(rng: &mut impl Rng, rows: usize, cols: usize, lo: f64, hi: f64) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| rng.random_range(lo..hi))
}

/// Rewards uniform in `[-1, 1)`, transition rows and `mu` from normalized
/// uniform weights.
pub fn random_game(rng: &mut impl Rng, shape: GameShape) -> MarkovGame {
    let GameShape { n, m, states, horizon } = shape;
    let r1 = reward_layers(rng, shape);
    let r2 = reward_layers(rng, shape);
    let transitions = (0..horizon)
        .map(|_| {
            (0..states)
                .map(|_| {
                    (0..n)
                        .map(|_| (0..m).map(|_| distribution(rng, states)).collect())
                        .collect()
                })
                .collect()
        })
        .collect();
    let mu = distribution(rng, states);
    MarkovGame::new(horizon, states, n, m, mu, r1, r2, transitions).expect("generated shapes line up")
}

fn reward_layers(rng: &mut impl Rng, shape: GameShape) -> Vec<Vec<DMatrix<f64>>> {
    (0..shape.horizon)
        .map(|_| {
            (0..shape.states)
                .map(|_| matrix(rng, shape.n, shape.m, -1.0, 1.0))
                .collect()
        })
        .collect()
}

/// A zero-sum game: attacker rewards are the negated victim rewards.
pub fn random_zero_sum_game(rng: &mut impl Rng, shape: GameShape) -> MarkovGame {
    let g = random_game(rng, shape);
    let mut negated = g.reward_tensor(Player::Victim);
    negated.matrices.iter_mut().for_each(|mat| *mat *= -1.0);
    g.with_rewards(Player::Attacker, &negated).expect("same shape")
}

pub fn random_policy(
    rng: &mut impl Rng,
    player: Player,
    horizon: usize,
    states: usize,
    actions: usize,
) -> MarkovPolicy {
    let entries = (0..horizon)
        .map(|_| (0..states).map(|_| distribution(rng, actions)).collect())
        .collect();
    MarkovPolicy::new(player, actions, entries).expect("generated distributions are valid")
}

pub fn random_deterministic_policy(
    rng: &mut impl Rng,
    player: Player,
    horizon: usize,
    states: usize,
    actions: usize,
) -> MarkovPolicy {
    let picks: Vec<usize> = (0..horizon * states).map(|_| rng.random_range(0..actions)).collect();
    MarkovPolicy::deterministic(player, horizon, states, actions, |h, s| picks[h * states + s])
}

/// `k` random mixed attacker policies.
pub fn random_belief(rng: &mut impl Rng, g: &MarkovGame, k: usize) -> BeliefSet {
    let m = g.num_actions(Player::Attacker);
    let base = (0..k)
        .map(|_| random_policy(rng, Player::Attacker, g.horizon(), g.num_states(), m))
        .collect();
    BeliefSet::new(base).expect("same shape")
}
