//! Monte Carlo rollouts of a policy pair.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;

use crate::error::{Error, Result};
use crate::game::{MarkovGame, MarkovPolicy, Player};
use crate::random::rng;

#[derive(Clone, Debug, PartialEq)]
pub struct RolloutStats {
    pub episodes: usize,
    pub seed: u64,
    /// Mean undiscounted return per player, indexed by [`Player::index`].
    pub mean: [f64; 2],
    /// Standard error of each mean (sample deviation over `sqrt(episodes)`).
    pub std_error: [f64; 2],
}

impl RolloutStats {
    pub fn mean(&self, player: Player) -> f64 {
        self.mean[player.index()]
    }

    pub fn std_error(&self, player: Player) -> f64 {
        self.std_error[player.index()]
    }
}

fn sampler(weights: &[f64]) -> Result<WeightedIndex<f64>> {
    WeightedIndex::new(weights).map_err(|e| Error::Policy(format!("cannot sample from {weights:?}: {e}")))
}

#[derive(Default)]
struct Welford {
    count: f64,
    mean: f64,
    m2: f64,
}

impl Welford {
    fn push(&mut self, x: f64) {
        self.count += 1.0;
        let delta = x - self.mean;
        self.mean += delta / self.count;
        self.m2 += delta * (x - self.mean);
    }

    fn std_error(&self) -> f64 {
        if self.count < 2.0 {
            return 0.0;
        }
        (self.m2 / (self.count - 1.0)).sqrt() / self.count.sqrt()
    }
}

/// Plays `episodes` independent episodes from `mu` and averages both
/// players' returns. The same seed gives the same statistics.
pub fn simulate(
    g: &MarkovGame,
    pi1: &MarkovPolicy,
    pi2: &MarkovPolicy,
    episodes: usize,
    seed: u64,
) -> Result<RolloutStats> {
    g.ensure_valid()?;
    g.check_policy(pi1, Player::Victim)?;
    g.check_policy(pi2, Player::Attacker)?;
    if episodes == 0 {
        return Err(Error::Dimension("need at least one episode".into()));
    }
    let (horizon, sn) = (g.horizon(), g.num_states());
    let (n, m) = g.action_counts();
    let start = sampler(g.mu())?;
    let mut act1 = Vec::with_capacity(horizon * sn);
    let mut act2 = Vec::with_capacity(horizon * sn);
    let mut step = Vec::with_capacity(horizon * sn * n * m);
    for h in 0..horizon {
        for s in 0..sn {
            act1.push(sampler(pi1.dist(h, s))?);
            act2.push(sampler(pi2.dist(h, s))?);
            for a1 in 0..n {
                for a2 in 0..m {
                    step.push(sampler(g.transition(h, s, a1, a2))?);
                }
            }
        }
    }

    let mut rng = rng(seed);
    let mut stats = [Welford::default(), Welford::default()];
    let mut rewards = vec![[0.0; 2]; horizon];
    for _ in 0..episodes {
        let mut s = start.sample(&mut rng);
        for (h, slot) in rewards.iter_mut().enumerate() {
            let stage = h * sn + s;
            let a1 = act1[stage].sample(&mut rng);
            let a2 = act2[stage].sample(&mut rng);
            for player in Player::BOTH {
                slot[player.index()] = g.reward(player, h, s)[(a1, a2)];
            }
            s = step[(stage * n + a1) * m + a2].sample(&mut rng);
        }
        // Accumulate from the last step back, the same order exact
        // evaluation uses, so deterministic games reproduce it bit for bit.
        let mut ret = [0.0; 2];
        for r in rewards.iter().rev() {
            ret = [r[0] + ret[0], r[1] + ret[1]];
        }
        stats[0].push(ret[0]);
        stats[1].push(ret[1]);
    }
    Ok(RolloutStats {
        episodes,
        seed,
        mean: [stats[0].mean, stats[1].mean],
        std_error: [stats[0].std_error(), stats[1].std_error()],
    })
}
