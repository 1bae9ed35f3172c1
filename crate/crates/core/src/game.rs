//! Finite-horizon two-player Markov games, Markov policies, finitely generated
//! belief sets and exact policy evaluation.
//!
//! Player 1 is the victim (rows, `n` actions) and player 2 the attacker
//! (columns, `m` actions). Steps, states and actions are all 0-indexed, so a
//! game with horizon `H` has steps `0..H` and a zero terminal layer at `H`.

use std::fmt;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::lp::{feasible_point, LinearProgram};

/// Tolerance on every probability vector's sum.
pub const PROB_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Player {
    Victim,
    Attacker,
}

impl Player {
    pub const BOTH: [Player; 2] = [Player::Victim, Player::Attacker];

    pub fn index(self) -> usize {
        match self {
            Player::Victim => 0,
            Player::Attacker => 1,
        }
    }

    /// 1 for the victim, 2 for the attacker.
    pub fn number(self) -> u8 {
        self.index() as u8 + 1
    }

    pub fn from_number(number: u8) -> Option<Self> {
        match number {
            1 => Some(Player::Victim),
            2 => Some(Player::Attacker),
            _ => None,
        }
    }
}

impl fmt::Display for Player {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Player::Victim => write!(f, "victim"),
            Player::Attacker => write!(f, "attacker"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MarkovGame {
    horizon: usize,
    num_states: usize,
    n: usize,
    m: usize,
    mu: Vec<f64>,
    /// `rewards[player][h * S + s]` is an `n × m` matrix.
    rewards: [Vec<DMatrix<f64>>; 2],
    /// Flattened `[h][s][a1][a2][s']`.
    transitions: Vec<f64>,
}

impl MarkovGame {
    /// Builds a game, checking only that every dimension lines up. Numeric
    /// invariants (distributions, finiteness) are checked by [`validate_game`].
    ///
    /// `rewards_*` are indexed `[h][s]`, `transitions` `[h][s][a1][a2]`.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        horizon: usize,
        num_states: usize,
        n: usize,
        m: usize,
        mu: Vec<f64>,
        rewards_victim: Vec<Vec<DMatrix<f64>>>,
        rewards_attacker: Vec<Vec<DMatrix<f64>>>,
        transitions: Vec<Vec<Vec<Vec<Vec<f64>>>>>,
    ) -> std::result::Result<Self, ValidationReport> {
        let mut report = ValidationReport::default();
        if horizon == 0 {
            report.push(Issue::Shape("horizon must be positive".into()));
        }
        if num_states == 0 {
            report.push(Issue::Shape("state count must be positive".into()));
        }
        if n == 0 || m == 0 {
            report.push(Issue::Shape(format!("action counts must be positive, got [{n}, {m}]")));
        }
        if mu.len() != num_states {
            report.push(Issue::Shape(format!(
                "mu has {} entries, expected {num_states}",
                mu.len()
            )));
        }
        let mut flat_rewards: [Vec<DMatrix<f64>>; 2] = [Vec::new(), Vec::new()];
        for (player, table) in Player::BOTH.into_iter().zip([rewards_victim, rewards_attacker]) {
            if table.len() != horizon {
                report.push(Issue::Shape(format!(
                    "{player} rewards have {} steps, expected {horizon}",
                    table.len()
                )));
                continue;
            }
            for (h, layer) in table.into_iter().enumerate() {
                if layer.len() != num_states {
                    report.push(Issue::Shape(format!(
                        "{player} rewards at h={h} have {} states, expected {num_states}",
                        layer.len()
                    )));
                    continue;
                }
                for (s, mat) in layer.into_iter().enumerate() {
                    if mat.shape() != (n, m) {
                        report.push(Issue::Shape(format!(
                            "{player} reward matrix at (h={h}, s={s}) is {}x{}, expected {n}x{m}",
                            mat.nrows(),
                            mat.ncols()
                        )));
                    }
                    flat_rewards[player.index()].push(mat);
                }
            }
        }
        let mut flat_transitions = Vec::with_capacity(horizon * num_states * n * m * num_states);
        if transitions.len() != horizon {
            report.push(Issue::Shape(format!(
                "transitions have {} steps, expected {horizon}",
                transitions.len()
            )));
        }
        'outer: for (h, layer) in transitions.into_iter().enumerate() {
            if layer.len() != num_states {
                report.push(Issue::Shape(format!(
                    "transitions at h={h} have {} states, expected {num_states}",
                    layer.len()
                )));
                continue;
            }
            for (s, rows) in layer.into_iter().enumerate() {
                if rows.len() != n {
                    report.push(Issue::Shape(format!(
                        "transitions at (h={h}, s={s}) have {} victim actions, expected {n}",
                        rows.len()
                    )));
                    continue 'outer;
                }
                for (a1, cols) in rows.into_iter().enumerate() {
                    if cols.len() != m {
                        report.push(Issue::Shape(format!(
                            "transitions at (h={h}, s={s}, a1={a1}) have {} attacker actions, expected {m}",
                            cols.len()
                        )));
                        continue 'outer;
                    }
                    for (a2, probs) in cols.into_iter().enumerate() {
                        if probs.len() != num_states {
                            report.push(Issue::Shape(format!(
                                "transition row (h={h}, s={s}, a1={a1}, a2={a2}) has {} entries, expected {num_states}",
                                probs.len()
                            )));
                            continue 'outer;
                        }
                        flat_transitions.extend(probs);
                    }
                }
            }
        }
        if report.is_empty() {
            Ok(Self {
                horizon,
                num_states,
                n,
                m,
                mu,
                rewards: flat_rewards,
                transitions: flat_transitions,
            })
        } else {
            Err(report)
        }
    }

    /// A one-step, one-state game with payoff matrices `a` (victim) and `b`
    /// (attacker).
    pub fn normal_form(a: DMatrix<f64>, b: DMatrix<f64>) -> std::result::Result<Self, ValidationReport> {
        let (n, m) = a.shape();
        let transitions = vec![vec![vec![vec![vec![1.0]; m]; n]]];
        Self::new(1, 1, n, m, vec![1.0], vec![vec![a]], vec![vec![b]], transitions)
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn num_states(&self) -> usize {
        self.num_states
    }

    pub fn num_actions(&self, player: Player) -> usize {
        match player {
            Player::Victim => self.n,
            Player::Attacker => self.m,
        }
    }

    /// `(n, m)`
    pub fn action_counts(&self) -> (usize, usize) {
        (self.n, self.m)
    }

    pub fn mu(&self) -> &[f64] {
        &self.mu
    }

    pub fn reward(&self, player: Player, h: usize, s: usize) -> &DMatrix<f64> {
        &self.rewards[player.index()][h * self.num_states + s]
    }

    /// Distribution over next states after `(a1, a2)` in state `s` at step `h`.
    pub fn transition(&self, h: usize, s: usize, a1: usize, a2: usize) -> &[f64] {
        let sn = self.num_states;
        let start = (((h * sn + s) * self.n + a1) * self.m + a2) * sn;
        &self.transitions[start..start + sn]
    }

    /// The same game with one player's rewards replaced.
    pub fn with_rewards(&self, player: Player, rewards: &RewardTensor) -> Result<Self> {
        if rewards.horizon != self.horizon
            || rewards.num_states != self.num_states
            || rewards.matrices.iter().any(|mat| mat.shape() != (self.n, self.m))
        {
            return Err(Error::Dimension("reward tensor does not match the game".into()));
        }
        let mut game = self.clone();
        game.rewards[player.index()] = rewards.matrices.clone();
        Ok(game)
    }

    /// All rewards of `player` as a tensor.
    pub fn reward_tensor(&self, player: Player) -> RewardTensor {
        RewardTensor {
            horizon: self.horizon,
            num_states: self.num_states,
            matrices: self.rewards[player.index()].clone(),
        }
    }

    /// Multiplies one player's rewards by `factor`.
    pub fn scale_rewards(&self, player: Player, factor: f64) -> Self {
        let mut game = self.clone();
        for mat in &mut game.rewards[player.index()] {
            *mat *= factor;
        }
        game
    }

    pub fn max_abs_reward(&self) -> f64 {
        self.rewards
            .iter()
            .flatten()
            .flat_map(|mat| mat.iter())
            .fold(0.0f64, |acc, r| acc.max(r.abs()))
    }

    /// Expected next-layer value `Σ_{s'} P_h(s'|s,a1,a2) v_next(s')`.
    pub fn expected_next(&self, h: usize, s: usize, a1: usize, a2: usize, v_next: &[f64]) -> f64 {
        self.transition(h, s, a1, a2)
            .iter()
            .zip(v_next)
            .map(|(p, v)| p * v)
            .sum()
    }

    /// Checks that `policy` is a `player` policy shaped for this game.
    pub fn check_policy(&self, policy: &MarkovPolicy, player: Player) -> Result<()> {
        if policy.player != player {
            return Err(Error::Dimension(format!(
                "expected a {player} policy, got a {} policy",
                policy.player
            )));
        }
        if policy.horizon != self.horizon
            || policy.num_states != self.num_states
            || policy.num_actions != self.num_actions(player)
        {
            return Err(Error::Dimension(format!(
                "{player} policy is (H={}, S={}, actions={}), game needs (H={}, S={}, actions={})",
                policy.horizon,
                policy.num_states,
                policy.num_actions,
                self.horizon,
                self.num_states,
                self.num_actions(player)
            )));
        }
        Ok(())
    }

    /// Errors with the full report when the game violates any invariant.
    pub fn ensure_valid(&self) -> Result<()> {
        let report = validate_game(self);
        if report.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidGame(report))
        }
    }
}

/// Per-(h,s) `n × m` reward matrices for one player, stored `h * S + s`.
#[derive(Clone, Debug, PartialEq)]
pub struct RewardTensor {
    pub horizon: usize,
    pub num_states: usize,
    pub matrices: Vec<DMatrix<f64>>,
}

impl RewardTensor {
    pub fn get(&self, h: usize, s: usize) -> &DMatrix<f64> {
        &self.matrices[h * self.num_states + s]
    }

    pub fn get_mut(&mut self, h: usize, s: usize) -> &mut DMatrix<f64> {
        &mut self.matrices[h * self.num_states + s]
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Issue {
    Shape(String),
    MuNegative {
        s: usize,
        value: f64,
    },
    MuSum {
        sum: f64,
    },
    NonFiniteReward {
        player: Player,
        h: usize,
        s: usize,
        a1: usize,
        a2: usize,
        value: f64,
    },
    NegativeTransition {
        h: usize,
        s: usize,
        a1: usize,
        a2: usize,
        next: usize,
        value: f64,
    },
    TransitionSum {
        h: usize,
        s: usize,
        a1: usize,
        a2: usize,
        sum: f64,
    },
}

impl fmt::Display for Issue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Issue::Shape(msg) => write!(f, "shape: {msg}"),
            Issue::MuNegative { s, value } => write!(f, "mu[{s}] = {value} is negative or not finite"),
            Issue::MuSum { sum } => write!(f, "mu sums to {sum}, expected 1"),
            Issue::NonFiniteReward {
                player,
                h,
                s,
                a1,
                a2,
                value,
            } => write!(
                f,
                "{player} reward at (h={h}, s={s}, a1={a1}, a2={a2}) is not finite: {value}"
            ),
            Issue::NegativeTransition {
                h,
                s,
                a1,
                a2,
                next,
                value,
            } => write!(
                f,
                "transition (h={h}, s={s}, a1={a1}, a2={a2}) -> {next} has invalid probability {value}"
            ),
            Issue::TransitionSum { h, s, a1, a2, sum } => write!(
                f,
                "transition row (h={h}, s={s}, a1={a1}, a2={a2}) sums to {sum}, expected 1"
            ),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ValidationReport {
    pub issues: Vec<Issue>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.issues.is_empty()
    }

    pub fn push(&mut self, issue: Issue) {
        self.issues.push(issue);
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.issues.is_empty() {
            return write!(f, "ok");
        }
        for (idx, issue) in self.issues.iter().enumerate() {
            if idx > 0 {
                writeln!(f)?;
            }
            write!(f, "{issue}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ValidationReport {}

fn check_distribution(probs: &[f64]) -> std::result::Result<(), (Option<usize>, f64)> {
    if let Some((idx, &p)) = probs.iter().enumerate().find(|(_, p)| !p.is_finite() || **p < 0.0) {
        return Err((Some(idx), p));
    }
    let sum: f64 = probs.iter().sum();
    if (sum - 1.0).abs() > PROB_TOL {
        return Err((None, sum));
    }
    Ok(())
}

/// Lists every numeric invariant the game violates. Inputs are never
/// renormalized.
pub fn validate_game(g: &MarkovGame) -> ValidationReport {
    let mut report = ValidationReport::default();
    match check_distribution(&g.mu) {
        Ok(()) => {}
        Err((Some(s), value)) => report.push(Issue::MuNegative { s, value }),
        Err((None, sum)) => report.push(Issue::MuSum { sum }),
    }
    for player in Player::BOTH {
        for h in 0..g.horizon {
            for s in 0..g.num_states {
                let mat = g.reward(player, h, s);
                for a1 in 0..g.n {
                    for a2 in 0..g.m {
                        let value = mat[(a1, a2)];
                        if !value.is_finite() {
                            report.push(Issue::NonFiniteReward {
                                player,
                                h,
                                s,
                                a1,
                                a2,
                                value,
                            });
                        }
                    }
                }
            }
        }
    }
    for h in 0..g.horizon {
        for s in 0..g.num_states {
            for a1 in 0..g.n {
                for a2 in 0..g.m {
                    match check_distribution(g.transition(h, s, a1, a2)) {
                        Ok(()) => {}
                        Err((Some(next), value)) => report.push(Issue::NegativeTransition {
                            h,
                            s,
                            a1,
                            a2,
                            next,
                            value,
                        }),
                        Err((None, sum)) => report.push(Issue::TransitionSum { h, s, a1, a2, sum }),
                    }
                }
            }
        }
    }
    report
}

/// A Markov policy for one player: a distribution over that player's actions
/// at every (step, state).
#[derive(Clone, Debug, PartialEq)]
pub struct MarkovPolicy {
    player: Player,
    horizon: usize,
    num_states: usize,
    num_actions: usize,
    /// Flattened `[h][s][a]`.
    probs: Vec<f64>,
}

impl MarkovPolicy {
    /// `entries[h][s]` is the action distribution at `(h, s)`.
    pub fn new(player: Player, num_actions: usize, entries: Vec<Vec<Vec<f64>>>) -> Result<Self> {
        let horizon = entries.len();
        let num_states = entries.first().map_or(0, Vec::len);
        if horizon == 0 || num_states == 0 || num_actions == 0 {
            return Err(Error::Policy("policy needs at least one step, state and action".into()));
        }
        let mut probs = Vec::with_capacity(horizon * num_states * num_actions);
        for (h, layer) in entries.into_iter().enumerate() {
            if layer.len() != num_states {
                return Err(Error::Policy(format!(
                    "step {h} has {} states, expected {num_states}",
                    layer.len()
                )));
            }
            for (s, dist) in layer.into_iter().enumerate() {
                if dist.len() != num_actions {
                    return Err(Error::Policy(format!(
                        "entry (h={h}, s={s}) has {} actions, expected {num_actions}",
                        dist.len()
                    )));
                }
                if let Err((idx, value)) = check_distribution(&dist) {
                    return Err(Error::Policy(match idx {
                        Some(a) => format!("entry (h={h}, s={s}) has invalid probability {value} at action {a}"),
                        None => format!("entry (h={h}, s={s}) sums to {value}"),
                    }));
                }
                probs.extend(dist);
            }
        }
        Ok(Self {
            player,
            horizon,
            num_states,
            num_actions,
            probs,
        })
    }

    /// A deterministic policy playing `action(h, s)`.
    pub fn deterministic(
        player: Player,
        horizon: usize,
        num_states: usize,
        num_actions: usize,
        action: impl Fn(usize, usize) -> usize,
    ) -> Self {
        let mut probs = vec![0.0; horizon * num_states * num_actions];
        for h in 0..horizon {
            for s in 0..num_states {
                let a = action(h, s);
                assert!(a < num_actions, "action {a} out of range");
                probs[(h * num_states + s) * num_actions + a] = 1.0;
            }
        }
        Self {
            player,
            horizon,
            num_states,
            num_actions,
            probs,
        }
    }

    /// Plays the same distribution everywhere.
    pub fn stationary(player: Player, horizon: usize, num_states: usize, dist: &[f64]) -> Result<Self> {
        Self::new(player, dist.len(), vec![vec![dist.to_vec(); num_states]; horizon])
    }

    pub fn uniform(player: Player, horizon: usize, num_states: usize, num_actions: usize) -> Self {
        let p = 1.0 / num_actions as f64;
        Self {
            player,
            horizon,
            num_states,
            num_actions,
            probs: vec![p; horizon * num_states * num_actions],
        }
    }

    /// Builds from already-computed stage distributions. Entries within 1e-9
    /// of the simplex are clamped and rescaled; anything further off is an
    /// error.
    pub(crate) fn from_solver_output(
        player: Player,
        horizon: usize,
        num_states: usize,
        num_actions: usize,
        stages: Vec<Vec<f64>>,
    ) -> Result<Self> {
        let mut probs = Vec::with_capacity(horizon * num_states * num_actions);
        for (idx, mut dist) in stages.into_iter().enumerate() {
            if dist.len() != num_actions || dist.iter().any(|p| !p.is_finite() || *p < -1e-9) {
                return Err(Error::Inconsistent(format!(
                    "stage {idx} produced an invalid distribution"
                )));
            }
            dist.iter_mut().for_each(|p| *p = p.max(0.0));
            let sum: f64 = dist.iter().sum();
            if (sum - 1.0).abs() > 1e-9 {
                return Err(Error::Inconsistent(format!("stage {idx} distribution sums to {sum}")));
            }
            dist.iter_mut().for_each(|p| *p /= sum);
            probs.extend(dist);
        }
        Ok(Self {
            player,
            horizon,
            num_states,
            num_actions,
            probs,
        })
    }

    pub fn player(&self) -> Player {
        self.player
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn num_states(&self) -> usize {
        self.num_states
    }

    pub fn num_actions(&self) -> usize {
        self.num_actions
    }

    pub fn dist(&self, h: usize, s: usize) -> &[f64] {
        let start = (h * self.num_states + s) * self.num_actions;
        &self.probs[start..start + self.num_actions]
    }

    /// The action played at `(h, s)` if the entry is one-hot.
    pub fn action(&self, h: usize, s: usize) -> Option<usize> {
        let dist = self.dist(h, s);
        let mut hot = None;
        for (a, &p) in dist.iter().enumerate() {
            if p == 1.0 && hot.is_none() {
                hot = Some(a);
            } else if p != 0.0 {
                return None;
            }
        }
        hot
    }

    pub fn is_deterministic(&self) -> bool {
        (0..self.horizon).all(|h| (0..self.num_states).all(|s| self.action(h, s).is_some()))
    }

    /// Nested `[h][s][a]` entries.
    pub fn entries(&self) -> Vec<Vec<Vec<f64>>> {
        (0..self.horizon)
            .map(|h| (0..self.num_states).map(|s| self.dist(h, s).to_vec()).collect())
            .collect()
    }
}

/// The victim's belief: all per-stage mixtures of `K` base attacker policies.
#[derive(Clone, Debug, PartialEq)]
pub struct BeliefSet {
    base: Vec<MarkovPolicy>,
}

impl BeliefSet {
    pub fn new(base: Vec<MarkovPolicy>) -> Result<Self> {
        let Some(first) = base.first() else {
            return Err(Error::Policy("a belief set needs at least one base policy".into()));
        };
        let shape = (first.horizon, first.num_states, first.num_actions);
        for (k, policy) in base.iter().enumerate() {
            if policy.player != Player::Attacker {
                return Err(Error::Policy(format!("base policy {k} is not an attacker policy")));
            }
            if (policy.horizon, policy.num_states, policy.num_actions) != shape {
                return Err(Error::Dimension(format!(
                    "base policy {k} differs in shape from policy 0"
                )));
            }
        }
        Ok(Self { base })
    }

    pub fn singleton(policy: MarkovPolicy) -> Result<Self> {
        Self::new(vec![policy])
    }

    pub fn base(&self) -> &[MarkovPolicy] {
        &self.base
    }

    pub fn len(&self) -> usize {
        self.base.len()
    }

    pub fn is_empty(&self) -> bool {
        self.base.is_empty()
    }

    pub fn check_against(&self, g: &MarkovGame) -> Result<()> {
        g.check_policy(&self.base[0], Player::Attacker)
    }
}

/// Row `k` is the base policy `k`'s distribution at `(h, s)`.
pub fn stage_mix_matrix(b: &BeliefSet, h: usize, s: usize) -> Result<DMatrix<f64>> {
    let first = &b.base[0];
    if h >= first.horizon || s >= first.num_states {
        return Err(Error::Dimension(format!(
            "stage (h={h}, s={s}) outside belief of shape (H={}, S={})",
            first.horizon, first.num_states
        )));
    }
    let m = first.num_actions;
    Ok(DMatrix::from_fn(b.len(), m, |k, a| b.base[k].dist(h, s)[a]))
}

/// Whether `pi2` is a per-stage mixture of the belief's base policies.
pub fn belief_membership(b: &BeliefSet, pi2: &MarkovPolicy) -> bool {
    let first = &b.base[0];
    if (pi2.horizon, pi2.num_states, pi2.num_actions) != (first.horizon, first.num_states, first.num_actions) {
        return false;
    }
    let k = b.len();
    for h in 0..pi2.horizon {
        for s in 0..pi2.num_states {
            let target = pi2.dist(h, s);
            let mut lp = LinearProgram::new(k).equal(vec![1.0; k], 1.0);
            for (a, &p) in target.iter().enumerate() {
                let row = b.base.iter().map(|base| base.dist(h, s)[a]).collect();
                lp = lp.equal(row, p);
            }
            match feasible_point(&lp) {
                Some(point) if lp.max_violation(&point) <= 1e-9 => {}
                _ => return false,
            }
        }
    }
    true
}

/// Per-player values `V_{i,h}(s)` for `h` in `0..=H` (layer `H` is zero) and
/// the `mu`-weighted roots.
#[derive(Clone, Debug, PartialEq)]
pub struct ValueTables {
    horizon: usize,
    num_states: usize,
    values: [Vec<f64>; 2],
    root: [f64; 2],
}

impl ValueTables {
    pub(crate) fn zeros(horizon: usize, num_states: usize) -> Self {
        let len = (horizon + 1) * num_states;
        Self {
            horizon,
            num_states,
            values: [vec![0.0; len], vec![0.0; len]],
            root: [0.0; 2],
        }
    }

    pub fn get(&self, player: Player, h: usize, s: usize) -> f64 {
        self.values[player.index()][h * self.num_states + s]
    }

    pub(crate) fn set(&mut self, player: Player, h: usize, s: usize, value: f64) {
        self.values[player.index()][h * self.num_states + s] = value;
    }

    /// `V_{i,h}(·)` across states.
    pub fn layer(&self, player: Player, h: usize) -> &[f64] {
        let start = h * self.num_states;
        &self.values[player.index()][start..start + self.num_states]
    }

    pub(crate) fn finish(&mut self, mu: &[f64]) {
        for player in Player::BOTH {
            self.root[player.index()] = mu.iter().zip(self.layer(player, 0)).map(|(p, v)| p * v).sum();
        }
    }

    /// `Σ_s μ(s) V_{i,0}(s)`.
    pub fn root(&self, player: Player) -> f64 {
        self.root[player.index()]
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn num_states(&self) -> usize {
        self.num_states
    }
}

/// Exact backward-induction evaluation of a joint policy.
pub fn evaluate_policy(g: &MarkovGame, pi1: &MarkovPolicy, pi2: &MarkovPolicy) -> Result<ValueTables> {
    g.check_policy(pi1, Player::Victim)?;
    g.check_policy(pi2, Player::Attacker)?;
    let (n, m) = g.action_counts();
    let mut tables = ValueTables::zeros(g.horizon, g.num_states);
    for h in (0..g.horizon).rev() {
        for s in 0..g.num_states {
            let x = pi1.dist(h, s);
            let y = pi2.dist(h, s);
            for player in Player::BOTH {
                let next = tables.layer(player, h + 1).to_vec();
                let reward = g.reward(player, h, s);
                let mut value = 0.0;
                for a1 in 0..n {
                    for a2 in 0..m {
                        let q = reward[(a1, a2)] + g.expected_next(h, s, a1, a2, &next);
                        value += x[a1] * y[a2] * q;
                    }
                }
                tables.set(player, h, s, value);
            }
        }
    }
    tables.finish(&g.mu);
    Ok(tables)
}
