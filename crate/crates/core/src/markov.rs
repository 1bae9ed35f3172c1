//! Backward induction for the attacker's worst-case best response in a
//! finite-horizon Markov game against a finitely generated victim belief.
//!
//! Each layer is solved from the next layer's worst-case values: the stage
//! payoff matrices are the worst-case Q functions, and every `(h, s)` stage
//! game is handed to the normal-form solver with the belief's stage mixtures.

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::game::{stage_mix_matrix, BeliefSet, MarkovGame, MarkovPolicy, Player, ValueTables};
use crate::stage::{nf_attacker_best_response_with, SolverConfig, StageBR};

/// Per-player `n × m` stage payoff matrices `Q_{i,h}(s)`.
#[derive(Clone, Debug, PartialEq)]
pub struct QMatrices {
    num_states: usize,
    q: [Vec<DMatrix<f64>>; 2],
}

impl QMatrices {
    fn empty(horizon: usize, num_states: usize, n: usize, m: usize) -> Self {
        let blank = vec![DMatrix::zeros(n, m); horizon * num_states];
        Self {
            num_states,
            q: [blank.clone(), blank],
        }
    }

    pub fn get(&self, player: Player, h: usize, s: usize) -> &DMatrix<f64> {
        &self.q[player.index()][h * self.num_states + s]
    }

    fn set(&mut self, player: Player, h: usize, s: usize, mat: DMatrix<f64>) {
        self.q[player.index()][h * self.num_states + s] = mat;
    }
}

#[derive(Clone, Debug)]
pub struct BRSolveReport {
    pub pi2_star: MarkovPolicy,
    /// `V*_{i,h}(s)`, with `mu`-weighted roots.
    pub values: ValueTables,
    pub q: QMatrices,
    /// Stage solutions, indexed `h * S + s`.
    pub stages: Vec<StageBR>,
}

impl BRSolveReport {
    pub fn stage(&self, h: usize, s: usize) -> &StageBR {
        &self.stages[h * self.values.num_states() + s]
    }
}

/// `Q_{i,h}(s)[a1,a2] = R_{i,h}(s,a1,a2) + Σ_{s'} P_h(s'|s,a1,a2) v_next(s')`
/// for every state `s`.
pub fn q_from_v(g: &MarkovGame, player: Player, h: usize, v_next: &[f64]) -> Result<Vec<DMatrix<f64>>> {
    if h >= g.horizon() {
        return Err(Error::Dimension(format!("step {h} outside horizon {}", g.horizon())));
    }
    if v_next.len() != g.num_states() {
        return Err(Error::Dimension(format!(
            "next-layer values have {} entries, expected {}",
            v_next.len(),
            g.num_states()
        )));
    }
    Ok((0..g.num_states()).map(|s| stage_q(g, player, h, s, v_next)).collect())
}

pub(crate) fn stage_q(g: &MarkovGame, player: Player, h: usize, s: usize, v_next: &[f64]) -> DMatrix<f64> {
    let reward = g.reward(player, h, s);
    let (n, m) = g.action_counts();
    DMatrix::from_fn(n, m, |a1, a2| reward[(a1, a2)] + g.expected_next(h, s, a1, a2, v_next))
}

/// The victim's secure belief: every constant pure attacker policy, whose
/// per-stage mixtures are all attacker policies.
pub fn secure_belief(g: &MarkovGame) -> BeliefSet {
    let m = g.num_actions(Player::Attacker);
    let base = (0..m)
        .map(|j| MarkovPolicy::deterministic(Player::Attacker, g.horizon(), g.num_states(), m, |_, _| j))
        .collect();
    BeliefSet::new(base).expect("constant pure policies share one shape")
}

pub(crate) fn check_work(g: &MarkovGame, k: usize, cfg: &SolverConfig) -> Result<()> {
    let (n, m) = g.action_counts();
    let work = g.horizon() as u128 * g.num_states() as u128 * n.max(m).max(k) as u128;
    if work > cfg.max_work {
        return Err(Error::Guard {
            what: "H·|S|·max(n, m, K)",
            limit: cfg.max_work,
            actual: work,
        });
    }
    Ok(())
}

pub fn markov_attacker_best_response(g: &MarkovGame, b: &BeliefSet) -> Result<BRSolveReport> {
    markov_attacker_best_response_with(g, b, &SolverConfig::default())
}

pub fn markov_attacker_best_response_with(g: &MarkovGame, b: &BeliefSet, cfg: &SolverConfig) -> Result<BRSolveReport> {
    g.ensure_valid()?;
    b.check_against(g)?;
    check_work(g, b.len(), cfg)?;
    let (horizon, num_states) = (g.horizon(), g.num_states());
    let (n, m) = g.action_counts();
    let mut values = ValueTables::zeros(horizon, num_states);
    let mut q = QMatrices::empty(horizon, num_states, n, m);
    let mut stages: Vec<Option<StageBR>> = vec![None; horizon * num_states];

    for h in (0..horizon).rev() {
        let next_victim = values.layer(Player::Victim, h + 1).to_vec();
        let next_attacker = values.layer(Player::Attacker, h + 1).to_vec();
        let solved: Vec<(DMatrix<f64>, DMatrix<f64>, StageBR)> = (0..num_states)
            .into_par_iter()
            .map(|s| {
                let q1 = stage_q(g, Player::Victim, h, s, &next_victim);
                let q2 = stage_q(g, Player::Attacker, h, s, &next_attacker);
                let mix = stage_mix_matrix(b, h, s)?;
                let br = nf_attacker_best_response_with(&mix, &q1, &q2, cfg)?;
                Ok((q1, q2, br))
            })
            .collect::<Result<_>>()?;
        for (s, (q1, q2, br)) in solved.into_iter().enumerate() {
            values.set(Player::Victim, h, s, br.z_star);
            values.set(Player::Attacker, h, s, br.v2_star);
            q.set(Player::Victim, h, s, q1);
            q.set(Player::Attacker, h, s, q2);
            stages[h * num_states + s] = Some(br);
        }
    }
    values.finish(g.mu());
    let stages: Vec<StageBR> = stages.into_iter().map(|s| s.expect("every stage solved")).collect();
    let pi2_star = MarkovPolicy::from_solver_output(
        Player::Attacker,
        horizon,
        num_states,
        m,
        stages.iter().map(|br| br.y_star.clone()).collect(),
    )?;
    Ok(BRSolveReport {
        pi2_star,
        values,
        q,
        stages,
    })
}
