//! Worst-case best responses and dominant-policy inception attacks in
//! two-player finite-horizon Markov games where the victim only knows a
//! (possibly fake) attacker reward.
//!
//! * [`game`] holds the game, policy and belief types with exact evaluation.
//! * [`lp`] is the dense simplex engine every solver runs on.
//! * [`stage`] solves single normal-form stage games.
//! * [`markov`] runs backward induction for the attacker's best response.
//! * [`inception`] searches deterministic fake policies and designs the fake
//!   rewards that make them dominant.
//! * [`oracle`] and [`verify`] cross-check all of it by brute force.
//! * [`io`], [`sim`] and [`random`] cover files, rollouts and random instances.

pub mod cli;
pub mod error;
pub mod fixtures;
pub mod game;
pub mod inception;
pub mod io;
pub mod lp;
pub mod markov;
pub mod oracle;
pub mod polytope;
pub mod random;
pub mod sim;
pub mod stage;
pub mod verify;

pub use error::{Error, Result};
pub use game::{
    belief_membership, evaluate_policy, stage_mix_matrix, validate_game, BeliefSet, MarkovGame, MarkovPolicy, Player,
    RewardTensor, ValidationReport, ValueTables,
};
pub use inception::{
    check_iota_dominance, design_dominant_rewards, dominant_policy, exploit_fixed_fake, policy_inception,
    InceptionConfig, InceptionResult,
};
pub use lp::{feasible_point, solve_lp, LinearProgram, LpSolution, LpStatus};
pub use markov::{markov_attacker_best_response, q_from_v, secure_belief, BRSolveReport, QMatrices};
pub use sim::{simulate, RolloutStats};
pub use stage::{attacker_br_lp, nf_attacker_best_response, victim_br_lp, victim_br_vertices, SolverConfig, StageBR};
pub use verify::{verify_game, verify_random, Hooks, Mode, VerifyOptions, VerifyReport};
