//! Small hand-encoded games used by tests, examples and the CLI fixtures.

use nalgebra::DMatrix;

use crate::game::MarkovGame;

/// Victim payoffs of the two-by-two example: rows `U, D`, columns `L, R`.
pub fn intro_victim() -> DMatrix<f64> {
    DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0])
}

/// True attacker payoffs of the two-by-two example.
pub fn intro_attacker() -> DMatrix<f64> {
    DMatrix::from_row_slice(2, 2, &[5.0, 0.0, 0.0, 0.0])
}

/// The one-shot game where the attacker truly prefers `L` but gets 5 only if
/// the victim plays `U`.
pub fn intro_game() -> MarkovGame {
    MarkovGame::normal_form(intro_victim(), intro_attacker()).expect("static game is well formed")
}

/// The faked attacker payoffs, which make `R` strictly dominant by `eps`.
pub fn intro_fake_attacker(eps: f64) -> DMatrix<f64> {
    DMatrix::from_row_slice(2, 2, &[5.0, 5.0 + eps, 0.0, eps])
}
