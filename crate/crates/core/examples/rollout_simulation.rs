//! Monte Carlo rollouts of a mixed policy pair against exact evaluation.

use mg_inception::random::{random_game, random_policy, rng, GameShape};
use mg_inception::{evaluate_policy, simulate, Player};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut r = rng(21);
    let shape = GameShape {
        n: 3,
        m: 2,
        states: 4,
        horizon: 5,
    };
    let g = random_game(&mut r, shape);
    let pi1 = random_policy(&mut r, Player::Victim, shape.horizon, shape.states, shape.n);
    let pi2 = random_policy(&mut r, Player::Attacker, shape.horizon, shape.states, shape.m);

    let exact = evaluate_policy(&g, &pi1, &pi2)?;
    for episodes in [100, 10_000, 1_000_000] {
        let stats = simulate(&g, &pi1, &pi2, episodes, 7)?;
        for p in Player::BOTH {
            let gap = (stats.mean(p) - exact.root(p)) / stats.std_error(p);
            println!(
                "{episodes:>8} episodes, player {p}: {:.4} ± {:.4} (exact {:.4}, {gap:+.2} SE)",
                stats.mean(p),
                stats.std_error(p),
                exact.root(p)
            );
        }
    }
    Ok(())
}
