//! Backward induction over a random Markov game: the attacker's worst-case
//! best response to a victim holding a two-policy belief, next to the
//! zero-sum style secure belief.

use mg_inception::random::{random_belief, random_game, rng, GameShape};
use mg_inception::{markov_attacker_best_response, secure_belief, Player};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut r = rng(11);
    let g = random_game(
        &mut r,
        GameShape {
            n: 2,
            m: 3,
            states: 3,
            horizon: 4,
        },
    );
    let belief = random_belief(&mut r, &g, 2);

    let report = markov_attacker_best_response(&g, &belief)?;
    println!(
        "belief of two policies: V1* = {:.4}, V2* = {:.4}",
        report.values.root(Player::Victim),
        report.values.root(Player::Attacker)
    );
    for h in 0..g.horizon() {
        let layer: Vec<String> = report
            .values
            .layer(Player::Attacker, h)
            .iter()
            .map(|v| format!("{v:.3}"))
            .collect();
        println!(
            "  h={h}: V2* per state [{}], y*(s=0) = {:.3?}",
            layer.join(", "),
            report.pi2_star.dist(h, 0)
        );
    }

    let secure = markov_attacker_best_response(&g, &secure_belief(&g))?;
    println!(
        "secure belief: V1* = {:.4}, V2* = {:.4}",
        secure.values.root(Player::Victim),
        secure.values.root(Player::Attacker)
    );
    Ok(())
}
