//! The two-action example: the victim's best response depends on which
//! attacker policy it believes in, and the attacker picks the fake policy
//! that pays it most.

use mg_inception::fixtures::intro_game;
use mg_inception::{markov_attacker_best_response, policy_inception, BeliefSet, MarkovPolicy, Player};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let g = intro_game();
    for (name, column) in [("L", 0), ("R", 1)] {
        let fake = MarkovPolicy::deterministic(Player::Attacker, 1, 1, 2, move |_, _| column);
        let report = markov_attacker_best_response(&g, &BeliefSet::singleton(fake)?)?;
        println!(
            "victim believes {name}: V1* = {:.3}, V2* = {:.3}, attacker plays {:?}",
            report.values.root(Player::Victim),
            report.values.root(Player::Attacker),
            report.pi2_star.dist(0, 0)
        );
    }

    let result = policy_inception(&g)?;
    println!(
        "inception picks column {} with V2_hat = {:.3} (victim gets {:.3})",
        result.pi2_dagger.action(0, 0).unwrap(),
        result.attacker_value(),
        result.victim_value()
    );
    Ok(())
}
