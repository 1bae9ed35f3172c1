//! Greedy fake-policy search on a random game, the fake rewards that make the
//! chosen policy dominant, and a comparison with exhaustive search.

use mg_inception::oracle::brute_force_inception;
use mg_inception::random::{random_game, rng, GameShape};
use mg_inception::{
    check_iota_dominance, design_dominant_rewards, exploit_fixed_fake, policy_inception, InceptionConfig, Player,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let g = random_game(
        &mut rng(3),
        GameShape {
            n: 2,
            m: 2,
            states: 2,
            horizon: 2,
        },
    );

    let result = policy_inception(&g)?;
    for h in 0..g.horizon() {
        for s in 0..g.num_states() {
            println!("h={h} s={s}: fake action {}", result.pi2_dagger.action(h, s).unwrap());
        }
    }
    println!("greedy V2_hat = {:.5}", result.attacker_value());
    let realized = exploit_fixed_fake(&g, &result.pi2_dagger)?;
    println!(
        "realized by exploiting it: {:.5}",
        realized.values.root(Player::Attacker)
    );

    let iota = 1.0;
    let rewards = design_dominant_rewards(&result.pi2_dagger, &InceptionConfig::new(iota)?, &g)?;
    let fake = g.with_rewards(Player::Attacker, &rewards)?;
    println!(
        "dominance with iota = {iota}: {}",
        check_iota_dominance(&fake, &result.pi2_dagger, iota)?.holds
    );

    let (best, value) = brute_force_inception(&g)?;
    let columns: Vec<usize> = (0..g.horizon())
        .flat_map(|h| (0..g.num_states()).map(move |s| (h, s)))
        .map(|(h, s)| best.action(h, s).unwrap())
        .collect();
    println!("exhaustive search: {value:.5} with actions {columns:?}");
    Ok(())
}
