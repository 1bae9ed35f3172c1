//! Writes a game with a belief to JSON, validates it, reads it back and
//! solves it. Also shows the report for a broken file.

use mg_inception::io::{read_game, write_game, GameFile};
use mg_inception::random::{random_belief, random_game, rng, GameShape};
use mg_inception::{markov_attacker_best_response, Player};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::temp_dir().join("mg-inception-example");
    std::fs::create_dir_all(&dir)?;
    let path = dir.join("game.json");

    let mut r = rng(2);
    let g = random_game(
        &mut r,
        GameShape {
            n: 2,
            m: 2,
            states: 2,
            horizon: 2,
        },
    );
    let belief = random_belief(&mut r, &g, 2);
    write_game(&path, &g, Some(&belief))?;
    println!("wrote {}", path.display());

    let (loaded, loaded_belief) = read_game(&path)?;
    println!(
        "round trip exact: {}",
        loaded == g && loaded_belief.as_ref() == Some(&belief)
    );
    let report = markov_attacker_best_response(&loaded, &loaded_belief.unwrap())?;
    println!("V2* from the file: {:.6}", report.values.root(Player::Attacker));

    let mut broken = GameFile::from_game(&g, None);
    broken.transitions[1][0][1][0] = vec![0.7, 0.2];
    match broken.to_game() {
        Ok(_) => println!("unexpectedly valid"),
        Err(report) => println!("broken file:\n{report}"),
    }
    Ok(())
}
