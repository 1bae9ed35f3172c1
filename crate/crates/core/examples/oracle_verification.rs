//! Cross-checks the solvers against grid and enumeration oracles on a batch
//! of random games.

use mg_inception::random::GameShape;
use mg_inception::{verify_random, Hooks, Mode, VerifyOptions};

fn main() {
    let shape = GameShape {
        n: 2,
        m: 2,
        states: 1,
        horizon: 1,
    };
    let opts = VerifyOptions {
        mode: Mode::All,
        ..VerifyOptions::default()
    };
    let report = verify_random(shape, 40, 5, &opts, &Hooks::default());
    println!("{report}");
    println!("overall: {}", if report.passed() { "pass" } else { "FAIL" });
}
