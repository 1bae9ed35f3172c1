//! One stage game: the victim hedges against two believed attacker
//! mixtures, and the attacker exploits the worst point of the victim's
//! best-response set.

use mg_inception::{nf_attacker_best_response, victim_br_lp, victim_br_vertices};
use nalgebra::{dmatrix, DMatrix};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let a = dmatrix![3.0, 0.0, 1.0; 0.0, 2.0, 1.0];
    let b = dmatrix![1.0, 4.0, 0.0; 2.0, 0.0, 3.0];
    // Each row is one believed attacker mixture over the three columns.
    let beliefs = dmatrix![1.0, 0.0, 0.0; 0.0, 0.5, 0.5];

    let a_prime: DMatrix<f64> = &a * beliefs.transpose();
    let (x, z) = victim_br_lp(&a_prime)?;
    println!("victim hedge x = {x:.3?}, guaranteed {z:.4}");
    for v in victim_br_vertices(&a_prime, z)? {
        println!("  best-response vertex {v:.3?}");
    }

    let br = nf_attacker_best_response(&beliefs, &a, &b)?;
    println!("attacker y* = {:.3?}, worst-case value {:.4}", br.y_star, br.v2_star);
    Ok(())
}
