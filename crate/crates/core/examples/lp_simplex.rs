//! A small production-planning LP solved with the dense simplex engine.

use mg_inception::lp::LinearProgram;
use mg_inception::{feasible_point, solve_lp, LpSolution};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // max 3x + 5y  s.t.  x <= 4, 2y <= 12, 3x + 2y <= 18, x, y >= 0
    let lp = LinearProgram::new(2)
        .maximize(vec![3.0, 5.0])
        .leq(vec![1.0, 0.0], 4.0)
        .leq(vec![0.0, 2.0], 12.0)
        .leq(vec![3.0, 2.0], 18.0);
    match solve_lp(&lp)? {
        LpSolution::Optimal { point, value } => {
            println!(
                "optimum {value} at {point:?}, max violation {:.1e}",
                lp.max_violation(&point)
            );
        }
        other => println!("unexpected outcome: {:?}", other.status()),
    }

    // A free variable bounded by x - y, with x + y = 1.
    let lp = LinearProgram::new(3)
        .maximize(vec![0.0, 0.0, 1.0])
        .equal(vec![1.0, 1.0, 0.0], 1.0)
        .leq(vec![-1.0, 1.0, 1.0], 0.0)
        .free(2);
    println!("free-variable LP: {:?}", solve_lp(&lp)?);

    let infeasible = LinearProgram::new(1).leq(vec![1.0], -1.0);
    println!("x >= 0, x <= -1: {:?}", solve_lp(&infeasible)?.status());
    println!(
        "feasible point of x + y <= 1: {:?}",
        feasible_point(&LinearProgram::new(2).leq(vec![1.0, 1.0], 1.0))
    );
    Ok(())
}
