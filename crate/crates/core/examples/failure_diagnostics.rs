//! What the solver reports when a problem is ill-posed.

use lq_sweep::numerics::from_rows;
use lq_sweep::pipeline::{solve, Fundamental, Method};
use lq_sweep::problem::{validate, LqProblem};

fn main() -> lq_sweep::Result<()> {
    let one = from_rows(&[&[1.0]]);
    let zero = from_rows(&[&[0.0]]);

    // With no state cost the level of x is free, so x(t0) is undetermined.
    let free_level = LqProblem::new(
        zero.clone(),
        one.clone(),
        zero.clone(),
        one.clone(),
        one.clone(),
        one.clone(),
        one.clone(),
        0.0,
        1.0,
    )?;
    match solve(&free_level, Method::Sweep, Fundamental::Direct, 500) {
        Err(e) => println!("R = 0:\n  {e}\n"),
        Ok(sol) => println!("R = 0: unexpectedly solved, cost {}", sol.cost),
    }

    // x(0) = 0 and x(0) = 1 at once.
    let contradictory = LqProblem::new(
        zero.clone(),
        one.clone(),
        one.clone(),
        one.clone(),
        from_rows(&[&[1.0], &[1.0]]),
        from_rows(&[&[0.0], &[0.0]]),
        from_rows(&[&[0.0], &[1.0]]),
        0.0,
        1.0,
    )?;
    println!("inconsistent rows:\n  {}\n", validate(&contradictory, 5).summary());

    let no_control_weight = LqProblem::new(zero, one.clone(), one.clone(), from_rows(&[&[0.0]]), one.clone(), one.clone(), one, 0.0, 1.0)?;
    println!("C = 0:\n  {}", validate(&no_control_weight, 5).summary().replace('\n', "\n  "));
    Ok(())
}
