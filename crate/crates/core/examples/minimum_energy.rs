//! Steer ẋ = −x + u from x(0) = 1 to x(1) = 1 with least control energy.
//!
//! Both endpoint conditions are rows of one boundary matrix. The result is
//! checked against the Gramian closed form u(t) = c·eᵗ with
//! c = (1 − e⁻¹)/W_c·e⁻¹, W_c = (1 − e⁻²)/2.

use lq_sweep::numerics::from_rows;
use lq_sweep::pipeline::{solve, Fundamental, Method};
use lq_sweep::problem::{controllability_gramian, LqProblem};

fn main() -> lq_sweep::Result<()> {
    let p = LqProblem::new(
        from_rows(&[&[-1.0]]),
        from_rows(&[&[1.0]]),
        from_rows(&[&[0.0]]),
        from_rows(&[&[1.0]]),
        from_rows(&[&[1.0], &[0.0]]),
        from_rows(&[&[0.0], &[-1.0]]),
        from_rows(&[&[1.0], &[1.0]]),
        0.0,
        1.0,
    )?;

    let wc = controllability_gramian(&p, 2000)?[(0, 0)];
    let e = std::f64::consts::E;
    let c = (1.0 - 1.0 / e) / wc / e;
    println!("Gramian {wc:.10}, closed-form gain {c:.10}");

    for fundamental in [Fundamental::Direct, Fundamental::ZakharItkin, Fundamental::Stationary] {
        let sol = solve(&p, Method::Sweep, fundamental, 2000)?;
        let err = sol
            .grid
            .nodes()
            .zip(&sol.u)
            .map(|(t, u)| (u[0] - c * t.exp()).abs())
            .fold(0.0, f64::max);
        println!(
            "{fundamental:<13} cost {:.10}  nu {:?}  sup|u − c·eᵗ| {err:.2e}",
            sol.cost,
            sol.nu.as_slice()
        );
    }
    println!("tanh(1/2)     {:.10}", 0.5f64.tanh());
    Ok(())
}
