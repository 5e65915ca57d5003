//! Fundamental blocks from the reduced ψ, W, V flow against direct
//! integration of the full 2n×2n transition matrix.

use lq_sweep::hamiltonian::{direct_state_len, fundamental_direct, max_symplectic_residual};
use lq_sweep::problem::parse_problem;
use lq_sweep::zakhar_itkin::{factor_state_len, factorized_trajectory};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let p = parse_problem(include_str!("problems/oscillator_varying.json"))?;
    println!(
        "integrated scalars: direct {} vs factored {} (n = {})",
        direct_state_len(p.n),
        factor_state_len(p.n),
        p.n
    );

    for steps in [50, 100, 200, 2000] {
        let grid = p.grid(steps)?;
        let direct = fundamental_direct(&p, &grid)?;
        let factored = factorized_trajectory(&p, &grid)?;
        let dist = direct
            .blocks()
            .iter()
            .zip(factored.blocks())
            .map(|(a, b)| a.max_abs_diff(b))
            .fold(0.0, f64::max);
        println!(
            "steps {steps:>5}: block distance {dist:.2e}, symplectic residual direct {:.2e} factored {:.2e}",
            max_symplectic_residual(&direct),
            max_symplectic_residual(&factored)
        );
    }
    Ok(())
}
