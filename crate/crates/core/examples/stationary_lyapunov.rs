//! Constant coefficients with R = 0: blocks in closed form from one
//! Lyapunov solve and matrix exponentials.

use lq_sweep::hamiltonian::fundamental_direct;
use lq_sweep::numerics::{from_rows, lyapunov_integral, lyapunov_solve};
use lq_sweep::problem::LqProblem;
use lq_sweep::zakhar_itkin::StationaryFactors;

fn main() -> lq_sweep::Result<()> {
    let f = from_rows(&[&[-1.0, 2.0], &[0.0, -3.0]]);
    let g = from_rows(&[&[0.0], &[1.0]]);
    let p = LqProblem::new(
        f.clone(),
        g.clone(),
        from_rows(&[&[0.0, 0.0], &[0.0, 0.0]]),
        from_rows(&[&[2.0]]),
        from_rows(&[&[1.0, 0.0], &[0.0, 1.0]]),
        from_rows(&[&[0.0, 0.0], &[1.0, 1.0]]),
        from_rows(&[&[1.0], &[0.5]]),
        0.0,
        1.5,
    )?;

    let s = &g * g.transpose() * 0.5;
    let w1 = lyapunov_solve(&f, &s)?;
    let w1_int = lyapunov_integral(&f, &s, 30.0, 30_000)?;
    println!("W1 (Kronecker) =\n{w1}");
    println!("|W1 − quadrature| = {:.2e}", (&w1 - &w1_int).amax());

    let sf = StationaryFactors::new(&p)?;
    let direct = fundamental_direct(&p, &p.grid(2000)?)?;
    let worst = (0..=20)
        .map(|j| {
            let b = direct.at(100 * j);
            sf.blocks(b.t).map(|c| c.max_abs_diff(b))
        })
        .collect::<lq_sweep::Result<Vec<_>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    println!("max block distance at 21 times: {worst:.2e}");
    Ok(())
}
