//! Scalar problem with the coupled condition x(0) − x(1) = 1.
//!
//! Loads a problem file (default `problems/p1_periodic.json`, or the path
//! given as the first argument), prints the missing-data system and the
//! optimal trajectory at a few nodes.
//!
//! ```text
//! cargo run --example periodic_boundary [-- path/to/problem.json]
//! ```

use lq_sweep::pipeline::{block_trajectory, Fundamental};
use lq_sweep::problem::{parse_problem, validate};
use lq_sweep::sweep::{build_sweep_system, open_loop, solve_missing_data, sweep_symmetry_residual};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/examples/problems/p1_periodic.json").into());
    let p = parse_problem(&std::fs::read_to_string(&path)?)?;

    let report = validate(&p, 21);
    if !report.ok {
        return Err(report.summary().into());
    }

    let traj = block_trajectory(&p, &p.grid(2000)?, Fundamental::Direct)?;
    let sys = build_sweep_system(&p, traj.last())?;
    println!("D =\n{}", sys.d);
    println!("symmetry residual {:.2e}", sweep_symmetry_residual(&sys));

    let md = solve_missing_data(&sys)?;
    println!("x(t0) = {:?}", md.x0.as_slice());
    println!("nu    = {:?}", md.nu.as_slice());

    let sol = open_loop(&p, &traj, &md)?;
    println!("\n{:>6} {:>14} {:>14}", "t", "x1", "u1");
    for i in (0..sol.grid.len()).step_by(250) {
        println!("{:>6.3} {:>14.10} {:>14.10}", sol.grid.node(i), sol.x[i][0], sol.u[i][0]);
    }
    println!("\ncost {:.10}", sol.cost);
    println!("{:#?}", sol.diagnostics);
    Ok(())
}
