//! Open-loop synthesis versus the state-feedback law on a time-varying
//! oscillator with three boundary rows.

use lq_sweep::pipeline::{block_trajectory, missing_data, Fundamental, Method};
use lq_sweep::problem::parse_problem;
use lq_sweep::sweep::{closed_loop, feedback_control, open_loop};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let text = include_str!("problems/oscillator_varying.json");
    let p = parse_problem(text)?;
    let traj = block_trajectory(&p, &p.grid(2000)?, Fundamental::Direct)?;
    let md = missing_data(&p, &traj, Method::Sweep)?;

    let open = open_loop(&p, &traj, &md)?;
    let closed = closed_loop(&p, &md, &traj)?;

    let dist = open
        .x
        .iter()
        .zip(&closed.x)
        .map(|(a, b)| (a - b).amax())
        .fold(0.0, f64::max);
    println!("open-loop cost   {:.10}", open.cost);
    println!("closed-loop cost {:.10}", closed.cost);
    println!("sup |x_open − x_closed| = {dist:.2e}");

    // the feedback law evaluated off the optimal path
    let i = 1000;
    let perturbed = &open.x[i] * 1.1;
    let u = feedback_control(&p, traj.at(i), &perturbed, &md.nu)?;
    println!(
        "t = {:.2}: u(x*) = {:.6}, u(1.1·x*) = {:.6}",
        open.grid.node(i),
        open.u[i][0],
        u[0]
    );
    Ok(())
}
