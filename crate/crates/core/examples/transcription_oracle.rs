//! Direct-transcription reference: convergence of the discrete optimum and
//! agreement with the sweep solution.

use lq_sweep::oracle::{compare, oracle_solve, CompareTolerances};
use lq_sweep::pipeline::{solve, Fundamental, Method};
use lq_sweep::problem::parse_problem;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let p = parse_problem(include_str!("problems/p1_periodic.json"))?;
    let exact = 0.5409883534;

    let mut previous: Option<f64> = None;
    for n in [25, 50, 100, 200, 400, 800, 1600] {
        let o = oracle_solve(&p, n)?;
        let err = (o.cost - exact).abs();
        let order = previous.map(|e| (e / err).log2());
        println!(
            "N {n:>5}: cost {:.10}  error {err:.2e}  order {}  kkt {:.1e}",
            o.cost,
            order.map_or("-".into(), |v| format!("{v:.2}")),
            o.kkt_residual
        );
        previous = Some(err);
    }

    let sol = solve(&p, Method::Sweep, Fundamental::Direct, 2000)?;
    let report = compare(&sol, &oracle_solve(&p, 2000)?, &CompareTolerances::default());
    println!("{report:#?}");
    Ok(())
}
