use super::OracleSolution;
use crate::numerics::Vector;
use crate::sweep::Solution;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CompareTolerances {
    pub cost_rel: f64,
    pub trajectory: f64,
}

impl Default for CompareTolerances {
    fn default() -> Self {
        Self {
            cost_rel: 1e-3,
            trajectory: 2e-3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CompareReport {
    pub cost_rel_diff: f64,
    pub x_sup_diff: f64,
    pub u_sup_diff: f64,
    pub pass: bool,
}

/// Oracle values linearly interpolated to `t`.
fn interpolate(o: &OracleSolution, values: &[Vector], t: f64) -> Vector {
    const SNAP: f64 = 1e-12;
    let (i, frac) = o.grid.locate(t);
    if frac < SNAP {
        values[i].clone()
    } else if frac > 1.0 - SNAP {
        values[i + 1].clone()
    } else {
        &values[i] * (1.0 - frac) + &values[i + 1] * frac
    }
}

/// Cost relative difference and sup-norm trajectory distances on the
/// solution grid.
pub fn compare(sol: &Solution, osol: &OracleSolution, tol: &CompareTolerances) -> CompareReport {
    let cost_rel_diff = (sol.cost - osol.cost).abs() / osol.cost.abs().max(1e-12);
    let (mut x_sup_diff, mut u_sup_diff) = (0.0f64, 0.0f64);
    for (i, t) in sol.grid.nodes().enumerate() {
        x_sup_diff = x_sup_diff.max((&sol.x[i] - interpolate(osol, &osol.x, t)).amax());
        u_sup_diff = u_sup_diff.max((&sol.u[i] - interpolate(osol, &osol.u, t)).amax());
    }
    CompareReport {
        cost_rel_diff,
        x_sup_diff,
        u_sup_diff,
        pass: cost_rel_diff <= tol.cost_rel && x_sup_diff <= tol.trajectory && u_sup_diff <= tol.trajectory,
    }
}
