//! The missing-data system and solution synthesis.
//!
//! With `M = Φ22⁻¹(τ, t0)` the unknowns `x(t0)` and `ν` solve the
//! `(n+k)×(n+k)` system `D·[x0; ν] = [0; q]` where
//!
//! ```text
//! D = [ −M Φ21                     Φ1' − M Φ2'    ]
//!     [ Φ1 − Φ2 (Φ11 − Φ12 M Φ21)   Φ2 Φ12 M Φ2'   ]
//! ```
//!
//! The first block row comes from `λ(t0) = M (λ(τ) − Φ21 x0)` with the
//! transversality conditions substituted, the second from the boundary
//! condition with `x(τ)` eliminated. The symplectic identities of `Φ` make
//! `D` symmetric; [`sweep_symmetry_residual`] measures how well that holds.

use crate::error::{Error, Result};
use crate::hamiltonian::{max_symplectic_residual, BlockTrajectory, FundamentalBlocks};
use crate::numerics::{mat_solve, rank, rk4_integrate, Grid, Matrix, Vector};
use crate::problem::LqProblem;
use serde::Serialize;

/// A symmetry residual above this attaches a warning to the solve.
const SYMMETRY_WARN: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSystem {
    pub d: Matrix,
    pub rhs: Matrix,
    pub n: usize,
    pub k: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MissingData {
    pub x0: Vector,
    pub nu: Vector,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Diagnostics {
    pub d_symmetry: f64,
    pub symplectic_max: f64,
    pub bc_residual: f64,
    pub dynamics_residual: f64,
    pub duality_gap: f64,
}

#[derive(Debug, Clone)]
pub struct Solution {
    pub grid: Grid,
    pub x: Vec<Vector>,
    pub u: Vec<Vector>,
    pub lambda: Vec<Vector>,
    pub x0: Vector,
    pub nu: Vector,
    pub cost: f64,
    pub diagnostics: Diagnostics,
}

pub fn build_sweep_system(p: &LqProblem, b: &FundamentalBlocks) -> Result<SweepSystem> {
    let (n, k) = (p.n, p.k);
    let m = mat_solve(&b.phi22, &Matrix::identity(n, n))
        .map_err(|e| e.in_context(&format!("Φ22 at t = {} (conjugate point)", b.t)))?;
    let m_phi21 = &m * &b.phi21;
    let phi12_m = &b.phi12 * &m;
    let phi2t = p.phi2.transpose();

    let mut d = Matrix::zeros(n + k, n + k);
    d.view_mut((0, 0), (n, n)).copy_from(&(-&m_phi21));
    d.view_mut((0, n), (n, k))
        .copy_from(&(p.phi1.transpose() - &m * &phi2t));
    d.view_mut((n, 0), (k, n))
        .copy_from(&(&p.phi1 - &p.phi2 * (&b.phi11 - &b.phi12 * &m_phi21)));
    d.view_mut((n, n), (k, k))
        .copy_from(&(&p.phi2 * phi12_m * &phi2t));

    let mut rhs = Matrix::zeros(n + k, 1);
    rhs.view_mut((n, 0), (k, 1)).copy_from(&p.q);
    Ok(SweepSystem { d, rhs, n, k })
}

/// `‖D − D'‖_F / (1 + ‖D‖_F)`.
pub fn sweep_symmetry_residual(s: &SweepSystem) -> f64 {
    (&s.d - s.d.transpose()).norm() / (1.0 + s.d.norm())
}

pub fn solve_missing_data(s: &SweepSystem) -> Result<MissingData> {
    let asym = sweep_symmetry_residual(s);
    if asym > SYMMETRY_WARN {
        log::warn!("missing-data matrix is not symmetric (residual {asym:.3e}); blocks may be inaccurate");
    }
    let z = mat_solve(&s.d, &s.rhs).map_err(|e| match e {
        Error::SingularMatrix { condition, .. } => Error::singular(
            format!(
                "missing-data matrix D (rank deficient: rank {} of {})",
                rank(&s.d, 1e-10),
                s.n + s.k
            ),
            condition,
        ),
        other => other,
    })?;
    Ok(MissingData {
        x0: z.rows(0, s.n).column(0).into_owned(),
        nu: z.rows(s.n, s.k).column(0).into_owned(),
    })
}

/// `λ(t0) = −Φ1'·ν`.
pub fn costate_initial(nu: &Vector, p: &LqProblem) -> Vector {
    -(p.phi1.transpose() * nu)
}

/// Solve the joint `(4n+k)` system in `(x0, λ0, x(τ), λ(τ), ν)` built from
/// the transition at `τ`, both transversality conditions and the boundary
/// condition. Avoids inverting `Φ22`.
pub fn augmented_solve(p: &LqProblem, b: &FundamentalBlocks) -> Result<MissingData> {
    let (n, k) = (p.n, p.k);
    let size = 4 * n + k;
    let e = Matrix::identity(n, n);
    let (x0, l0, xt, lt, nu) = (0, n, 2 * n, 3 * n, 4 * n);
    let mut a = Matrix::zeros(size, size);
    let mut rhs = Matrix::zeros(size, 1);

    // x(τ) = Φ11 x0 + Φ12 λ0
    a.view_mut((0, x0), (n, n)).copy_from(&b.phi11);
    a.view_mut((0, l0), (n, n)).copy_from(&b.phi12);
    a.view_mut((0, xt), (n, n)).copy_from(&(-&e));
    // λ(τ) = Φ21 x0 + Φ22 λ0
    a.view_mut((n, x0), (n, n)).copy_from(&b.phi21);
    a.view_mut((n, l0), (n, n)).copy_from(&b.phi22);
    a.view_mut((n, lt), (n, n)).copy_from(&(-&e));
    // λ0 = −Φ1'ν, λ(τ) = −Φ2'ν
    a.view_mut((2 * n, l0), (n, n)).copy_from(&e);
    a.view_mut((2 * n, nu), (n, k)).copy_from(&p.phi1.transpose());
    a.view_mut((3 * n, lt), (n, n)).copy_from(&e);
    a.view_mut((3 * n, nu), (n, k)).copy_from(&p.phi2.transpose());
    // Φ1 x0 − Φ2 x(τ) = q
    a.view_mut((4 * n, x0), (k, n)).copy_from(&p.phi1);
    a.view_mut((4 * n, xt), (k, n)).copy_from(&(-&p.phi2));
    rhs.view_mut((4 * n, 0), (k, 1)).copy_from(&p.q);

    let z = mat_solve(&a, &rhs).map_err(|e| e.in_context("dimension-raising system"))?;
    Ok(MissingData {
        x0: z.rows(x0, n).column(0).into_owned(),
        nu: z.rows(nu, k).column(0).into_owned(),
    })
}

/// Composite Simpson weights on `steps` intervals (unit spacing). Odd counts
/// close with the 3/8 rule on the last three intervals; a single interval
/// falls back to the trapezoid rule.
fn quadrature_weights(steps: usize) -> Vec<f64> {
    let mut w = vec![0.0; steps + 1];
    if steps == 1 {
        w[0] = 0.5;
        w[1] = 0.5;
        return w;
    }
    let simpson_end = if steps % 2 == 0 { steps } else { steps - 3 };
    for i in (0..simpson_end).step_by(2) {
        w[i] += 1.0 / 3.0;
        w[i + 1] += 4.0 / 3.0;
        w[i + 2] += 1.0 / 3.0;
    }
    if simpson_end < steps {
        let s = simpson_end;
        for (j, c) in [3.0, 9.0, 9.0, 3.0].iter().enumerate() {
            w[s + j] += c / 8.0;
        }
    }
    w
}

/// `½ ∫ (x'R x + u'C u) dt` by composite Simpson quadrature on the grid.
pub fn evaluate_cost(p: &LqProblem, x: &[Vector], u: &[Vector], grid: &Grid) -> Result<f64> {
    if x.len() != grid.len() || u.len() != grid.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} states and {} controls on a {}-node grid",
            x.len(),
            u.len(),
            grid.len()
        )));
    }
    let weights = quadrature_weights(grid.steps());
    let mut acc = 0.0;
    for (i, t) in grid.nodes().enumerate() {
        let r = p.r.eval(t)?;
        let c = p.c.eval(t)?;
        acc += weights[i] * (x[i].dot(&(&r * &x[i])) + u[i].dot(&(&c * &u[i])));
    }
    Ok(0.5 * acc * grid.h())
}

/// `‖Φ1 x0 − Φ2 x(τ) − q‖₂`.
pub fn boundary_residual(p: &LqProblem, x0: &Vector, x_tau: &Vector) -> f64 {
    (&p.phi1 * x0 - &p.phi2 * x_tau - p.q.column(0)).norm()
}

/// `|J + ½ ν'q|`, zero at the optimum.
pub fn duality_gap(p: &LqProblem, cost: f64, nu: &Vector) -> f64 {
    (cost + 0.5 * nu.dot(&p.q.column(0))).abs()
}

/// Largest node residual of `ẋ − F x − G u` with `ẋ` from second-order
/// finite differences on the grid.
pub fn dynamics_residual(p: &LqProblem, grid: &Grid, x: &[Vector], u: &[Vector]) -> Result<f64> {
    let h = grid.h();
    let last = grid.steps();
    let mut worst: f64 = 0.0;
    for (i, t) in grid.nodes().enumerate() {
        let xdot = if last == 1 {
            (&x[1] - &x[0]) / h
        } else if i == 0 {
            (&x[1] * 4.0 - &x[0] * 3.0 - &x[2]) / (2.0 * h)
        } else if i == last {
            (&x[last] * 3.0 - &x[last - 1] * 4.0 + &x[last - 2]) / (2.0 * h)
        } else {
            (&x[i + 1] - &x[i - 1]) / (2.0 * h)
        };
        let f = p.f.eval(t)?;
        let g = p.g.eval(t)?;
        worst = worst.max((xdot - f * &x[i] - g * &u[i]).amax());
    }
    Ok(worst)
}

/// `u = −C⁻¹ G' λ`.
fn control_from_costate(p: &LqProblem, t: f64, lambda: &Vector) -> Result<Vector> {
    Ok(-(p.c_inv_gt(t)? * lambda))
}

fn finish(
    p: &LqProblem,
    traj: &BlockTrajectory,
    md: &MissingData,
    x: Vec<Vector>,
    u: Vec<Vector>,
    lambda: Vec<Vector>,
) -> Result<Solution> {
    let grid = *traj.grid();
    let cost = evaluate_cost(p, &x, &u, &grid)?;
    let d_symmetry = build_sweep_system(p, traj.last())
        .map(|s| sweep_symmetry_residual(&s))
        .unwrap_or(f64::NAN);
    let diagnostics = Diagnostics {
        d_symmetry,
        symplectic_max: max_symplectic_residual(traj),
        bc_residual: boundary_residual(p, &x[0], x.last().expect("grid has nodes")),
        dynamics_residual: dynamics_residual(p, &grid, &x, &u)?,
        duality_gap: duality_gap(p, cost, &md.nu),
    };
    Ok(Solution {
        grid,
        x,
        u,
        lambda,
        x0: md.x0.clone(),
        nu: md.nu.clone(),
        cost,
        diagnostics,
    })
}

/// Synthesize `x(t)`, `λ(t)`, `u(t)` from the transition at every node:
/// `x = Φ11 x0 + Φ12 λ0`, `λ = Φ21 x0 + Φ22 λ0`, `u = −C⁻¹ G' λ`.
pub fn open_loop(p: &LqProblem, traj: &BlockTrajectory, md: &MissingData) -> Result<Solution> {
    let l0 = costate_initial(&md.nu, p);
    let mut x = Vec::with_capacity(traj.grid().len());
    let mut u = Vec::with_capacity(traj.grid().len());
    let mut lambda = Vec::with_capacity(traj.grid().len());
    for b in traj.blocks() {
        let xi = &b.phi11 * &md.x0 + &b.phi12 * &l0;
        let li = &b.phi21 * &md.x0 + &b.phi22 * &l0;
        u.push(control_from_costate(p, b.t, &li)?);
        x.push(xi);
        lambda.push(li);
    }
    finish(p, traj, md, x, u, lambda)
}

/// Costate as a function of the current state:
/// `λ = Φ21 Φ11⁻¹ x + (Φ22 − Φ21 Φ11⁻¹ Φ12) λ0`.
fn feedback_costate(b: &FundamentalBlocks, x: &Vector, l0: &Vector) -> Result<Vector> {
    let n = b.n();
    let mut rhs = Matrix::zeros(n, n + 1);
    rhs.column_mut(0).copy_from(x);
    rhs.columns_mut(1, n).copy_from(&b.phi12);
    let y = mat_solve(&b.phi11, &rhs).map_err(|e| e.in_context(&format!("Φ11 at t = {} (focal point)", b.t)))?;
    let phi11_inv_x = y.column(0);
    let phi11_inv_phi12 = y.columns(1, n);
    Ok(&b.phi21 * phi11_inv_x + (&b.phi22 - &b.phi21 * phi11_inv_phi12) * l0)
}

/// Feedback law `u(t, x)` valid wherever `Φ11(t, t0)` is invertible.
pub fn feedback_control(p: &LqProblem, b: &FundamentalBlocks, x: &Vector, nu: &Vector) -> Result<Vector> {
    let l0 = costate_initial(nu, p);
    control_from_costate(p, b.t, &feedback_costate(b, x, &l0)?)
}

/// Integrate `ẋ = F x + G u(t, x)` from `x0` under the feedback law.
pub fn closed_loop(p: &LqProblem, md: &MissingData, traj: &BlockTrajectory) -> Result<Solution> {
    let n = p.n;
    let grid = *traj.grid();
    let l0 = costate_initial(&md.nu, p);
    let x0 = Matrix::from_column_slice(n, 1, md.x0.as_slice());
    let xs = rk4_integrate(
        |t, x| {
            let b = traj.interpolate(p, t)?;
            let xv = x.column(0).into_owned();
            let u = control_from_costate(p, t, &feedback_costate(&b, &xv, &l0)?)?;
            let dx = p.f.eval(t)? * &xv + p.g.eval(t)? * u;
            Ok(Matrix::from_column_slice(n, 1, dx.as_slice()))
        },
        &x0,
        &grid,
    )?;

    let mut x = Vec::with_capacity(grid.len());
    let mut u = Vec::with_capacity(grid.len());
    let mut lambda = Vec::with_capacity(grid.len());
    for (b, xm) in traj.blocks().iter().zip(&xs) {
        let xi = xm.column(0).into_owned();
        let li = feedback_costate(b, &xi, &l0)?;
        u.push(control_from_costate(p, b.t, &li)?);
        x.push(xi);
        lambda.push(li);
    }
    finish(p, traj, md, x, u, lambda)
}
