//! Direct transcription of the control problem into an equality-constrained
//! QP on a uniform grid, solved through its KKT system.
//!
//! Unknowns are stage-ordered so the KKT matrix is banded. The boundary
//! condition couples `x_0` and `x_N`; copy variables `c_i` with `c_0 = x_0`,
//! `c_{i+1} = c_i` carry `x_0` along the grid so the boundary rows only touch
//! the last stage.

use crate::error::{Error, Result};
use crate::numerics::{BandLu, BandMatrix, Grid, Matrix, Vector};
use crate::problem::LqProblem;

/// Upper limit on `N·(n+m)`.
pub const MAX_TRANSCRIPTION_SIZE: usize = 20_000;

#[derive(Debug, Clone)]
pub struct OracleSolution {
    pub grid: Grid,
    pub x: Vec<Vector>,
    pub u: Vec<Vector>,
    pub cost: f64,
    pub kkt_residual: f64,
}

struct Layout {
    n: usize,
    m: usize,
    stage: usize,
    steps: usize,
}

impl Layout {
    fn base(&self, i: usize) -> usize {
        i * self.stage
    }
    fn x(&self, i: usize) -> usize {
        self.base(i)
    }
    fn u(&self, i: usize) -> usize {
        self.base(i) + self.n
    }
    fn c(&self, i: usize) -> usize {
        self.base(i) + self.n + self.m
    }
    fn sigma(&self, i: usize) -> usize {
        self.base(i) + 2 * self.n + self.m
    }
    fn mu(&self, i: usize) -> usize {
        self.base(i) + 3 * self.n + self.m
    }
    fn nu(&self) -> usize {
        self.mu(self.steps)
    }
}

struct Kkt {
    entries: Vec<(usize, usize, f64)>,
}

impl Kkt {
    fn hessian(&mut self, at: usize, block: &Matrix, scale: f64) {
        for (i, j) in (0..block.nrows()).flat_map(|i| (0..block.ncols()).map(move |j| (i, j))) {
            let v = scale * block[(i, j)];
            if v != 0.0 {
                self.entries.push((at + i, at + j, v));
            }
        }
    }

    /// Constraint rows starting at `row` times variables starting at `var`,
    /// mirrored into the transposed block.
    fn constraint(&mut self, row: usize, var: usize, block: &Matrix) {
        for (i, j) in (0..block.nrows()).flat_map(|i| (0..block.ncols()).map(move |j| (i, j))) {
            let v = block[(i, j)];
            if v != 0.0 {
                self.entries.push((row + i, var + j, v));
                self.entries.push((var + j, row + i, v));
            }
        }
    }
}

/// Solve the trapezoidal-collocation transcription on `steps` intervals.
pub fn oracle_solve(p: &LqProblem, steps: usize) -> Result<OracleSolution> {
    p.check_shapes()?;
    let (n, m, k) = (p.n, p.m, p.k);
    if steps < 10 {
        return Err(Error::PreconditionViolated(format!("oracle needs N ≥ 10, got {steps}")));
    }
    if steps * (n + m) > MAX_TRANSCRIPTION_SIZE {
        return Err(Error::PreconditionViolated(format!(
            "oracle size N·(n+m) = {} exceeds {MAX_TRANSCRIPTION_SIZE}",
            steps * (n + m)
        )));
    }
    let grid = p.grid(steps)?;
    let h = grid.h();
    let lay = Layout {
        n,
        m,
        stage: 4 * n + m,
        steps,
    };
    let dim = lay.nu() + k;

    let mut f = Vec::with_capacity(grid.len());
    let mut g = Vec::with_capacity(grid.len());
    let mut r = Vec::with_capacity(grid.len());
    let mut c = Vec::with_capacity(grid.len());
    for t in grid.nodes() {
        f.push(p.f.eval(t)?);
        g.push(p.g.eval(t)?);
        r.push(p.r.eval(t)?);
        c.push(p.c.eval(t)?);
    }

    let e = Matrix::identity(n, n);
    let weight = |i: usize| if i == 0 || i == steps { 0.5 * h } else { h };
    let mut kkt = Kkt { entries: Vec::new() };
    for i in 0..=steps {
        kkt.hessian(lay.x(i), &r[i], weight(i));
        kkt.hessian(lay.u(i), &c[i], weight(i));
        if i == 0 {
            kkt.constraint(lay.sigma(0), lay.c(0), &e);
            kkt.constraint(lay.sigma(0), lay.x(0), &(-&e));
        } else {
            kkt.constraint(lay.sigma(i), lay.c(i), &e);
            kkt.constraint(lay.sigma(i), lay.c(i - 1), &(-&e));
        }
        if i < steps {
            let row = lay.mu(i);
            kkt.constraint(row, lay.x(i), &(-(&e + &f[i] * (0.5 * h))));
            kkt.constraint(row, lay.u(i), &(&g[i] * (-0.5 * h)));
            kkt.constraint(row, lay.x(i + 1), &(&e - &f[i + 1] * (0.5 * h)));
            kkt.constraint(row, lay.u(i + 1), &(&g[i + 1] * (-0.5 * h)));
        }
    }
    kkt.constraint(lay.nu(), lay.c(steps), &p.phi1);
    kkt.constraint(lay.nu(), lay.x(steps), &(-&p.phi2));

    let mut rhs = vec![0.0; dim];
    rhs[lay.nu()..].copy_from_slice(p.q.as_slice());

    let a = BandMatrix::from_triplets(dim, &kkt.entries);
    let lu = BandLu::new(&a).map_err(|e| e.in_context("transcription KKT system"))?;
    let mut z = lu.solve(&rhs);
    // one step of iterative refinement
    let res: Vec<f64> = a.mul_vec(&z).iter().zip(&rhs).map(|(az, b)| b - az).collect();
    for (zi, d) in z.iter_mut().zip(lu.solve(&res)) {
        *zi += d;
    }

    let az = a.mul_vec(&z);
    let res_inf = az.iter().zip(&rhs).fold(0.0f64, |acc, (u, v)| acc.max((u - v).abs()));
    let z_inf = z.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    let b_inf = rhs.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    let a_inf = row_sum_norm(&a);
    let kkt_residual = res_inf / (a_inf * z_inf + b_inf).max(f64::MIN_POSITIVE);

    let x: Vec<Vector> = (0..=steps)
        .map(|i| Vector::from_column_slice(&z[lay.x(i)..lay.x(i) + n]))
        .collect();
    let u: Vec<Vector> = (0..=steps)
        .map(|i| Vector::from_column_slice(&z[lay.u(i)..lay.u(i) + m]))
        .collect();
    let cost = 0.5
        * (0..=steps)
            .map(|i| weight(i) * (x[i].dot(&(&r[i] * &x[i])) + u[i].dot(&(&c[i] * &u[i]))))
            .sum::<f64>();

    if !(cost.is_finite() && kkt_residual.is_finite()) {
        return Err(Error::NonFiniteState { t: p.tau });
    }
    Ok(OracleSolution {
        grid,
        x,
        u,
        cost,
        kkt_residual,
    })
}

fn row_sum_norm(a: &BandMatrix) -> f64 {
    let (kl, ku) = a.bandwidths();
    (0..a.dim())
        .map(|i| {
            (i.saturating_sub(kl)..(i + ku + 1).min(a.dim()))
                .map(|j| a.get(i, j).abs())
                .sum::<f64>()
        })
        .fold(0.0, f64::max)
}
