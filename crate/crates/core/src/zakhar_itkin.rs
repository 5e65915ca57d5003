//! Fundamental-matrix blocks from three `n×n` flows `ψ`, `W`, `V` instead of
//! one `2n×2n` matrix.
//!
//! Sign convention (checked against direct integration of `Φ̇ = HΦ`):
//!
//! ```text
//! ψ̇ = (F − W R) ψ,               ψ(t0) = E
//! Ẇ = F W + W F' − W R W + G C⁻¹ G',  W(t0) = 0
//! V̇ = ψ' R ψ,                     V(t0) = 0
//! ```
//!
//! and the blocks are recovered as
//!
//! ```text
//! Φ22 = (ψ')⁻¹    Φ12 = −W (ψ')⁻¹    Φ21 = −(ψ')⁻¹ V    Φ11 = ψ + W (ψ')⁻¹ V
//! ```
//!
//! so `W = −Φ12 Φ22⁻¹` and `V = −Φ22⁻¹ Φ21`, both symmetric along the flow.
//! The textbook form with `Ẇ = … + W R W − G C⁻¹ G'` and `ψ̇ = (F + W R) ψ`
//! is the same flow for `−W`.

use crate::error::{Error, Result};
use crate::hamiltonian::{BlockTrajectory, FundamentalBlocks};
use crate::numerics::{lyapunov_solve, mat_expm, mat_solve, rk4_integrate, Grid, Matrix};
use crate::problem::LqProblem;

#[derive(Debug, Clone, PartialEq)]
pub struct PsiWvState {
    pub t: f64,
    pub psi: Matrix,
    pub w: Matrix,
    pub v: Matrix,
}

impl PsiWvState {
    pub fn initial(t: f64, n: usize) -> Self {
        Self {
            t,
            psi: Matrix::identity(n, n),
            w: Matrix::zeros(n, n),
            v: Matrix::zeros(n, n),
        }
    }
}

/// Shape of the stacked `[ψ | W | V]` state advanced by the integrator.
pub fn stacked_state_shape(n: usize) -> (usize, usize) {
    (n, 3 * n)
}

/// Number of scalar unknowns the factorized method integrates.
pub fn factor_state_len(n: usize) -> usize {
    let (r, c) = stacked_state_shape(n);
    r * c
}

fn split(n: usize, t: f64, y: &Matrix) -> PsiWvState {
    PsiWvState {
        t,
        psi: y.columns(0, n).into_owned(),
        w: y.columns(n, n).into_owned(),
        v: y.columns(2 * n, n).into_owned(),
    }
}

pub fn integrate_psi_w_v(p: &LqProblem, grid: &Grid) -> Result<Vec<PsiWvState>> {
    let n = p.n;
    let (rows, cols) = stacked_state_shape(n);
    let mut y0 = Matrix::zeros(rows, cols);
    y0.columns_mut(0, n).fill_with_identity();

    let ys = rk4_integrate(
        |t, y| {
            let f = p.f.eval(t)?;
            let r = p.r.eval(t)?;
            let s = p.control_gain(t)?;
            let psi = y.columns(0, n);
            let w = y.columns(n, n);
            let wr = w * &r;
            let mut dy = Matrix::zeros(rows, cols);
            dy.columns_mut(0, n).copy_from(&((&f - &wr) * psi));
            let fw = &f * w;
            dy.columns_mut(n, n)
                .copy_from(&(&fw + fw.transpose() - &wr * w + s));
            dy.columns_mut(2 * n, n)
                .copy_from(&(psi.transpose() * &r * psi));
            Ok(dy)
        },
        &y0,
        grid,
    )?;
    Ok(grid.nodes().zip(&ys).map(|(t, y)| split(n, t, y)).collect())
}

pub fn blocks_from_factors(s: &PsiWvState) -> Result<FundamentalBlocks> {
    let n = s.psi.nrows();
    let phi22 = mat_solve(&s.psi.transpose(), &Matrix::identity(n, n))
        .map_err(|e| e.in_context(&format!("ψ at t = {} (factorization breakdown, use the direct method)", s.t)))?;
    let w_phi22 = &s.w * &phi22;
    Ok(FundamentalBlocks {
        t: s.t,
        phi11: &s.psi + &w_phi22 * &s.v,
        phi12: -w_phi22,
        phi21: -(&phi22 * &s.v),
        phi22,
    })
}

/// Integrate the factors and convert every node to blocks.
pub fn factorized_trajectory(p: &LqProblem, grid: &Grid) -> Result<BlockTrajectory> {
    let blocks = integrate_psi_w_v(p, grid)?
        .iter()
        .map(blocks_from_factors)
        .collect::<Result<Vec<_>>>()?;
    BlockTrajectory::new(*grid, blocks)
}

/// Closed form for constant `F`, `G`, `C` with `R ≡ 0`:
/// `ψ = e^{F s}`, `W = e^{F s} W1 e^{F' s} − W1` with `F W1 + W1 F' = G C⁻¹ G'`,
/// `V = 0`, where `s = t − t0`.
pub fn stationary_blocks(p: &LqProblem, t: f64) -> Result<FundamentalBlocks> {
    StationaryFactors::new(p)?.blocks(t)
}

/// Lyapunov solution cached across many evaluation times.
#[derive(Debug, Clone)]
pub struct StationaryFactors {
    f: Matrix,
    w1: Matrix,
    t0: f64,
}

impl StationaryFactors {
    pub fn new(p: &LqProblem) -> Result<Self> {
        if !p.is_constant() {
            return Err(Error::PreconditionViolated(
                "stationary blocks need constant F, G, R, C".into(),
            ));
        }
        let r = p.r.eval(p.t0)?;
        if r.amax() != 0.0 {
            return Err(Error::PreconditionViolated("stationary blocks need R = 0".into()));
        }
        let f = p.f.eval(p.t0)?;
        let s = p.control_gain(p.t0)?;
        let w1 = lyapunov_solve(&f, &crate::numerics::symmetrize(&s))?;
        Ok(Self { f, w1, t0: p.t0 })
    }

    pub fn w1(&self) -> &Matrix {
        &self.w1
    }

    pub fn blocks(&self, t: f64) -> Result<FundamentalBlocks> {
        let dt = t - self.t0;
        let n = self.f.nrows();
        if dt == 0.0 {
            return Ok(FundamentalBlocks::identity(t, n));
        }
        let psi = mat_expm(&(&self.f * dt))?;
        let phi22 = mat_expm(&(self.f.transpose() * -dt))?;
        let w = &psi * &self.w1 * psi.transpose() - &self.w1;
        Ok(FundamentalBlocks {
            t,
            phi11: psi,
            phi12: -(w * &phi22),
            phi21: Matrix::zeros(n, n),
            phi22,
        })
    }
}

pub fn stationary_trajectory(p: &LqProblem, grid: &Grid) -> Result<BlockTrajectory> {
    let sf = StationaryFactors::new(p)?;
    let blocks = grid.nodes().map(|t| sf.blocks(t)).collect::<Result<Vec<_>>>()?;
    BlockTrajectory::new(*grid, blocks)
}
