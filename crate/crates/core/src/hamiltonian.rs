//! The Euler-Lagrange system `[ẋ; λ̇] = H(t)·[x; λ]` and its fundamental matrix.
//!
//! `H(t) = [[F, −G C⁻¹ G'], [−R, −F']]`. The (2,1) block is `−R`: this is
//! the sign that yields `λ̇ = −R x − F' λ` together with the transversality
//! conditions `λ(t0) = −Φ1'ν`, `λ(τ) = −Φ2'ν` for the cost `½∫(x'Rx + u'Cu)`.

use crate::error::{Error, Result};
use crate::numerics::{rk4_integrate, Grid, Matrix};
use crate::problem::LqProblem;

/// The four `n×n` blocks of `Φ(t, t0)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FundamentalBlocks {
    pub t: f64,
    pub phi11: Matrix,
    pub phi12: Matrix,
    pub phi21: Matrix,
    pub phi22: Matrix,
}

impl FundamentalBlocks {
    /// `Φ(t0, t0) = E`.
    pub fn identity(t: f64, n: usize) -> Self {
        Self {
            t,
            phi11: Matrix::identity(n, n),
            phi12: Matrix::zeros(n, n),
            phi21: Matrix::zeros(n, n),
            phi22: Matrix::identity(n, n),
        }
    }

    pub fn from_full(t: f64, phi: &Matrix) -> Self {
        let n = phi.nrows() / 2;
        assert_eq!(phi.shape(), (2 * n, 2 * n), "fundamental matrix must be 2n×2n");
        Self {
            t,
            phi11: phi.view((0, 0), (n, n)).into_owned(),
            phi12: phi.view((0, n), (n, n)).into_owned(),
            phi21: phi.view((n, 0), (n, n)).into_owned(),
            phi22: phi.view((n, n), (n, n)).into_owned(),
        }
    }

    pub fn to_full(&self) -> Matrix {
        let n = self.n();
        let mut phi = Matrix::zeros(2 * n, 2 * n);
        phi.view_mut((0, 0), (n, n)).copy_from(&self.phi11);
        phi.view_mut((0, n), (n, n)).copy_from(&self.phi12);
        phi.view_mut((n, 0), (n, n)).copy_from(&self.phi21);
        phi.view_mut((n, n), (n, n)).copy_from(&self.phi22);
        phi
    }

    pub fn n(&self) -> usize {
        self.phi11.nrows()
    }

    /// Largest entrywise difference across all four blocks.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        [
            (&self.phi11 - &other.phi11).amax(),
            (&self.phi12 - &other.phi12).amax(),
            (&self.phi21 - &other.phi21).amax(),
            (&self.phi22 - &other.phi22).amax(),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

/// `Φ(t, t0)` at every node of a grid.
#[derive(Debug, Clone)]
pub struct BlockTrajectory {
    grid: Grid,
    blocks: Vec<FundamentalBlocks>,
}

impl BlockTrajectory {
    pub fn new(grid: Grid, blocks: Vec<FundamentalBlocks>) -> Result<Self> {
        if blocks.len() != grid.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} block sets for {} grid nodes",
                blocks.len(),
                grid.len()
            )));
        }
        Ok(Self { grid, blocks })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn blocks(&self) -> &[FundamentalBlocks] {
        &self.blocks
    }

    pub fn at(&self, i: usize) -> &FundamentalBlocks {
        &self.blocks[i]
    }

    pub fn last(&self) -> &FundamentalBlocks {
        self.blocks.last().expect("trajectory is never empty")
    }

    pub fn n(&self) -> usize {
        self.blocks[0].n()
    }

    /// Blocks at an arbitrary time by cubic Hermite interpolation between
    /// nodes, using `Φ̇ = H Φ` for the node slopes. Fourth-order accurate,
    /// so it keeps RK4 stages at half-steps consistent with the grid.
    pub fn interpolate(&self, p: &LqProblem, t: f64) -> Result<FundamentalBlocks> {
        let (i, s) = self.grid.locate(t);
        if s == 0.0 {
            return Ok(FundamentalBlocks { t, ..self.blocks[i].clone() });
        }
        if s == 1.0 {
            return Ok(FundamentalBlocks { t, ..self.blocks[i + 1].clone() });
        }
        let h = self.grid.h();
        let (t0, t1) = (self.grid.node(i), self.grid.node(i + 1));
        let y0 = self.blocks[i].to_full();
        let y1 = self.blocks[i + 1].to_full();
        let d0 = assemble_h(p, t0)? * &y0;
        let d1 = assemble_h(p, t1)? * &y1;
        let (s2, s3) = (s * s, s * s * s);
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        let y = y0 * h00 + d0 * (h10 * h) + y1 * h01 + d1 * (h11 * h);
        Ok(FundamentalBlocks::from_full(t, &y))
    }
}

/// `H(t) = [[F, −G C⁻¹ G'], [−R, −F']]`.
pub fn assemble_h(p: &LqProblem, t: f64) -> Result<Matrix> {
    let n = p.n;
    let f = p.f.eval(t)?;
    let r = p.r.eval(t)?;
    let s = p.control_gain(t)?;
    let mut h = Matrix::zeros(2 * n, 2 * n);
    h.view_mut((0, 0), (n, n)).copy_from(&f);
    h.view_mut((0, n), (n, n)).copy_from(&(-s));
    h.view_mut((n, 0), (n, n)).copy_from(&(-r));
    h.view_mut((n, n), (n, n)).copy_from(&(-f.transpose()));
    Ok(h)
}

/// `J = [[0, E], [−E, 0]]`.
pub fn j_matrix(n: usize) -> Matrix {
    let mut j = Matrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        j[(i, n + i)] = 1.0;
        j[(n + i, i)] = -1.0;
    }
    j
}

/// `‖J H − (J H)'‖₂ / (1 + ‖H‖₂)`; zero exactly when `H` is Hamiltonian.
pub fn hamiltonian_residual(h: &Matrix) -> f64 {
    assert!(
        h.is_square() && h.nrows() % 2 == 0,
        "Hamiltonian residual needs an even square matrix"
    );
    let jh = j_matrix(h.nrows() / 2) * h;
    spectral_norm(&(&jh - jh.transpose())) / (1.0 + spectral_norm(h))
}

fn spectral_norm(a: &Matrix) -> f64 {
    a.singular_values().iter().copied().fold(0.0, f64::max)
}

/// Integrate `Φ̇ = H(t)·Φ`, `Φ(t0) = E` and split every node into blocks.
pub fn fundamental_direct(p: &LqProblem, grid: &Grid) -> Result<BlockTrajectory> {
    let n = p.n;
    let phis = rk4_integrate(
        |t, phi| Ok(assemble_h(p, t)? * phi),
        &Matrix::identity(2 * n, 2 * n),
        grid,
    )?;
    let blocks = grid
        .nodes()
        .zip(&phis)
        .map(|(t, phi)| FundamentalBlocks::from_full(t, phi))
        .collect();
    BlockTrajectory::new(*grid, blocks)
}

/// Number of scalar unknowns the direct method integrates: one `2n×2n` matrix.
pub fn direct_state_len(n: usize) -> usize {
    4 * n * n
}

/// Largest Frobenius residual of the four block identities of a symplectic
/// transition matrix (`Φ J Φ' = J` written blockwise).
pub fn symplectic_residual(b: &FundamentalBlocks) -> f64 {
    let e = Matrix::identity(b.n(), b.n());
    let (a11, a12, a21, a22) = (&b.phi11, &b.phi12, &b.phi21, &b.phi22);
    let r1 = a22 * a11.transpose() - a21 * a12.transpose() - &e;
    let r2 = a22 * a21.transpose() - a21 * a22.transpose();
    let r3 = a11 * a12.transpose() - a12 * a11.transpose();
    let r4 = a11 * a22.transpose() - a12 * a21.transpose() - &e;
    [r1.norm(), r2.norm(), r3.norm(), r4.norm()]
        .into_iter()
        .fold(0.0, f64::max)
}

/// Worst symplectic residual over a whole trajectory.
pub fn max_symplectic_residual(traj: &BlockTrajectory) -> f64 {
    traj.blocks().iter().map(symplectic_residual).fold(0.0, f64::max)
}
