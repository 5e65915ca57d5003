use super::{asymmetry, mat_expm, mat_solve, symmetrize, Matrix};
use crate::error::{Error, Result};

/// Solve `F·W + W·F' = S` through the vectorized `n²×n²` system
/// `(I ⊗ F + F ⊗ I)·vec(W) = vec(S)`.
///
/// Fails with `SingularMatrix` when some pair of eigenvalues of `F` sums to
/// (nearly) zero.
pub fn lyapunov_solve(f: &Matrix, s: &Matrix) -> Result<Matrix> {
    let n = f.nrows();
    if !f.is_square() || s.shape() != (n, n) {
        return Err(Error::DimensionMismatch(format!(
            "Lyapunov operands {:?} and {:?}",
            f.shape(),
            s.shape()
        )));
    }
    if asymmetry(s) > 1e-9 {
        return Err(Error::PreconditionViolated("Lyapunov right-hand side is not symmetric".into()));
    }
    let eye = Matrix::identity(n, n);
    let op = eye.kronecker(f) + f.kronecker(&eye);
    // nalgebra storage is column-major, so the raw slice is vec(·).
    let rhs = Matrix::from_column_slice(n * n, 1, s.as_slice());
    let w = mat_solve(&op, &rhs).map_err(|e| e.in_context("Lyapunov operator (resonant spectrum)"))?;
    Ok(symmetrize(&Matrix::from_column_slice(n, n, w.as_slice())))
}

/// `W = −∫₀^horizon e^{F t}·S·e^{F' t} dt` by the trapezoid rule.
///
/// For Hurwitz `F` and a long enough horizon this approximates the solution
/// of `F·W + W·F' = S`; it shares no code with [`lyapunov_solve`] beyond the
/// matrix exponential of a single step.
pub fn lyapunov_integral(f: &Matrix, s: &Matrix, horizon: f64, steps: usize) -> Result<Matrix> {
    let n = f.nrows();
    if !f.is_square() || s.shape() != (n, n) {
        return Err(Error::DimensionMismatch(format!(
            "Lyapunov operands {:?} and {:?}",
            f.shape(),
            s.shape()
        )));
    }
    if !(horizon > 0.0) || steps == 0 {
        return Err(Error::PreconditionViolated(
            "Lyapunov integral needs a positive horizon and at least one step".into(),
        ));
    }
    let decay = mat_expm(&(f * horizon))?.norm();
    if !(decay < 1e-8) {
        return Err(Error::NotHurwitz { decay });
    }

    let h = horizon / steps as f64;
    let step = mat_expm(&(f * h))?;
    let mut prop = Matrix::identity(n, n);
    let mut acc = s * 0.5;
    for i in 1..=steps {
        prop = &step * &prop;
        let term = &prop * s * prop.transpose();
        if i == steps {
            acc += term * 0.5;
        } else {
            acc += term;
        }
    }
    Ok(symmetrize(&(acc * (-h))))
}
