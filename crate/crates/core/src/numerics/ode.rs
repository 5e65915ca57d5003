use super::{is_finite, Grid, Matrix};
use crate::error::{Error, Result};

/// Classical fixed-step Runge-Kutta 4 for matrix-valued ODEs `Ẏ = f(t, Y)`.
///
/// Returns one value per grid node, starting with `y0`.
pub fn rk4_integrate<F>(rhs: F, y0: &Matrix, grid: &Grid) -> Result<Vec<Matrix>>
where
    F: Fn(f64, &Matrix) -> Result<Matrix>,
{
    if !is_finite(y0) {
        return Err(Error::NonFiniteState { t: grid.t_start() });
    }
    let h = grid.h();
    let mut out = Vec::with_capacity(grid.len());
    out.push(y0.clone());
    let mut y = y0.clone();
    for i in 0..grid.steps() {
        let t = grid.node(i);
        let t_next = grid.node(i + 1);
        let tm = t + 0.5 * h;

        let k1 = rhs(t, &y)?;
        if k1.shape() != y.shape() {
            return Err(Error::DimensionMismatch(format!(
                "rhs returned {:?}, state is {:?}",
                k1.shape(),
                y.shape()
            )));
        }
        let k2 = rhs(tm, &(&y + &k1 * (0.5 * h)))?;
        let k3 = rhs(tm, &(&y + &k2 * (0.5 * h)))?;
        let k4 = rhs(t_next, &(&y + &k3 * h))?;
        y += (k1 + (k2 + k3) * 2.0 + k4) * (h / 6.0);

        if !is_finite(&y) {
            return Err(Error::NonFiniteState { t: t_next });
        }
        out.push(y.clone());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{from_rows, mat_expm};

    #[test]
    fn zero_rhs_keeps_initial_value() {
        let g = Grid::new(0.0, 3.0, 17).unwrap();
        let ys = rk4_integrate(|_, y| Ok(Matrix::zeros(y.nrows(), y.ncols())), &Matrix::identity(3, 3), &g)
            .unwrap();
        assert_eq!(ys.len(), 18);
        assert!(ys.iter().all(|y| *y == Matrix::identity(3, 3)));
    }

    #[test]
    fn scalar_exponential() {
        let g = Grid::new(0.0, 1.0, 1000).unwrap();
        let ys = rk4_integrate(|_, y| Ok(y.clone()), &from_rows(&[&[1.0]]), &g).unwrap();
        assert!((ys[1000][(0, 0)] - std::f64::consts::E).abs() < 1e-9);
    }

    #[test]
    fn constant_coefficient_matches_expm() {
        let h = from_rows(&[&[0.0, -1.0], &[-1.0, 0.0]]);
        let g = Grid::new(0.0, 1.0, 2000).unwrap();
        let ys = rk4_integrate(|_, y| Ok(&h * y), &Matrix::identity(2, 2), &g).unwrap();
        let want = mat_expm(&h).unwrap();
        assert!((&ys[2000] - want).amax() < 1e-10);
    }

    #[test]
    fn blow_up_is_reported() {
        // ẏ = y² from y(0) = 1 escapes at t = 1.
        let g = Grid::new(0.0, 2.0, 200).unwrap();
        let err = rk4_integrate(|_, y| Ok(y.component_mul(y)), &from_rows(&[&[1.0]]), &g).unwrap_err();
        match err {
            Error::NonFiniteState { t } => assert!(t > 0.9 && t <= 2.0),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rhs_errors_propagate() {
        let g = Grid::new(0.0, 1.0, 4).unwrap();
        let err = rk4_integrate(
            |t, y| {
                if t > 0.5 {
                    Err(Error::OutOfRange { t, start: 0.0, end: 0.5 })
                } else {
                    Ok(y.clone())
                }
            },
            &from_rows(&[&[1.0]]),
            &g,
        )
        .unwrap_err();
        assert!(matches!(err, Error::OutOfRange { .. }));
    }
}
