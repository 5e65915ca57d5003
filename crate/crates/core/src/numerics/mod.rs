//! Dense real matrix utilities shared by every solver path.
//!
//! Everything here is a pure function of its inputs. Matrices are small
//! (desk-scale), dense and double precision.

mod band;
mod expm;
mod lu;
mod lyapunov;
mod ode;

pub use band::{BandLu, BandMatrix};
pub use expm::mat_expm;
pub use lu::{condition_estimate, determinant, mat_solve, rank, Lu, SINGULAR_CONDITION};
pub use lyapunov::{lyapunov_integral, lyapunov_solve};
pub use ode::rk4_integrate;

use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector};

pub type Matrix = DMatrix<f64>;
pub type Vector = DVector<f64>;

/// Build a matrix from a list of rows.
pub fn from_rows(rows: &[&[f64]]) -> Matrix {
    let r = rows.len();
    let c = rows.first().map_or(0, |row| row.len());
    assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
    Matrix::from_fn(r, c, |i, j| rows[i][j])
}

pub fn is_finite(a: &Matrix) -> bool {
    a.iter().all(|v| v.is_finite())
}

/// ‖A − A'‖_F / (1 + ‖A‖_F).
pub fn asymmetry(a: &Matrix) -> f64 {
    (a - a.transpose()).norm() / (1.0 + a.norm())
}

pub fn symmetrize(a: &Matrix) -> Matrix {
    (a + a.transpose()) * 0.5
}

/// Maximum absolute row sum.
pub fn norm_inf(a: &Matrix) -> f64 {
    a.row_iter()
        .map(|r| r.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Maximum absolute column sum.
pub fn norm_1(a: &Matrix) -> f64 {
    a.column_iter()
        .map(|c| c.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Smallest eigenvalue of the symmetric part of `a`.
pub fn min_symmetric_eigenvalue(a: &Matrix) -> f64 {
    let sym = symmetrize(a);
    sym.symmetric_eigenvalues()
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

/// Uniform time grid with `steps` intervals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    t_start: f64,
    t_end: f64,
    steps: usize,
}

impl Grid {
    pub fn new(t_start: f64, t_end: f64, steps: usize) -> Result<Self> {
        if !(t_start.is_finite() && t_end.is_finite()) || t_start >= t_end {
            return Err(Error::PreconditionViolated(format!(
                "grid needs finite t_start < t_end, got [{t_start}, {t_end}]"
            )));
        }
        if steps == 0 {
            return Err(Error::PreconditionViolated("grid needs at least one step".into()));
        }
        Ok(Self {
            t_start,
            t_end,
            steps,
        })
    }

    pub fn t_start(&self) -> f64 {
        self.t_start
    }

    pub fn t_end(&self) -> f64 {
        self.t_end
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn len(&self) -> usize {
        self.steps + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn h(&self) -> f64 {
        (self.t_end - self.t_start) / self.steps as f64
    }

    /// Time of node `i`; the last node is exactly `t_end`.
    pub fn node(&self, i: usize) -> f64 {
        if i == self.steps {
            self.t_end
        } else {
            self.t_start + i as f64 * (self.t_end - self.t_start) / self.steps as f64
        }
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..=self.steps).map(|i| self.node(i))
    }

    /// Index of the interval containing `t` and the local fraction in [0, 1].
    pub fn locate(&self, t: f64) -> (usize, f64) {
        let s = ((t - self.t_start) / self.h()).clamp(0.0, self.steps as f64);
        let i = (s.floor() as usize).min(self.steps - 1);
        (i, s - i as f64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_endpoints_exact() {
        let g = Grid::new(0.1, 0.7, 3).unwrap();
        assert_eq!(g.node(0), 0.1);
        assert_eq!(g.node(3), 0.7);
        let nodes: Vec<f64> = g.nodes().collect();
        assert!(nodes.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(g.len(), 4);
    }

    #[test]
    fn grid_rejects_bad_interval() {
        assert!(Grid::new(1.0, 1.0, 10).is_err());
        assert!(Grid::new(0.0, 1.0, 0).is_err());
        assert!(Grid::new(0.0, f64::NAN, 3).is_err());
    }

    #[test]
    fn locate_clamps() {
        let g = Grid::new(0.0, 1.0, 4).unwrap();
        assert_eq!(g.locate(1.0), (3, 1.0));
        assert_eq!(g.locate(0.0), (0, 0.0));
        let (i, f) = g.locate(0.6);
        assert_eq!(i, 2);
        assert!((f - 0.4).abs() < 1e-12);
    }

    #[test]
    fn asymmetry_of_strict_upper() {
        let a = from_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        assert!((asymmetry(&a) - 2f64.sqrt() / 2.0).abs() < 1e-15);
    }
}
