//! The LQ problem instance: dynamics `ẋ = F x + G u`, the coupled boundary
//! condition `Φ1 x(t0) − Φ2 x(τ) = q`, and the cost
//! `J = ½ ∫ (x'R x + u'C u) dt`.

mod file;
mod validate;

pub use file::{parse_problem, serialize_problem};
pub use validate::{controllability_gramian, validate, Finding, Severity, ValidationReport};

use crate::error::{Error, Result};
use crate::numerics::{mat_solve, Grid, Matrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Interp {
    Linear,
    /// Hold the latest sample; models jump discontinuities.
    Previous,
}

/// A matrix-valued function of time.
#[derive(Debug, Clone, PartialEq)]
pub enum TimeMatrix {
    Constant(Matrix),
    Sampled {
        times: Vec<f64>,
        values: Vec<Matrix>,
        interp: Interp,
    },
}

impl From<Matrix> for TimeMatrix {
    fn from(m: Matrix) -> Self {
        TimeMatrix::Constant(m)
    }
}

impl TimeMatrix {
    pub fn sampled(times: Vec<f64>, values: Vec<Matrix>, interp: Interp) -> Result<Self> {
        if times.is_empty() || times.len() != values.len() {
            return Err(Error::PreconditionViolated(format!(
                "{} sample times for {} values",
                times.len(),
                values.len()
            )));
        }
        if times.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::PreconditionViolated("times not increasing".into()));
        }
        let shape = values[0].shape();
        if values.iter().any(|v| v.shape() != shape) {
            return Err(Error::PreconditionViolated("sampled values differ in shape".into()));
        }
        Ok(TimeMatrix::Sampled {
            times,
            values,
            interp,
        })
    }

    pub fn shape(&self) -> (usize, usize) {
        match self {
            TimeMatrix::Constant(m) => m.shape(),
            TimeMatrix::Sampled { values, .. } => values[0].shape(),
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, TimeMatrix::Constant(_))
    }

    /// Sample range, or `None` for constants.
    pub fn coverage(&self) -> Option<(f64, f64)> {
        match self {
            TimeMatrix::Constant(_) => None,
            TimeMatrix::Sampled { times, .. } => Some((times[0], times[times.len() - 1])),
        }
    }

    /// Every value the function takes at its samples (one for constants).
    pub fn sample_values(&self) -> &[Matrix] {
        match self {
            TimeMatrix::Constant(m) => std::slice::from_ref(m),
            TimeMatrix::Sampled { values, .. } => values,
        }
    }

    pub fn eval(&self, t: f64) -> Result<Matrix> {
        let (times, values, interp) = match self {
            TimeMatrix::Constant(m) => return Ok(m.clone()),
            TimeMatrix::Sampled {
                times,
                values,
                interp,
            } => (times, values, *interp),
        };
        let (start, end) = (times[0], times[times.len() - 1]);
        // Grid arithmetic may land an ulp outside the covered range.
        let slack = 1e-12 * (1.0 + start.abs().max(end.abs()));
        if !(t >= start - slack && t <= end + slack) {
            return Err(Error::OutOfRange { t, start, end });
        }
        let t = t.clamp(start, end);
        // Last sample index with time <= t.
        let i = times.partition_point(|&s| s <= t).saturating_sub(1);
        if i + 1 == times.len() {
            return Ok(values[i].clone());
        }
        match interp {
            Interp::Previous => Ok(values[i].clone()),
            Interp::Linear => {
                let w = (t - times[i]) / (times[i + 1] - times[i]);
                Ok(&values[i] * (1.0 - w) + &values[i + 1] * w)
            }
        }
    }
}

/// Free-function form of [`TimeMatrix::eval`].
pub fn eval_time_matrix(tm: &TimeMatrix, t: f64) -> Result<Matrix> {
    tm.eval(t)
}

#[derive(Debug, Clone, PartialEq)]
pub struct LqProblem {
    pub n: usize,
    pub m: usize,
    pub k: usize,
    pub f: TimeMatrix,
    pub g: TimeMatrix,
    pub r: TimeMatrix,
    pub c: TimeMatrix,
    pub phi1: Matrix,
    pub phi2: Matrix,
    /// `k×1`
    pub q: Matrix,
    pub t0: f64,
    pub tau: f64,
}

impl LqProblem {
    /// Build a problem, taking the dimensions from `F`, `G` and `Φ1`.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        f: impl Into<TimeMatrix>,
        g: impl Into<TimeMatrix>,
        r: impl Into<TimeMatrix>,
        c: impl Into<TimeMatrix>,
        phi1: Matrix,
        phi2: Matrix,
        q: Matrix,
        t0: f64,
        tau: f64,
    ) -> Result<Self> {
        let (f, g) = (f.into(), g.into());
        let p = Self {
            n: f.shape().0,
            m: g.shape().1,
            k: phi1.nrows(),
            f,
            g,
            r: r.into(),
            c: c.into(),
            phi1,
            phi2,
            q,
            t0,
            tau,
        };
        p.check_shapes()?;
        Ok(p)
    }

    /// Every shape disagreement with the declared `n`, `m`, `k`.
    pub fn shape_errors(&self) -> Vec<Error> {
        let (n, m, k) = (self.n, self.m, self.k);
        let checks: [(&str, (usize, usize), (usize, usize)); 7] = [
            ("F", self.f.shape(), (n, n)),
            ("G", self.g.shape(), (n, m)),
            ("R", self.r.shape(), (n, n)),
            ("C", self.c.shape(), (m, m)),
            ("Phi1", self.phi1.shape(), (k, n)),
            ("Phi2", self.phi2.shape(), (k, n)),
            ("q", self.q.shape(), (k, 1)),
        ];
        let mut errs = Vec::new();
        if n == 0 || m == 0 || k == 0 {
            errs.push(Error::Shape {
                field: "n/m/k".into(),
                expected: "positive dimensions".into(),
                found: format!("n={n}, m={m}, k={k}"),
            });
        }
        for (field, found, expected) in checks {
            if found != expected {
                errs.push(Error::Shape {
                    field: field.into(),
                    expected: format!("{}x{}", expected.0, expected.1),
                    found: format!("{}x{}", found.0, found.1),
                });
            }
        }
        errs
    }

    pub fn check_shapes(&self) -> Result<()> {
        match self.shape_errors().into_iter().next() {
            Some(e) => Err(e),
            None => Ok(()),
        }
    }

    pub fn grid(&self, steps: usize) -> Result<Grid> {
        Grid::new(self.t0, self.tau, steps)
    }

    pub fn is_constant(&self) -> bool {
        self.f.is_constant() && self.g.is_constant() && self.r.is_constant() && self.c.is_constant()
    }

    /// `C⁻¹(t)·G'(t)`, the map from costate to control (up to sign).
    pub fn c_inv_gt(&self, t: f64) -> Result<Matrix> {
        let c = self.c.eval(t)?;
        let g = self.g.eval(t)?;
        mat_solve(&c, &g.transpose()).map_err(|e| e.in_context("control weight C"))
    }

    /// `S(t) = G(t)·C⁻¹(t)·G'(t)`.
    pub fn control_gain(&self, t: f64) -> Result<Matrix> {
        let g = self.g.eval(t)?;
        Ok(&g * self.c_inv_gt(t)?)
    }
}
