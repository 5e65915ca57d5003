//! End-to-end solve: fundamental blocks, missing data, trajectory synthesis.

use crate::error::{Error, Result};
use crate::hamiltonian::{fundamental_direct, BlockTrajectory};
use crate::numerics::{min_symmetric_eigenvalue, rank, Grid, Matrix};
use crate::problem::{controllability_gramian, LqProblem};
use crate::sweep::{
    augmented_solve, build_sweep_system, closed_loop, open_loop, solve_missing_data, MissingData, Solution,
};
use crate::zakhar_itkin::{factorized_trajectory, stationary_trajectory};
use serde::Serialize;
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    /// Symmetric missing-data system, open-loop synthesis.
    Sweep,
    /// Joint system in all endpoint unknowns, open-loop synthesis.
    Augmented,
    /// Missing-data system, trajectory from the closed-loop feedback law.
    Feedback,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Fundamental {
    Direct,
    ZakharItkin,
    /// Closed form for constant coefficients with `R = 0`.
    Stationary,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Sweep => "sweep",
            Method::Augmented => "augmented",
            Method::Feedback => "feedback",
        }
    }
}

impl Fundamental {
    pub fn as_str(self) -> &'static str {
        match self {
            Fundamental::Direct => "direct",
            Fundamental::ZakharItkin => "zakhar-itkin",
            Fundamental::Stationary => "stationary",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

impl fmt::Display for Fundamental {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "sweep" => Ok(Method::Sweep),
            "augmented" => Ok(Method::Augmented),
            "feedback" => Ok(Method::Feedback),
            _ => Err(format!("unknown method `{s}` (sweep, augmented, feedback)")),
        }
    }
}

impl FromStr for Fundamental {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "direct" => Ok(Fundamental::Direct),
            "zakhar-itkin" => Ok(Fundamental::ZakharItkin),
            "stationary" => Ok(Fundamental::Stationary),
            _ => Err(format!("unknown fundamental `{s}` (direct, zakhar-itkin, stationary)")),
        }
    }
}

pub fn block_trajectory(p: &LqProblem, grid: &Grid, fundamental: Fundamental) -> Result<BlockTrajectory> {
    match fundamental {
        Fundamental::Direct => fundamental_direct(p, grid),
        Fundamental::ZakharItkin => factorized_trajectory(p, grid),
        Fundamental::Stationary => stationary_trajectory(p, grid),
    }
}

/// Likely causes of a singular missing-data system, as one line.
pub fn singular_hint(p: &LqProblem) -> String {
    let mut hints = Vec::new();
    if p.r.sample_values().iter().all(|r| r.amax() == 0.0) {
        hints.push("R ≡ 0, so the cost may not fix every free direction".to_string());
    }
    if let Ok(w) = controllability_gramian(p, 200) {
        let margin = min_symmetric_eigenvalue(&w);
        if margin <= 1e-10 * (1.0 + w.norm()) {
            hints.push(format!("controllability Gramian margin {margin:.3e}"));
        }
    }
    let coef = Matrix::from_fn(p.k, 2 * p.n, |i, j| {
        if j < p.n {
            p.phi1[(i, j)]
        } else {
            -p.phi2[(i, j - p.n)]
        }
    });
    let r = rank(&coef, 1e-10);
    if r < p.k {
        hints.push(format!("boundary rows have rank {r} of {}", p.k));
    }
    if hints.is_empty() {
        "no structural cause detected".into()
    } else {
        hints.join("; ")
    }
}

fn with_hint(p: &LqProblem, e: Error) -> Error {
    match e {
        Error::SingularMatrix { context, condition } => Error::SingularMatrix {
            context: format!("{context} [hint: {}]", singular_hint(p)),
            condition,
        },
        other => other,
    }
}

/// Missing data `(x0, ν)` from the blocks at `τ`.
pub fn missing_data(p: &LqProblem, traj: &BlockTrajectory, method: Method) -> Result<MissingData> {
    match method {
        Method::Augmented => augmented_solve(p, traj.last()).map_err(|e| with_hint(p, e)),
        Method::Sweep | Method::Feedback => {
            let sys = build_sweep_system(p, traj.last())?;
            solve_missing_data(&sys).map_err(|e| with_hint(p, e))
        }
    }
}

pub fn solve_with(p: &LqProblem, traj: &BlockTrajectory, method: Method) -> Result<Solution> {
    let md = missing_data(p, traj, method)?;
    match method {
        Method::Feedback => closed_loop(p, &md, traj),
        Method::Sweep | Method::Augmented => open_loop(p, traj, &md),
    }
}

/// Run the whole algorithm on `steps` intervals.
pub fn solve(p: &LqProblem, method: Method, fundamental: Fundamental, steps: usize) -> Result<Solution> {
    p.check_shapes()?;
    let traj = block_trajectory(p, &p.grid(steps)?, fundamental)?;
    solve_with(p, &traj, method)
}
