//! Linear-quadratic optimal control with coupled two-point boundary
//! conditions `Φ1 x(t0) − Φ2 x(τ) = q`.
//!
//! The solver integrates the Hamiltonian transition matrix (directly or
//! through the reduced ψ, W, V factorization), assembles a small symmetric
//! system for the missing data `x(t0)` and `ν`, and synthesizes the optimal
//! state, costate and control. A direct-transcription QP serves as an
//! independent reference.
//!
//! ```
//! use lq_sweep::numerics::from_rows;
//! use lq_sweep::pipeline::{solve, Fundamental, Method};
//! use lq_sweep::problem::LqProblem;
//!
//! let one = from_rows(&[&[1.0]]);
//! let zero = from_rows(&[&[0.0]]);
//! // ẋ = u, x(0) − x(1) = 1, J = ½∫(x² + u²)
//! let p = LqProblem::new(zero, one.clone(), one.clone(), one.clone(), one.clone(), one.clone(), one, 0.0, 1.0)?;
//! let sol = solve(&p, Method::Sweep, Fundamental::Direct, 2000)?;
//! assert!((sol.x0[0] - 0.5).abs() < 1e-9);
//! assert!((sol.cost - 0.5409883534).abs() < 1e-6);
//! # Ok::<(), lq_sweep::Error>(())
//! ```

pub mod cli;
pub mod error;
pub mod hamiltonian;
pub mod numerics;
pub mod oracle;
pub mod pipeline;
pub mod problem;
pub mod sweep;
pub mod zakhar_itkin;

pub use error::{Error, Result};
pub use pipeline::{solve, Fundamental, Method};
pub use problem::LqProblem;
pub use sweep::Solution;
