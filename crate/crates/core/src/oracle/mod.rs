//! Independent reference solutions by direct transcription.

mod compare;
mod transcription;

pub use compare::{compare, CompareReport, CompareTolerances};
pub use transcription::{oracle_solve, OracleSolution, MAX_TRANSCRIPTION_SIZE};
