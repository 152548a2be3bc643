//! A small, self-contained linear programming engine.
//!
//! Models are minimization problems over bounded columns with sparse rows whose
//! activity is constrained to an interval. The solver is a dense revised primal
//! simplex with bounded variables. Rows can be appended to a solved model and the
//! previous basis is reused as a warm start: the new row logicals enter the basis
//! and a composite phase 1 restores feasibility from there.

mod error;
mod model;
mod simplex;

pub use error::LpError;
pub use model::{Column, LpModel, Row, Sense};
pub use simplex::{Basis, LpSolution, Simplex, SimplexOptions, Status, VarStatus};

/// Primal feasibility tolerance used for row and bound audits.
pub const FEAS_TOL: f64 = 1e-7;
/// Integrality tolerance used by callers that branch on column values.
pub const INT_TOL: f64 = 1e-6;
/// Objective comparison tolerance.
pub const OBJ_TOL: f64 = 1e-9;
