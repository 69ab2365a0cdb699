//! Double reduction along `X = ∂_t + c(u∂_v − v∂_u)`: canonical
//! coordinates, transformed conserved vectors, the reduced equation, and
//! adjudication of closed-form candidates.

mod candidates;
mod ode;
mod transform;

use thiserror::Error;

use crate::expr::{Context, ExprError, VarKind};
use crate::jet::JetError;

pub use candidates::{
    candidate_residuals, case_solutions, classify, draw_params, factorized_conditions, sample_points, Classification,
    NumericParams, SolutionCandidate, Verdict, CLASSIFY_SAMPLES, CLASSIFY_TOL,
};
pub use ode::{factorized_reduced_equation, printed_reduced_flux, quoted_reduced_equation, reduced_ode, ReducedODE};
pub use transform::{transform_conserved, CanonicalTransform, Frame, TransformedConserved};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ReductionError {
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error(transparent)]
    Jet(#[from] JetError),
    #[error("derivative table entry {entry} disagrees with the chain rule: {residual}")]
    TableMismatch { entry: String, residual: String },
    #[error("{what} is {value}, expected {expected}")]
    Jacobian {
        what: String,
        value: String,
        expected: String,
    },
    #[error("unknown case {0} (expected 1, 2 or 3)")]
    UnknownCase(u32),
    #[error("parameter {param} = {given} violates the constraint {param} = {required}")]
    ConstraintViolation { param: String, required: f64, given: f64 },
    #[error("no numeric value for parameter `{0}`")]
    MissingParam(String),
    #[error("eps must be positive, got {0}")]
    NonPositiveEps(f64),
}

/// Names used by the reduced frame.
pub const REDUCED_INDEPENDENTS: [&str; 2] = ["s", "r"];
pub const REDUCED_DEPENDENTS: [&str; 2] = ["w", "p"];
pub const EPS: &str = "eps";
pub const SHIFT: &str = "c";

/// Extends a problem context with the reduced-frame names and the
/// parameters of the reduction (`c`, `eps`, `c1` and the coefficients).
pub fn reduction_context(base: &Context) -> Result<Context, ReductionError> {
    let mut ctx = base.clone();
    for n in ["t", "x", "s", "r"] {
        ctx.declare(n, VarKind::Independent)?;
    }
    for n in ["u", "v", "w", "p"] {
        ctx.declare(n, VarKind::Dependent)?;
    }
    for n in ["beta", "gamma", "delta", SHIFT, EPS, "c1"] {
        ctx.declare(n, VarKind::Parameter)?;
    }
    Ok(ctx)
}
