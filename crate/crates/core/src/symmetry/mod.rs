//! Lie point symmetries of scalar PDEs in `u(t, x)`.
//!
//! Jet coordinates are plain expression variables: `t`, `x`, `u` and
//! `u_J` for a multi-index `J` written with all `t`s before all `x`s
//! (`u_ttx`, never `u_txt`). A generator `ξt ∂t + ξx ∂x + η ∂u` acts on
//! derivative coordinates through its prolongation
//!
//! ```text
//! η^J = D_J Q + ξt u_{J+t} + ξx u_{J+x},     Q = η - ξt u_t - ξx u_x
//! ```
//!
//! and is a symmetry of `F = 0` when `pr X(F)` vanishes wherever `F` does.
//! That condition is checked numerically: sample the jet, solve `F = 0` for
//! one leading coordinate, evaluate `pr X(F)`.

mod check;
mod generator;
mod jet;

pub use check::{
    invariance_check, lsc_check, offshell_max, CheckConfig, InvarianceReport, LscReport, Pde,
    DEFAULT_JET_SAMPLES, INVARIANCE_TOLERANCE, LSC_TOLERANCE, MIN_LEADING_COEFFICIENT,
};
pub use generator::{GeneratorField, ProlongedGenerator};
pub use jet::{classify, total_derivative, Dir, JetExpr, JetVar, MultiIndex, MAX_ORDER};

use crate::symbolic::{EvalError, ParseError};

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum SymmetryError {
    #[error("`{coordinate}` exceeds the maximum jet order {max}")]
    OrderOverflow { coordinate: String, max: usize },
    #[error("symbol `{0}` is not a jet coordinate")]
    UnknownSymbol(String),
    #[error("generator coefficient depends on derivative coordinate `{0}`")]
    DerivativeInGenerator(String),
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("invalid generator: {0}")]
    BadGenerator(String),
    #[error("equation does not contain leading coordinate `{0}`")]
    MissingLeading(String),
    #[error("equation is not affine in leading coordinate `{0}`")]
    NotAffine(String),
    #[error("no usable jet point for sample {sample} within the attempt limit")]
    Exhausted { sample: usize },
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

#[cfg(test)]
mod tests;
