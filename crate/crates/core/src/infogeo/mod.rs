//! Information geometry of potential functions.
//!
//! For an exponential family with potential `ψ(θ)` the Fisher metric, the
//! cubic tensor and every α-connection follow from derivatives of `ψ`:
//!
//! ```text
//! g_ij        = ∂i ∂j ψ
//! T_ijk       = ∂i ∂j ∂k ψ
//! Γ(α)_ij,k   = (1 - α)/2 · T_ijk
//! R(α)_ijkl   = (1 - α²)/4 · (T_kmi T_jln - T_kmj T_iln) g^mn
//! Ric_ij      = R_iklj g^kl,   K = Ric_ij g^ij
//! κ_ij        = -R_ijij / (g_ii g_jj - g_ij²)
//! ```
//!
//! A second, independent route starts from an explicit metric (for families
//! that are not exponential) and builds the Levi-Civita connection from
//! metric derivatives. Both routes produce a [`CurvatureBundle`] with the
//! same index conventions, so they can be cross-checked.
//!
//! Expressions are symbolic; every contraction with the inverse metric is
//! numeric at the evaluation point. Coordinates are `theta1..thetaN`; in two
//! dimensions `t` and `x` are accepted for `theta1` and `theta2`.

mod curvature;
mod potential;
mod tensors;

pub use curvature::{
    guarded_inverse, CurvatureBundle, MetricGeometry, PotentialGeometry, Sectional,
    SINGULAR_TOLERANCE,
};
pub use potential::{PotentialSpec, PotentialSpecBuilder};
pub use tensors::{ConnectionCoeffs, CubicTensor, MetricField, Provenance};

use crate::linalg::Matrix;
use crate::symbolic::{Bindings, EvalError, Expr, ParseError};

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum InfoGeoError {
    #[error("dimension must be at least 1")]
    ZeroDimension,
    #[error("point has {got} coordinates, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("symbol `{0}` is neither a coordinate nor a bound constant")]
    UnboundSymbol(String),
    #[error("metric rows must all have {dim} entries")]
    NotSquare { dim: usize },
    #[error("metric is not symmetric: entries ({i},{j}) and ({j},{i}) differ")]
    AsymmetricMetric { i: usize, j: usize },
    #[error("point {point:?} violates domain constraint `{constraint} > 0`")]
    DomainViolation { constraint: Expr, point: Vec<f64> },
    #[error("metric is singular (|det g| = {det:e} at scale {scale:e})")]
    SingularMetric { det: f64, scale: f64 },
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Parse(#[from] ParseError),
}

impl InfoGeoError {
    /// True for errors caused by the evaluation point rather than the input.
    pub fn is_domain(&self) -> bool {
        match self {
            InfoGeoError::DomainViolation { .. } => true,
            InfoGeoError::Eval(e) => e.is_domain(),
            _ => false,
        }
    }
}

/// Name of the `i`-th coordinate (zero-based), e.g. `theta1` for `i = 0`.
pub fn coordinate(i: usize) -> String {
    format!("theta{}", i + 1)
}

pub fn coordinate_bindings(pt: &[f64]) -> Bindings {
    pt.iter()
        .enumerate()
        .map(|(i, v)| (coordinate(i), *v))
        .collect()
}

pub(crate) fn normalize_coordinates(e: &Expr, dim: usize) -> Expr {
    if dim != 2 {
        return e.clone();
    }
    e.substitute("t", &Expr::var("theta1"))
        .substitute("x", &Expr::var("theta2"))
}

fn validate_symbols(e: &Expr, dim: usize) -> Result<(), InfoGeoError> {
    let coords: Vec<String> = (0..dim).map(coordinate).collect();
    match e.free_variables().into_iter().find(|v| !coords.contains(v)) {
        Some(v) => Err(InfoGeoError::UnboundSymbol(v)),
        None => Ok(()),
    }
}

/// Symbolic Hessian of the potential.
pub fn fisher_metric(p: &PotentialSpec) -> MetricField {
    let n = p.dim();
    let first: Vec<Expr> = (0..n)
        .map(|i| p.resolved().differentiate(&coordinate(i)))
        .collect();
    let mut entries = vec![Expr::zero(); n * n];
    for i in 0..n {
        for j in i..n {
            let e = first[i].differentiate(&coordinate(j));
            entries[i * n + j] = e.clone();
            entries[j * n + i] = e;
        }
    }
    MetricField::from_potential(n, entries, p.resolved_domain().to_vec())
}

/// Symbolic third derivatives of the potential.
pub fn cubic_tensor(p: &PotentialSpec) -> CubicTensor {
    cubic_from_metric(&fisher_metric(p))
}

fn cubic_from_metric(g: &MetricField) -> CubicTensor {
    let n = g.dim();
    let mut entries = vec![Expr::zero(); n * n * n];
    for i in 0..n {
        for j in i..n {
            for k in j..n {
                let e = g.get(i, j).differentiate(&coordinate(k));
                for (a, b, c) in [
                    (i, j, k),
                    (i, k, j),
                    (j, i, k),
                    (j, k, i),
                    (k, i, j),
                    (k, j, i),
                ] {
                    entries[(a * n + b) * n + c] = e.clone();
                }
            }
        }
    }
    CubicTensor::new(n, entries)
}

/// `Γ(α)_ij,k = (1 - α)/2 · T_ijk`.
pub fn alpha_connection(p: &PotentialSpec, alpha: f64) -> ConnectionCoeffs {
    let t = cubic_tensor(p);
    let n = p.dim();
    let factor = Expr::num((1.0 - alpha) / 2.0);
    let mut entries = Vec::with_capacity(n * n * n);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                entries.push(Expr::mul(factor.clone(), t.get(i, j, k).clone()));
            }
        }
    }
    ConnectionCoeffs::new(alpha, n, entries)
}

/// Curvature of the α-connection of a potential at `pt`.
pub fn alpha_curvature(
    p: &PotentialSpec,
    alpha: f64,
    pt: &[f64],
) -> Result<CurvatureBundle, InfoGeoError> {
    PotentialGeometry::new(p).curvature(alpha, pt)
}

/// Levi-Civita curvature of an explicit metric at `pt`.
pub fn ricci_from_metric(m: &MetricField, pt: &[f64]) -> Result<CurvatureBundle, InfoGeoError> {
    MetricGeometry::new(m).curvature(pt)
}

#[derive(Clone, Copy, Debug)]
pub enum CurvatureSource<'a> {
    /// Uses the α = 0 potential formula.
    Potential(&'a PotentialSpec),
    /// Uses the Levi-Civita connection of the metric.
    Metric(&'a MetricField),
}

/// `Ric + λ g` at `pt`; zero exactly when the Einstein condition holds there.
pub fn einstein_residual(
    source: CurvatureSource<'_>,
    lambda: f64,
    pt: &[f64],
) -> Result<Matrix, InfoGeoError> {
    let bundle = match source {
        CurvatureSource::Potential(p) => alpha_curvature(p, 0.0, pt)?,
        CurvatureSource::Metric(m) => ricci_from_metric(m, pt)?,
    };
    Ok(bundle.einstein_residual(lambda))
}
