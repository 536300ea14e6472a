//! Central finite differences refined by Ridders' extrapolation.
//!
//! This is the independent oracle for every symbolic derivative in the crate:
//! it only ever evaluates the undifferentiated expression.
//!
//! The base stencils are second-order accurate, so their error is a series in
//! `h^2`. Starting from a coarse step, the step is repeatedly divided by
//! [`SHRINK`] and a Neville tableau eliminates successive error terms; the
//! entry whose neighbours agree best is returned. If a stencil point leaves the
//! expression's domain the starting step is halved and the scheme restarts.

use super::{Bindings, EvalError, Expr};

const SHRINK: f64 = 1.4;
const TABLEAU: usize = 10;
/// Stop once the diagonal error exceeds this multiple of the best error.
const SAFE: f64 = 2.0;
const MAX_HALVINGS: usize = 40;

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum FdError {
    #[error("finite-difference order must be 1, 2 or 3 (got {0})")]
    UnsupportedOrder(u8),
    #[error("variable `{0}` is not bound at the evaluation point")]
    Unbound(String),
    #[error("stencil point {var} = {value} is invalid: {source}")]
    Stencil {
        var: String,
        value: f64,
        #[source]
        source: EvalError,
    },
}

/// Starting step for a derivative at coordinate value `at`.
pub fn fd_step(at: f64) -> f64 {
    0.1 * at.abs().max(1.0)
}

// Offsets (in units of h) and weights of the O(h^2) central stencils; the
// weighted sum is divided by h^order.
fn stencil(order: u8) -> &'static [(f64, f64)] {
    match order {
        1 => &[(1.0, 0.5), (-1.0, -0.5)],
        2 => &[(1.0, 1.0), (0.0, -2.0), (-1.0, 1.0)],
        _ => &[(2.0, 0.5), (1.0, -1.0), (-1.0, 1.0), (-2.0, -0.5)],
    }
}

/// Estimates the `order`-th partial derivative of `e` along `var` at `at`.
pub fn finite_difference(e: &Expr, var: &str, at: &Bindings, order: u8) -> Result<f64, FdError> {
    if !(1..=3).contains(&order) {
        return Err(FdError::UnsupportedOrder(order));
    }
    let center = at
        .get(var)
        .ok_or_else(|| FdError::Unbound(var.to_string()))?;
    let mut point = at.clone();
    let mut estimate = |step: f64| -> Result<f64, FdError> {
        let mut acc = 0.0;
        for &(offset, weight) in stencil(order) {
            let value = center + offset * step;
            point.set(var, value);
            let f = e.evaluate(&point).map_err(|source| FdError::Stencil {
                var: var.to_string(),
                value,
                source,
            })?;
            acc += weight * f;
        }
        Ok(acc / step.powi(order as i32))
    };
    let mut h = fd_step(center);
    let mut last_err = None;
    for _ in 0..MAX_HALVINGS {
        match ridders(&mut estimate, h) {
            Ok(v) => return Ok(v),
            Err(err @ FdError::Stencil { .. }) => {
                last_err = Some(err);
                h /= 2.0;
            }
            Err(err) => return Err(err),
        }
    }
    Err(last_err.expect("at least one attempt"))
}

fn ridders(
    estimate: &mut impl FnMut(f64) -> Result<f64, FdError>,
    h0: f64,
) -> Result<f64, FdError> {
    let mut a = [[0.0; TABLEAU]; TABLEAU];
    let mut h = h0;
    a[0][0] = estimate(h)?;
    let mut best = a[0][0];
    let mut err = f64::INFINITY;
    let ratio = SHRINK * SHRINK;
    for i in 1..TABLEAU {
        h /= SHRINK;
        a[0][i] = estimate(h)?;
        let mut fac = ratio;
        for j in 1..=i {
            a[j][i] = (a[j - 1][i] * fac - a[j - 1][i - 1]) / (fac - 1.0);
            fac *= ratio;
            let e = (a[j][i] - a[j - 1][i])
                .abs()
                .max((a[j][i] - a[j - 1][i - 1]).abs());
            if e <= err {
                err = e;
                best = a[j][i];
            }
        }
        if (a[i][i] - a[i - 1][i - 1]).abs() >= SAFE * err {
            break;
        }
    }
    Ok(best)
}
