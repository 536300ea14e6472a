use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{BinOp, Expr, Func, Node};

/// Variable name to value map used for evaluation.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Bindings {
    values: BTreeMap<String, f64>,
}

impl Bindings {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, name: impl Into<String>, value: f64) -> Self {
        self.set(name, value);
        self
    }

    pub fn set(&mut self, name: impl Into<String>, value: f64) {
        self.values.insert(name.into(), value);
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.values.get(name).copied()
    }

    pub fn remove(&mut self, name: &str) -> Option<f64> {
        self.values.remove(name)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.values.iter().map(|(k, v)| (k.as_str(), *v))
    }
}

impl<S: Into<String>> FromIterator<(S, f64)> for Bindings {
    fn from_iter<I: IntoIterator<Item = (S, f64)>>(iter: I) -> Self {
        let mut b = Bindings::new();
        for (k, v) in iter {
            b.set(k, v);
        }
        b
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DomainKind {
    LogOfNonPositive,
    SqrtOfNegative,
    DivisionByZero,
    /// Negative base with a non-integer exponent.
    FractionalPowerOfNegative,
    NonFinite,
}

impl fmt::Display for DomainKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            DomainKind::LogOfNonPositive => "logarithm of a non-positive value",
            DomainKind::SqrtOfNegative => "square root of a negative value",
            DomainKind::DivisionByZero => "division by zero",
            DomainKind::FractionalPowerOfNegative => "fractional power of a negative value",
            DomainKind::NonFinite => "non-finite result",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum EvalError {
    #[error("unbound variable `{0}`")]
    Unbound(String),
    #[error("{kind} in `{subtree}`")]
    Domain { kind: DomainKind, subtree: Expr },
}

impl EvalError {
    pub fn is_domain(&self) -> bool {
        matches!(self, EvalError::Domain { .. })
    }
}

fn domain(kind: DomainKind, subtree: &Expr) -> EvalError {
    EvalError::Domain {
        kind,
        subtree: subtree.clone(),
    }
}

pub(super) fn evaluate(e: &Expr, b: &Bindings) -> Result<f64, EvalError> {
    let v = match e.node() {
        Node::Num(v) => *v,
        Node::Const(c) => c.value(),
        Node::Var(name) => b
            .get(name)
            .ok_or_else(|| EvalError::Unbound(name.to_string()))?,
        Node::Neg(a) => -evaluate(a, b)?,
        Node::Call(f, a) => {
            let x = evaluate(a, b)?;
            match f {
                Func::Exp => x.exp(),
                Func::Ln => {
                    if x <= 0.0 {
                        return Err(domain(DomainKind::LogOfNonPositive, e));
                    }
                    x.ln()
                }
                Func::Sqrt => {
                    if x < 0.0 {
                        return Err(domain(DomainKind::SqrtOfNegative, e));
                    }
                    x.sqrt()
                }
                Func::Sin => x.sin(),
                Func::Cos => x.cos(),
            }
        }
        Node::Binary(op, l, r) => {
            let x = evaluate(l, b)?;
            let y = evaluate(r, b)?;
            match op {
                BinOp::Add => x + y,
                BinOp::Sub => x - y,
                BinOp::Mul => x * y,
                BinOp::Div => {
                    if y == 0.0 {
                        return Err(domain(DomainKind::DivisionByZero, e));
                    }
                    x / y
                }
                BinOp::Pow => power(x, y, e)?,
            }
        }
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(domain(DomainKind::NonFinite, e))
    }
}

fn power(x: f64, y: f64, e: &Expr) -> Result<f64, EvalError> {
    let integral = y.fract() == 0.0;
    if x == 0.0 && y < 0.0 {
        return Err(domain(DomainKind::DivisionByZero, e));
    }
    if x < 0.0 && !integral {
        return Err(domain(DomainKind::FractionalPowerOfNegative, e));
    }
    if integral && y.abs() <= i32::MAX as f64 {
        Ok(x.powi(y as i32))
    } else {
        Ok(x.powf(y))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbolic::parse;

    const NORMAL_PSI: &str = "-(t^2)/(4*x) - ln(-x)/2 + ln(pi)/2";

    #[test]
    fn normal_potential_at_standard_normal() {
        let e = parse(NORMAL_PSI).unwrap();
        let b = Bindings::new().with("t", 0.0).with("x", -0.5);
        let expected = 0.5 * (2.0 * std::f64::consts::PI).ln();
        assert!((e.evaluate(&b).unwrap() - expected).abs() < 1e-15);
        assert!((expected - 0.918_938_5).abs() < 1e-7);
    }

    #[test]
    fn named_constants() {
        let pi = parse("pi").unwrap().evaluate(&Bindings::new()).unwrap();
        assert_eq!(pi, std::f64::consts::PI);
        let g = parse("euler_gamma")
            .unwrap()
            .evaluate(&Bindings::new())
            .unwrap();
        assert!((g - 0.577_215_664_901_532_9).abs() < 1e-16);
    }

    #[test]
    fn log_of_negative_reports_the_subtree() {
        let e = parse("1 + ln(x)").unwrap();
        let err = e.evaluate(&Bindings::new().with("x", -1.0)).unwrap_err();
        match err {
            EvalError::Domain { kind, subtree } => {
                assert_eq!(kind, DomainKind::LogOfNonPositive);
                assert_eq!(subtree.to_string(), "ln(x)");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unbound_variable_fails_loudly() {
        let e = parse("t + y").unwrap();
        let err = e.evaluate(&Bindings::new().with("t", 1.0)).unwrap_err();
        assert_eq!(err, EvalError::Unbound("y".into()));
    }

    #[test]
    fn division_by_zero_and_fractional_powers() {
        let b = Bindings::new().with("x", 0.0);
        assert!(parse("1/x").unwrap().evaluate(&b).unwrap_err().is_domain());
        let b = Bindings::new().with("x", -4.0);
        assert!(parse("x^0.5")
            .unwrap()
            .evaluate(&b)
            .unwrap_err()
            .is_domain());
        assert_eq!(parse("x^3").unwrap().evaluate(&b).unwrap(), -64.0);
        assert_eq!(parse("x^-2").unwrap().evaluate(&b).unwrap(), 1.0 / 16.0);
    }
}
