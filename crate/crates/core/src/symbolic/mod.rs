//! Immutable symbolic expressions over real parameters.
//!
//! An [`Expr`] is a reference-counted tree: cloning is cheap and subtrees are
//! shared freely between derivatives, substitutions and threads. Nothing in
//! this module mutates a tree after construction.
//!
//! Equality of two expressions is structural. Mathematical equality is not
//! decided symbolically anywhere in the crate; it is certified by pointwise
//! evaluation at seeded random points.

mod diff;
mod eval;
mod fd;
mod parse;
mod print;
mod simplify;

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

pub use eval::{Bindings, DomainKind, EvalError};
pub use fd::{fd_step, finite_difference, FdError};
pub use parse::{parse, ParseError};

/// Named constants understood by the grammar.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Constant {
    Pi,
    /// Euler–Mascheroni constant.
    EulerGamma,
}

impl Constant {
    pub const ALL: [Constant; 2] = [Constant::Pi, Constant::EulerGamma];

    pub fn value(self) -> f64 {
        match self {
            Constant::Pi => std::f64::consts::PI,
            Constant::EulerGamma => 0.577_215_664_901_532_9,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Constant::Pi => "pi",
            Constant::EulerGamma => "euler_gamma",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.name() == name)
    }
}

/// Elementary functions of one argument.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Func {
    Exp,
    Ln,
    Sqrt,
    Sin,
    Cos,
}

impl Func {
    pub const ALL: [Func; 5] = [Func::Exp, Func::Ln, Func::Sqrt, Func::Sin, Func::Cos];

    pub fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Ln => "ln",
            Func::Sqrt => "sqrt",
            Func::Sin => "sin",
            Func::Cos => "cos",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|f| f.name() == name)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Pow => "^",
        }
    }
}

/// One node of an expression tree.
///
/// Numeric literals are always non-negative; a negative value is represented
/// as `Neg(Num(..))`, which is also what the parser produces for `-2`.
#[derive(Debug, PartialEq)]
pub enum Node {
    Num(f64),
    Const(Constant),
    Var(Arc<str>),
    Neg(Expr),
    Binary(BinOp, Expr, Expr),
    Call(Func, Expr),
}

/// Shared handle to an immutable expression tree.
#[derive(Clone)]
pub struct Expr(Arc<Node>);

impl PartialEq for Expr {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || *self.0 == *other.0
    }
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Expr({self})")
    }
}

// `add`, `mul` and friends simplify, so they are not the operator traits.
#[allow(clippy::should_implement_trait)]
impl Expr {
    fn from_node(node: Node) -> Self {
        Expr(Arc::new(node))
    }

    pub fn node(&self) -> &Node {
        &self.0
    }

    /// Literal; negative values become `Neg(Num(|v|))`.
    pub fn num(v: f64) -> Self {
        if v < 0.0 {
            Self::from_node(Node::Neg(Self::from_node(Node::Num(-v))))
        } else {
            // folds -0.0 into +0.0
            Self::from_node(Node::Num(v + 0.0))
        }
    }

    pub fn zero() -> Self {
        Self::num(0.0)
    }

    pub fn one() -> Self {
        Self::num(1.0)
    }

    pub fn var(name: impl AsRef<str>) -> Self {
        Self::from_node(Node::Var(Arc::from(name.as_ref())))
    }

    pub fn constant(c: Constant) -> Self {
        Self::from_node(Node::Const(c))
    }

    // Raw constructors: build exactly the requested node, no rewriting.

    pub fn neg_raw(a: Expr) -> Self {
        Self::from_node(Node::Neg(a))
    }

    pub fn binary_raw(op: BinOp, a: Expr, b: Expr) -> Self {
        Self::from_node(Node::Binary(op, a, b))
    }

    pub fn call_raw(f: Func, a: Expr) -> Self {
        Self::from_node(Node::Call(f, a))
    }

    // Simplifying constructors: apply the local rewrite rules of `simplify`
    // at the root, assuming the operands are already simplified.

    pub fn add(a: Expr, b: Expr) -> Self {
        simplify::add(a, b)
    }

    pub fn sub(a: Expr, b: Expr) -> Self {
        simplify::sub(a, b)
    }

    pub fn mul(a: Expr, b: Expr) -> Self {
        simplify::mul(a, b)
    }

    pub fn div(a: Expr, b: Expr) -> Self {
        simplify::div(a, b)
    }

    pub fn pow(a: Expr, b: Expr) -> Self {
        simplify::pow(a, b)
    }

    pub fn neg(a: Expr) -> Self {
        simplify::neg(a)
    }

    pub fn call(f: Func, a: Expr) -> Self {
        simplify::call(f, a)
    }

    pub fn exp(a: Expr) -> Self {
        Self::call(Func::Exp, a)
    }

    pub fn ln(a: Expr) -> Self {
        Self::call(Func::Ln, a)
    }

    pub fn sqrt(a: Expr) -> Self {
        Self::call(Func::Sqrt, a)
    }

    /// Sum of many terms, simplified pairwise.
    pub fn sum<I: IntoIterator<Item = Expr>>(terms: I) -> Self {
        terms.into_iter().fold(Self::zero(), Self::add)
    }

    /// Value of a literal (including a negated literal).
    pub fn as_number(&self) -> Option<f64> {
        match self.node() {
            Node::Num(v) => Some(*v),
            Node::Neg(inner) => match inner.node() {
                Node::Num(v) => Some(-*v),
                _ => None,
            },
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.as_number() == Some(0.0)
    }

    pub fn is_one(&self) -> bool {
        self.as_number() == Some(1.0)
    }

    pub fn as_var(&self) -> Option<&str> {
        match self.node() {
            Node::Var(name) => Some(name),
            _ => None,
        }
    }

    /// Every variable name reachable in the tree.
    pub fn free_variables(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_variables(&mut out);
        out
    }

    fn collect_variables(&self, out: &mut BTreeSet<String>) {
        match self.node() {
            Node::Num(_) | Node::Const(_) => {}
            Node::Var(name) => {
                if !out.contains(name.as_ref()) {
                    out.insert(name.to_string());
                }
            }
            Node::Neg(a) | Node::Call(_, a) => a.collect_variables(out),
            Node::Binary(_, a, b) => {
                a.collect_variables(out);
                b.collect_variables(out);
            }
        }
    }

    pub fn contains_variable(&self, name: &str) -> bool {
        match self.node() {
            Node::Num(_) | Node::Const(_) => false,
            Node::Var(v) => v.as_ref() == name,
            Node::Neg(a) | Node::Call(_, a) => a.contains_variable(name),
            Node::Binary(_, a, b) => a.contains_variable(name) || b.contains_variable(name),
        }
    }

    /// Number of nodes, counting shared subtrees once per occurrence.
    pub fn size(&self) -> usize {
        match self.node() {
            Node::Num(_) | Node::Const(_) | Node::Var(_) => 1,
            Node::Neg(a) | Node::Call(_, a) => 1 + a.size(),
            Node::Binary(_, a, b) => 1 + a.size() + b.size(),
        }
    }

    /// Exact partial derivative with respect to `var`.
    pub fn differentiate(&self, var: &str) -> Expr {
        diff::differentiate(self, var)
    }

    /// Repeated partial derivative along each variable of `vars` in turn.
    pub fn partial(&self, vars: &[&str]) -> Expr {
        vars.iter().fold(self.clone(), |e, v| e.differentiate(v))
    }

    pub fn evaluate(&self, bindings: &Bindings) -> Result<f64, EvalError> {
        eval::evaluate(self, bindings)
    }

    /// Replaces every occurrence of `var` by `replacement`. The tree is
    /// returned unchanged (same allocation) when `var` does not occur.
    pub fn substitute(&self, var: &str, replacement: &Expr) -> Expr {
        match self.node() {
            Node::Num(_) | Node::Const(_) => self.clone(),
            Node::Var(v) => {
                if v.as_ref() == var {
                    replacement.clone()
                } else {
                    self.clone()
                }
            }
            Node::Neg(a) => {
                let a2 = a.substitute(var, replacement);
                if Arc::ptr_eq(&a.0, &a2.0) {
                    self.clone()
                } else {
                    Expr::neg_raw(a2)
                }
            }
            Node::Call(f, a) => {
                let a2 = a.substitute(var, replacement);
                if Arc::ptr_eq(&a.0, &a2.0) {
                    self.clone()
                } else {
                    Expr::call_raw(*f, a2)
                }
            }
            Node::Binary(op, a, b) => {
                let a2 = a.substitute(var, replacement);
                let b2 = b.substitute(var, replacement);
                if Arc::ptr_eq(&a.0, &a2.0) && Arc::ptr_eq(&b.0, &b2.0) {
                    self.clone()
                } else {
                    Expr::binary_raw(*op, a2, b2)
                }
            }
        }
    }

    /// Substitutes numeric values for several variables at once.
    pub fn substitute_values<'a, I>(&self, values: I) -> Expr
    where
        I: IntoIterator<Item = (&'a str, f64)>,
    {
        values.into_iter().fold(self.clone(), |e, (name, v)| {
            e.substitute(name, &Expr::num(v))
        })
    }

    /// Local rewriting; see [`simplify`](self::simplify) rules in the module docs.
    pub fn simplify(&self) -> Expr {
        simplify::simplify(self)
    }
}

impl std::str::FromStr for Expr {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse(s)
    }
}

/// Serialized as its printed text.
impl serde::Serialize for Expr {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> serde::Deserialize<'de> for Expr {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        parse(&text).map_err(serde::de::Error::custom)
    }
}

macro_rules! impl_op {
    ($trait:ident, $method:ident, $ctor:ident) => {
        impl std::ops::$trait for Expr {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                Expr::$ctor(self, rhs)
            }
        }
        impl std::ops::$trait<&Expr> for &Expr {
            type Output = Expr;
            fn $method(self, rhs: &Expr) -> Expr {
                Expr::$ctor(self.clone(), rhs.clone())
            }
        }
        impl std::ops::$trait<f64> for Expr {
            type Output = Expr;
            fn $method(self, rhs: f64) -> Expr {
                Expr::$ctor(self, Expr::num(rhs))
            }
        }
    };
}

impl_op!(Add, add, add);
impl_op!(Sub, sub, sub);
impl_op!(Mul, mul, mul);
impl_op!(Div, div, div);

impl std::ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::neg(self)
    }
}

impl std::ops::Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::neg(self.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn negative_literals_are_wrapped() {
        let e = Expr::num(-2.5);
        assert!(matches!(e.node(), Node::Neg(_)));
        assert_eq!(e.as_number(), Some(-2.5));
        assert_eq!(Expr::num(-0.0).as_number(), Some(0.0));
    }

    #[test]
    fn free_variables_cover_the_tree() {
        let e = parse("a*exp(t) + ln(x)/b - pi").unwrap();
        let vars: Vec<_> = e.free_variables().into_iter().collect();
        assert_eq!(vars, ["a", "b", "t", "x"]);
    }

    #[test]
    fn substitute_absent_variable_keeps_the_tree() {
        let e = parse("t^2 + sin(x)").unwrap();
        let s = e.substitute("y", &Expr::num(3.0));
        assert_eq!(s, e);
        assert!(Arc::ptr_eq(&s.0, &e.0));
    }

    #[test]
    fn substitute_replaces_every_occurrence() {
        let e = parse("t + x").unwrap();
        let s = e.substitute("t", &Expr::var("x"));
        assert!(!s.contains_variable("t"));
        for xv in [-3.0, 0.0, 0.7, 12.0] {
            let b = Bindings::new().with("x", xv);
            assert_eq!(s.evaluate(&b).unwrap(), 2.0 * xv);
        }
    }
}
