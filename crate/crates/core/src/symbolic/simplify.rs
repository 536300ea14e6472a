//! Local rewrite rules.
//!
//! Each constructor looks only at the root and its immediate operands:
//! literal folding, additive and multiplicative identities, sign hoisting,
//! `a - a -> 0`, `a / a -> 1`, and collapsing `(e^p)^q` when `q` is an
//! integer. Rewrites may widen the domain (`0 * ln(x)` becomes `0`) but never
//! change a value where the original tree evaluates.

use super::{BinOp, Expr, Func, Node};

pub(super) fn simplify(e: &Expr) -> Expr {
    match e.node() {
        Node::Num(_) | Node::Const(_) | Node::Var(_) => e.clone(),
        Node::Neg(a) => neg(simplify(a)),
        Node::Call(f, a) => call(*f, simplify(a)),
        Node::Binary(op, a, b) => {
            let (a, b) = (simplify(a), simplify(b));
            match op {
                BinOp::Add => add(a, b),
                BinOp::Sub => sub(a, b),
                BinOp::Mul => mul(a, b),
                BinOp::Div => div(a, b),
                BinOp::Pow => pow(a, b),
            }
        }
    }
}

fn strip_neg(e: &Expr) -> Option<&Expr> {
    match e.node() {
        Node::Neg(inner) => Some(inner),
        _ => None,
    }
}

pub(super) fn neg(a: Expr) -> Expr {
    if a.is_zero() {
        return Expr::zero();
    }
    if let Some(inner) = strip_neg(&a) {
        return inner.clone();
    }
    if let Node::Num(v) = a.node() {
        return Expr::num(-v);
    }
    Expr::neg_raw(a)
}

pub(super) fn add(a: Expr, b: Expr) -> Expr {
    if let (Some(x), Some(y)) = (a.as_number(), b.as_number()) {
        return Expr::num(x + y);
    }
    if a.is_zero() {
        return b;
    }
    if b.is_zero() {
        return a;
    }
    if let Some(nb) = strip_neg(&b) {
        return sub(a, nb.clone());
    }
    if let Some(na) = strip_neg(&a) {
        return sub(b, na.clone());
    }
    Expr::binary_raw(BinOp::Add, a, b)
}

pub(super) fn sub(a: Expr, b: Expr) -> Expr {
    if let (Some(x), Some(y)) = (a.as_number(), b.as_number()) {
        return Expr::num(x - y);
    }
    if b.is_zero() {
        return a;
    }
    if a.is_zero() {
        return neg(b);
    }
    if a == b {
        return Expr::zero();
    }
    if let Some(nb) = strip_neg(&b) {
        return add(a, nb.clone());
    }
    Expr::binary_raw(BinOp::Sub, a, b)
}

pub(super) fn mul(a: Expr, b: Expr) -> Expr {
    if let (Some(x), Some(y)) = (a.as_number(), b.as_number()) {
        return Expr::num(x * y);
    }
    if a.is_zero() || b.is_zero() {
        return Expr::zero();
    }
    if a.is_one() {
        return b;
    }
    if b.is_one() {
        return a;
    }
    if let Some(na) = strip_neg(&a) {
        return neg(mul(na.clone(), b));
    }
    if let Some(nb) = strip_neg(&b) {
        return neg(mul(a, nb.clone()));
    }
    // literal coefficients drift to the left: c1 * (c2 * e) -> (c1 c2) * e
    if let Some(x) = a.as_number() {
        if let Node::Binary(BinOp::Mul, l, r) = b.node() {
            if let Some(y) = l.as_number() {
                return mul(Expr::num(x * y), r.clone());
            }
        }
    }
    if b.as_number().is_some() && a.as_number().is_none() {
        return mul(b, a);
    }
    Expr::binary_raw(BinOp::Mul, a, b)
}

pub(super) fn div(a: Expr, b: Expr) -> Expr {
    if let (Some(x), Some(y)) = (a.as_number(), b.as_number()) {
        if y != 0.0 {
            let q = x / y;
            // keep exact-looking fractions such as 1/3 symbolic
            if (q * y) == x && q.fract() == 0.0 {
                return Expr::num(q);
            }
        }
    }
    if a.is_zero() && !b.is_zero() {
        return Expr::zero();
    }
    if b.is_one() {
        return a;
    }
    if let Some(na) = strip_neg(&a) {
        return neg(div(na.clone(), b));
    }
    if let Some(nb) = strip_neg(&b) {
        return neg(div(a, nb.clone()));
    }
    if a == b && !a.is_zero() {
        return Expr::one();
    }
    Expr::binary_raw(BinOp::Div, a, b)
}

fn is_integer(v: f64) -> bool {
    v.fract() == 0.0 && v.abs() < 1e15
}

pub(super) fn pow(a: Expr, b: Expr) -> Expr {
    if b.is_zero() {
        return Expr::one();
    }
    if b.is_one() {
        return a;
    }
    if a.is_one() {
        return Expr::one();
    }
    if let (Some(x), Some(y)) = (a.as_number(), b.as_number()) {
        if is_integer(y) && (0.0..=64.0).contains(&y) {
            let r = x.powf(y);
            if r.is_finite() {
                return Expr::num(r);
            }
        }
    }
    if a.is_zero() {
        if let Some(y) = b.as_number() {
            if y > 0.0 {
                return Expr::zero();
            }
        }
    }
    if let (Node::Binary(BinOp::Pow, base, inner), Some(q)) = (a.node(), b.as_number()) {
        if let Some(p) = inner.as_number() {
            if is_integer(q) {
                return pow(base.clone(), Expr::num(p * q));
            }
        }
    }
    Expr::binary_raw(BinOp::Pow, a, b)
}

pub(super) fn call(f: Func, a: Expr) -> Expr {
    if let Some(v) = a.as_number() {
        let folded = match (f, v) {
            (Func::Exp, 0.0) => Some(1.0),
            (Func::Ln, 1.0) => Some(0.0),
            (Func::Sqrt, x) if x == 0.0 || x == 1.0 => Some(x),
            (Func::Sin, 0.0) => Some(0.0),
            (Func::Cos, 0.0) => Some(1.0),
            _ => None,
        };
        if let Some(r) = folded {
            return Expr::num(r);
        }
    }
    match (f, a.node()) {
        (Func::Ln, Node::Call(Func::Exp, inner)) => inner.clone(),
        (Func::Exp, Node::Call(Func::Ln, inner)) => inner.clone(),
        _ => Expr::call_raw(f, a),
    }
}

#[cfg(test)]
mod tests {
    use crate::symbolic::{parse, Bindings, Expr};

    fn s(text: &str) -> String {
        parse(text).unwrap().simplify().to_string()
    }

    #[test]
    fn identities() {
        assert_eq!(s("0*exp(t)+x"), "x");
        assert_eq!(s("2*3"), "6");
        assert_eq!(s("x^1 * 1 + 0"), "x");
        assert_eq!(s("(x^2)^3"), "x^6");
        assert_eq!(s("--t"), "t");
        assert_eq!(s("t - t"), "0");
        assert_eq!(s("ln(exp(t))"), "t");
        assert_eq!(s("2 - 5"), "-3");
    }

    #[test]
    fn mixed_partial_of_product_is_one() {
        let e = parse("t*x").unwrap();
        let d = e.differentiate("t").differentiate("x").simplify();
        assert_eq!(d.to_string(), "1");
    }

    #[test]
    fn non_integer_outer_power_is_kept() {
        // (x^2)^(1/2) is |x|, not x
        let e = s("(x^2)^0.5");
        assert_eq!(e, "(x^2)^0.5");
        let v = parse(&e)
            .unwrap()
            .evaluate(&Bindings::new().with("x", -3.0))
            .unwrap();
        assert_eq!(v, 3.0);
    }

    #[test]
    fn coefficients_fold() {
        let e = Expr::mul(Expr::num(2.0), Expr::mul(Expr::num(3.0), Expr::var("t")));
        assert_eq!(e.to_string(), "6*t");
        let e = Expr::mul(Expr::var("t"), Expr::num(-4.0));
        assert_eq!(e.to_string(), "-(4*t)");
    }
}
