//! Printing with the minimal parentheses needed for `parse` to rebuild the
//! same tree.

use std::fmt;

use super::{BinOp, Expr, Node};

const ADDITIVE: u8 = 1;
const MULTIPLICATIVE: u8 = 2;
const UNARY: u8 = 3;
const POWER: u8 = 4;
const ATOM: u8 = 5;

fn precedence(e: &Expr) -> u8 {
    match e.node() {
        Node::Num(_) | Node::Const(_) | Node::Var(_) | Node::Call(..) => ATOM,
        Node::Neg(_) => UNARY,
        Node::Binary(op, ..) => match op {
            BinOp::Add | BinOp::Sub => ADDITIVE,
            BinOp::Mul | BinOp::Div => MULTIPLICATIVE,
            BinOp::Pow => POWER,
        },
    }
}

fn write_operand(f: &mut fmt::Formatter<'_>, e: &Expr, min: u8) -> fmt::Result {
    if precedence(e) < min {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.node() {
            Node::Num(v) => write!(f, "{v}"),
            Node::Const(c) => f.write_str(c.name()),
            Node::Var(name) => f.write_str(name),
            Node::Call(func, a) => write!(f, "{}({a})", func.name()),
            Node::Neg(a) => {
                f.write_str("-")?;
                write_operand(f, a, UNARY)
            }
            Node::Binary(op, a, b) => match op {
                BinOp::Add | BinOp::Sub => {
                    write_operand(f, a, ADDITIVE)?;
                    write!(f, " {} ", op.symbol())?;
                    write_operand(f, b, MULTIPLICATIVE)
                }
                BinOp::Mul | BinOp::Div => {
                    write_operand(f, a, MULTIPLICATIVE)?;
                    f.write_str(op.symbol())?;
                    write_operand(f, b, UNARY)
                }
                BinOp::Pow => {
                    write_operand(f, a, ATOM)?;
                    f.write_str("^")?;
                    write_operand(f, b, UNARY)
                }
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use crate::symbolic::{parse, BinOp, Constant, Expr, Func};
    use proptest::prelude::*;

    fn arb_expr() -> impl Strategy<Value = Expr> {
        let leaf = prop_oneof![
            (0u32..1000, 0u32..4).prop_map(|(m, s)| Expr::num(m as f64 / 10f64.powi(s as i32))),
            prop::sample::select(vec!["t", "x", "theta1", "c_2"]).prop_map(Expr::var),
            prop::sample::select(Constant::ALL.to_vec()).prop_map(Expr::constant),
        ];
        leaf.prop_recursive(5, 48, 2, |inner| {
            prop_oneof![
                inner.clone().prop_map(Expr::neg_raw),
                (prop::sample::select(Func::ALL.to_vec()), inner.clone())
                    .prop_map(|(f, a)| Expr::call_raw(f, a)),
                (
                    prop::sample::select(vec![
                        BinOp::Add,
                        BinOp::Sub,
                        BinOp::Mul,
                        BinOp::Div,
                        BinOp::Pow
                    ]),
                    inner.clone(),
                    inner
                )
                    .prop_map(|(op, a, b)| Expr::binary_raw(op, a, b)),
            ]
        })
    }

    proptest! {
        #[test]
        fn print_then_parse_is_structural_identity(e in arb_expr()) {
            let text = e.to_string();
            let back = parse(&text).unwrap();
            prop_assert_eq!(back, e, "{}", text);
        }
    }

    #[test]
    fn parenthesization() {
        let cases = [
            ("a - (b - c)", "a - (b - c)"),
            ("(a - b) - c", "a - b - c"),
            ("a/(b*c)", "a/(b*c)"),
            ("(a^b)^c", "(a^b)^c"),
            ("a^(b^c)", "a^b^c"),
            ("(-a)^2", "(-a)^2"),
            ("-(a*b)", "-(a*b)"),
            ("a*(-b)", "a*-b"),
            ("2^(-x)", "2^-x"),
        ];
        for (input, printed) in cases {
            assert_eq!(parse(input).unwrap().to_string(), printed, "{input}");
        }
    }
}
