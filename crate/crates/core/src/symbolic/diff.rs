use super::{BinOp, Expr, Func, Node};

pub(super) fn differentiate(e: &Expr, var: &str) -> Expr {
    match e.node() {
        Node::Num(_) | Node::Const(_) => Expr::zero(),
        Node::Var(name) => {
            if name.as_ref() == var {
                Expr::one()
            } else {
                Expr::zero()
            }
        }
        Node::Neg(a) => Expr::neg(differentiate(a, var)),
        Node::Call(f, a) => {
            let da = differentiate(a, var);
            if da.is_zero() {
                return Expr::zero();
            }
            let outer = match f {
                Func::Exp => e.clone(),
                Func::Ln => return Expr::div(da, a.clone()),
                Func::Sqrt => return Expr::div(da, Expr::mul(Expr::num(2.0), e.clone())),
                Func::Sin => Expr::call(Func::Cos, a.clone()),
                Func::Cos => Expr::neg(Expr::call(Func::Sin, a.clone())),
            };
            Expr::mul(outer, da)
        }
        Node::Binary(op, a, b) => {
            let da = differentiate(a, var);
            let db = differentiate(b, var);
            match op {
                BinOp::Add => Expr::add(da, db),
                BinOp::Sub => Expr::sub(da, db),
                BinOp::Mul => Expr::add(Expr::mul(da, b.clone()), Expr::mul(a.clone(), db)),
                BinOp::Div => {
                    let first = Expr::div(da, b.clone());
                    if db.is_zero() {
                        return first;
                    }
                    let second = Expr::div(
                        Expr::mul(a.clone(), db),
                        Expr::pow(b.clone(), Expr::num(2.0)),
                    );
                    Expr::sub(first, second)
                }
                BinOp::Pow => power_rule(e, a, b, da, db),
            }
        }
    }
}

fn power_rule(e: &Expr, base: &Expr, exponent: &Expr, db: Expr, de: Expr) -> Expr {
    match (db.is_zero(), de.is_zero()) {
        (true, true) => Expr::zero(),
        // d(u^c) = c u^(c-1) u'
        (false, true) => {
            let reduced = Expr::pow(base.clone(), Expr::sub(exponent.clone(), Expr::one()));
            Expr::mul(Expr::mul(exponent.clone(), reduced), db)
        }
        // d(a^w) = a^w ln(a) w'
        (true, false) => Expr::mul(Expr::mul(e.clone(), Expr::ln(base.clone())), de),
        (false, false) => {
            let log_part = Expr::mul(de, Expr::ln(base.clone()));
            let ratio = Expr::div(Expr::mul(exponent.clone(), db), base.clone());
            Expr::mul(e.clone(), Expr::add(log_part, ratio))
        }
    }
}
