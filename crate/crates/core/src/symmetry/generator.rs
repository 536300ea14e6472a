use std::collections::BTreeMap;

use serde::Serialize;

use super::jet::{classify, total_derivative, Dir, JetExpr, JetVar, MultiIndex, MAX_ORDER};
use super::SymmetryError;
use crate::symbolic::{parse, Bindings, Expr};

/// Point-symmetry generator `ξt ∂t + ξx ∂x + η ∂u`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GeneratorField {
    pub name: String,
    pub xi_t: Expr,
    pub xi_x: Expr,
    pub eta: Expr,
}

/// `(name, ξt, ξx, η)` for the symmetry algebra of the 2-D Einstein PDE.
const EINSTEIN_GENERATORS: [(&str, &str, &str, &str); 9] = [
    ("X1", "1", "0", "0"),
    ("X2", "0", "1", "0"),
    ("X3", "0", "0", "1"),
    ("X4", "t", "0", "0"),
    ("X5", "0", "x", "0"),
    ("X6", "x", "0", "0"),
    ("X7", "0", "t", "0"),
    ("X8", "0", "0", "t"),
    ("X9", "0", "0", "x"),
];

/// The heat equation `u_t = u_xx` symmetry algebra (finite part).
const HEAT_GENERATORS: [(&str, &str, &str, &str); 6] = [
    ("H1", "0", "1", "0"),
    ("H2", "1", "0", "0"),
    ("H3", "0", "0", "u"),
    ("H4", "2*t", "x", "0"),
    ("H5", "0", "2*t", "-(x*u)"),
    ("H6", "4*t^2", "4*t*x", "-((x^2 + 2*t)*u)"),
];

impl GeneratorField {
    pub fn new(
        name: impl Into<String>,
        xi_t: Expr,
        xi_x: Expr,
        eta: Expr,
    ) -> Result<Self, SymmetryError> {
        for e in [&xi_t, &xi_x, &eta] {
            check_point_coefficient(e)?;
        }
        Ok(GeneratorField {
            name: name.into(),
            xi_t,
            xi_x,
            eta,
        })
    }

    /// Names of the built-in generators, Einstein PDE first.
    pub fn predefined_names() -> impl Iterator<Item = &'static str> {
        EINSTEIN_GENERATORS
            .iter()
            .chain(&HEAT_GENERATORS)
            .map(|(n, ..)| *n)
    }

    pub fn predefined(name: &str) -> Option<Self> {
        let (n, t, x, u) = EINSTEIN_GENERATORS
            .iter()
            .chain(&HEAT_GENERATORS)
            .find(|(n, ..)| *n == name)?;
        let p = |s: &str| parse(s).expect("built-in generator parses");
        Some(GeneratorField::new(*n, p(t), p(x), p(u)).expect("built-in generator is valid"))
    }

    /// Parses `xi_t = ...; xi_x = ...; eta = ...`. Components may appear in
    /// any order; omitted ones are zero.
    pub fn parse_components(name: impl Into<String>, text: &str) -> Result<Self, SymmetryError> {
        let mut parts: BTreeMap<&str, Expr> = BTreeMap::new();
        for clause in text.split(';').map(str::trim).filter(|c| !c.is_empty()) {
            let (key, value) = clause.split_once('=').ok_or_else(|| {
                SymmetryError::BadGenerator(format!("expected `key = expr` in `{clause}`"))
            })?;
            let key = key.trim();
            if !["xi_t", "xi_x", "eta"].contains(&key) {
                return Err(SymmetryError::BadGenerator(format!(
                    "unknown component `{key}` (expected xi_t, xi_x or eta)"
                )));
            }
            if parts.insert(key, parse(value)?).is_some() {
                return Err(SymmetryError::BadGenerator(format!(
                    "component `{key}` given twice"
                )));
            }
        }
        let mut take = |k: &str| parts.remove(k).unwrap_or_else(Expr::zero);
        GeneratorField::new(name, take("xi_t"), take("xi_x"), take("eta"))
    }

    /// Accepts a component list (`xi_t = ...`), a built-in name, or a linear
    /// combination of built-in names such as `X4 + 0.5*X2`.
    pub fn from_text(text: &str) -> Result<Self, SymmetryError> {
        let text = text.trim();
        if text.contains('=') {
            return Self::parse_components("custom", text);
        }
        if let Some(g) = Self::predefined(text) {
            return Ok(g);
        }
        let e = parse(text)?;
        let names = e.free_variables();
        let zero: Bindings = names.iter().map(|n| (n.as_str(), 0.0)).collect();
        let offset = e
            .evaluate(&zero)
            .map_err(|err| SymmetryError::BadGenerator(err.to_string()))?;
        if offset != 0.0 || names.is_empty() {
            return Err(SymmetryError::BadGenerator(format!(
                "`{text}` is not a linear combination of generator names"
            )));
        }
        let mut terms = Vec::new();
        for n in &names {
            let g =
                Self::predefined(n).ok_or_else(|| SymmetryError::UnknownGenerator(n.clone()))?;
            let coeff = e.differentiate(n);
            let c = coeff.evaluate(&Bindings::new()).map_err(|_| {
                SymmetryError::BadGenerator(format!("`{text}` is not linear in `{n}`"))
            })?;
            terms.push((c, g));
        }
        let refs: Vec<(f64, &GeneratorField)> = terms.iter().map(|(c, g)| (*c, g)).collect();
        Ok(Self::combination(text, &refs))
    }

    /// `Σ c_k g_k`, with no validation needed since each part is valid.
    pub fn combination(name: impl Into<String>, terms: &[(f64, &GeneratorField)]) -> Self {
        let part = |f: fn(&GeneratorField) -> &Expr| {
            Expr::sum(
                terms
                    .iter()
                    .map(|(c, g)| Expr::mul(Expr::num(*c), f(g).clone())),
            )
        };
        GeneratorField {
            name: name.into(),
            xi_t: part(|g| &g.xi_t),
            xi_x: part(|g| &g.xi_x),
            eta: part(|g| &g.eta),
        }
    }

    pub fn xi(&self, dir: Dir) -> &Expr {
        match dir {
            Dir::T => &self.xi_t,
            Dir::X => &self.xi_x,
        }
    }

    /// `Q = η - ξt u_t - ξx u_x`.
    pub fn characteristic(&self) -> JetExpr {
        let q = Expr::sub(
            Expr::sub(
                self.eta.clone(),
                Expr::mul(self.xi_t.clone(), MultiIndex::new(1, 0).var()),
            ),
            Expr::mul(self.xi_x.clone(), MultiIndex::new(0, 1).var()),
        );
        JetExpr::new(q).expect("point coefficients give a first-order characteristic")
    }

    /// Coefficients `η^J = D_J Q + ξt u_{J+t} + ξx u_{J+x}` for `|J| <= order`.
    pub fn prolong(&self, order: usize) -> Result<ProlongedGenerator, SymmetryError> {
        if order + 1 > MAX_ORDER {
            return Err(SymmetryError::OrderOverflow {
                coordinate: format!("order {order} prolongation"),
                max: MAX_ORDER,
            });
        }
        let mut dq: BTreeMap<MultiIndex, JetExpr> = BTreeMap::new();
        dq.insert(MultiIndex::default(), self.characteristic());
        let mut coefficients = BTreeMap::new();
        coefficients.insert(MultiIndex::default(), JetExpr::new(self.eta.clone())?);
        for j in MultiIndex::up_to(order).into_iter().skip(1) {
            let (parent, dir) = if j.t > 0 {
                (MultiIndex::new(j.t - 1, j.x), Dir::T)
            } else {
                (MultiIndex::new(j.t, j.x - 1), Dir::X)
            };
            let d = total_derivative(&dq[&parent], dir)?;
            let transport = Dir::BOTH.map(|dir| Expr::mul(self.xi(dir).clone(), j.bump(dir).var()));
            let [a, b] = transport;
            let coeff = Expr::sum([d.expr().clone(), a, b]);
            coefficients.insert(j, JetExpr::new(coeff)?);
            dq.insert(j, d);
        }
        Ok(ProlongedGenerator {
            base: self.clone(),
            order,
            coefficients,
        })
    }
}

fn check_point_coefficient(e: &Expr) -> Result<(), SymmetryError> {
    for v in e.free_variables() {
        match classify(&v) {
            Some(JetVar::Independent(_)) => {}
            Some(JetVar::Dependent(j)) if j.order() == 0 => {}
            Some(JetVar::Dependent(_)) => return Err(SymmetryError::DerivativeInGenerator(v)),
            None => return Err(SymmetryError::UnknownSymbol(v)),
        }
    }
    Ok(())
}

#[derive(Clone, Debug, Serialize)]
pub struct ProlongedGenerator {
    pub base: GeneratorField,
    pub order: usize,
    pub coefficients: BTreeMap<MultiIndex, JetExpr>,
}

impl ProlongedGenerator {
    pub fn coefficient(&self, j: MultiIndex) -> Option<&JetExpr> {
        self.coefficients.get(&j)
    }

    /// Coefficient of `∂/∂z` for a jet variable `z`, or `None` if `z` lies
    /// beyond the prolongation order.
    pub fn component(&self, var: &str) -> Option<Expr> {
        match classify(var)? {
            JetVar::Independent(dir) => Some(self.base.xi(dir).clone()),
            JetVar::Dependent(j) => self.coefficients.get(&j).map(|c| c.expr().clone()),
        }
    }

    /// Terms `(coefficient, ∂F/∂z)` of `pr X(F)`, one per variable of `F`.
    pub fn terms(&self, f: &JetExpr) -> Result<Vec<(Expr, Expr)>, SymmetryError> {
        f.expr()
            .free_variables()
            .into_iter()
            .map(|v| {
                let c = self
                    .component(&v)
                    .ok_or_else(|| SymmetryError::OrderOverflow {
                        coordinate: v.clone(),
                        max: self.order,
                    })?;
                Ok((c, f.expr().differentiate(&v)))
            })
            .collect()
    }

    /// `pr X(F)` as a single expression.
    pub fn apply(&self, f: &JetExpr) -> Result<Expr, SymmetryError> {
        Ok(Expr::sum(
            self.terms(f)?.into_iter().map(|(c, d)| Expr::mul(c, d)),
        ))
    }
}
