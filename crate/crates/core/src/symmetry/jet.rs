use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;

use serde::{Serialize, Serializer};

use super::SymmetryError;
use crate::symbolic::Expr;

/// Highest derivative order representable in jet space.
pub const MAX_ORDER: usize = 4;

/// Independent variable direction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Dir {
    T,
    X,
}

impl Dir {
    pub const BOTH: [Dir; 2] = [Dir::T, Dir::X];

    pub fn name(self) -> &'static str {
        match self {
            Dir::T => "t",
            Dir::X => "x",
        }
    }
}

/// Counts of `t` and `x` derivatives, e.g. `u_ttx` is `{ t: 2, x: 1 }`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub struct MultiIndex {
    pub t: usize,
    pub x: usize,
}

impl MultiIndex {
    pub const fn new(t: usize, x: usize) -> Self {
        MultiIndex { t, x }
    }

    pub fn order(self) -> usize {
        self.t + self.x
    }

    pub fn bump(self, dir: Dir) -> Self {
        match dir {
            Dir::T => MultiIndex::new(self.t + 1, self.x),
            Dir::X => MultiIndex::new(self.t, self.x + 1),
        }
    }

    /// Jet coordinate name: `u`, `u_t`, `u_tx`, ...
    pub fn name(self) -> String {
        if self.order() == 0 {
            return "u".into();
        }
        format!("u_{}{}", "t".repeat(self.t), "x".repeat(self.x))
    }

    pub fn var(self) -> Expr {
        Expr::var(self.name())
    }

    /// Inverse of [`name`](Self::name); `None` for anything that is not a
    /// well-formed jet coordinate.
    pub fn parse(name: &str) -> Option<Self> {
        if name == "u" {
            return Some(MultiIndex::default());
        }
        let letters = name.strip_prefix("u_")?;
        let t = letters.bytes().take_while(|&b| b == b't').count();
        let rest = &letters[t..];
        if letters.is_empty() || !rest.bytes().all(|b| b == b'x') {
            return None;
        }
        Some(MultiIndex::new(t, rest.len()))
    }

    /// All multi-indices up to `max_order`, ordered by order, then t-first.
    pub fn up_to(max_order: usize) -> Vec<MultiIndex> {
        (0..=max_order)
            .flat_map(|k| (0..=k).rev().map(move |t| MultiIndex::new(t, k - t)))
            .collect()
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.order(), other.t).cmp(&(other.order(), self.t))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl Serialize for MultiIndex {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// What a free variable of a jet expression stands for.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum JetVar {
    Independent(Dir),
    Dependent(MultiIndex),
}

pub fn classify(name: &str) -> Option<JetVar> {
    match name {
        "t" => Some(JetVar::Independent(Dir::T)),
        "x" => Some(JetVar::Independent(Dir::X)),
        other => MultiIndex::parse(other).map(JetVar::Dependent),
    }
}

/// Expression over `t`, `x`, `u` and derivative coordinates `u_J` with
/// `|J| <= MAX_ORDER`.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(transparent)]
pub struct JetExpr(Expr);

impl JetExpr {
    pub fn new(e: Expr) -> Result<Self, SymmetryError> {
        for v in e.free_variables() {
            match classify(&v) {
                Some(JetVar::Dependent(j)) if j.order() > MAX_ORDER => {
                    return Err(SymmetryError::OrderOverflow {
                        coordinate: v,
                        max: MAX_ORDER,
                    })
                }
                Some(_) => {}
                None => return Err(SymmetryError::UnknownSymbol(v)),
            }
        }
        Ok(JetExpr(e))
    }

    pub fn parse(text: &str) -> Result<Self, SymmetryError> {
        Self::new(crate::symbolic::parse(text)?)
    }

    pub fn expr(&self) -> &Expr {
        &self.0
    }

    pub fn into_expr(self) -> Expr {
        self.0
    }

    /// Derivative coordinates present, in multi-index order.
    pub fn coordinates(&self) -> BTreeSet<MultiIndex> {
        self.0
            .free_variables()
            .iter()
            .filter_map(|v| MultiIndex::parse(v))
            .collect()
    }

    /// Highest derivative order present (0 if only `u` or none).
    pub fn order(&self) -> usize {
        self.coordinates()
            .iter()
            .map(|j| j.order())
            .max()
            .unwrap_or(0)
    }
}

impl fmt::Display for JetExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// `D_dir e = ∂e/∂dir + Σ_J u_{J+dir} ∂e/∂u_J`.
pub fn total_derivative(e: &JetExpr, dir: Dir) -> Result<JetExpr, SymmetryError> {
    let mut terms = vec![e.0.differentiate(dir.name())];
    for j in e.coordinates() {
        let next = j.bump(dir);
        if next.order() > MAX_ORDER {
            return Err(SymmetryError::OrderOverflow {
                coordinate: next.name(),
                max: MAX_ORDER,
            });
        }
        terms.push(Expr::mul(e.0.differentiate(&j.name()), next.var()));
    }
    Ok(JetExpr(Expr::sum(terms)))
}
