use std::collections::BTreeMap;

use serde::Serialize;

use super::{coordinate_bindings, normalize_coordinates, validate_symbols, InfoGeoError};
use crate::symbolic::{parse, Expr, ParseError};

/// A potential function together with its constants and domain.
///
/// The potential is stored twice: as written (for reporting and export) and
/// resolved, with constants substituted and `t`/`x` mapped to
/// `theta1`/`theta2` in two dimensions.
#[derive(Clone, Debug, Serialize)]
pub struct PotentialSpec {
    name: String,
    dim: usize,
    potential: Expr,
    constants: BTreeMap<String, f64>,
    domain: Vec<Expr>,
    expected_lambda: Option<f64>,
    #[serde(skip)]
    resolved: Expr,
    #[serde(skip)]
    resolved_domain: Vec<Expr>,
}

#[derive(Clone, Debug)]
pub struct PotentialSpecBuilder {
    name: String,
    dim: usize,
    potential: Expr,
    constants: BTreeMap<String, f64>,
    domain: Vec<Expr>,
    expected_lambda: Option<f64>,
}

impl PotentialSpec {
    pub fn builder(name: impl Into<String>, dim: usize, potential: Expr) -> PotentialSpecBuilder {
        PotentialSpecBuilder {
            name: name.into(),
            dim,
            potential,
            constants: BTreeMap::new(),
            domain: Vec::new(),
            expected_lambda: None,
        }
    }

    /// Parses `text` as an unconstrained potential with no constants.
    pub fn parse(name: impl Into<String>, dim: usize, text: &str) -> Result<Self, InfoGeoError> {
        Self::builder(name, dim, parse(text)?).build()
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// The potential as written.
    pub fn potential(&self) -> &Expr {
        &self.potential
    }

    /// The potential in `theta1..thetaN` only.
    pub fn resolved(&self) -> &Expr {
        &self.resolved
    }

    pub fn constants(&self) -> &BTreeMap<String, f64> {
        &self.constants
    }

    pub fn domain(&self) -> &[Expr] {
        &self.domain
    }

    pub fn resolved_domain(&self) -> &[Expr] {
        &self.resolved_domain
    }

    pub fn expected_lambda(&self) -> Option<f64> {
        self.expected_lambda
    }

    /// Same potential with a different expected λ.
    pub fn with_expected_lambda(mut self, lambda: Option<f64>) -> Self {
        self.expected_lambda = lambda;
        self
    }

    /// Checks the domain constraints at `pt`.
    pub fn check_point(&self, pt: &[f64]) -> Result<(), InfoGeoError> {
        check_constraints(&self.resolved_domain, self.dim, pt)
    }

    /// Whether `pt` satisfies the constraints and `ψ` evaluates there.
    pub fn contains(&self, pt: &[f64]) -> bool {
        self.check_point(pt).is_ok() && self.resolved.evaluate(&coordinate_bindings(pt)).is_ok()
    }
}

impl PotentialSpecBuilder {
    pub fn constant(mut self, name: impl Into<String>, value: f64) -> Self {
        self.constants.insert(name.into(), value);
        self
    }

    /// Adds a constraint `e > 0`.
    pub fn domain(mut self, e: Expr) -> Self {
        self.domain.push(e);
        self
    }

    pub fn domain_text(self, text: &str) -> Result<Self, ParseError> {
        let e = parse(text)?;
        Ok(self.domain(e))
    }

    pub fn expected_lambda(mut self, lambda: f64) -> Self {
        self.expected_lambda = Some(lambda);
        self
    }

    pub fn build(self) -> Result<PotentialSpec, InfoGeoError> {
        if self.dim == 0 {
            return Err(InfoGeoError::ZeroDimension);
        }
        let resolve = |e: &Expr| -> Result<Expr, InfoGeoError> {
            let bound = e
                .substitute_values(self.constants.iter().map(|(k, v)| (k.as_str(), *v)))
                .simplify();
            let r = normalize_coordinates(&bound, self.dim);
            validate_symbols(&r, self.dim)?;
            Ok(r)
        };
        let resolved = resolve(&self.potential)?;
        let resolved_domain = self.domain.iter().map(resolve).collect::<Result<_, _>>()?;
        Ok(PotentialSpec {
            name: self.name,
            dim: self.dim,
            potential: self.potential,
            constants: self.constants,
            domain: self.domain,
            expected_lambda: self.expected_lambda,
            resolved,
            resolved_domain,
        })
    }
}

pub(super) fn check_constraints(
    constraints: &[Expr],
    dim: usize,
    pt: &[f64],
) -> Result<(), InfoGeoError> {
    if pt.len() != dim {
        return Err(InfoGeoError::DimensionMismatch {
            expected: dim,
            got: pt.len(),
        });
    }
    let b = coordinate_bindings(pt);
    for c in constraints {
        let ok = matches!(c.evaluate(&b), Ok(v) if v > 0.0);
        if !ok {
            return Err(InfoGeoError::DomainViolation {
                constraint: c.clone(),
                point: pt.to_vec(),
            });
        }
    }
    Ok(())
}
