use serde::Serialize;

use super::potential::check_constraints;
use super::{
    coordinate, coordinate_bindings, normalize_coordinates, validate_symbols, InfoGeoError,
};
use crate::linalg::Matrix;
use crate::symbolic::Expr;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    FromPotential,
    Direct,
}

/// Symmetric matrix of expressions in `theta1..thetaN`.
#[derive(Clone, Debug, Serialize)]
pub struct MetricField {
    dim: usize,
    entries: Vec<Expr>,
    provenance: Provenance,
    domain: Vec<Expr>,
}

impl MetricField {
    pub(super) fn from_potential(dim: usize, entries: Vec<Expr>, domain: Vec<Expr>) -> Self {
        MetricField {
            dim,
            entries,
            provenance: Provenance::FromPotential,
            domain,
        }
    }

    /// A metric given entry by entry. Rows must form a structurally symmetric
    /// square matrix; `domain` holds constraints `e > 0`.
    pub fn direct(rows: Vec<Vec<Expr>>, domain: Vec<Expr>) -> Result<Self, InfoGeoError> {
        let dim = rows.len();
        if dim == 0 {
            return Err(InfoGeoError::ZeroDimension);
        }
        if rows.iter().any(|r| r.len() != dim) {
            return Err(InfoGeoError::NotSquare { dim });
        }
        let resolve = |e: &Expr| -> Result<Expr, InfoGeoError> {
            let r = normalize_coordinates(&e.simplify(), dim);
            validate_symbols(&r, dim)?;
            Ok(r)
        };
        let entries: Vec<Expr> = rows
            .iter()
            .flatten()
            .map(resolve)
            .collect::<Result<_, _>>()?;
        for i in 0..dim {
            for j in i + 1..dim {
                if entries[i * dim + j] != entries[j * dim + i] {
                    return Err(InfoGeoError::AsymmetricMetric { i, j });
                }
            }
        }
        let domain = domain.iter().map(resolve).collect::<Result<_, _>>()?;
        Ok(MetricField {
            dim,
            entries,
            provenance: Provenance::Direct,
            domain,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn get(&self, i: usize, j: usize) -> &Expr {
        &self.entries[i * self.dim + j]
    }

    pub fn domain(&self) -> &[Expr] {
        &self.domain
    }

    pub fn check_point(&self, pt: &[f64]) -> Result<(), InfoGeoError> {
        check_constraints(&self.domain, self.dim, pt)
    }

    pub fn evaluate(&self, pt: &[f64]) -> Result<Matrix, InfoGeoError> {
        self.check_point(pt)?;
        let b = coordinate_bindings(pt);
        let mut m = Matrix::zeros(self.dim);
        for i in 0..self.dim {
            for j in i..self.dim {
                let v = self.get(i, j).evaluate(&b)?;
                m[(i, j)] = v;
                m[(j, i)] = v;
            }
        }
        Ok(m)
    }

    /// Partial derivative of every entry along `theta{k+1}`.
    pub(super) fn derivative(&self, k: usize) -> Vec<Expr> {
        let v = coordinate(k);
        self.entries.iter().map(|e| e.differentiate(&v)).collect()
    }
}

/// Totally symmetric array `T_ijk`, stored densely.
#[derive(Clone, Debug, Serialize)]
pub struct CubicTensor {
    dim: usize,
    entries: Vec<Expr>,
}

impl CubicTensor {
    pub(super) fn new(dim: usize, entries: Vec<Expr>) -> Self {
        CubicTensor { dim, entries }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> &Expr {
        &self.entries[(i * self.dim + j) * self.dim + k]
    }

    pub fn evaluate(&self, pt: &[f64]) -> Result<Vec<f64>, InfoGeoError> {
        let b = coordinate_bindings(pt);
        Ok(self
            .entries
            .iter()
            .map(|e| e.evaluate(&b))
            .collect::<Result<_, _>>()?)
    }
}

/// Christoffel symbols of the first kind `Γ_{ij,k}` of an α-connection.
#[derive(Clone, Debug, Serialize)]
pub struct ConnectionCoeffs {
    alpha: f64,
    dim: usize,
    entries: Vec<Expr>,
}

impl ConnectionCoeffs {
    pub(super) fn new(alpha: f64, dim: usize, entries: Vec<Expr>) -> Self {
        ConnectionCoeffs {
            alpha,
            dim,
            entries,
        }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> &Expr {
        &self.entries[(i * self.dim + j) * self.dim + k]
    }
}
