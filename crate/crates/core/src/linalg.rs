//! Small dense square matrices for pointwise tensor contractions.

use std::ops::{Index, IndexMut};

use serde::{Deserialize, Serialize};

/// Row-major square matrix; serialized as a list of rows.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(into = "Vec<Vec<f64>>", try_from = "Vec<Vec<f64>>")]
pub struct Matrix {
    dim: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(dim: usize) -> Self {
        Matrix {
            dim,
            data: vec![0.0; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_fn(dim, |i, j| if i == j { 1.0 } else { 0.0 })
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.data
            .chunks(self.dim.max(1))
            .map(<[f64]>::to_vec)
            .collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn scaled(&self, s: f64) -> Self {
        Matrix {
            dim: self.dim,
            data: self.data.iter().map(|v| v * s).collect(),
        }
    }

    pub fn add(&self, other: &Matrix) -> Self {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        Matrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    /// Determinant by Gaussian elimination with partial pivoting.
    pub fn determinant(&self) -> f64 {
        let n = self.dim;
        let mut a = self.data.clone();
        let mut det = 1.0;
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&r, &s| a[r * n + col].abs().total_cmp(&a[s * n + col].abs()))
                .expect("non-empty range");
            if a[pivot * n + col] == 0.0 {
                return 0.0;
            }
            if pivot != col {
                for k in 0..n {
                    a.swap(pivot * n + k, col * n + k);
                }
                det = -det;
            }
            let p = a[col * n + col];
            det *= p;
            for r in col + 1..n {
                let factor = a[r * n + col] / p;
                for k in col..n {
                    a[r * n + k] -= factor * a[col * n + k];
                }
            }
        }
        det
    }

    /// Inverse by Gauss-Jordan elimination; `None` when a pivot vanishes.
    pub fn inverse(&self) -> Option<Matrix> {
        let n = self.dim;
        let mut a = self.data.clone();
        let mut inv = Matrix::identity(n).data;
        for col in 0..n {
            let pivot =
                (col..n).max_by(|&r, &s| a[r * n + col].abs().total_cmp(&a[s * n + col].abs()))?;
            if a[pivot * n + col] == 0.0 {
                return None;
            }
            for k in 0..n {
                a.swap(pivot * n + k, col * n + k);
                inv.swap(pivot * n + k, col * n + k);
            }
            let p = a[col * n + col];
            for k in 0..n {
                a[col * n + k] /= p;
                inv[col * n + k] /= p;
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let factor = a[r * n + col];
                if factor == 0.0 {
                    continue;
                }
                for k in 0..n {
                    a[r * n + k] -= factor * a[col * n + k];
                    inv[r * n + k] -= factor * inv[col * n + k];
                }
            }
        }
        Some(Matrix { dim: n, data: inv })
    }

    /// Determinants of the leading k x k blocks, k = 1..=dim.
    pub fn leading_minors(&self) -> Vec<f64> {
        (1..=self.dim)
            .map(|k| Matrix::from_fn(k, |i, j| self[(i, j)]).determinant())
            .collect()
    }

    /// Leading principal minors, normalized by `max_abs^k`, all exceed `margin`.
    pub fn is_positive_definite(&self, margin: f64) -> bool {
        let scale = self.max_abs();
        if scale == 0.0 {
            return false;
        }
        self.leading_minors()
            .iter()
            .enumerate()
            .all(|(k, m)| m / scale.powi(k as i32 + 1) > margin)
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.dim + j]
    }
}

impl From<Matrix> for Vec<Vec<f64>> {
    fn from(m: Matrix) -> Self {
        m.rows()
    }
}

impl TryFrom<Vec<Vec<f64>>> for Matrix {
    type Error = String;

    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self, Self::Error> {
        let dim = rows.len();
        if rows.iter().any(|r| r.len() != dim) {
            return Err(format!("expected {dim} columns in every row"));
        }
        Ok(Matrix {
            dim,
            data: rows.into_iter().flatten().collect(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[f64]]) -> Matrix {
        Matrix::try_from(rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn determinant_and_inverse() {
        let a = m(&[&[2.0, 1.0, 0.0], &[1.0, 3.0, 1.0], &[0.0, 1.0, 4.0]]);
        assert!((a.determinant() - 18.0).abs() < 1e-12);
        let inv = a.inverse().unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let p: f64 = (0..3).map(|k| a[(i, k)] * inv[(k, j)]).sum();
                let e = if i == j { 1.0 } else { 0.0 };
                assert!((p - e).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn pivoting_handles_zero_leading_entry() {
        let a = m(&[&[0.0, 1.0], &[1.0, 0.0]]);
        assert_eq!(a.determinant(), -1.0);
        assert_eq!(a.inverse().unwrap(), a);
        assert!(m(&[&[1.0, 2.0], &[2.0, 4.0]]).inverse().is_none());
    }

    #[test]
    fn positive_definiteness() {
        assert!(m(&[&[1.0, 0.0], &[0.0, 2.0]]).is_positive_definite(1e-12));
        assert!(!m(&[&[1.0, 1.0], &[1.0, 1.0]]).is_positive_definite(1e-12));
        assert!(!m(&[&[-1.0, 0.0], &[0.0, 2.0]]).is_positive_definite(1e-12));
        assert!(!Matrix::zeros(2).is_positive_definite(1e-12));
    }

    #[test]
    fn serializes_as_rows() {
        let a = m(&[&[1.0, 2.0], &[3.0, 4.0]]);
        let json = serde_json::to_string(&a).unwrap();
        assert_eq!(json, "[[1.0,2.0],[3.0,4.0]]");
        let back: Matrix = serde_json::from_str(&json).unwrap();
        assert_eq!(back, a);
    }
}
