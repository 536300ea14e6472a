use serde::Serialize;

use super::{coordinate_bindings, cubic_from_metric, fisher_metric, InfoGeoError};
use super::{CubicTensor, MetricField, PotentialSpec};
use crate::linalg::Matrix;
use crate::symbolic::Expr;

/// Relative determinant floor below which a metric counts as singular.
pub const SINGULAR_TOLERANCE: f64 = 1e-12;

/// Inverse of `g`, refusing when `|det g| <= 1e-12 · (max |g_ij|)^n`.
pub fn guarded_inverse(g: &Matrix) -> Result<Matrix, InfoGeoError> {
    let det = g.determinant();
    let scale = g.max_abs();
    let singular = InfoGeoError::SingularMetric { det, scale };
    if scale == 0.0 || det.abs() <= SINGULAR_TOLERANCE * scale.powi(g.dim() as i32) {
        return Err(singular);
    }
    g.inverse().ok_or(singular)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Sectional {
    pub i: usize,
    pub j: usize,
    pub value: f64,
}

/// Curvature quantities evaluated at one point. Indices are zero-based.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CurvatureBundle {
    pub point: Vec<f64>,
    pub alpha: f64,
    pub dim: usize,
    pub metric: Matrix,
    /// `R_ijkl` flattened row-major.
    pub riemann: Vec<f64>,
    pub ricci: Matrix,
    pub scalar: f64,
    /// `κ_ij` for every `i < j`.
    pub sectional: Vec<Sectional>,
}

impl CurvatureBundle {
    fn assemble(point: &[f64], alpha: f64, g: Matrix, ginv: &Matrix, riemann: Vec<f64>) -> Self {
        let n = g.dim();
        let r = |i: usize, j: usize, k: usize, l: usize| riemann[((i * n + j) * n + k) * n + l];
        let ricci = Matrix::from_fn(n, |i, j| {
            let mut acc = 0.0;
            for k in 0..n {
                for l in 0..n {
                    acc += r(i, k, l, j) * ginv[(k, l)];
                }
            }
            acc
        });
        let mut scalar = 0.0;
        for i in 0..n {
            for j in 0..n {
                scalar += ricci[(i, j)] * ginv[(i, j)];
            }
        }
        let mut sectional = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                let area = g[(i, i)] * g[(j, j)] - g[(i, j)] * g[(i, j)];
                sectional.push(Sectional {
                    i,
                    j,
                    value: -r(i, j, i, j) / area,
                });
            }
        }
        CurvatureBundle {
            point: point.to_vec(),
            alpha,
            dim: n,
            metric: g,
            riemann,
            ricci,
            scalar,
            sectional,
        }
    }

    pub fn riemann(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        let n = self.dim;
        self.riemann[((i * n + j) * n + k) * n + l]
    }

    pub fn sectional(&self, i: usize, j: usize) -> Option<f64> {
        let (i, j) = if i < j { (i, j) } else { (j, i) };
        self.sectional
            .iter()
            .find(|s| s.i == i && s.j == j)
            .map(|s| s.value)
    }

    /// `Ric + λ g`.
    pub fn einstein_residual(&self, lambda: f64) -> Matrix {
        self.ricci.add(&self.metric.scaled(lambda))
    }
}

/// Metric and cubic tensor of a potential, differentiated once and reused
/// for every evaluation point.
#[derive(Clone, Debug)]
pub struct PotentialGeometry {
    potential: Expr,
    metric: MetricField,
    cubic: CubicTensor,
}

impl PotentialGeometry {
    pub fn new(p: &PotentialSpec) -> Self {
        let metric = fisher_metric(p);
        let cubic = cubic_from_metric(&metric);
        PotentialGeometry {
            potential: p.resolved().clone(),
            metric,
            cubic,
        }
    }

    pub fn metric(&self) -> &MetricField {
        &self.metric
    }

    pub fn cubic(&self) -> &CubicTensor {
        &self.cubic
    }

    pub fn curvature(&self, alpha: f64, pt: &[f64]) -> Result<CurvatureBundle, InfoGeoError> {
        let n = self.metric.dim();
        let g = self.metric.evaluate(pt)?;
        self.potential.evaluate(&coordinate_bindings(pt))?;
        let ginv = guarded_inverse(&g)?;
        let t = self.cubic.evaluate(pt)?;
        let t = |i: usize, j: usize, k: usize| t[(i * n + j) * n + k];
        let factor = (1.0 - alpha * alpha) / 4.0;
        let mut riemann = vec![0.0; n * n * n * n];
        if factor != 0.0 {
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        for l in 0..n {
                            let mut acc = 0.0;
                            for m in 0..n {
                                for q in 0..n {
                                    acc += (t(k, m, i) * t(j, l, q) - t(k, m, j) * t(i, l, q))
                                        * ginv[(m, q)];
                                }
                            }
                            riemann[((i * n + j) * n + k) * n + l] = factor * acc;
                        }
                    }
                }
            }
        }
        Ok(CurvatureBundle::assemble(pt, alpha, g, &ginv, riemann))
    }
}

/// First and second derivatives of an explicit metric, prepared for
/// Levi-Civita curvature evaluation.
#[derive(Clone, Debug)]
pub struct MetricGeometry {
    metric: MetricField,
    /// `∂c g_ab` at `(a n + b) n + c`.
    d1: Vec<Expr>,
    /// `∂m ∂c g_ab` at `((a n + b) n + c) n + m`.
    d2: Vec<Expr>,
}

impl MetricGeometry {
    pub fn new(m: &MetricField) -> Self {
        let n = m.dim();
        let per_direction: Vec<Vec<Expr>> = (0..n).map(|c| m.derivative(c)).collect();
        let mut d1 = Vec::with_capacity(n * n * n);
        let mut d2 = Vec::with_capacity(n * n * n * n);
        for ab in 0..n * n {
            for dir in &per_direction {
                let e = &dir[ab];
                d1.push(e.clone());
                for mm in 0..n {
                    d2.push(e.differentiate(&super::coordinate(mm)));
                }
            }
        }
        MetricGeometry {
            metric: m.clone(),
            d1,
            d2,
        }
    }

    pub fn metric(&self) -> &MetricField {
        &self.metric
    }

    pub fn curvature(&self, pt: &[f64]) -> Result<CurvatureBundle, InfoGeoError> {
        let n = self.metric.dim();
        let g = self.metric.evaluate(pt)?;
        let ginv = guarded_inverse(&g)?;
        let b = coordinate_bindings(pt);
        let eval_all = |es: &[Expr]| -> Result<Vec<f64>, InfoGeoError> {
            Ok(es
                .iter()
                .map(|e| e.evaluate(&b))
                .collect::<Result<_, _>>()?)
        };
        let d1 = eval_all(&self.d1)?;
        let d2 = eval_all(&self.d2)?;
        let dg = |a: usize, b: usize, c: usize| d1[(a * n + b) * n + c];
        let ddg = |a: usize, b: usize, c: usize, m: usize| d2[((a * n + b) * n + c) * n + m];
        let i3 = |a: usize, b: usize, c: usize| (a * n + b) * n + c;
        let i4 = |a: usize, b: usize, c: usize, d: usize| ((a * n + b) * n + c) * n + d;

        // first kind: C_ijs = ½(∂i g_js + ∂j g_is - ∂s g_ij), and its derivatives
        let mut c1 = vec![0.0; n * n * n];
        let mut dc1 = vec![0.0; n * n * n * n];
        for i in 0..n {
            for j in 0..n {
                for s in 0..n {
                    c1[i3(i, j, s)] = 0.5 * (dg(j, s, i) + dg(i, s, j) - dg(i, j, s));
                    for m in 0..n {
                        dc1[i4(i, j, s, m)] =
                            0.5 * (ddg(j, s, i, m) + ddg(i, s, j, m) - ddg(i, j, s, m));
                    }
                }
            }
        }
        // ∂m g^ls = -g^la ∂m g_ab g^bs
        let mut dginv = vec![0.0; n * n * n];
        for l in 0..n {
            for s in 0..n {
                for m in 0..n {
                    let mut acc = 0.0;
                    for a in 0..n {
                        for bb in 0..n {
                            acc -= ginv[(l, a)] * dg(a, bb, m) * ginv[(bb, s)];
                        }
                    }
                    dginv[i3(l, s, m)] = acc;
                }
            }
        }
        // Γ^l_ij at i3(l,i,j); ∂m Γ^l_ij at i4(l,i,j,m)
        let mut gamma = vec![0.0; n * n * n];
        let mut dgamma = vec![0.0; n * n * n * n];
        for l in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let mut acc = 0.0;
                    for s in 0..n {
                        acc += ginv[(l, s)] * c1[i3(i, j, s)];
                    }
                    gamma[i3(l, i, j)] = acc;
                    for m in 0..n {
                        let mut d = 0.0;
                        for s in 0..n {
                            d += dginv[i3(l, s, m)] * c1[i3(i, j, s)]
                                + ginv[(l, s)] * dc1[i4(i, j, s, m)];
                        }
                        dgamma[i4(l, i, j, m)] = d;
                    }
                }
            }
        }
        // R^l_kij = ∂i Γ^l_kj - ∂j Γ^l_ki + Γ^h_kj Γ^l_hi - Γ^h_ki Γ^l_hj
        let mut rup = vec![0.0; n * n * n * n];
        for l in 0..n {
            for k in 0..n {
                for i in 0..n {
                    for j in 0..n {
                        let mut acc = dgamma[i4(l, k, j, i)] - dgamma[i4(l, k, i, j)];
                        for h in 0..n {
                            acc += gamma[i3(h, k, j)] * gamma[i3(l, h, i)]
                                - gamma[i3(h, k, i)] * gamma[i3(l, h, j)];
                        }
                        rup[i4(l, k, i, j)] = acc;
                    }
                }
            }
        }
        // R_klij = R^s_kij g_sl
        let mut riemann = vec![0.0; n * n * n * n];
        for k in 0..n {
            for l in 0..n {
                for i in 0..n {
                    for j in 0..n {
                        let mut acc = 0.0;
                        for s in 0..n {
                            acc += rup[i4(s, k, i, j)] * g[(s, l)];
                        }
                        riemann[i4(k, l, i, j)] = acc;
                    }
                }
            }
        }
        Ok(CurvatureBundle::assemble(pt, 0.0, g, &ginv, riemann))
    }
}
