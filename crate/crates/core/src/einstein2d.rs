//! Two-dimensional potentials `ψ(t, x)` with `t = theta1`, `x = theta2`.
//!
//! In two dimensions the Einstein condition collapses to one scalar PDE in
//! the second and third partials of `ψ`:
//!
//! ```text
//! L = ψtt (ψttx ψxxx - ψtxx²) - ψtx (ψttt ψxxx - ψttx ψtxx) + ψxx (ψttt ψtxx - ψttx²)
//! L - 4 λ det(g)² = 0,        det(g) = ψtt ψxx - ψtx²
//! ```
//!
//! with `R_1212 = L / (4 det g)` and sectional curvature `κ = -R_1212 / det g`,
//! so a solution has `κ = -λ`.

use serde::Serialize;

use crate::exec::{map_indexed, try_map_indexed, Execution};
use crate::infogeo::{coordinate_bindings, InfoGeoError, PotentialSpec, SINGULAR_TOLERANCE};
use crate::sampling::{sample_points, Box2, SamplingError};
use crate::symbolic::Expr;

/// Margin for the strict convexity inequalities, after scale normalization.
pub const CONVEXITY_MARGIN: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum Einstein2dError {
    #[error("potential `{name}` has dimension {dim}, expected 2")]
    NotTwoDimensional { name: String, dim: usize },
    #[error("grid needs at least 2 rows and 2 columns (got {rows}x{cols})")]
    GridTooSmall { rows: usize, cols: usize },
    #[error("need at least 2 valid samples, got {valid} of {total}")]
    TooFewSamples { valid: usize, total: usize },
    #[error(transparent)]
    Geometry(#[from] InfoGeoError),
    #[error(transparent)]
    Sampling(#[from] SamplingError),
}

impl Einstein2dError {
    pub fn is_domain(&self) -> bool {
        matches!(self, Einstein2dError::Geometry(e) if e.is_domain())
    }
}

/// Second and third partials of `ψ` at one point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Partials {
    pub tt: f64,
    pub tx: f64,
    pub xx: f64,
    pub ttt: f64,
    pub ttx: f64,
    pub txx: f64,
    pub xxx: f64,
}

impl Partials {
    pub fn det(&self) -> f64 {
        self.tt * self.xx - self.tx * self.tx
    }

    pub fn trace(&self) -> f64 {
        self.tt + self.xx
    }

    /// Largest metric entry in magnitude.
    pub fn scale(&self) -> f64 {
        self.tt.abs().max(self.tx.abs()).max(self.xx.abs())
    }

    /// Left-hand side `L` of the PDE.
    pub fn lhs(&self) -> f64 {
        let Partials {
            tt,
            tx,
            xx,
            ttt,
            ttx,
            txx,
            xxx,
        } = *self;
        tt * (ttx * xxx - txx * txx) - tx * (ttt * xxx - ttx * txx) + xx * (ttt * txx - ttx * ttx)
    }

    pub fn is_singular(&self) -> bool {
        let s = self.scale();
        s == 0.0 || self.det().abs() <= SINGULAR_TOLERANCE * s * s
    }

    pub fn is_convex(&self) -> bool {
        let s = self.scale();
        s > 0.0 && self.trace() / s > CONVEXITY_MARGIN && self.det() / (s * s) > CONVEXITY_MARGIN
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PdeResidual {
    pub lhs: f64,
    /// `4 λ det(g)²`.
    pub rhs: f64,
    pub residual: f64,
    /// `max(|lhs|, |rhs|, 1)`.
    pub scale: f64,
    pub relative: f64,
}

impl PdeResidual {
    fn new(p: &Partials, lambda: f64) -> Self {
        let lhs = p.lhs();
        let det = p.det();
        let rhs = 4.0 * lambda * det * det;
        let residual = lhs - rhs;
        let scale = lhs.abs().max(rhs.abs()).max(1.0);
        PdeResidual {
            lhs,
            rhs,
            residual,
            scale,
            relative: residual / scale,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Convex,
    NotConvex,
    DomainError,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Convex => "convex",
            Verdict::NotConvex => "not-convex",
            Verdict::DomainError => "domain-error",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CellVerdict {
    pub row: usize,
    pub col: usize,
    pub t: f64,
    pub x: f64,
    pub verdict: Verdict,
}

/// Largest all-convex rectangle of grid cells, inclusive index ranges.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ConvexSubBox {
    pub rows: (usize, usize),
    pub cols: (usize, usize),
    pub cells: usize,
    /// Outer cell edges of the rectangle.
    pub bounds: Box2,
}

/// Per-cell convexity over a grid. Rows run along `t`, columns along `x`;
/// each cell is tested at its center.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvexityReport {
    pub bounds: Box2,
    pub rows: usize,
    pub cols: usize,
    pub convex: usize,
    pub not_convex: usize,
    pub domain_error: usize,
    pub largest_convex: Option<ConvexSubBox>,
    pub cells: Vec<CellVerdict>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LambdaEstimate {
    /// Mean of `-κ` over valid samples.
    pub estimate: f64,
    pub max_deviation: f64,
    pub samples: usize,
    /// Samples skipped because curvature could not be evaluated there.
    pub rejected: usize,
}

/// A 2-D potential with its second and third partials prepared once.
#[derive(Clone, Debug)]
pub struct Surface {
    spec: PotentialSpec,
    /// `tt, tx, xx, ttt, ttx, txx, xxx`
    partials: [Expr; 7],
}

impl Surface {
    pub fn new(spec: &PotentialSpec) -> Result<Self, Einstein2dError> {
        if spec.dim() != 2 {
            return Err(Einstein2dError::NotTwoDimensional {
                name: spec.name().to_string(),
                dim: spec.dim(),
            });
        }
        let psi = spec.resolved();
        let t = psi.differentiate("theta1");
        let x = psi.differentiate("theta2");
        let tt = t.differentiate("theta1");
        let tx = t.differentiate("theta2");
        let xx = x.differentiate("theta2");
        let ttt = tt.differentiate("theta1");
        let ttx = tt.differentiate("theta2");
        let txx = tx.differentiate("theta2");
        let xxx = xx.differentiate("theta2");
        Ok(Surface {
            spec: spec.clone(),
            partials: [tt, tx, xx, ttt, ttx, txx, xxx],
        })
    }

    pub fn spec(&self) -> &PotentialSpec {
        &self.spec
    }

    /// Partials at `pt`, after checking the domain and that `ψ` evaluates.
    pub fn partials(&self, pt: [f64; 2]) -> Result<Partials, InfoGeoError> {
        self.spec.check_point(&pt)?;
        let b = coordinate_bindings(&pt);
        self.spec.resolved().evaluate(&b)?;
        let mut v = [0.0; 7];
        for (slot, e) in v.iter_mut().zip(&self.partials) {
            *slot = e.evaluate(&b)?;
        }
        let [tt, tx, xx, ttt, ttx, txx, xxx] = v;
        Ok(Partials {
            tt,
            tx,
            xx,
            ttt,
            ttx,
            txx,
            xxx,
        })
    }

    pub fn r1212(&self, pt: [f64; 2]) -> Result<f64, InfoGeoError> {
        let p = self.partials(pt)?;
        if p.is_singular() {
            return Err(InfoGeoError::SingularMetric {
                det: p.det(),
                scale: p.scale(),
            });
        }
        Ok(p.lhs() / (4.0 * p.det()))
    }

    /// Sectional curvature `-R_1212 / det g`.
    pub fn sectional(&self, pt: [f64; 2]) -> Result<f64, InfoGeoError> {
        let p = self.partials(pt)?;
        let r = self.r1212(pt)?;
        Ok(-r / p.det())
    }

    pub fn pde_residual(&self, lambda: f64, pt: [f64; 2]) -> Result<PdeResidual, InfoGeoError> {
        Ok(PdeResidual::new(&self.partials(pt)?, lambda))
    }

    pub fn convexity(&self, pt: [f64; 2]) -> Verdict {
        match self.partials(pt) {
            Ok(p) if p.is_convex() => Verdict::Convex,
            Ok(_) => Verdict::NotConvex,
            Err(_) => Verdict::DomainError,
        }
    }

    pub fn convexity_scan(
        &self,
        bounds: Box2,
        rows: usize,
        cols: usize,
        exec: Execution,
    ) -> Result<ConvexityReport, Einstein2dError> {
        if rows < 2 || cols < 2 {
            return Err(Einstein2dError::GridTooSmall { rows, cols });
        }
        let dt = (bounds.t_max - bounds.t_min) / rows as f64;
        let dx = (bounds.x_max - bounds.x_min) / cols as f64;
        let cells = map_indexed(exec, rows * cols, |idx| {
            let (row, col) = (idx / cols, idx % cols);
            let t = bounds.t_min + (row as f64 + 0.5) * dt;
            let x = bounds.x_min + (col as f64 + 0.5) * dx;
            CellVerdict {
                row,
                col,
                t,
                x,
                verdict: self.convexity([t, x]),
            }
        });
        let count = |v: Verdict| cells.iter().filter(|c| c.verdict == v).count();
        let convex_mask: Vec<bool> = cells.iter().map(|c| c.verdict == Verdict::Convex).collect();
        let largest_convex =
            largest_rectangle(&convex_mask, rows, cols).map(|(r0, r1, c0, c1)| ConvexSubBox {
                rows: (r0, r1),
                cols: (c0, c1),
                cells: (r1 - r0 + 1) * (c1 - c0 + 1),
                bounds: Box2::new(
                    edge(bounds.t_min, bounds.t_max, rows, r0),
                    edge(bounds.t_min, bounds.t_max, rows, r1 + 1),
                    edge(bounds.x_min, bounds.x_max, cols, c0),
                    edge(bounds.x_min, bounds.x_max, cols, c1 + 1),
                ),
            });
        Ok(ConvexityReport {
            bounds,
            rows,
            cols,
            convex: count(Verdict::Convex),
            not_convex: count(Verdict::NotConvex),
            domain_error: count(Verdict::DomainError),
            largest_convex,
            cells,
        })
    }

    pub fn lambda_estimate(
        &self,
        pts: &[[f64; 2]],
        exec: Execution,
    ) -> Result<LambdaEstimate, Einstein2dError> {
        let kappas = map_indexed(exec, pts.len(), |i| self.sectional(pts[i]).ok());
        let valid: Vec<f64> = kappas.into_iter().flatten().map(|k| -k).collect();
        if valid.len() < 2 {
            return Err(Einstein2dError::TooFewSamples {
                valid: valid.len(),
                total: pts.len(),
            });
        }
        let estimate = valid.iter().sum::<f64>() / valid.len() as f64;
        let max_deviation = valid
            .iter()
            .fold(0.0f64, |m, v| m.max((v - estimate).abs()));
        Ok(LambdaEstimate {
            estimate,
            max_deviation,
            samples: valid.len(),
            rejected: pts.len() - valid.len(),
        })
    }

    /// Seeded points in `bounds` where the domain constraints hold and the
    /// partials evaluate.
    pub fn sample(
        &self,
        bounds: Box2,
        count: usize,
        seed: u64,
        exec: Execution,
    ) -> Result<Vec<[f64; 2]>, Einstein2dError> {
        let pts = sample_points(&bounds.ranges(), count, seed, exec, |p| {
            self.partials([p[0], p[1]]).is_ok()
        })?;
        Ok(pts.into_iter().map(|p| [p[0], p[1]]).collect())
    }

    /// Pointwise residuals at many points; the first failing point aborts.
    pub fn pde_residuals(
        &self,
        lambda: f64,
        pts: &[[f64; 2]],
        exec: Execution,
    ) -> Result<Vec<PdeResidual>, InfoGeoError> {
        try_map_indexed(exec, pts.len(), |i| self.pde_residual(lambda, pts[i]))
    }
}

/// Position of grid line `i` of `n` cells spanning `[lo, hi]`.
fn edge(lo: f64, hi: f64, n: usize, i: usize) -> f64 {
    if i == n {
        hi
    } else {
        lo + i as f64 * (hi - lo) / n as f64
    }
}

/// Largest all-true rectangle in a row-major mask, as inclusive
/// `(row_start, row_end, col_start, col_end)`. Among equal areas the first
/// one found, scanning bottom rows top to bottom, wins.
fn largest_rectangle(
    mask: &[bool],
    rows: usize,
    cols: usize,
) -> Option<(usize, usize, usize, usize)> {
    let mut heights = vec![0usize; cols];
    let mut best: Option<(usize, (usize, usize, usize, usize))> = None;
    for r in 0..rows {
        for c in 0..cols {
            heights[c] = if mask[r * cols + c] {
                heights[c] + 1
            } else {
                0
            };
        }
        // monotonic stack over the histogram of this row
        let mut stack: Vec<usize> = Vec::new();
        for c in 0..=cols {
            let h = if c < cols { heights[c] } else { 0 };
            while let Some(&top) = stack.last() {
                if heights[top] < h {
                    break;
                }
                stack.pop();
                let height = heights[top];
                if height == 0 {
                    continue;
                }
                let left = stack.last().map_or(0, |&s| s + 1);
                let area = height * (c - left);
                if best.is_none_or(|(a, _)| area > a) {
                    best = Some((area, (r + 1 - height, r, left, c - 1)));
                }
            }
            stack.push(c);
        }
    }
    best.map(|(_, rect)| rect)
}

/// Wrappers over [`Surface`]; each call differentiates the potential afresh.
pub fn r1212(p: &PotentialSpec, pt: [f64; 2]) -> Result<f64, Einstein2dError> {
    Ok(Surface::new(p)?.r1212(pt)?)
}

pub fn pde_residual(
    p: &PotentialSpec,
    lambda: f64,
    pt: [f64; 2],
) -> Result<PdeResidual, Einstein2dError> {
    Ok(Surface::new(p)?.pde_residual(lambda, pt)?)
}

pub fn convexity_check(p: &PotentialSpec, pt: [f64; 2]) -> Result<Verdict, Einstein2dError> {
    Ok(Surface::new(p)?.convexity(pt))
}

pub fn convexity_scan(
    p: &PotentialSpec,
    bounds: Box2,
    grid: (usize, usize),
) -> Result<ConvexityReport, Einstein2dError> {
    Surface::new(p)?.convexity_scan(bounds, grid.0, grid.1, Execution::default())
}

pub fn lambda_estimate(
    p: &PotentialSpec,
    pts: &[[f64; 2]],
) -> Result<LambdaEstimate, Einstein2dError> {
    Surface::new(p)?.lambda_estimate(pts, Execution::default())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbolic::parse;

    fn spec(text: &str) -> PotentialSpec {
        PotentialSpec::parse("test", 2, text).unwrap()
    }

    fn normal() -> PotentialSpec {
        PotentialSpec::builder(
            "normal",
            2,
            parse("-(t^2)/(4*x) - ln(-x)/2 + ln(pi)/2").unwrap(),
        )
        .domain_text("-x")
        .unwrap()
        .build()
        .unwrap()
    }

    #[test]
    fn r1212_examples() {
        assert!((r1212(&normal(), [0.0, -0.5]).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(r1212(&spec("t^2 + t*x + x^2"), [0.3, 0.1]).unwrap(), 0.0);
        let s = Surface::new(&spec("exp(t) + exp(x)")).unwrap();
        for pt in [[0.1, 0.2], [-1.0, 2.0]] {
            assert_eq!(s.r1212(pt).unwrap(), 0.0);
        }
    }

    #[test]
    fn residual_examples() {
        let r = pde_residual(&spec("exp(t) + exp(x)"), 0.0, [0.4, -0.3]).unwrap();
        assert_eq!(r.residual, 0.0);
        let r = pde_residual(&spec("(t^2 + x^2)/2"), 1.0, [0.4, -0.3]).unwrap();
        assert_eq!(r.residual, -4.0);
        assert_eq!(r.relative, -1.0);
    }

    #[test]
    fn residual_identity_with_r1212() {
        let s = Surface::new(&normal()).unwrap();
        for pt in [[0.0, -0.5], [1.0, -2.0], [-0.7, -0.3]] {
            let p = s.partials(pt).unwrap();
            let lambda = 0.3;
            let r = s.pde_residual(lambda, pt).unwrap();
            let expected = 4.0 * p.det() * (s.r1212(pt).unwrap() - lambda * p.det());
            assert!((r.residual - expected).abs() <= 1e-12 * r.scale);
        }
    }

    #[test]
    fn convexity_verdicts() {
        assert_eq!(
            convexity_check(&spec("t^2 + x^2"), [5.0, -3.0]).unwrap(),
            Verdict::Convex
        );
        let wave = Surface::new(&spec("exp(t - x)")).unwrap();
        assert_eq!(wave.convexity([0.2, 0.1]), Verdict::NotConvex);
        assert_eq!(wave.partials([0.2, 0.1]).unwrap().det(), 0.0);
        assert_eq!(
            convexity_check(&normal(), [0.0, 1.0]).unwrap(),
            Verdict::DomainError
        );
        // domain error also when only ψ itself fails to evaluate
        let s = Surface::new(&spec("ln(x) + t^2")).unwrap();
        assert_eq!(s.convexity([0.0, -1.0]), Verdict::DomainError);
    }

    #[test]
    fn normal_scan_is_fully_convex() {
        let report = convexity_scan(&normal(), Box2::new(-1.0, 1.0, -2.0, -0.1), (20, 20)).unwrap();
        assert_eq!(report.convex, 400);
        assert_eq!(report.cells.len(), 400);
        let best = report.largest_convex.unwrap();
        assert_eq!(best.cells, 400);
        assert_eq!(best.bounds, report.bounds);
    }

    #[test]
    fn wave_scan_has_no_convex_cells() {
        let r =
            convexity_scan(&spec("exp(t - x)"), Box2::new(-1.0, 1.0, -1.0, 1.0), (5, 7)).unwrap();
        assert_eq!((r.convex, r.not_convex, r.domain_error), (0, 35, 0));
        assert!(r.largest_convex.is_none());
        assert!(convexity_scan(&normal(), Box2::new(0.0, 1.0, -1.0, 0.0), (1, 5)).is_err());
    }

    #[test]
    fn largest_rectangle_search() {
        #[rustfmt::skip]
        let mask = [
            true,  true,  false, true,
            true,  true,  true,  true,
            false, true,  true,  true,
        ];
        // rows 1..=2, cols 1..=3 (6 cells) beats rows 0..=1, cols 0..=1 (4 cells)
        assert_eq!(largest_rectangle(&mask, 3, 4), Some((1, 2, 1, 3)));
        assert_eq!(largest_rectangle(&[false; 4], 2, 2), None);
    }

    #[test]
    fn lambda_estimates() {
        let s = Surface::new(&normal()).unwrap();
        let pts = s
            .sample(
                Box2::new(-2.0, 2.0, -3.0, 0.0),
                50,
                42,
                Execution::default(),
            )
            .unwrap();
        let est = s.lambda_estimate(&pts, Execution::default()).unwrap();
        assert!((est.estimate - 0.5).abs() < 1e-9);
        assert!(est.max_deviation < 1e-9);
        assert_eq!(est.samples, 50);

        let q = lambda_estimate(&spec("t^2 + x^2"), &[[0.0, 0.0], [1.0, 2.0]]).unwrap();
        assert_eq!((q.estimate, q.max_deviation), (0.0, 0.0));

        let err = lambda_estimate(&normal(), &[[0.0, 1.0], [0.0, -1.0]]).unwrap_err();
        assert_eq!(err, Einstein2dError::TooFewSamples { valid: 1, total: 2 });
    }

    #[test]
    fn product_power_special_solution_is_flat() {
        let p = PotentialSpec::builder("pp", 2, parse("(t - c5)^c4*(x - c3)^2").unwrap())
            .constant("c3", 0.0)
            .constant("c4", -0.5)
            .constant("c5", 0.0)
            .domain_text("t")
            .unwrap()
            .build()
            .unwrap();
        let s = Surface::new(&p).unwrap();
        let pts = s
            .sample(Box2::new(0.5, 2.0, 0.5, 2.0), 30, 42, Execution::default())
            .unwrap();
        let est = s.lambda_estimate(&pts, Execution::default()).unwrap();
        assert!(
            est.estimate.abs() < 1e-8 && est.max_deviation < 1e-8,
            "{est:?}"
        );
        assert!(pts.iter().all(|&pt| s.convexity(pt) == Verdict::Convex));
    }

    #[test]
    fn rejects_other_dimensions() {
        let p = PotentialSpec::parse("p", 3, "theta1^2").unwrap();
        assert!(matches!(
            Surface::new(&p),
            Err(Einstein2dError::NotTwoDimensional { .. })
        ));
    }
}
