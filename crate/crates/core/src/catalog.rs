//! Built-in potentials and metrics with known Einstein constants.
//!
//! Every entry carries a sampling box on which it is convex (for potentials)
//! or in-domain (for metrics), and verifies under [`verify_entry`] with the
//! default seed. Invariant-solution constants are fixed choices that give a
//! convex region; they are not canonical.

use std::f64::consts::PI;
use std::sync::OnceLock;

use serde::Serialize;

use crate::einstein2d::{Surface, Verdict};
use crate::exec::{try_map_indexed, Execution};
use crate::infogeo::{MetricField, MetricGeometry, PotentialSpec};
use crate::sampling::{sample_points, Box2};
use crate::symbolic::{parse, Expr};

pub const DEFAULT_SAMPLES: usize = 100;
pub const PDE_TOLERANCE: f64 = 1e-7;
pub const LAMBDA_TOLERANCE: f64 = 1e-7;
pub const FLAT_TOLERANCE: f64 = 1e-9;
pub const EINSTEIN_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EntryKind {
    Potential,
    DirectMetric,
}

#[derive(Clone, Debug)]
pub enum Geometry {
    Potential(PotentialSpec),
    Metric(MetricField),
}

#[derive(Clone, Debug)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub description: &'static str,
    pub geometry: Geometry,
    /// Einstein constant in `Ric = -λ g`.
    pub lambda: f64,
    pub flat: bool,
    pub bounds: Box2,
    pub samples: usize,
}

impl CatalogEntry {
    pub fn kind(&self) -> EntryKind {
        match self.geometry {
            Geometry::Potential(_) => EntryKind::Potential,
            Geometry::Metric(_) => EntryKind::DirectMetric,
        }
    }

    pub fn potential(&self) -> Option<&PotentialSpec> {
        match &self.geometry {
            Geometry::Potential(p) => Some(p),
            Geometry::Metric(_) => None,
        }
    }

    pub fn metric(&self) -> Option<&MetricField> {
        match &self.geometry {
            Geometry::Metric(m) => Some(m),
            Geometry::Potential(_) => None,
        }
    }

    /// Every expression that is differentiated during verification: the
    /// potential, or each metric entry.
    pub fn expressions(&self) -> Vec<Expr> {
        match &self.geometry {
            Geometry::Potential(p) => vec![p.resolved().clone()],
            Geometry::Metric(m) => {
                let n = m.dim();
                (0..n)
                    .flat_map(|i| (i..n).map(move |j| (i, j)))
                    .map(|(i, j)| m.get(i, j).clone())
                    .collect()
            }
        }
    }

    /// Whether `pt` is a valid evaluation point of the entry.
    pub fn contains(&self, pt: &[f64]) -> bool {
        match &self.geometry {
            Geometry::Potential(p) => p.contains(pt),
            Geometry::Metric(m) => m.evaluate(pt).is_ok(),
        }
    }

    pub fn summary(&self) -> EntrySummary {
        EntrySummary {
            name: self.name,
            kind: self.kind(),
            lambda: self.lambda,
            flat: self.flat,
            description: self.description,
        }
    }

    pub fn export(&self) -> EntryExport {
        let (expression, metric, constants, domain) = match &self.geometry {
            Geometry::Potential(p) => (
                Some(p.potential().to_string()),
                None,
                p.constants().iter().map(|(k, v)| (k.clone(), *v)).collect(),
                p.domain().iter().map(ToString::to_string).collect(),
            ),
            Geometry::Metric(m) => {
                let n = m.dim();
                let rows = (0..n)
                    .map(|i| (0..n).map(|j| m.get(i, j).to_string()).collect())
                    .collect();
                (
                    None,
                    Some(rows),
                    Vec::new(),
                    m.domain().iter().map(ToString::to_string).collect(),
                )
            }
        };
        EntryExport {
            name: self.name,
            kind: self.kind(),
            description: self.description,
            expression,
            metric,
            constants,
            domain,
            lambda: self.lambda,
            flat: self.flat,
            bounds: self.bounds,
            samples: self.samples,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EntrySummary {
    pub name: &'static str,
    pub kind: EntryKind,
    pub lambda: f64,
    pub flat: bool,
    pub description: &'static str,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EntryExport {
    pub name: &'static str,
    pub kind: EntryKind,
    pub description: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expression: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub metric: Option<Vec<Vec<String>>>,
    pub constants: Vec<(String, f64)>,
    /// Constraints of the form `expr > 0`.
    pub domain: Vec<String>,
    pub lambda: f64,
    pub flat: bool,
    pub bounds: Box2,
    pub samples: usize,
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum CatalogError {
    #[error("no catalog entry named `{0}`")]
    UnknownEntry(String),
}

/// One measured quantity compared against its tolerance.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub value: f64,
    pub tolerance: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Check {
    fn below(name: &'static str, value: f64, tolerance: f64) -> Self {
        Check {
            name,
            value,
            tolerance,
            pass: value < tolerance,
            detail: None,
        }
    }

    fn failed(name: &'static str, detail: impl ToString) -> Self {
        Check {
            name,
            value: f64::NAN,
            tolerance: 0.0,
            pass: false,
            detail: Some(detail.to_string()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerificationReport {
    pub name: &'static str,
    pub kind: EntryKind,
    pub lambda: f64,
    pub samples: usize,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda_estimate: Option<f64>,
    pub checks: Vec<Check>,
    pub pass: bool,
}

fn spec(
    name: &str,
    text: &str,
    constants: &[(&str, f64)],
    domain: &[&str],
    lambda: f64,
) -> PotentialSpec {
    let mut b = PotentialSpec::builder(name, 2, parse(text).expect("catalog expression parses"))
        .expected_lambda(lambda);
    for (k, v) in constants {
        b = b.constant(*k, *v);
    }
    for d in domain {
        b = b.domain(parse(d).expect("catalog constraint parses"));
    }
    b.build().expect("catalog entry is well-formed")
}

fn potential_entry(
    name: &'static str,
    description: &'static str,
    text: &str,
    constants: &[(&str, f64)],
    domain: &[&str],
    lambda: f64,
    bounds: Box2,
) -> CatalogEntry {
    CatalogEntry {
        name,
        description,
        geometry: Geometry::Potential(spec(name, text, constants, domain, lambda)),
        lambda,
        flat: lambda == 0.0,
        bounds,
        samples: DEFAULT_SAMPLES,
    }
}

fn weibull() -> CatalogEntry {
    let p = |s: &str| parse(s).expect("catalog expression parses");
    let off = p("-(1 - euler_gamma)/theta1");
    let rows = vec![
        vec![p("theta2^2/theta1^2"), off.clone()],
        vec![
            off,
            p("(euler_gamma^2 - 2*euler_gamma + pi^2/6 + 1)/theta2^2"),
        ],
    ];
    let metric = MetricField::direct(rows, vec![p("theta1"), p("theta2")])
        .expect("catalog metric is well-formed");
    CatalogEntry {
        name: "weibull-metric",
        description: "Weibull family in (scale, shape) coordinates, Fisher metric given directly",
        geometry: Geometry::Metric(metric),
        lambda: 6.0 / (PI * PI),
        flat: false,
        bounds: Box2::new(0.5, 3.0, 0.5, 3.0),
        samples: DEFAULT_SAMPLES,
    }
}

fn build() -> Vec<CatalogEntry> {
    let inv = [
        ("a", 1.0),
        ("c1", -1.0),
        ("c2", 2.0),
        ("c3", 0.0),
        ("lambda", 1.0),
    ];
    let inv_neg_a = [
        ("a", -1.0),
        ("c1", 1.0),
        ("c2", 2.0),
        ("c3", 0.0),
        ("lambda", 1.0),
    ];
    vec![
        potential_entry(
            "normal-natural",
            "univariate normal in natural parameters",
            "-(t^2)/(4*x) - ln(-x)/2 + ln(pi)/2",
            &[],
            &["-x"],
            0.5,
            Box2::new(-1.0, 1.0, -2.0, -0.1),
        ),
        weibull(),
        potential_entry(
            "flat-additive",
            "additive potential f(t) + h(x) with f = h = exp",
            "exp(t) + exp(x)",
            &[],
            &[],
            0.0,
            Box2::new(-1.0, 1.0, -1.0, 1.0),
        ),
        potential_entry(
            "flat-additive-travelingwave",
            "additive potential plus a traveling wave, f(t) + h(t - c x) with f = h = exp",
            "exp(t) + exp(t - c*x)",
            &[("c", 1.0)],
            &[],
            0.0,
            Box2::new(-1.0, 1.0, -1.0, 1.0),
        ),
        potential_entry(
            "product-exponential",
            "product f(t) h(x) with h = c3 exp(c2 x) and f = exp(t) + exp(-t)",
            "(exp(t) + exp(-t))*c3*exp(c2*x)",
            &[("c2", 1.0), ("c3", 1.0)],
            &[],
            0.0,
            Box2::new(-1.0, 1.0, -1.0, 1.0),
        ),
        potential_entry(
            "product-power",
            "product (t - c5)^c4 (x - c3)^2 with c4 = -1/2, c5 = c3 = 0",
            "(t - c5)^c4*(x - c3)^2",
            &[("c3", 0.0), ("c4", -0.5), ("c5", 0.0)],
            &["t - c5"],
            0.0,
            Box2::new(0.5, 2.0, 0.5, 2.0),
        ),
        potential_entry(
            "product-cosh",
            "product of two exponential pairs, all constants 1",
            "(c1^2*exp(c3*t) + c2^2*exp(-(c3*t)))*(c4^2*exp(c6*x) + c5^2*exp(-(c6*x)))",
            &[("c1", 1.0), ("c2", 1.0), ("c3", 1.0), ("c4", 1.0), ("c5", 1.0), ("c6", 1.0)],
            &[],
            0.0,
            Box2::new(-1.0, 1.0, -1.0, 1.0),
        ),
        potential_entry(
            "invariant-X4aX2",
            "solution invariant under X4 + a X2",
            "-1/(4*lambda)*ln(c2*exp(c1*x - c1*a*ln(t)) - 1) + c3",
            &inv,
            &["t", "c2*exp(c1*x - c1*a*ln(t)) - 1"],
            1.0,
            Box2::new(1.0, 3.0, -3.0, -1.0),
        ),
        potential_entry(
            "invariant-X5aX1",
            "solution invariant under X5 + a X1",
            "-1/(4*lambda)*ln(c2*exp(c1*t - c1*a*ln(x)) - 1) + c3",
            &inv,
            &["x", "c2*exp(c1*t - c1*a*ln(x)) - 1"],
            1.0,
            Box2::new(-2.0, 0.0, 1.0, 3.0),
        ),
        potential_entry(
            "invariant-X6aX2",
            "solution invariant under X6 + a X2",
            "-1/(4*lambda)*ln(c2*exp(c1*x^2 - 2*c1*a*t) - 1) + c3",
            &inv,
            &["c2*exp(c1*x^2 - 2*c1*a*t) - 1"],
            1.0,
            Box2::new(1.0, 3.0, -1.0, 1.0),
        ),
        potential_entry(
            "invariant-X7aX1",
            "solution invariant under X7 + a X1",
            "-1/(4*lambda)*ln(c2*exp(c1*t^2 - 2*c1*a*x) - 1) + c3",
            &inv,
            &["c2*exp(c1*t^2 - 2*c1*a*x) - 1"],
            1.0,
            Box2::new(-1.0, 1.0, 1.0, 3.0),
        ),
        potential_entry(
            "invariant-X8aX5",
            "solution invariant under X8 + a X5 (t ln(x) term with coefficient 1/a)",
            "((t - c1*a)*ln(t - c1*a) - (1 + 4*c1*lambda)*t*ln(t))/(4*a*c1*lambda) + t*ln(x)/a + c2*t + c3",
            &inv_neg_a,
            &["t - c1*a", "t", "x"],
            1.0,
            Box2::new(1.0, 3.0, 1.0, 3.0),
        ),
        potential_entry(
            "invariant-X8aX6",
            "solution invariant under X8 + a X6",
            "((x - c1)*ln(x - c1) - x*ln(x))/(4*c1*lambda) + t^2/(2*a*x) + c2*x + c3",
            &inv,
            &["x - c1", "x"],
            1.0,
            Box2::new(-2.0, 2.0, 1.0, 3.0),
        ),
        potential_entry(
            "invariant-X9aX4",
            "solution invariant under X9 + a X4 (x ln(t) term with coefficient 1/a)",
            "((x - c1*a)*ln(x - c1*a) - (1 + 4*c1*lambda)*x*ln(x))/(4*a*c1*lambda) + x*ln(t)/a + c2*x + c3",
            &inv_neg_a,
            &["x - c1*a", "x", "t"],
            1.0,
            Box2::new(1.0, 3.0, 1.0, 3.0),
        ),
        potential_entry(
            "invariant-X9aX7",
            "solution invariant under X9 + a X7",
            "((t - c1)*ln(t - c1) - t*ln(t))/(4*c1*lambda) + x^2/(2*a*t) + c2*t + c3",
            &inv,
            &["t - c1", "t"],
            1.0,
            Box2::new(1.0, 3.0, -2.0, 2.0),
        ),
    ]
}

/// All entries, in a fixed order.
pub fn entries() -> &'static [CatalogEntry] {
    static CATALOG: OnceLock<Vec<CatalogEntry>> = OnceLock::new();
    CATALOG.get_or_init(build)
}

pub fn list_entries() -> Vec<EntrySummary> {
    entries().iter().map(CatalogEntry::summary).collect()
}

pub fn find(name: &str) -> Result<&'static CatalogEntry, CatalogError> {
    entries()
        .iter()
        .find(|e| e.name == name)
        .ok_or_else(|| CatalogError::UnknownEntry(name.to_string()))
}

pub fn export_all() -> Vec<EntryExport> {
    entries().iter().map(CatalogEntry::export).collect()
}

pub fn verify_entry(
    name: &str,
    seed: u64,
    exec: Execution,
) -> Result<VerificationReport, CatalogError> {
    Ok(verify(find(name)?, seed, exec))
}

/// Runs every check for `entry`; failures are recorded, never raised.
pub fn verify(entry: &CatalogEntry, seed: u64, exec: Execution) -> VerificationReport {
    let (checks, lambda_estimate) = match &entry.geometry {
        Geometry::Potential(p) => verify_potential(entry, p, seed, exec),
        Geometry::Metric(m) => verify_metric(entry, m, seed, exec),
    };
    VerificationReport {
        name: entry.name,
        kind: entry.kind(),
        lambda: entry.lambda,
        samples: entry.samples,
        seed,
        lambda_estimate,
        pass: checks.iter().all(|c| c.pass),
        checks,
    }
}

fn verify_potential(
    entry: &CatalogEntry,
    p: &PotentialSpec,
    seed: u64,
    exec: Execution,
) -> (Vec<Check>, Option<f64>) {
    let surface = match Surface::new(p) {
        Ok(s) => s,
        Err(e) => return (vec![Check::failed("setup", e)], None),
    };
    let pts = match surface.sample(entry.bounds, entry.samples, seed, exec) {
        Ok(pts) => pts,
        Err(e) => return (vec![Check::failed("sampling", e)], None),
    };
    let mut checks = Vec::new();

    let not_convex = pts
        .iter()
        .filter(|&&pt| surface.convexity(pt) != Verdict::Convex)
        .count();
    checks.push(Check {
        name: "convexity",
        value: not_convex as f64,
        tolerance: 0.0,
        pass: not_convex == 0,
        detail: (not_convex > 0)
            .then(|| format!("{not_convex} of {} samples not convex", pts.len())),
    });

    match surface.pde_residuals(entry.lambda, &pts, exec) {
        Ok(rs) => {
            let worst = rs.iter().fold(0.0f64, |m, r| m.max(r.relative.abs()));
            checks.push(Check::below("pde-residual", worst, PDE_TOLERANCE));
        }
        Err(e) => checks.push(Check::failed("pde-residual", e)),
    }

    let mut estimate = None;
    match surface.lambda_estimate(&pts, exec) {
        Ok(est) => {
            estimate = Some(est.estimate);
            checks.push(Check::below(
                "lambda-deviation",
                est.max_deviation,
                LAMBDA_TOLERANCE,
            ));
            checks.push(Check::below(
                "lambda-match",
                (est.estimate - entry.lambda).abs(),
                LAMBDA_TOLERANCE,
            ));
        }
        Err(e) => checks.push(Check::failed("lambda-deviation", e)),
    }

    if entry.flat {
        match try_map_indexed(exec, pts.len(), |i| surface.r1212(pts[i])) {
            Ok(rs) => {
                let worst = rs.iter().fold(0.0f64, |m, r| m.max(r.abs()));
                checks.push(Check::below("flat-r1212", worst, FLAT_TOLERANCE));
            }
            Err(e) => checks.push(Check::failed("flat-r1212", e)),
        }
    }
    (checks, estimate)
}

fn verify_metric(
    entry: &CatalogEntry,
    m: &MetricField,
    seed: u64,
    exec: Execution,
) -> (Vec<Check>, Option<f64>) {
    let geometry = MetricGeometry::new(m);
    let pts = match sample_points(&entry.bounds.ranges(), entry.samples, seed, exec, |pt| {
        m.evaluate(pt).is_ok()
    }) {
        Ok(pts) => pts,
        Err(e) => return (vec![Check::failed("sampling", e)], None),
    };
    let bundles = match try_map_indexed(exec, pts.len(), |i| geometry.curvature(&pts[i])) {
        Ok(b) => b,
        Err(e) => return (vec![Check::failed("einstein-residual", e)], None),
    };
    let worst = bundles.iter().fold(0.0f64, |w, b| {
        w.max(b.einstein_residual(entry.lambda).max_abs())
    });
    let kappas: Vec<f64> = bundles.iter().filter_map(|b| b.sectional(0, 1)).collect();
    let estimate = (!kappas.is_empty()).then(|| -kappas.iter().sum::<f64>() / kappas.len() as f64);
    (
        vec![Check::below("einstein-residual", worst, EINSTEIN_TOLERANCE)],
        estimate,
    )
}
