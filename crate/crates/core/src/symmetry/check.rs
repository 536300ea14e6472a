use std::collections::BTreeSet;

use rand::Rng;
use serde::Serialize;

use super::generator::GeneratorField;
use super::jet::{classify, Dir, JetExpr, JetVar, MultiIndex};
use super::SymmetryError;
use crate::exec::{try_map_indexed, Execution};
use crate::sampling::{stream_rng, DEFAULT_SEED, MAX_ATTEMPTS};
use crate::symbolic::{parse, Bindings, Expr};

pub const LSC_TOLERANCE: f64 = 1e-7;
pub const INVARIANCE_TOLERANCE: f64 = 1e-9;
pub const DEFAULT_JET_SAMPLES: usize = 200;
/// Resample when the coefficient of the leading coordinate is smaller.
pub const MIN_LEADING_COEFFICIENT: f64 = 1e-3;

/// A scalar PDE `F = 0` that is affine in its leading jet coordinate.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Pde {
    pub label: String,
    pub equation: JetExpr,
    pub leading: MultiIndex,
}

impl Pde {
    pub fn new(
        label: impl Into<String>,
        equation: JetExpr,
        leading: MultiIndex,
    ) -> Result<Self, SymmetryError> {
        if !equation.coordinates().contains(&leading) {
            return Err(SymmetryError::MissingLeading(leading.name()));
        }
        Ok(Pde {
            label: label.into(),
            equation,
            leading,
        })
    }

    /// `u_t - u_xx`, solved for `u_t`.
    pub fn heat() -> Self {
        let e = JetExpr::parse("u_t - u_xx").expect("valid");
        Pde::new("heat", e, MultiIndex::new(1, 0)).expect("valid")
    }

    /// The 2-D Einstein PDE in `u = ψ(t, x)`, solved for `u_ttt`.
    pub fn einstein(lambda: f64) -> Self {
        let text = "u_tt*(u_ttx*u_xxx - u_txx^2) - u_tx*(u_ttt*u_xxx - u_ttx*u_txx) \
                    + u_xx*(u_ttt*u_txx - u_ttx^2) - 4*lambda*(u_tt*u_xx - u_tx^2)^2";
        let e = parse(text)
            .expect("valid")
            .substitute("lambda", &Expr::num(lambda));
        let e = JetExpr::new(e).expect("valid");
        Pde::new(format!("txpeq(lambda={lambda})"), e, MultiIndex::new(3, 0)).expect("valid")
    }

    pub fn order(&self) -> usize {
        self.equation.order()
    }
}

/// Sampling and pass/fail settings shared by the checks.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CheckConfig {
    pub samples: usize,
    pub seed: u64,
    pub tolerance: f64,
    /// Every sampled coordinate is uniform in this interval.
    pub range: (f64, f64),
    pub exec: Execution,
}

impl CheckConfig {
    pub fn new(samples: usize, seed: u64, tolerance: f64) -> Self {
        CheckConfig {
            samples,
            seed,
            tolerance,
            range: (-2.0, 2.0),
            exec: Execution::default(),
        }
    }

    pub fn lsc() -> Self {
        Self::new(DEFAULT_JET_SAMPLES, DEFAULT_SEED, LSC_TOLERANCE)
    }

    pub fn invariance() -> Self {
        Self::new(DEFAULT_JET_SAMPLES, DEFAULT_SEED, INVARIANCE_TOLERANCE)
    }

    pub fn with_exec(mut self, exec: Execution) -> Self {
        self.exec = exec;
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LscReport {
    pub generator: String,
    pub pde: String,
    pub samples: usize,
    pub seed: u64,
    /// Largest `|pr X(F)| / max(1, Σ|terms|)` on-shell.
    pub max_residual: f64,
    pub max_abs: f64,
    /// Draws discarded for a small leading coefficient or a domain error.
    pub resampled: usize,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InvarianceReport {
    pub generator: String,
    pub function: Expr,
    pub samples: usize,
    pub seed: u64,
    pub max_residual: f64,
    pub max_abs: f64,
    /// Draws discarded because `f` or its derivatives did not evaluate.
    pub domain_rejections: usize,
    pub tolerance: f64,
    pub pass: bool,
}

struct Outcome {
    abs: f64,
    rel: f64,
    rejected: usize,
}

/// Evaluates `Σ c·d` and its magnitude scale; `None` on a domain error.
fn evaluate_terms(
    terms: &[(Expr, Expr)],
    b: &Bindings,
) -> Result<Option<(f64, f64)>, SymmetryError> {
    let mut total = 0.0;
    let mut scale = 0.0;
    for (c, d) in terms {
        match c.evaluate(b).and_then(|c| Ok(c * d.evaluate(b)?)) {
            Ok(v) => {
                total += v;
                scale += v.abs();
            }
            Err(e) if e.is_domain() => return Ok(None),
            Err(e) => return Err(e.into()),
        }
    }
    Ok(Some((total, scale.max(1.0))))
}

fn variables<'a>(exprs: impl IntoIterator<Item = &'a Expr>) -> Vec<String> {
    let mut vars = BTreeSet::new();
    for e in exprs {
        vars.extend(e.free_variables());
    }
    vars.into_iter().collect()
}

fn summarize(outcomes: &[Outcome]) -> (f64, f64, usize) {
    outcomes.iter().fold((0.0f64, 0.0f64, 0), |(r, a, n), o| {
        (r.max(o.rel), a.max(o.abs), n + o.rejected)
    })
}

/// Checks `pr X(F) = 0` on the solution manifold of `F = 0`.
///
/// Each sample draws every jet coordinate except the leading one, solves
/// `F = 0` for the leading coordinate, and evaluates `pr X(F)` there.
pub fn lsc_check(
    g: &GeneratorField,
    pde: &Pde,
    cfg: &CheckConfig,
) -> Result<LscReport, SymmetryError> {
    let prolonged = g.prolong(pde.order())?;
    let terms = prolonged.terms(&pde.equation)?;
    let lead = pde.leading.name();
    let f = pde.equation.expr();
    let vars: Vec<String> =
        variables(std::iter::once(f).chain(terms.iter().flat_map(|(c, d)| [c, d])))
            .into_iter()
            .filter(|v| *v != lead)
            .collect();
    let (lo, hi) = cfg.range;

    let outcomes = try_map_indexed(
        cfg.exec,
        cfg.samples,
        |i| -> Result<Outcome, SymmetryError> {
            let mut rng = stream_rng(cfg.seed, i as u64);
            for attempt in 0..MAX_ATTEMPTS {
                let mut b: Bindings = vars
                    .iter()
                    .map(|v| (v.as_str(), rng.random_range(lo..=hi)))
                    .collect();
                let mut at = |value: f64| {
                    b.set(lead.as_str(), value);
                    f.evaluate(&b)
                };
                let (f0, f1, f2) = match (at(0.0), at(1.0), at(2.0)) {
                    (Ok(a), Ok(b), Ok(c)) => (a, b, c),
                    (Err(e), ..) | (_, Err(e), _) | (.., Err(e)) if !e.is_domain() => {
                        return Err(e.into())
                    }
                    _ => continue,
                };
                let slope = f1 - f0;
                let size = f0.abs().max(f1.abs()).max(f2.abs()).max(1.0);
                if (f2 - 2.0 * slope - f0).abs() > 1e-9 * size {
                    return Err(SymmetryError::NotAffine(lead.clone()));
                }
                if slope.abs() < MIN_LEADING_COEFFICIENT {
                    continue;
                }
                b.set(lead.as_str(), -f0 / slope);
                if let Some((total, scale)) = evaluate_terms(&terms, &b)? {
                    return Ok(Outcome {
                        abs: total.abs(),
                        rel: total.abs() / scale,
                        rejected: attempt,
                    });
                }
            }
            Err(SymmetryError::Exhausted { sample: i })
        },
    )?;

    let (max_residual, max_abs, resampled) = summarize(&outcomes);
    Ok(LscReport {
        generator: g.name.clone(),
        pde: pde.label.clone(),
        samples: cfg.samples,
        seed: cfg.seed,
        max_residual,
        max_abs,
        resampled,
        tolerance: cfg.tolerance,
        pass: max_residual < cfg.tolerance,
    })
}

/// Largest `|pr X(F)|` at jet points drawn without imposing `F = 0`.
pub fn offshell_max(
    g: &GeneratorField,
    pde: &Pde,
    cfg: &CheckConfig,
) -> Result<f64, SymmetryError> {
    let prolonged = g.prolong(pde.order())?;
    let terms = prolonged.terms(&pde.equation)?;
    let vars = variables(terms.iter().flat_map(|(c, d)| [c, d]));
    let (lo, hi) = cfg.range;
    let values = try_map_indexed(cfg.exec, cfg.samples, |i| -> Result<f64, SymmetryError> {
        let mut rng = stream_rng(cfg.seed, i as u64);
        for _ in 0..MAX_ATTEMPTS {
            let b: Bindings = vars
                .iter()
                .map(|v| (v.as_str(), rng.random_range(lo..=hi)))
                .collect();
            if let Some((total, _)) = evaluate_terms(&terms, &b)? {
                return Ok(total.abs());
            }
        }
        Err(SymmetryError::Exhausted { sample: i })
    })?;
    Ok(values.into_iter().fold(0.0, f64::max))
}

/// Checks `X(f) = ξt f_t + ξx f_x + η f_u = 0` at random `(t, x, u)`.
pub fn invariance_check(
    g: &GeneratorField,
    f: &Expr,
    cfg: &CheckConfig,
) -> Result<InvarianceReport, SymmetryError> {
    for v in f.free_variables() {
        match classify(&v) {
            Some(JetVar::Independent(_)) => {}
            Some(JetVar::Dependent(j)) if j.order() == 0 => {}
            _ => return Err(SymmetryError::UnknownSymbol(v)),
        }
    }
    let terms = vec![
        (g.xi(Dir::T).clone(), f.differentiate("t")),
        (g.xi(Dir::X).clone(), f.differentiate("x")),
        (g.eta.clone(), f.differentiate("u")),
    ];
    let (lo, hi) = cfg.range;
    let outcomes = try_map_indexed(
        cfg.exec,
        cfg.samples,
        |i| -> Result<Outcome, SymmetryError> {
            let mut rng = stream_rng(cfg.seed, i as u64);
            for attempt in 0..MAX_ATTEMPTS {
                let b: Bindings = ["t", "x", "u"]
                    .into_iter()
                    .map(|v| (v, rng.random_range(lo..=hi)))
                    .collect();
                let f_ok = match f.evaluate(&b) {
                    Ok(_) => true,
                    Err(e) if e.is_domain() => false,
                    Err(e) => return Err(e.into()),
                };
                if !f_ok {
                    continue;
                }
                if let Some((total, scale)) = evaluate_terms(&terms, &b)? {
                    return Ok(Outcome {
                        abs: total.abs(),
                        rel: total.abs() / scale,
                        rejected: attempt,
                    });
                }
            }
            Err(SymmetryError::Exhausted { sample: i })
        },
    )?;
    let (max_residual, max_abs, domain_rejections) = summarize(&outcomes);
    Ok(InvarianceReport {
        generator: g.name.clone(),
        function: f.clone(),
        samples: cfg.samples,
        seed: cfg.seed,
        max_residual,
        max_abs,
        domain_rejections,
        tolerance: cfg.tolerance,
        pass: max_residual < cfg.tolerance,
    })
}
