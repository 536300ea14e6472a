use std::fmt::Write as _;

use serde::Serialize;
use serde_json::{json, Value};
use statein_core::catalog::{self, CatalogEntry, Geometry, EINSTEIN_TOLERANCE};
use statein_core::einstein2d::{Einstein2dError, Surface, Verdict};
use statein_core::exec::Execution;
use statein_core::infogeo::{
    einstein_residual, CurvatureBundle, CurvatureSource, InfoGeoError, MetricGeometry,
    PotentialGeometry, PotentialSpec,
};
use statein_core::sampling::{sample_points, Box2, SamplingError};
use statein_core::symbolic::{parse, Expr};
use statein_core::symmetry::{
    invariance_check, lsc_check, CheckConfig, GeneratorField, Pde, SymmetryError, LSC_TOLERANCE,
};

use crate::args::{
    CatalogArgs, CheckArgs, ConvexityArgs, CurvatureArgs, Grid, InvariantArgs, Output, ParseArgs,
    PdeKind, Point, Source, SymmetryArgs,
};

const INLINE: &str = "inline";
const DEFAULT_CHECK_SAMPLES: usize = 100;
const HEAT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Domain(String),
    #[error("cannot write report: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Io(_) => 2,
            CliError::Domain(_) => 3,
        }
    }
}

fn usage(msg: impl ToString) -> CliError {
    CliError::Usage(msg.to_string())
}

impl From<InfoGeoError> for CliError {
    fn from(e: InfoGeoError) -> Self {
        if e.is_domain() || matches!(e, InfoGeoError::SingularMetric { .. }) {
            CliError::Domain(e.to_string())
        } else {
            CliError::Usage(e.to_string())
        }
    }
}

impl From<Einstein2dError> for CliError {
    fn from(e: Einstein2dError) -> Self {
        match e {
            Einstein2dError::Geometry(g) => g.into(),
            Einstein2dError::Sampling(_) | Einstein2dError::TooFewSamples { .. } => {
                CliError::Domain(e.to_string())
            }
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<SymmetryError> for CliError {
    fn from(e: SymmetryError) -> Self {
        match e {
            SymmetryError::Exhausted { .. } | SymmetryError::Eval(_) => {
                CliError::Domain(e.to_string())
            }
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<SamplingError> for CliError {
    fn from(e: SamplingError) -> Self {
        CliError::Domain(e.to_string())
    }
}

/// Everything a subcommand produces, before formatting.
pub struct Outcome {
    pub input: Value,
    pub results: Value,
    pub pass: bool,
    pub text: String,
    /// Only grid-valued commands produce CSV.
    pub csv: Option<Vec<u8>>,
}

fn to_value(v: &impl Serialize) -> Value {
    serde_json::to_value(v).expect("report types serialize")
}

fn input(command: &str, args: &impl Serialize) -> Value {
    let mut v = to_value(args);
    if let Value::Object(map) = &mut v {
        map.insert("command".into(), Value::String(command.into()));
    }
    v
}

fn status(pass: bool) -> &'static str {
    if pass {
        "PASS"
    } else {
        "FAIL"
    }
}

/// A resolved `--expr` / `--catalog` pair.
enum Resolved {
    Inline(PotentialSpec),
    Entry(&'static CatalogEntry),
}

impl Resolved {
    fn potential(&self) -> Option<&PotentialSpec> {
        match self {
            Resolved::Inline(p) => Some(p),
            Resolved::Entry(e) => e.potential(),
        }
    }

    fn bounds(&self, given: Option<Box2>, flag_hint: &str) -> Result<Box2, CliError> {
        match (given, self) {
            (Some(b), _) => Ok(b),
            (None, Resolved::Entry(e)) => Ok(e.bounds),
            (None, Resolved::Inline(_)) => {
                Err(usage(format!("--box is required with --expr{flag_hint}")))
            }
        }
    }
}

fn infer_dim(e: &Expr) -> Result<usize, CliError> {
    let vars = e.free_variables();
    if vars.iter().all(|v| v == "t" || v == "x") {
        return Ok(2);
    }
    let mut dim = 0;
    for v in &vars {
        match v.strip_prefix("theta").and_then(|k| k.parse::<usize>().ok()) {
            Some(k) if k >= 1 => dim = dim.max(k),
            _ => {
                return Err(usage(format!(
                    "cannot infer the dimension from variable `{v}`; use t, x or theta1..thetaN, or pass --dim"
                )))
            }
        }
    }
    Ok(dim.max(1))
}

fn resolve(source: &Source) -> Result<Resolved, CliError> {
    match (&source.expr, &source.catalog) {
        (Some(text), None) => {
            let e = parse(text).map_err(|err| usage(format!("--expr: {err}")))?;
            let dim = match source.dim {
                Some(d) => d,
                None => infer_dim(&e)?,
            };
            let mut builder = PotentialSpec::builder(INLINE, dim, e);
            for d in &source.domain {
                builder = builder
                    .domain_text(d)
                    .map_err(|err| usage(format!("--domain `{d}`: {err}")))?;
            }
            Ok(Resolved::Inline(builder.build().map_err(usage)?))
        }
        (None, Some(name)) => catalog::find(name).map(Resolved::Entry).map_err(usage),
        _ => Err(usage("exactly one of --expr and --catalog is required")),
    }
}

fn two_dimensional(p: &PotentialSpec) -> Result<Surface, CliError> {
    Surface::new(p).map_err(usage)
}

pub fn parse_cmd(args: &ParseArgs) -> Result<Outcome, CliError> {
    let resolved = resolve(&args.source)?;
    let results = match &resolved {
        Resolved::Inline(p) => {
            let raw = parse(args.source.expr.as_deref().unwrap_or_default())
                .expect("parsed once already");
            json!({
                "expression": raw.to_string(),
                "simplified": raw.simplify().to_string(),
                "potential": p.resolved().to_string(),
                "dim": p.dim(),
                "variables": raw.free_variables(),
            })
        }
        Resolved::Entry(e) => json!({
            "name": e.name,
            "kind": e.kind(),
            "expressions": e.expressions().iter().map(Expr::to_string).collect::<Vec<_>>(),
        }),
    };
    let mut text = String::new();
    match &resolved {
        Resolved::Inline(p) => {
            writeln!(
                text,
                "{}",
                results["simplified"].as_str().unwrap_or_default()
            )
            .ok();
            writeln!(text, "potential ({}-D): {}", p.dim(), p.resolved()).ok();
        }
        Resolved::Entry(e) => {
            for expr in e.expressions() {
                writeln!(text, "{expr}").ok();
            }
        }
    }
    Ok(Outcome {
        input: input("parse", args),
        results,
        pass: true,
        text,
        csv: None,
    })
}

fn grid_centers(b: Box2, g: Grid) -> Vec<(usize, usize, [f64; 2])> {
    let dt = (b.t_max - b.t_min) / g.rows as f64;
    let dx = (b.x_max - b.x_min) / g.cols as f64;
    let mut out = Vec::with_capacity(g.rows * g.cols);
    for r in 0..g.rows {
        for c in 0..g.cols {
            let t = b.t_min + (r as f64 + 0.5) * dt;
            let x = b.x_min + (c as f64 + 0.5) * dx;
            out.push((r, c, [t, x]));
        }
    }
    out
}

fn check_box(b: Box2) -> Result<Box2, CliError> {
    if b.is_valid() {
        Ok(b)
    } else {
        Err(usage("--box needs t0 < t1 and x0 < x1"))
    }
}

pub fn curvature_cmd(args: &CurvatureArgs, exec: Execution) -> Result<Outcome, CliError> {
    let resolved = resolve(&args.source)?;
    enum Geo {
        Alpha(PotentialGeometry),
        Lc(MetricGeometry),
    }
    let (geo, dim) = match &resolved {
        Resolved::Inline(p) => (Geo::Alpha(PotentialGeometry::new(p)), p.dim()),
        Resolved::Entry(e) => match &e.geometry {
            Geometry::Potential(p) => (Geo::Alpha(PotentialGeometry::new(p)), p.dim()),
            Geometry::Metric(m) => {
                if args.alpha != 0.0 {
                    return Err(usage("--alpha applies only to potentials; metric entries use the Levi-Civita connection"));
                }
                (Geo::Lc(MetricGeometry::new(m)), 2)
            }
        },
    };
    let at = |pt: &[f64]| -> Result<CurvatureBundle, InfoGeoError> {
        match &geo {
            Geo::Alpha(g) => g.curvature(args.alpha, pt),
            Geo::Lc(g) => g.curvature(pt),
        }
    };

    if let Some(grid) = args.grid {
        if dim != 2 {
            return Err(usage("--grid needs a 2-D geometry"));
        }
        let bounds = check_box(resolved.bounds(args.bounds, " and --grid")?)?;
        let cells = grid_centers(bounds, grid);
        let values = statein_core::exec::map_indexed(exec, cells.len(), |i| at(&cells[i].2));
        let mut records = Vec::with_capacity(cells.len());
        let mut wtr = csv::Writer::from_writer(Vec::new());
        wtr.write_record([
            "row",
            "col",
            "t",
            "x",
            "status",
            "r1212",
            "sectional",
            "scalar",
        ])
        .map_err(usage)?;
        let mut failures = 0;
        for ((r, c, [t, x]), v) in cells.iter().zip(values) {
            match v {
                Ok(b) => {
                    let k = b.sectional(0, 1).unwrap_or(f64::NAN);
                    let r1212 = b.riemann(0, 1, 0, 1);
                    wtr.write_record([
                        r.to_string(),
                        c.to_string(),
                        t.to_string(),
                        x.to_string(),
                        "ok".into(),
                        r1212.to_string(),
                        k.to_string(),
                        b.scalar.to_string(),
                    ])
                    .map_err(usage)?;
                    records.push(json!({"row": r, "col": c, "t": t, "x": x, "status": "ok",
                        "r1212": r1212, "sectional": k, "scalar": b.scalar}));
                }
                Err(e) => {
                    failures += 1;
                    let status = if e.is_domain() {
                        "domain-error"
                    } else {
                        "singular"
                    };
                    wtr.write_record([
                        &r.to_string(),
                        &c.to_string(),
                        &t.to_string(),
                        &x.to_string(),
                        status,
                        "",
                        "",
                        "",
                    ])
                    .map_err(usage)?;
                    records.push(json!({"row": r, "col": c, "t": t, "x": x, "status": status,
                        "error": e.to_string()}));
                }
            }
        }
        let csv = wtr.into_inner().map_err(|e| usage(e.to_string()))?;
        let text = format!(
            "{} cells, {} evaluated, {failures} outside the domain or singular\n",
            cells.len(),
            cells.len() - failures
        );
        return Ok(Outcome {
            input: input("curvature", args),
            results: Value::Array(records),
            pass: failures == 0,
            text,
            csv: Some(csv),
        });
    }

    let points: Vec<Vec<f64>> = if args.point.is_empty() {
        if dim != 2 {
            return Err(usage("random sampling needs a 2-D geometry; pass --point"));
        }
        let bounds =
            check_box(resolved.bounds(args.bounds, " unless --point or --grid is given")?)?;
        sample_points(
            &bounds.ranges(),
            args.samples,
            args.output.seed,
            exec,
            |p| at(p).is_ok(),
        )?
    } else {
        args.point.iter().map(|Point(p)| p.clone()).collect()
    };
    for p in &points {
        if p.len() != dim {
            return Err(usage(format!(
                "point {p:?} has {} coordinates, expected {dim}",
                p.len()
            )));
        }
    }
    let bundles = statein_core::exec::try_map_indexed(exec, points.len(), |i| at(&points[i]))?;
    let mut text = String::new();
    for b in &bundles {
        writeln!(
            text,
            "point {:?}  alpha {}  scalar {:.12e}",
            b.point, b.alpha, b.scalar
        )
        .ok();
        for s in &b.sectional {
            writeln!(
                text,
                "  sectional({},{}) = {:.12e}",
                s.i + 1,
                s.j + 1,
                s.value
            )
            .ok();
        }
    }
    Ok(Outcome {
        input: input("curvature", args),
        results: to_value(&bundles),
        pass: true,
        text,
        csv: None,
    })
}

fn pointwise_check(
    resolved: &Resolved,
    lambda: f64,
    points: &[Point],
) -> Result<(Value, bool, String), CliError> {
    let source = match resolved {
        Resolved::Inline(p) => CurvatureSource::Potential(p),
        Resolved::Entry(e) => match &e.geometry {
            Geometry::Potential(p) => CurvatureSource::Potential(p),
            Geometry::Metric(m) => CurvatureSource::Metric(m),
        },
    };
    let mut records = Vec::new();
    let mut text = String::new();
    let mut pass = true;
    for Point(pt) in points {
        let r = einstein_residual(source, lambda, pt)?;
        let worst = r.max_abs();
        let ok = worst < EINSTEIN_TOLERANCE;
        pass &= ok;
        writeln!(text, "{} {pt:?} max |Ric + λg| = {worst:.3e}", status(ok)).ok();
        records.push(json!({
            "point": pt,
            "residual": r,
            "max_residual": worst,
            "tolerance": EINSTEIN_TOLERANCE,
            "pass": ok,
        }));
    }
    Ok((json!({"lambda": lambda, "points": records}), pass, text))
}

pub fn check_cmd(args: &CheckArgs, exec: Execution) -> Result<Outcome, CliError> {
    let resolved = resolve(&args.source)?;
    let lambda = match (&resolved, args.lambda) {
        (_, Some(l)) => l,
        (Resolved::Entry(e), None) => e.lambda,
        (Resolved::Inline(_), None) => return Err(usage("--lambda is required with --expr")),
    };
    if !args.point.is_empty() {
        let (results, pass, text) = pointwise_check(&resolved, lambda, &args.point)?;
        return Ok(Outcome {
            input: input("check", args),
            results,
            pass,
            text,
            csv: None,
        });
    }

    let mut entry = match &resolved {
        Resolved::Entry(e) => (*e).clone(),
        Resolved::Inline(p) => {
            let surface = Surface::new(p).map_err(|_| {
                usage(format!(
                    "a {}-D potential can only be checked at explicit --point values",
                    p.dim()
                ))
            })?;
            let bounds = check_box(resolved.bounds(args.bounds, " unless --point is given")?)?;
            let samples = args.samples.unwrap_or(DEFAULT_CHECK_SAMPLES);
            // surface the domain problem as an error rather than a failed check
            surface.sample(bounds, samples, args.output.seed, exec)?;
            CatalogEntry {
                name: INLINE,
                description: "potential given on the command line",
                geometry: Geometry::Potential(p.clone()),
                lambda,
                flat: false,
                bounds,
                samples,
            }
        }
    };
    entry.lambda = lambda;
    if let Some(b) = args.bounds {
        entry.bounds = check_box(b)?;
    }
    if let Some(n) = args.samples {
        entry.samples = n;
    }
    let report = catalog::verify(&entry, args.output.seed, exec);
    let mut text = format!(
        "{} {} (lambda = {lambda})\n",
        status(report.pass),
        report.name
    );
    for c in &report.checks {
        write!(
            text,
            "  {} {:<17} {:.3e} (tolerance {:e})",
            status(c.pass),
            c.name,
            c.value,
            c.tolerance
        )
        .ok();
        if let Some(d) = &c.detail {
            write!(text, ": {d}").ok();
        }
        text.push('\n');
    }
    if let Some(est) = report.lambda_estimate {
        writeln!(text, "  estimated lambda {est:.12}").ok();
    }
    Ok(Outcome {
        input: input("check", args),
        pass: report.pass,
        results: to_value(&report),
        text,
        csv: None,
    })
}

pub fn convexity_cmd(args: &ConvexityArgs, exec: Execution) -> Result<Outcome, CliError> {
    let resolved = resolve(&args.source)?;
    let p = resolved
        .potential()
        .ok_or_else(|| usage("convexity scans need a potential, not a metric entry"))?;
    let surface = two_dimensional(p)?;
    let bounds = check_box(resolved.bounds(args.bounds, "")?)?;
    let report = surface.convexity_scan(bounds, args.grid.rows, args.grid.cols, exec)?;

    let mut wtr = csv::Writer::from_writer(Vec::new());
    wtr.write_record(["row", "col", "t", "x", "verdict"])
        .map_err(usage)?;
    for c in &report.cells {
        wtr.write_record([
            c.row.to_string(),
            c.col.to_string(),
            c.t.to_string(),
            c.x.to_string(),
            c.verdict.as_str().to_string(),
        ])
        .map_err(usage)?;
    }
    let csv = wtr.into_inner().map_err(|e| usage(e.to_string()))?;

    let mut text = format!(
        "{}x{} grid: {} convex, {} not convex, {} domain error\n",
        report.rows, report.cols, report.convex, report.not_convex, report.domain_error
    );
    match &report.largest_convex {
        Some(sub) => {
            let b = sub.bounds;
            writeln!(
                text,
                "largest convex box: t in [{}, {}], x in [{}, {}] ({} cells)",
                b.t_min, b.t_max, b.x_min, b.x_max, sub.cells
            )
            .ok();
        }
        None => text.push_str("no convex cell\n"),
    }
    Ok(Outcome {
        input: input("convexity", args),
        pass: report.cells.iter().any(|c| c.verdict == Verdict::Convex),
        results: to_value(&report),
        text,
        csv: Some(csv),
    })
}

pub fn symmetry_cmd(args: &SymmetryArgs, exec: Execution) -> Result<Outcome, CliError> {
    let (pde, prefix, count, default_tol) = match args.pde {
        PdeKind::Heat => (Pde::heat(), "H", 6, HEAT_TOLERANCE),
        PdeKind::Txpeq => (Pde::einstein(args.lambda), "X", 9, LSC_TOLERANCE),
    };
    let generators = if args.generators.is_empty() {
        (1..=count)
            .map(|i| GeneratorField::predefined(&format!("{prefix}{i}")).expect("built-in"))
            .collect()
    } else {
        args.generators
            .iter()
            .map(|g| GeneratorField::from_text(g))
            .collect::<Result<Vec<_>, _>>()?
    };
    let cfg = CheckConfig::new(
        args.samples,
        args.output.seed,
        args.tolerance.unwrap_or(default_tol),
    )
    .with_exec(exec);
    let reports = generators
        .iter()
        .map(|g| lsc_check(g, &pde, &cfg))
        .collect::<Result<Vec<_>, _>>()?;
    let pass = reports.iter().all(|r| r.pass);
    let mut text = String::new();
    for r in &reports {
        writeln!(
            text,
            "{} {:<12} on {}: max relative residual {:.3e} over {} samples (tolerance {:e})",
            status(r.pass),
            r.generator,
            r.pde,
            r.max_residual,
            r.samples,
            r.tolerance
        )
        .ok();
    }
    Ok(Outcome {
        input: input("symmetry verify", args),
        results: to_value(&reports),
        pass,
        text,
        csv: None,
    })
}

pub fn invariant_cmd(args: &InvariantArgs, exec: Execution) -> Result<Outcome, CliError> {
    let g = GeneratorField::from_text(&args.generator)?;
    let cfg = CheckConfig::new(args.samples, args.output.seed, args.tolerance).with_exec(exec);
    let mut reports = Vec::new();
    for text in &args.expr {
        let f = parse(text).map_err(|e| usage(format!("--expr `{text}`: {e}")))?;
        reports.push(invariance_check(&g, &f, &cfg)?);
    }
    let pass = reports.iter().all(|r| r.pass);
    let mut text = String::new();
    for r in &reports {
        writeln!(
            text,
            "{} {}({}) : max relative residual {:.3e} (tolerance {:e})",
            status(r.pass),
            r.generator,
            r.function,
            r.max_residual,
            r.tolerance
        )
        .ok();
    }
    Ok(Outcome {
        input: input("invariant check", args),
        results: to_value(&reports),
        pass,
        text,
        csv: None,
    })
}

fn selected(name: &Option<String>) -> Result<Vec<&'static CatalogEntry>, CliError> {
    match name {
        Some(n) => Ok(vec![catalog::find(n).map_err(usage)?]),
        None => Ok(catalog::entries().iter().collect()),
    }
}

pub fn catalog_list(args: &Output) -> Result<Outcome, CliError> {
    let entries = catalog::list_entries();
    let mut text = String::new();
    for e in &entries {
        let kind = serde_json::to_value(e.kind).expect("serializes");
        writeln!(
            text,
            "{:<28} {:<14} lambda = {:<20} {}",
            e.name,
            kind.as_str().unwrap_or_default(),
            e.lambda,
            e.description
        )
        .ok();
    }
    Ok(Outcome {
        input: input("catalog list", args),
        results: to_value(&entries),
        pass: true,
        text,
        csv: None,
    })
}

pub fn catalog_verify(args: &CatalogArgs, exec: Execution) -> Result<Outcome, CliError> {
    let reports: Vec<_> = selected(&args.catalog)?
        .into_iter()
        .map(|e| catalog::verify(e, args.output.seed, exec))
        .collect();
    let pass = reports.iter().all(|r| r.pass);
    let mut text = String::new();
    for r in &reports {
        write!(text, "{} {}", status(r.pass), r.name).ok();
        for c in r.checks.iter().filter(|c| !c.pass) {
            write!(text, " {}={:.3e}", c.name, c.value).ok();
        }
        text.push('\n');
    }
    Ok(Outcome {
        input: input("catalog verify", args),
        results: to_value(&reports),
        pass,
        text,
        csv: None,
    })
}

pub fn catalog_export(args: &CatalogArgs) -> Result<Outcome, CliError> {
    let exports: Vec<_> = selected(&args.catalog)?
        .into_iter()
        .map(CatalogEntry::export)
        .collect();
    let text = serde_json::to_string_pretty(&exports).expect("serializes") + "\n";
    Ok(Outcome {
        input: input("catalog export", args),
        results: to_value(&exports),
        pass: true,
        text,
        csv: None,
    })
}
