use rand::Rng;

use super::*;
use crate::sampling::stream_rng;
use crate::symbolic::{parse, Bindings, Expr};

fn generator(text: &str) -> GeneratorField {
    GeneratorField::parse_components("g", text).unwrap()
}

fn random_jet(seed: u64) -> Bindings {
    let mut rng = stream_rng(seed, 0);
    let mut b = Bindings::new();
    for v in ["t", "x"] {
        b.set(v, rng.random_range(-2.0..2.0));
    }
    for j in MultiIndex::up_to(MAX_ORDER) {
        b.set(j.name(), rng.random_range(-2.0..2.0));
    }
    b
}

#[test]
fn characteristic_examples() {
    let h5 = GeneratorField::predefined("H5").unwrap();
    let q = h5.characteristic();
    let expected = parse("-(x*u) - 2*t*u_x").unwrap();
    let b = random_jet(1);
    assert!((q.expr().evaluate(&b).unwrap() - expected.evaluate(&b).unwrap()).abs() < 1e-14);
    assert_eq!(generator("xi_t = 1").characteristic().to_string(), "-u_t");
    assert_eq!(generator("eta = u").characteristic().to_string(), "u");
}

#[test]
fn translation_prolongs_to_zero() {
    let p = generator("xi_x = 1").prolong(3).unwrap();
    let b = random_jet(2);
    for (j, c) in &p.coefficients {
        assert_eq!(c.expr().evaluate(&b).unwrap(), 0.0, "{j}");
    }
}

#[test]
fn scaling_of_u_prolongs_to_jet_coordinates() {
    let p = generator("eta = u").prolong(3).unwrap();
    for (j, c) in &p.coefficients {
        assert_eq!(c.expr(), &j.var(), "{j}");
    }
    assert_eq!(p.coefficients.len(), 10);
}

#[test]
fn galilean_boost_prolongation() {
    let p = generator("xi_x = t").prolong(2).unwrap();
    let b = random_jet(3);
    let ut = p
        .coefficient(MultiIndex::new(1, 0))
        .unwrap()
        .expr()
        .evaluate(&b)
        .unwrap();
    assert!((ut + b.get("u_x").unwrap()).abs() < 1e-14);
    let ux = p
        .coefficient(MultiIndex::new(0, 1))
        .unwrap()
        .expr()
        .evaluate(&b)
        .unwrap();
    assert!(ux.abs() < 1e-14);
}

#[test]
fn prolongation_is_linear() {
    let g1 = GeneratorField::predefined("H6").unwrap();
    let g2 = GeneratorField::predefined("H4").unwrap();
    let sum = GeneratorField::combination("sum", &[(1.0, &g1), (1.0, &g2)]);
    let (p1, p2, ps) = (
        g1.prolong(3).unwrap(),
        g2.prolong(3).unwrap(),
        sum.prolong(3).unwrap(),
    );
    for seed in 0..10 {
        let b = random_jet(seed);
        for j in MultiIndex::up_to(3) {
            let e = |p: &ProlongedGenerator| p.coefficient(j).unwrap().expr().evaluate(&b).unwrap();
            let (a, c, s) = (e(&p1), e(&p2), e(&ps));
            assert!((a + c - s).abs() <= 1e-10 * (1.0 + s.abs()), "{j}");
        }
    }
}

#[test]
fn vertical_generator_prolongs_to_total_derivatives() {
    let eta = JetExpr::parse("t*x^2 + sin(u)").unwrap();
    let p = GeneratorField::new("v", Expr::zero(), Expr::zero(), eta.expr().clone())
        .unwrap()
        .prolong(2)
        .unwrap();
    let dx = total_derivative(&eta, Dir::X).unwrap();
    let dtx = total_derivative(&dx, Dir::T).unwrap();
    for seed in 0..5 {
        let b = random_jet(seed);
        let c = p
            .coefficient(MultiIndex::new(1, 1))
            .unwrap()
            .expr()
            .evaluate(&b)
            .unwrap();
        assert!((c - dtx.expr().evaluate(&b).unwrap()).abs() < 1e-10);
    }
}

#[test]
fn total_derivatives_commute() {
    let e = JetExpr::parse("t*x*u_x^2 + exp(u)*u_t + x^3").unwrap();
    let tx = total_derivative(&total_derivative(&e, Dir::T).unwrap(), Dir::X).unwrap();
    let xt = total_derivative(&total_derivative(&e, Dir::X).unwrap(), Dir::T).unwrap();
    for seed in 0..10 {
        let b = random_jet(seed);
        let (a, c) = (
            tx.expr().evaluate(&b).unwrap(),
            xt.expr().evaluate(&b).unwrap(),
        );
        assert!((a - c).abs() <= 1e-10 * (1.0 + a.abs()));
    }
}

#[test]
fn heat_generators_pass_and_boost_in_t_fails() {
    let cfg = CheckConfig::new(50, 42, INVARIANCE_TOLERANCE);
    for name in ["H1", "H2", "H3", "H4", "H5", "H6"] {
        let r = lsc_check(
            &GeneratorField::predefined(name).unwrap(),
            &Pde::heat(),
            &cfg,
        )
        .unwrap();
        assert!(r.pass, "{r:?}");
    }
    let r = lsc_check(&generator("xi_t = x"), &Pde::heat(), &cfg).unwrap();
    assert!(!r.pass && r.max_residual > 1e-3, "{r:?}");
}

#[test]
fn einstein_generators_pass() {
    let cfg = CheckConfig::new(40, 7, LSC_TOLERANCE);
    for lambda in [1.0, -1.0] {
        let pde = Pde::einstein(lambda);
        for i in 1..=9 {
            let g = GeneratorField::predefined(&format!("X{i}")).unwrap();
            let r = lsc_check(&g, &pde, &cfg).unwrap();
            assert!(r.pass, "{r:?}");
        }
        // u ∂t is not a symmetry
        let r = lsc_check(&generator("xi_t = u"), &pde, &cfg).unwrap();
        assert!(!r.pass, "{r:?}");
    }
}

#[test]
fn offshell_residual_is_nonzero() {
    let g = GeneratorField::predefined("H4").unwrap();
    let m = offshell_max(&g, &Pde::heat(), &CheckConfig::new(20, 42, 0.0)).unwrap();
    assert!(m > 1e-3);
}

#[test]
fn invariance_examples() {
    let g = GeneratorField::from_text("H4 + H3").unwrap();
    let cfg = CheckConfig::new(100, 42, INVARIANCE_TOLERANCE);
    let r = invariance_check(&g, &parse("x/sqrt(t)").unwrap(), &cfg).unwrap();
    assert!(r.pass && r.domain_rejections > 0, "{r:?}");
    // with η = a u the u-invariant is u t^(-a/2); u t^(-a) is not invariant
    let r = invariance_check(&g, &parse("u/sqrt(t)").unwrap(), &cfg).unwrap();
    assert!(r.pass, "{r:?}");
    let r = invariance_check(&g, &parse("u/t").unwrap(), &cfg).unwrap();
    assert!(!r.pass, "{r:?}");
    let scaling = GeneratorField::predefined("H4").unwrap();
    let r = invariance_check(&scaling, &parse("x").unwrap(), &cfg).unwrap();
    assert!(!r.pass);
    assert!(invariance_check(&scaling, &parse("u_x").unwrap(), &cfg).is_err());
}

#[test]
fn generator_text_forms() {
    let g = GeneratorField::from_text("X4 + 0.1*X6").unwrap();
    let b = Bindings::new().with("t", 2.0).with("x", 3.0).with("u", 0.0);
    assert!((g.xi_t.evaluate(&b).unwrap() - 2.3).abs() < 1e-15);
    assert_eq!(g.xi_x.evaluate(&b).unwrap(), 0.0);
    let g = GeneratorField::from_text("X9 - 2*X3").unwrap();
    assert_eq!(g.eta.evaluate(&b).unwrap(), 1.0);
    let g = GeneratorField::from_text("eta = u; xi_t = 1").unwrap();
    assert_eq!(g.xi_x, Expr::zero());
    assert!(matches!(
        GeneratorField::from_text("X10"),
        Err(SymmetryError::UnknownGenerator(_))
    ));
    assert!(GeneratorField::from_text("X1*X2").is_err());
    assert!(GeneratorField::from_text("X1 + 1").is_err());
    assert!(matches!(
        GeneratorField::from_text("xi_t = u_x"),
        Err(SymmetryError::DerivativeInGenerator(_))
    ));
    assert!(GeneratorField::from_text("xi_t = 1; xi_t = 2").is_err());
    assert!(GeneratorField::from_text("zeta = 1").is_err());
    assert_eq!(GeneratorField::predefined_names().count(), 15);
}

#[test]
fn non_affine_equations_are_rejected() {
    let pde = Pde::new(
        "burgers-like",
        JetExpr::parse("u_t^2 - u_xx").unwrap(),
        MultiIndex::new(1, 0),
    )
    .unwrap();
    let err = lsc_check(
        &GeneratorField::predefined("H1").unwrap(),
        &pde,
        &CheckConfig::lsc(),
    )
    .unwrap_err();
    assert!(matches!(err, SymmetryError::NotAffine(_)));
    assert!(Pde::new("p", JetExpr::parse("u_x").unwrap(), MultiIndex::new(1, 0)).is_err());
}

#[test]
fn deterministic_across_execution_modes() {
    use crate::exec::Execution;
    let g = GeneratorField::predefined("X5").unwrap();
    let pde = Pde::einstein(1.0);
    let a = lsc_check(
        &g,
        &pde,
        &CheckConfig::lsc().with_exec(Execution::Sequential),
    )
    .unwrap();
    let b = lsc_check(&g, &pde, &CheckConfig::lsc()).unwrap();
    assert_eq!(a, b);
}
