use super::*;

fn ctx(n: usize, a: f64) -> AlphaContext {
    AlphaContext::new(n, a).unwrap()
}

fn kappa(c: &AlphaContext) -> Estimate {
    sharp_constant(c, &PerimeterSpec::default()).unwrap()
}

#[test]
fn ids_round_trip() {
    for id in InequalityId::ALL {
        assert_eq!(id.as_str().parse::<InequalityId>().unwrap(), id);
    }
    assert!("eq5".parse::<InequalityId>().is_err());
}

#[test]
fn comparison_rules() {
    let c = ctx(1, 0.5);
    let r = DeficitReport::compare(InequalityId::Sobolev, "z", &c, Estimate::exact(0.0), Estimate::exact(0.0), "");
    assert!(r.passed() && r.ratio == 0.0);
    let r = DeficitReport::compare(InequalityId::Sobolev, "x", &c, Estimate::exact(1.1), Estimate::exact(1.0), "");
    assert_eq!(r.status, Status::Fail);
    assert!((r.slack + 0.1).abs() < 1e-12);
    let mc = Estimate::monte_carlo(1.0, 0.01, 100, 0);
    let r = DeficitReport::compare(InequalityId::Sobolev, "x", &c, Estimate::exact(1.02), mc, "");
    assert!(r.passed() && (r.tol - (1e-6 + 0.03)).abs() < 1e-12);
}

#[test]
fn tent_chain_in_one_dimension() {
    let c = ctx(1, 0.5);
    let f = tent(1, 1024.0).unwrap();
    let spec = VerifySpec::default();
    let reports = verify_chain(&f, &c, &kappa(&c), &spec).unwrap();
    let (eq1, eq3, sob) = (&reports[0], &reports[1], &reports[2]);
    assert!(reports.iter().all(DeficitReport::passed));
    assert!((sob.lhs.value - (2.0f64 / 3.0).sqrt()).abs() < 1e-5, "{sob:?}");
    assert!((sob.ratio - 3f64.sqrt() / 2.0).abs() < 1e-4, "{sob:?}");
    // level sets are intervals, for which the isocapacitary bound is an equality
    assert!((eq1.ratio - 1.0).abs() < 1e-4, "{eq1:?}");
    assert!((eq3.lhs.value - (1024.0f64 / 6.0).sqrt()).abs() < 1e-3 * 13.0, "{eq3:?}");
}

#[test]
fn zero_function_passes() {
    let c = ctx(1, 0.5);
    let f = SampledFunction::new(vec![0.0], vec![0.1], vec![5], vec![0.0; 5]).unwrap();
    let r = verify_sobolev(&f, &c, &kappa(&c)).unwrap();
    assert!(r.passed() && r.ratio == 0.0);
    let r = verify_truncation(&f, &c, &VerifySpec::default()).unwrap();
    assert!(r.passed());
}

#[test]
fn isoperimetric_ball_equality_and_box_slack() {
    let spec = VerifySpec::default();
    for a in [0.3, 0.5, 0.7] {
        let c = ctx(2, a);
        let r = verify_isoperimetric(&Shape::unit_ball(2).unwrap(), &c, &kappa(&c), &spec).unwrap();
        assert!((r.ratio - 1.0).abs() < 1e-6, "{r:?}");
    }
    let c = ctx(2, 0.5);
    let sq = Shape::axis_box(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap();
    let r = verify_isoperimetric(&sq, &c, &kappa(&c), &spec).unwrap();
    assert!(r.passed() && r.ratio < 0.99, "{r:?}");
    let r3 = verify_isoperimetric(&sq.scale(3.0).unwrap(), &c, &kappa(&c), &spec).unwrap();
    assert!((r3.ratio - r.ratio).abs() < 1e-6);
}

#[test]
fn set_inequalities_on_interval() {
    let c = ctx(1, 0.5);
    let spec = VerifySpec::default();
    let k = kappa(&c);
    let i = Shape::interval(-1.0, 1.0).unwrap();
    let r = verify_isocapacitary(&i, &c, &k, &spec).unwrap();
    assert!((r.lhs.value - 2f64.sqrt()).abs() < 1e-12 && (r.ratio - 1.0).abs() < 1e-6, "{r:?}");
    let r = verify_eq2(&i, &c, &k, &spec).unwrap();
    assert!(r.passed() && (r.ratio - 1.0).abs() < 1e-6);
    let r = verify_eq4(&i, &c, &spec).unwrap();
    assert!(r.passed() && r.ratio <= 1.0 + 1e-12);
    assert!(verify_shape(InequalityId::Sobolev, &i, &c, &spec).is_err());
}

#[test]
fn ball_sharpness_gaps() {
    let spec = VerifySpec::default();
    assert!(sharpness_gap(&ctx(1, 0.5), &spec).unwrap().value < 1e-6);
    for a in [0.3, 0.5, 0.7] {
        assert!(sharpness_gap(&ctx(2, a), &spec).unwrap().value < 1e-4);
    }
}
