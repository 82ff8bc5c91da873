use fracap_core::besov::{build_cutoff, tent};
use fracap_core::inequalities::{
    sharpness_gap, suite_functions, suite_shapes, verify_chain, verify_function, verify_shape, InequalityId,
    VerifySpec,
};
use fracap_core::perimeter::{sharp_constant, PerimeterSpec};
use fracap_core::{AlphaContext, Shape};
use proptest::prelude::*;

fn ctx(n: usize, a: f64) -> AlphaContext {
    AlphaContext::new(n, a).unwrap()
}

#[test]
fn suite_passes_every_inequality() {
    let spec = VerifySpec::default();
    for a in [0.3, 0.7] {
        for f in suite_functions().unwrap() {
            let c = ctx(f.dim(), a);
            let kappa = sharp_constant(&c, &spec.perimeter).unwrap();
            for r in verify_chain(&f, &c, &kappa, &spec).unwrap() {
                assert!(r.passed(), "α={a} {}: {r:?}", f.label());
            }
        }
        for s in suite_shapes().unwrap() {
            let c = ctx(s.dim(), a);
            for id in InequalityId::ALL.into_iter().filter(|id| !id.takes_function()) {
                let r = verify_shape(id, &s, &c, &spec).unwrap();
                assert!(r.passed(), "α={a} {id} {}: {r:?}", s.describe());
            }
        }
    }
}

#[test]
fn balls_are_extremal_for_set_inequalities() {
    let spec = VerifySpec::default();
    for n in 1..=3 {
        let c = ctx(n, 0.5);
        let b = Shape::unit_ball(n).unwrap();
        for id in [InequalityId::Isoperimetric, InequalityId::Isocapacitary, InequalityId::Eq2] {
            let r = verify_shape(id, &b, &c, &spec).unwrap();
            assert!((r.ratio - 1.0).abs() < 1e-6, "n={n} {id}: {r:?}");
        }
    }
}

#[test]
fn wrong_kind_of_input_is_rejected() {
    let spec = VerifySpec::default();
    let c = ctx(1, 0.5);
    let f = tent(1, 16.0).unwrap();
    assert!(verify_function(InequalityId::Eq4, &f, &c, &spec).is_err());
    let s = Shape::interval(0.0, 1.0).unwrap();
    assert!(verify_shape(InequalityId::Sobolev, &s, &c, &spec).is_err());
    assert!(verify_shape(InequalityId::Eq2, &s, &ctx(2, 0.5), &spec).is_err());
}

#[test]
fn sharpness_gaps() {
    let spec = VerifySpec::default();
    for a in [0.3, 0.5, 0.7] {
        assert!(sharpness_gap(&ctx(2, a), &spec).unwrap().value < 1e-4);
        assert!(sharpness_gap(&ctx(3, a), &spec).unwrap().value < 1e-3);
    }
}

#[test]
fn cutoff_chain_ratios_compose() {
    let spec = VerifySpec::default();
    let c = ctx(2, 0.5);
    let kappa = sharp_constant(&c, &PerimeterSpec::default()).unwrap();
    let f = build_cutoff(&Shape::axis_box(vec![0.0, 0.0], vec![1.0, 2.0]).unwrap(), 0.25, 8.0).unwrap();
    let r = verify_chain(&f, &c, &kappa, &spec).unwrap();
    assert!((r[0].ratio * r[1].ratio / r[2].ratio - 1.0).abs() < 1e-9);
    assert!(r.iter().all(|x| x.ratio < 1.0));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn set_ratios_are_scale_invariant(r in 0.25f64..4.0, a in 0.1f64..0.9, l in 0.3f64..2.0) {
        let spec = VerifySpec::default();
        let c = ctx(2, a);
        let s = Shape::axis_box(vec![0.0, 0.0], vec![1.0, l]).unwrap();
        let t = s.scale(r).unwrap();
        for id in [InequalityId::Isoperimetric, InequalityId::Isocapacitary, InequalityId::Eq4] {
            let p = verify_shape(id, &s, &c, &spec).unwrap().ratio;
            let q = verify_shape(id, &t, &c, &spec).unwrap().ratio;
            prop_assert!((p - q).abs() < 1e-7 * p, "{id}: {p} vs {q}");
        }
    }

    #[test]
    fn sobolev_ratio_is_scale_invariant(r in 0.25f64..4.0, a in 0.1f64..0.9) {
        let spec = VerifySpec::default();
        let c = ctx(1, a);
        let f = tent(1, 64.0).unwrap();
        let p = verify_function(InequalityId::Sobolev, &f, &c, &spec).unwrap().ratio;
        let q = verify_function(InequalityId::Sobolev, &f.compose_scale(r).unwrap(), &c, &spec).unwrap().ratio;
        prop_assert!((p - q).abs() < 1e-9 * p, "{p} vs {q}");
    }
}
