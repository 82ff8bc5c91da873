use super::*;
use crate::geometry::AxisBox;

fn small_2d() -> SampledFunction {
    // irregular values on a 6×5 grid with a zero border
    let ext = vec![6usize, 5];
    let mut v = vec![0.0; 30];
    let inner = [0.3, -1.2, 0.7, 2.0, 0.1, 0.0, 1.5, -0.4, 0.9, 0.25, 1.1, 0.6];
    let mut it = inner.iter();
    for i in 1..5 {
        for j in 1..4 {
            v[i * 5 + j] = *it.next().unwrap();
        }
    }
    SampledFunction::new(vec![-0.3, 0.2], vec![0.25, 0.4], ext, v).unwrap()
}

/// `∫|f(x+h) - f(x)|dx` integrated exactly over the common refinement of
/// both cell grids.
fn brute_diff(f: &SampledFunction, h: &[f64]) -> f64 {
    let n = f.dim();
    let mut cuts: Vec<Vec<f64>> = Vec::new();
    for i in 0..n {
        let mut c = Vec::new();
        for k in 0..=f.extents()[i] {
            let x = f.origin()[i] + k as f64 * f.spacing()[i];
            c.push(x);
            c.push(x - h[i]);
        }
        c.sort_by(f64::total_cmp);
        cuts.push(c);
    }
    let mut total = 0.0;
    let mut idx = vec![0usize; n];
    loop {
        let mut x = vec![0.0; n];
        let mut xs = vec![0.0; n];
        let mut vol = 1.0;
        for i in 0..n {
            let (a, b) = (cuts[i][idx[i]], cuts[i][idx[i] + 1]);
            x[i] = 0.5 * (a + b);
            xs[i] = x[i] + h[i];
            vol *= b - a;
        }
        total += (f.eval(&xs) - f.eval(&x)).abs() * vol;
        let mut k = 0;
        while k < n {
            idx[k] += 1;
            if idx[k] + 1 < cuts[k].len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
        if k == n {
            return total;
        }
    }
}

#[test]
fn diff_volume_matches_exact_refinement() {
    let f = small_2d();
    for h in [[0.1, -0.05], [0.6, 0.9], [-0.37, 0.41], [0.0, 0.0], [3.0, 0.0]] {
        let got = diff_volume(&f, &h).unwrap();
        let want = brute_diff(&f, &h);
        assert!((got - want).abs() < 1e-12, "h={h:?}: {got} vs {want}");
    }
    let t = tent(1, 16.0).unwrap();
    assert_eq!(diff_volume(&t, &[0.0]).unwrap(), 0.0);
    assert!((diff_volume(&t, &[2.5]).unwrap() - 2.0).abs() < 1e-12);
}

#[test]
fn diff_table_is_symmetric_and_saturates() {
    let f = small_2d();
    let t = diff_table(&f);
    assert!((t.at(&[2, -1]) - t.at(&[-2, 1])).abs() < 1e-14);
    assert!((t.at(&[6, 0]) - t.outside()).abs() < 1e-12);
    assert!((t.at(&[1, 2]) - brute_diff(&f, &[0.25, 0.8])).abs() < 1e-12);
}

#[test]
fn zero_function_has_zero_seminorm() {
    let f = SampledFunction::new(vec![0.0], vec![0.1], vec![5], vec![0.0; 5]).unwrap();
    let ctx = AlphaContext::new(1, 0.5).unwrap();
    let e = besov_seminorm(&f, &ctx).unwrap();
    assert_eq!(e.value, 0.0);
    assert_eq!(e.error, 0.0);
}

#[test]
fn nonzero_boundary_rejected() {
    assert!(SampledFunction::new(vec![0.0], vec![0.1], vec![4], vec![1.0, 1.0, 0.0, 0.0]).is_err());
    assert!(SampledFunction::new(vec![0.0], vec![0.1], vec![4], vec![0.0, f64::NAN, 0.0, 0.0]).is_err());
    assert!(SampledFunction::new(vec![0.0], vec![0.0], vec![4], vec![0.0; 4]).is_err());
}

#[test]
fn tent_level_set() {
    let f = tent(1, 64.0).unwrap();
    let LevelSet::Set(s) = superlevel_set(&f, 0.5).unwrap() else { panic!("empty") };
    let b = s.bounding_box();
    assert!((b.lo()[0] + 0.5).abs() <= 1.0 / 64.0 && (b.hi()[0] - 0.5).abs() <= 1.0 / 64.0);
    assert!(matches!(superlevel_set(&f, 1.5).unwrap(), LevelSet::Empty));
    assert!(superlevel_set(&f, 0.0).is_err());
}

#[test]
fn exact_layer_cake() {
    let f = small_2d();
    for q in [1.0, 2.0, 1.5] {
        let e = level_integral(&f, LevelRule::Exact, q, |_, s| Ok(Estimate::exact(s.exact_volume().unwrap()))).unwrap();
        let want = f.lp_norm(q).unwrap().powf(q);
        assert!((e.value - want).abs() < 1e-12 * want, "q={q}");
    }
}

#[test]
fn grid_text_round_trip() {
    let f = small_2d();
    let g = SampledFunction::parse_grid(&f.to_grid_text()).unwrap();
    assert_eq!(f.values(), g.values());
    assert_eq!(f.spacing(), g.spacing());
    assert!(SampledFunction::parse_grid("2\n0 0\n1 1\n3\n").is_err());
}

#[test]
fn scaling_of_grid_functions() {
    let f = small_2d();
    let g = f.compose_scale(2.0).unwrap();
    assert!((g.lp_norm(1.0).unwrap() - f.lp_norm(1.0).unwrap() / 4.0).abs() < 1e-14);
    let b = AxisBox::new(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap();
    assert!(SampledFunction::from_fn(&b, 4.0, |_| 1.0).is_ok());
}
