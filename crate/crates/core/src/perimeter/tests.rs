use super::*;
use crate::geometry::AxisBox;

fn interval_closed_form(len: f64, alpha: f64) -> f64 {
    2.0 * len.powf(1.0 - alpha) / (alpha * (1.0 - alpha))
}

#[test]
fn interval_matches_closed_form() {
    let spec = PerimeterSpec::default();
    for alpha in [0.1, 0.5, 0.9, 0.995] {
        let ctx = AlphaContext::new(1, alpha).unwrap();
        let p = frac_perimeter(&Shape::interval(0.0, 1.0).unwrap(), &ctx, &spec).unwrap();
        let exact = interval_closed_form(1.0, alpha);
        assert!((p.value - exact).abs() < 1e-9 * exact, "α={alpha}: {p} vs {exact}");
    }
}

#[test]
fn ball_in_one_dimension_is_an_interval() {
    let ctx = AlphaContext::new(1, 0.4).unwrap();
    let spec = PerimeterSpec::default();
    let b = frac_perimeter(&Shape::ball(vec![0.3], 1.0).unwrap(), &ctx, &spec).unwrap();
    let i = frac_perimeter(&Shape::interval(-0.7, 1.3).unwrap(), &ctx, &spec).unwrap();
    assert!((b.value - i.value).abs() < 1e-10 * i.value);
}

#[test]
fn box_equals_split_box_union() {
    let ctx = AlphaContext::new(2, 0.5).unwrap();
    let spec = PerimeterSpec::default();
    let whole = Shape::axis_box(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap();
    let halves = Shape::box_union(vec![
        AxisBox::new(vec![0.0, 0.0], vec![0.5, 1.0]).unwrap(),
        AxisBox::new(vec![0.5, 0.0], vec![1.0, 1.0]).unwrap(),
    ])
    .unwrap();
    let a = frac_perimeter(&whole, &ctx, &spec).unwrap();
    let b = frac_perimeter(&halves, &ctx, &spec).unwrap();
    assert!((a.value - b.value).abs() < 1e-8, "{a} vs {b}");
}

#[test]
fn quadrature_refused_for_indicator_sets() {
    let bbox = AxisBox::new(vec![-1.0, -1.0], vec![1.0, 1.0]).unwrap();
    let s = Shape::indicator(crate::geometry::disk_oracle(1.0), bbox, Some(std::f64::consts::PI), "disk").unwrap();
    let ctx = AlphaContext::new(2, 0.5).unwrap();
    let spec = PerimeterSpec::default().with_method(PerimeterMethod::Quadrature);
    assert!(matches!(frac_perimeter(&s, &ctx, &spec), Err(Error::Unsupported(_))));
}

#[test]
fn dimension_mismatch_rejected() {
    let ctx = AlphaContext::new(2, 0.5).unwrap();
    let r = frac_perimeter(&Shape::interval(0.0, 1.0).unwrap(), &ctx, &PerimeterSpec::default());
    assert!(matches!(r, Err(Error::InvalidArgument(_))));
}

#[test]
fn seminorm_is_twice_perimeter() {
    let ctx = AlphaContext::new(1, 0.5).unwrap();
    let s = Shape::interval(0.0, 1.0).unwrap();
    let v = frac_perimeter_indicator_seminorm(&s, &ctx, &PerimeterSpec::default()).unwrap();
    assert!((v.value - 16.0).abs() < 1e-8);
}

#[test]
fn lattice_square_matches_box() {
    use crate::geometry::LatticeSet;
    // a 4×4 block of cells inside a 6×6 lattice, as a union of 16 unit boxes
    let ext = vec![6usize, 6];
    let mut mask = vec![false; 36];
    let mut boxes = Vec::new();
    for i in 1..5 {
        for j in 1..5 {
            mask[i * 6 + j] = true;
            boxes.push(AxisBox::new(vec![i as f64 * 0.25, j as f64 * 0.25], vec![(i + 1) as f64 * 0.25, (j + 1) as f64 * 0.25]).unwrap());
        }
    }
    let lattice = LatticeSet::new(vec![0.0, 0.0], vec![0.25, 0.25], ext, mask);
    let s = Shape::lattice_union(boxes, lattice);
    let ctx = AlphaContext::new(2, 0.5).unwrap();
    let spec = PerimeterSpec::default();
    let p = frac_perimeter(&s, &ctx, &spec).unwrap();
    let b = frac_perimeter(&Shape::axis_box(vec![0.25, 0.25], vec![1.25, 1.25]).unwrap(), &ctx, &spec).unwrap();
    assert!((p.value - b.value).abs() < 1e-8 * b.value, "{p} vs {b}");
}
