use fracap_core::geometry::{disk_oracle, AxisBox};
use fracap_core::numerics::McSpec;
use fracap_core::perimeter::{frac_perimeter, PerimeterMethod, PerimeterSpec};
use fracap_core::{AlphaContext, Shape};

fn mc(shape: &Shape, n: usize, a: f64, workers: usize) -> (u64, u64) {
    let spec = PerimeterSpec::default()
        .with_method(PerimeterMethod::MonteCarlo)
        .with_mc(McSpec::new(60_000, 42).with_workers(workers));
    let e = frac_perimeter(shape, &AlphaContext::new(n, a).unwrap(), &spec).unwrap();
    (e.value.to_bits(), e.error.to_bits())
}

#[test]
fn mc_is_bit_identical_across_worker_counts() {
    let bbox = AxisBox::new(vec![-1.0, -1.0], vec![1.0, 1.0]).unwrap();
    let shapes = [
        (Shape::unit_ball(2).unwrap(), 2),
        (Shape::axis_box(vec![0.0; 3], vec![1.0; 3]).unwrap(), 3),
        (Shape::indicator(disk_oracle(1.0), bbox, None, "disk").unwrap(), 2),
    ];
    for (s, n) in &shapes {
        let one = mc(s, *n, 0.5, 1);
        assert_eq!(one, mc(s, *n, 0.5, 2), "{}", s.describe());
        assert_eq!(one, mc(s, *n, 0.5, 8), "{}", s.describe());
    }
}

#[test]
fn seeds_change_the_estimate() {
    let s = Shape::unit_ball(2).unwrap();
    let c = AlphaContext::new(2, 0.5).unwrap();
    let run = |seed| {
        let spec = PerimeterSpec::default().with_method(PerimeterMethod::MonteCarlo).with_mc(McSpec::new(20_000, seed));
        frac_perimeter(&s, &c, &spec).unwrap().value
    };
    assert_eq!(run(1).to_bits(), run(1).to_bits());
    assert_ne!(run(1).to_bits(), run(2).to_bits());
}
