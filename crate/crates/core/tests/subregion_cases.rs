use mimo_bounds::geometry::{make_canonical, plate_case, tag_subregions, GeometryParams, PlateCase, Resolution, Shape};
use mimo_bounds::operators::{BundleOptions, OperatorBundle};
use mimo_bounds::subregion::{all_region_labels, full_reference, partition, reduce_operators, subregion_modes};

fn plate_bundle(nx: usize, ny: usize) -> OperatorBundle {
    let mesh =
        make_canonical(&GeometryParams::new(Shape::Plate { length: 1.0, aspect: 0.5 }, Resolution::Grid { nx, ny }))
            .unwrap();
    OperatorBundle::assemble(mesh, &BundleOptions::new(0.56, 0.01)).unwrap()
}

fn normalized(bundle: &OperatorBundle, case: PlateCase, count: usize) -> Vec<f64> {
    let mut b = bundle.clone();
    b.mesh = tag_subregions(&bundle.mesh, &plate_case(case, 1.0, 0.5)).unwrap();
    let spec = partition(&b.mesh, &b.basis, &all_region_labels(&b.mesh)).unwrap();
    let red = reduce_operators(&b, &spec).unwrap();
    assert!(!red.resonance_suspected);
    let reference = full_reference(&b).unwrap();
    subregion_modes(&red, Some(count), reference).unwrap().normalized
}

#[test]
fn placement_cases_order_as_expected() {
    let bundle = plate_bundle(30, 20);
    let a = normalized(&bundle, PlateCase::A, 5);
    let b = normalized(&bundle, PlateCase::B, 5);
    let c = normalized(&bundle, PlateCase::C, 5);
    let e = normalized(&bundle, PlateCase::E, 5);
    // A single corner drives essentially one mode.
    assert!(a[1] < 0.01 * c[1], "{a:?} vs {c:?}");
    // Same-side pair: strong second mode; diagonal pair: stronger higher modes.
    assert!(c[1] > 10.0 * b[1], "{b:?} vs {c:?}");
    for n in 2..5 {
        assert!(b[n] > c[n], "mode {}: {b:?} vs {c:?}", n + 1);
    }
    // More regions never hurt.
    for n in 0..5 {
        assert!(e[n] >= b[n].max(c[n]) * (1.0 - 1e-9));
    }
}

#[test]
fn normalized_strengths_barely_depend_on_surface_resistance() {
    let bundle = plate_bundle(20, 10);
    let runs: Vec<Vec<f64>> = [0.001, 0.01, 0.1]
        .iter()
        .map(|&rs| normalized(&bundle.with_surface_resistance(rs).unwrap(), PlateCase::D, 3))
        .collect();
    for n in 0..3 {
        let lo = runs.iter().map(|r| r[n]).fold(f64::INFINITY, f64::min);
        let hi = runs.iter().map(|r| r[n]).fold(0.0, f64::max);
        assert!(hi / lo - 1.0 < 0.01, "mode {}: {lo} .. {hi}", n + 1);
    }
}
