use chernoff_web::{argmax_histogram_values, density_values, h_values};

#[test]
fn chernoff_curve_is_symmetric_with_known_peak() {
    let v = density_values("chernoff", -1.0, 1.0, 21).unwrap();
    assert_eq!(v.len(), 21);
    assert!((v[10] - 0.75834455805373591).abs() < 1e-10);
    for i in 0..10 {
        assert!((v[i] - v[20 - i]).abs() < 1e-12);
    }
}

#[test]
fn max_curve_matches_reference() {
    let v = density_values("max", 0.5, 1.0, 2).unwrap();
    assert!((v[1] - 0.632085654754798).abs() < 1e-8);
}

#[test]
fn bad_inputs_are_errors() {
    assert!(density_values("nope", 0.0, 1.0, 5).is_err());
    assert!(density_values("phi", 1.0, 0.0, 5).is_err());
    assert!(h_values(0.5, 1.0, 10).is_err());
    assert!(argmax_histogram_values(0, 1, 0.1, 10).is_err());
}

#[test]
fn h_curve_reference_point() {
    let v = h_values(-1.0, 1.0, 2).unwrap();
    assert!((v[0] - 0.21070975915996734).abs() < 1e-12);
}

#[test]
fn histogram_is_a_density_and_deterministic() {
    let a = argmax_histogram_values(2000, 3, 0.1, 60).unwrap();
    let b = argmax_histogram_values(2000, 3, 0.1, 60).unwrap();
    assert_eq!(a, b);
    let mass: f64 = a.iter().sum::<f64>() * 0.1;
    assert!(mass > 0.98 && mass <= 1.0 + 1e-12, "{mass}");
}
