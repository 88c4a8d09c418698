mod common;

use common::{random_dataset, rng};
use drx_core::interactions::ConstraintSet;
use drx_core::pca::{fit_pca, PcaConfig};
use proptest::prelude::*;
use rand::Rng;

#[test]
fn out_of_sample_forward_is_exact() {
    let ds = random_dataset(100, 10, 5);
    let m = fit_pca(&ds, &PcaConfig::default()).unwrap();
    let mut r = rng(6);
    for _ in 0..200 {
        let x: Vec<f64> = ds.row(r.random_range(0..100)).to_vec();
        let dx: Vec<f64> = (0..10).map(|_| r.random_range(-3.0..3.0)).collect();
        let moved: Vec<f64> = x.iter().zip(&dx).map(|(a, b)| a + b).collect();
        let a = m.project(&moved).unwrap();
        let b = m.project(&x).unwrap();
        let f = m.forward(&dx).unwrap();
        assert!((a[0] - b[0] - f[0]).abs() < 1e-10 && (a[1] - b[1] - f[1]).abs() < 1e-10);
    }
}

#[test]
fn unstandardized_fit_is_also_linear() {
    let ds = random_dataset(50, 6, 9);
    let m = fit_pca(&ds, &PcaConfig { standardize: false, ..PcaConfig::default() }).unwrap();
    assert!(m.scale().iter().all(|&s| s == 1.0));
    let dy = [0.4, -0.2];
    let dx = m.backward(dy).unwrap();
    let back = m.forward(&dx).unwrap();
    assert!((back[0] - dy[0]).abs() < 1e-12 && (back[1] - dy[1]).abs() < 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn loosening_bounds_never_raises_the_residual(
        seed in 0u64..1000,
        point in 0usize..40,
        y0 in -3.0f64..3.0,
        y1 in -3.0f64..3.0,
        width in 0.0f64..2.0,
        extra in 0.0f64..2.0,
    ) {
        let ds = random_dataset(40, 5, seed);
        let m = fit_pca(&ds, &PcaConfig::default()).unwrap();
        let x = ds.row(point);
        let mut tight = ConstraintSet::unconstrained(5);
        tight.lock(0, x[0]).set_bounds(1, x[1] - width, x[1] + width).set_upper(3, x[3] + width);
        let mut loose = ConstraintSet::unconstrained(5);
        loose.lock(0, x[0]).set_bounds(1, x[1] - width - extra, x[1] + width + extra).set_upper(3, x[3] + width + extra);
        let cfg = PcaConfig::default();
        let t = m.backward_constrained([y0, y1], &tight, x, &cfg).unwrap();
        let l = m.backward_constrained([y0, y1], &loose, x, &cfg).unwrap();
        prop_assert!(l.residual <= t.residual + 1e-7, "{} > {}", l.residual, t.residual);
        prop_assert_eq!(t.delta_x[0], 0.0);
        prop_assert!(t.delta_x[1].abs() <= width + 1e-12);
    }

    #[test]
    fn backward_then_forward_round_trips(seed in 0u64..1000, y0 in -5.0f64..5.0, y1 in -5.0f64..5.0) {
        let ds = random_dataset(30, 7, seed);
        let m = fit_pca(&ds, &PcaConfig::default()).unwrap();
        let dx = m.backward([y0, y1]).unwrap();
        let y = m.forward(&dx).unwrap();
        prop_assert!((y[0] - y0).abs() < 1e-10 && (y[1] - y1).abs() < 1e-10);
    }
}
