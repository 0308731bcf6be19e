use num_complex::Complex64 as C64;
use proptest::prelude::*;

use pmzs::series::TruncatedSeries;
use pmzs::special::{connector, gauss_ratio, log_gamma, pochhammer_ratio, polygamma};

fn grid() -> Vec<C64> {
    let res = [0.05, 0.3, 0.7, 1.0, 1.9, 3.3, 6.0, 11.5, 19.0, 42.0];
    let ims = [-30.0, -8.0, -2.5, -0.6, 0.0, 0.4, 1.7, 5.0, 13.0, 60.0];
    res.iter()
        .flat_map(|&re| ims.iter().map(move |&im| C64::new(re, im)))
        .collect()
}

#[test]
fn log_gamma_recurrence_on_hundred_points() {
    let pts = grid();
    assert_eq!(pts.len(), 100);
    for z in pts {
        let lhs = log_gamma(z + 1.0).unwrap();
        let rhs = log_gamma(z).unwrap() + z.ln();
        assert!((lhs - rhs).norm() <= 1e-11, "z = {z}: {:e}", (lhs - rhs).norm());
    }
}

#[test]
fn digamma_is_derivative_of_log_gamma() {
    let h = 1e-5;
    for z in grid() {
        let fd = (log_gamma(z + h).unwrap() - log_gamma(z - h).unwrap()) / (2.0 * h);
        if (z - h).re <= 0.0 {
            continue;
        }
        let psi = polygamma(0, z).unwrap();
        assert!((fd - psi).norm() <= 1e-6 * psi.norm().max(1.0), "z = {z}");
    }
}

#[test]
fn trigamma_is_derivative_of_digamma() {
    let h = 1e-5;
    for z in grid() {
        if (z - h).re <= 0.0 || z.norm() < 0.2 {
            continue;
        }
        let fd = (polygamma(0, z + h).unwrap() - polygamma(0, z - h).unwrap()) / (2.0 * h);
        let psi1 = polygamma(1, z).unwrap();
        assert!((fd - psi1).norm() <= 1e-6 * psi1.norm().max(1.0), "z = {z}");
    }
}

#[test]
fn pochhammer_ratio_product_and_log_paths_agree() {
    // m = 32 uses the product, m = 33 the log-gamma route.
    let alpha = C64::new(0.7, 0.3);
    let p32 = pochhammer_ratio(alpha, 32).unwrap();
    let p33 = pochhammer_ratio(alpha, 33).unwrap();
    let step = (alpha + 32.0) / 33.0;
    assert!((p33 - p32 * step).norm() <= 1e-13 * p33.norm());
}

#[test]
fn connector_examples() {
    let one = C64::new(1.0, 0.0);
    let zero = C64::new(0.0, 0.0);
    // (m+1)!(n+1)!/(m+n+2)! at α = 1, x = 0
    assert!((connector(0, 0, one, zero).unwrap() - 0.5).norm() < 1e-15);
    assert!((connector(2, 1, one, zero).unwrap() - 12.0 / 120.0).norm() < 1e-15);
    // sentinel: Γ(α−x)Γ(α−x+1)/Γ(2α−x)
    assert!((connector(-1, 0, one, zero).unwrap() - 1.0).norm() < 1e-15);
    assert!(connector(-2, 0, one, zero).is_err());
    assert!(connector(0, 0, one, C64::new(1.0, 0.0)).is_err());
}

#[test]
fn gauss_ratio_trivial_parameters() {
    let c = C64::new(2.5, 0.5);
    assert_eq!(gauss_ratio(C64::new(0.0, 0.0), C64::new(0.7, 0.0), c).unwrap(), C64::new(1.0, 0.0));
    assert!(gauss_ratio(C64::new(2.0, 0.0), C64::new(1.0, 0.0), c).is_err());
}

fn arb_alpha() -> impl Strategy<Value = C64> {
    (0.05f64..4.0, -3.0f64..3.0).prop_map(|(re, im)| C64::new(re, im))
}

proptest! {
    #[test]
    fn connector_is_symmetric(m in -1i64..400, n in -1i64..400, alpha in arb_alpha(), xr in -0.5f64..0.5, xi in -0.5f64..0.5) {
        let x = C64::new(xr, xi);
        prop_assume!((alpha - x).re > 0.0 && (m >= 0 || n >= 0));
        prop_assert_eq!(connector(m, n, alpha, x).unwrap(), connector(n, m, alpha, x).unwrap());
    }

    #[test]
    fn log_gamma_conjugate(re in 0.01f64..50.0, im in -50.0f64..50.0) {
        let z = C64::new(re, im);
        let d = log_gamma(z.conj()).unwrap() - log_gamma(z).unwrap().conj();
        prop_assert!(d.norm() <= 1e-12 * (1.0 + log_gamma(z).unwrap().norm()));
    }

    #[test]
    fn exp_log_roundtrip_per_coefficient(coeffs in prop::collection::vec((-2.0f64..2.0, -0.9f64..0.9), 1..=17)) {
        let mut v: Vec<C64> = coeffs.into_iter().map(|(r, i)| C64::new(r, i)).collect();
        v[0].re += 3.0;
        let s = TruncatedSeries::from_coeffs(v).unwrap();
        let back = s.ln().unwrap().exp();
        for (a, b) in back.coeffs().iter().zip(s.coeffs()) {
            prop_assert!((a - b).norm() <= 1e-12 * b.norm().max(1.0));
        }
    }
}
