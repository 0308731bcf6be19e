//! Truncated power series in the formal variable `x` with complex
//! coefficients.
//!
//! Binary operations on operands of different degree truncate to the smaller
//! degree. Division is `inv` followed by `mul`.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64 as C64;

use crate::special::{self, ln_gamma, psi};
use crate::{Error, Result};

pub const DEFAULT_DEGREE: usize = 8;
pub const MAX_DEGREE: usize = 16;

pub(crate) fn check_degree(degree: usize) -> Result<()> {
    if degree > MAX_DEGREE {
        Err(Error::Cap {
            what: "series degree",
            value: degree as u64,
            cap: MAX_DEGREE as u64,
        })
    } else {
        Ok(())
    }
}

/// `c₀ + c₁x + … + c_D x^D`, always holding exactly `D + 1` coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct TruncatedSeries {
    coeffs: Vec<C64>,
}

impl TruncatedSeries {
    pub fn zero(degree: usize) -> Self {
        Self::constant(C64::new(0.0, 0.0), degree)
    }

    pub fn one(degree: usize) -> Self {
        Self::constant(C64::new(1.0, 0.0), degree)
    }

    pub fn constant(c: C64, degree: usize) -> Self {
        let mut coeffs = vec![C64::new(0.0, 0.0); degree + 1];
        coeffs[0] = c;
        TruncatedSeries { coeffs }
    }

    /// The series `x` itself (degree ≥ 1) or `0` at degree 0.
    pub fn variable(degree: usize) -> Self {
        let mut s = Self::zero(degree);
        if degree >= 1 {
            s.coeffs[1] = C64::new(1.0, 0.0);
        }
        s
    }

    pub fn from_coeffs(coeffs: Vec<C64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::domain("a series needs at least one coefficient"));
        }
        check_degree(coeffs.len() - 1)?;
        Ok(TruncatedSeries { coeffs })
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn coeff(&self, e: usize) -> C64 {
        self.coeffs[e]
    }

    /// Evaluates the polynomial at a numeric `x`.
    pub fn eval(&self, x: C64) -> C64 {
        self.coeffs
            .iter()
            .rev()
            .fold(C64::new(0.0, 0.0), |acc, &c| acc * x + c)
    }

    pub fn truncate(&self, degree: usize) -> Self {
        let d = degree.min(self.degree());
        TruncatedSeries {
            coeffs: self.coeffs[..=d].to_vec(),
        }
    }

    pub fn scale(&self, c: C64) -> Self {
        TruncatedSeries {
            coeffs: self.coeffs.iter().map(|&a| a * c).collect(),
        }
    }

    /// Largest coefficient modulus.
    pub fn max_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn exp(&self) -> Self {
        let d = self.degree();
        let g = &self.coeffs;
        let mut f = vec![C64::new(0.0, 0.0); d + 1];
        f[0] = g[0].exp();
        for n in 1..=d {
            let mut acc = C64::new(0.0, 0.0);
            for k in 1..=n {
                acc += g[k] * f[n - k] * k as f64;
            }
            f[n] = acc / n as f64;
        }
        TruncatedSeries { coeffs: f }
    }

    pub fn ln(&self) -> Result<Self> {
        let f = &self.coeffs;
        if f[0] == C64::new(0.0, 0.0) {
            return Err(Error::domain("log of a series with zero constant term"));
        }
        let d = self.degree();
        let mut g = vec![C64::new(0.0, 0.0); d + 1];
        g[0] = f[0].ln();
        for n in 1..=d {
            let mut acc = C64::new(0.0, 0.0);
            for k in 1..n {
                acc += g[k] * f[n - k] * k as f64;
            }
            g[n] = (f[n] - acc / n as f64) / f[0];
        }
        Ok(TruncatedSeries { coeffs: g })
    }

    pub fn inv(&self) -> Result<Self> {
        let f = &self.coeffs;
        if f[0] == C64::new(0.0, 0.0) {
            return Err(Error::domain("reciprocal of a series with zero constant term"));
        }
        let d = self.degree();
        let inv0 = f[0].inv();
        let mut h = vec![C64::new(0.0, 0.0); d + 1];
        h[0] = inv0;
        for n in 1..=d {
            let mut acc = C64::new(0.0, 0.0);
            for k in 1..=n {
                acc += f[k] * h[n - k];
            }
            h[n] = -acc * inv0;
        }
        Ok(TruncatedSeries { coeffs: h })
    }

    pub fn try_div(&self, rhs: &Self) -> Result<Self> {
        Ok(self * &rhs.inv()?)
    }

    /// `self · (c − x)`.
    pub fn times_linear(&self, c: C64) -> Self {
        let mut out = Vec::with_capacity(self.coeffs.len());
        let mut prev = C64::new(0.0, 0.0);
        for &a in &self.coeffs {
            out.push(a * c - prev);
            prev = a;
        }
        TruncatedSeries { coeffs: out }
    }

    /// `self / (c − x)`; `c` must be nonzero.
    pub(crate) fn over_linear(&self, c: C64) -> Self {
        let inv = c.inv();
        let mut out = Vec::with_capacity(self.coeffs.len());
        let mut prev = C64::new(0.0, 0.0);
        for &a in &self.coeffs {
            prev = (a + prev) * inv;
            out.push(prev);
        }
        TruncatedSeries { coeffs: out }
    }

    pub(crate) fn coeffs_mut(&mut self) -> &mut [C64] {
        &mut self.coeffs
    }
}

fn zip_with(a: &TruncatedSeries, b: &TruncatedSeries, f: impl Fn(C64, C64) -> C64) -> TruncatedSeries {
    TruncatedSeries {
        coeffs: a.coeffs.iter().zip(&b.coeffs).map(|(&x, &y)| f(x, y)).collect(),
    }
}

impl Add for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn add(self, rhs: Self) -> TruncatedSeries {
        zip_with(self, rhs, |a, b| a + b)
    }
}

impl Sub for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn sub(self, rhs: Self) -> TruncatedSeries {
        zip_with(self, rhs, |a, b| a - b)
    }
}

impl Mul for &TruncatedSeries {
    type Output = TruncatedSeries;
    /// Cauchy product truncated at the smaller degree.
    fn mul(self, rhs: Self) -> TruncatedSeries {
        let d = self.degree().min(rhs.degree());
        let (a, b) = (&self.coeffs, &rhs.coeffs);
        let coeffs = (0..=d)
            .map(|n| (0..=n).map(|k| a[k] * b[n - k]).sum())
            .collect();
        TruncatedSeries { coeffs }
    }
}

impl Mul<C64> for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn mul(self, rhs: C64) -> TruncatedSeries {
        self.scale(rhs)
    }
}

impl Neg for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn neg(self) -> TruncatedSeries {
        self.scale(C64::new(-1.0, 0.0))
    }
}

macro_rules! forward_owned {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr for TruncatedSeries {
            type Output = TruncatedSeries;
            fn $m(self, rhs: Self) -> TruncatedSeries {
                (&self).$m(&rhs)
            }
        }
    )*};
}
forward_owned!(Add add, Sub sub, Mul mul);

/// `1/(c − x) = Σ_{e ≤ D} x^e / c^{e+1}`.
pub fn reciprocal_linear(c: C64, degree: usize) -> Result<TruncatedSeries> {
    check_degree(degree)?;
    if c == C64::new(0.0, 0.0) {
        return Err(Error::domain("reciprocal_linear needs c ≠ 0"));
    }
    let inv = c.inv();
    let mut pow = inv;
    let coeffs = (0..=degree)
        .map(|_| {
            let v = pow;
            pow *= inv;
            v
        })
        .collect();
    Ok(TruncatedSeries { coeffs })
}

pub(crate) fn ln_gamma_series_unchecked(c: C64, degree: usize) -> TruncatedSeries {
    let mut coeffs = Vec::with_capacity(degree + 1);
    coeffs.push(ln_gamma(c));
    let mut fact = 1.0;
    for j in 1..=degree {
        fact *= j as f64;
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        coeffs.push(psi(j as u32 - 1, c) * (sign / fact));
    }
    TruncatedSeries { coeffs }
}

/// Taylor expansion of `lnΓ(c − x)` about `x = 0`:
/// coefficient `j ≥ 1` is `(−1)^j ψ^{(j−1)}(c) / j!`.
pub fn log_gamma_series(c: C64, degree: usize) -> Result<TruncatedSeries> {
    check_degree(degree)?;
    special::log_gamma(c)?;
    Ok(ln_gamma_series_unchecked(c, degree))
}

/// Expansion in `x` of `Γ(m+α−x+1) Γ(n+α−x+1) / Γ(m+n+2α−x+1)`.
pub fn connector_series(m: i64, n: i64, alpha: C64, degree: usize) -> Result<TruncatedSeries> {
    check_degree(degree)?;
    special::check_connector_domain(m as f64, n as f64, alpha, C64::new(0.0, 0.0))?;
    let (mf, nf) = (m as f64, n as f64);
    let log = &(&ln_gamma_series_unchecked(alpha + mf + 1.0, degree)
        + &ln_gamma_series_unchecked(alpha + nf + 1.0, degree))
        - &ln_gamma_series_unchecked(alpha * 2.0 + (mf + nf + 1.0), degree);
    Ok(log.exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::{connector, log_gamma};
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn series(coeffs: &[(f64, f64)]) -> TruncatedSeries {
        TruncatedSeries::from_coeffs(coeffs.iter().map(|&(r, i)| c(r, i)).collect()).unwrap()
    }

    fn max_diff(a: &TruncatedSeries, b: &TruncatedSeries) -> f64 {
        (a - b).max_norm()
    }

    #[test]
    fn arithmetic_examples() {
        let p = series(&[(1.0, 0.0), (1.0, 0.0), (0.0, 0.0)]);
        let q = series(&[(1.0, 0.0), (-1.0, 0.0), (0.0, 0.0)]);
        assert_eq!(&p * &q, series(&[(1.0, 0.0), (0.0, 0.0), (-1.0, 0.0)]));
        assert_eq!(&p + &TruncatedSeries::zero(2), p);
        // Mixed degrees truncate.
        let r = &p * &TruncatedSeries::one(1);
        assert_eq!(r.degree(), 1);
    }

    #[test]
    fn exp_log_inv_examples() {
        assert_eq!(TruncatedSeries::zero(4).exp(), TruncatedSeries::one(4));
        let one_minus_x = series(&[(1.0, 0.0), (-1.0, 0.0), (0.0, 0.0), (0.0, 0.0)]);
        assert_eq!(one_minus_x.inv().unwrap(), series(&[(1.0, 0.0); 4]));
        assert!(TruncatedSeries::variable(3).ln().is_err());
        assert!(TruncatedSeries::variable(3).inv().is_err());
    }

    #[test]
    fn linear_helpers() {
        let s = series(&[(0.3, 0.1), (-1.2, 0.0), (0.7, 2.0), (1.0, -1.0)]);
        let cc = c(1.7, -0.4);
        let back = s.over_linear(cc).times_linear(cc);
        assert!(max_diff(&back, &s) < 1e-14);
        let via_div = &s * &reciprocal_linear(cc, 3).unwrap();
        assert!(max_diff(&s.over_linear(cc), &via_div) < 1e-14);
    }

    #[test]
    fn reciprocal_linear_examples() {
        assert_eq!(reciprocal_linear(c(1.0, 0.0), 2).unwrap(), series(&[(1.0, 0.0); 3]));
        assert_eq!(
            reciprocal_linear(c(2.0, 0.0), 2).unwrap(),
            series(&[(0.5, 0.0), (0.25, 0.0), (0.125, 0.0)])
        );
        let cc = c(0.8, 0.3);
        let prod = reciprocal_linear(cc, 6).unwrap().times_linear(cc);
        assert!(max_diff(&prod, &TruncatedSeries::one(6)) < 1e-14);
        assert!(reciprocal_linear(c(0.0, 0.0), 2).is_err());
        assert!(reciprocal_linear(c(1.0, 0.0), 17).is_err());
    }

    #[test]
    fn log_gamma_series_examples() {
        let s = log_gamma_series(c(1.0, 0.0), 8).unwrap();
        assert!((s.coeff(1) - c(0.577_215_664_901_532_9, 0.0)).norm() < 1e-14);
        // x² coefficient is ψ′(1)/2 = π²/12
        let pi2 = std::f64::consts::PI.powi(2);
        assert!((s.coeff(2) - c(pi2 / 12.0, 0.0)).norm() < 1e-14);
        let s2 = log_gamma_series(c(2.0, 0.0), 8).unwrap();
        assert_eq!(s2.coeff(0), c(0.0, 0.0));
        let s3 = log_gamma_series(c(3.0, 0.0), 8).unwrap();
        let direct = log_gamma(c(2.9, 0.0)).unwrap();
        assert!((s3.eval(c(0.1, 0.0)) - direct).norm() < 1e-8);
        assert!(log_gamma_series(c(-1.0, 0.0), 4).is_err());
    }

    #[test]
    fn connector_series_examples() {
        let one = c(1.0, 0.0);
        let s = connector_series(0, 0, one, 8).unwrap();
        assert!((s.coeff(0) - c(0.5, 0.0)).norm() < 1e-15);
        let a = connector_series(2, 5, c(0.8, 0.3), 8).unwrap();
        let b = connector_series(5, 2, c(0.8, 0.3), 8).unwrap();
        assert!(max_diff(&a, &b) < 1e-15);
        let alpha = c(1.5, 0.0);
        let s = connector_series(1, 1, alpha, 8).unwrap();
        let x = c(0.2, 0.0);
        assert!((s.eval(x) - connector(1, 1, alpha, x).unwrap()).norm() < 1e-8);
    }

    #[test]
    fn builders_agree_with_pointwise_values() {
        let d = 8;
        for &alpha in &[c(1.0, 0.0), c(1.5, 0.0), c(0.8, 0.3)] {
            for &x in &[c(0.05, 0.0), c(0.1, 0.0)] {
                let cc = alpha + 1.0;
                let rl = reciprocal_linear(cc, d).unwrap().eval(x);
                assert!((rl - (cc - x).inv()).norm() < 1e-7);
                let lg = log_gamma_series(cc, d).unwrap().eval(x);
                assert!((lg - log_gamma(cc - x).unwrap()).norm() < 1e-7);
                for &(m, n) in &[(0, 0), (1, 3), (-1, 2), (5, 0)] {
                    let cs = connector_series(m, n, alpha, d).unwrap().eval(x);
                    let pt = connector(m, n, alpha, x).unwrap();
                    assert!((cs - pt).norm() < 1e-7, "m={m} n={n} α={alpha} x={x}");
                }
            }
        }
    }

    fn arb_series(degree: usize) -> impl Strategy<Value = TruncatedSeries> {
        prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), degree + 1).prop_map(|v| {
            TruncatedSeries::from_coeffs(v.into_iter().map(|(r, i)| C64::new(r, i)).collect())
                .unwrap()
        })
    }

    proptest! {
        #[test]
        fn ring_axioms(a in arb_series(8), b in arb_series(8), s in arb_series(8)) {
            prop_assert!(max_diff(&(&(&a * &b) * &s), &(&a * &(&b * &s))) < 1e-12);
            prop_assert!(max_diff(&(&a * &(&b + &s)), &(&(&a * &b) + &(&a * &s))) < 1e-12);
            prop_assert!(max_diff(&(&a * &b), &(&b * &a)) < 1e-14);
        }

        #[test]
        fn exp_log_roundtrip(a in arb_series(8)) {
            // |Im c₀| < 1 keeps log(exp(s)) on the principal branch.
            prop_assert!(max_diff(&a.exp().ln().unwrap(), &a) < 1e-12);
            let mut shifted = a.clone();
            shifted.coeffs_mut()[0] = C64::new(a.coeff(0).re + 1.5, a.coeff(0).im);
            prop_assert!(max_diff(&shifted.ln().unwrap().exp(), &shifted) < 1e-12);
        }

        #[test]
        fn inverse_is_inverse(a in arb_series(8)) {
            let mut b = a.clone();
            b.coeffs_mut()[0] = C64::new(2.0 + a.coeff(0).re, a.coeff(0).im);
            let prod = &b * &b.inv().unwrap();
            prop_assert!(max_diff(&prod, &TruncatedSeries::one(8)) < 1e-12);
        }

        #[test]
        fn degree_is_stable(d1 in 0usize..=16, d2 in 0usize..=16) {
            let a = TruncatedSeries::one(d1);
            let b = TruncatedSeries::variable(d2);
            let lo = d1.min(d2);
            prop_assert_eq!((&a + &b).coeffs().len(), lo + 1);
            prop_assert_eq!((&a * &b).coeffs().len(), lo + 1);
            prop_assert_eq!(a.exp().coeffs().len(), d1 + 1);
            prop_assert_eq!(a.inv().unwrap().coeffs().len(), d1 + 1);
            prop_assert_eq!(a.over_linear(C64::new(2.0, 0.0)).coeffs().len(), d1 + 1);
        }
    }
}
