//! Two realisations of the formal parameter `x`: a numeric point, and a
//! truncated power series. The nested-sum engines are generic over them.

use num_complex::Complex64 as C64;

use crate::series::{ln_gamma_series_unchecked, TruncatedSeries};
use crate::special::ln_gamma;
use crate::summation::ComplexSum;

pub(crate) trait XModel {
    type V: Clone;
    type Acc;

    fn constant(&self, c: C64) -> Self::V;
    /// `1/(c − x)`
    fn recip_linear(&self, c: C64) -> Self::V;
    /// `v · (c − x)`
    fn times_linear(&self, v: &Self::V, c: C64) -> Self::V;
    /// `v / (c − x)`
    fn over_linear(&self, v: &Self::V, c: C64) -> Self::V;
    /// `exp(fixed + Σ sign·lnΓ(c − x))`
    fn gamma_product(&self, shifted: &[(C64, f64)], fixed: C64) -> Self::V;
    fn mul(&self, a: &Self::V, b: &Self::V) -> Self::V;
    fn scale(&self, a: &Self::V, c: C64) -> Self::V;
    fn norm(&self, v: &Self::V) -> f64;
    fn coeffs<'a>(&self, v: &'a Self::V) -> &'a [C64];

    fn acc(&self) -> Self::Acc;
    fn push(&self, acc: &mut Self::Acc, v: &Self::V);
    fn total(&self, acc: &Self::Acc) -> Self::V;
}

/// `x` fixed at a complex number.
pub(crate) struct AtPoint(pub C64);

impl XModel for AtPoint {
    type V = C64;
    type Acc = ComplexSum;

    fn constant(&self, c: C64) -> C64 {
        c
    }
    #[inline]
    fn recip_linear(&self, c: C64) -> C64 {
        (c - self.0).inv()
    }
    #[inline]
    fn times_linear(&self, v: &C64, c: C64) -> C64 {
        v * (c - self.0)
    }
    #[inline]
    fn over_linear(&self, v: &C64, c: C64) -> C64 {
        v / (c - self.0)
    }
    fn gamma_product(&self, shifted: &[(C64, f64)], fixed: C64) -> C64 {
        shifted
            .iter()
            .fold(fixed, |acc, &(c, sign)| acc + ln_gamma(c - self.0) * sign)
            .exp()
    }
    #[inline]
    fn mul(&self, a: &C64, b: &C64) -> C64 {
        a * b
    }
    #[inline]
    fn scale(&self, a: &C64, c: C64) -> C64 {
        a * c
    }
    #[inline]
    fn norm(&self, v: &C64) -> f64 {
        v.norm()
    }
    fn coeffs<'a>(&self, v: &'a C64) -> &'a [C64] {
        std::slice::from_ref(v)
    }
    fn acc(&self) -> ComplexSum {
        ComplexSum::new()
    }
    #[inline]
    fn push(&self, acc: &mut ComplexSum, v: &C64) {
        acc.add(*v);
    }
    fn total(&self, acc: &ComplexSum) -> C64 {
        acc.total()
    }
}

/// `x` kept formal, truncated at the given degree.
pub(crate) struct AsSeries(pub usize);

impl XModel for AsSeries {
    type V = TruncatedSeries;
    type Acc = Vec<ComplexSum>;

    fn constant(&self, c: C64) -> TruncatedSeries {
        TruncatedSeries::constant(c, self.0)
    }
    fn recip_linear(&self, c: C64) -> TruncatedSeries {
        TruncatedSeries::one(self.0).over_linear(c)
    }
    fn times_linear(&self, v: &TruncatedSeries, c: C64) -> TruncatedSeries {
        v.times_linear(c)
    }
    fn over_linear(&self, v: &TruncatedSeries, c: C64) -> TruncatedSeries {
        v.over_linear(c)
    }
    fn gamma_product(&self, shifted: &[(C64, f64)], fixed: C64) -> TruncatedSeries {
        let mut log = TruncatedSeries::constant(fixed, self.0);
        for &(c, sign) in shifted {
            log = &log + &ln_gamma_series_unchecked(c, self.0).scale(C64::new(sign, 0.0));
        }
        log.exp()
    }
    fn mul(&self, a: &TruncatedSeries, b: &TruncatedSeries) -> TruncatedSeries {
        a * b
    }
    fn scale(&self, a: &TruncatedSeries, c: C64) -> TruncatedSeries {
        a.scale(c)
    }
    fn norm(&self, v: &TruncatedSeries) -> f64 {
        v.max_norm()
    }
    fn coeffs<'a>(&self, v: &'a TruncatedSeries) -> &'a [C64] {
        v.coeffs()
    }
    fn acc(&self) -> Vec<ComplexSum> {
        vec![ComplexSum::new(); self.0 + 1]
    }
    fn push(&self, acc: &mut Vec<ComplexSum>, v: &TruncatedSeries) {
        for (a, &c) in acc.iter_mut().zip(v.coeffs()) {
            a.add(c);
        }
    }
    fn total(&self, acc: &Vec<ComplexSum>) -> TruncatedSeries {
        let mut s = TruncatedSeries::zero(self.0);
        for (dst, a) in s.coeffs_mut().iter_mut().zip(acc) {
            *dst = a.total();
        }
        s
    }
}
