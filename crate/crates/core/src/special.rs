//! Complex special functions on the right half-plane.
//!
//! Log-gamma and polygamma shift the argument upward with the functional
//! recurrence until `|z| ≥ 20` and then use the Stirling series with
//! Bernoulli numbers `B₂ … B₃₀`. Every Γ-ratio is formed as `exp` of a sum of
//! log-gammas, never as a quotient of Γ values.

use num_complex::Complex64 as C64;

use crate::{Error, Result};

/// `B₂, B₄, …, B₃₀`.
pub(crate) const BERNOULLI_EVEN: [f64; 15] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
    854513.0 / 138.0,
    -236364091.0 / 2730.0,
    8553103.0 / 6.0,
    -23749461029.0 / 870.0,
    8615841276005.0 / 14322.0,
];

const SHIFT_THRESHOLD: f64 = 20.0;
const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;

/// Above this distance from the origin, differences of log-gammas are taken
/// from the asymptotic form to avoid cancelling two huge numbers.
const RATIO_ASYMPTOTIC_FROM: f64 = 1.0e3;

/// Highest polygamma order accepted (twice the series degree cap).
pub const MAX_POLYGAMMA_ORDER: u32 = 32;

fn require_right_half(z: C64, what: &str) -> Result<()> {
    if z.re > 0.0 && z.re.is_finite() && z.im.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!(
            "{what} needs Re z > 0, got {}",
            crate::literal::format_complex(z)
        )))
    }
}

/// Tail of the Stirling series, `Σ B_{2k} / (2k(2k−1) z^{2k−1})`.
fn stirling_tail(z: C64) -> C64 {
    let inv = z.inv();
    let inv2 = inv * inv;
    let mut pow = inv;
    let mut acc = C64::new(0.0, 0.0);
    for (i, b) in BERNOULLI_EVEN.iter().enumerate() {
        let k = (i + 1) as f64;
        let term = pow * (b / (2.0 * k * (2.0 * k - 1.0)));
        acc += term;
        if term.norm() < 1e-18 * acc.norm() {
            break;
        }
        pow *= inv2;
    }
    acc
}

/// Principal log-gamma, assuming `Re z > 0`.
pub(crate) fn ln_gamma(z: C64) -> C64 {
    if z.im == 0.0 && (z.re == 1.0 || z.re == 2.0) {
        return C64::new(0.0, 0.0);
    }
    let mut z = z;
    let mut shift = C64::new(0.0, 0.0);
    while z.norm() < SHIFT_THRESHOLD {
        shift += z.ln();
        z += 1.0;
    }
    (z - 0.5) * z.ln() - z + HALF_LN_2PI + stirling_tail(z) - shift
}

pub fn log_gamma(z: C64) -> Result<C64> {
    require_right_half(z, "log_gamma")?;
    Ok(ln_gamma(z))
}

/// `ln(1 + w)` without losing the digits of a small `w`.
fn ln_1p(w: C64) -> C64 {
    let re = 0.5 * (2.0 * w.re + w.re * w.re + w.im * w.im).ln_1p();
    let im = w.im.atan2(1.0 + w.re);
    C64::new(re, im)
}

/// `lnΓ(t + a) − lnΓ(t + b)` for real `t`, stable when `t` is large.
pub(crate) fn ln_gamma_diff(t: f64, a: C64, b: C64) -> C64 {
    if t < RATIO_ASYMPTOTIC_FROM || t < 10.0 * (a.norm() + b.norm()) {
        return ln_gamma(a + t) - ln_gamma(b + t);
    }
    let la = ln_1p(a / t);
    let lb = ln_1p(b / t);
    (a - b) * t.ln() + (la - lb) * (t - 0.5) + a * la - b * lb - (a - b)
        + (stirling_tail(a + t) - stirling_tail(b + t))
}

/// Asymptotic expansion of `ψ^{(j)}(z)` for large `|z|`.
fn polygamma_asymptotic(j: u32, z: C64) -> C64 {
    let inv = z.inv();
    let inv2 = inv * inv;
    if j == 0 {
        let mut acc = z.ln() - inv * 0.5;
        let mut pow = inv2;
        for (i, b) in BERNOULLI_EVEN.iter().enumerate() {
            let k = (i + 1) as f64;
            acc -= pow * (b / (2.0 * k));
            pow *= inv2;
        }
        return acc;
    }
    let jf = f64::from(j);
    let fact_jm1: f64 = (1..j).map(f64::from).product();
    let inv_pow_j = inv.powu(j);
    let mut acc = inv_pow_j * fact_jm1 + inv_pow_j * inv * (fact_jm1 * jf * 0.5);
    // (2k+j−1)!/(2k)!, updated as k grows.
    let mut pow = inv_pow_j * inv2;
    for (i, b) in BERNOULLI_EVEN.iter().enumerate() {
        let k2 = 2 * (i as u32 + 1);
        let rising: f64 = (k2 + 1..k2 + j).map(f64::from).product();
        let term = pow * (b * rising);
        acc += term;
        if term.norm() < 1e-18 * acc.norm() {
            break;
        }
        pow *= inv2;
    }
    if j % 2 == 0 {
        -acc
    } else {
        acc
    }
}

pub(crate) fn psi(j: u32, z: C64) -> C64 {
    let mut z = z;
    let mut shift = C64::new(0.0, 0.0);
    while z.norm() < SHIFT_THRESHOLD {
        shift += z.inv().powu(j + 1);
        z += 1.0;
    }
    let fact_j: f64 = (1..=j).map(f64::from).product();
    let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
    polygamma_asymptotic(j, z) - shift * (sign * fact_j)
}

/// Polygamma `ψ^{(j)}(z)`; `j = 0` is the digamma function.
pub fn polygamma(j: u32, z: C64) -> Result<C64> {
    require_right_half(z, "polygamma")?;
    if j > MAX_POLYGAMMA_ORDER {
        return Err(Error::Cap {
            what: "polygamma order",
            value: u64::from(j),
            cap: u64::from(MAX_POLYGAMMA_ORDER),
        });
    }
    Ok(psi(j, z))
}

const POCHHAMMER_PRODUCT_MAX: u64 = 32;

/// `(α)_m / m!`.
pub fn pochhammer_ratio(alpha: C64, m: u64) -> Result<C64> {
    require_right_half(alpha, "pochhammer_ratio")?;
    if m <= POCHHAMMER_PRODUCT_MAX {
        let mut acc = C64::new(1.0, 0.0);
        for i in 0..m {
            acc *= (alpha + i as f64) / (i + 1) as f64;
        }
        return Ok(acc);
    }
    let one = C64::new(1.0, 0.0);
    Ok((ln_gamma_diff(m as f64, alpha, one) - ln_gamma(alpha)).exp())
}

/// `ln[Γ(m+α−x+1) Γ(n+α−x+1) / Γ(m+n+2α−x+1)]` for real `m, n ≥ −1`.
///
/// The larger of `m, n` carries the Γ-ratio so the result is symmetric in
/// `(m, n)` bit for bit. Callers check the domain.
pub(crate) fn ln_connector(m: f64, n: f64, alpha: C64, x: C64) -> C64 {
    let (big, small) = if m >= n { (m, n) } else { (n, m) };
    let a1 = alpha - x + 1.0;
    ln_gamma(a1 + small) + ln_gamma_diff(big, a1, alpha * 2.0 - x + (small + 1.0))
}

pub(crate) fn check_connector_domain(m: f64, n: f64, alpha: C64, x: C64) -> Result<()> {
    require_right_half(alpha, "connector (α)")?;
    require_right_half(alpha - x, "connector (α − x)")?;
    if m < -1.0 || n < -1.0 {
        return Err(Error::domain("connector indices must be ≥ −1"));
    }
    require_right_half(alpha * 2.0 - x + (m + n + 1.0), "connector (m+n+2α−x+1)")
}

/// `Γ(m+α−x+1) Γ(n+α−x+1) / Γ(m+n+2α−x+1)`; `m` or `n` may be the sentinel −1.
pub fn connector(m: i64, n: i64, alpha: C64, x: C64) -> Result<C64> {
    let (mf, nf) = (m as f64, n as f64);
    check_connector_domain(mf, nf, alpha, x)?;
    Ok(ln_connector(mf, nf, alpha, x).exp())
}

/// Gauss's closed form of `₂F₁(a, b; c; 1)`, `Γ(c)Γ(c−a−b) / (Γ(c−a)Γ(c−b))`.
pub fn gauss_ratio(a: C64, b: C64, c: C64) -> Result<C64> {
    require_right_half(c, "gauss_ratio (c)")?;
    require_right_half(c - a, "gauss_ratio (c − a)")?;
    require_right_half(c - b, "gauss_ratio (c − b)")?;
    require_right_half(c - a - b, "gauss_ratio (c − a − b)")?;
    let ln = (ln_gamma(c) - ln_gamma(c - a)) + (ln_gamma(c - a - b) - ln_gamma(c - b));
    Ok(ln.exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn close(a: C64, b: C64, tol: f64) -> bool {
        (a - b).norm() <= tol * b.norm().max(1.0)
    }

    #[test]
    fn log_gamma_examples() {
        assert_eq!(log_gamma(c(1.0, 0.0)).unwrap(), c(0.0, 0.0));
        let ln24 = 24f64.ln();
        assert!(close(log_gamma(c(5.0, 0.0)).unwrap(), c(ln24, 0.0), 1e-14));
        assert!(close(log_gamma(c(0.5, 0.0)).unwrap(), c(0.5 * PI.ln(), 0.0), 1e-14));
        assert!(log_gamma(c(0.0, 1.0)).is_err());
        assert!(log_gamma(c(-1.5, 0.0)).is_err());
    }

    #[test]
    fn log_gamma_factorials() {
        // ln (n−1)! accumulated in exact-ish floating point.
        let mut ln_fact = 0.0;
        for n in 1..170u32 {
            let got = log_gamma(c(f64::from(n), 0.0)).unwrap();
            assert!((got.re - ln_fact).abs() <= 1e-12 * ln_fact.abs().max(1.0), "n = {n}");
            assert_eq!(got.im, 0.0);
            ln_fact += f64::from(n).ln();
        }
    }

    #[test]
    fn log_gamma_conjugate_symmetry() {
        for &(re, im) in &[(0.3, 2.0), (4.5, -7.0), (30.0, 11.0)] {
            let z = c(re, im);
            assert!(close(log_gamma(z.conj()).unwrap(), log_gamma(z).unwrap().conj(), 1e-14));
        }
    }

    #[test]
    fn ln_gamma_diff_matches_direct_form() {
        for &t in &[1.0e3, 5.0e4, 1.0e5] {
            let a = c(1.7, -0.4);
            let b = c(2.6, 0.3);
            let direct = ln_gamma(a + t) - ln_gamma(b + t);
            let stable = ln_gamma_diff(t, a, b);
            // The direct form loses ~|lnΓ(t)|·ε.
            assert!((direct - stable).norm() < 1e-14 * t * t.ln() * 10.0, "t = {t}");
        }
        // Leading behaviour (a−b)·ln t far out.
        let d = ln_gamma_diff(1.0e15, c(1.0, 0.0), c(3.0, 0.0));
        assert!((d.re - (-2.0 * 1.0e15f64.ln())).abs() < 1e-12);
    }

    #[test]
    fn polygamma_examples() {
        let one = c(1.0, 0.0);
        assert!(close(polygamma(0, one).unwrap(), c(-EULER_GAMMA, 0.0), 1e-14));
        assert!(close(polygamma(1, one).unwrap(), c(PI * PI / 6.0, 0.0), 1e-14));
        let psi2 = polygamma(0, c(2.0, 0.0)).unwrap();
        assert!(close(psi2, polygamma(0, one).unwrap() + 1.0, 1e-14));
        // ψ''(1) = −2ζ(3)
        let zeta3 = 1.202_056_903_159_594_3;
        assert!(close(polygamma(2, one).unwrap(), c(-2.0 * zeta3, 0.0), 1e-13));
        // ψ(1/2) = −γ − 2 ln 2
        let half = polygamma(0, c(0.5, 0.0)).unwrap();
        assert!(close(half, c(-EULER_GAMMA - 2.0 * 2f64.ln(), 0.0), 1e-14));
        assert!(polygamma(0, c(-0.5, 0.0)).is_err());
        assert!(polygamma(33, one).is_err());
    }

    #[test]
    fn polygamma_recurrence() {
        let points = [c(0.3, 0.0), c(1.2, 0.7), c(3.5, -2.0), c(0.8, 0.3), c(12.0, 5.0)];
        for j in 0..=16u32 {
            let fact: f64 = (1..=j).map(f64::from).product();
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            for &z in &points {
                let lhs = polygamma(j, z + 1.0).unwrap();
                let step = z.inv().powu(j + 1) * (sign * fact);
                let rhs = polygamma(j, z).unwrap() + step;
                // rhs cancels two terms of size |step|
                let scale = lhs.norm().max(step.norm()).max(1.0);
                assert!((lhs - rhs).norm() <= 1e-10 * scale, "j = {j}, z = {z}");
            }
        }
    }

    #[test]
    fn polygamma_matches_series_oracle() {
        // ψ^{(j)}(z) = (−1)^{j+1} j! Σ_{n≥0} (z+n)^{−j−1}, summed with an
        // integral tail for j ≥ 2.
        for j in 2..=8u32 {
            let z = c(0.7, 0.4);
            let fact: f64 = (1..=j).map(f64::from).product();
            let n_max = 2000;
            let mut s = C64::new(0.0, 0.0);
            for n in 0..n_max {
                s += (z + n as f64).powi(-(j as i32 + 1));
            }
            let w = z + n_max as f64;
            let jf = f64::from(j);
            s += w.powf(-jf) / jf + w.powi(-(j as i32 + 1)) * 0.5
                + w.powi(-(j as i32 + 2)) * ((jf + 1.0) / 12.0);
            let sign = if j % 2 == 0 { -1.0 } else { 1.0 };
            let expected = s * (sign * fact);
            assert!(close(polygamma(j, z).unwrap(), expected, 1e-10), "j = {j}");
        }
    }

    #[test]
    fn pochhammer_examples() {
        let any = c(0.7, 0.3);
        assert_eq!(pochhammer_ratio(any, 0).unwrap(), c(1.0, 0.0));
        assert!(close(pochhammer_ratio(c(1.0, 0.0), 7).unwrap(), c(1.0, 0.0), 1e-15));
        assert!(close(pochhammer_ratio(c(0.5, 0.0), 2).unwrap(), c(0.375, 0.0), 1e-15));
        assert!(pochhammer_ratio(c(0.0, 1.0), 3).is_err());
    }

    #[test]
    fn pochhammer_step_ratio() {
        let alpha = c(0.8, 0.3);
        for m in 1..80u64 {
            let r = pochhammer_ratio(alpha, m).unwrap() / pochhammer_ratio(alpha, m - 1).unwrap();
            let expected = (alpha + (m - 1) as f64) / m as f64;
            assert!(close(r, expected, 1e-12), "m = {m}");
        }
    }

    #[test]
    fn pochhammer_large_m_is_finite() {
        // (α)_m/m! ~ m^{α−1}/Γ(α)
        let alpha = c(1.5, 0.0);
        let m = 10_000_000u64;
        let v = pochhammer_ratio(alpha, m).unwrap();
        let approx = (m as f64).sqrt() / ln_gamma(alpha).exp().re;
        assert!((v.re / approx - 1.0).abs() < 1e-6);
    }

    #[test]
    fn connector_examples() {
        let one = c(1.0, 0.0);
        let zero = c(0.0, 0.0);
        assert!(close(connector(0, 0, one, zero).unwrap(), c(0.5, 0.0), 1e-15));
        // 3!·4!/7!
        assert!(close(connector(2, 3, one, zero).unwrap(), c(1.0 / 35.0, 0.0), 1e-14));
        let (alpha, x) = (c(0.8, 0.3), c(0.1, -0.1));
        for &(m, n) in &[(0, 5), (-1, 2), (7, 1_000_000), (3, 3)] {
            assert_eq!(connector(m, n, alpha, x).unwrap(), connector(n, m, alpha, x).unwrap());
        }
        assert!(connector(-2, 0, one, zero).is_err());
        assert!(connector(0, 0, one, c(1.5, 0.0)).is_err());
        assert!(connector(10_000_000, 10_000_000, one, zero).unwrap().norm() >= 0.0);
    }

    #[test]
    fn connector_sentinel_matches_gamma_definition() {
        // m = −1: Γ(α−x) Γ(n+α−x+1) / Γ(n+2α−x)
        let (alpha, x) = (c(1.5, 0.0), c(0.2, 0.0));
        let a = alpha - x;
        let n = 4.0;
        let direct = (ln_gamma(a) + ln_gamma(a + n + 1.0) - ln_gamma(alpha * 2.0 - x + n)).exp();
        assert!(close(connector(-1, 4, alpha, x).unwrap(), direct, 1e-14));
    }

    #[test]
    fn gauss_ratio_examples() {
        let b = c(0.6, 0.2);
        let cc = c(3.0, 0.1);
        assert_eq!(gauss_ratio(c(0.0, 0.0), b, cc).unwrap(), c(1.0, 0.0));
        assert!(close(
            gauss_ratio(c(1.0, 0.0), c(1.0, 0.0), c(3.0, 0.0)).unwrap(),
            c(2.0, 0.0),
            1e-14
        ));
        assert!(gauss_ratio(c(1.0, 0.0), c(1.0, 0.0), c(2.0, 0.0)).is_err());
    }

    #[test]
    fn gauss_ratio_matches_partial_sums() {
        // Σ (a)_k (b)_k / ((c)_k k!) with terms ~ k^{−2.5}; the remainder after
        // K terms is bounded by an integral of the same power.
        let (a, b, cc) = (0.5, 1.0, 3.0);
        let k_max = 4_000_000u64;
        let mut term = 1.0f64;
        let mut sum = 0.0f64;
        for k in 0..k_max {
            sum += term;
            let kf = k as f64;
            term *= (a + kf) * (b + kf) / ((cc + kf) * (kf + 1.0));
        }
        // Asymptotic remainder term·K/(c−a−b−1+1) with exponent 1+c−a−b = 2.5.
        let remainder = term * k_max as f64 / 1.5;
        let closed = gauss_ratio(c(a, 0.0), c(b, 0.0), c(cc, 0.0)).unwrap();
        assert!((sum + remainder - closed.re).abs() < 1e-8);
        assert!(closed.re - sum > 0.0);
    }
}
