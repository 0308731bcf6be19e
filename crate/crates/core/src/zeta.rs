//! Nested-sum evaluators: ζ(k; α), ζ̃(k; α), classical MZVs, the Hurwitz
//! zeta oracle, Ohno sums and the Ohno generating function in `x`.
//!
//! All nested sums run through one prefix-sum recursion. For an index
//! `(k₁,…,k_r)` the chain weight of the last variable is
//!
//! ```text
//! A(m) = Σ_{m₁<⋯<m_{r−1}<m} L(m₁) Π_i f_{k_i}(m_i),   f_k(m) = (m+α)^{−(k−1)} / (m+α−x)
//! ```
//!
//! with lead weight `L(m) = (α)_m/m!` (or 1 for the ζ̃ family), computed in
//! `O(r·N)` by keeping one compensated running sum per level. Summation is
//! strictly ascending in every variable, so results are bit-reproducible for
//! a fixed configuration.

use num_complex::Complex64 as C64;

use crate::index::{compositions, dual, Index};
use crate::model::{AsSeries, AtPoint, XModel};
use crate::series::{check_degree, TruncatedSeries, DEFAULT_DEGREE};
use crate::special::BERNOULLI_EVEN;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EvalConfig {
    /// Cutoff of the outer variable of one-sided series.
    pub trunc_n: usize,
    /// Cutoff of both outer variables of connected sums.
    pub conn_m: usize,
    /// Degree of series in `x`.
    pub degree: usize,
}

pub const MIN_CUTOFF: usize = 10;

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            trunc_n: 100_000,
            conn_m: 100_000,
            degree: DEFAULT_DEGREE,
        }
    }
}

impl EvalConfig {
    pub fn with_trunc(mut self, n: usize) -> Self {
        self.trunc_n = n;
        self
    }

    pub fn with_conn(mut self, m: usize) -> Self {
        self.conn_m = m;
        self
    }

    pub fn with_degree(mut self, d: usize) -> Self {
        self.degree = d;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.trunc_n < MIN_CUTOFF || self.conn_m < MIN_CUTOFF {
            return Err(Error::Config(format!(
                "cutoffs must be at least {MIN_CUTOFF} (trunc = {}, conn = {})",
                self.trunc_n, self.conn_m
            )));
        }
        check_degree(self.degree)
    }
}

/// Which weight family a nested sum carries.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Flavor {
    /// `(α)_{m₁}/m₁! · m_r!/(α)_{m_r}`: the PMZS ζ(k; α) and the connected sum Z.
    Ohno,
    /// `Γ(m_r+α+1)/Γ(m_r+2α)`: the series ζ̃(k; α) and the connected sum Z̃.
    Tilde,
}

/// A truncated sum with an a-posteriori tail estimate.
///
/// `tail_estimate = N·|a_N|/(σ−1)` from the last outer term `a_N` and the
/// expected decay exponent σ of the terms. It is a proxy, not a proven bound.
/// `tail_correction` is the same proxy keeping the phase of `a_N`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ValueWithTail {
    pub value: C64,
    pub tail_estimate: f64,
    pub tail_correction: C64,
    pub terms_used: usize,
    /// Set when σ < 1.5: plain truncation converges too slowly for tight checks.
    pub slow_convergence: bool,
}

impl ValueWithTail {
    /// Truncated value plus the signed tail proxy.
    pub fn extrapolated(&self) -> C64 {
        self.value + self.tail_correction
    }
}

/// Series-valued counterpart of [`ValueWithTail`], one tail per coefficient.
#[derive(Clone, Debug, PartialEq)]
pub struct SeriesWithTail {
    pub value: TruncatedSeries,
    pub tail_estimates: Vec<f64>,
    pub tail_correction: TruncatedSeries,
    pub terms_used: usize,
    pub slow_convergence: bool,
}

impl SeriesWithTail {
    pub fn extrapolated(&self) -> TruncatedSeries {
        &self.value + &self.tail_correction
    }

    /// Coefficient `e` as a scalar result.
    pub fn coefficient(&self, e: usize) -> ValueWithTail {
        ValueWithTail {
            value: self.value.coeff(e),
            tail_estimate: self.tail_estimates[e],
            tail_correction: self.tail_correction.coeff(e),
            terms_used: self.terms_used,
            slow_convergence: self.slow_convergence,
        }
    }
}

pub(crate) fn require_alpha(alpha: C64) -> Result<()> {
    if alpha.re > 0.0 && alpha.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!(
            "α must have positive real part, got {}",
            crate::literal::format_complex(alpha)
        )))
    }
}

pub(crate) fn require_alpha_minus_x(alpha: C64, x: C64) -> Result<()> {
    if (alpha - x).re > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!(
            "need Re(α − x) > 0, got α = {}, x = {}",
            crate::literal::format_complex(alpha),
            crate::literal::format_complex(x)
        )))
    }
}

/// Decay exponent of the outer terms of a one-sided sum whose last part is
/// `k_last`.
///
/// ζ̃ terms decay like `m^{−(k_r+Re α−1)}`. For ζ the outer weight
/// `m!/(α)_m ~ m^{1−α}` can be cancelled by a growing inner chain, so the
/// exponent lies between `k_r` and `k_r+Re α−1`; the smaller one is used.
pub(crate) fn one_sided_exponent(flavor: Flavor, depth: usize, k_last: u32, alpha: C64) -> f64 {
    let k = f64::from(k_last);
    match flavor {
        Flavor::Tilde => k + alpha.re - 1.0,
        Flavor::Ohno if depth == 1 => k,
        Flavor::Ohno => k + (alpha.re - 1.0).min(0.0),
    }
}

/// Streams the chain weights `A(0), A(1), …` of an index.
pub(crate) struct Chain<'a, M: XModel> {
    model: &'a M,
    parts: &'a [u32],
    alpha: C64,
    lead: bool,
    lead_weight: C64,
    prefix: Vec<M::Acc>,
    powers: Vec<C64>,
    m: usize,
}

impl<'a, M: XModel> Chain<'a, M> {
    pub(crate) fn new(model: &'a M, parts: &'a [u32], alpha: C64, lead: bool) -> Self {
        debug_assert!(!parts.is_empty());
        let max_k = *parts.iter().max().unwrap() as usize;
        Chain {
            model,
            parts,
            alpha,
            lead,
            lead_weight: C64::new(1.0, 0.0),
            prefix: (1..parts.len()).map(|_| model.acc()).collect(),
            powers: vec![C64::new(1.0, 0.0); max_k],
            m: 0,
        }
    }

    /// Weight of the last variable at the current `m`, then advances `m`.
    pub(crate) fn next_weight(&mut self) -> M::V {
        let model = self.model;
        let mf = self.m as f64;
        let shifted = self.alpha + mf;
        if self.lead && self.m > 0 {
            self.lead_weight *= (self.alpha + (mf - 1.0)) / mf;
        }
        let rec = shifted.inv();
        for i in 1..self.powers.len() {
            self.powers[i] = self.powers[i - 1] * rec;
        }
        let lin = model.recip_linear(shifted);

        let r = self.parts.len();
        let mut out = None;
        for j in (0..r).rev() {
            let k = self.parts[j] as usize;
            let mut c = model.scale(&lin, self.powers[k - 1]);
            if j == 0 {
                if self.lead {
                    c = model.scale(&c, self.lead_weight);
                }
            } else {
                let below = model.total(&self.prefix[j - 1]);
                c = model.mul(&below, &c);
            }
            if j + 1 == r {
                out = Some(c);
            } else {
                model.push(&mut self.prefix[j], &c);
            }
        }
        self.m += 1;
        out.expect("index is nonempty")
    }

    pub(crate) fn collect(mut self, upto: usize) -> Vec<M::V> {
        (0..=upto).map(|_| self.next_weight()).collect()
    }
}

/// Raw output of a generic one-sided or two-sided sum.
pub(crate) struct Summed<V> {
    pub value: V,
    pub tails: Vec<f64>,
    pub correction: V,
    pub terms_used: usize,
    pub slow: bool,
}

/// One-sided sum over `0 ≤ m₁ < ⋯ < m_r ≤ n` in the given flavor.
pub(crate) fn one_sided<M: XModel>(
    model: &M,
    parts: &[u32],
    alpha: C64,
    flavor: Flavor,
    n: usize,
) -> Result<Summed<M::V>> {
    let sigma = one_sided_exponent(flavor, parts.len(), *parts.last().unwrap(), alpha);
    if sigma <= 1.0 {
        return Err(Error::Convergence(format!(
            "terms decay like m^-{sigma}, which is not summable"
        )));
    }
    let mut chain = Chain::new(model, parts, alpha, flavor == Flavor::Ohno);
    let mut acc = model.acc();
    let mut outer_scalar = C64::new(1.0, 0.0);
    let mut outer_gamma = match flavor {
        Flavor::Tilde => Some(model.gamma_product(&[(alpha + 1.0, 1.0), (alpha * 2.0, -1.0)], C64::new(0.0, 0.0))),
        Flavor::Ohno => None,
    };
    let mut last = model.constant(C64::new(0.0, 0.0));
    for m in 0..=n {
        let mf = m as f64;
        let a = chain.next_weight();
        let term = match &mut outer_gamma {
            None => {
                if m > 0 {
                    outer_scalar *= mf / (alpha + (mf - 1.0));
                }
                model.scale(&a, outer_scalar)
            }
            Some(g) => {
                if m > 0 {
                    // Γ(m+α−x+1)/Γ(m+2α−x) from its value at m−1.
                    *g = model.over_linear(&model.times_linear(g, alpha + mf), alpha * 2.0 + (mf - 1.0));
                }
                model.mul(&a, g)
            }
        };
        model.push(&mut acc, &term);
        last = term;
    }
    let scale = n as f64 / (sigma - 1.0);
    Ok(Summed {
        value: model.total(&acc),
        tails: model.coeffs(&last).iter().map(|c| c.norm() * scale).collect(),
        correction: model.scale(&last, C64::new(scale, 0.0)),
        terms_used: n + 1,
        slow: sigma < 1.5,
    })
}

fn to_value(s: Summed<C64>) -> ValueWithTail {
    ValueWithTail {
        value: s.value,
        tail_estimate: s.tails[0],
        tail_correction: s.correction,
        terms_used: s.terms_used,
        slow_convergence: s.slow,
    }
}

fn to_series(s: Summed<TruncatedSeries>) -> SeriesWithTail {
    SeriesWithTail {
        value: s.value,
        tail_estimates: s.tails,
        tail_correction: s.correction,
        terms_used: s.terms_used,
        slow_convergence: s.slow,
    }
}

fn eval_flavor(k: &Index, alpha: C64, flavor: Flavor, cfg: &EvalConfig) -> Result<ValueWithTail> {
    k.require_admissible()?;
    require_alpha(alpha)?;
    cfg.validate()?;
    let model = AtPoint(C64::new(0.0, 0.0));
    one_sided(&model, k.parts(), alpha, flavor, cfg.trunc_n).map(to_value)
}

/// Truncated ζ(k; α) with `m_r ≤ trunc_n`.
pub fn pmzs_eval(k: &Index, alpha: C64, cfg: &EvalConfig) -> Result<ValueWithTail> {
    eval_flavor(k, alpha, Flavor::Ohno, cfg)
}

/// Truncated ζ̃(k; α) = Σ Γ(m_r+α+1)/Γ(m_r+2α) · Π (m_i+α)^{−k_i}.
pub fn pmzs_tilde_eval(k: &Index, alpha: C64, cfg: &EvalConfig) -> Result<ValueWithTail> {
    eval_flavor(k, alpha, Flavor::Tilde, cfg)
}

/// Classical multiple zeta value, the α = 1 case with identical terms.
pub fn mzv_eval(k: &Index, cfg: &EvalConfig) -> Result<ValueWithTail> {
    pmzs_eval(k, C64::new(1.0, 0.0), cfg)
}

const HURWITZ_DIRECT_TERMS: usize = 20;

/// Hurwitz zeta `Σ_{m≥0} (m+α)^{−s}` by Euler–Maclaurin summation.
pub fn hurwitz_eval(s: u32, alpha: C64) -> Result<C64> {
    if s < 2 {
        return Err(Error::domain("hurwitz_eval needs s ≥ 2"));
    }
    require_alpha(alpha)?;
    let si = s as i32;
    let sf = f64::from(s);
    let mut acc = crate::summation::ComplexSum::new();
    for m in 0..HURWITZ_DIRECT_TERMS {
        acc += (alpha + m as f64).powi(-si);
    }
    let w = alpha + HURWITZ_DIRECT_TERMS as f64;
    let w_pow = w.powi(-si);
    acc += w_pow * w / (sf - 1.0);
    acc += w_pow * 0.5;
    // Σ_j B_{2j}/(2j)! · s(s+1)⋯(s+2j−2) · w^{−s−2j+1}
    let inv2 = (w * w).inv();
    let mut pow = w_pow / w;
    let mut rising = sf;
    let mut fact = 2.0;
    for (i, b) in BERNOULLI_EVEN.iter().enumerate() {
        let j = (i + 1) as f64;
        let term = pow * (b * rising / fact);
        acc += term;
        if term.norm() < 1e-18 * acc.total().norm() {
            break;
        }
        pow *= inv2;
        rising *= (sf + 2.0 * j - 1.0) * (sf + 2.0 * j);
        fact *= (2.0 * j + 1.0) * (2.0 * j + 2.0);
    }
    Ok(acc.total())
}

/// `Σ_{e₁+⋯+e_r=m} ζ(k₁+e₁, …, k_r+e_r; α)`.
pub fn ohno_sum(k: &Index, m: u32, alpha: C64, cfg: &EvalConfig) -> Result<ValueWithTail> {
    k.require_admissible()?;
    let mut total = ValueWithTail {
        value: C64::new(0.0, 0.0),
        tail_estimate: 0.0,
        tail_correction: C64::new(0.0, 0.0),
        terms_used: 0,
        slow_convergence: false,
    };
    for e in compositions(m, k.depth() as u32)? {
        let v = pmzs_eval(&k.shifted(&e), alpha, cfg)?;
        total.value += v.value;
        total.tail_estimate += v.tail_estimate;
        total.tail_correction += v.tail_correction;
        total.terms_used += v.terms_used;
        total.slow_convergence |= v.slow_convergence;
    }
    Ok(total)
}

/// Expansion of the one-sided `Z(k; ∅; α; x)` in `x` up to `cfg.degree`.
/// Coefficient `e` is the Ohno sum with shift `e`.
pub fn gf_coefficients(k: &Index, alpha: C64, cfg: &EvalConfig) -> Result<SeriesWithTail> {
    k.require_admissible()?;
    require_alpha(alpha)?;
    cfg.validate()?;
    let model = AsSeries(cfg.degree);
    one_sided(&model, k.parts(), alpha, Flavor::Ohno, cfg.trunc_n).map(to_series)
}

/// Floor on comparison tolerances, for values whose tails vanish below rounding.
pub const TOLERANCE_FLOOR: f64 = 1e-10;

/// Safety factor applied to tail estimates in every identity check.
pub const TAIL_SAFETY: f64 = 10.0;

/// One side-by-side comparison of two truncated evaluations.
#[derive(Clone, Debug, PartialEq)]
pub struct Comparison {
    pub left: ValueWithTail,
    pub right: ValueWithTail,
    /// `|left − right|` after adding each side's signed tail proxy.
    pub residual: f64,
    pub tolerance: f64,
}

impl Comparison {
    pub fn new(left: ValueWithTail, right: ValueWithTail) -> Self {
        let residual = (left.extrapolated() - right.extrapolated()).norm();
        let tolerance = TOLERANCE_FLOOR.max(TAIL_SAFETY * (left.tail_estimate + right.tail_estimate));
        Comparison {
            left,
            right,
            residual,
            tolerance,
        }
    }

    /// Difference of the plain truncated values.
    pub fn raw_residual(&self) -> f64 {
        (self.left.value - self.right.value).norm()
    }

    pub fn passed(&self) -> bool {
        self.residual <= self.tolerance
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DualityCheck {
    pub index: Index,
    pub dual: Index,
    pub flavor: Flavor,
    pub comparison: Comparison,
}

/// Compares ζ(k; α) with ζ(k′; α) (or the ζ̃ pair).
pub fn verify_duality(k: &Index, alpha: C64, flavor: Flavor, cfg: &EvalConfig) -> Result<DualityCheck> {
    let d = dual(k)?;
    let (left, right) = match flavor {
        Flavor::Ohno => (pmzs_eval(k, alpha, cfg)?, pmzs_eval(&d, alpha, cfg)?),
        Flavor::Tilde => (pmzs_tilde_eval(k, alpha, cfg)?, pmzs_tilde_eval(&d, alpha, cfg)?),
    };
    Ok(DualityCheck {
        index: k.clone(),
        dual: d,
        flavor,
        comparison: Comparison::new(left, right),
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct OhnoCheck {
    pub index: Index,
    pub dual: Index,
    pub shift: u32,
    /// Sums over compositions on both sides.
    pub direct: Comparison,
    /// Coefficient `shift` of both generating functions.
    pub generating: Comparison,
    /// Direct sum against the generating-function coefficient on the index side.
    pub consistency: Comparison,
}

impl OhnoCheck {
    pub fn passed(&self) -> bool {
        self.direct.passed() && self.generating.passed() && self.consistency.passed()
    }
}

/// Ohno relation with shift `m`, by enumeration and by coefficient extraction.
pub fn verify_ohno(k: &Index, m: u32, alpha: C64, cfg: &EvalConfig) -> Result<OhnoCheck> {
    let d = dual(k)?;
    let shift = m as usize;
    check_degree(shift)?;
    let gf_cfg = cfg.with_degree(cfg.degree.max(shift));
    let left = ohno_sum(k, m, alpha, cfg)?;
    let right = ohno_sum(&d, m, alpha, cfg)?;
    let gf_left = gf_coefficients(k, alpha, &gf_cfg)?.coefficient(shift);
    let gf_right = gf_coefficients(&d, alpha, &gf_cfg)?.coefficient(shift);
    Ok(OhnoCheck {
        index: k.clone(),
        dual: d,
        shift: m,
        direct: Comparison::new(left, right),
        generating: Comparison::new(gf_left, gf_right),
        consistency: Comparison::new(left, gf_left),
    })
}
