//! Connected sums and the connector transport.
//!
//! A connected sum joins two index chains through the connector
//! `C(m, n) = Γ(m+α−x+1) Γ(n+α−x+1) / Γ(m+n+2α−x+1)`:
//!
//! ```text
//! Z(k; l)  = Γ(α)/Γ(α−x) Σ_{m₁<⋯<m_r} Σ_{n₁<⋯<n_s} (α)_{m₁}/m₁! (α)_{n₁}/n₁! C(m_r, n_s) Π f_{k_i}(m_i) Π f_{l_j}(n_j)
//! Z̃(k; l) = 1/Γ(α−x)   Σ … C(m_r, n_s) Π f_{k_i}(m_i) Π f_{l_j}(n_j)
//! ```
//!
//! with `f_k(m) = (m+α)^{−(k−1)}/(m+α−x)`. With one side empty they reduce
//! to the one-sided series of [`crate::zeta`]. Four moves rewrite a state
//! without changing its value, and iterating them carries `Z(k; ∅)` to
//! `Z(∅; k′)` with `k′` the dual index.

use std::fmt;

use num_complex::Complex64 as C64;

use crate::index::{dual, Index};
use crate::model::{AsSeries, AtPoint, XModel};
use crate::series::{TruncatedSeries, MAX_DEGREE};
use crate::special::{connector, gauss_ratio, ln_connector, ln_gamma, ln_gamma_diff, pochhammer_ratio};
use crate::summation::ComplexSum;
use crate::zeta::{
    gf_coefficients, one_sided, pmzs_eval, pmzs_tilde_eval, require_alpha, require_alpha_minus_x, Chain,
    Comparison, EvalConfig, SeriesWithTail, Summed, ValueWithTail, TAIL_SAFETY,
};
use crate::{Error, Result};

pub use crate::zeta::Flavor;

/// A pair of index chains `(left; right)`; either side may be empty.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ConnectedState {
    left: Index,
    right: Index,
    flavor: Flavor,
}

impl ConnectedState {
    pub fn new(left: Index, right: Index, flavor: Flavor) -> Result<Self> {
        if left.is_empty() && right.is_empty() {
            return Err(Error::domain("a connected state needs at least one nonempty side"));
        }
        Ok(ConnectedState { left, right, flavor })
    }

    /// The starting state `(k; ∅)`.
    pub fn start(k: &Index, flavor: Flavor) -> Result<Self> {
        k.require_admissible()?;
        Self::new(k.clone(), Index::empty(), flavor)
    }

    pub fn left(&self) -> &Index {
        &self.left
    }

    pub fn right(&self) -> &Index {
        &self.right
    }

    pub fn flavor(&self) -> Flavor {
        self.flavor
    }

    pub fn weight(&self) -> u32 {
        self.left.weight() + self.right.weight()
    }

    pub fn is_two_sided(&self) -> bool {
        !self.left.is_empty() && !self.right.is_empty()
    }

    /// The nonempty side of a one-sided state.
    fn single_side(&self) -> Option<&Index> {
        match (self.left.is_empty(), self.right.is_empty()) {
            (false, true) => Some(&self.left),
            (true, false) => Some(&self.right),
            _ => None,
        }
    }
}

fn side(idx: &Index) -> String {
    if idx.is_empty() {
        "∅".to_string()
    } else {
        idx.to_string()
    }
}

impl fmt::Display for ConnectedState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}; {})", side(&self.left), side(&self.right))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MoveKind {
    /// `(…, k_r; ∅) → (…, k_r−1; 1)`, needs `k_r ≥ 2`.
    Entry,
    /// `(…, k_r; l) → (…, k_r−1; l, 1)`, needs `k_r ≥ 2`.
    Shift,
    /// `(…, k_r, 1; l) → (…, k_r; …, l_s+1)`.
    Pop,
    /// `(1; l) → (∅; …, l_s+1)`.
    Exit,
}

impl MoveKind {
    pub fn name(self) -> &'static str {
        match self {
            MoveKind::Entry => "ENTRY",
            MoveKind::Shift => "SHIFT",
            MoveKind::Pop => "POP",
            MoveKind::Exit => "EXIT",
        }
    }
}

impl fmt::Display for MoveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// An applied move, annotated with the identity that justifies it and the
/// depths `r` (left, before the move) and `s` (right, after the move).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Move {
    pub kind: MoveKind,
    pub flavor: Flavor,
    pub r: usize,
    pub s: usize,
}

impl Move {
    /// Name of the connector relation used, shared with
    /// [`verify_connector_relations`].
    pub fn relation(&self) -> &'static str {
        match (self.kind, self.flavor) {
            (MoveKind::Entry, Flavor::Ohno) => "gauss-sum",
            (MoveKind::Exit, Flavor::Ohno) => "gauss-sum-mirror",
            (MoveKind::Entry, Flavor::Tilde) => "telescoping(sentinel)",
            (MoveKind::Exit, Flavor::Tilde) => "telescoping-mirror(sentinel)",
            (MoveKind::Shift, _) => "telescoping",
            (MoveKind::Pop, _) => "telescoping-mirror",
        }
    }

    pub fn label(&self) -> String {
        format!("{}[r={},s={}]", self.relation(), self.r, self.s)
    }
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.kind, self.label())
    }
}

fn illegal(kind: MoveKind, st: &ConnectedState) -> Error {
    Error::IllegalMove {
        mv: kind.name().to_string(),
        state: st.to_string(),
    }
}

/// Rewrites a state by one move.
pub fn apply_move(st: &ConnectedState, kind: MoveKind) -> Result<ConnectedState> {
    let mut next = st.clone();
    let left_last = st.left.last();
    let legal = match kind {
        MoveKind::Entry => st.right.is_empty() && left_last.is_some_and(|k| k >= 2),
        MoveKind::Shift => {
            (!st.right.is_empty() || st.flavor == Flavor::Tilde) && left_last.is_some_and(|k| k >= 2)
        }
        MoveKind::Pop => left_last == Some(1) && st.left.depth() >= 2 && !st.right.is_empty(),
        MoveKind::Exit => st.left.parts() == [1] && !st.right.is_empty(),
    };
    if !legal {
        return Err(illegal(kind, st));
    }
    match kind {
        MoveKind::Entry | MoveKind::Shift => {
            *next.left.last_mut().expect("checked nonempty") -= 1;
            next.right.push(1);
        }
        MoveKind::Pop | MoveKind::Exit => {
            next.left.pop();
            *next.right.last_mut().expect("checked nonempty") += 1;
        }
    }
    Ok(next)
}

/// The move the transport takes from `st`, or `None` once the left side is empty.
pub fn next_move(st: &ConnectedState) -> Option<MoveKind> {
    let last = st.left.last()?;
    Some(if st.left.parts() == [1] && !st.right.is_empty() {
        MoveKind::Exit
    } else if st.right.is_empty() {
        MoveKind::Entry
    } else if last >= 2 {
        MoveKind::Shift
    } else {
        MoveKind::Pop
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransportTrace {
    pub start: Index,
    pub flavor: Flavor,
    /// `states.len() == moves.len() + 1`.
    pub states: Vec<ConnectedState>,
    pub moves: Vec<Move>,
}

impl TransportTrace {
    pub fn end(&self) -> &ConnectedState {
        self.states.last().expect("a trace has at least one state")
    }
}

/// Moves `(k; ∅)` to `(∅; k′)` one connector move at a time.
pub fn transport(k: &Index, flavor: Flavor) -> Result<TransportTrace> {
    let mut st = ConnectedState::start(k, flavor)?;
    let mut states = vec![st.clone()];
    let mut moves = Vec::new();
    while let Some(kind) = next_move(&st) {
        let r = st.left.depth();
        st = apply_move(&st, kind)?;
        moves.push(Move {
            kind,
            flavor,
            r,
            s: st.right.depth(),
        });
        states.push(st.clone());
    }
    Ok(TransportTrace {
        start: k.clone(),
        flavor,
        states,
        moves,
    })
}

/// Stop a row once `n·|term| ≤ ROW_STOP·Σ|term|` on a decreasing stretch.
const ROW_STOP: f64 = 1e-17;
const ROW_MIN_TERMS: usize = 4;

fn require_state(st: &ConnectedState) -> Result<()> {
    if let Some(one) = st.single_side() {
        one.require_admissible()?;
    }
    Ok(())
}

/// Two-sided connected sum with both outer variables cut at `big_m`.
///
/// Rows `m = m_r` are summed over `n = n_s` with the connector stepped by
/// its ratio recurrences. A row stops early once its remaining terms are
/// negligible; rows that reach the cutoff contribute a tail estimate, and
/// so does the last row (for `m_r > big_m`).
fn two_sided<M: XModel>(
    model: &M,
    left: &[u32],
    right: &[u32],
    alpha: C64,
    flavor: Flavor,
    big_m: usize,
) -> Summed<M::V> {
    let lead = flavor == Flavor::Ohno;
    let a = Chain::new(model, left, alpha, lead).collect(big_m);
    let b = Chain::new(model, right, alpha, lead).collect(big_m);
    let zero = C64::new(0.0, 0.0);
    let prefactor = match flavor {
        Flavor::Ohno => model.gamma_product(&[(alpha, -1.0)], ln_gamma(alpha)),
        Flavor::Tilde => model.gamma_product(&[(alpha, -1.0)], zero),
    };
    let (m0, n0) = (left.len() - 1, right.len() - 1);
    let (m0f, n0f) = (m0 as f64, n0 as f64);
    let mut row_head = model.gamma_product(
        &[
            (alpha + (m0f + 1.0), 1.0),
            (alpha + (n0f + 1.0), 1.0),
            (alpha * 2.0 + (m0f + n0f + 1.0), -1.0),
        ],
        zero,
    );

    let soft = alpha.re.min(1.0);
    let (k_last, l_last) = (f64::from(*left.last().unwrap()), f64::from(*right.last().unwrap()));
    let (row_base, col_exp) = match flavor {
        Flavor::Ohno => (l_last + soft, k_last + n0f + soft),
        Flavor::Tilde => (l_last + alpha.re, k_last + n0f + alpha.re),
    };
    let big = big_m as f64;
    let degree_len = model.coeffs(&prefactor).len();
    let mut tails = vec![0.0; degree_len];
    let mut correction = model.constant(zero);
    let add_tail = |full: &M::V, exponent: f64, tails: &mut Vec<f64>, correction: &mut M::V| {
        let scale = big / (exponent - 1.0);
        for (t, c) in tails.iter_mut().zip(model.coeffs(full)) {
            *t += c.norm() * scale;
        }
        let scaled = model.scale(full, C64::new(scale, 0.0));
        let mut acc = model.acc();
        model.push(&mut acc, correction);
        model.push(&mut acc, &scaled);
        *correction = model.total(&acc);
    };

    let mut outer = model.acc();
    let mut terms = 0usize;
    for m in m0..=big_m {
        let mf = m as f64;
        if m > m0 {
            row_head = model.over_linear(&model.times_linear(&row_head, alpha + mf), alpha * 2.0 + (mf + n0f));
        }
        let mut c = row_head.clone();
        let mut row = model.acc();
        let mut abs_sum = 0.0;
        let mut prev = f64::INFINITY;
        let mut capped = true;
        let mut last = model.constant(zero);
        for n in n0..=big_m {
            let nf = n as f64;
            if n > n0 {
                c = model.over_linear(&model.times_linear(&c, alpha + nf), alpha * 2.0 + (mf + nf));
            }
            let t = model.mul(&c, &b[n]);
            model.push(&mut row, &t);
            terms += 1;
            let tn = model.norm(&t);
            abs_sum += tn;
            if n >= n0 + ROW_MIN_TERMS && tn <= prev && nf * tn <= ROW_STOP * abs_sum {
                capped = false;
                break;
            }
            prev = tn;
            last = t;
        }
        let weight = model.mul(&prefactor, &a[m]);
        let row_total = model.mul(&weight, &model.total(&row));
        if capped {
            let full_last = model.mul(&weight, &last);
            add_tail(&full_last, row_base + mf, &mut tails, &mut correction);
        }
        if m == big_m {
            add_tail(&row_total, col_exp, &mut tails, &mut correction);
        }
        model.push(&mut outer, &row_total);
    }
    Summed {
        value: model.total(&outer),
        tails,
        correction,
        terms_used: terms,
        slow: col_exp < 1.5 || row_base < 1.5,
    }
}

fn connected<M: XModel>(model: &M, st: &ConnectedState, alpha: C64, big_m: usize) -> Result<Summed<M::V>> {
    require_state(st)?;
    match st.single_side() {
        Some(one) => one_sided(model, one.parts(), alpha, st.flavor, big_m),
        None => Ok(two_sided(model, st.left.parts(), st.right.parts(), alpha, st.flavor, big_m)),
    }
}

/// Numeric value of `Z(left; right; α; x)` (or `Z̃`), both outer variables
/// cut at `cfg.conn_m`.
pub fn connected_sum_eval(st: &ConnectedState, alpha: C64, x: C64, cfg: &EvalConfig) -> Result<ValueWithTail> {
    require_alpha(alpha)?;
    require_alpha_minus_x(alpha, x)?;
    cfg.validate()?;
    let s = connected(&AtPoint(x), st, alpha, cfg.conn_m)?;
    Ok(ValueWithTail {
        value: s.value,
        tail_estimate: s.tails[0],
        tail_correction: s.correction,
        terms_used: s.terms_used,
        slow_convergence: s.slow,
    })
}

/// Expansion of the connected sum in `x` to degree `cfg.degree`.
pub fn connected_sum_series(st: &ConnectedState, alpha: C64, cfg: &EvalConfig) -> Result<SeriesWithTail> {
    require_alpha(alpha)?;
    cfg.validate()?;
    let s = connected(&AsSeries(cfg.degree), st, alpha, cfg.conn_m)?;
    Ok(SeriesWithTail {
        value: s.value,
        tail_estimates: s.tails,
        tail_correction: s.correction,
        terms_used: s.terms_used,
        slow_convergence: s.slow,
    })
}

/// Residual threshold of the single-sum connector relations.
pub const RELATION_TOLERANCE: f64 = 1e-9;
/// Threshold for the sum against Gauss's closed form.
pub const CLOSED_FORM_TOLERANCE: f64 = 1e-10;
/// Absolute floor of per-step trace tolerances.
pub const TRACE_FLOOR: f64 = 1e-8;

/// `Σ_{j > M} f(j)` by Euler–Maclaurin, `f` smooth and decaying at least
/// like `j^{−1−ε}`.
fn euler_maclaurin_tail(f: &dyn Fn(f64) -> C64, big: f64) -> C64 {
    let d1 = (f(big + 1.0) - f(big - 1.0)) * 0.5;
    let h = (big / 64.0).max(1.0);
    let d3 = (f(big + 2.0 * h) - f(big + h) * 2.0 + f(big - h) * 2.0 - f(big - 2.0 * h)) / (2.0 * h * h * h);
    tail_integral(f, big) - f(big) * 0.5 - d1 / 12.0 + d3 / 720.0
}

/// `∫_M^∞ f`, substituting `t = M eˢ` and applying Simpson's rule on unit
/// blocks of `s` until a block no longer matters.
fn tail_integral(f: &dyn Fn(f64) -> C64, big: f64) -> C64 {
    const PANELS: usize = 64;
    const S_MAX: usize = 600;
    let h = 1.0 / PANELS as f64;
    let g = |s: f64| {
        let t = big * s.exp();
        f(t) * t
    };
    let mut acc = ComplexSum::new();
    for block in 0..S_MAX {
        let s0 = block as f64;
        let mut part = g(s0) + g(s0 + 1.0);
        for i in 1..PANELS {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            part += g(s0 + i as f64 * h) * w;
        }
        let part = part * (h / 3.0);
        acc += part;
        if part.norm() <= 1e-18 * acc.total().norm() {
            break;
        }
    }
    acc.total()
}

/// `Σ_{j ≥ start} T(j)` with `T(start) = head`: terms stepped by
/// `ratio(j) = T(j+1)/T(j)` up to `cap`, then an Euler–Maclaurin tail from
/// the smooth extension `f` of `T`.
fn sum_with_tail(
    start: i64,
    head: C64,
    cap: usize,
    f: &dyn Fn(f64) -> C64,
    ratio: &dyn Fn(f64) -> C64,
) -> Result<C64> {
    if start >= cap as i64 {
        return Err(Error::Config(format!("cutoff {cap} must exceed the summation start {start}")));
    }
    let mut t = head;
    let mut acc = ComplexSum::new();
    for j in start..cap as i64 {
        acc += t;
        t *= ratio(j as f64);
    }
    acc += t;
    Ok(acc.total() + euler_maclaurin_tail(f, cap as f64))
}

/// One connector relation instance, `lhs` summed numerically and `rhs` closed.
#[derive(Clone, Debug, PartialEq)]
pub struct RelationCheck {
    pub name: String,
    pub lhs: C64,
    pub rhs: C64,
    pub residual: f64,
    pub tolerance: f64,
}

impl RelationCheck {
    fn new(name: impl Into<String>, lhs: C64, rhs: C64, tolerance: f64) -> Self {
        RelationCheck {
            name: name.into(),
            lhs,
            rhs,
            residual: (lhs - rhs).norm(),
            tolerance,
        }
    }

    pub fn passed(&self) -> bool {
        self.residual <= self.tolerance
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RelationReport {
    pub m: i64,
    pub n: i64,
    pub alpha: C64,
    pub x: C64,
    pub checks: Vec<RelationCheck>,
}

impl RelationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(RelationCheck::passed)
    }

    pub fn max_residual(&self) -> f64 {
        self.checks.iter().map(|c| c.residual).fold(0.0, f64::max)
    }
}

/// `Σ_{j≥0} (α)_j/j! · C(m, j)/(j+α−x)` against `Γ(α−x)/Γ(α) · m!/((α)_m (m+α))`,
/// plus the same sum against `Γ(m+α−x+1)Γ(α−x)/Γ(m+2α−x+1) · ₂F₁(α−x, α; m+2α−x+1; 1)`.
fn gauss_checks(name: &str, m: i64, alpha: C64, x: C64, cap: usize, out: &mut Vec<RelationCheck>) -> Result<()> {
    let a = alpha - x;
    let mf = m as f64;
    let ln_norm = ln_gamma(alpha);
    let f = move |t: f64| {
        let poch = ln_gamma_diff(t, alpha, C64::new(1.0, 0.0)) - ln_norm;
        (poch + ln_connector(mf, t, alpha, x)).exp() / (a + t)
    };
    let ratio = move |j: f64| (alpha + j) * (a + j) / ((alpha * 2.0 - x + (mf + j + 1.0)) * (j + 1.0));
    let lhs = sum_with_tail(0, f(0.0), cap, &f, &ratio)?;
    let rhs = (ln_gamma(a) - ln_norm).exp() / (alpha + mf) / pochhammer_ratio(alpha, m as u64)?;
    out.push(RelationCheck::new(name, lhs, rhs, RELATION_TOLERANCE));
    let c = alpha * 2.0 - x + (mf + 1.0);
    let closed = (ln_gamma(a + (mf + 1.0)) + ln_gamma(a) - ln_gamma(c)).exp() * gauss_ratio(a, alpha, c)?;
    out.push(RelationCheck::new(
        format!("{name}(closed-form)"),
        lhs,
        closed,
        CLOSED_FORM_TOLERANCE,
    ));
    Ok(())
}

/// `Σ_{j>lower} C(fixed, j)/(j+α−x)` against `C(fixed, lower)/(fixed+α)`.
fn telescoping_check(name: &str, fixed: i64, lower: i64, alpha: C64, x: C64, cap: usize) -> Result<RelationCheck> {
    let a = alpha - x;
    let ff = fixed as f64;
    let f = move |t: f64| ln_connector(ff, t, alpha, x).exp() / (a + t);
    let ratio = move |j: f64| (a + j) / (alpha * 2.0 - x + (ff + j + 1.0));
    let lhs = sum_with_tail(lower + 1, f((lower + 1) as f64), cap, &f, &ratio)?;
    let rhs = connector(fixed, lower, alpha, x)? / (alpha + ff);
    Ok(RelationCheck::new(name, lhs, rhs, RELATION_TOLERANCE))
}

/// `m!·n!/(m+n)!` as a product of `m` real factors.
fn factorial_ratio(m: u64, n: u64) -> f64 {
    (1..=m).map(|i| i as f64 / (n + i) as f64).product()
}

/// Classical telescoping: `Σ_{j>lower} (1/j)·p!j!/(p+j)! = (1/p)·p!·lower!/(p+lower)!`.
fn mzv_telescoping_check(name: &str, p: u64, lower: u64, cap: usize) -> Result<RelationCheck> {
    let pf = p as f64;
    let one = C64::new(1.0, 0.0);
    let ln_fact = ln_gamma(C64::new(pf + 1.0, 0.0));
    let f = move |t: f64| (ln_fact + ln_gamma_diff(t, one, C64::new(pf + 1.0, 0.0))).exp() / t;
    let ratio = move |j: f64| C64::new(j / (pf + j + 1.0), 0.0);
    let start = lower + 1;
    let head = C64::new(factorial_ratio(p, start) / start as f64, 0.0);
    let lhs = sum_with_tail(start as i64, head, cap, &f, &ratio)?;
    let rhs = C64::new(factorial_ratio(p, lower) / pf, 0.0);
    Ok(RelationCheck::new(name, lhs, rhs, RELATION_TOLERANCE))
}

fn relations_at(m: i64, n: i64, alpha: C64, x: C64, cap: usize, suffix: &str, out: &mut Vec<RelationCheck>) -> Result<()> {
    if m >= 0 {
        gauss_checks(&format!("gauss-sum{suffix}"), m, alpha, x, cap, out)?;
        out.push(telescoping_check(&format!("telescoping{suffix}"), m, n, alpha, x, cap)?);
    }
    if n >= 0 {
        gauss_checks(&format!("gauss-sum-mirror{suffix}"), n, alpha, x, cap, out)?;
        out.push(telescoping_check(&format!("telescoping-mirror{suffix}"), n, m, alpha, x, cap)?);
    }
    Ok(())
}

/// Checks the connector relations at `(m, n)`:
///
/// - `gauss-sum`: the hypergeometric sum over `n` with fixed `m`, against its
///   value and against Gauss's closed form;
/// - `telescoping`: `Σ_{n′>n} C(m,n′)/(n′+α−x) = C(m,n)/(m+α)`, where
///   `n = −1` is the empty-side boundary;
/// - the `-mirror` forms with the roles of `m` and `n` exchanged;
/// - the same relations at `x = 0` when `x ≠ 0`;
/// - the factorial connectors of classical MZVs (`α = 1`, variables shifted by one).
///
/// Every left side is a numeric sum to `cfg.conn_m` plus an Euler–Maclaurin tail.
pub fn verify_connector_relations(m: i64, n: i64, alpha: C64, x: C64, cfg: &EvalConfig) -> Result<RelationReport> {
    require_alpha(alpha)?;
    require_alpha_minus_x(alpha, x)?;
    cfg.validate()?;
    if m < -1 || n < -1 || (m < 0 && n < 0) {
        return Err(Error::domain("need m, n ≥ −1 with at most one of them equal to −1"));
    }
    let cap = cfg.conn_m;
    let mut checks = Vec::new();
    relations_at(m, n, alpha, x, cap, "", &mut checks)?;
    let zero = C64::new(0.0, 0.0);
    if x != zero {
        relations_at(m, n, alpha, zero, cap, "@x=0", &mut checks)?;
    }
    if m >= 0 {
        checks.push(mzv_telescoping_check("mzv-telescoping", (m + 1) as u64, (n + 1) as u64, cap)?);
    }
    if n >= 0 {
        checks.push(mzv_telescoping_check("mzv-telescoping-mirror", (n + 1) as u64, (m + 1) as u64, cap)?);
    }
    Ok(RelationReport { m, n, alpha, x, checks })
}

pub const GRID_M: [i64; 3] = [0, 1, 5];
pub const GRID_N: [i64; 3] = [-1, 0, 2];

pub fn grid_alphas() -> [C64; 3] {
    [C64::new(1.0, 0.0), C64::new(1.5, 0.0), C64::new(0.8, 0.3)]
}

pub fn grid_xs() -> [C64; 3] {
    [C64::new(0.0, 0.0), C64::new(0.2, 0.0), C64::new(0.1, -0.1)]
}

/// [`verify_connector_relations`] over the standard grid, skipping points
/// with `Re(α − x) ≤ 0`.
pub fn verify_connector_grid(cfg: &EvalConfig) -> Result<Vec<RelationReport>> {
    let mut out = Vec::new();
    for alpha in grid_alphas() {
        for x in grid_xs() {
            if (alpha - x).re <= 0.0 {
                continue;
            }
            for m in GRID_M {
                for n in GRID_N {
                    out.push(verify_connector_relations(m, n, alpha, x, cfg)?);
                }
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub struct TraceStep {
    pub state: ConnectedState,
    pub value: ValueWithTail,
    /// `|value − next value|` and its tolerance; `None` on the last state.
    pub residual_to_next: Option<f64>,
    pub tolerance_to_next: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EndpointCheck {
    /// `"start"` or `"end"`.
    pub which: &'static str,
    pub index: Index,
    pub comparison: Comparison,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TraceReport {
    pub alpha: C64,
    pub x: C64,
    pub steps: Vec<TraceStep>,
    pub moves: Vec<Move>,
    /// Endpoint values against an independent one-sided evaluation.
    pub endpoints: Vec<EndpointCheck>,
}

impl TraceReport {
    pub fn max_residual(&self) -> f64 {
        self.steps.iter().filter_map(|s| s.residual_to_next).fold(0.0, f64::max)
    }

    pub fn steps_passed(&self) -> bool {
        self.steps
            .iter()
            .all(|s| match (s.residual_to_next, s.tolerance_to_next) {
                (Some(r), Some(t)) => r <= t,
                _ => true,
            })
    }

    pub fn passed(&self) -> bool {
        self.steps_passed() && self.endpoints.iter().all(|e| e.comparison.passed())
    }
}

/// Per-step tolerance `max(1e−8, 10·(tail_i + tail_{i+1}))`.
pub fn step_tolerance(tail_a: f64, tail_b: f64) -> f64 {
    TRACE_FLOOR.max(TAIL_SAFETY * (tail_a + tail_b))
}

/// Ratio beyond which a truncated `x`-series is not trusted at a point.
const SERIES_RATIO_LIMIT: f64 = 0.5;

/// Reference value of the one-sided `Z(k; ∅; α; x)` independent of the
/// transport: the one-sided evaluator at `x = 0`, otherwise the Ohno
/// generating function summed at `x`.
fn endpoint_reference(k: &Index, flavor: Flavor, alpha: C64, x: C64, cfg: &EvalConfig) -> Result<Option<ValueWithTail>> {
    if x == C64::new(0.0, 0.0) {
        return match flavor {
            Flavor::Ohno => pmzs_eval(k, alpha, cfg).map(Some),
            Flavor::Tilde => pmzs_tilde_eval(k, alpha, cfg).map(Some),
        };
    }
    if flavor == Flavor::Tilde {
        return Ok(None);
    }
    let gf = gf_coefficients(k, alpha, &cfg.with_degree(MAX_DEGREE))?;
    let coeffs = gf.value.coeffs();
    let (hi, lo) = (coeffs[MAX_DEGREE].norm(), coeffs[MAX_DEGREE - 1].norm());
    let rho = if lo > 0.0 { x.norm() * hi / lo } else { 0.0 };
    if rho >= SERIES_RATIO_LIMIT {
        return Ok(None);
    }
    let xn = x.norm();
    let mut tail: f64 = gf
        .tail_estimates
        .iter()
        .enumerate()
        .map(|(e, t)| t * xn.powi(e as i32))
        .sum();
    tail += hi * xn.powi(MAX_DEGREE as i32) * rho / (1.0 - rho);
    Ok(Some(ValueWithTail {
        value: gf.value.eval(x),
        tail_estimate: tail,
        tail_correction: gf.tail_correction.eval(x),
        terms_used: gf.terms_used,
        slow_convergence: gf.slow_convergence,
    }))
}

/// Evaluates every state of a trace at `(α, x)` and compares neighbours.
pub fn verify_trace(tr: &TransportTrace, alpha: C64, x: C64, cfg: &EvalConfig) -> Result<TraceReport> {
    let values = tr
        .states
        .iter()
        .map(|st| connected_sum_eval(st, alpha, x, cfg))
        .collect::<Result<Vec<_>>>()?;
    let mut steps = Vec::with_capacity(values.len());
    for (i, (st, v)) in tr.states.iter().zip(&values).enumerate() {
        let (residual, tol) = match values.get(i + 1) {
            Some(next) => (
                Some((v.value - next.value).norm()),
                Some(step_tolerance(v.tail_estimate, next.tail_estimate)),
            ),
            None => (None, None),
        };
        steps.push(TraceStep {
            state: st.clone(),
            value: *v,
            residual_to_next: residual,
            tolerance_to_next: tol,
        });
    }
    let mut endpoints = Vec::new();
    let end_index = dual(&tr.start)?;
    for (which, k, v) in [("start", &tr.start, &values[0]), ("end", &end_index, values.last().unwrap())] {
        if let Some(reference) = endpoint_reference(k, tr.flavor, alpha, x, cfg)? {
            endpoints.push(EndpointCheck {
                which,
                index: k.clone(),
                comparison: Comparison::new(*v, reference),
            });
        }
    }
    Ok(TraceReport {
        alpha,
        x,
        steps,
        moves: tr.moves.clone(),
        endpoints,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct SeriesTraceStep {
    pub state: ConnectedState,
    pub value: SeriesWithTail,
    /// Per-coefficient residuals and tolerances to the next state.
    pub residual_to_next: Option<Vec<f64>>,
    pub tolerance_to_next: Option<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SeriesTraceReport {
    pub alpha: C64,
    pub degree: usize,
    pub steps: Vec<SeriesTraceStep>,
    pub moves: Vec<Move>,
}

impl SeriesTraceReport {
    pub fn max_residual(&self) -> f64 {
        self.steps
            .iter()
            .filter_map(|s| s.residual_to_next.as_ref())
            .flatten()
            .copied()
            .fold(0.0, f64::max)
    }

    pub fn passed(&self) -> bool {
        self.steps.iter().all(|s| match (&s.residual_to_next, &s.tolerance_to_next) {
            (Some(r), Some(t)) => r.iter().zip(t).all(|(r, t)| r <= t),
            _ => true,
        })
    }
}

/// [`verify_trace`] with `x` kept formal: every state is expanded to degree
/// `cfg.degree` and neighbours are compared coefficient by coefficient.
pub fn verify_trace_series(tr: &TransportTrace, alpha: C64, cfg: &EvalConfig) -> Result<SeriesTraceReport> {
    let values = tr
        .states
        .iter()
        .map(|st| connected_sum_series(st, alpha, cfg))
        .collect::<Result<Vec<_>>>()?;
    let steps = tr
        .states
        .iter()
        .zip(&values)
        .enumerate()
        .map(|(i, (st, v))| {
            let next = values.get(i + 1);
            SeriesTraceStep {
                state: st.clone(),
                value: v.clone(),
                residual_to_next: next.map(|w| coefficient_gaps(&v.value, &w.value)),
                tolerance_to_next: next.map(|w| {
                    v.tail_estimates
                        .iter()
                        .zip(&w.tail_estimates)
                        .map(|(a, b)| step_tolerance(*a, *b))
                        .collect()
                }),
            }
        })
        .collect();
    Ok(SeriesTraceReport {
        alpha,
        degree: cfg.degree,
        steps,
        moves: tr.moves.clone(),
    })
}

fn coefficient_gaps(a: &TruncatedSeries, b: &TruncatedSeries) -> Vec<f64> {
    a.coeffs().iter().zip(b.coeffs()).map(|(p, q)| (p - q).norm()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn real(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    fn state(l: &[u32], r: &[u32]) -> ConnectedState {
        ConnectedState::new(Index::new(l.to_vec()).unwrap(), Index::new(r.to_vec()).unwrap(), Flavor::Ohno).unwrap()
    }

    #[test]
    fn move_examples() {
        let s = state(&[1, 2], &[]);
        let s = apply_move(&s, MoveKind::Entry).unwrap();
        assert_eq!(s, state(&[1, 1], &[1]));
        let s = apply_move(&s, MoveKind::Pop).unwrap();
        assert_eq!(s, state(&[1], &[2]));
        let s = apply_move(&s, MoveKind::Exit).unwrap();
        assert_eq!(s, state(&[], &[3]));
    }

    #[test]
    fn illegal_moves_are_rejected() {
        assert!(matches!(
            apply_move(&state(&[1, 2], &[]), MoveKind::Pop),
            Err(Error::IllegalMove { .. })
        ));
        assert!(apply_move(&state(&[1, 1], &[1]), MoveKind::Shift).is_err());
        assert!(apply_move(&state(&[2], &[1]), MoveKind::Exit).is_err());
        assert!(apply_move(&state(&[2], &[1]), MoveKind::Entry).is_err());
        assert!(apply_move(&state(&[1], &[]), MoveKind::Exit).is_err());
        assert!(apply_move(&state(&[], &[2]), MoveKind::Shift).is_err());
        assert!(ConnectedState::new(Index::empty(), Index::empty(), Flavor::Ohno).is_err());
    }

    #[test]
    fn transport_examples() {
        let t = transport(&Index::from([2]), Flavor::Ohno).unwrap();
        assert_eq!(t.states, vec![state(&[2], &[]), state(&[1], &[1]), state(&[], &[2])]);

        let t = transport(&Index::from([1, 2]), Flavor::Ohno).unwrap();
        assert_eq!(t.moves.len(), 3);
        assert_eq!(t.end(), &state(&[], &[3]));

        let t = transport(&Index::from([2, 3]), Flavor::Ohno).unwrap();
        let kinds: Vec<_> = t.moves.iter().map(|m| m.kind).collect();
        use MoveKind::*;
        assert_eq!(kinds, [Entry, Shift, Pop, Shift, Exit]);
        assert_eq!(t.end().right(), &Index::from([1, 2, 2]));
        let labels: Vec<_> = t.moves.iter().map(Move::label).collect();
        assert_eq!(labels[0], "gauss-sum[r=2,s=1]");
        assert_eq!(labels[4], "gauss-sum-mirror[r=1,s=3]");

        assert!(transport(&Index::from([2, 1]), Flavor::Ohno).is_err());
    }

    #[test]
    fn one_sided_states_match_series_engine() {
        let cfg = EvalConfig::default().with_trunc(2_000).with_conn(2_000);
        let k = Index::from([1, 3]);
        let z = connected_sum_eval(&ConnectedState::start(&k, Flavor::Ohno).unwrap(), real(1.3), real(0.0), &cfg).unwrap();
        assert_eq!(z, pmzs_eval(&k, real(1.3), &cfg).unwrap());
        let zt = connected_sum_eval(&ConnectedState::start(&k, Flavor::Tilde).unwrap(), real(1.3), real(0.0), &cfg).unwrap();
        assert_eq!(zt, pmzs_tilde_eval(&k, real(1.3), &cfg).unwrap());
        let mirrored = ConnectedState::new(Index::empty(), k.clone(), Flavor::Ohno).unwrap();
        assert_eq!(connected_sum_eval(&mirrored, real(1.3), real(0.0), &cfg).unwrap(), z);
    }

    #[test]
    fn first_entry_move_for_two() {
        let cfg = EvalConfig::default();
        let z = connected_sum_eval(&state(&[1], &[1]), real(1.0), real(0.0), &cfg).unwrap();
        assert!((z.extrapolated().re - PI * PI / 6.0).abs() < 1e-6, "{z:?}");
        assert!((z.value.re - PI * PI / 6.0).abs() <= 10.0 * z.tail_estimate);
    }

    #[test]
    fn series_and_point_agree() {
        let cfg = EvalConfig::default().with_conn(3_000).with_degree(10);
        let st = state(&[2], &[1, 1]);
        let alpha = real(1.4);
        let s = connected_sum_series(&st, alpha, &cfg).unwrap();
        let x = real(0.05);
        let p = connected_sum_eval(&st, alpha, x, &cfg).unwrap();
        assert!((s.value.eval(x) - p.value).norm() < 1e-9);
    }

    #[test]
    fn relation_examples() {
        let cfg = EvalConfig::default();
        let r = verify_connector_relations(0, -1, real(1.0), real(0.0), &cfg).unwrap();
        let gauss = r.checks.iter().find(|c| c.name == "gauss-sum").unwrap();
        assert!((gauss.rhs - 1.0).norm() < 1e-15);
        assert!(gauss.passed(), "{gauss:?}");
        let mzv = r.checks.iter().find(|c| c.name == "mzv-telescoping").unwrap();
        assert!(mzv.passed(), "{mzv:?}");
        assert!(r.passed(), "{r:?}");

        let r = verify_connector_relations(2, 1, real(1.5), real(0.2), &cfg).unwrap();
        let tel = r.checks.iter().find(|c| c.name == "telescoping").unwrap();
        assert!(tel.residual <= 1e-10, "{tel:?}");
        assert!(r.passed(), "{r:?}");
    }

    #[test]
    fn relation_domain() {
        let cfg = EvalConfig::default();
        assert!(verify_connector_relations(-1, -1, real(1.0), real(0.0), &cfg).is_err());
        assert!(verify_connector_relations(0, 0, real(1.0), real(1.5), &cfg).is_err());
        assert!(connected_sum_eval(&state(&[1], &[1]), real(1.0), real(1.0), &cfg).is_err());
        assert!(connected_sum_eval(&state(&[2, 1], &[]), real(1.0), real(0.0), &cfg).is_err());
    }

    #[test]
    fn factorial_ratio_is_inverse_binomial() {
        assert!((factorial_ratio(2, 3) - 2.0 * 6.0 / 120.0).abs() < 1e-16);
        assert_eq!(factorial_ratio(0, 5), 1.0);
    }
}
