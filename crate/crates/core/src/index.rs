//! Index combinatorics: admissibility, run decomposition, duality and the
//! weak compositions used by Ohno shifts.

use std::fmt;
use std::str::FromStr;

use crate::{Error, Result};

/// Largest weight (or shift) accepted by the enumeration entry points.
pub const WEIGHT_CAP: u32 = 64;

/// Largest number of compositions a single call may materialise.
pub const COMPOSITION_COUNT_CAP: u64 = 10_000_000;

/// An ordered tuple of positive integers `(k₁,…,k_r)`, possibly empty.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Index(Vec<u32>);

impl Index {
    pub fn new(parts: Vec<u32>) -> Result<Self> {
        if let Some(pos) = parts.iter().position(|&p| p == 0) {
            return Err(Error::domain(format!(
                "index parts must be positive (part {} is 0)",
                pos + 1
            )));
        }
        Ok(Index(parts))
    }

    pub fn empty() -> Self {
        Index(Vec::new())
    }

    pub fn parts(&self) -> &[u32] {
        &self.0
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn depth(&self) -> usize {
        self.0.len()
    }

    pub fn weight(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn last(&self) -> Option<u32> {
        self.0.last().copied()
    }

    /// Nonempty with last part at least 2.
    pub fn is_admissible(&self) -> bool {
        matches!(self.last(), Some(k) if k >= 2)
    }

    pub fn require_admissible(&self) -> Result<()> {
        if self.is_admissible() {
            Ok(())
        } else {
            Err(Error::NotAdmissible(self.to_string()))
        }
    }

    /// Adds `shift[i]` to part `i`.
    pub fn shifted(&self, shift: &Composition) -> Index {
        assert_eq!(shift.parts().len(), self.depth(), "shift length must match depth");
        Index(
            self.0
                .iter()
                .zip(shift.parts())
                .map(|(k, e)| k + e)
                .collect(),
        )
    }

    pub(crate) fn push(&mut self, part: u32) {
        debug_assert!(part >= 1);
        self.0.push(part);
    }

    pub(crate) fn pop(&mut self) -> Option<u32> {
        self.0.pop()
    }

    pub(crate) fn last_mut(&mut self) -> Option<&mut u32> {
        self.0.last_mut()
    }
}

impl fmt::Display for Index {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, k) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{k}")?;
        }
        Ok(())
    }
}

impl FromStr for Index {
    type Err = Error;

    /// Parses `"k1,k2,...,kr"`; the empty string is rejected.
    fn from_str(s: &str) -> Result<Self> {
        let trimmed = s.trim();
        if trimmed.is_empty() {
            return Err(Error::parse(s, "empty index literal"));
        }
        let parts = trimmed
            .split(',')
            .map(|tok| {
                let tok = tok.trim();
                match tok.parse::<u32>() {
                    Ok(0) => Err(Error::parse(tok, "index parts must be positive")),
                    Ok(k) => Ok(k),
                    Err(_) => Err(Error::parse(tok, "expected a positive decimal integer")),
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Index(parts))
    }
}

impl From<&[u32]> for Index {
    /// Panics on a zero part; intended for literals in tests and examples.
    fn from(parts: &[u32]) -> Self {
        Index::new(parts.to_vec()).expect("index parts must be positive")
    }
}

impl<const N: usize> From<[u32; N]> for Index {
    fn from(parts: [u32; N]) -> Self {
        Index::from(&parts[..])
    }
}

/// `(weight, depth)`.
pub fn measures(idx: &Index) -> (u32, usize) {
    (idx.weight(), idx.depth())
}

/// One run `({1}^{a−1}, b+1)` of an admissible index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Run {
    pub a: u32,
    pub b: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RunForm(Vec<Run>);

impl RunForm {
    pub fn new(runs: Vec<Run>) -> Result<Self> {
        if runs.is_empty() {
            return Err(Error::domain("a run form needs at least one run"));
        }
        if runs.iter().any(|r| r.a == 0 || r.b == 0) {
            return Err(Error::domain("run lengths a and b must be positive"));
        }
        Ok(RunForm(runs))
    }

    pub fn runs(&self) -> &[Run] {
        &self.0
    }

    /// Rebuilds `({1}^{a₁−1}, b₁+1, …, {1}^{a_t−1}, b_t+1)`.
    pub fn reassemble(&self) -> Index {
        let mut parts = Vec::new();
        for run in &self.0 {
            parts.extend(std::iter::repeat(1).take(run.a as usize - 1));
            parts.push(run.b + 1);
        }
        Index(parts)
    }
}

pub fn run_decompose(idx: &Index) -> Result<RunForm> {
    idx.require_admissible()?;
    let mut runs = Vec::new();
    let mut ones = 0u32;
    for &k in idx.parts() {
        if k == 1 {
            ones += 1;
        } else {
            runs.push(Run { a: ones + 1, b: k - 1 });
            ones = 0;
        }
    }
    Ok(RunForm(runs))
}

/// Swaps the roles of `a` and `b` in every run and reverses the run order.
pub fn dual(idx: &Index) -> Result<Index> {
    let form = run_decompose(idx)?;
    let swapped = form
        .runs()
        .iter()
        .rev()
        .map(|r| Run { a: r.b, b: r.a })
        .collect();
    Ok(RunForm(swapped).reassemble())
}

/// A weak composition `(e₁,…,e_r)` of `target`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Composition {
    parts: Vec<u32>,
    target: u32,
}

impl Composition {
    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    pub fn target(&self) -> u32 {
        self.target
    }
}

fn binomial(n: u64, k: u64) -> u64 {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return u64::MAX;
        }
    }
    acc as u64
}

/// Number of weak compositions of `m` into `r` parts, `C(m+r−1, r−1)`.
pub fn composition_count(m: u32, r: u32) -> u64 {
    if r == 0 {
        return u64::from(m == 0);
    }
    binomial(u64::from(m) + u64::from(r) - 1, u64::from(r) - 1)
}

/// All weak compositions of `m` into `r` parts in lexicographic order.
pub fn compositions(m: u32, r: u32) -> Result<Vec<Composition>> {
    if r == 0 {
        return Err(Error::domain("compositions need at least one part"));
    }
    for (what, value) in [("shift", m), ("part count", r)] {
        if value > WEIGHT_CAP {
            return Err(Error::Cap {
                what,
                value: u64::from(value),
                cap: u64::from(WEIGHT_CAP),
            });
        }
    }
    let count = composition_count(m, r);
    if count > COMPOSITION_COUNT_CAP {
        return Err(Error::Cap {
            what: "composition count",
            value: count,
            cap: COMPOSITION_COUNT_CAP,
        });
    }

    let r = r as usize;
    let mut out = Vec::with_capacity(count as usize);
    let mut current = vec![0u32; r];
    fill(&mut current, 0, m, m, &mut out);
    Ok(out)
}

fn fill(current: &mut [u32], pos: usize, remaining: u32, target: u32, out: &mut Vec<Composition>) {
    if pos + 1 == current.len() {
        current[pos] = remaining;
        out.push(Composition {
            parts: current.to_vec(),
            target,
        });
        return;
    }
    for e in 0..=remaining {
        current[pos] = e;
        fill(current, pos + 1, remaining - e, target, out);
    }
}

/// Every admissible index of the given weight (there are `2^{w−2}` for `w ≥ 2`),
/// in lexicographic order.
pub fn admissible_indices(weight: u32) -> Result<Vec<Index>> {
    if weight > WEIGHT_CAP {
        return Err(Error::Cap {
            what: "weight",
            value: u64::from(weight),
            cap: u64::from(WEIGHT_CAP),
        });
    }
    if weight < 2 {
        return Ok(Vec::new());
    }
    // Compositions of `weight` correspond to subsets of the w−1 cut points.
    let cuts = weight - 1;
    if cuts > 40 {
        return Err(Error::Cap {
            what: "admissible index count (log2)",
            value: u64::from(cuts),
            cap: 40,
        });
    }
    let mut out = Vec::new();
    for mask in 0u64..(1u64 << cuts) {
        let mut parts = Vec::new();
        let mut run = 1u32;
        for bit in 0..cuts {
            if mask >> (cuts - 1 - bit) & 1 == 1 {
                parts.push(run);
                run = 1;
            } else {
                run += 1;
            }
        }
        parts.push(run);
        if run >= 2 {
            out.push(Index(parts));
        }
    }
    out.sort();
    Ok(out)
}
