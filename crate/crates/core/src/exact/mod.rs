//! Exact big-integer counts of symmetric 0-1 matrices with given row sums.
//!
//! Simple graphs are counted by memoized recursion on the sorted residual degree
//! multiset: remove a vertex of largest residual degree, branch over how many of its
//! neighbours come from each residual-degree class (weighting each branch by the
//! product of binomials), and recurse on the reduced multiset. Loopy counts sum
//! simple counts over diagonals, grouped by degree class.

mod cache;

pub use cache::{CountCache, MemoKey};

use num_bigint::BigUint;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::real::Real;
use crate::sequence::{DegreeSequence, LoopModel};
use crate::special::{binomial_big, ln_biguint};

/// Exact nonnegative count of unbounded size.
pub type BigCount = BigUint;

pub const DEFAULT_ENTRY_CAP: usize = 50_000_000;

/// Counting engine owning the memo table.
#[derive(Debug)]
pub struct ExactCounter {
    cache: CountCache,
    entry_cap: usize,
}

impl Default for ExactCounter {
    fn default() -> Self {
        Self::new()
    }
}

/// Run-length form of a degree multiset: `(degree, multiplicity)` pairs, strictly
/// decreasing in degree, no zero multiplicities.
type Runs = Vec<(u32, u32)>;

fn runs_from_degrees(degrees: &[u32]) -> Runs {
    let mut sorted = degrees.to_vec();
    sorted.sort_unstable_by(|a, b| b.cmp(a));
    let mut runs: Runs = Vec::new();
    for d in sorted {
        push_run(&mut runs, d, 1);
    }
    runs
}

#[inline]
fn push_run(runs: &mut Runs, value: u32, mult: u32) {
    if mult == 0 {
        return;
    }
    match runs.last_mut() {
        Some((v, m)) if *v == value => *m += mult,
        _ => runs.push((value, mult)),
    }
}

/// Drops zero degrees and replaces the multiset by its complement (`d -> n' - 1 - d`)
/// while that lowers the degree sum. Returns `false` if some degree exceeds `n' - 1`,
/// i.e. the count is zero.
fn canonicalize(runs: &mut Runs) -> bool {
    loop {
        if runs.last().is_some_and(|r| r.0 == 0) {
            runs.pop();
        }
        let n: u64 = runs.iter().map(|r| r.1 as u64).sum();
        if n == 0 {
            return true;
        }
        if runs[0].0 as u64 > n - 1 {
            return false;
        }
        let total: u64 = runs.iter().map(|r| r.0 as u64 * r.1 as u64).sum();
        if n * (n - 1) - total >= total {
            return true;
        }
        let top = (n - 1) as u32;
        runs.reverse();
        for r in runs.iter_mut() {
            r.0 = top - r.0;
        }
    }
}

/// Erdős–Gallai test on a nonincreasing zero-free list.
fn is_graphical(deg: &[u32]) -> bool {
    let n = deg.len();
    // suffix[i] = Σ_{j >= i} d_j
    let mut suffix = vec![0u64; n + 1];
    for i in (0..n).rev() {
        suffix[i] = suffix[i + 1] + deg[i] as u64;
    }
    let mut lhs = 0u64;
    // `p` = number of degrees >= k, nonincreasing in k
    let mut p = n;
    for k in 1..=n {
        lhs += deg[k - 1] as u64;
        while p > 0 && (deg[p - 1] as usize) < k {
            p -= 1;
        }
        let kk = k as u64;
        // indices i >= k (0-based) with d_i >= k contribute k, the rest contribute d_i
        let split = p.max(k);
        let rhs = kk * (kk - 1) + kk * (split - k) as u64 + suffix[split];
        if lhs > rhs {
            return false;
        }
        if deg[k - 1] as usize <= k {
            // past the Durfee square the remaining inequalities hold
            break;
        }
    }
    true
}

fn expand_runs(runs: &Runs) -> Vec<u32> {
    let mut out = Vec::new();
    for &(v, m) in runs {
        out.extend(std::iter::repeat_n(v, m as usize));
    }
    out
}

fn flatten(runs: &Runs, out: &mut Vec<u32>) {
    out.clear();
    for &(v, m) in runs {
        out.push(v);
        out.push(m);
    }
}

/// Allocation-free `acc += x * w` for big `x` and `u128` weights.
#[derive(Default)]
struct Accumulator {
    limbs: Vec<u64>,
}

impl Accumulator {
    fn add_scaled(&mut self, x: &BigUint, w: u128) {
        let lo = w as u64;
        let hi = (w >> 64) as u64;
        self.add_mul_digit(x, lo, 0);
        if hi != 0 {
            self.add_mul_digit(x, hi, 1);
        }
    }

    fn add_mul_digit(&mut self, x: &BigUint, m: u64, offset: usize) {
        let mut carry: u128 = 0;
        let mut idx = offset;
        for d in x.iter_u64_digits() {
            if idx >= self.limbs.len() {
                self.limbs.push(0);
            }
            let t = self.limbs[idx] as u128 + d as u128 * m as u128 + carry;
            self.limbs[idx] = t as u64;
            carry = t >> 64;
            idx += 1;
        }
        while carry != 0 {
            if idx >= self.limbs.len() {
                self.limbs.push(0);
            }
            let t = self.limbs[idx] as u128 + carry;
            self.limbs[idx] = t as u64;
            carry = t >> 64;
            idx += 1;
        }
    }

    fn add_big(&mut self, x: &BigUint) {
        self.add_mul_digit(x, 1, 0);
    }

    fn into_biguint(self) -> BigUint {
        let mut digits = Vec::with_capacity(self.limbs.len() * 2);
        for l in self.limbs {
            digits.push(l as u32);
            digits.push((l >> 32) as u32);
        }
        BigUint::new(digits)
    }
}

/// Neighbour-profile enumeration for one removed vertex.
struct Branching {
    /// Residual classes after removing the vertex, decreasing degree.
    classes: Runs,
    /// `capacity[i]` = total multiplicity of `classes[i..]`.
    capacity: Vec<u32>,
    /// Chosen neighbour count per class.
    picks: Vec<u32>,
}

impl Branching {
    fn child(&self) -> Runs {
        let mut child = Vec::with_capacity(self.classes.len() * 2);
        for (&(v, m), &k) in self.classes.iter().zip(&self.picks) {
            push_run(&mut child, v, m - k);
            push_run(&mut child, v - 1, k);
        }
        child
    }
}

impl ExactCounter {
    pub fn new() -> Self {
        Self::with_cache(CountCache::new(), DEFAULT_ENTRY_CAP)
    }

    pub fn with_entry_cap(entry_cap: usize) -> Self {
        Self::with_cache(CountCache::new(), entry_cap)
    }

    pub fn with_cache(cache: CountCache, entry_cap: usize) -> Self {
        ExactCounter { cache, entry_cap }
    }

    pub fn cache(&self) -> &CountCache {
        &self.cache
    }

    pub fn into_cache(self) -> CountCache {
        self.cache
    }

    pub fn entry_cap(&self) -> usize {
        self.entry_cap
    }

    /// Number of loopless simple graphs with the given degrees (zero diagonal).
    pub fn count_simple(&self, seq: &DegreeSequence) -> Result<BigCount> {
        self.simple(runs_from_degrees(seq.degrees()))
    }

    fn simple(&self, runs: Runs) -> Result<BigCount> {
        let mut acc = Accumulator::default();
        self.accumulate(runs, 1, &mut acc)?;
        Ok(acc.into_biguint())
    }

    /// Adds `weight * G(runs)` into `acc`, computing and memoizing `G(runs)` on a miss.
    fn accumulate(&self, mut runs: Runs, weight: u128, acc: &mut Accumulator) -> Result<()> {
        if !canonicalize(&mut runs) {
            return Ok(());
        }
        if runs.is_empty() {
            acc.add_scaled(&BigUint::one(), weight);
            return Ok(());
        }
        let total: u64 = runs.iter().map(|r| r.0 as u64 * r.1 as u64).sum();
        if total % 2 == 1 {
            return Ok(());
        }
        let mut flat = Vec::with_capacity(runs.len() * 2);
        flatten(&runs, &mut flat);
        if self
            .cache
            .with_flat(&flat, |v| acc.add_scaled(v, weight))
            .is_some()
        {
            return Ok(());
        }
        let value = if is_graphical(&expand_runs(&runs)) {
            self.expand(&runs)?
        } else {
            BigUint::zero()
        };
        if self.cache.len() >= self.entry_cap {
            return Err(Error::ResourceLimit {
                cap: self.entry_cap,
            });
        }
        acc.add_scaled(&value, weight);
        self.cache.insert(MemoKey::from_flat(flat), value);
        Ok(())
    }

    /// Removes one vertex of largest degree and sums over neighbour profiles.
    fn expand(&self, runs: &Runs) -> Result<BigCount> {
        let removed = runs[0].0;
        let mut classes = runs.clone();
        classes[0].1 -= 1;
        if classes[0].1 == 0 {
            classes.remove(0);
        }
        let mut capacity = vec![0u32; classes.len() + 1];
        for i in (0..classes.len()).rev() {
            capacity[i] = capacity[i + 1] + classes[i].1;
        }
        let picks = vec![0; classes.len()];
        let mut br = Branching {
            classes,
            capacity,
            picks,
        };
        let mut acc = Accumulator::default();
        self.branch(&mut br, 0, removed, 1, &mut acc)?;
        Ok(acc.into_biguint())
    }

    fn branch(
        &self,
        br: &mut Branching,
        idx: usize,
        remaining: u32,
        weight: u128,
        acc: &mut Accumulator,
    ) -> Result<()> {
        if idx == br.classes.len() {
            return self.accumulate(br.child(), weight, acc);
        }
        let mult = br.classes[idx].1;
        let lo = remaining.saturating_sub(br.capacity[idx + 1]);
        let hi = remaining.min(mult);
        let mut binom = binomial_u128(mult, lo)?;
        for k in lo..=hi {
            br.picks[idx] = k;
            match weight.checked_mul(binom) {
                Some(w) => self.branch(br, idx + 1, remaining - k, w, acc)?,
                None => {
                    // only reachable for very large multisets; finish this subtree in big integers
                    let mut sub = Accumulator::default();
                    self.branch(br, idx + 1, remaining - k, 1, &mut sub)?;
                    acc.add_big(
                        &(sub.into_biguint() * BigUint::from(weight) * BigUint::from(binom)),
                    );
                }
            }
            // C(mult, k+1) = C(mult, k) (mult - k) / (k + 1)
            if k < hi {
                binom = binom
                    .checked_mul((mult - k) as u128)
                    .ok_or_else(|| Error::Range("branch multiplicity overflows 128 bits".into()))?
                    / (k + 1) as u128;
            }
        }
        br.picks[idx] = 0;
        Ok(())
    }

    /// Diagonal classes: for each distinct degree value, how many of its vertices carry a loop.
    /// Yields `(trace, multiplicity, residual degrees)` for every admissible choice.
    fn diagonals(seq: &DegreeSequence, model: LoopModel) -> Vec<(usize, BigUint, Vec<u32>)> {
        let mut sorted = seq.degrees().to_vec();
        sorted.sort_unstable_by(|a, b| b.cmp(a));
        let mut classes: Vec<(u32, u32)> = Vec::new();
        for &d in &sorted {
            match classes.last_mut() {
                Some((v, m)) if *v == d => *m += 1,
                _ => classes.push((d, 1)),
            }
        }
        let w = model.weight();
        let mut out = Vec::new();
        let mut choice = vec![0u32; classes.len()];
        loop {
            let mut residual = Vec::with_capacity(sorted.len());
            let mut mult = BigUint::one();
            let mut trace = 0usize;
            for (&(v, m), &k) in classes.iter().zip(&choice) {
                residual.extend(std::iter::repeat_n(v, (m - k) as usize));
                residual.extend(std::iter::repeat_n(v.saturating_sub(w), k as usize));
                mult *= binomial_big(m as u64, k as u64);
                trace += k as usize;
            }
            out.push((trace, mult, residual));
            // odometer over k_i in 0..=m_i, skipping classes whose degree is below D
            let mut i = 0;
            loop {
                if i == classes.len() {
                    return out;
                }
                let (v, m) = classes[i];
                if v >= w && choice[i] < m {
                    choice[i] += 1;
                    break;
                }
                choice[i] = 0;
                i += 1;
            }
        }
    }

    /// Exact counts `G_D(d, ℓ)` for every trace `ℓ = 0..=n`.
    pub fn trace_counts(&self, seq: &DegreeSequence, model: LoopModel) -> Result<Vec<BigCount>> {
        let n = seq.len();
        let diagonals = Self::diagonals(seq, model);
        let parts: Vec<Result<(usize, BigUint)>> = diagonals
            .into_par_iter()
            .map(|(trace, mult, residual)| {
                let c = self.simple(runs_from_degrees(&residual))?;
                Ok((trace, c * mult))
            })
            .collect();
        let mut out = vec![BigUint::zero(); n + 1];
        for p in parts {
            let (trace, c) = p?;
            out[trace] += c;
        }
        Ok(out)
    }

    /// `G_D(d)`: all symmetric 0-1 matrices whose row sums, with diagonal entries
    /// weighted by `D`, equal the sequence.
    pub fn count_loopy(&self, seq: &DegreeSequence, model: LoopModel) -> Result<BigCount> {
        if model == LoopModel::Twice && seq.sum() % 2 == 1 {
            return Ok(BigUint::zero());
        }
        Ok(self.trace_counts(seq, model)?.into_iter().sum())
    }

    /// `G_D(d, ℓ)`: members of `G_D(d)` with exactly `ell` loops.
    pub fn count_loopy_by_trace(
        &self,
        seq: &DegreeSequence,
        model: LoopModel,
        ell: usize,
    ) -> Result<BigCount> {
        if ell > seq.len() {
            return Ok(BigUint::zero());
        }
        let parity_ok = match model {
            LoopModel::Once => (seq.sum() + ell as u64).is_multiple_of(2),
            LoopModel::Twice => seq.sum().is_multiple_of(2),
        };
        if !parity_ok {
            return Ok(BigUint::zero());
        }
        let diagonals: Vec<_> = Self::diagonals(seq, model)
            .into_iter()
            .filter(|(t, _, _)| *t == ell)
            .collect();
        let parts: Vec<Result<BigUint>> = diagonals
            .into_par_iter()
            .map(|(_, mult, residual)| Ok(self.simple(runs_from_degrees(&residual))? * mult))
            .collect();
        parts.into_iter().sum()
    }

    /// Self-test of the loop-to-apex bijection: `G_1(d, ℓ) = G((d, ℓ))`.
    pub fn check_loop_bijection(&self, seq: &DegreeSequence, ell: usize) -> Result<bool> {
        let loopy = if ell > seq.len() {
            BigUint::zero()
        } else {
            self.count_loopy_by_trace(seq, LoopModel::Once, ell)?
        };
        let apex = self.count_simple(&seq.with_appended(ell as u32))?;
        Ok(loopy == apex)
    }
}

fn binomial_u128(n: u32, k: u32) -> Result<u128> {
    let k = k.min(n - k) as u128;
    let n = n as u128;
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc
            .checked_mul(n - i)
            .ok_or_else(|| Error::Range("branch multiplicity overflows 128 bits".into()))?
            / (i + 1);
    }
    Ok(acc)
}

/// Natural log of a positive count, from its bit length and leading bits.
pub fn log_big(count: &BigCount) -> Result<Real> {
    if count.is_zero() {
        return Err(Error::LogOfZero);
    }
    Ok(ln_biguint(count))
}
