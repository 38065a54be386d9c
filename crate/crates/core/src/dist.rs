//! Poisson binomial laws and the trace distributions of random loopy matrices.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::exact::ExactCounter;
use crate::real::Real;
use crate::sequence::{lbar_from_stats, DegreeSequence, LoopModel};
use crate::special::ln_binomial;

/// Violations of `[0, 1]` up to this size are treated as rounding and clamped.
pub const CLAMP_TOLERANCE: f64 = 1e-9;

/// Success probabilities `p_1..p_n` of independent Bernoulli variables.
///
/// Entries are only required to lie in `[0, 1]` where they are used as probabilities;
/// the moment identities accept arbitrary reals.
#[derive(Debug, Clone, PartialEq)]
pub struct PoissonBinomialParams {
    pub p: Vec<f64>,
}

impl PoissonBinomialParams {
    pub fn new(p: Vec<f64>) -> Self {
        PoissonBinomialParams { p }
    }

    pub fn len(&self) -> usize {
        self.p.len()
    }

    pub fn is_empty(&self) -> bool {
        self.p.is_empty()
    }

    /// `X̄ = Σ p_j`.
    pub fn mean(&self) -> f64 {
        self.power_sum(1)
    }

    /// `Σ p_j^m`.
    pub fn power_sum(&self, m: i32) -> f64 {
        self.p.iter().map(|x| x.powi(m)).sum()
    }

    fn check_probabilities(&self) -> Result<()> {
        match self.p.iter().position(|x| !(0.0..=1.0).contains(x)) {
            Some(j) => Err(Error::Range(format!(
                "p[{j}] = {} is not a probability",
                self.p[j]
            ))),
            None => Ok(()),
        }
    }
}

/// A probability mass function on `0..=n`.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceLaw {
    pub pmf: Vec<f64>,
    /// When set, only values of this parity carry mass.
    pub support_parity: Option<u8>,
}

impl TraceLaw {
    /// Normalizes nonnegative weights, zeroing entries outside `parity` when given.
    pub fn from_weights(mut weights: Vec<f64>, parity: Option<u8>) -> Result<TraceLaw> {
        if let Some(rho) = parity {
            for (l, w) in weights.iter_mut().enumerate() {
                if l % 2 != rho as usize {
                    *w = 0.0;
                }
            }
        }
        let total: f64 = weights.iter().sum();
        if total.is_nan() || total <= 0.0 || !total.is_finite() {
            return Err(Error::EmptyClass("law has no mass"));
        }
        for w in &mut weights {
            *w /= total;
        }
        Ok(TraceLaw {
            pmf: weights,
            support_parity: parity,
        })
    }

    pub fn prob(&self, ell: usize) -> f64 {
        self.pmf.get(ell).copied().unwrap_or(0.0)
    }

    pub fn total(&self) -> f64 {
        self.pmf.iter().sum()
    }

    pub fn mean(&self) -> f64 {
        self.pmf.iter().enumerate().map(|(l, p)| l as f64 * p).sum()
    }

    /// `Σ_{k<ℓ} P(k) P(ℓ) (k - ℓ)²`, free of cancellation.
    pub fn variance(&self) -> f64 {
        let mut acc = 0.0;
        for (k, pk) in self.pmf.iter().enumerate() {
            if *pk == 0.0 {
                continue;
            }
            for (l, pl) in self.pmf.iter().enumerate().skip(k + 1) {
                let gap = (l - k) as f64;
                acc += pk * pl * gap * gap;
            }
        }
        acc
    }

    /// `E(Z²) - E(Z)²`.
    pub fn variance_raw(&self) -> f64 {
        let m = self.mean();
        let second: f64 = self
            .pmf
            .iter()
            .enumerate()
            .map(|(l, p)| (l * l) as f64 * p)
            .sum();
        second - m * m
    }

    /// `E(f(Z))` for a function of the trace.
    pub fn expect(&self, f: impl Fn(usize) -> f64) -> f64 {
        self.pmf.iter().enumerate().map(|(l, p)| f(l) * p).sum()
    }

    /// `P(Z ≤ t)`.
    pub fn cdf(&self, t: f64) -> f64 {
        self.pmf
            .iter()
            .enumerate()
            .filter(|(l, _)| (*l as f64) <= t)
            .map(|(_, p)| p)
            .sum()
    }

    /// `P(Z ≥ t)`.
    pub fn upper_tail(&self, t: f64) -> f64 {
        self.pmf
            .iter()
            .enumerate()
            .filter(|(l, _)| (*l as f64) >= t)
            .map(|(_, p)| p)
            .sum()
    }

    /// Total-variation distance; the shorter support is padded with zeros.
    pub fn tv_distance(&self, other: &TraceLaw) -> f64 {
        let len = self.pmf.len().max(other.pmf.len());
        0.5 * (0..len)
            .map(|l| (self.prob(l) - other.prob(l)).abs())
            .sum::<f64>()
    }
}

/// Exact PMF of `PB(p)` by folding in one Bernoulli variable at a time.
pub fn pb_pmf(params: &PoissonBinomialParams) -> Result<TraceLaw> {
    params.check_probabilities()?;
    let mut row = Vec::with_capacity(params.len() + 1);
    row.push(1.0);
    for &p in &params.p {
        row.push(0.0);
        for l in (1..row.len()).rev() {
            row[l] = row[l] * (1.0 - p) + row[l - 1] * p;
        }
        row[0] *= 1.0 - p;
    }
    Ok(TraceLaw {
        pmf: row,
        support_parity: None,
    })
}

/// A real polynomial `c_0 + c_1 t + ... + c_k t^k` with `k ≤ 8`.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

impl Polynomial {
    pub const MAX_DEGREE: usize = 8;

    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        let mut coeffs = coeffs;
        while coeffs.len() > 1 && coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        if coeffs.len() > Self::MAX_DEGREE + 1 {
            return Err(Error::UnsupportedOrder(coeffs.len() as u32 - 1));
        }
        Ok(Polynomial { coeffs })
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * t + c)
    }
}

/// `S(k, j)` for `k ≤ 8`.
fn stirling2(k: usize) -> Vec<Vec<f64>> {
    let mut s = vec![vec![0.0; k + 1]; k + 1];
    s[0][0] = 1.0;
    for a in 1..=k {
        for b in 1..=a {
            s[a][b] = b as f64 * s[a - 1][b] + s[a - 1][b - 1];
        }
    }
    s
}

/// `j! e_j` for `j ≤ k`, where `e_j` is the elementary symmetric sum of the factors
/// produced by `factor(p) = (keep, take)` in the product `∏ (keep_j + take_j w)`.
fn factorial_moments(
    params: &PoissonBinomialParams,
    k: usize,
    factor: impl Fn(f64) -> (Real, Real),
) -> Vec<Real> {
    let mut row = vec![Real::ZERO; k + 1];
    row[0] = Real::ONE;
    for &p in &params.p {
        let (keep, take) = factor(p);
        for j in (1..=k).rev() {
            row[j] = row[j] * keep + row[j - 1] * take;
        }
        row[0] *= keep;
    }
    let mut fact = Real::ONE;
    for (j, v) in row.iter_mut().enumerate().skip(1) {
        fact *= Real::from(j);
        *v *= fact;
    }
    row
}

/// `Σ_k c_k Σ_j S(k, j) F_j` from factorial moments `F_j`.
fn expect_from_factorial_moments(f: &Polynomial, fm: &[Real]) -> Real {
    let s = stirling2(f.degree());
    let mut acc = Real::ZERO;
    for (k, &c) in f.coeffs().iter().enumerate() {
        let mut mk = Real::ZERO;
        for j in 0..=k {
            mk += fm[j] * s[k][j];
        }
        acc += mk * c;
    }
    acc
}

/// Parity-restricted expectation `Σ_{t ≡ ρ (2)} f(t) P(X = t)`, via the generating
/// function split `½ f̂(p) + (-1)^ρ ½ Z f̂(r)` with `r_j = -p_j/(1 - 2p_j)`,
/// `Z = ∏ (1 - 2p_j)`.
///
/// `f̂(q)` is the formal expectation `Σ_k c_k E_q(X^k)`, with each moment written as
/// `Σ_j S(k, j) j! e_j(q)`; this is a polynomial identity in `q`, so it applies to
/// the signed vector `r`. The product `Z e_j(r)` is accumulated directly as the
/// elementary symmetric sums of the pairs `(1 - 2p_j, -p_j)`.
pub fn pb_parity_split(params: &PoissonBinomialParams, f: &Polynomial, rho: u8) -> Result<f64> {
    if params.p.contains(&0.5) {
        return Err(Error::Hypothesis("parity split needs every p_j ≠ 1/2"));
    }
    let k = f.degree();
    let direct = factorial_moments(params, k, |p| (Real::ONE, Real::from(p)));
    let signed = factorial_moments(params, k, |p| {
        (Real::ONE - Real::from(p) * 2.0, -Real::from(p))
    });
    let full = expect_from_factorial_moments(f, &direct);
    let twisted = expect_from_factorial_moments(f, &signed);
    let value = if rho.is_multiple_of(2) {
        full + twisted
    } else {
        full - twisted
    };
    Ok((value * 0.5).to_f64())
}

/// `Z = ∏ (1 - 2 p_j)`.
pub fn parity_bias(params: &PoissonBinomialParams) -> f64 {
    params.p.iter().map(|p| 1.0 - 2.0 * p).product()
}

/// Chernoff bounds `(exp(-s²/(2X̄)), exp(-X̄ φ(s/X̄)))` on `P(X ≤ X̄ - s)` and
/// `P(X ≥ X̄ + s)`, with `φ(x) = (1 + x) ln(1 + x) - x`.
pub fn chernoff_tails(params: &PoissonBinomialParams, s: f64) -> Result<(f64, f64)> {
    if s.is_nan() || s < 0.0 {
        return Err(Error::Range(format!("deviation {s} must be nonnegative")));
    }
    let mean = params.mean();
    if mean == 0.0 {
        return Ok(if s == 0.0 { (1.0, 1.0) } else { (0.0, 0.0) });
    }
    let lower = (-s * s / (2.0 * mean)).exp();
    let upper = (-mean * phi(s / mean)).exp();
    Ok((lower, upper))
}

/// `φ(x) = (1 + x) ln(1 + x) - x`.
pub fn phi(x: f64) -> f64 {
    (1.0 + x) * x.ln_1p() - x
}

/// `E(X^k)` for `k ≤ 4` from `X̄` and the power sums `Σ p_j^m`.
pub fn pb_moments(params: &PoissonBinomialParams, k: u32) -> Result<f64> {
    let x = params.mean();
    let p2 = params.power_sum(2);
    let p3 = params.power_sum(3);
    let p4 = params.power_sum(4);
    match k {
        1 => Ok(x),
        2 => Ok(x * x + x - p2),
        3 => Ok(x + 3.0 * x * x + x.powi(3) - 3.0 * p2 - 3.0 * x * p2 + 2.0 * p3),
        4 => Ok(x + 7.0 * x * x + 6.0 * x.powi(3) + x.powi(4)
            - (6.0 * x * x + 18.0 * x + 7.0) * p2
            + 3.0 * p2 * p2
            + (8.0 * x + 12.0) * p3
            - 6.0 * p4),
        other => Err(Error::UnsupportedOrder(other)),
    }
}

/// Second and fourth central moments of `PB(p)`.
pub fn pb_central_moments(params: &PoissonBinomialParams, k: u32) -> Result<f64> {
    let v: f64 = params.p.iter().map(|p| p * (1.0 - p)).sum();
    match k {
        2 => Ok(v),
        4 => Ok(3.0 * v * v
            + params
                .p
                .iter()
                .map(|p| p * (1.0 - p) * (1.0 - 6.0 * p + 6.0 * p * p))
                .sum::<f64>()),
        other => Err(Error::UnsupportedOrder(other)),
    }
}

/// The trace law of a uniformly random member of `G_D(d)`, from exact counts.
pub fn trace_law_exact(
    counter: &ExactCounter,
    seq: &DegreeSequence,
    model: LoopModel,
) -> Result<TraceLaw> {
    let counts = counter.trace_counts(seq, model)?;
    let total: BigUint = counts.iter().sum();
    if total.is_zero() {
        return Err(Error::EmptyClass("no matrices with these row sums"));
    }
    let total = BigInt::from(total);
    let pmf = counts
        .into_iter()
        .map(|c| Real::from(&BigRational::new(BigInt::from(c), total.clone())).to_f64())
        .collect();
    let support_parity = match model {
        LoopModel::Once => Some((seq.sum() % 2) as u8),
        LoopModel::Twice => None,
    };
    Ok(TraceLaw {
        pmf,
        support_parity,
    })
}

/// `Bin(n, q)` as a law on `0..=n`.
pub fn binomial_law(n: u64, q: f64) -> Result<TraceLaw> {
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::Range(format!("{q} is not a probability")));
    }
    let weights = (0..=n)
        .map(|l| {
            let log =
                ln_binomial(n, l).to_f64() + xlny(l as f64, q) + xlny((n - l) as f64, 1.0 - q);
            log.exp()
        })
        .collect();
    TraceLaw::from_weights(weights, None)
}

/// `x ln y` with `0 ln 0 = 0`.
fn xlny(x: f64, y: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * y.ln()
    }
}

/// Dense approximation: `Bin(n, ℓ̄_D / n)`, restricted to the parity of `S` and
/// renormalized when `D = 1`.
pub fn trace_law_dense(seq: &DegreeSequence, model: LoopModel) -> Result<TraceLaw> {
    let stats = seq.stats();
    let n = stats.n as u64;
    let n_rat = BigRational::from_integer(BigInt::from(n));
    if n == 0 || stats.d.is_zero() || stats.d >= n_rat {
        return Err(Error::Density("dense trace law needs 0 < d < n"));
    }
    let q = (lbar_from_stats(&stats, model)? / Real::from(n)).to_f64();
    let law = binomial_law(n, q)?;
    match model {
        LoopModel::Once => TraceLaw::from_weights(law.pmf, Some((stats.s % 2) as u8)),
        LoopModel::Twice => Ok(law),
    }
}

/// The vectors `p′` and `p″` of the sparse trace approximations.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseTraceParams {
    pub p_prime: Vec<f64>,
    pub p_dprime: Vec<f64>,
    s: u64,
    s2: u64,
}

impl SparseTraceParams {
    pub fn new(seq: &DegreeSequence) -> Result<Self> {
        let stats = seq.stats();
        if stats.s == 0 {
            return Err(Error::Range("degree sum must be positive".into()));
        }
        let s = Real::from(stats.s);
        let root = s.sqrt();
        let s2 = Real::from(stats.s2);
        let mut p_prime = Vec::with_capacity(stats.n);
        let mut p_dprime = Vec::with_capacity(stats.n);
        for &d in seq.degrees() {
            let dr = Real::from(d);
            let d2m = Real::from(2 * d as i64 - 1);
            let dm2 = Real::from(d as i64 - 2);
            let pp = dr / root - dr * d2m / (s * 2.0)
                + dr * dr * dr / (s * root)
                + dr * dm2 * s2 / (s * s * root)
                - dr * s2 * s2 / (s * s * s * root * 2.0);
            p_prime.push(pp.to_f64());
            p_dprime.push((Real::from(d as u64 * (d as u64).saturating_sub(1)) / s).to_f64());
        }
        Ok(SparseTraceParams {
            p_prime,
            p_dprime,
            s: stats.s,
            s2: stats.s2,
        })
    }

    /// `√S - S₂/S - 1/2`.
    pub fn expected_once(&self) -> f64 {
        let s = self.s as f64;
        s.sqrt() - self.s2 as f64 / s - 0.5
    }

    /// `√S - 2S₂/S - 1`.
    pub fn variance_once(&self) -> f64 {
        let s = self.s as f64;
        s.sqrt() - 2.0 * self.s2 as f64 / s - 1.0
    }

    /// `S₂/S`.
    pub fn expected_twice(&self) -> f64 {
        self.s2 as f64 / self.s as f64
    }

    /// `S₂/S`.
    pub fn variance_twice(&self) -> f64 {
        self.expected_twice()
    }

    /// The parameter vector used for `model`, clamped to `[0, 1]` within rounding.
    pub fn probabilities(&self, model: LoopModel) -> Result<PoissonBinomialParams> {
        let raw = match model {
            LoopModel::Once => &self.p_prime,
            LoopModel::Twice => &self.p_dprime,
        };
        raw.iter()
            .enumerate()
            .map(|(j, &p)| {
                if (-CLAMP_TOLERANCE..=1.0 + CLAMP_TOLERANCE).contains(&p) {
                    Ok(p.clamp(0.0, 1.0))
                } else {
                    Err(Error::Range(format!(
                        "sparse trace parameter {j} is {p}; sequence is outside the sparse regime"
                    )))
                }
            })
            .collect::<Result<Vec<_>>>()
            .map(PoissonBinomialParams::new)
    }
}

/// Sparse approximation: `PB(p′)` restricted to the parity of `S` and renormalized
/// for `D = 1`, and `PB(p″)` for `D = 2`.
pub fn trace_law_sparse(seq: &DegreeSequence, model: LoopModel) -> Result<TraceLaw> {
    let params = SparseTraceParams::new(seq)?;
    let law = pb_pmf(&params.probabilities(model)?)?;
    match model {
        LoopModel::Once => TraceLaw::from_weights(law.pmf, Some((seq.sum() % 2) as u8)),
        LoopModel::Twice => Ok(law),
    }
}
