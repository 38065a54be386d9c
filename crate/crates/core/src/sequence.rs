//! Degree sequences, their summary statistics, and the loop-model scalars
//! shared by the dense formulas.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::real::Real;

/// How a diagonal entry contributes to its row sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LoopModel {
    /// A loop adds 1 to the row sum (plain row sums of the matrix).
    Once,
    /// A loop adds 2 (graph degree convention).
    Twice,
}

impl LoopModel {
    pub fn from_weight(weight: u32) -> Result<LoopModel> {
        match weight {
            1 => Ok(LoopModel::Once),
            2 => Ok(LoopModel::Twice),
            other => Err(Error::Invalid(format!(
                "loop model must be 1 or 2, got {other}"
            ))),
        }
    }

    /// The multiplier `D` applied to diagonal entries.
    pub fn weight(self) -> u32 {
        match self {
            LoopModel::Once => 1,
            LoopModel::Twice => 2,
        }
    }
}

impl fmt::Display for LoopModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.weight())
    }
}

/// Prescribed row sums `d_1..d_n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DegreeSequence {
    degrees: Vec<u32>,
}

impl DegreeSequence {
    pub fn new(degrees: Vec<u32>) -> Self {
        DegreeSequence { degrees }
    }

    /// `n` copies of `d`.
    pub fn regular(n: usize, d: u32) -> Self {
        DegreeSequence {
            degrees: vec![d; n],
        }
    }

    pub fn degrees(&self) -> &[u32] {
        &self.degrees
    }

    pub fn len(&self) -> usize {
        self.degrees.len()
    }

    pub fn is_empty(&self) -> bool {
        self.degrees.is_empty()
    }

    pub fn sum(&self) -> u64 {
        self.degrees.iter().map(|&d| d as u64).sum()
    }

    pub fn max_degree(&self) -> u32 {
        self.degrees.iter().copied().max().unwrap_or(0)
    }

    pub fn is_regular(&self) -> bool {
        self.degrees.windows(2).all(|w| w[0] == w[1])
    }

    /// Whether every row sum fits: at most `n - 1` off-diagonal ones plus `D`.
    pub fn is_admissible(&self, model: LoopModel) -> bool {
        let cap = self.len() as u64 + model.weight() as u64 - 1;
        self.degrees.iter().all(|&d| d as u64 <= cap)
    }

    /// The same sequence with zero entries removed.
    pub fn without_zeros(&self) -> DegreeSequence {
        DegreeSequence {
            degrees: self.degrees.iter().copied().filter(|&d| d > 0).collect(),
        }
    }

    /// The sequence with `extra` appended.
    pub fn with_appended(&self, extra: u32) -> DegreeSequence {
        let mut degrees = self.degrees.clone();
        degrees.push(extra);
        DegreeSequence { degrees }
    }

    pub fn stats(&self) -> SequenceStats {
        compute_stats(self)
    }
}

impl From<Vec<u32>> for DegreeSequence {
    fn from(degrees: Vec<u32>) -> Self {
        DegreeSequence::new(degrees)
    }
}

impl fmt::Display for DegreeSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for d in &self.degrees {
            if !first {
                f.write_str(",")?;
            }
            write!(f, "{d}")?;
            first = false;
        }
        Ok(())
    }
}

impl FromStr for DegreeSequence {
    type Err = Error;

    /// Parses a comma-separated list such as `3,1,1,1`. The empty string is the empty sequence.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Ok(DegreeSequence::new(Vec::new()));
        }
        s.split(',')
            .map(|t| {
                t.trim()
                    .parse::<u32>()
                    .map_err(|e| Error::Invalid(format!("bad degree {t:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()
            .map(DegreeSequence::new)
    }
}

/// Exact summary statistics of a degree sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct SequenceStats {
    pub n: usize,
    /// Sum of degrees.
    pub s: u64,
    /// Average degree `S/n`.
    pub d: BigRational,
    /// `d/(n-1)`; `None` when `n <= 1`.
    pub lambda: Option<BigRational>,
    pub d_max: u32,
    /// `Σ (d_j - d)^2`.
    pub r: BigRational,
    /// `Σ d_j (d_j - 1)`.
    pub s2: u64,
    /// `Σ d_j (d_j - 1)(d_j - 2)`.
    pub s3: u64,
}

impl SequenceStats {
    pub fn d_real(&self) -> Real {
        Real::from(&self.d)
    }

    pub fn r_real(&self) -> Real {
        Real::from(&self.r)
    }
}

fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Computes `S, d, λ, d_max, R, S₂, S₃` with integer and rational arithmetic only.
pub fn compute_stats(seq: &DegreeSequence) -> SequenceStats {
    let n = seq.len();
    let s = seq.sum();
    let d_max = seq.max_degree();
    let (s2, s3) = seq.degrees().iter().fold((0u64, 0u64), |(a, b), &x| {
        let x = x as u64;
        (
            a + x * x.saturating_sub(1),
            b + x * x.saturating_sub(1) * x.saturating_sub(2),
        )
    });
    if n == 0 {
        return SequenceStats {
            n,
            s,
            d: BigRational::zero(),
            lambda: None,
            d_max,
            r: BigRational::zero(),
            s2,
            s3,
        };
    }
    let d = ratio(s as i64, n as i64);
    let lambda = (n > 1).then(|| ratio(s as i64, (n * (n - 1)) as i64));
    // R = Σ d_j² - S²/n, kept exact
    let sum_sq: i128 = seq
        .degrees()
        .iter()
        .map(|&x| (x as i128) * (x as i128))
        .sum();
    let r = BigRational::new(
        BigInt::from(sum_sq * n as i128 - (s as i128) * (s as i128)),
        BigInt::from(n as i128),
    );
    SequenceStats {
        n,
        s,
        d,
        lambda,
        d_max,
        r,
        s2,
        s3,
    }
}

/// `μ_D = d/(n + D - 1)` as an exact rational.
pub fn mu(stats: &SequenceStats, model: LoopModel) -> BigRational {
    let denom = stats.n as i64 + model.weight() as i64 - 1;
    if denom == 0 {
        return BigRational::zero();
    }
    &stats.d / BigRational::from_integer(BigInt::from(denom))
}

/// Loop-model scalars of a sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct LoopModelParams {
    pub model: LoopModel,
    pub mu: BigRational,
    pub lbar: Real,
}

impl LoopModelParams {
    pub fn new(seq: &DegreeSequence, model: LoopModel) -> Result<Self> {
        let stats = seq.stats();
        Ok(LoopModelParams {
            model,
            mu: mu(&stats, model),
            lbar: lbar_from_stats(&stats, model)?,
        })
    }

    pub fn mu_real(&self) -> Real {
        Real::from(&self.mu)
    }
}

/// Concentration point `ℓ̄_D` of the trace distribution.
///
/// For `D = 1` the endpoints `d = 0` and `d = n` take the continuous limits `0` and `n`.
pub fn lbar(seq: &DegreeSequence, model: LoopModel) -> Result<Real> {
    lbar_from_stats(&seq.stats(), model)
}

pub(crate) fn lbar_from_stats(stats: &SequenceStats, model: LoopModel) -> Result<Real> {
    let n = Real::from(stats.n);
    let d = stats.d_real();
    match model {
        LoopModel::Once => {
            let n_rat = BigRational::from_integer(BigInt::from(stats.n));
            if stats.d.is_negative() || stats.d > n_rat {
                return Err(Error::Range(format!(
                    "average degree {} outside [0, n] for loop model 1",
                    stats.d
                )));
            }
            if stats.d.is_zero() {
                return Ok(Real::ZERO);
            }
            if stats.d == n_rat {
                return Ok(n);
            }
            let a = d.sqrt();
            let b = (n - d).sqrt();
            Ok(a * n / (a + b))
        }
        LoopModel::Twice => Ok(d * n / (n + 1.0)),
    }
}

/// `ℓ̄_1` as a function of `n` and a real average degree, used for the unconditioned
/// matrix ensemble where `d = S/n`.
pub fn lbar_once(n: u64, s: u64) -> Real {
    if s == 0 {
        return Real::ZERO;
    }
    if s >= n * n {
        return Real::from(n);
    }
    let nr = Real::from(n);
    let d = Real::from(s) / nr;
    let a = d.sqrt();
    a * nr / (a + (nr - d).sqrt())
}

/// The second-order exponent `Q_D(d, ℓ)` of the dense formulas, evaluated term by term.
///
/// Needs `0 < d < n` for `D = 1` and `0 < d < n + 1` for `D = 2`.
pub fn q_dense(seq: &DegreeSequence, model: LoopModel, ell: Real) -> Result<Real> {
    let stats = seq.stats();
    q_dense_from_stats(&stats, model, ell)
}

pub(crate) fn q_dense_from_stats(
    stats: &SequenceStats,
    model: LoopModel,
    ell: Real,
) -> Result<Real> {
    let n_int = BigRational::from_integer(BigInt::from(stats.n));
    let upper = &n_int + BigRational::from_integer(BigInt::from(model.weight() - 1));
    if stats.n == 0 || stats.d.is_zero() || stats.d >= upper {
        return Err(Error::Density("Q needs 0 < d < n + D - 1"));
    }
    let n = Real::from(stats.n);
    let r = stats.r_real();
    let quarter = Real::from(0.25);
    match model {
        LoopModel::Once => {
            let d = stats.d_real();
            // d(n - d) exactly
            let dnd = Real::from(&(&stats.d * (&n_int - &stats.d)));
            let dnd2 = dnd.sqr();
            let dev = ell - d;
            Ok(quarter + dev.sqr() / (dnd * 4.0)
                - dev.sqr() * r / (dnd2 * 2.0)
                - r.sqr() / (dnd2 * 4.0))
        }
        LoopModel::Twice => {
            let mu_rat = mu(stats, LoopModel::Twice);
            let mu = Real::from(&mu_rat);
            let v = Real::from(&(&mu_rat * (BigRational::one() - &mu_rat)));
            let n2 = n.sqr();
            let n3 = n2 * n;
            let n4 = n2.sqr();
            let dev = ell - mu * n;
            let one_minus_2mu = Real::ONE - mu * 2.0;
            Ok(
                quarter - ell * (n - ell) / (v * n2) - r.sqr() / (v.sqr() * n4 * 4.0)
                    + r / (v * n2)
                    + one_minus_2mu * dev * r / (v.sqr() * n3)
                    - dev.sqr() * r * 2.0 / (v.sqr() * n4),
            )
        }
    }
}

/// Factored closed form of `Q_2(d, ℓ̄_2)`.
pub fn q2_at_lbar_factored(seq: &DegreeSequence) -> Result<Real> {
    let stats = seq.stats();
    let n_int = BigRational::from_integer(BigInt::from(stats.n + 1));
    if stats.n == 0 || stats.d.is_zero() || stats.d >= n_int {
        return Err(Error::Density("Q needs 0 < d < n + 1"));
    }
    let mu_rat = mu(&stats, LoopModel::Twice);
    let v = &mu_rat * (BigRational::one() - &mu_rat);
    let n2 = BigRational::from_integer(BigInt::from(stats.n * stats.n));
    let x = Real::from(&(&stats.r / (v * n2)));
    Ok((Real::ONE - x) * (Real::from(3.0) - x) * -0.25)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq(v: &[u32]) -> DegreeSequence {
        DegreeSequence::new(v.to_vec())
    }

    fn rat(a: i64, b: i64) -> BigRational {
        ratio(a, b)
    }

    #[test]
    fn stats_small_examples() {
        let s = compute_stats(&seq(&[1, 1]));
        assert_eq!((s.s, s.s2, s.s3, s.d_max), (2, 0, 0, 1));
        assert!(s.r.is_zero());

        let s = compute_stats(&seq(&[2, 2, 2]));
        assert_eq!((s.s, s.s2, s.s3), (6, 6, 0));
        assert!(s.r.is_zero());

        // direct arithmetic: d = 6/4, deviations 3/2, -1/2 x3, R = 9/4 + 3/4 = 3
        let s = compute_stats(&seq(&[3, 1, 1, 1]));
        assert_eq!((s.s, s.s2, s.s3), (6, 6, 6));
        assert_eq!(s.d, rat(3, 2));
        assert_eq!(s.r, rat(3, 1));
        assert_eq!(s.lambda, Some(rat(1, 2)));
    }

    #[test]
    fn lbar_examples() {
        let l = lbar(&DegreeSequence::regular(4, 2), LoopModel::Twice).unwrap();
        assert!((l - Real::from(8.0) / 5.0).abs().to_f64() < 1e-30);
        let l = lbar(&DegreeSequence::regular(2, 1), LoopModel::Once).unwrap();
        assert!((l - 1.0).abs().to_f64() < 1e-30);
        let l = lbar(&DegreeSequence::regular(22, 10), LoopModel::Twice).unwrap();
        assert!((l - Real::from(220.0) / 23.0).abs().to_f64() < 1e-29);
    }

    #[test]
    fn lbar_once_endpoints() {
        assert_eq!(
            lbar(&DegreeSequence::regular(5, 0), LoopModel::Once).unwrap(),
            Real::ZERO
        );
        assert_eq!(
            lbar(&DegreeSequence::regular(5, 5), LoopModel::Once).unwrap(),
            Real::from(5.0)
        );
        assert!(lbar(&DegreeSequence::regular(5, 6), LoopModel::Once).is_err());
    }

    #[test]
    fn q_once_regular_at_lbar() {
        for (n, d) in [(10usize, 3u32), (22, 10), (7, 1), (50, 49)] {
            let s = DegreeSequence::regular(n, d);
            let l = lbar(&s, LoopModel::Once).unwrap();
            let q = q_dense(&s, LoopModel::Once, l).unwrap();
            let nn = Real::from(n);
            let dd = Real::from(d as f64);
            let expect = nn / (nn * 2.0 + (dd * (nn - dd)).sqrt() * 4.0);
            assert!((q - expect).abs().to_f64() < 1e-28, "n={n} d={d}");
        }
    }

    #[test]
    fn q_twice_regular_at_lbar_is_minus_three_quarters() {
        for (n, d) in [(4usize, 2u32), (22, 10), (9, 8)] {
            let s = DegreeSequence::regular(n, d);
            let l = lbar(&s, LoopModel::Twice).unwrap();
            let q = q_dense(&s, LoopModel::Twice, l).unwrap();
            assert!((q + 0.75).abs().to_f64() < 1e-12);
        }
    }

    #[test]
    fn q_twice_factored_form_matches() {
        let s = seq(&[5, 3, 4, 6, 2, 4, 5, 3]);
        let l = lbar(&s, LoopModel::Twice).unwrap();
        let general = q_dense(&s, LoopModel::Twice, l).unwrap();
        let factored = q2_at_lbar_factored(&s).unwrap();
        assert!(((general - factored) / factored).abs().to_f64() < 1e-10);
    }

    #[test]
    fn q_dense_rejects_degenerate_density() {
        assert!(matches!(
            q_dense(&DegreeSequence::regular(4, 0), LoopModel::Once, Real::ZERO),
            Err(Error::Density(_))
        ));
        assert!(matches!(
            q_dense(&DegreeSequence::regular(4, 4), LoopModel::Once, Real::ZERO),
            Err(Error::Density(_))
        ));
        assert!(matches!(
            q_dense(&DegreeSequence::regular(4, 5), LoopModel::Twice, Real::ZERO),
            Err(Error::Density(_))
        ));
        // mu_2 = 4/5 is interior, so Q_2 is defined at d = n
        assert!(q_dense(&DegreeSequence::regular(4, 4), LoopModel::Twice, Real::ZERO).is_ok());
    }

    #[test]
    fn parse_and_display() {
        let s: DegreeSequence = "3, 1,1,1".parse().unwrap();
        assert_eq!(s.degrees(), &[3, 1, 1, 1]);
        assert_eq!(s.to_string(), "3,1,1,1");
        assert!("1,x".parse::<DegreeSequence>().is_err());
        assert!("".parse::<DegreeSequence>().unwrap().is_empty());
    }
}
