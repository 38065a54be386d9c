//! Elementary symmetric sums `U_ℓ(β) = e_ℓ(e^{β_1}, ..., e^{β_n})` and their
//! Gaussian-type approximation.

use crate::real::Real;
use crate::special::ln_binomial;

/// Above this length the recurrence runs on logarithms.
pub const LOG_SPACE_THRESHOLD: usize = 300;

/// Exponents `β_1..β_n` with their mean.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector {
    beta: Vec<f64>,
    bar_beta: f64,
}

impl WeightVector {
    pub fn new(beta: Vec<f64>) -> Self {
        let bar_beta = if beta.is_empty() {
            0.0
        } else {
            beta.iter().sum::<f64>() / beta.len() as f64
        };
        WeightVector { beta, bar_beta }
    }

    pub fn beta(&self) -> &[f64] {
        &self.beta
    }

    pub fn bar_beta(&self) -> f64 {
        self.bar_beta
    }

    pub fn len(&self) -> usize {
        self.beta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.beta.is_empty()
    }

    /// `Σ (β_j - β̄)²`.
    pub fn spread(&self) -> f64 {
        self.beta.iter().map(|b| (b - self.bar_beta).powi(2)).sum()
    }

    /// The vector `-β`.
    pub fn negated(&self) -> WeightVector {
        WeightVector::new(self.beta.iter().map(|b| -b).collect())
    }
}

/// `ln U_ℓ(β)` for every `ℓ = 0..=n`.
///
/// Folds one weight at a time into the coefficient row of `∏ (1 + x_j y)`; the row is
/// kept as logarithms (log-sum-exp updates) when `n > 300`.
pub fn ln_u_row(w: &WeightVector) -> Vec<f64> {
    if w.len() > LOG_SPACE_THRESHOLD {
        let mut row = vec![f64::NEG_INFINITY; w.len() + 1];
        row[0] = 0.0;
        for (j, &b) in w.beta.iter().enumerate() {
            for l in (1..=j + 1).rev() {
                row[l] = log_add(row[l], row[l - 1] + b);
            }
        }
        row
    } else {
        let mut row = vec![0.0; w.len() + 1];
        row[0] = 1.0;
        for (j, &b) in w.beta.iter().enumerate() {
            let x = b.exp();
            for l in (1..=j + 1).rev() {
                row[l] += row[l - 1] * x;
            }
        }
        row.into_iter().map(f64::ln).collect()
    }
}

fn log_add(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if lo == f64::NEG_INFINITY {
        return hi;
    }
    hi + (lo - hi).exp().ln_1p()
}

/// `U_ℓ(β)`. Overflows to infinity when the value exceeds `f64`; use [`ln_u_exact`] there.
pub fn u_exact(w: &WeightVector, ell: usize) -> f64 {
    ln_u_exact(w, ell).exp()
}

/// `ln U_ℓ(β)`; `-inf` when `ℓ > n`.
pub fn ln_u_exact(w: &WeightVector, ell: usize) -> f64 {
    if ell > w.len() {
        return f64::NEG_INFINITY;
    }
    ln_u_row(w)[ell]
}

/// `ln` of `binom(n, ℓ) exp(ℓ β̄ + ℓ(n - ℓ)/(2n²) Σ (β_j - β̄)²)`.
pub fn ln_u_asymptotic(w: &WeightVector, ell: usize) -> f64 {
    let n = w.len();
    if ell > n {
        return f64::NEG_INFINITY;
    }
    if n == 0 {
        return 0.0;
    }
    let nf = n as f64;
    let l = ell as f64;
    ln_binomial(n as u64, ell as u64).to_f64()
        + l * w.bar_beta
        + l * (nf - l) / (2.0 * nf * nf) * w.spread()
}

/// `binom(n, ℓ) exp(ℓ β̄ + ℓ(n - ℓ)/(2n²) Σ (β_j - β̄)²)`.
pub fn u_asymptotic(w: &WeightVector, ell: usize) -> f64 {
    ln_u_asymptotic(w, ell).exp()
}

/// `ln ∏ (1 + e^{β_j})`, the sum of the whole row.
pub fn ln_u_total(w: &WeightVector) -> f64 {
    w.beta
        .iter()
        .map(|&b| Real::from(b).exp() + 1.0)
        .map(|x| x.ln().to_f64())
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn wv(b: &[f64]) -> WeightVector {
        WeightVector::new(b.to_vec())
    }

    #[test]
    fn trivial_values() {
        let w = wv(&[0.3, -0.1, 0.7, 0.2]);
        assert!((u_exact(&w, 0) - 1.0).abs() < 1e-15);
        assert!((u_exact(&w, 4) - 1.1f64.exp()).abs() < 1e-14);
        let zero = wv(&[0.0; 7]);
        for (l, b) in [1.0, 7.0, 21.0, 35.0, 35.0, 21.0, 7.0, 1.0]
            .iter()
            .enumerate()
        {
            assert!((u_exact(&zero, l) - b).abs() < 1e-12);
            assert!((u_asymptotic(&zero, l) - b).abs() < 1e-12);
        }
    }

    #[test]
    fn constant_weights_are_exact_for_the_approximation() {
        let w = wv(&[0.4; 9]);
        for l in 0..=9 {
            let e = ln_u_exact(&w, l);
            let a = ln_u_asymptotic(&w, l);
            assert!((e - a).abs() < 1e-12, "l={l}");
        }
    }

    #[test]
    fn log_space_matches_direct_near_threshold() {
        let beta: Vec<f64> = (0..301)
            .map(|j| ((j * 37 % 11) as f64 - 5.0) / 40.0)
            .collect();
        let long = wv(&beta);
        let short = wv(&beta[..300]);
        // extend the short row by one factor by hand and compare
        let row = ln_u_row(&short);
        let x = beta[300];
        for l in [1usize, 50, 150, 250, 300] {
            let expect = log_add(row[l], row[l - 1] + x);
            assert!((ln_u_exact(&long, l) - expect).abs() < 1e-10 * expect.abs().max(1.0));
        }
    }

    #[test]
    fn example_improvement() {
        let alt = |n: usize, a: f64| {
            wv(&(0..n)
                .map(|j| if j % 2 == 0 { a } else { -a })
                .collect::<Vec<_>>())
        };
        let err = |w: &WeightVector, l: usize| (ln_u_exact(w, l) - ln_u_asymptotic(w, l)).abs();
        assert!(err(&alt(100, 0.05), 50) < err(&alt(25, 0.1), 12));
    }
}
