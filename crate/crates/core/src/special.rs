//! Log-factorials, log-binomials and compensated summation in double-double precision.

use std::sync::OnceLock;

use num_bigint::BigUint;
use num_integer::binomial;

use crate::real::Real;

/// Neumaier-style compensated accumulator over [`Real`] values.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: Real,
    comp: Real,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: Real) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> Real {
        self.sum + self.comp
    }
}

impl FromIterator<Real> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = Real>>(iter: I) -> Self {
        let mut acc = CompensatedSum::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

const TABLE_LEN: usize = 4096;

fn factorial_table() -> &'static [Real] {
    static TABLE: OnceLock<Vec<Real>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut out = Vec::with_capacity(TABLE_LEN);
        let mut acc = CompensatedSum::new();
        out.push(Real::ZERO);
        for i in 1..TABLE_LEN {
            acc.add(Real::from(i).ln());
            out.push(acc.value());
        }
        out
    })
}

/// `ln Γ(x)` by the Stirling series; accurate to double-double resolution for `x >= 40`.
fn ln_gamma_stirling(x: Real) -> Real {
    // B_{2k} / (2k (2k-1)) as exact fractions
    const COEFFS: [(f64, f64); 12] = [
        (1.0, 12.0),
        (-1.0, 360.0),
        (1.0, 1260.0),
        (-1.0, 1680.0),
        (1.0, 1188.0),
        (-691.0, 360360.0),
        (1.0, 156.0),
        (-3617.0, 122400.0),
        (43867.0, 244188.0),
        (-174611.0, 125400.0),
        (77683.0, 5796.0),
        (-236364091.0, 1506960.0),
    ];
    let half_ln_2pi = (Real::PI * 2.0).ln() * 0.5;
    let mut acc = (x - 0.5) * x.ln() - x + half_ln_2pi;
    let inv = x.recip();
    let inv2 = inv.sqr();
    let mut pow = inv;
    for (num, den) in COEFFS {
        let term = pow * num / den;
        acc += term;
        if term.abs().to_f64() < 1e-34 * acc.abs().to_f64().max(1.0) {
            break;
        }
        pow *= inv2;
    }
    acc
}

/// `ln Γ(x)` for positive real `x`, shifting small arguments up with the recurrence.
pub fn ln_gamma(x: Real) -> Real {
    assert!(x.hi() > 0.0, "ln_gamma needs a positive argument");
    let mut shift = Real::ZERO;
    let mut y = x;
    while y.hi() < 40.0 {
        shift += y.ln();
        y += 1.0;
    }
    ln_gamma_stirling(y) - shift
}

/// `ln k!`.
pub fn ln_factorial(k: u64) -> Real {
    let table = factorial_table();
    if (k as usize) < TABLE_LEN {
        table[k as usize]
    } else {
        ln_gamma_stirling(Real::from(k + 1))
    }
}

/// `ln binom(n, k)`; exact integer binomial when `n <= 64`. `k > n` gives `-inf`.
pub fn ln_binomial(n: u64, k: u64) -> Real {
    if k > n {
        return Real::from(f64::NEG_INFINITY);
    }
    if n <= 64 {
        let b: u128 = binomial(n as u128, k as u128);
        return ln_biguint(&BigUint::from(b));
    }
    ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)
}

/// Natural log of a positive big integer from its bit length and top 128 bits.
pub fn ln_biguint(v: &BigUint) -> Real {
    let bits = v.bits();
    if bits <= 128 {
        return Real::from_biguint(v).ln();
    }
    let shift = bits - 128;
    let top = v >> shift;
    Real::from_biguint(&top).ln() + Real::LN_2 * Real::from(shift)
}

/// Exact `binom(n, k)` as a big integer.
pub fn binomial_big(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::from(0u32);
    }
    let k = k.min(n - k);
    let mut acc = BigUint::from(1u32);
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}
