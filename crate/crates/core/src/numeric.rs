//! Tolerances and small numeric helpers shared across modules.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;

/// Amplitudes with modulus below this are dropped from sparse states.
pub const PRUNE_THRESHOLD: f64 = 1e-14;

/// "Is normalized" tolerance on the squared norm.
pub const NORM_TOLERANCE: f64 = 1e-10;

/// Max-norm tolerance on `U^dag U - I` when building a mode unitary.
pub const UNITARITY_TOLERANCE: f64 = 1e-10;

/// Max-norm tolerance on `h - h^dag` for one-body generators.
pub const HERMITICITY_TOLERANCE: f64 = 1e-12;

/// Largest imaginary residue accepted on an expectation of a Hermitian symmetry.
pub const IMAGINARY_RESIDUE_TOLERANCE: f64 = 1e-10;

/// Eigenstate / projector membership tolerance for metrology preconditions.
pub const EIGENSTATE_TOLERANCE: f64 = 1e-8;

/// Outcome probabilities below this are treated as exactly zero in Fisher sums.
pub const PROBABILITY_FLOOR: f64 = 1e-12;

/// Neumaier-compensated accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = CompensatedSum::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

/// Compensated sum over complex terms, real and imaginary parts accumulated separately.
#[derive(Debug, Clone, Copy, Default)]
pub struct ComplexCompensatedSum {
    re: CompensatedSum,
    im: CompensatedSum,
}

impl ComplexCompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, z: Complex64) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}

impl FromIterator<Complex64> for ComplexCompensatedSum {
    fn from_iter<I: IntoIterator<Item = Complex64>>(iter: I) -> Self {
        let mut acc = ComplexCompensatedSum::new();
        for z in iter {
            acc.add(z);
        }
        acc
    }
}

pub fn compensated_sum<I: IntoIterator<Item = f64>>(iter: I) -> f64 {
    iter.into_iter().collect::<CompensatedSum>().value()
}

/// The n-th roots of unity `omega^k = exp(2 pi i k / n)`, with quarter turns set exactly.
#[derive(Debug, Clone)]
pub struct RootsOfUnity {
    table: Vec<Complex64>,
}

impl RootsOfUnity {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "roots of unity need n >= 1");
        let table = (0..n)
            .map(|k| {
                // exact values where 4k/n is an integer
                if (4 * k) % n == 0 {
                    match (4 * k) / n {
                        0 => Complex64::new(1.0, 0.0),
                        1 => Complex64::new(0.0, 1.0),
                        2 => Complex64::new(-1.0, 0.0),
                        _ => Complex64::new(0.0, -1.0),
                    }
                } else {
                    let angle = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
                    Complex64::new(angle.cos(), angle.sin())
                }
            })
            .collect();
        Self { table }
    }

    /// Shared table for `n`, built on first use.
    pub fn cached(n: usize) -> Arc<RootsOfUnity> {
        static CACHE: OnceLock<Mutex<HashMap<usize, Arc<RootsOfUnity>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut guard = cache.lock().unwrap_or_else(|e| e.into_inner());
        guard
            .entry(n)
            .or_insert_with(|| Arc::new(RootsOfUnity::new(n)))
            .clone()
    }

    pub fn order(&self) -> usize {
        self.table.len()
    }

    /// `omega^k` for any integer exponent.
    pub fn pow(&self, k: i64) -> Complex64 {
        let n = self.table.len() as i64;
        self.table[k.rem_euclid(n) as usize]
    }
}

/// Factorials `0! ..= max!` as f64.
pub fn factorials(max: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(max + 1);
    let mut acc = 1.0;
    out.push(acc);
    for k in 1..=max {
        acc *= k as f64;
        out.push(acc);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensated_sum_recovers_cancellation() {
        let xs = [1e16, 1.0, -1e16, 1.0];
        assert_eq!(compensated_sum(xs), 2.0);
    }

    #[test]
    fn roots_are_exact_on_quarter_turns() {
        let r = RootsOfUnity::new(4);
        assert_eq!(r.pow(1), Complex64::new(0.0, 1.0));
        assert_eq!(r.pow(2), Complex64::new(-1.0, 0.0));
        assert_eq!(r.pow(-1), Complex64::new(0.0, -1.0));
        let r2 = RootsOfUnity::new(2);
        assert_eq!(r2.pow(1), Complex64::new(-1.0, 0.0));
    }

    #[test]
    fn roots_sum_to_zero() {
        for n in 2..9 {
            let r = RootsOfUnity::new(n);
            let s: ComplexCompensatedSum = (0..n as i64).map(|k| r.pow(k)).collect();
            assert!(s.value().norm() < 1e-14, "n = {n}");
        }
    }

    #[test]
    fn factorial_table() {
        assert_eq!(factorials(5), vec![1.0, 1.0, 2.0, 6.0, 24.0, 120.0]);
    }
}
