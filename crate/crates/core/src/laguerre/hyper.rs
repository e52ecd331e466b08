//! Terminating `3F2(-k, k+1, -m; beta+1, alpha+1; 1)`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HyperMode {
    Float,
    ExactRational,
}

/// `3F2(-k, k+1, -m; beta+1, alpha+1; 1)` as a finite sum over `q <= min(k, m)`.
pub fn f32_terminating(k: usize, m: usize, beta: usize, alpha: f64, mode: HyperMode) -> Result<f64> {
    match mode {
        HyperMode::Float => Ok(f32_float(k, m, beta, alpha)),
        HyperMode::ExactRational => {
            let two_alpha = 2.0 * alpha;
            if two_alpha.fract() != 0.0 || !(alpha > -1.0) {
                return Err(Error::UnsupportedPrecision(format!(
                    "exact evaluation needs 2*alpha integral, got alpha = {alpha}"
                )));
            }
            f32_exact(k, m, beta, two_alpha as i64)
                .to_f64()
                .ok_or_else(|| Error::Overflow("3F2 value exceeds f64 range".into()))
        }
    }
}

/// Compensated float sum. For these parameters every term is nonnegative.
pub fn f32_float(k: usize, m: usize, beta: usize, alpha: f64) -> f64 {
    let mut term = 1.0f64;
    let mut sum = 1.0f64;
    let mut comp = 0.0f64;
    for q in 0..k.min(m) {
        let qf = q as f64;
        term *= (qf - k as f64) * (k as f64 + 1.0 + qf) * (qf - m as f64)
            / ((beta as f64 + 1.0 + qf) * (alpha + 1.0 + qf) * (qf + 1.0));
        let y = term - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    sum
}

/// Exact value for `alpha = two_alpha / 2`.
pub fn f32_exact(k: usize, m: usize, beta: usize, two_alpha: i64) -> BigRational {
    let int = |v: i64| BigInt::from(v);
    let mut term = BigRational::from_integer(int(1));
    let mut sum = term.clone();
    let (k, m, beta) = (k as i64, m as i64, beta as i64);
    for q in 0..k.min(m) {
        // (alpha + 1 + q) = (two_alpha + 2 + 2q) / 2
        let num = int(q - k) * int(k + 1 + q) * int(q - m) * int(2);
        let den = int(beta + 1 + q) * int(two_alpha + 2 + 2 * q) * int(q + 1);
        term = term * BigRational::new(num, den);
        if term.is_zero() {
            break;
        }
        sum += &term;
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn k_zero_is_one() {
        for mode in [HyperMode::Float, HyperMode::ExactRational] {
            assert_eq!(f32_terminating(0, 7, 2, 1.5, mode).unwrap(), 1.0);
        }
    }

    #[test]
    fn k_one_two_term_sum() {
        for (m, alpha) in [(0usize, 0.0), (3, 0.5), (10, 4.0), (25, 7.5)] {
            let hand = 1.0 + 2.0 * m as f64 / (alpha + 1.0);
            let got = f32_terminating(1, m, 0, alpha, HyperMode::Float).unwrap();
            assert!((got - hand).abs() <= 1e-15 * hand);
        }
    }

    #[test]
    fn float_and_exact_agree() {
        let f = f32_terminating(2, 5, 1, 1.5, HyperMode::Float).unwrap();
        let e = f32_terminating(2, 5, 1, 1.5, HyperMode::ExactRational).unwrap();
        assert!((f - e).abs() <= 1e-13 * e.abs());
    }

    #[test]
    fn exact_rejects_irrational_alpha() {
        assert!(matches!(
            f32_terminating(2, 5, 1, 0.3, HyperMode::ExactRational),
            Err(Error::UnsupportedPrecision(_))
        ));
    }
}
