use serde::{Deserialize, Serialize};

use super::gamma::{ln_gamma, ln_gamma_ratio};
use crate::error::{Error, Result};

/// One unperturbed radial eigenfunction `psi_{h,l,n}` at fixed energy `E`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialMode {
    pub d: usize,
    pub n: usize,
    pub ell: usize,
    pub energy: f64,
}

impl RadialMode {
    pub fn new(d: usize, n: usize, ell: usize, energy: f64) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidMode(format!("dimension d = {d} must be >= 2")));
        }
        if ell > n || (n - ell) % 2 != 0 {
            return Err(Error::InvalidMode(format!(
                "need l <= n and l = n (mod 2), got n = {n}, l = {ell}"
            )));
        }
        if !(energy > 0.0) {
            return Err(Error::InvalidMode(format!("energy {energy} must be > 0")));
        }
        Ok(RadialMode { d, n, ell, energy })
    }

    /// `h_n = E / (n + d/2)`.
    pub fn hbar(&self) -> f64 {
        hbar_for(self.energy, self.n, self.d)
    }

    /// `n' = (n - l)/2`.
    pub fn n_prime(&self) -> usize {
        (self.n - self.ell) / 2
    }

    /// `alpha = l + (d-2)/2`.
    pub fn alpha(&self) -> f64 {
        alpha_for(self.ell, self.d)
    }

    /// Sibling mode in the same sector at principal index `m`.
    pub fn with_n(&self, m: usize) -> RadialMode {
        RadialMode { n: m, ..*self }
    }
}

pub fn hbar_for(energy: f64, n: usize, d: usize) -> f64 {
    energy / (n as f64 + 0.5 * d as f64)
}

pub fn alpha_for(ell: usize, d: usize) -> f64 {
    ell as f64 + 0.5 * (d as f64 - 2.0)
}

/// `L_k^{(alpha)}(x)` by the forward three-term recurrence.
pub fn laguerre_eval(k: usize, alpha: f64, x: f64) -> Result<f64> {
    if !(alpha > -1.0) {
        return Err(Error::Domain(format!("alpha = {alpha} must be > -1")));
    }
    let mut prev = 1.0;
    if k == 0 {
        return Ok(prev);
    }
    let mut cur = 1.0 + alpha - x;
    for j in 1..k {
        let jf = j as f64;
        let next = ((2.0 * jf + 1.0 + alpha - x) * cur - (jf + alpha) * prev) / (jf + 1.0);
        prev = cur;
        cur = next;
    }
    if cur.is_finite() {
        Ok(cur)
    } else {
        Err(Error::Overflow(format!("L_{k}^({alpha})({x}) exceeds f64 range")))
    }
}

/// Orthonormal Laguerre polynomial `p_k(x)` with respect to the probability
/// measure `x^alpha e^{-x} dx / Γ(alpha+1)`, returned as `(value, ln_scale)`
/// with `p_k(x) = value * exp(ln_scale)`. Same sign as `L_k^{(alpha)}`.
pub fn orthonormal_laguerre_scaled(k: usize, alpha: f64, x: f64) -> (f64, f64) {
    let mut prev = 1.0;
    if k == 0 {
        return (prev, 0.0);
    }
    let mut cur = (alpha + 1.0 - x) / (alpha + 1.0).sqrt();
    let mut ln_scale = 0.0;
    for j in 1..k {
        let jf = j as f64;
        let next = ((2.0 * jf + alpha + 1.0 - x) * cur - (jf * (jf + alpha)).sqrt() * prev)
            / ((jf + 1.0) * (jf + 1.0 + alpha)).sqrt();
        prev = cur;
        cur = next;
        let big = cur.abs().max(prev.abs());
        if big > 1e150 {
            prev /= big;
            cur /= big;
            ln_scale += big.ln();
        }
    }
    (cur, ln_scale)
}

/// `N_{l,n} = sqrt(2 Γ(n'+1) / Γ(n'+alpha+1))`, via log-gamma.
pub fn norm_constant(mode: &RadialMode) -> f64 {
    (0.5 * (std::f64::consts::LN_2 + ln_gamma_ratio(mode.n_prime(), mode.alpha()))).exp()
}

/// `ln |psi_{h,l,n}(r)|` and its sign, with
/// `psi(r) = N h^{-l/2-d/4} r^l e^{-r^2/2h} L_{n'}^{(alpha)}(r^2/h)`,
/// normalised so that `∫ psi^2 r^{d-1} dr = 1`.
pub fn radial_eigenfunction_log(mode: &RadialMode, hbar: f64, r: f64) -> (f64, f64) {
    let alpha = mode.alpha();
    let x = r * r / hbar;
    let (p, ln_scale) = orthonormal_laguerre_scaled(mode.n_prime(), alpha, x);
    if p == 0.0 {
        return (f64::NEG_INFINITY, 0.0);
    }
    let ln_r_part = if mode.ell == 0 { 0.0 } else { mode.ell as f64 * r.ln() };
    let ln_abs = -(0.5 * mode.ell as f64 + 0.25 * mode.d as f64) * hbar.ln() + ln_r_part - 0.5 * x
        + 0.5 * (std::f64::consts::LN_2 - ln_gamma(alpha + 1.0))
        + p.abs().ln()
        + ln_scale;
    (ln_abs, p.signum())
}

pub fn radial_eigenfunction(mode: &RadialMode, hbar: f64, r: f64) -> f64 {
    let (ln_abs, sign) = radial_eigenfunction_log(mode, hbar, r);
    sign * ln_abs.exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use num_rational::BigRational;
    use num_traits::{One, ToPrimitive, Zero};

    /// Explicit sum `sum_i (-1)^i C(k+alpha, k-i) x^i / i!` in exact rationals.
    fn laguerre_exact(k: usize, alpha: BigRational, x: BigRational) -> BigRational {
        let mut total = BigRational::zero();
        for i in 0..=k {
            // C(k+alpha, k-i) = prod_{j=1}^{k-i} (alpha + i + j) / j
            let mut binom = BigRational::one();
            for j in 1..=(k - i) {
                binom = binom * (alpha.clone() + BigRational::from_integer(BigInt::from(i + j)))
                    / BigRational::from_integer(BigInt::from(j));
            }
            let mut term = binom;
            for j in 1..=i {
                term = term * x.clone() / BigRational::from_integer(BigInt::from(j));
            }
            if i % 2 == 1 {
                total -= term;
            } else {
                total += term;
            }
        }
        total
    }

    #[test]
    fn low_degree_values() {
        assert_eq!(laguerre_eval(0, 3.2, -7.0).unwrap(), 1.0);
        assert_eq!(laguerre_eval(1, 2.5, 1.0).unwrap(), 2.5);
    }

    #[test]
    fn degree_ten_matches_exact_sum() {
        let alpha = BigRational::new(BigInt::from(1), BigInt::from(2));
        let x = BigRational::new(BigInt::from(37), BigInt::from(10));
        let exact = laguerre_exact(10, alpha, x).to_f64().unwrap();
        let got = laguerre_eval(10, 0.5, 3.7).unwrap();
        assert!((got - exact).abs() <= 1e-13 * exact.abs().max(1.0), "{got} vs {exact}");
    }

    #[test]
    fn overflow_is_reported() {
        assert!(matches!(laguerre_eval(400, 0.0, -1e300), Err(Error::Overflow(_))));
    }

    #[test]
    fn orthonormal_agrees_with_classical() {
        let (k, alpha, x) = (9, 1.5, 2.3);
        let (p, s) = orthonormal_laguerre_scaled(k, alpha, x);
        let h2 = (crate::laguerre::gamma::ln_pochhammer(alpha + 1.0, k)
            - crate::laguerre::gamma::ln_pochhammer(1.0, k))
        .exp();
        let l = laguerre_eval(k, alpha, x).unwrap();
        assert!((p * s.exp() - l / h2.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn norm_constant_examples() {
        let m = RadialMode::new(2, 0, 0, 1.0).unwrap();
        assert!((norm_constant(&m) - 2f64.sqrt()).abs() < 1e-15);
        // Γ(5/2) = 3√π/4
        let m = RadialMode::new(3, 2, 0, 1.0).unwrap();
        let exact = (2.0 / (0.75 * std::f64::consts::PI.sqrt())).sqrt();
        assert!((norm_constant(&m) - exact).abs() <= 1e-14 * exact);
    }

    #[test]
    fn mode_validation() {
        assert!(RadialMode::new(2, 5, 2, 1.0).is_err());
        assert!(RadialMode::new(2, 2, 4, 1.0).is_err());
        assert!(RadialMode::new(1, 2, 0, 1.0).is_err());
        let m = RadialMode::new(3, 7, 3, 2.0).unwrap();
        assert_eq!(m.n_prime(), 2);
        assert_eq!(m.alpha(), 3.5);
        assert!((m.hbar() - 2.0 / 8.5).abs() < 1e-16);
    }
}
