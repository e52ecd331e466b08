//! Log-domain gamma and Pochhammer helpers.

/// `ln Γ(x)` for `x > 0`.
pub fn ln_gamma(x: f64) -> f64 {
    statrs::function::gamma::ln_gamma(x)
}

/// `ln (x)_q = ln Γ(x+q) - ln Γ(x)` for `x > 0`, summed term by term.
pub fn ln_pochhammer(x: f64, q: usize) -> f64 {
    (0..q).map(|i| (x + i as f64).ln()).sum()
}

/// `ln C(k, j)`.
pub fn ln_binomial(k: usize, j: usize) -> f64 {
    debug_assert!(j <= k);
    let j = j.min(k - j);
    (0..j)
        .map(|i| ((k - i) as f64).ln() - ((i + 1) as f64).ln())
        .sum()
}

/// `ln Γ(q+1) - ln Γ(q+α+1)` for integer `q`, without forming either gamma.
pub fn ln_gamma_ratio(q: usize, alpha: f64) -> f64 {
    ln_pochhammer(1.0, q) - ln_pochhammer(alpha + 1.0, q) - ln_gamma(alpha + 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pochhammer_small_cases() {
        assert_eq!(ln_pochhammer(3.0, 0), 0.0);
        assert!((ln_pochhammer(1.0, 5).exp() - 120.0).abs() < 1e-12);
        assert!((ln_pochhammer(0.5, 3).exp() - 0.5 * 1.5 * 2.5).abs() < 1e-15);
    }

    #[test]
    fn binomial_values() {
        assert!((ln_binomial(10, 3).exp() - 120.0).abs() < 1e-11);
        assert_eq!(ln_binomial(7, 0), 0.0);
        assert_eq!(ln_binomial(7, 7), 0.0);
    }

    #[test]
    fn gamma_ratio_matches_direct() {
        let direct = ln_gamma(8.0) - ln_gamma(9.5);
        assert!((ln_gamma_ratio(7, 1.5) - direct).abs() < 1e-13);
    }
}
