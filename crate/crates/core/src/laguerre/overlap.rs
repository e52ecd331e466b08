//! Overlap coefficients
//! `A_{k,s,t,l} = ∫_0^∞ e^{-ρ} ρ^{alpha+k} L̂_{s'}(ρ) L̂_{t'}(ρ) dρ`
//! of the L²-normalised Laguerre polynomials, and the matrix elements of a
//! truncated potential built from them.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::gamma::{ln_binomial, ln_pochhammer};
use super::hyper::{f32_exact, f32_float};
use super::poly::alpha_for;
use super::quadrature::{OracleValue, OverlapOracle};
use crate::error::{Error, Result};
use crate::potentials::TruncatedPotential;
use crate::report::Csv;
use crate::row;

/// Largest `beta` whose sign is fixed empirically against the oracle.
const SIGN_TABLE_LEN: usize = 25;

/// Reduced indices `(s', t')` after checking `s, t >= l` and parity.
pub fn reduced_indices(s: usize, t: usize, ell: usize) -> Result<(usize, usize)> {
    for (name, v) in [("s", s), ("t", t)] {
        if v < ell || (v - ell) % 2 != 0 {
            return Err(Error::InvalidMode(format!(
                "index {name} = {v} must satisfy {name} >= l and {name} = l (mod 2) for l = {ell}"
            )));
        }
    }
    Ok(((s - ell) / 2, (t - ell) / 2))
}

/// Unsigned closed form in reduced indices: returns `(log magnitude of the
/// prefactor, 3F2 value)`.
fn closed_parts(k: usize, a: usize, b: usize, alpha: f64) -> (f64, f64) {
    let beta = a.abs_diff(b);
    let m = a.min(b);
    let ln_pref = ln_binomial(k, beta)
        + ln_pochhammer(alpha + 1.0, k)
        + 0.5 * (ln_pochhammer(m as f64 + 1.0, beta) - ln_pochhammer(m as f64 + alpha + 1.0, beta));
    (ln_pref, f32_float(k, m, beta, alpha))
}

fn closed_unsigned(k: usize, a: usize, b: usize, alpha: f64) -> f64 {
    let (ln_pref, f) = closed_parts(k, a, b, alpha);
    ln_pref.exp() * f
}

/// Sign of the closed form per `beta`, fixed once by comparison with the
/// quadrature oracle on a seed instance (`alpha = 1/2`, `min(s',t') = 1`, `k = beta`).
fn sign_table() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let alpha = 0.5;
        let m = 1usize;
        (0..SIGN_TABLE_LEN)
            .map(|beta| {
                let k = beta;
                let nodes = (2 * m + beta + k) / 2 + 2;
                let oracle = OverlapOracle::new(nodes.max(m + beta + 1), alpha)
                    .expect("seed oracle for the sign convention");
                let q = oracle.moment(k, m, m + beta).expect("seed moment").value;
                let c = closed_unsigned(k, m, m + beta, alpha);
                assert!(c > 0.0 && q != 0.0, "degenerate sign seed at beta = {beta}");
                q.signum()
            })
            .collect()
    })
}

/// `sigma(beta)`: the sign applied to the printed closed form.
pub fn overlap_sign(beta: usize) -> f64 {
    match sign_table().get(beta) {
        Some(&s) => s,
        // the table follows (-1)^beta; asserted in tests
        None => {
            if beta % 2 == 0 {
                1.0
            } else {
                -1.0
            }
        }
    }
}

/// `A_{k,s,t,l}` from the closed form
/// `sigma(beta) C(k,beta) (alpha+1)_k [(m+1)_beta/(m+alpha+1)_beta]^{1/2}
/// 3F2(-k, k+1, -m; beta+1, alpha+1; 1)` with `m = min(s',t')`,
/// `beta = |s'-t'|`; exactly zero for `beta > k`.
pub fn overlap_closed(k: usize, s: usize, t: usize, ell: usize, d: usize) -> Result<f64> {
    let (a, b) = reduced_indices(s, t, ell)?;
    let beta = a.abs_diff(b);
    if beta > k {
        return Ok(0.0);
    }
    let value = overlap_sign(beta) * closed_unsigned(k, a, b, alpha_for(ell, d));
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::Overflow(format!("A_{{{k},{s},{t},{ell}}} exceeds f64 range")))
    }
}

/// Closed form with the `3F2` factor and Pochhammer/binomial prefactor summed
/// in exact rationals; only the square-root bracket is rounded.
pub fn overlap_closed_exact(k: usize, s: usize, t: usize, ell: usize, d: usize) -> Result<f64> {
    let (a, b) = reduced_indices(s, t, ell)?;
    let beta = a.abs_diff(b);
    if beta > k {
        return Ok(0.0);
    }
    let m = a.min(b);
    // 2 alpha = 2l + d - 2
    let two_alpha = (2 * ell + d) as i64 - 2;
    let mut rational = f32_exact(k, m, beta, two_alpha);
    // C(k, beta) (alpha+1)_k
    for i in 0..k {
        rational *= BigRational::new(BigInt::from(two_alpha + 2 + 2 * i as i64), BigInt::from(2));
    }
    for i in 0..beta {
        rational *= BigRational::new(BigInt::from((k - i) as i64), BigInt::from((i + 1) as i64));
    }
    let alpha = alpha_for(ell, d);
    let bracket = (0.5 * (ln_pochhammer(m as f64 + 1.0, beta) - ln_pochhammer(m as f64 + alpha + 1.0, beta))).exp();
    let r = rational
        .to_f64()
        .ok_or_else(|| Error::Overflow("exact overlap exceeds f64 range".into()))?;
    Ok(overlap_sign(beta) * r * bracket)
}

/// Node count making `∫ x^k p_a p_b dmu` exact and tabulating both indices.
pub fn oracle_nodes(k: usize, a: usize, b: usize) -> usize {
    ((a + b + k).div_ceil(2) + 1).max(a.max(b) + 1)
}

/// `A_{k,s,t,l}` by Gauss–Laguerre quadrature in double-double arithmetic.
pub fn overlap_quadrature(k: usize, s: usize, t: usize, ell: usize, d: usize) -> Result<f64> {
    Ok(overlap_quadrature_scaled(k, s, t, ell, d)?.value)
}

/// As [`overlap_quadrature`], also returning `Σ |terms|` of the rule.
pub fn overlap_quadrature_scaled(k: usize, s: usize, t: usize, ell: usize, d: usize) -> Result<OracleValue> {
    let (a, b) = reduced_indices(s, t, ell)?;
    let oracle = OverlapOracle::new(oracle_nodes(k, a, b), alpha_for(ell, d))?;
    oracle.moment(k, a, b)
}

/// `<V_K psi_s, psi_t> = Σ_{k=2}^K c_k h^k A_{k,s,t,l}`.
pub fn matrix_element(vk: &TruncatedPotential, s: usize, t: usize, ell: usize, d: usize, hbar: f64) -> Result<f64> {
    let (a, b) = reduced_indices(s, t, ell)?;
    let beta = a.abs_diff(b);
    let mut total = 0.0;
    for k in 2..=vk.order {
        let c = vk.coeff(k);
        if c == 0.0 || beta > k {
            continue;
        }
        total += c * hbar.powi(k as i32) * overlap_closed(k, s, t, ell, d)?;
    }
    Ok(total)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    ClosedForm,
    Quadrature,
    ExactRational,
}

impl Provenance {
    pub fn as_str(&self) -> &'static str {
        match self {
            Provenance::ClosedForm => "closed_form",
            Provenance::Quadrature => "quadrature",
            Provenance::ExactRational => "exact_rational",
        }
    }
}

/// `A_{k,s,t,l}` over a window of principal indices of one sector.
#[derive(Debug, Clone, PartialEq)]
pub struct OverlapTable {
    pub ell: usize,
    pub d: usize,
    pub hbar: f64,
    /// Inclusive principal-index range `[s_min, s_max]`.
    pub window: (usize, usize),
    pub entries: BTreeMap<(usize, usize, usize), (f64, Provenance)>,
}

impl OverlapTable {
    /// All parity-valid `(s, t)` in the window and `k = 0..=k_max`.
    pub fn build(
        ell: usize,
        d: usize,
        hbar: f64,
        window: (usize, usize),
        k_max: usize,
        source: Provenance,
    ) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidMode(format!("dimension d = {d} must be >= 2")));
        }
        let lo = window.0.max(ell);
        let lo = lo + (lo - ell) % 2;
        let indices: Vec<usize> = (lo..=window.1).step_by(2).collect();
        let pairs: Vec<(usize, usize)> = indices
            .iter()
            .flat_map(|&s| indices.iter().map(move |&t| (s, t)))
            .collect();
        let rows: Vec<Vec<((usize, usize, usize), (f64, Provenance))>> = pairs
            .par_iter()
            .map(|&(s, t)| {
                (0..=k_max)
                    .map(|k| {
                        let v = match source {
                            Provenance::ClosedForm => overlap_closed(k, s, t, ell, d)?,
                            Provenance::Quadrature => overlap_quadrature(k, s, t, ell, d)?,
                            Provenance::ExactRational => overlap_closed_exact(k, s, t, ell, d)?,
                        };
                        Ok(((s, t, k), (v, source)))
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(OverlapTable {
            ell,
            d,
            hbar,
            window,
            entries: rows.into_iter().flatten().collect(),
        })
    }

    pub fn get(&self, k: usize, s: usize, t: usize) -> Option<f64> {
        self.entries.get(&(s, t, k)).map(|e| e.0)
    }

    /// CSV `s,t,k,value,provenance`, rows ordered by `s`, then `t`, then `k`.
    pub fn to_csv(&self) -> String {
        let mut csv = Csv::new("s,t,k,value,provenance");
        for (&(s, t, k), &(v, p)) in &self.entries {
            csv.push(row![s, t, k, v, p.as_str()]);
        }
        csv.render()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sign_table_is_alternating() {
        for beta in 0..SIGN_TABLE_LEN {
            assert_eq!(overlap_sign(beta), if beta % 2 == 0 { 1.0 } else { -1.0 });
        }
    }

    #[test]
    fn orthonormality_diagonal() {
        for s in [0usize, 2, 10, 40] {
            assert_eq!(overlap_closed(0, s, s, 0, 2).unwrap(), 1.0);
        }
    }

    #[test]
    fn first_and_second_diagonal_moments() {
        for (ell, d) in [(0usize, 2usize), (3, 3), (4, 2)] {
            let alpha = alpha_for(ell, d);
            for sp in 0..15usize {
                let s = ell + 2 * sp;
                let a1 = overlap_closed(1, s, s, ell, d).unwrap();
                let e1 = alpha + 1.0 + 2.0 * sp as f64;
                assert!((a1 - e1).abs() <= 1e-13 * e1);
                let a2 = overlap_closed(2, s, s, ell, d).unwrap();
                let spf = sp as f64;
                let e2 = 6.0 * spf * spf + 6.0 * spf * (alpha + 1.0) + (alpha + 1.0) * (alpha + 2.0);
                assert!((a2 - e2).abs() <= 1e-13 * e2);
                let q2 = overlap_quadrature(2, s, s, ell, d).unwrap();
                assert!((q2 - e2).abs() <= 1e-12 * e2);
            }
        }
    }

    #[test]
    fn quadrature_orthogonality_and_band() {
        assert!(overlap_quadrature(0, 4, 10, 0, 2).unwrap().abs() < 1e-12);
        // k = 3, |s'-t'| = 4
        assert!(overlap_quadrature(3, 2, 10, 0, 2).unwrap().abs() < 1e-12);
        assert_eq!(overlap_closed(3, 2, 10, 0, 2).unwrap(), 0.0);
    }

    #[test]
    fn first_moment_neighbour_magnitude() {
        let (ell, d) = (2usize, 2usize);
        let alpha = alpha_for(ell, d);
        for m in 0..10usize {
            let s = ell + 2 * m;
            let q = overlap_quadrature(1, s, s + 2, ell, d).unwrap();
            let mf = m as f64;
            let expect = ((mf + 1.0) * (mf + alpha + 1.0)).sqrt();
            assert!((q.abs() - expect).abs() < 1e-12 * expect);
            let c = overlap_closed(1, s, s + 2, ell, d).unwrap();
            assert!((c - q).abs() < 1e-12 * expect);
        }
    }

    #[test]
    fn parity_is_checked() {
        assert!(matches!(overlap_closed(2, 3, 4, 0, 2), Err(Error::InvalidMode(_))));
        assert!(matches!(overlap_closed(2, 0, 4, 2, 2), Err(Error::InvalidMode(_))));
    }

    #[test]
    fn exact_path_matches_float() {
        for (k, s, t, ell, d) in [(4usize, 10usize, 14usize, 2usize, 3usize), (8, 40, 36, 0, 2), (12, 101, 99, 5, 3)] {
            let f = overlap_closed(k, s, t, ell, d).unwrap();
            let e = overlap_closed_exact(k, s, t, ell, d).unwrap();
            assert!((f - e).abs() <= 1e-12 * e.abs(), "{f} vs {e}");
        }
    }

    #[test]
    fn matrix_element_single_term() {
        let vk = TruncatedPotential::from_coeffs(vec![0.005]);
        let h = 0.1;
        let m = matrix_element(&vk, 6, 6, 0, 2, h).unwrap();
        let a2 = overlap_closed(2, 6, 6, 0, 2).unwrap();
        assert_eq!(m, 0.005 * h.powi(2) * a2);
        assert_eq!(matrix_element(&TruncatedPotential::zero(4), 6, 8, 0, 2, h).unwrap(), 0.0);
    }

    #[test]
    fn table_csv_order_and_symmetry() {
        let t = OverlapTable::build(1, 3, 0.1, (1, 7), 3, Provenance::ClosedForm).unwrap();
        for (&(s, tt, k), &(v, _)) in &t.entries {
            assert_eq!(v, t.get(k, tt, s).unwrap());
        }
        let csv = t.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("s,t,k,value,provenance"));
        let keys: Vec<(usize, usize, usize)> = lines
            .map(|l| {
                let f: Vec<&str> = l.split(',').collect();
                (f[0].parse().unwrap(), f[1].parse().unwrap(), f[2].parse().unwrap())
            })
            .collect();
        let mut sorted = keys.clone();
        sorted.sort();
        assert_eq!(keys, sorted);
        assert_eq!(keys.len(), 4 * 4 * 4);
    }
}
