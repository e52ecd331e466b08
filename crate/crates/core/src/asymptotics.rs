//! Large-`n` structure of the perturbed energies.
//!
//! The energy of the `(l, n)` branch is written as
//!
//! ```text
//! E_{l,n}(eps) = E + eps h V''(0) (h n/2)^2 [3 + (l^2/n^2)(-1 + S) + T]
//! ```
//!
//! with `V''(0)` the second `u`-derivative. `T` is read off the `l`-minimal
//! branch and `S` from the target branch, so the decomposition is exact.
//! The prefactor uses `(h n/2)^2 = (E/2 - h d/4)^2`, which matches the exact
//! diagonal moment `A_{2,n,n,l}` identically.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::laguerre::hyper::f32_exact;
use crate::laguerre::poly::RadialMode;
use crate::perturbation::{default_order, default_window, energy_series, mu_series};
use crate::potentials::{taylor_truncate, PotentialSpec};
use crate::spectra::hamiltonian::Perturbation;
use crate::spectra::tracking::{track_eigenvalue, DEFAULT_STEPS};

/// Source of branch energies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Engine {
    /// Perturbation series with `J = K = ⌈ln(n+2)^2⌉` (`K` capped at `K_max`).
    Series,
    /// Tracked eigenvalue of the truncated-basis Hamiltonian.
    Oracle,
}

/// `E_{l,n}(eps)` from the chosen engine.
pub fn branch_energy(engine: Engine, mode: &RadialMode, v: &PotentialSpec, eps: f64) -> Result<f64> {
    if eps == 0.0 {
        return Ok(mode.energy);
    }
    let order = default_order(mode.n);
    let k = order.min(v.k_max()).max(2);
    match engine {
        Engine::Series => Ok(energy_series(mode, v, eps, order, k)?.value),
        Engine::Oracle => {
            let pert = if v.closed_form.is_some() {
                Perturbation::Full(v.clone())
            } else {
                Perturbation::Truncated(taylor_truncate(v, v.k_max().max(2))?)
            };
            Ok(track_eigenvalue(mode, &pert, eps, DEFAULT_STEPS)?.value)
        }
    }
}

/// `E_{l,n}(eps) - E`. The series engine sums the corrections directly, so small shifts keep full relative precision.
pub fn branch_shift(engine: Engine, mode: &RadialMode, v: &PotentialSpec, eps: f64) -> Result<f64> {
    if eps == 0.0 {
        return Ok(0.0);
    }
    match engine {
        Engine::Series => {
            let order = default_order(mode.n);
            let k = order.min(v.k_max()).max(2);
            if !(mode.hbar() < 1.0) {
                return Err(Error::Domain(format!("h_n = {} must be < 1", mode.hbar())));
            }
            let vk = taylor_truncate(v, k)?;
            Ok(mu_series(mode, &vk, order, default_window(mode.n, k, order))?.shift(eps))
        }
        Engine::Oracle => Ok(branch_energy(engine, mode, v, eps)? - mode.energy),
    }
}

/// Engine used when none is configured.
pub fn default_engine() -> Engine {
    Engine::Series
}

/// Smallest `l` with `l = n (mod 2)`.
pub fn ell_min(n: usize) -> usize {
    n % 2
}

/// `eps h V''(0) (h n/2)^2`.
pub fn lead_prefactor(mode: &RadialMode, v: &PotentialSpec, eps: f64) -> f64 {
    let h = mode.hbar();
    let action = 0.5 * h * mode.n as f64;
    eps * h * v.second_derivative_at_zero() * action * action
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Theorem1Residuals {
    pub mode: RadialMode,
    pub eps: f64,
    pub delta: f64,
    /// `3 eps h V''(0) (h n/2)^2`.
    pub lead: f64,
    /// `eps h V''(0) (h n/2)^2`.
    pub prefactor: f64,
    pub energy: f64,
    pub energy_min_branch: f64,
    /// Absent on the `l`-minimal branch (and when `eps = 0`).
    pub s_hat: Option<f64>,
    pub t_hat: Option<f64>,
}

impl Theorem1Residuals {
    /// `E + prefactor [3 + (l^2/n^2)(-1 + S) + T]`, with `S = 0` on the `l`-minimal branch.
    pub fn reconstruct(&self) -> f64 {
        let Some(t) = self.t_hat else {
            return self.mode.energy;
        };
        let n = self.mode.n as f64;
        let l = self.mode.ell as f64;
        let ratio = l * l / (n * n);
        self.mode.energy + self.prefactor * (3.0 + ratio * (-1.0 + self.s_hat.unwrap_or(0.0)) + t)
    }
}

/// Two-point residual extraction for the `(l, n)` branch.
pub fn theorem1_residuals(
    mode: &RadialMode,
    eps: f64,
    v: &PotentialSpec,
    engine: Engine,
) -> Result<Theorem1Residuals> {
    if v.second_derivative_at_zero() == 0.0 {
        return Err(Error::DegenerateLead);
    }
    if !(mode.hbar() < 1.0) {
        return Err(Error::Domain(format!("h_n = {} must be < 1", mode.hbar())));
    }
    let prefactor = lead_prefactor(mode, v, eps);
    let base = Theorem1Residuals {
        mode: *mode,
        eps,
        delta: v.delta,
        lead: 3.0 * prefactor,
        prefactor,
        energy: mode.energy,
        energy_min_branch: mode.energy,
        s_hat: None,
        t_hat: None,
    };
    if eps == 0.0 {
        return Ok(base);
    }
    let n = mode.n as f64;
    let l_min = ell_min(mode.n);
    let min_mode = RadialMode { ell: l_min, ..*mode };
    let shift_min = branch_shift(engine, &min_mode, v, eps)?;
    let e_min = mode.energy + shift_min;
    let b_min = shift_min / prefactor;
    let t_hat = b_min - 3.0 + if l_min == 1 { 1.0 / (n * n) } else { 0.0 };
    let (energy, s_hat) = if mode.ell == l_min {
        (e_min, None)
    } else {
        let shift = branch_shift(engine, mode, v, eps)?;
        let e = mode.energy + shift;
        let b = shift / prefactor;
        let l = mode.ell as f64;
        (e, Some((b - 3.0 - t_hat) * n * n / (l * l) + 1.0))
    };
    Ok(Theorem1Residuals {
        energy,
        energy_min_branch: e_min,
        s_hat,
        t_hat: Some(t_hat),
        ..base
    })
}

/// Residuals for every parity-valid `l <= n`, in parallel.
pub fn theorem1_sweep(n: usize, d: usize, energy: f64, eps: f64, v: &PotentialSpec, engine: Engine) -> Result<Vec<Theorem1Residuals>> {
    (ell_min(n)..=n)
        .step_by(2)
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&ell| theorem1_residuals(&RadialMode::new(d, n, ell, energy)?, eps, v, engine))
        .collect()
}

/// Result of [`a2_identity_check`].
#[derive(Debug, Clone, PartialEq)]
pub struct A2Identity {
    pub equal: bool,
    /// `h^2 A_{2,n,n,l}` and the expanded form, at `E = 1`.
    pub lhs: BigRational,
    pub rhs: BigRational,
    pub difference: BigRational,
}

fn rat(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Exact `A_{2,n,n,l}` from the terminating `3F2` (integer or half-integer `alpha`).
pub fn a2_exact(n: usize, ell: usize, d: usize) -> Result<BigRational> {
    let mode = RadialMode::new(d, n, ell, 1.0)?;
    let two_alpha = (2 * ell + d) as i64 - 2;
    let alpha1 = rat(two_alpha + 2, 2);
    let poch = alpha1.clone() * (alpha1 + BigRational::one());
    Ok(poch * f32_exact(2, mode.n_prime(), 0, two_alpha))
}

/// `h^2 A_{2,n,n,l} = 6 (h n/2)^2 (1 - l^2/3n^2 + (2-d) l/3n^2 + d/n + d(d+2)/6n^2)`
/// in exact rationals, with `h = E/(n + d/2)` at `E = 1`.
pub fn a2_identity_check(n: usize, ell: usize, d: usize) -> Result<A2Identity> {
    let a2 = a2_exact(n, ell, d)?;
    let (ni, li, di) = (n as i64, ell as i64, d as i64);
    let h = rat(2, 2 * ni + di);
    let lhs = h.clone() * h.clone() * a2;
    let action = h * rat(ni, 2);
    let nn = ni * ni;
    let bracket = BigRational::one() - rat(li * li, 3 * nn) + rat((2 - di) * li, 3 * nn) + rat(di, ni)
        + rat(di * (di + 2), 6 * nn);
    let rhs = rat(6, 1) * action.clone() * action * bracket;
    let difference = lhs.clone() - rhs.clone();
    Ok(A2Identity {
        equal: difference.is_zero(),
        lhs,
        rhs,
        difference,
    })
}

/// One row of a lemma check, CSV `k,beta,N,ell,lhs,model,scaled_residual`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LemmaRecord {
    pub k: usize,
    pub beta: usize,
    pub big_n: usize,
    pub ell: usize,
    pub d: usize,
    pub lhs: f64,
    pub model: f64,
    /// `S(beta, N)` or `T(beta, k, N)`.
    pub offset: f64,
    pub residual: f64,
    pub scaled_residual: f64,
}

fn check_lemma_mode(big_n: usize, ell: usize, d: usize) -> Result<()> {
    RadialMode::new(d, big_n, ell, 1.0).map(|_| ())
}

/// `(N'+1)_beta / (N'+alpha+1)_beta` exactly.
fn prefactor_ratio(beta: usize, big_n: usize, ell: usize, d: usize) -> BigRational {
    let np = ((big_n - ell) / 2) as i64;
    let two_alpha = (2 * ell + d) as i64 - 2;
    let mut h = BigRational::one();
    for i in 0..beta as i64 {
        // (N'+1+i) / (N' + alpha + 1 + i)
        h *= rat(2 * (np + 1 + i), 2 * np + two_alpha + 2 + 2 * i);
    }
    h
}

/// Prefactor lemma: `h_beta(l/N) = 1 - 2 beta l/N + S(beta, N) + O((1+l^2)/N^2)`,
/// with `S` the offset on the `l`-minimal branch.
pub fn prefactor_expansion_check(beta: usize, big_n: usize, ell: usize, d: usize) -> Result<LemmaRecord> {
    check_lemma_mode(big_n, ell, d)?;
    let l0 = ell_min(big_n);
    let nn = big_n as i64;
    let s = prefactor_ratio(beta, big_n, l0, d) - BigRational::one() + rat(2 * beta as i64 * l0 as i64, nn);
    let h = prefactor_ratio(beta, big_n, ell, d);
    let model = BigRational::one() - rat(2 * (beta * ell) as i64, nn) + s.clone();
    let residual = (h.clone() - model.clone()).abs();
    let scale = rat(1 + (ell * ell) as i64, nn * nn);
    Ok(LemmaRecord {
        k: 0,
        beta,
        big_n,
        ell,
        d,
        lhs: h.to_f64().unwrap_or(f64::NAN),
        model: model.to_f64().unwrap_or(f64::NAN),
        offset: s.to_f64().unwrap_or(f64::NAN),
        residual: residual.to_f64().unwrap_or(f64::NAN),
        scaled_residual: (residual / scale).to_f64().unwrap_or(f64::NAN),
    })
}

/// `(alpha+1)_k 3F2(-k, k+1, -N'; beta+1, alpha+1; 1)` exactly.
fn f32_lhs(k: usize, beta: usize, big_n: usize, ell: usize, d: usize) -> BigRational {
    let two_alpha = (2 * ell + d) as i64 - 2;
    let mut poch = BigRational::one();
    for i in 0..k as i64 {
        poch *= rat(two_alpha + 2 + 2 * i, 2);
    }
    poch * f32_exact(k, (big_n - ell) / 2, beta, two_alpha)
}

/// `(2k)! / (k! (beta+1)_k) (N/2)^k`.
fn f32_leading(k: usize, beta: usize, big_n: usize) -> BigRational {
    let mut c = BigRational::one();
    for i in 0..k as i64 {
        // (2k)!/k! = prod_{i<k} (k+1+i); divided by (beta+1)_k; times N/2
        c *= rat((k as i64 + 1 + i) * big_n as i64, 2 * (beta as i64 + 1 + i));
    }
    c
}

/// `3F2` lemma: `(alpha+1)_k 3F2(...) = (2k)!/(k!(beta+1)_k) (N/2)^k (1 + beta l/N + T(beta,k,N))`
/// up to `O(k(1+l^2)/N^2)` relative to the leading factor.
pub fn f32_expansion_check(k: usize, beta: usize, big_n: usize, ell: usize, d: usize) -> Result<LemmaRecord> {
    check_lemma_mode(big_n, ell, d)?;
    if beta > k {
        return Err(Error::Domain(format!("beta = {beta} must not exceed k = {k}")));
    }
    let l0 = ell_min(big_n);
    let nn = big_n as i64;
    let lead = f32_leading(k, beta, big_n);
    let t = f32_lhs(k, beta, big_n, l0, d) / lead.clone() - BigRational::one() - rat((beta * l0) as i64, nn);
    let lhs = f32_lhs(k, beta, big_n, ell, d);
    let model_rel = BigRational::one() + rat((beta * ell) as i64, nn) + t.clone();
    let residual = (lhs.clone() / lead.clone() - model_rel.clone()).abs();
    let scaled = if k == 0 {
        BigRational::zero()
    } else {
        residual.clone() / rat((k * (1 + ell * ell)) as i64, nn * nn)
    };
    Ok(LemmaRecord {
        k,
        beta,
        big_n,
        ell,
        d,
        lhs: lhs.to_f64().unwrap_or(f64::NAN),
        model: (lead * model_rel).to_f64().unwrap_or(f64::NAN),
        offset: t.to_f64().unwrap_or(f64::NAN),
        residual: residual.to_f64().unwrap_or(f64::NAN),
        scaled_residual: scaled.to_f64().unwrap_or(f64::NAN),
    })
}

/// Lemma-check CSV `k,beta,N,ell,lhs,model,scaled_residual`.
pub fn lemma_csv(records: &[LemmaRecord]) -> String {
    let mut csv = crate::report::Csv::new("k,beta,N,ell,lhs,model,scaled_residual");
    for r in records {
        csv.push(crate::row![r.k, r.beta, r.big_n, r.ell, r.lhs, r.model, r.scaled_residual]);
    }
    csv.render()
}

/// Residual sweep CSV `n,ell,eps,delta,lead,S_hat,T_hat`.
pub fn residual_csv(rows: &[Theorem1Residuals]) -> String {
    let mut csv = crate::report::Csv::new("n,ell,eps,delta,lead,S_hat,T_hat");
    for r in rows {
        csv.push(crate::row![r.mode.n, r.mode.ell, r.eps, r.delta, r.lead, r.s_hat, r.t_hat]);
    }
    csv.render()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonotonicityReport {
    pub n: usize,
    pub eps: f64,
    pub sign: f64,
    /// `(l, E_{l,n}(eps))` for all parity-valid `l`.
    pub energies: Vec<(usize, f64)>,
    /// `(l, l', sign V''(0) (E_l - E_l'))` for every compared pair.
    pub comparisons: Vec<(usize, usize, f64)>,
    pub violations: Vec<(usize, usize, f64)>,
}

impl MonotonicityReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks `sign(V''(0)) (E_l - E_l') > 0` for `l < l'` with
/// `l' > l / (1 - 2 c2_hat max(delta, eps))`.
pub fn monotonicity_check(
    n: usize,
    d: usize,
    energy: f64,
    eps: f64,
    v: &PotentialSpec,
    engine: Engine,
    c2_hat: f64,
) -> Result<MonotonicityReport> {
    let v2 = v.second_derivative_at_zero();
    if v2 == 0.0 {
        return Err(Error::DegenerateLead);
    }
    let shrink = 1.0 - 2.0 * c2_hat * v.delta.max(eps);
    if !(shrink > 0.0) {
        return Err(Error::Domain(format!(
            "1 - 2 C2 max(delta, eps) = {shrink} must be > 0"
        )));
    }
    let ells: Vec<usize> = (ell_min(n)..=n).step_by(2).collect();
    let energies: Vec<(usize, f64)> = ells
        .par_iter()
        .map(|&ell| Ok((ell, branch_energy(engine, &RadialMode::new(d, n, ell, energy)?, v, eps)?)))
        .collect::<Result<_>>()?;
    let sign = v2.signum();
    let mut comparisons = Vec::new();
    if eps != 0.0 {
        for (i, &(l, el)) in energies.iter().enumerate() {
            for &(lp, elp) in &energies[i + 1..] {
                if lp as f64 > l as f64 / shrink {
                    comparisons.push((l, lp, sign * (el - elp)));
                }
            }
        }
    }
    let violations = comparisons.iter().copied().filter(|c| !(c.2 > 0.0)).collect();
    Ok(MonotonicityReport {
        n,
        eps,
        sign,
        energies,
        comparisons,
        violations,
    })
}
