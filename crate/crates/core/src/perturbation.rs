//! Rayleigh–Schrödinger coefficients of one radial sector.
//!
//! For `Op = H + g W` with `g = eps * h` and `W = <V psi_s, psi_t>`, the branch
//! through `E = h (n + d/2)` expands as `E(eps) = E + Σ_j (h eps)^j mu_j`.
//! With `u = psi_n`, `v_0 = u` and intermediate normalisation,
//!
//! ```text
//! mu_k = <W v_{k-1}, u>
//! v_k  = R Π⊥ [ -W v_{k-1} + Σ_{m=1}^{k-1} mu_m v_{k-m} ]
//! ```
//!
//! where `R` is diagonal with entries `1/(h (m - n))` in principal indices.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::laguerre::poly::RadialMode;
use crate::potentials::{taylor_truncate, PotentialSpec, TruncatedPotential};
use crate::spectra::hamiltonian::{potential_matrix, PotentialMatrix, Perturbation, Sector};
use crate::spectra::tracking::{track_eigenvalue, DEFAULT_STEPS};

/// Upper end of the coupling range where level spacing stays above `h/4`.
pub const EPS_MAX: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimateSource {
    Series { j: usize, k: usize },
    OracleDiag,
    OracleTracked,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyEstimate {
    pub value: f64,
    pub source: EstimateSource,
    /// Last-term size for series, eigen-residual for the oracles.
    pub error_bar: f64,
    /// Set when the inputs leave the range where the theory applies.
    pub warning: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerturbationSeries {
    pub mode: RadialMode,
    pub vk: TruncatedPotential,
    pub j: usize,
    /// `mu[0] = mu_1, ..., mu[J-1] = mu_J`.
    pub mu: Vec<f64>,
    /// Basis covers reduced indices `0..=basis_window`.
    pub basis_window: usize,
}

impl PerturbationSeries {
    /// `E + Σ_{j=1}^J (h eps)^j mu_j`.
    pub fn energy(&self, eps: f64) -> f64 {
        self.mode.energy + self.shift(eps)
    }

    /// `Σ_{j=1}^J (h eps)^j mu_j`, summed without adding `E`.
    pub fn shift(&self, eps: f64) -> f64 {
        let g = self.mode.hbar() * eps;
        let mut total = 0.0;
        let mut gp = 1.0;
        for mu in &self.mu {
            gp *= g;
            total += gp * mu;
        }
        total
    }

    /// `|(h eps)^J mu_J|`.
    pub fn last_term(&self, eps: f64) -> f64 {
        let g = self.mode.hbar() * eps;
        self.mu.last().map_or(0.0, |mu| (g.powi(self.j as i32) * mu).abs())
    }

    /// Series dump `{"mode", "mu", "J", "K", "M"}`.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "mode": self.mode,
            "mu": self.mu,
            "J": self.j,
            "K": self.vk.order,
            "M": self.basis_window,
        })
    }
}

/// `⌈ln(n+2)^2⌉`, the default jet and truncation order.
pub fn default_order(n: usize) -> usize {
    let l = ((n + 2) as f64).ln();
    (l * l).ceil() as usize
}

/// Default basis window `max(2KJ + 16, n)`.
pub fn default_window(n: usize, k: usize, j: usize) -> usize {
    (2 * k * j + 16).max(n)
}

/// Smallest window keeping every path `|m_i - m_{i+1}| <= 2K` of length `J`
/// from `n` inside the basis. The lower end `m = l` is a natural boundary.
pub fn required_window(mode: &RadialMode, k: usize, j: usize) -> usize {
    mode.n_prime() + k * j
}

/// Rayleigh–Schrödinger coefficients `mu_1..mu_J` of the basis vector
/// `target` for a symmetric coupling `w` in an `l`-sector with spacing `2h`.
pub fn rs_coefficients(w: &PotentialMatrix, target: usize, hbar: f64, j_max: usize) -> Vec<f64> {
    let size = w.data.nrows();
    let band = w.bandwidth.unwrap_or(size);
    let apply = |v: &[f64]| -> Vec<f64> {
        (0..size)
            .map(|i| {
                let lo = i.saturating_sub(band);
                let hi = (i + band + 1).min(size);
                let mut acc = 0.0;
                for (jj, vj) in v.iter().enumerate().take(hi).skip(lo) {
                    acc += w.data[(i, jj)] * vj;
                }
                acc
            })
            .collect()
    };
    let mut vs: Vec<Vec<f64>> = Vec::with_capacity(j_max);
    let mut unit = vec![0.0; size];
    unit[target] = 1.0;
    vs.push(unit);
    let mut mu = Vec::with_capacity(j_max);
    for k in 1..=j_max {
        let wv = apply(&vs[k - 1]);
        mu.push(wv[target]);
        if k == j_max {
            break;
        }
        let mut rhs: Vec<f64> = wv.iter().map(|x| -x).collect();
        for m in 1..k {
            let coeff = mu[m - 1];
            for (r, x) in rhs.iter_mut().zip(&vs[k - m]) {
                *r += coeff * x;
            }
        }
        rhs[target] = 0.0;
        for (i, r) in rhs.iter_mut().enumerate() {
            if i != target {
                *r /= 2.0 * hbar * (i as f64 - target as f64);
            }
        }
        vs.push(rhs);
    }
    mu
}

/// `mu_1..mu_J` for `V_K` in the basis window `0..=M` (reduced indices).
pub fn mu_series(mode: &RadialMode, vk: &TruncatedPotential, j: usize, m: usize) -> Result<PerturbationSeries> {
    if j == 0 {
        return Err(Error::Domain("jet order J must be >= 1".into()));
    }
    let k = vk.effective_order().max(2);
    let required = required_window(mode, k, j);
    if m < required {
        return Err(Error::TruncationWindow { required, given: m });
    }
    let sector = Sector {
        ell: mode.ell,
        d: mode.d,
        hbar: mode.hbar(),
    };
    let w = potential_matrix(sector, &Perturbation::Truncated(vk.clone()), m + 1)?;
    let mu = rs_coefficients(&w, mode.n_prime(), sector.hbar, j);
    Ok(PerturbationSeries {
        mode: *mode,
        vk: vk.clone(),
        j,
        mu,
        basis_window: m,
    })
}

fn eps_warning(eps: f64) -> Option<String> {
    if (0.0..=EPS_MAX).contains(&eps) {
        None
    } else {
        Some(format!("eps = {eps} outside [0, {EPS_MAX}]: level-spacing guarantees do not apply"))
    }
}

/// `E + Σ_{j<=J} (h eps)^j mu_j` for `V_K = taylor_truncate(V, K)`.
pub fn energy_series(mode: &RadialMode, v: &PotentialSpec, eps: f64, j: usize, k: usize) -> Result<EnergyEstimate> {
    let h = mode.hbar();
    if !(h < 1.0) {
        return Err(Error::Domain(format!("h_n = {h} must be < 1")));
    }
    let vk = taylor_truncate(v, k)?;
    let series = mu_series(mode, &vk, j, default_window(mode.n, k, j))?;
    Ok(EnergyEstimate {
        value: series.energy(eps),
        source: EstimateSource::Series { j, k },
        error_bar: series.last_term(eps),
        warning: eps_warning(eps),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpacingEntry {
    pub eps: f64,
    pub energy: f64,
    pub shift: f64,
    /// `h/4 - |lambda(eps) - lambda(0)|`.
    pub margin: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LevelSpacingReport {
    pub mode: RadialMode,
    pub hbar: f64,
    pub entries: Vec<SpacingEntry>,
}

impl LevelSpacingReport {
    pub fn passed(&self) -> bool {
        self.entries.iter().all(|e| e.passed)
    }

    pub fn worst_margin(&self) -> f64 {
        self.entries.iter().map(|e| e.margin).fold(f64::INFINITY, f64::min)
    }
}

/// Checks `|lambda_n(eps) - lambda_n(0)| < h/4` along the tracked branch.
pub fn level_spacing_check(mode: &RadialMode, v: &PotentialSpec, eps_grid: &[f64]) -> Result<LevelSpacingReport> {
    let h = mode.hbar();
    let pert = Perturbation::Full(v.clone());
    let mut entries = Vec::with_capacity(eps_grid.len());
    for &eps in eps_grid {
        let est = track_eigenvalue(mode, &pert, eps, DEFAULT_STEPS)?;
        let shift = (est.value - mode.energy).abs();
        let margin = 0.25 * h - shift;
        entries.push(SpacingEntry {
            eps,
            energy: est.value,
            shift,
            margin,
            passed: margin > 0.0,
        });
    }
    Ok(LevelSpacingReport {
        mode: *mode,
        hbar: h,
        entries,
    })
}

/// `|h^j (mu_j[V] - mu_j[V_K])|`: the `j`-th jet of the full bounded potential
/// (quadrature matrix elements) against that of its truncation (closed form).
pub fn jet_truncation_gap(mode: &RadialMode, v: &PotentialSpec, k: usize, j: usize) -> Result<f64> {
    if j == 0 {
        return Err(Error::Domain("jet index j must be >= 1".into()));
    }
    let vk = taylor_truncate(v, k)?;
    let h = mode.hbar();
    let sector = Sector {
        ell: mode.ell,
        d: mode.d,
        hbar: h,
    };
    let size = required_window(mode, k, j).max(mode.n_prime() + 40) + 1;
    let truncated = potential_matrix(sector, &Perturbation::Truncated(vk), size)?;
    let mu_k = rs_coefficients(&truncated, mode.n_prime(), h, j);
    let mu_full = if v.closed_form.is_some() {
        let full = potential_matrix(sector, &Perturbation::Full(v.clone()), size)?;
        rs_coefficients(&full, mode.n_prime(), h, j)
    } else if k == v.k_max() {
        mu_k.clone()
    } else {
        return Err(Error::Unsupported(
            "jet truncation gap needs a bounded closed form or K = K_max".into(),
        ));
    };
    Ok((h.powi(j as i32) * (mu_full[j - 1] - mu_k[j - 1])).abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::laguerre::overlap::{matrix_element, overlap_closed};

    fn mode(n: usize, ell: usize) -> RadialMode {
        RadialMode::new(2, n, ell, 1.0).unwrap()
    }

    #[test]
    fn zero_potential_has_zero_coefficients() {
        let s = mu_series(&mode(10, 2), &TruncatedPotential::zero(3), 4, 40).unwrap();
        assert!(s.mu.iter().all(|&m| m == 0.0));
    }

    #[test]
    fn first_coefficient_is_diagonal_element() {
        let md = mode(20, 4);
        let vk = TruncatedPotential::from_coeffs(vec![0.00125]);
        let s = mu_series(&md, &vk, 3, default_window(20, 2, 3)).unwrap();
        let expect = 0.00125 * md.hbar().powi(2) * overlap_closed(2, 20, 20, 4, 2).unwrap();
        assert!((s.mu[0] - expect).abs() <= 1e-15 * expect.abs());
    }

    #[test]
    fn second_coefficient_by_direct_sum() {
        let md = mode(6, 0);
        let h = md.hbar();
        let vk = TruncatedPotential::from_coeffs(vec![0.00125]);
        let s = mu_series(&md, &vk, 2, 30).unwrap();
        let mut direct = 0.0;
        for m in (0..=14usize).step_by(2) {
            if m == 6 || m.abs_diff(6) > 4 {
                continue;
            }
            let w = matrix_element(&vk, m, 6, 0, 2, h).unwrap();
            direct += w * w / (h * (6.0 - m as f64));
        }
        assert!((s.mu[1] - direct).abs() <= 1e-13 * direct.abs());
    }

    #[test]
    fn window_too_small_names_requirement() {
        let md = mode(10, 0);
        let vk = TruncatedPotential::from_coeffs(vec![0.001, 0.0001]);
        match mu_series(&md, &vk, 4, 6) {
            Err(Error::TruncationWindow { required, given }) => {
                assert_eq!(required, 5 + 3 * 4);
                assert_eq!(given, 6);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn energy_series_limits() {
        let md = mode(40, 0);
        let spec = PotentialSpec::quadratic(0.00125, 0.05).unwrap();
        let e0 = energy_series(&md, &spec, 0.0, 6, 2).unwrap();
        assert_eq!(e0.value, 1.0);
        let e1 = energy_series(&md, &spec, 0.1, 1, 2).unwrap();
        let vk = taylor_truncate(&spec, 2).unwrap();
        let w = matrix_element(&vk, 40, 40, 0, 2, md.hbar()).unwrap();
        assert!((e1.value - (1.0 + 0.1 * md.hbar() * w)).abs() < 1e-16);
        assert!(e1.warning.is_none());
        assert!(energy_series(&md, &spec, 0.3, 2, 2).unwrap().warning.is_some());
    }

    #[test]
    fn polynomial_jet_gap_vanishes() {
        let spec = PotentialSpec::polynomial(vec![0.0, 0.0, 0.001, 1e-5], 0.05).unwrap();
        assert_eq!(jet_truncation_gap(&mode(20, 0), &spec, 3, 1).unwrap(), 0.0);
        assert!(matches!(
            jet_truncation_gap(&mode(20, 0), &spec, 2, 1),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn default_orders() {
        assert_eq!(default_order(0), 1);
        assert_eq!(default_order(40), 14);
        assert_eq!(default_order(100), 22);
        assert_eq!(default_window(100, 2, 6), 100);
    }
}
