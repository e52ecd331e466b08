//! Dominant-frequency limits of quasimode nodal sets.
//!
//! `v(R omega) = sum_l psi_l(R) sum_m a_{l,m} Y_m^l(omega)`. For `R` past the last
//! radial zero, `psi_l(R) ~ kappa_l R^{N_l} e^{-R^2/2h}` with `N_l = E_l/h - d/2`,
//! so the largest `E_l` among contributing sectors wins as `R -> infinity`.

use serde::Serialize;

use super::harmonics::SphericalCombo;
use super::measure::{nodal_measure, NodalSample};
use super::window::QuasimodeWindow;
use crate::error::{Error, Result};
use crate::laguerre::poly::{radial_eigenfunction_log, RadialMode};
use crate::potentials::{taylor_truncate, PotentialSpec};
use crate::spectra::hamiltonian::Perturbation;
use crate::spectra::radial::{solve_radial, RadialSolution};

const DISTINCT_TOL: f64 = 1e-12;
const RADIAL_TOL: f64 = 1e-11;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LimitNodal {
    pub ell_star: usize,
    pub energy_star: f64,
    pub sample: NodalSample,
    /// `sign V''(0)`.
    pub curvature_sign: f64,
    /// `l*` equals the smallest parity-valid `l`.
    pub ell_star_minimal: bool,
}

fn contributing(window: &QuasimodeWindow, combo: &SphericalCombo) -> Result<Vec<(usize, f64)>> {
    if combo.d != window.d {
        return Err(Error::Domain(format!("combo in d = {} for a window in d = {}", combo.d, window.d)));
    }
    combo.check()?;
    let mut ells: Vec<usize> = combo.terms.iter().filter(|t| t.a != 0.0).map(|t| t.ell).collect();
    ells.sort_unstable();
    ells.dedup();
    ells.into_iter()
        .map(|ell| {
            window
                .member_energy(ell)
                .map(|e| (ell, e))
                .ok_or_else(|| Error::Domain(format!("l = {ell} is not a window member")))
        })
        .collect()
}

/// `l*` and the nodal measure of the `l*`-restricted combination.
pub fn limit_nodal_measure(
    window: &QuasimodeWindow,
    combo: &SphericalCombo,
    v: &PotentialSpec,
    refinement: usize,
) -> Result<LimitNodal> {
    let members = contributing(window, combo)?;
    let tol = DISTINCT_TOL * window.hbar;
    for (i, a) in members.iter().enumerate() {
        for b in &members[i + 1..] {
            if (a.1 - b.1).abs() <= tol {
                return Err(Error::Distinctness {
                    ell_a: a.0,
                    ell_b: b.0,
                    energy_a: a.1,
                    energy_b: b.1,
                });
            }
        }
    }
    let &(ell_star, energy_star) = members
        .iter()
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .expect("combo has a nonzero term");
    let sample = nodal_measure(&combo.restricted(ell_star), refinement)?;
    Ok(LimitNodal {
        ell_star,
        energy_star,
        sample,
        curvature_sign: v.second_derivative_at_zero().signum(),
        ell_star_minimal: ell_star == window.n % 2,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RadiusRecord {
    pub limit: LimitNodal,
    /// `(ln R, raw measure)`.
    pub rows: Vec<(f64, f64)>,
    /// `ln R` below which radial zeros may intervene.
    pub log_r_min: f64,
}

impl RadiusRecord {
    /// `|measure(R) - limit|` per row.
    pub fn gaps(&self) -> Vec<f64> {
        self.rows.iter().map(|r| (r.1 - self.limit.sample.measure_raw).abs()).collect()
    }
}

/// `ln |psi_l(R)| + R^2/2h` with `psi_l` matched to the unperturbed eigenfunction at
/// `r_m`, and its sign.
struct RadialProfile {
    sol: RadialSolution,
    offset: f64,
    sign: f64,
    exponent: f64,
}

impl RadialProfile {
    fn new(window: &QuasimodeWindow, ell: usize, energy_l: f64, v: &Perturbation, r_m: f64) -> Result<Self> {
        let mode = RadialMode::new(window.d, window.n, ell, window.energy)?;
        let sol = solve_radial(&mode, window.eps, v, energy_l, (r_m, 2.0 * r_m), RADIAL_TOL)?;
        let (log0, sign0) = radial_eigenfunction_log(&mode, window.hbar, r_m);
        Ok(RadialProfile {
            offset: log0 - sol.log_abs_psi(0),
            sign: sign0 * sol.sign(0) * sol.sign(sol.grid.len() - 1),
            exponent: energy_l / window.hbar - window.d as f64 / 2.0,
            sol,
        })
    }

    fn log_phi(&self, log_r: f64) -> f64 {
        let g = &self.sol.grid;
        let last = g.len() - 1;
        let (l0, l1) = (g[0].ln(), g[last].ln());
        let raw = if log_r >= l1 {
            self.sol.log_abs_phi(last) + self.exponent * (log_r - l1)
        } else {
            let t = (log_r - l0) / (l1 - l0) * last as f64;
            let i = (t.floor() as usize).min(last - 1);
            let f = t - i as f64;
            (1.0 - f) * self.sol.log_abs_phi(i) + f * self.sol.log_abs_phi(i + 1)
        };
        raw + self.offset
    }
}

fn perturbation_for(v: &PotentialSpec) -> Result<Perturbation> {
    Ok(if v.closed_form.is_some() {
        Perturbation::Full(v.clone())
    } else {
        Perturbation::Truncated(taylor_truncate(v, v.k_max().max(2))?)
    })
}

/// Nodal measure of `v(R, .)` at each `ln R` in `log_radii`, beside the `R -> infinity` limit.
pub fn finite_radius_convergence(
    window: &QuasimodeWindow,
    combo: &SphericalCombo,
    v: &PotentialSpec,
    log_radii: &[f64],
    refinement: usize,
) -> Result<RadiusRecord> {
    let limit = limit_nodal_measure(window, combo, v, refinement)?;
    let members = contributing(window, combo)?;
    let n = window.n as f64;
    let x_m = 2.0 * n + window.d as f64 + 8.0 * (n + 1.0).sqrt();
    let r_m = (window.hbar * x_m).sqrt();
    let pert = perturbation_for(v)?;
    let profiles: Vec<(usize, RadialProfile)> = members
        .iter()
        .map(|&(ell, e)| Ok((ell, RadialProfile::new(window, ell, e, &pert, r_m)?)))
        .collect::<Result<_>>()?;
    let log_r_min = r_m.ln();
    let mut rows = Vec::with_capacity(log_radii.len());
    for &lr in log_radii {
        if !(lr >= log_r_min) {
            return Err(Error::Range(format!("ln R = {lr} below the last radial zero bound {log_r_min}")));
        }
        let logs: Vec<(usize, f64, f64)> = profiles.iter().map(|(l, p)| (*l, p.log_phi(lr), p.sign)).collect();
        let top = logs.iter().map(|x| x.1).fold(f64::NEG_INFINITY, f64::max);
        let weighted = combo.weighted(|ell| {
            logs.iter()
                .find(|x| x.0 == ell)
                .map(|x| x.2 * (x.1 - top).exp())
                .unwrap_or(0.0)
        });
        rows.push((lr, nodal_measure(&weighted, refinement)?.measure_raw));
    }
    Ok(RadiusRecord { limit, rows, log_r_min })
}

#[cfg(test)]
mod tests {
    use super::super::harmonics::Term;
    use super::super::window::quasimode_window;
    use super::*;
    use crate::asymptotics::Engine;

    fn spec(c2: f64) -> PotentialSpec {
        PotentialSpec::quadratic(c2, 0.5).unwrap()
    }

    #[test]
    fn single_sector_limit_is_the_tone() {
        let v = spec(0.1);
        let w = quasimode_window(20, 2, 4.0, 0.2, 0.5, &v, Engine::Series).unwrap();
        let c = SphericalCombo::new(2, vec![Term { ell: 4, m: 0, a: 1.0 }, Term { ell: 4, m: 1, a: 0.3 }]).unwrap();
        let l = limit_nodal_measure(&w, &c, &v, 1).unwrap();
        assert_eq!(l.ell_star, 4);
        assert_eq!(l.sample.measure_raw, 8.0);
    }

    #[test]
    fn sign_dichotomy_small_case() {
        let terms = |ells: &[usize]| {
            ells.iter().map(|&l| Term { ell: l, m: 0, a: 1.0 + l as f64 * 0.01 }).collect::<Vec<_>>()
        };
        let v = spec(0.1);
        let w = quasimode_window(20, 2, 4.0, 0.2, 0.5, &v, Engine::Series).unwrap();
        let ells: Vec<usize> = w.members.iter().map(|m| m.0).collect();
        let c = SphericalCombo::new(2, terms(&ells)).unwrap();
        let l = limit_nodal_measure(&w, &c, &v, 1).unwrap();
        assert!(l.ell_star_minimal && l.sample.measure_raw == 0.0);
        let vn = v.negated();
        let w = quasimode_window(20, 2, 4.0, 0.2, 0.5, &vn, Engine::Series).unwrap();
        let ells: Vec<usize> = w.members.iter().map(|m| m.0).collect();
        let c = SphericalCombo::new(2, terms(&ells)).unwrap();
        let l = limit_nodal_measure(&w, &c, &vn, 1).unwrap();
        assert_eq!(l.ell_star, w.ell_max);
        assert_eq!(l.sample.measure_raw, 2.0 * w.ell_max as f64);
    }

    #[test]
    fn ties_are_errors() {
        let v = spec(0.1);
        let w = quasimode_window(10, 2, 4.0, 0.0, 0.5, &v, Engine::Series).unwrap();
        let c = SphericalCombo::new(2, vec![Term { ell: 0, m: 0, a: 1.0 }, Term { ell: 2, m: 0, a: 1.0 }]).unwrap();
        assert!(matches!(limit_nodal_measure(&w, &c, &v, 0), Err(Error::Distinctness { .. })));
    }

    #[test]
    fn unperturbed_single_sector_is_radius_independent() {
        let v = spec(0.1);
        let w = quasimode_window(12, 2, 4.0, 0.0, 0.0, &v, Engine::Series).unwrap();
        let c = SphericalCombo::new(2, vec![Term { ell: 6, m: 0, a: 1.0 }, Term { ell: 6, m: 1, a: -2.0 }]).unwrap();
        let r = finite_radius_convergence(&w, &c, &v, &[1.5, 2.0, 5.0, 50.0], 1).unwrap();
        assert!(r.gaps().iter().all(|&g| g == 0.0));
    }

    #[test]
    fn two_sector_combo_converges() {
        let v = spec(0.1);
        let w = quasimode_window(20, 2, 4.0, 0.2, 0.0, &v, Engine::Series).unwrap();
        let c = SphericalCombo::new(2, vec![Term { ell: 0, m: 0, a: 0.2 }, Term { ell: 6, m: 0, a: 1.0 }]).unwrap();
        let radii: Vec<f64> = (0..12).map(|i| 1.0 + 10f64.powf(i as f64 * 0.5)).collect();
        let r = finite_radius_convergence(&w, &c, &v, &radii, 1).unwrap();
        assert_eq!(r.limit.ell_star, 0);
        assert_eq!(r.rows[0].1, 12.0);
        assert_eq!(r.rows.last().unwrap().1, 0.0);
        let g = r.gaps();
        assert!(g.windows(2).all(|p| p[1] <= p[0]));
    }
}
