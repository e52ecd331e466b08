//! Continuation of one eigenvalue branch from `eps = 0`.

use super::hamiltonian::{
    eigen_system, hamiltonian_from_matrix, potential_matrix, refine_eigenpair, Perturbation, PotentialMatrix, Sector,
};
use crate::error::{Error, Result};
use crate::laguerre::poly::RadialMode;
use crate::perturbation::{EnergyEstimate, EstimateSource};

pub const DEFAULT_STEPS: usize = 16;
/// Eigenvalues closer than this cannot be told apart.
const AMBIGUITY_TOL: f64 = 1e-12;
/// Maximum number of step halvings.
const MAX_HALVINGS: u32 = 20;
const RESIDUAL_TOL: f64 = 1e-10;

/// Default basis size (functions `l, l+2, ...`) for tracking mode `n`.
pub fn default_basis_size(mode: &RadialMode, v: &Perturbation) -> usize {
    let reach = match v.bandwidth() {
        Some(k) => 8 * k.max(2) + 24,
        None => 48,
    };
    mode.n_prime() + reach + 1
}

/// Eigenvalue of `Op_{h,l}(eps)` continued from `h (n + d/2)` at `eps = 0`.
pub fn track_eigenvalue(mode: &RadialMode, v: &Perturbation, eps_target: f64, steps: usize) -> Result<EnergyEstimate> {
    let size = default_basis_size(mode, v);
    track_eigenvalue_with(mode, v, eps_target, steps, size)
}

pub fn track_eigenvalue_with(
    mode: &RadialMode,
    v: &Perturbation,
    eps_target: f64,
    steps: usize,
    size: usize,
) -> Result<EnergyEstimate> {
    if steps == 0 {
        return Err(Error::Domain("tracking needs at least one step".into()));
    }
    let sector = Sector {
        ell: mode.ell,
        d: mode.d,
        hbar: mode.hbar(),
    };
    if mode.n_prime() >= size {
        return Err(Error::Domain(format!(
            "basis of {size} functions does not contain n' = {}",
            mode.n_prime()
        )));
    }
    let w = potential_matrix(sector, v, size)?;
    track_with_matrix(mode, sector, &w, eps_target, steps)
}

/// Tracks through precomputed couplings; reused across `eps` sweeps.
pub fn track_with_matrix(
    mode: &RadialMode,
    sector: Sector,
    w: &PotentialMatrix,
    eps_target: f64,
    steps: usize,
) -> Result<EnergyEstimate> {
    let start = mode.energy;
    if eps_target == 0.0 {
        return Ok(EnergyEstimate {
            value: start,
            source: EstimateSource::OracleTracked,
            error_bar: 0.0,
            warning: None,
        });
    }
    let mut tracker = Tracker {
        sector,
        w,
        eps: 0.0,
        value: start,
        slope: None,
        residual: 0.0,
    };
    let de = eps_target / steps as f64;
    for s in 1..=steps {
        let target = if s == steps { eps_target } else { de * s as f64 };
        tracker.advance(target, 0)?;
    }
    Ok(EnergyEstimate {
        value: tracker.value,
        source: EstimateSource::OracleTracked,
        error_bar: tracker.residual,
        warning: None,
    })
}

struct Tracker<'a> {
    sector: Sector,
    w: &'a PotentialMatrix,
    eps: f64,
    value: f64,
    /// `dE/deps` estimated from the last accepted step.
    slope: Option<f64>,
    residual: f64,
}

impl Tracker<'_> {
    fn advance(&mut self, eps_next: f64, depth: u32) -> Result<()> {
        let step = eps_next - self.eps;
        let predicted = self.value + self.slope.unwrap_or(0.0) * step;
        let h = hamiltonian_from_matrix(self.sector, self.w, eps_next)?;
        let sys = eigen_system(&h)?;
        let mut by_distance: Vec<usize> = (0..sys.values.len()).collect();
        by_distance.sort_by(|&a, &b| {
            (sys.values[a] - predicted)
                .abs()
                .total_cmp(&(sys.values[b] - predicted).abs())
        });
        let best = by_distance[0];
        let second = by_distance[1];
        let d1 = (sys.values[best] - predicted).abs();
        let d2 = (sys.values[second] - predicted).abs();
        let collide = (sys.values[best] - sys.values[second]).abs() < AMBIGUITY_TOL;
        let unclear = d1 > 0.5 * d2;
        if collide || unclear {
            if depth >= MAX_HALVINGS {
                return Err(Error::BranchAmbiguity {
                    eps: eps_next,
                    lower: sys.values[best].min(sys.values[second]),
                    upper: sys.values[best].max(sys.values[second]),
                });
            }
            let mid = self.eps + 0.5 * step;
            self.advance(mid, depth + 1)?;
            return self.advance(eps_next, depth + 1);
        }
        let (mut value, mut r) = (sys.values[best], sys.residuals[best]);
        if r > RESIDUAL_TOL * sys.norm {
            let refined = refine_eigenpair(&h.matrix, value, &sys.vectors[best]);
            value = refined.0;
            r = refined.2;
        }
        if r > RESIDUAL_TOL * sys.norm {
            return Err(Error::NumericalFailure(format!(
                "tracked eigenpair at eps = {eps_next} has residual {r:e}"
            )));
        }
        self.slope = Some((value - self.value) / step);
        self.value = value;
        self.eps = eps_next;
        self.residual = r;
        Ok(())
    }
}

/// Eigenvalue at position `n'` of the sorted spectrum (no continuation).
pub fn diagonal_estimate(mode: &RadialMode, v: &Perturbation, eps: f64, size: usize) -> Result<EnergyEstimate> {
    let sector = Sector {
        ell: mode.ell,
        d: mode.d,
        hbar: mode.hbar(),
    };
    let w = potential_matrix(sector, v, size)?;
    let sys = eigen_system(&hamiltonian_from_matrix(sector, &w, eps)?)?;
    let i = mode.n_prime();
    Ok(EnergyEstimate {
        value: sys.values[i],
        source: EstimateSource::OracleDiag,
        error_bar: sys.residuals[i],
        warning: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potentials::{PotentialSpec, TruncatedPotential};

    #[test]
    fn zero_target_is_exact() {
        let mode = RadialMode::new(2, 10, 2, 1.0).unwrap();
        let v = Perturbation::Truncated(TruncatedPotential::from_coeffs(vec![0.01]));
        let e = track_eigenvalue(&mode, &v, 0.0, 16).unwrap();
        assert_eq!(e.value, mode.hbar() * 11.0);
    }

    #[test]
    fn tracked_equals_diagonal_for_small_coupling() {
        let mode = RadialMode::new(2, 20, 0, 1.0).unwrap();
        let v = Perturbation::Truncated(TruncatedPotential::from_coeffs(vec![0.00125]));
        let t = track_eigenvalue(&mode, &v, 0.1, 16).unwrap();
        let d = diagonal_estimate(&mode, &v, 0.1, default_basis_size(&mode, &v)).unwrap();
        assert!((t.value - d.value).abs() < 1e-14);
    }

    #[test]
    fn bounded_branch_stays_in_quarter_spacing() {
        let spec = PotentialSpec::gaussian_envelope(std::f64::consts::E * 0.25, 0.5, 8, 0.5).unwrap();
        let v = Perturbation::Full(spec);
        let mode = RadialMode::new(2, 20, 0, 1.0).unwrap();
        let e = track_eigenvalue(&mode, &v, 0.2, 16).unwrap();
        assert!((e.value - 1.0).abs() < 0.25 * mode.hbar());
    }
}
