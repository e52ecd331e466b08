//! Quasimode windows `I = [E0 - h^(1+2 gamma), E0 + h^(1+2 gamma)]`.

use rayon::prelude::*;
use serde::Serialize;

use crate::asymptotics::{branch_energy, ell_min, Engine};
use crate::error::{Error, Result};
use crate::laguerre::poly::{hbar_for, RadialMode};
use crate::potentials::PotentialSpec;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuasimodeWindow {
    pub n: usize,
    pub d: usize,
    pub energy: f64,
    pub eps: f64,
    pub gamma: f64,
    pub hbar: f64,
    /// Energy of the `l`-minimal branch.
    pub center: f64,
    pub halfwidth: f64,
    /// `(l, E_{l,n}(eps))` inside the window, increasing `l`.
    pub members: Vec<(usize, f64)>,
    /// `(l, E_{l,n}(eps))` for every parity-valid `l`.
    pub energies: Vec<(usize, f64)>,
    pub ell_max: usize,
}

impl QuasimodeWindow {
    pub fn member_energy(&self, ell: usize) -> Option<f64> {
        self.members.iter().find(|m| m.0 == ell).map(|m| m.1)
    }

    pub fn contains(&self, ell: usize) -> bool {
        self.member_energy(ell).is_some()
    }
}

pub fn quasimode_window(
    n: usize,
    d: usize,
    energy: f64,
    eps: f64,
    gamma: f64,
    v: &PotentialSpec,
    engine: Engine,
) -> Result<QuasimodeWindow> {
    if !(0.0..=1.0).contains(&gamma) {
        return Err(Error::Domain(format!("gamma = {gamma} outside [0, 1]")));
    }
    let hbar = hbar_for(energy, n, d);
    let ells: Vec<usize> = (ell_min(n)..=n).step_by(2).collect();
    let energies: Vec<(usize, f64)> = ells
        .par_iter()
        .map(|&ell| Ok((ell, branch_energy(engine, &RadialMode::new(d, n, ell, energy)?, v, eps)?)))
        .collect::<Result<_>>()?;
    let center = energies[0].1;
    let halfwidth = hbar.powf(1.0 + 2.0 * gamma);
    let members: Vec<(usize, f64)> = energies
        .iter()
        .copied()
        .filter(|&(_, e)| (e - center).abs() <= halfwidth)
        .collect();
    let ell_max = members.iter().map(|m| m.0).max().unwrap_or(0);
    Ok(QuasimodeWindow {
        n,
        d,
        energy,
        eps,
        gamma,
        hbar,
        center,
        halfwidth,
        members,
        energies,
        ell_max,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unperturbed_window_is_everything() {
        let v = PotentialSpec::quadratic(0.1, 0.5).unwrap();
        let w = quasimode_window(30, 2, 4.0, 0.0, 1.0, &v, Engine::Series).unwrap();
        assert_eq!(w.members.len(), 16);
        assert_eq!(w.ell_max, 30);
    }

    #[test]
    fn members_lie_in_window() {
        let v = PotentialSpec::quadratic(0.1, 0.5).unwrap();
        for gamma in [0.0, 0.5, 1.0] {
            let w = quasimode_window(51, 3, 4.0, 0.2, gamma, &v, Engine::Series).unwrap();
            assert_eq!(w.members[0].0, 1);
            for &(_, e) in &w.members {
                assert!((e - w.center).abs() <= w.halfwidth);
            }
        }
    }

    #[test]
    fn gamma_is_checked() {
        let v = PotentialSpec::quadratic(0.1, 0.5).unwrap();
        assert!(quasimode_window(10, 2, 4.0, 0.1, 1.5, &v, Engine::Series).is_err());
    }
}
