use oscillab::laguerre::poly::RadialMode;
use oscillab::perturbation::{default_order, energy_series};
use oscillab::potentials::{eval_potential, taylor_truncate, EvalMode, PotentialSpec};
use oscillab::spectra::hamiltonian::Perturbation;
use oscillab::spectra::radial::fitted_growth;
use oscillab::spectra::{track_eigenvalue, DEFAULT_STEPS};

#[test]
fn gaussian_taylor_data_matches_closed_form_near_origin() {
    let v = PotentialSpec::gaussian_envelope(0.3, 1.5, 12, 0.9).unwrap();
    for &u in &[1e-3, 1e-2, 0.05, 0.1] {
        let full = eval_potential(&v, u, EvalMode::Full).unwrap();
        let trunc = eval_potential(&v, u, EvalMode::Truncated(12)).unwrap();
        // first omitted term is c_14 u^14 with |c_14| = 0.3 * 1.5^12 / 6!
        let bound = 0.3 * 1.5f64.powi(12) / 720.0 * u.powi(14) * 2.0 + 1e-16;
        assert!((full - trunc).abs() <= bound, "u = {u}: {full} vs {trunc}");
    }
}

#[test]
fn series_agrees_with_diagonalization_within_error_bar() {
    let v = PotentialSpec::polynomial(vec![0.0, 0.0, 0.02, -0.002, 0.0004], 0.2).unwrap();
    let pert = Perturbation::Truncated(taylor_truncate(&v, 4).unwrap());
    for &(d, n, ell) in &[(2, 20, 0), (2, 21, 5), (3, 40, 10), (3, 60, 60)] {
        let mode = RadialMode::new(d, n, ell, 1.0).unwrap();
        let j = default_order(n);
        for &eps in &[0.01, 0.05, 0.1] {
            let s = energy_series(&mode, &v, eps, j, 4).unwrap();
            let o = track_eigenvalue(&mode, &pert, eps, DEFAULT_STEPS).unwrap();
            assert!(
                (s.value - o.value).abs() <= s.error_bar + 1e-9,
                "{mode:?} eps {eps}: {} vs {} (bar {})",
                s.value,
                o.value,
                s.error_bar
            );
        }
    }
}

#[test]
fn unperturbed_growth_exponent_is_principal_number() {
    let pert = Perturbation::Truncated(oscillab::potentials::TruncatedPotential::zero(2));
    for &(d, n, ell) in &[(2, 10, 2), (3, 25, 5), (2, 40, 0)] {
        let mode = RadialMode::new(d, n, ell, 1.0).unwrap();
        let g = fitted_growth(&mode, 0.0, &pert, mode.energy).unwrap();
        assert!((g - n as f64).abs() < 0.02 * n as f64, "{mode:?}: {g}");
    }
}
