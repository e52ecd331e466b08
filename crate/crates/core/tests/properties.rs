use nalgebra::Rotation3;
use oscillab::asymptotics::{a2_identity_check, theorem1_residuals, Engine};
use oscillab::laguerre::overlap::{overlap_closed, overlap_closed_exact};
use oscillab::laguerre::poly::RadialMode;
use oscillab::nodal::{limit_nodal_measure, nodal_measure, nodal_measure_rotated, quasimode_window, SphericalCombo, Term};
use oscillab::perturbation::{mu_series, required_window};
use oscillab::potentials::{eval_potential, taylor_truncate, validate_slowly_varying, EvalMode, PotentialSpec};
use proptest::prelude::*;

fn cfg(cases: u32) -> ProptestConfig {
    ProptestConfig { cases, ..ProptestConfig::default() }
}

/// `(s, t)` with the parity of `l`.
fn parity_pair() -> impl Strategy<Value = (usize, usize, usize)> {
    (0usize..40, 0usize..30, 0usize..30).prop_map(|(ell, a, b)| (ell, ell + 2 * a, ell + 2 * b))
}

fn slowly_varying(delta: f64, c2_frac: f64, tail: &[f64]) -> PotentialSpec {
    let mut c = vec![0.0, 0.0, 0.5 * c2_frac * delta * delta];
    for (k, &x) in tail.iter().enumerate() {
        c.push(x * delta.powi(k as i32 + 3));
    }
    PotentialSpec::polynomial(c, delta).unwrap()
}

proptest! {
    #![proptest_config(cfg(64))]

    #[test]
    fn overlap_is_symmetric((ell, s, t) in parity_pair(), k in 0usize..=12, d in 2usize..=3) {
        prop_assert_eq!(overlap_closed(k, s, t, ell, d).unwrap(), overlap_closed(k, t, s, ell, d).unwrap());
    }

    #[test]
    fn overlap_vanishes_outside_band((ell, s, t) in parity_pair(), k in 0usize..=12, d in 2usize..=3) {
        let v = overlap_closed(k, s, t, ell, d).unwrap();
        let gap = (s as i64 - t as i64).unsigned_abs() as usize / 2;
        if gap > k {
            prop_assert_eq!(v, 0.0);
        } else {
            prop_assert!(v != 0.0);
        }
    }

    #[test]
    fn exact_rational_matches_float((ell, s, t) in parity_pair(), k in 0usize..=8, d in 2usize..=3) {
        let f = overlap_closed(k, s, t, ell, d).unwrap();
        let x = overlap_closed_exact(k, s, t, ell, d).unwrap();
        prop_assert!((f - x).abs() <= 1e-12 * x.abs().max(f64::MIN_POSITIVE), "{f} vs {x}");
    }

    #[test]
    fn tail_coefficients_respect_delta_powers(delta in 0.01f64..0.5, frac in 0.5f64..1.0,
                                             tail in prop::collection::vec(-1.0f64..1.0, 0..6)) {
        let v = slowly_varying(delta, frac, &tail);
        let r = validate_slowly_varying(&v, 1.0, delta).unwrap();
        prop_assert!(r.passed(), "{:?}", r.failed());
        for k in 3..v.taylor_coeffs.len() {
            prop_assert!(v.taylor_coeffs[k].abs() <= delta.powi(k as i32));
        }
    }

    #[test]
    fn full_truncation_reproduces_polynomial(delta in 0.01f64..0.5, frac in 0.5f64..1.0,
                                            tail in prop::collection::vec(-1.0f64..1.0, 0..6), u in 0.0f64..20.0) {
        let v = slowly_varying(delta, frac, &tail);
        let full = eval_potential(&v, u, EvalMode::Full).unwrap();
        let trunc = eval_potential(&v, u, EvalMode::Truncated(v.k_max())).unwrap();
        prop_assert_eq!(full, trunc);
    }

    #[test]
    fn validation_is_monotone_in_delta(delta in 0.01f64..0.4, frac in 0.5f64..1.0,
                                      tail in prop::collection::vec(-1.0f64..1.0, 0..6), grow in 1.0f64..3.0) {
        let v = slowly_varying(delta, frac, &tail);
        let wider = validate_slowly_varying(&v, 1.0, delta * grow).unwrap();
        for name in wider.failed() {
            prop_assert_eq!(name, "second_derivative_window");
        }
    }
}

proptest! {
    #![proptest_config(cfg(16))]

    #[test]
    fn larger_basis_leaves_series_unchanged(n in 2usize..14, d in 2usize..=3, extra in 1usize..20,
                                           tail in prop::collection::vec(-1.0f64..1.0, 1..3)) {
        let ell = n % 2;
        let mode = RadialMode::new(d, n, ell, 1.0).unwrap();
        let v = slowly_varying(0.2, 0.7, &tail);
        let vk = taylor_truncate(&v, v.k_max()).unwrap();
        let j = 3;
        let m = required_window(&mode, v.k_max(), j);
        let a = mu_series(&mode, &vk, j, m).unwrap();
        let b = mu_series(&mode, &vk, j, m + extra).unwrap();
        prop_assert_eq!(a.mu, b.mu);
    }

    #[test]
    fn residuals_reconstruct_energy(n in 4usize..60, pick in 0usize..30, d in 2usize..=3,
                                    delta in 0.01f64..0.2, eps in 0.01f64..0.2) {
        let ell = (n % 2 + 2 * pick).min(n);
        let mode = RadialMode::new(d, n, ell, 1.0).unwrap();
        let v = PotentialSpec::quadratic(0.5 * delta * delta, delta).unwrap();
        let r = theorem1_residuals(&mode, eps, &v, Engine::Series).unwrap();
        prop_assert!((r.reconstruct() - r.energy).abs() <= 4.0 * f64::EPSILON * r.energy);
    }

    #[test]
    fn step_three_identity_holds(n in 0usize..200, pick in 0usize..100, d in 2usize..=5) {
        let ell = (n % 2 + 2 * pick).min(n);
        prop_assert!(a2_identity_check(n, ell, d).unwrap().equal);
    }

    #[test]
    fn circle_tone_has_two_l_zeros(ell in 1usize..=512, m in 0i64..=1) {
        let s = nodal_measure(&SphericalCombo::tone(2, ell, m).unwrap(), 0).unwrap();
        prop_assert_eq!(s.measure_raw, 2.0 * ell as f64);
    }

    #[test]
    fn combo_json_round_trips(coeffs in prop::collection::vec(0.1f64..3.0, 1..8)) {
        let terms = coeffs.iter().enumerate().map(|(i, &a)| Term { ell: i + 1, m: -(i as i64), a }).collect();
        let c = SphericalCombo::new(3, terms).unwrap();
        prop_assert_eq!(SphericalCombo::from_json(&c.to_json()).unwrap(), c);
    }
}

proptest! {
    #![proptest_config(cfg(8))]

    #[test]
    fn sphere_measure_is_rotation_invariant(coeffs in prop::collection::vec(-2.0f64..2.0, 7),
                                            angles in (0.0f64..6.28, 0.0f64..3.14, 0.0f64..6.28)) {
        prop_assume!(coeffs.iter().any(|a| a.abs() > 0.1));
        let terms = coeffs.iter().enumerate().map(|(i, &a)| Term { ell: 3, m: i as i64 - 3, a }).collect();
        let c = SphericalCombo::new(3, terms).unwrap();
        let base = nodal_measure(&c, 6).unwrap().measure_raw;
        let rot = Rotation3::from_euler_angles(angles.0, angles.1, angles.2);
        let turned = nodal_measure_rotated(&c, 6, &rot).unwrap().measure_raw;
        prop_assert!((base - turned).abs() <= 5e-3 * base, "{base} vs {turned}");
    }

    #[test]
    fn limit_measure_ignores_overall_scale(seed in prop::collection::vec(-2.0f64..2.0, 64), scale in 0.1f64..10.0, flip: bool) {
        let v = PotentialSpec::quadratic(-0.1, 0.45).unwrap();
        let w = quasimode_window(50, 2, 4.0, 0.2, 0.5, &v, Engine::Series).unwrap();
        let mut terms = Vec::new();
        for (i, &(ell, _)) in w.members.iter().enumerate() {
            terms.push(Term { ell, m: 0, a: seed[(2 * i) % 64] });
            if ell > 0 {
                terms.push(Term { ell, m: 1, a: seed[(2 * i + 1) % 64] });
            }
        }
        let combo = SphericalCombo::new(2, terms).unwrap();
        prop_assume!(!combo.is_zero());
        let factor = if flip { -scale } else { scale };
        let a = limit_nodal_measure(&w, &combo, &v, 1).unwrap();
        let b = limit_nodal_measure(&w, &combo.weighted(|_| factor), &v, 1).unwrap();
        prop_assert_eq!(a.ell_star, b.ell_star);
        prop_assert_eq!(a.sample.measure_raw, b.sample.measure_raw);
    }
}
