//! Acceptance suites. Each criterion returns one [`CriterionReport`].

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::asymptotics::{
    a2_identity_check, ell_min, f32_expansion_check, monotonicity_check, prefactor_expansion_check,
    theorem1_sweep, Engine, Theorem1Residuals,
};
use crate::error::{Error, Result};
use crate::laguerre::overlap::{oracle_nodes, overlap_closed};
use crate::laguerre::poly::{alpha_for, hbar_for, RadialMode};
use crate::laguerre::quadrature::OverlapOracle;
use crate::nodal::{limit_nodal_measure, nodal_measure, quasimode_window, SphericalCombo, Term};
use crate::perturbation::{energy_series, level_spacing_check};
use crate::potentials::{taylor_truncate, PotentialSpec};
use crate::spectra::hamiltonian::Perturbation;
use crate::spectra::{fitted_growth, track_eigenvalue, DEFAULT_STEPS};

pub const DEFAULT_SEED: u64 = 20_241_017;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriterionReport {
    pub id: usize,
    pub name: &'static str,
    pub passed: bool,
    pub summary: String,
    pub seconds: f64,
    pub details: serde_json::Value,
}

impl CriterionReport {
    pub fn line(&self) -> String {
        format!(
            "criterion {:>2} {:<28} {} ({:.1}s) {}",
            self.id,
            self.name,
            if self.passed { "PASS" } else { "FAIL" },
            self.seconds,
            self.summary
        )
    }
}

pub const NAMES: [&str; 10] = [
    "overlap-oracle-equivalence",
    "a2-identity",
    "series-vs-diagonalization",
    "level-spacing",
    "residual-scaling",
    "monotonicity",
    "lemma-checks",
    "growth-exponent",
    "nodal-exactness-scaling",
    "sign-dichotomy",
];

/// Runs criterion `id` (1-based); numerical errors become failures.
pub fn run_criterion(id: usize, seed: u64) -> CriterionReport {
    let start = Instant::now();
    let outcome = match id {
        1 => overlap_oracle_equivalence(),
        2 => a2_identity(seed),
        3 => series_vs_diagonalization(),
        4 => level_spacing(),
        5 => residual_scaling(),
        6 => monotonicity(),
        7 => lemma_checks(),
        8 => growth(seed),
        9 => nodal_exactness_scaling(seed),
        10 => sign_dichotomy(seed),
        _ => Err(Error::Domain(format!("unknown criterion {id}"))),
    };
    let seconds = start.elapsed().as_secs_f64();
    let name = NAMES.get(id.wrapping_sub(1)).copied().unwrap_or("unknown");
    match outcome {
        Ok((passed, summary, details)) => CriterionReport { id, name, passed, summary, seconds, details },
        Err(e) => CriterionReport {
            id,
            name,
            passed: false,
            summary: format!("error: {e}"),
            seconds,
            details: json!({ "error": e.to_string() }),
        },
    }
}

pub fn run_all(seed: u64) -> Vec<CriterionReport> {
    (1..=NAMES.len()).map(|id| run_criterion(id, seed)).collect()
}

type Outcome = Result<(bool, String, serde_json::Value)>;

/// Relative agreement required between closed form and quadrature.
pub const OVERLAP_REL_TOL: f64 = 1e-10;
/// Quadrature magnitude, relative to `Σ|terms|`, accepted as an exact zero.
pub const BAND_ZERO_TOL: f64 = 1e-24;

/// Every `(d, l, s', t', k)` with `s, t <= 224`, `k <= 12` and `|s'-t'| <= k + 2`.
fn overlap_oracle_equivalence() -> Outcome {
    const K_MAX: usize = 12;
    const TOP: usize = 224;
    let sectors: Vec<(usize, usize)> = [2usize, 3].iter().flat_map(|&d| (0..=TOP).map(move |l| (d, l))).collect();
    let per_sector: Vec<(usize, usize, f64, usize)> = sectors
        .par_iter()
        .map(|&(d, ell)| -> Result<(usize, usize, f64, usize)> {
            let a_max = (TOP - ell) / 2;
            let oracle = OverlapOracle::new(oracle_nodes(K_MAX, a_max, a_max), alpha_for(ell, d))?;
            let (mut compared, mut zeros, mut worst, mut bad) = (0usize, 0usize, 0.0f64, 0usize);
            for a in 0..=a_max {
                for b in a..=(a + K_MAX + 2).min(a_max) {
                    let q = oracle.moments(a, b, K_MAX)?;
                    for (k, qv) in q.iter().enumerate() {
                        let c = overlap_closed(k, ell + 2 * a, ell + 2 * b, ell, d)?;
                        if b - a > k {
                            zeros += 1;
                            if c != 0.0 || qv.value.abs() > BAND_ZERO_TOL * qv.scale {
                                bad += 1;
                            }
                        } else {
                            compared += 1;
                            let rel = (c - qv.value).abs() / qv.value.abs();
                            worst = worst.max(rel);
                            if !(rel <= OVERLAP_REL_TOL) {
                                bad += 1;
                            }
                        }
                    }
                }
            }
            Ok((compared, zeros, worst, bad))
        })
        .collect::<Result<_>>()?;
    let compared: usize = per_sector.iter().map(|x| x.0).sum();
    let zeros: usize = per_sector.iter().map(|x| x.1).sum();
    let worst = per_sector.iter().map(|x| x.2).fold(0.0, f64::max);
    let bad: usize = per_sector.iter().map(|x| x.3).sum();
    Ok((
        bad == 0,
        format!("{compared} in-band entries, worst rel {worst:.2e}; {zeros} band zeros; {bad} failures"),
        json!({ "compared": compared, "band_zeros": zeros, "worst_relative": worst, "failures": bad }),
    ))
}

/// 100 random `(d, n, l)` with `n <= 200`, exact rationals.
fn a2_identity(seed: u64) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cases = Vec::with_capacity(100);
    for _ in 0..100 {
        let d = rng.random_range(2..=3usize);
        let n = rng.random_range(1..=200usize);
        let ell = n % 2 + 2 * rng.random_range(0..=n / 2);
        cases.push((d, n, ell));
    }
    let results: Vec<bool> = cases
        .par_iter()
        .map(|&(d, n, ell)| Ok(a2_identity_check(n, ell, d)?.equal))
        .collect::<Result<_>>()?;
    let bad: Vec<(usize, usize, usize)> = cases
        .iter()
        .zip(&results)
        .filter(|(_, &ok)| !ok)
        .map(|(c, _)| *c)
        .collect();
    Ok((
        bad.is_empty(),
        format!("{} of {} cases exact", results.len() - bad.len(), results.len()),
        json!({ "cases": cases, "failures": bad }),
    ))
}

pub const SERIES_ORACLE_TOL: f64 = 1e-8;

/// `d = 2`, `E = 1`, `V_K = (delta^2/2) u^2`, `delta = 0.05`, `J = 6`.
fn series_vs_diagonalization() -> Outcome {
    let delta = 0.05;
    let v = PotentialSpec::quadratic(0.5 * delta * delta, delta)?;
    let pert = Perturbation::Truncated(taylor_truncate(&v, 2)?);
    let mut rows = Vec::new();
    let mut worst: f64 = 0.0;
    for n in [40usize, 100] {
        for ell in [0, n / 2, n] {
            let mode = RadialMode::new(2, n, ell, 1.0)?;
            for eps in [0.02, 0.05, 0.1] {
                let s = energy_series(&mode, &v, eps, 6, 2)?.value;
                let o = track_eigenvalue(&mode, &pert, eps, DEFAULT_STEPS)?.value;
                worst = worst.max((s - o).abs());
                rows.push(json!({ "n": n, "ell": ell, "eps": eps, "series": s, "oracle": o, "gap": (s - o).abs() }));
            }
        }
    }
    Ok((
        worst <= SERIES_ORACLE_TOL,
        format!("worst |series - oracle| = {worst:.2e} (tol {SERIES_ORACLE_TOL:.0e}) over {} cases", rows.len()),
        json!({ "rows": rows, "worst": worst }),
    ))
}

/// `V(u) = e s^2 u^2 exp(-(s u)^2)` with `s = 2`, so `sup V = 1`.
pub fn unit_gaussian_envelope() -> Result<PotentialSpec> {
    let scale = 2.0;
    PotentialSpec::gaussian_envelope(std::f64::consts::E * scale * scale, scale, 12, 0.1)
}

fn level_spacing() -> Outcome {
    let v = unit_gaussian_envelope()?;
    let eps_grid = [0.05, 0.1, 0.2];
    let mut rows = Vec::new();
    let mut worst = f64::INFINITY;
    let mut all = true;
    for n in [20usize, 50, 100] {
        for ell in [n % 2, n / 2 - (n / 2 + n) % 2, n] {
            let mode = RadialMode::new(2, n, ell, 1.0)?;
            let rep = level_spacing_check(&mode, &v, &eps_grid)?;
            all &= rep.passed();
            for e in &rep.entries {
                worst = worst.min(e.margin / (0.25 * rep.hbar));
                rows.push(json!({ "n": n, "ell": ell, "eps": e.eps, "shift": e.shift, "hbar": rep.hbar, "margin": e.margin }));
            }
        }
    }
    Ok((
        all,
        format!("{} cases, smallest margin {:.1}% of h/4", rows.len(), 100.0 * worst),
        json!({ "rows": rows }),
    ))
}

pub const RESIDUAL_DECREASE: f64 = 1.6;
pub const RESIDUAL_N: usize = 100;
pub const RESIDUAL_DELTAS: [f64; 3] = [0.04, 0.02, 0.01];
pub const RESIDUAL_EPS: [f64; 3] = [0.1, 0.05, 0.025];

/// Residual sweep over all `l` at one `(delta, eps)`: `(sup |S|, sup |T|, worst reconstruction error)`.
pub fn residual_sup(n: usize, delta: f64, eps: f64) -> Result<(f64, f64, f64, Vec<Theorem1Residuals>)> {
    let v = PotentialSpec::quadratic(0.5 * delta * delta, delta)?;
    let rows = theorem1_sweep(n, 2, 1.0, eps, &v, Engine::Series)?;
    let s = rows.iter().filter_map(|r| r.s_hat).map(f64::abs).fold(0.0, f64::max);
    let t = rows.iter().filter_map(|r| r.t_hat).map(f64::abs).fold(0.0, f64::max);
    let rec = rows
        .iter()
        .map(|r| (r.reconstruct() - r.energy).abs() / f64::EPSILON)
        .fold(0.0, f64::max);
    Ok((s, t, rec, rows))
}

fn residual_scaling() -> Outcome {
    let mut points = Vec::new();
    for &delta in &RESIDUAL_DELTAS {
        for &eps in &RESIDUAL_EPS {
            let (s, t, rec, _) = residual_sup(RESIDUAL_N, delta, eps)?;
            points.push((delta, eps, s, t, rec));
        }
    }
    let mut ratios = Vec::new();
    for p in &points {
        for q in &points {
            if (q.0.max(q.1) * 2.0 - p.0.max(p.1)).abs() < 1e-12 {
                ratios.push((p.0, p.1, q.0, q.1, p.2 / q.2, p.3 / q.3));
            }
        }
    }
    let worst_s = ratios.iter().map(|r| r.4).filter(|x| x.is_finite()).fold(f64::INFINITY, f64::min);
    let worst_t = ratios.iter().map(|r| r.5).filter(|x| x.is_finite()).fold(f64::INFINITY, f64::min);
    let worst_rec = points.iter().map(|p| p.4).fold(0.0, f64::max);
    let passed = worst_s >= RESIDUAL_DECREASE && worst_t >= RESIDUAL_DECREASE && worst_rec <= 8.0;
    Ok((
        passed,
        format!(
            "min decrease per halving: S {worst_s:.3}, T {worst_t:.3} (need {RESIDUAL_DECREASE}); reconstruction {worst_rec:.1} ulp"
        ),
        json!({
            "points": points.iter().map(|p| json!({"delta": p.0, "eps": p.1, "sup_S": p.2, "sup_T": p.3, "reconstruction_ulp": p.4})).collect::<Vec<_>>(),
            "ratios": ratios.iter().map(|r| json!({"from": [r.0, r.1], "to": [r.2, r.3], "S": r.4, "T": r.5})).collect::<Vec<_>>(),
        }),
    ))
}

fn monotonicity() -> Outcome {
    let (delta, eps, n) = (0.02, 0.05, 100usize);
    let (s, t, _, _) = residual_sup(n, delta, eps)?;
    let c2_hat = s.max(t) / delta.max(eps);
    let v = PotentialSpec::quadratic(0.5 * delta * delta, delta)?;
    let mut rows = Vec::new();
    let mut violations = 0;
    for spec in [v.clone(), v.negated()] {
        let rep = monotonicity_check(n, 2, 1.0, eps, &spec, Engine::Series, c2_hat)?;
        violations += rep.violations.len();
        rows.push(json!({ "sign": rep.sign, "pairs": rep.comparisons.len(), "violations": rep.violations }));
    }
    let pairs: usize = rows.iter().map(|r| r["pairs"].as_u64().unwrap_or(0) as usize).sum();
    Ok((
        violations == 0 && pairs > 0,
        format!("{violations} violations over {pairs} pairs (both signs, C2 = {c2_hat:.3})"),
        json!({ "c2_hat": c2_hat, "rows": rows }),
    ))
}

pub const LEMMA_NS: [usize; 3] = [100, 200, 400];
pub const LEMMA_STABILITY: f64 = 0.25;

fn within_band(values: &[f64], band: f64) -> bool {
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    values.iter().all(|v| (v - mean).abs() <= band * mean.abs())
}

/// Per-`N` constants: scaled residual sups for both lemmas and the offset constants.
fn lemma_constants(big_n: usize) -> Result<[f64; 4]> {
    let mut jobs = Vec::new();
    for d in [2usize, 3] {
        for k in 0..=8usize {
            for beta in 0..=k {
                jobs.push((d, k, beta));
            }
        }
    }
    let per_job: Vec<[f64; 4]> = jobs
        .par_iter()
        .map(|&(d, k, beta)| -> Result<[f64; 4]> {
            let mut out = [0.0f64; 4];
            for ell in (ell_min(big_n)..=big_n).step_by(2) {
                let f = f32_expansion_check(k, beta, big_n, ell, d)?;
                out[1] = out[1].max(f.scaled_residual);
                if ell == ell_min(big_n) && k > 0 {
                    out[3] = out[3].max(f.offset.abs() * big_n as f64 / (k * k) as f64);
                }
                if k == beta {
                    let p = prefactor_expansion_check(beta, big_n, ell, d)?;
                    out[0] = out[0].max(p.scaled_residual);
                    if ell == ell_min(big_n) && beta > 0 {
                        out[2] = out[2].max(p.offset.abs() * big_n as f64 / beta as f64);
                    }
                }
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    let mut out = [0.0f64; 4];
    for j in per_job {
        for i in 0..4 {
            out[i] = out[i].max(j[i]);
        }
    }
    Ok(out)
}

fn lemma_checks() -> Outcome {
    let consts: Vec<[f64; 4]> = LEMMA_NS.iter().map(|&n| lemma_constants(n)).collect::<Result<_>>()?;
    let labels = ["prefactor_residual", "f32_residual", "S_offset", "T_offset"];
    let mut stable = [true; 4];
    for (i, ok) in stable.iter_mut().enumerate() {
        let col: Vec<f64> = consts.iter().map(|c| c[i]).collect();
        *ok = within_band(&col, LEMMA_STABILITY);
    }
    let summary = labels
        .iter()
        .enumerate()
        .map(|(i, l)| {
            format!(
                "{l} [{}]{}",
                consts.iter().map(|c| format!("{:.3}", c[i])).collect::<Vec<_>>().join(", "),
                if stable[i] { "" } else { " unstable" }
            )
        })
        .collect::<Vec<_>>()
        .join("; ");
    Ok((
        stable.iter().all(|&s| s),
        summary,
        json!({ "N": LEMMA_NS, "labels": labels, "constants": consts }),
    ))
}

pub const GROWTH_TOL: f64 = 0.05;

fn growth(seed: u64) -> Outcome {
    let mut rows = Vec::new();
    let mut worst: f64 = 0.0;
    let zero = Perturbation::Truncated(crate::potentials::TruncatedPotential::zero(2));
    for n in [20usize, 50] {
        let mode = RadialMode::new(2, n, n % 2, 1.0)?;
        let n_hat = fitted_growth(&mode, 0.0, &zero, mode.energy)?;
        worst = worst.max((n_hat - n as f64).abs());
        rows.push(json!({ "eps": 0.0, "n": n, "ell": mode.ell, "n_hat": n_hat, "target": n }));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x6772_6f77);
    let pert = Perturbation::Full(unit_gaussian_envelope()?);
    for _ in 0..6 {
        let d = rng.random_range(2..=3usize);
        let n = rng.random_range(10..=40usize);
        let ell = n % 2 + 2 * rng.random_range(0..=n / 2);
        let mode = RadialMode::new(d, n, ell, 1.0)?;
        let e = track_eigenvalue(&mode, &pert, 0.1, DEFAULT_STEPS)?.value;
        let target = e / mode.hbar() - 0.5 * d as f64;
        let n_hat = fitted_growth(&mode, 0.1, &pert, e)?;
        worst = worst.max((n_hat - target).abs());
        rows.push(json!({ "eps": 0.1, "d": d, "n": n, "ell": ell, "energy": e, "n_hat": n_hat, "target": target }));
    }
    Ok((
        worst <= GROWTH_TOL,
        format!("worst |N_hat - N| = {worst:.4} (tol {GROWTH_TOL}) over {} instances", rows.len()),
        json!({ "rows": rows }),
    ))
}

/// Window parameters shared by the window-scaling and sign-dichotomy checks.
pub const WINDOW_ENERGY: f64 = 4.0;
pub const WINDOW_C2: f64 = 0.1;
pub const WINDOW_EPS: f64 = 0.2;
pub const WINDOW_NS: [usize; 3] = [50, 100, 200];
pub const SLOPE_TOL: f64 = 0.15;
pub const SPREAD_MAX: f64 = 3.0;
pub const SPHERE_LEVEL: usize = 6;

pub fn window_potential(sign: f64) -> Result<PotentialSpec> {
    PotentialSpec::quadratic(sign * WINDOW_C2, 0.5)
}

fn slope(points: &[(f64, f64)]) -> f64 {
    let m = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / m;
    let my = points.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}

fn random_tone_combo(rng: &mut ChaCha8Rng, d: usize, ell: usize) -> Result<SphericalCombo> {
    let terms = if d == 2 {
        vec![
            Term { ell, m: 0, a: rng.sample(rand_distr::StandardNormal) },
            Term { ell, m: 1, a: rng.sample(rand_distr::StandardNormal) },
        ]
    } else {
        (-(ell as i64)..=ell as i64)
            .map(|m| Term { ell, m, a: rng.sample(rand_distr::StandardNormal) })
            .collect()
    };
    SphericalCombo::new(d, terms)
}

fn nodal_exactness_scaling(seed: u64) -> Outcome {
    let tone_failures: Vec<usize> = (1..=512usize)
        .into_par_iter()
        .filter_map(|ell| {
            let bad = [0i64, 1].iter().any(|&m| {
                SphericalCombo::tone(2, ell, m)
                    .and_then(|c| nodal_measure(&c, 0))
                    .map(|s| s.measure_raw != 2.0 * ell as f64)
                    .unwrap_or(true)
            });
            bad.then_some(ell)
        })
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x6e6f_6461);
    let mut ratios = Vec::new();
    for ell in [10usize, 20, 40] {
        for _ in 0..3 {
            let combo = random_tone_combo(&mut rng, 3, ell)?;
            let s = nodal_measure(&combo, SPHERE_LEVEL)?;
            ratios.push((ell, s.measure_raw / ell as f64));
        }
    }
    let c_lo = ratios.iter().map(|r| r.1).fold(f64::INFINITY, f64::min);
    let c_hi = ratios.iter().map(|r| r.1).fold(0.0, f64::max);
    let spread = c_hi / c_lo;
    let mut slopes = Vec::new();
    for gamma in [0.0, 0.5, 1.0] {
        let v = window_potential(1.0)?;
        let mut pts = Vec::new();
        for &n in &WINDOW_NS {
            let w = quasimode_window(n, 2, WINDOW_ENERGY, WINDOW_EPS, gamma, &v, Engine::Series)?;
            pts.push((w.hbar.ln(), (w.ell_max as f64).ln(), w.ell_max));
        }
        let sl = slope(&pts.iter().map(|p| (p.0, p.1)).collect::<Vec<_>>());
        slopes.push((gamma, sl, pts.iter().map(|p| p.2).collect::<Vec<_>>()));
    }
    let slope_ok = slopes.iter().all(|s| (s.1 + (1.0 - s.0)).abs() <= SLOPE_TOL);
    let passed = tone_failures.is_empty() && spread <= SPREAD_MAX && slope_ok;
    Ok((
        passed,
        format!(
            "tones l<=512: {} failures; d=3 length/l in [{c_lo:.3}, {c_hi:.3}] spread {spread:.2}; slopes {}",
            tone_failures.len(),
            slopes.iter().map(|s| format!("g={}:{:.3}", s.0, s.1)).collect::<Vec<_>>().join(" ")
        ),
        json!({
            "tone_failures": tone_failures,
            "ratios": ratios,
            "spread": spread,
            "slopes": slopes.iter().map(|s| json!({"gamma": s.0, "slope": s.1, "ell_max": s.2})).collect::<Vec<_>>(),
        }),
    ))
}

fn generic_window_combo(rng: &mut ChaCha8Rng, ells: &[usize]) -> Result<SphericalCombo> {
    let mut terms = Vec::new();
    for &ell in ells {
        terms.push(Term { ell, m: 0, a: rng.sample(rand_distr::StandardNormal) });
        if ell > 0 {
            terms.push(Term { ell, m: 1, a: rng.sample(rand_distr::StandardNormal) });
        }
    }
    SphericalCombo::new(2, terms)
}

fn sign_dichotomy(seed: u64) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x7a65_726f);
    let mut positive_ok = true;
    let mut rows = Vec::new();
    let mut scaled = Vec::new();
    for gamma in [0.0, 0.5] {
        for &n in &WINDOW_NS {
            for sign in [1.0, -1.0] {
                let v = window_potential(sign)?;
                let w = quasimode_window(n, 2, WINDOW_ENERGY, WINDOW_EPS, gamma, &v, Engine::Series)?;
                let ells: Vec<usize> = w.members.iter().map(|m| m.0).collect();
                let combo = generic_window_combo(&mut rng, &ells)?;
                let lim = limit_nodal_measure(&w, &combo, &v, 1)?;
                let h = hbar_for(WINDOW_ENERGY, n, 2);
                if sign > 0.0 {
                    positive_ok &= lim.ell_star == ell_min(n) && lim.sample.measure_raw == 0.0;
                } else {
                    scaled.push(lim.sample.measure_raw / h.powf(gamma - 1.0));
                }
                rows.push(json!({
                    "gamma": gamma, "n": n, "sign": sign, "members": ells.len(),
                    "ell_star": lim.ell_star, "measure_raw": lim.sample.measure_raw,
                }));
            }
        }
    }
    let c_lo = scaled.iter().copied().fold(f64::INFINITY, f64::min);
    let c_hi = scaled.iter().copied().fold(0.0, f64::max);
    let spread = c_hi / c_lo;
    Ok((
        positive_ok && c_lo > 0.0 && spread <= SPREAD_MAX,
        format!(
            "V''>0: limit measure 0 at l* = l_min {}; V''<0: measure/h^(g-1) in [{c_lo:.3}, {c_hi:.3}] spread {spread:.2}",
            if positive_ok { "in all cases" } else { "VIOLATED" }
        ),
        json!({ "rows": rows, "c": c_lo, "C": c_hi, "spread": spread }),
    ))
}
