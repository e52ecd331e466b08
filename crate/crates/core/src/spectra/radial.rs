//! Radial ODE for a fixed energy.
//!
//! With `psi = phi * exp(-r^2/2h)` the sector equation becomes
//!
//! ```text
//! phi'' + ((d-1)/r - 2r/h) phi' + (2E/h^2 - d/h - 2 eps V(r^2)/h - l(l+d-2)/r^2) phi = 0
//! ```
//!
//! whose recessive solution grows like `r^N`, `N = E/h - d/2`. The solver
//! integrates `(phi, phi')` with an adaptive Dormand–Prince 5(4) pair and
//! rescales the state whenever it leaves `[1e-100, 1e100]`, accumulating the
//! logarithm of the scale.

use serde::Serialize;

use super::hamiltonian::Perturbation;
use crate::error::{Error, Result};
use crate::laguerre::poly::RadialMode;
use crate::potentials::{eval_potential, EvalMode};

/// Grid points reported on `[r0, r1]`.
const GRID_POINTS: usize = 401;
/// Extra decay `(r_end^2 - r1^2)/h` used to shed the dominant component.
const SHED_EXPONENT: f64 = 60.0;
const MAX_STEPS: usize = 20_000_000;
/// Minimum `r^2/h` at the outer end for [`growth_exponent`].
const MIN_OUTER_EXPONENT: f64 = 40.0;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RadialSolution {
    pub mode: RadialMode,
    pub eps: f64,
    pub hbar: f64,
    pub energy: f64,
    /// Increasing radii.
    pub grid: Vec<f64>,
    /// Stripped solution `phi` and `phi'` at the grid, in units of `exp(renormalization_log)`.
    pub phi: Vec<f64>,
    pub dphi: Vec<f64>,
    /// Accumulated log scale per grid point.
    pub renormalization_log: Vec<f64>,
}

impl RadialSolution {
    /// `ln |psi(r_i)|` (up to the arbitrary overall constant).
    pub fn log_abs_psi(&self, i: usize) -> f64 {
        self.phi[i].abs().ln() + self.renormalization_log[i] - 0.5 * self.grid[i] * self.grid[i] / self.hbar
    }

    pub fn sign(&self, i: usize) -> f64 {
        self.phi[i].signum()
    }

    /// `ln |phi(r_i)|`.
    pub fn log_abs_phi(&self, i: usize) -> f64 {
        self.phi[i].abs().ln() + self.renormalization_log[i]
    }

    /// `psi(r_i)` samples (may underflow to zero).
    pub fn values(&self) -> Vec<f64> {
        (0..self.grid.len())
            .map(|i| self.sign(i) * self.log_abs_psi(i).exp())
            .collect()
    }

    /// Radial profile CSV `r,log_abs_psi,sign`.
    pub fn to_csv(&self) -> String {
        let mut csv = crate::report::Csv::new("r,log_abs_psi,sign");
        for i in 0..self.grid.len() {
            csv.push(crate::row![self.grid[i], self.log_abs_psi(i), self.sign(i)]);
        }
        csv.render()
    }
}

/// Right-hand side of the stripped equation.
struct Rhs<'a> {
    d: f64,
    hbar: f64,
    centrifugal: f64,
    constant: f64,
    eps: f64,
    v: &'a Perturbation,
}

impl<'a> Rhs<'a> {
    fn new(mode: &RadialMode, eps: f64, v: &'a Perturbation, energy: f64) -> Self {
        let hbar = mode.hbar();
        let d = mode.d as f64;
        let l = mode.ell as f64;
        Rhs {
            d,
            hbar,
            centrifugal: l * (l + d - 2.0),
            constant: 2.0 * energy / (hbar * hbar) - d / hbar,
            eps,
            v,
        }
    }

    fn potential(&self, u: f64) -> f64 {
        if self.eps == 0.0 {
            return 0.0;
        }
        match self.v {
            Perturbation::Truncated(vk) => vk.eval(u),
            Perturbation::Full(spec) => eval_potential(spec, u, EvalMode::Full).unwrap_or(f64::NAN),
        }
    }

    fn eval(&self, r: f64, y: [f64; 2]) -> [f64; 2] {
        let q = self.constant - 2.0 * self.eps * self.potential(r * r) / self.hbar - self.centrifugal / (r * r);
        let p = (self.d - 1.0) / r - 2.0 * r / self.hbar;
        [y[1], -p * y[1] - q * y[0]]
    }
}

// Dormand–Prince 5(4) tableau.
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

struct Integrator<'a> {
    rhs: Rhs<'a>,
    tol: f64,
    r: f64,
    y: [f64; 2],
    log_scale: f64,
    h: f64,
    steps: usize,
}

impl Integrator<'_> {
    /// Integrates to `target` (either direction), landing on it exactly.
    fn advance_to(&mut self, target: f64) -> Result<()> {
        let dir = (target - self.r).signum();
        if dir == 0.0 {
            return Ok(());
        }
        self.h = dir * self.h.abs();
        while (target - self.r) * dir > 0.0 {
            let mut h = self.h;
            let last = (self.r + h - target) * dir >= 0.0;
            if last {
                h = target - self.r;
            }
            let (y_new, err) = self.step(h);
            if err <= 1.0 && y_new.iter().all(|v| v.is_finite()) {
                self.r = if last { target } else { self.r + h };
                self.y = y_new;
                self.rescale();
                let grow = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
                if !last {
                    self.h = h * grow;
                } else {
                    self.h = self.h.abs().max(h.abs()) * dir;
                }
            } else {
                let shrink = if err.is_finite() { (0.9 * err.powf(-0.25)).clamp(0.1, 0.5) } else { 0.1 };
                self.h = h * shrink;
            }
            self.steps += 1;
            if self.steps > MAX_STEPS || self.h.abs() < 1e-14 * self.r.abs().max(1e-300) {
                return Err(Error::IntegratorFailure(format!(
                    "step size collapsed near r = {} (h = {:e}, {} steps)",
                    self.r, self.h, self.steps
                )));
            }
        }
        Ok(())
    }

    fn step(&self, h: f64) -> ([f64; 2], f64) {
        let mut k = [[0.0f64; 2]; 7];
        for s in 0..7 {
            let mut ys = self.y;
            for (j, kj) in k.iter().enumerate().take(s) {
                ys[0] += h * A[s][j] * kj[0];
                ys[1] += h * A[s][j] * kj[1];
            }
            k[s] = self.rhs.eval(self.r + C[s] * h, ys);
        }
        let mut y5 = self.y;
        let mut y4 = self.y;
        for s in 0..7 {
            for c in 0..2 {
                y5[c] += h * B5[s] * k[s][c];
                y4[c] += h * B4[s] * k[s][c];
            }
        }
        // phi' is weighed against phi over the length scale min(r, h/r)
        let len = self.r.abs().min(self.rhs.hbar / self.r.abs());
        let mag = self.y[0].abs() + self.y[1].abs() * len;
        let sc0 = self.tol * (self.y[0].abs().max(y5[0].abs()) + 1e-3 * mag);
        let sc1 = self.tol * (self.y[1].abs().max(y5[1].abs()) + 1e-3 * mag / len);
        let e0 = (y5[0] - y4[0]) / sc0;
        let e1 = (y5[1] - y4[1]) / sc1;
        let err = (0.5 * (e0 * e0 + e1 * e1)).sqrt();
        (y5, if err.is_nan() { f64::INFINITY } else { err })
    }

    fn rescale(&mut self) {
        let mag = self.y[0].abs().max(self.y[1].abs());
        if mag > 1e100 || (mag < 1e-100 && mag > 0.0) {
            self.y[0] /= mag;
            self.y[1] /= mag;
            self.log_scale += mag.ln();
        }
    }
}

fn check_span(r_span: (f64, f64), tol: f64) -> Result<()> {
    let (r0, r1) = r_span;
    if !(r0 > 0.0 && r1 > r0) {
        return Err(Error::Domain(format!("radial span ({r0}, {r1}) must satisfy 0 < r0 < r1")));
    }
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("tolerance {tol} must be > 0")));
    }
    Ok(())
}

fn geometric_grid(r0: f64, r1: f64) -> Vec<f64> {
    let ratio = (r1 / r0).ln() / (GRID_POINTS - 1) as f64;
    (0..GRID_POINTS)
        .map(|i| {
            if i + 1 == GRID_POINTS {
                r1
            } else {
                r0 * (ratio * i as f64).exp()
            }
        })
        .collect()
}

/// Recessive (decaying) solution on `[r0, r1]`, selected by integrating inward
/// from beyond `r1` where the growing component is shed.
pub fn solve_radial(
    mode: &RadialMode,
    eps: f64,
    v: &Perturbation,
    energy: f64,
    r_span: (f64, f64),
    tol: f64,
) -> Result<RadialSolution> {
    check_span(r_span, tol)?;
    let (r0, r1) = r_span;
    let hbar = mode.hbar();
    let r_end = (r1 * r1 + SHED_EXPONENT * hbar).sqrt();
    let grid = geometric_grid(r0, r1);
    let mut it = Integrator {
        rhs: Rhs::new(mode, eps, v, energy),
        tol,
        r: r_end,
        y: [1.0, 0.0],
        log_scale: 0.0,
        h: -1e-3 * hbar / r_end,
        steps: 0,
    };
    let mut phi = vec![0.0; grid.len()];
    let mut dphi = vec![0.0; grid.len()];
    let mut logs = vec![0.0; grid.len()];
    for i in (0..grid.len()).rev() {
        it.advance_to(grid[i])?;
        phi[i] = it.y[0];
        dphi[i] = it.y[1];
        logs[i] = it.log_scale;
    }
    Ok(RadialSolution {
        mode: *mode,
        eps,
        hbar,
        energy,
        grid,
        phi,
        dphi,
        renormalization_log: logs,
    })
}

/// Solution regular at the origin, integrated outward from `r0` starting from
/// the leading Frobenius term `phi ~ r^l`.
pub fn solve_radial_regular(
    mode: &RadialMode,
    eps: f64,
    v: &Perturbation,
    energy: f64,
    r_span: (f64, f64),
    tol: f64,
) -> Result<RadialSolution> {
    check_span(r_span, tol)?;
    let (r0, r1) = r_span;
    let hbar = mode.hbar();
    let l = mode.ell as f64;
    let grid = geometric_grid(r0, r1);
    let mut it = Integrator {
        rhs: Rhs::new(mode, eps, v, energy),
        tol,
        r: r0,
        y: [1.0, l / r0],
        log_scale: l * r0.ln(),
        h: 1e-3 * r0.min(hbar / r1),
        steps: 0,
    };
    let mut phi = vec![0.0; grid.len()];
    let mut dphi = vec![0.0; grid.len()];
    let mut logs = vec![0.0; grid.len()];
    for (i, &r) in grid.iter().enumerate() {
        it.advance_to(r)?;
        phi[i] = it.y[0];
        dphi[i] = it.y[1];
        logs[i] = it.log_scale;
    }
    Ok(RadialSolution {
        mode: *mode,
        eps,
        hbar,
        energy,
        grid,
        phi,
        dphi,
        renormalization_log: logs,
    })
}

/// `ln |W|` and sign of `r^{d-1} e^{-r^2/h} (phi_1 phi_2' - phi_1' phi_2)` at
/// grid point `i` of two solutions on the same grid; constant in `r`.
pub fn wronskian_log(a: &RadialSolution, b: &RadialSolution, i: usize) -> (f64, f64) {
    let r = a.grid[i];
    let w = a.phi[i] * b.dphi[i] - a.dphi[i] * b.phi[i];
    let d = a.mode.d as f64;
    (
        w.abs().ln() + a.renormalization_log[i] + b.renormalization_log[i] + (d - 1.0) * r.ln() - r * r / a.hbar,
        w.signum(),
    )
}

/// Growth exponent fit: slope and intercept of `ln|psi| + r^2/2h` against `ln r`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GrowthFit {
    pub exponent: f64,
    pub intercept: f64,
}

/// `N̂` from least squares on the outer third of the grid.
pub fn growth_exponent(sol: &RadialSolution) -> Result<f64> {
    Ok(growth_fit(sol)?.exponent)
}

pub fn growth_fit(sol: &RadialSolution) -> Result<GrowthFit> {
    let n = sol.grid.len();
    let r_out = *sol.grid.last().ok_or_else(|| Error::Range("empty radial grid".into()))?;
    if r_out * r_out / sol.hbar < MIN_OUTER_EXPONENT || n < 6 {
        return Err(Error::Range(format!(
            "outer radius {r_out} gives r^2/h = {} < {MIN_OUTER_EXPONENT}",
            r_out * r_out / sol.hbar
        )));
    }
    let start = n - n / 3;
    let pts: Vec<(f64, f64)> = (start..n)
        .map(|i| (sol.grid[i].ln(), sol.log_abs_phi(i)))
        .collect();
    if pts.iter().any(|p| !p.1.is_finite()) {
        return Err(Error::Range("solution vanishes inside the fitting window".into()));
    }
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let exponent = sxy / sxx;
    Ok(GrowthFit {
        exponent,
        intercept: my - exponent * mx,
    })
}

/// Outer radius with `r^2/h ≈ 400 nu (nu + alpha + 1)`, `nu = (N - l)/2`,
/// where the polynomial tail is within `0.01` of its asymptotic slope.
/// Growth exponent of the recessive solution at `energy`, fitted on
/// `[r1/3, r1]` with `r1` from [`default_outer_radius`].
pub fn fitted_growth(mode: &RadialMode, eps: f64, v: &Perturbation, energy: f64) -> Result<f64> {
    let r1 = default_outer_radius(mode, energy);
    let sol = solve_radial(mode, eps, v, energy, (r1 / 3.0, r1), 1e-10)?;
    growth_exponent(&sol)
}

pub fn default_outer_radius(mode: &RadialMode, energy: f64) -> f64 {
    let h = mode.hbar();
    let big_n = energy / h - 0.5 * mode.d as f64;
    let nu = (0.5 * (big_n - mode.ell as f64)).max(0.5);
    let x = (400.0 * nu * (nu + mode.alpha() + 1.0)).max(4.0 * MIN_OUTER_EXPONENT);
    (x * h).sqrt()
}
