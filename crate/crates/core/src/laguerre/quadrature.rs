//! Generalised Gauss–Laguerre rules.
//!
//! [`gauss_laguerre_rule`] gives an `f64` rule (Golub–Welsch, Newton-polished
//! nodes, Christoffel weights in log form). [`OverlapOracle`] rebuilds the
//! nodes in double-double precision and tabulates the normalised Laguerre
//! functions there; it is the reference used to check the closed forms.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use nalgebra::{DMatrix, SymmetricEigen};
use twofloat::TwoFloat;

use super::gamma::ln_gamma;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub alpha: f64,
    pub nodes: Vec<f64>,
    /// `∫ x^alpha e^{-x} f(x) dx ≈ Σ weights[i] f(nodes[i])`. May underflow for
    /// extreme `alpha`; `log_weights` is always finite.
    pub weights: Vec<f64>,
    pub log_weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }

    /// Weights of the probability measure `x^alpha e^{-x} dx / Γ(alpha+1)`.
    pub fn probability_weights(&self) -> Vec<f64> {
        let shift = ln_gamma(self.alpha + 1.0);
        self.log_weights.iter().map(|lw| (lw - shift).exp()).collect()
    }
}

/// Jacobi-matrix recurrence coefficients: diagonal `2j+alpha+1`,
/// off-diagonal `sqrt(j (j+alpha))`.
fn jacobi_matrix(m: usize, alpha: f64) -> DMatrix<f64> {
    let mut jm = DMatrix::zeros(m, m);
    for j in 0..m {
        jm[(j, j)] = 2.0 * j as f64 + alpha + 1.0;
        if j + 1 < m {
            let b = ((j as f64 + 1.0) * (j as f64 + 1.0 + alpha)).sqrt();
            jm[(j, j + 1)] = b;
            jm[(j + 1, j)] = b;
        }
    }
    jm
}

fn golub_welsch_nodes(m: usize, alpha: f64) -> Result<Vec<f64>> {
    let eig = SymmetricEigen::try_new(jacobi_matrix(m, alpha), f64::EPSILON, 200 * m.max(10))
        .ok_or_else(|| {
            Error::NumericalFailure(format!(
                "Jacobi eigensolver did not converge (m = {m}, alpha = {alpha})"
            ))
        })?;
    let mut nodes: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    nodes.sort_by(f64::total_cmp);
    Ok(nodes)
}

/// One pass of the orthonormal recurrence up to `p_m` at a point.
struct Sweep {
    /// `ln Σ_{j<m} p_j(x)^2`.
    ln_sum_sq: f64,
    /// `p_m(x)` and `p_{m-1}(x)` in a common scale.
    last: f64,
    prev: f64,
}

fn sweep_f64(m: usize, alpha: f64, x: f64) -> Sweep {
    let mut prev = 0.0;
    let mut cur = 1.0;
    let mut sum_sq = 0.0;
    let mut ln_scale = 0.0;
    for j in 0..m {
        sum_sq += cur * cur;
        let jf = j as f64;
        let b_j = (jf * (jf + alpha)).sqrt();
        let b_next = ((jf + 1.0) * (jf + 1.0 + alpha)).sqrt();
        let next = ((2.0 * jf + alpha + 1.0 - x) * cur - b_j * prev) / b_next;
        prev = cur;
        cur = next;
        let big = cur.abs().max(prev.abs());
        if big > 1e100 {
            prev /= big;
            cur /= big;
            sum_sq /= big * big;
            ln_scale += big.ln();
        }
    }
    Sweep {
        ln_sum_sq: sum_sq.ln() + 2.0 * ln_scale,
        last: cur,
        prev,
    }
}

/// Newton step `p_m / p_m'` from `x p_m' = m p_m - sqrt(m (m+alpha)) p_{m-1}`.
fn newton_step_f64(m: usize, alpha: f64, x: f64) -> f64 {
    let s = sweep_f64(m, alpha, x);
    let mf = m as f64;
    x * s.last / (mf * s.last - (mf * (mf + alpha)).sqrt() * s.prev)
}

pub fn gauss_laguerre_rule(m: usize, alpha: f64) -> Result<QuadratureRule> {
    if m == 0 {
        return Err(Error::Domain("quadrature rule needs m >= 1".into()));
    }
    if !(alpha > -1.0) {
        return Err(Error::Domain(format!("alpha = {alpha} must be > -1")));
    }
    let mut nodes = golub_welsch_nodes(m, alpha)?;
    for x in nodes.iter_mut() {
        for _ in 0..3 {
            let dx = newton_step_f64(m, alpha, *x);
            if !dx.is_finite() {
                break;
            }
            *x -= dx;
            if dx.abs() <= 4.0 * f64::EPSILON * x.abs() {
                break;
            }
        }
    }
    let lg = ln_gamma(alpha + 1.0);
    let log_weights: Vec<f64> = nodes.iter().map(|&x| lg - sweep_f64(m, alpha, x).ln_sum_sq).collect();
    if nodes.iter().chain(&log_weights).any(|v| !v.is_finite()) {
        return Err(Error::NumericalFailure(format!(
            "non-finite Gauss-Laguerre data (m = {m}, alpha = {alpha})"
        )));
    }
    let weights = log_weights.iter().map(|lw| lw.exp()).collect();
    Ok(QuadratureRule {
        alpha,
        nodes,
        weights,
        log_weights,
    })
}

/// Normalised Laguerre functions `phi_j(x_i) = p_j(x_i) sqrt(lambda_i)` for
/// `j < count` at the nodes of `rule`, as `phi[j][i]`. With these,
/// `∫ f(x) p_a p_b dmu ≈ Σ_i f(x_i) phi[a][i] phi[b][i]`.
pub fn normalized_functions(rule: &QuadratureRule, count: usize) -> Vec<Vec<f64>> {
    let alpha = rule.alpha;
    let shift = ln_gamma(alpha + 1.0);
    let mut phi = vec![vec![0.0; rule.len()]; count];
    for (i, (&x, &lw)) in rule.nodes.iter().zip(&rule.log_weights).enumerate() {
        let half_ln_lambda = 0.5 * (lw - shift);
        let mut prev = 0.0f64;
        let mut cur = 1.0f64;
        let mut ln_scale = 0.0;
        for (j, row) in phi.iter_mut().enumerate() {
            row[i] = if cur == 0.0 {
                0.0
            } else {
                cur.signum() * (cur.abs().ln() + ln_scale + half_ln_lambda).exp()
            };
            let jf = j as f64;
            let b_j = (jf * (jf + alpha)).sqrt();
            let b_next = ((jf + 1.0) * (jf + 1.0 + alpha)).sqrt();
            let next = ((2.0 * jf + alpha + 1.0 - x) * cur - b_j * prev) / b_next;
            prev = cur;
            cur = next;
            let big = cur.abs().max(prev.abs());
            if big > 1e100 {
                prev /= big;
                cur /= big;
                ln_scale += big.ln();
            }
        }
    }
    phi
}

type RuleKey = (usize, u64);

fn rule_cache() -> &'static RwLock<HashMap<RuleKey, Arc<QuadratureRule>>> {
    static CACHE: OnceLock<RwLock<HashMap<RuleKey, Arc<QuadratureRule>>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// Shared, read-mostly cache of rules keyed by `(m, alpha)`.
pub fn cached_rule(m: usize, alpha: f64) -> Result<Arc<QuadratureRule>> {
    let key = (m, alpha.to_bits());
    if let Some(rule) = rule_cache().read().expect("rule cache poisoned").get(&key) {
        return Ok(rule.clone());
    }
    let rule = Arc::new(gauss_laguerre_rule(m, alpha)?);
    let mut guard = rule_cache().write().expect("rule cache poisoned");
    Ok(guard.entry(key).or_insert(rule).clone())
}

// ---------------------------------------------------------------------------
// double-double oracle

fn dd(x: f64) -> TwoFloat {
    TwoFloat::from(x)
}

/// `a / b` to double-double accuracy (the crate's division is only
/// correct to about one double).
fn dd_div(a: TwoFloat, b: TwoFloat) -> TwoFloat {
    let q = a / b;
    let r = a - q * b;
    q + dd(r.hi() / b.hi())
}

fn dd_sqrt(x: TwoFloat) -> TwoFloat {
    let s = x.sqrt();
    s + dd((x - s * s).hi() / (2.0 * s.hi()))
}

/// Recurrence constants `b_j = sqrt(j (j+alpha))` and `1/b_j` in double-double.
struct Recurrence {
    alpha: TwoFloat,
    b: Vec<TwoFloat>,
    b_inv: Vec<TwoFloat>,
}

impl Recurrence {
    fn new(m: usize, alpha: f64) -> Self {
        let alpha_dd = dd(alpha);
        let mut b = vec![dd(0.0)];
        let mut b_inv = vec![dd(0.0)];
        for j in 1..=m {
            let v = dd_sqrt(dd(j as f64) * (dd(j as f64) + alpha_dd));
            b_inv.push(dd_div(dd(1.0), v));
            b.push(v);
        }
        Recurrence {
            alpha: alpha_dd,
            b,
            b_inv,
        }
    }

    /// Values `p_0..=p_upto` at `x`, each as `(mantissa, binary exponent)`.
    fn values(&self, upto: usize, x: TwoFloat) -> Vec<(TwoFloat, i32)> {
        let mut out = Vec::with_capacity(upto + 1);
        let mut prev = dd(0.0);
        let mut cur = dd(1.0);
        let mut exp = 0i32;
        out.push((cur, exp));
        for j in 0..upto {
            let diag = dd(2.0 * j as f64 + 1.0) + self.alpha - x;
            let next = (diag * cur - self.b[j] * prev) * self.b_inv[j + 1];
            prev = cur;
            cur = next;
            let big = cur.hi().abs().max(prev.hi().abs());
            if big > 1e150 {
                let e = big.log2().floor() as i32;
                let f = 2f64.powi(-e);
                prev = prev * f;
                cur = cur * f;
                exp += e;
            }
            out.push((cur, exp));
        }
        out
    }

    fn newton_step(&self, m: usize, x: TwoFloat) -> TwoFloat {
        let v = self.values(m, x);
        let (pm, em) = v[m];
        let (pm1, em1) = v[m - 1];
        // bring p_{m-1} to the scale of p_m
        let pm1 = pm1 * 2f64.powi(em1 - em);
        dd_div(x * pm, dd(m as f64) * pm - self.b[m] * pm1)
    }
}

/// Double-double Gauss–Laguerre rule with the normalised Laguerre functions
/// `phi_j(x_i) = p_j(x_i) sqrt(lambda_i)` tabulated for `j < m`, where
/// `lambda_i` are the probability-measure weights.
pub struct OverlapOracle {
    pub alpha: f64,
    nodes: Vec<TwoFloat>,
    /// `phi[j][i]`.
    phi: Vec<Vec<TwoFloat>>,
}

/// Quadrature value together with the absolute size of the summed terms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleValue {
    pub value: f64,
    pub scale: f64,
}

impl OverlapOracle {
    pub fn new(m: usize, alpha: f64) -> Result<Self> {
        if m == 0 || !(alpha > -1.0) {
            return Err(Error::Domain(format!("oracle needs m >= 1, alpha > -1 (m = {m}, alpha = {alpha})")));
        }
        let rec = Recurrence::new(m, alpha);
        let seeds = golub_welsch_nodes(m, alpha)?;
        let mut nodes = Vec::with_capacity(m);
        for &x0 in &seeds {
            let mut x = dd(x0);
            let mut converged = false;
            for _ in 0..8 {
                let dx = rec.newton_step(m, x);
                if !dx.hi().is_finite() {
                    break;
                }
                x -= dx;
                if dx.hi().abs() <= 1e-27 * x.hi().abs() {
                    converged = true;
                    break;
                }
            }
            if !converged {
                return Err(Error::NumericalFailure(format!(
                    "Newton refinement of node {x0} stalled (m = {m}, alpha = {alpha})"
                )));
            }
            nodes.push(x);
        }
        let mut phi = vec![Vec::with_capacity(m); m];
        for &x in &nodes {
            let vals = rec.values(m - 1, x);
            let top = vals[m - 1].1;
            let scaled: Vec<TwoFloat> = vals.iter().map(|&(v, e)| v * 2f64.powi(e - top)).collect();
            let mut sum_sq = dd(0.0);
            for v in &scaled {
                sum_sq += *v * *v;
            }
            let inv_norm = dd_div(dd(1.0), dd_sqrt(sum_sq));
            for (j, v) in scaled.into_iter().enumerate() {
                phi[j].push(v * inv_norm);
            }
        }
        Ok(OverlapOracle { alpha, nodes, phi })
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Highest polynomial degree integrated exactly.
    pub fn exact_degree(&self) -> usize {
        2 * self.nodes.len() - 1
    }

    /// `∫ x^k p_a p_b dmu` for `k = 0..=k_max`.
    pub fn moments(&self, a: usize, b: usize, k_max: usize) -> Result<Vec<OracleValue>> {
        if a.max(b) >= self.phi.len() || a + b + k_max > self.exact_degree() {
            return Err(Error::Domain(format!(
                "moment (a = {a}, b = {b}, k <= {k_max}) beyond exactness of an {}-node rule",
                self.nodes.len()
            )));
        }
        let mut acc = vec![dd(0.0); k_max + 1];
        let mut abs_acc = vec![0.0f64; k_max + 1];
        for (i, &x) in self.nodes.iter().enumerate() {
            let mut term = self.phi[a][i] * self.phi[b][i];
            for k in 0..=k_max {
                acc[k] += term;
                abs_acc[k] += term.hi().abs();
                term = term * x;
            }
        }
        Ok(acc
            .into_iter()
            .zip(abs_acc)
            .map(|(v, s)| OracleValue {
                value: f64::from(v),
                scale: s,
            })
            .collect())
    }

    pub fn moment(&self, k: usize, a: usize, b: usize) -> Result<OracleValue> {
        Ok(self.moments(a, b, k)?[k])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_point_rule() {
        let r = gauss_laguerre_rule(1, 0.0).unwrap();
        assert!((r.nodes[0] - 1.0).abs() < 1e-15);
        assert!((r.weights[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn weights_sum_to_gamma() {
        let r = gauss_laguerre_rule(20, 0.0).unwrap();
        let s: f64 = r.weights.iter().sum();
        assert!((s - 1.0).abs() < 1e-14);
        let r = gauss_laguerre_rule(30, 3.5).unwrap();
        let s: f64 = r.weights.iter().sum();
        let g = ln_gamma(4.5).exp();
        assert!((s - g).abs() < 1e-13 * g);
    }

    #[test]
    fn cubic_moment_alpha_two_and_half() {
        let r = gauss_laguerre_rule(40, 2.5).unwrap();
        let got = r.integrate(|x| x * x * x);
        let exact = ln_gamma(6.5).exp();
        assert!((got - exact).abs() <= 1e-12 * exact, "{got} vs {exact}");
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(gauss_laguerre_rule(0, 0.0).is_err());
        assert!(gauss_laguerre_rule(3, -1.0).is_err());
    }

    #[test]
    fn normalized_functions_are_orthonormal() {
        let rule = gauss_laguerre_rule(60, 4.0).unwrap();
        let phi = normalized_functions(&rule, 40);
        for a in [0usize, 7, 39] {
            for b in [0usize, 7, 39] {
                let v: f64 = phi[a].iter().zip(&phi[b]).map(|(p, q)| p * q).sum();
                let expect = if a == b { 1.0 } else { 0.0 };
                assert!((v - expect).abs() < 1e-12, "({a},{b}) -> {v}");
            }
        }
    }

    #[test]
    fn cache_returns_same_rule() {
        let a = cached_rule(12, 1.5).unwrap();
        let b = cached_rule(12, 1.5).unwrap();
        assert!(Arc::ptr_eq(&a, &b));
    }

    #[test]
    fn oracle_orthonormality() {
        let o = OverlapOracle::new(30, 0.5).unwrap();
        for a in 0..30 {
            for b in 0..30 {
                let v = o.moment(0, a, b).unwrap().value;
                let expect = if a == b { 1.0 } else { 0.0 };
                assert!((v - expect).abs() < 1e-25 + 1e-15, "({a},{b}) -> {v}");
            }
        }
    }

    #[test]
    fn oracle_first_moment_recurrence() {
        // x p_m = -b_m p_{m-1} + (2m+alpha+1) p_m - b_{m+1} p_{m+1}
        let alpha = 2.0;
        let o = OverlapOracle::new(20, alpha).unwrap();
        for m in 0..10usize {
            let diag = o.moment(1, m, m).unwrap().value;
            assert!((diag - (2.0 * m as f64 + alpha + 1.0)).abs() < 1e-12);
            let off = o.moment(1, m, m + 1).unwrap().value;
            let mf = m as f64;
            assert!((off + ((mf + 1.0) * (mf + 1.0 + alpha)).sqrt()).abs() < 1e-12);
        }
    }

    #[test]
    fn oracle_handles_large_alpha() {
        let o = OverlapOracle::new(40, 200.5).unwrap();
        let v = o.moment(0, 30, 30).unwrap().value;
        assert!((v - 1.0).abs() < 1e-14);
    }
}
