//! Radial perturbations `V(u)`, `u = r^2`.
//!
//! All Taylor data is taken in the variable `u`: `taylor_coeffs[k] = V^{(k)}(0)/k!`
//! with derivatives in `u`. In particular `V''(0) = 2 * taylor_coeffs[2]`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative tolerance for closed-form vs supplied Taylor data.
const TAYLOR_AGREEMENT_TOL: f64 = 1e-12;
/// Number of coefficients compared against the closed form.
const TAYLOR_AGREEMENT_ORDER: usize = 8;
/// Sample count for the sup-norm estimate.
const SUP_NORM_SAMPLES: usize = 4096;

/// Bounded analytic families a potential may carry in addition to its Taylor data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", content = "params", rename_all = "snake_case")]
pub enum ClosedForm {
    /// `V(u) = (sum_j poly[j] u^j) * exp(-(scale*u)^2)`.
    GaussianEnvelope { poly: Vec<f64>, scale: f64 },
    /// `V(u) = amplitude * u^2 / (1 + (scale*u)^2)^power`.
    RationalDecay {
        amplitude: f64,
        scale: f64,
        power: f64,
    },
}

impl ClosedForm {
    pub fn eval(&self, u: f64) -> f64 {
        match self {
            ClosedForm::GaussianEnvelope { poly, scale } => {
                horner(poly, u) * (-(scale * u).powi(2)).exp()
            }
            ClosedForm::RationalDecay {
                amplitude,
                scale,
                power,
            } => amplitude * u * u * (1.0 + (scale * u).powi(2)).powf(-power),
        }
    }

    /// Taylor coefficients `c_0..=c_order` at `u = 0`, generated analytically.
    pub fn taylor(&self, order: usize) -> Vec<f64> {
        let mut out = vec![0.0; order + 1];
        match self {
            ClosedForm::GaussianEnvelope { poly, scale } => {
                // exp(-s^2 u^2) = sum_j (-s^2)^j u^{2j} / j!
                let s2 = scale * scale;
                let mut envelope = vec![0.0; order + 1];
                let mut term = 1.0;
                let mut j = 0usize;
                while 2 * j <= order {
                    envelope[2 * j] = term;
                    j += 1;
                    term *= -s2 / j as f64;
                }
                for (i, &p) in poly.iter().enumerate().take(order + 1) {
                    for (e, &g) in envelope.iter().enumerate().take(order + 1 - i) {
                        out[i + e] += p * g;
                    }
                }
            }
            ClosedForm::RationalDecay {
                amplitude,
                scale,
                power,
            } => {
                // (1 + s^2 u^2)^{-p} = sum_j (-1)^j (p)_j / j! s^{2j} u^{2j}
                let s2 = scale * scale;
                let mut term = *amplitude;
                let mut j = 0usize;
                while 2 + 2 * j <= order {
                    out[2 + 2 * j] = term;
                    term *= -(power + j as f64) * s2 / (j + 1) as f64;
                    j += 1;
                }
            }
        }
        out
    }

    /// Characteristic `u` scale of the envelope, used to size sampling grids.
    pub fn envelope_scale(&self) -> f64 {
        match self {
            ClosedForm::GaussianEnvelope { scale, .. } | ClosedForm::RationalDecay { scale, .. } => {
                if *scale > 0.0 {
                    1.0 / scale
                } else {
                    0.0
                }
            }
        }
    }
}

/// A radial perturbation: Taylor data in `u = r^2`, slowly-varying scale
/// `delta`, decay exponent `eta` and an optional bounded closed form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PotentialSpec {
    #[serde(rename = "taylor")]
    pub taylor_coeffs: Vec<f64>,
    pub delta: f64,
    #[serde(rename = "eta")]
    pub decay_exponent: f64,
    #[serde(default)]
    pub closed_form: Option<ClosedForm>,
}

impl PotentialSpec {
    /// Polynomial potential from Taylor data; checks structural invariants.
    pub fn polynomial(taylor_coeffs: Vec<f64>, delta: f64) -> Result<Self> {
        let spec = PotentialSpec {
            taylor_coeffs,
            delta,
            decay_exponent: 1.0,
            closed_form: None,
        };
        spec.check()?;
        Ok(spec)
    }

    /// `V(u) = c2 u^2`.
    pub fn quadratic(c2: f64, delta: f64) -> Result<Self> {
        Self::polynomial(vec![0.0, 0.0, c2], delta)
    }

    /// `V(u) = amplitude * u^2 * exp(-(scale*u)^2)` with Taylor data to `k_max`.
    pub fn gaussian_envelope(amplitude: f64, scale: f64, k_max: usize, delta: f64) -> Result<Self> {
        let closed = ClosedForm::GaussianEnvelope {
            poly: vec![0.0, 0.0, amplitude],
            scale,
        };
        let spec = PotentialSpec {
            taylor_coeffs: closed.taylor(k_max),
            delta,
            decay_exponent: 4.0,
            closed_form: Some(closed),
        };
        spec.check()?;
        Ok(spec)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let spec: PotentialSpec =
            serde_json::from_str(text).map_err(|e| Error::MalformedSpec(e.to_string()))?;
        spec.check()?;
        Ok(spec)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("potential spec serialises")
    }

    /// Structural invariants: non-empty data, `V(0) = V'(0) = 0`, positive
    /// scales, and agreement of the closed form with the Taylor data.
    pub fn check(&self) -> Result<()> {
        if self.taylor_coeffs.is_empty() {
            return Err(Error::MalformedSpec("empty Taylor coefficient list".into()));
        }
        if self.taylor_coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::MalformedSpec("non-finite Taylor coefficient".into()));
        }
        for k in 0..2 {
            if let Some(&c) = self.taylor_coeffs.get(k) {
                if c != 0.0 {
                    return Err(Error::MalformedSpec(format!(
                        "Taylor coefficient c_{k} = {c} must vanish"
                    )));
                }
            }
        }
        if !(self.delta > 0.0) {
            return Err(Error::MalformedSpec(format!("delta = {} must be > 0", self.delta)));
        }
        if !(self.decay_exponent > 0.0) {
            return Err(Error::MalformedSpec(format!(
                "eta = {} must be > 0",
                self.decay_exponent
            )));
        }
        if let Some(closed) = &self.closed_form {
            let upto = TAYLOR_AGREEMENT_ORDER.min(self.k_max());
            let reference = closed.taylor(upto);
            for (k, (&given, &exact)) in self.taylor_coeffs.iter().zip(&reference).enumerate() {
                let scale = given.abs().max(exact.abs());
                if (given - exact).abs() > TAYLOR_AGREEMENT_TOL * scale {
                    return Err(Error::MalformedSpec(format!(
                        "Taylor coefficient c_{k} = {given} disagrees with closed form value {exact}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Highest Taylor order available.
    pub fn k_max(&self) -> usize {
        self.taylor_coeffs.len().saturating_sub(1)
    }

    pub fn coeff(&self, k: usize) -> f64 {
        self.taylor_coeffs.get(k).copied().unwrap_or(0.0)
    }

    /// `V''(0)` in the `u` variable.
    pub fn second_derivative_at_zero(&self) -> f64 {
        2.0 * self.coeff(2)
    }

    pub fn is_bounded(&self) -> bool {
        self.closed_form.is_some()
    }

    /// Same potential with every Taylor coefficient (and closed form) negated.
    pub fn negated(&self) -> Self {
        let closed_form = self.closed_form.as_ref().map(|c| match c {
            ClosedForm::GaussianEnvelope { poly, scale } => ClosedForm::GaussianEnvelope {
                poly: poly.iter().map(|p| -p).collect(),
                scale: *scale,
            },
            ClosedForm::RationalDecay {
                amplitude,
                scale,
                power,
            } => ClosedForm::RationalDecay {
                amplitude: -amplitude,
                scale: *scale,
                power: *power,
            },
        });
        PotentialSpec {
            taylor_coeffs: self.taylor_coeffs.iter().map(|c| -c).collect(),
            delta: self.delta,
            decay_exponent: self.decay_exponent,
            closed_form,
        }
    }
}

/// `V_K(u) = sum_{k=2}^K c_k u^k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruncatedPotential {
    /// `c_2..=c_K`.
    pub coeffs: Vec<f64>,
    /// Truncation order `K`.
    pub order: usize,
}

impl TruncatedPotential {
    /// Builds `V_K` directly from `c_2..=c_K`.
    pub fn from_coeffs(coeffs: Vec<f64>) -> Self {
        let order = coeffs.len() + 1;
        TruncatedPotential { coeffs, order }
    }

    pub fn zero(order: usize) -> Self {
        TruncatedPotential {
            coeffs: vec![0.0; order.saturating_sub(1)],
            order,
        }
    }

    /// `c_k`, zero outside `2..=K`.
    pub fn coeff(&self, k: usize) -> f64 {
        if k < 2 {
            0.0
        } else {
            self.coeffs.get(k - 2).copied().unwrap_or(0.0)
        }
    }

    /// Largest `k` with `c_k != 0` (0 for the zero potential).
    pub fn effective_order(&self) -> usize {
        self.coeffs
            .iter()
            .rposition(|&c| c != 0.0)
            .map_or(0, |i| i + 2)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0.0)
    }

    pub fn eval(&self, u: f64) -> f64 {
        let mut acc = 0.0;
        for &c in self.coeffs.iter().rev() {
            acc = acc * u + c;
        }
        acc * u * u
    }
}

/// Evaluation mode for [`eval_potential`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvalMode {
    Full,
    Truncated(usize),
}

pub fn taylor_truncate(spec: &PotentialSpec, order: usize) -> Result<TruncatedPotential> {
    let k_max = spec.k_max();
    if order < 2 || order > k_max {
        return Err(Error::InvalidOrder {
            order,
            min: 2,
            max: k_max,
        });
    }
    Ok(TruncatedPotential {
        coeffs: spec.taylor_coeffs[2..=order].to_vec(),
        order,
    })
}

pub fn eval_potential(spec: &PotentialSpec, u: f64, mode: EvalMode) -> Result<f64> {
    if !(u >= 0.0) {
        return Err(Error::Domain(format!("u = {u} must be >= 0")));
    }
    match mode {
        EvalMode::Full => Ok(match &spec.closed_form {
            Some(closed) => closed.eval(u),
            None => horner(&spec.taylor_coeffs, u),
        }),
        EvalMode::Truncated(order) => Ok(taylor_truncate(spec, order)?.eval(u)),
    }
}

fn horner(coeffs: &[f64], u: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * u + c)
}

/// One line of a [`ValidationReport`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionCheck {
    pub name: String,
    pub passed: bool,
    /// Bound minus observed value; negative when violated.
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub conditions: Vec<ConditionCheck>,
    /// Set when the sup-norm condition was waived (Taylor-only potential).
    pub sup_norm_waived: bool,
    pub sup_norm_estimate: Option<f64>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.conditions.iter().all(|c| c.passed)
    }

    pub fn worst_margin(&self) -> f64 {
        self.conditions
            .iter()
            .map(|c| c.margin)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn failed(&self) -> Vec<&str> {
        self.conditions
            .iter()
            .filter(|c| !c.passed)
            .map(|c| c.name.as_str())
            .collect()
    }
}

/// Checks the slowly-varying conditions at energy `energy` and scale `delta`:
/// `‖V‖_∞ <= 1`, `delta^2/2 <= |V''(0)| <= delta^2` and `|c_k| <= delta^k` for `k >= 3`.
pub fn validate_slowly_varying(spec: &PotentialSpec, energy: f64, delta: f64) -> Result<ValidationReport> {
    if spec.taylor_coeffs.is_empty() {
        return Err(Error::MalformedSpec("empty Taylor coefficient list".into()));
    }
    if !(energy > 0.0) || !(delta > 0.0) {
        return Err(Error::Domain(format!(
            "energy = {energy} and delta = {delta} must both be > 0"
        )));
    }
    let mut conditions = Vec::new();

    let (sup_norm_waived, sup_norm_estimate) = match &spec.closed_form {
        Some(closed) => {
            let sup = sup_norm_estimate(closed, energy);
            conditions.push(ConditionCheck {
                name: "sup_norm".into(),
                passed: sup <= 1.0,
                margin: 1.0 - sup,
            });
            (false, Some(sup))
        }
        None => (true, None),
    };

    let v2 = spec.second_derivative_at_zero().abs();
    let lower = 0.5 * delta * delta;
    let upper = delta * delta;
    conditions.push(ConditionCheck {
        name: "second_derivative_window".into(),
        passed: lower <= v2 && v2 <= upper,
        margin: (v2 - lower).min(upper - v2),
    });

    for k in 3..spec.taylor_coeffs.len() {
        let bound = delta.powi(k as i32);
        let c = spec.taylor_coeffs[k].abs();
        conditions.push(ConditionCheck {
            name: format!("coefficient_bound_k{k}"),
            passed: c <= bound,
            margin: bound - c,
        });
    }

    Ok(ValidationReport {
        conditions,
        sup_norm_waived,
        sup_norm_estimate,
    })
}

/// Largest `|V(u)|` over a geometric grid covering `[0, 16E]` and the envelope.
pub fn sup_norm_estimate(closed: &ClosedForm, energy: f64) -> f64 {
    let u_max = (16.0 * energy).max(10.0 * closed.envelope_scale());
    let u_min = u_max * 1e-8;
    let ratio = (u_max / u_min).ln() / (SUP_NORM_SAMPLES - 1) as f64;
    (0..SUP_NORM_SAMPLES)
        .map(|i| closed.eval(u_min * (ratio * i as f64).exp()).abs())
        .fold(closed.eval(0.0).abs(), f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_admissible_potential_passes() {
        let delta = 0.1;
        let spec = PotentialSpec::polynomial(vec![0.0, 0.0, delta * delta / 2.0, 0.0, 0.0], delta).unwrap();
        let report = validate_slowly_varying(&spec, 1.0, delta).unwrap();
        assert!(report.passed(), "{report:?}");
        assert!(report.sup_norm_waived);
    }

    #[test]
    fn cubic_violation_is_reported() {
        let delta = 0.1;
        let spec =
            PotentialSpec::polynomial(vec![0.0, 0.0, delta * delta / 2.0, 2.0 * delta.powi(3)], delta).unwrap();
        let report = validate_slowly_varying(&spec, 1.0, delta).unwrap();
        assert_eq!(report.failed(), vec!["coefficient_bound_k3"]);
        assert!(report.worst_margin() < 0.0);
    }

    #[test]
    fn empty_spec_is_malformed() {
        let spec = PotentialSpec {
            taylor_coeffs: vec![],
            delta: 0.1,
            decay_exponent: 1.0,
            closed_form: None,
        };
        assert!(matches!(
            validate_slowly_varying(&spec, 1.0, 0.1),
            Err(Error::MalformedSpec(_))
        ));
    }

    #[test]
    fn nonzero_value_at_origin_is_rejected() {
        assert!(PotentialSpec::polynomial(vec![0.1, 0.0, 0.01], 0.1).is_err());
        assert!(PotentialSpec::polynomial(vec![0.0, 0.1, 0.01], 0.1).is_err());
    }

    #[test]
    fn truncation_drops_higher_terms() {
        let spec = PotentialSpec::polynomial(vec![0.0, 0.0, 0.005, 1e-4], 0.1).unwrap();
        let vk = taylor_truncate(&spec, 2).unwrap();
        assert_eq!(vk.coeffs, vec![0.005]);
        let full = taylor_truncate(&spec, 3).unwrap();
        assert_eq!(full.coeffs, vec![0.005, 1e-4]);
        assert!(matches!(taylor_truncate(&spec, 1), Err(Error::InvalidOrder { .. })));
        assert!(matches!(taylor_truncate(&spec, 4), Err(Error::InvalidOrder { .. })));
    }

    #[test]
    fn evaluation_modes() {
        let spec = PotentialSpec::polynomial(vec![0.0, 0.0, 0.005, 1e-4], 0.1).unwrap();
        assert_eq!(eval_potential(&spec, 0.0, EvalMode::Full).unwrap(), 0.0);
        assert_eq!(eval_potential(&spec, 2.0, EvalMode::Truncated(2)).unwrap(), 0.02);
        assert!(matches!(
            eval_potential(&spec, -1.0, EvalMode::Full),
            Err(Error::Domain(_))
        ));
        let u = 3.0;
        assert_eq!(
            eval_potential(&spec, u, EvalMode::Truncated(3)).unwrap(),
            eval_potential(&spec, u, EvalMode::Full).unwrap()
        );
    }

    #[test]
    fn gaussian_envelope_direct_formula() {
        let delta = 0.05;
        let spec = PotentialSpec::gaussian_envelope(delta * delta / 2.0, delta, 12, delta).unwrap();
        let u: f64 = 10.0;
        let direct = 0.5 * delta * delta * u * u * (-(delta * u) * (delta * u)).exp();
        let got = eval_potential(&spec, u, EvalMode::Full).unwrap();
        assert!((got - direct).abs() <= 1e-15 * direct.abs());
        assert_eq!(eval_potential(&spec, 0.0, EvalMode::Full).unwrap(), 0.0);
    }

    #[test]
    fn gaussian_truncation_keeps_even_coefficients() {
        let delta = 0.05;
        let c2 = delta * delta / 2.0;
        let spec = PotentialSpec::gaussian_envelope(c2, delta, 10, delta).unwrap();
        let vk = taylor_truncate(&spec, 4).unwrap();
        assert_eq!(vk.coeffs.len(), 3);
        assert_eq!(vk.coeff(2), c2);
        assert_eq!(vk.coeff(3), 0.0);
        assert!((vk.coeff(4) + c2 * delta * delta).abs() < 1e-20);
    }

    #[test]
    fn closed_form_disagreement_is_rejected() {
        let mut spec = PotentialSpec::gaussian_envelope(0.01, 0.1, 6, 0.1).unwrap();
        spec.taylor_coeffs[4] *= 1.0 + 1e-9;
        assert!(matches!(spec.check(), Err(Error::MalformedSpec(_))));
    }

    #[test]
    fn json_field_names() {
        let text = r#"{"taylor": [0, 0, 0.00125, 0, -3.125e-6], "delta": 0.05, "eta": 4.0,
            "closed_form": {"family": "gaussian_envelope", "params": {"poly": [0, 0, 0.00125], "scale": 0.05}}}"#;
        let spec = PotentialSpec::from_json(text).unwrap();
        assert_eq!(spec.k_max(), 4);
        let back = PotentialSpec::from_json(&spec.to_json()).unwrap();
        assert_eq!(back, spec);
        let null_form = r#"{"taylor": [0, 0, 0.01], "delta": 0.1, "eta": 1.0, "closed_form": null}"#;
        assert!(PotentialSpec::from_json(null_form).unwrap().closed_form.is_none());
    }

    #[test]
    fn rational_decay_taylor_matches_binomial_series() {
        let closed = ClosedForm::RationalDecay {
            amplitude: 0.5,
            scale: 0.3,
            power: 1.5,
        };
        let c = closed.taylor(6);
        assert_eq!(c[2], 0.5);
        assert!((c[4] - (-0.5 * 1.5 * 0.09)).abs() < 1e-16);
        assert!((c[6] - 0.5 * 1.5 * 2.5 / 2.0 * 0.09 * 0.09).abs() < 1e-16);
        assert_eq!(c[3], 0.0);
    }
}
