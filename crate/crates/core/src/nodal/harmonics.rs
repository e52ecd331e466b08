//! Real, L²-normalized spherical harmonics on S¹ and S².
//!
//! `d = 2`: `m = 0` is `cos(l theta)`, `m = 1` is `sin(l theta)`.
//! `d = 3`: `m > 0` carries `cos(m phi)`, `m < 0` carries `sin(|m| phi)`;
//! no Condon–Shortley phase.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub ell: usize,
    pub m: i64,
    pub a: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SphericalCombo {
    pub d: usize,
    pub terms: Vec<Term>,
    /// Optional radial energy per `l`, used for dominance ordering.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub energies: Option<BTreeMap<usize, f64>>,
}

impl SphericalCombo {
    pub fn new(d: usize, terms: Vec<Term>) -> Result<Self> {
        let combo = SphericalCombo { d, terms, energies: None };
        combo.check()?;
        Ok(combo)
    }

    /// Single harmonic with unit coefficient.
    pub fn tone(d: usize, ell: usize, m: i64) -> Result<Self> {
        Self::new(d, vec![Term { ell, m, a: 1.0 }])
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let combo: SphericalCombo =
            serde_json::from_str(text).map_err(|e| Error::MalformedSpec(e.to_string()))?;
        combo.check()?;
        Ok(combo)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("combo serializes")
    }

    pub fn check(&self) -> Result<()> {
        if self.d != 2 && self.d != 3 {
            return Err(Error::Unsupported(format!("spherical harmonics in d = {}", self.d)));
        }
        for t in &self.terms {
            if !t.a.is_finite() {
                return Err(Error::MalformedSpec(format!("non-finite coefficient at l = {}", t.ell)));
            }
            let ok = match self.d {
                2 => t.m == 0 || (t.m == 1 && t.ell > 0),
                _ => t.m.unsigned_abs() as usize <= t.ell,
            };
            if !ok {
                return Err(Error::MalformedSpec(format!("invalid index m = {} for l = {}", t.m, t.ell)));
            }
        }
        if self.is_zero() {
            return Err(Error::DegenerateInput("all coefficients vanish".into()));
        }
        Ok(())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.iter().all(|t| t.a == 0.0)
    }

    /// Largest `l` carrying a nonzero coefficient.
    pub fn ell_max(&self) -> usize {
        self.terms.iter().filter(|t| t.a != 0.0).map(|t| t.ell).max().unwrap_or(0)
    }

    /// Terms with `l = ell` only.
    pub fn restricted(&self, ell: usize) -> SphericalCombo {
        SphericalCombo {
            d: self.d,
            terms: self.terms.iter().copied().filter(|t| t.ell == ell).collect(),
            energies: None,
        }
    }

    /// Every coefficient multiplied by `w(l)`.
    pub fn weighted(&self, w: impl Fn(usize) -> f64) -> SphericalCombo {
        SphericalCombo {
            d: self.d,
            terms: self.terms.iter().map(|t| Term { a: t.a * w(t.ell), ..*t }).collect(),
            energies: self.energies.clone(),
        }
    }

    pub(crate) fn evaluator(&self) -> Evaluator {
        Evaluator::new(self)
    }
}

/// `sum a_{l,m} Y_m^l(omega)`; `direction` is an angle-free point of `R^d`, normalized here.
pub fn sph_eval(combo: &SphericalCombo, direction: &[f64]) -> f64 {
    combo.evaluator().eval(direction)
}

/// Fully normalized `Pbar_l^m(x)` for `0 <= m <= l <= l_max`, row-major by `m`.
/// `Pbar_l^m(cos theta) * cos(m phi)` (times `sqrt 2` for `m > 0`) is unit-norm on S².
pub fn normalized_legendre(l_max: usize, x: f64, out: &mut Vec<Vec<f64>>) {
    let s = (1.0 - x * x).max(0.0).sqrt();
    out.resize(l_max + 1, Vec::new());
    let mut pmm = 1.0 / (4.0 * PI).sqrt();
    for m in 0..=l_max {
        let row = &mut out[m];
        row.clear();
        row.resize(l_max + 1 - m, 0.0);
        if m > 0 {
            pmm *= s * ((2 * m + 1) as f64 / (2 * m) as f64).sqrt();
        }
        row[0] = pmm;
        if m < l_max {
            row[1] = x * ((2 * m + 3) as f64).sqrt() * pmm;
        }
        for l in m + 2..=l_max {
            let (lf, mf) = (l as f64, m as f64);
            let a = ((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf)).sqrt();
            let b = (((lf - 1.0) * (lf - 1.0) - mf * mf) / (4.0 * (lf - 1.0) * (lf - 1.0) - 1.0)).sqrt();
            row[l - m] = a * (x * row[l - m - 1] - b * row[l - m - 2]);
        }
    }
}

/// Coefficients grouped for fast repeated evaluation.
pub(crate) struct Evaluator {
    d: usize,
    l_max: usize,
    /// d = 2: `(l, a_cos, a_sin)`; d = 3: `(m, l, a_cos, a_sin)` packed into `by_m`.
    circle: Vec<(usize, f64, f64)>,
    by_m: Vec<Vec<(usize, f64, f64)>>,
}

impl Evaluator {
    fn new(combo: &SphericalCombo) -> Self {
        let l_max = combo.terms.iter().map(|t| t.ell).max().unwrap_or(0);
        let mut circle: BTreeMap<usize, (f64, f64)> = BTreeMap::new();
        let mut by_m: Vec<BTreeMap<usize, (f64, f64)>> = vec![BTreeMap::new(); l_max + 1];
        for t in combo.terms.iter().filter(|t| t.a != 0.0) {
            match combo.d {
                2 => {
                    let e = circle.entry(t.ell).or_default();
                    let norm = if t.ell == 0 { (2.0 * PI).sqrt() } else { PI.sqrt() };
                    if t.m == 0 {
                        e.0 += t.a / norm;
                    } else {
                        e.1 += t.a / norm;
                    }
                }
                _ => {
                    let m = t.m.unsigned_abs() as usize;
                    let e = by_m[m].entry(t.ell).or_default();
                    let a = if m == 0 { t.a } else { t.a * 2f64.sqrt() };
                    if t.m >= 0 {
                        e.0 += a;
                    } else {
                        e.1 += a;
                    }
                }
            }
        }
        Evaluator {
            d: combo.d,
            l_max,
            circle: circle.into_iter().map(|(l, (c, s))| (l, c, s)).collect(),
            by_m: by_m
                .into_iter()
                .map(|m| m.into_iter().map(|(l, (c, s))| (l, c, s)).collect())
                .collect(),
        }
    }

    pub(crate) fn eval_angle(&self, theta: f64) -> f64 {
        self.circle
            .iter()
            .map(|&(l, c, s)| {
                let (sn, cs) = (l as f64 * theta).sin_cos();
                c * cs + s * sn
            })
            .sum()
    }

    pub(crate) fn eval(&self, direction: &[f64]) -> f64 {
        let norm = direction.iter().map(|x| x * x).sum::<f64>().sqrt();
        if self.d == 2 {
            return self.eval_angle(direction[1].atan2(direction[0]));
        }
        let mut table = Vec::new();
        self.eval_sphere(
            [direction[0] / norm, direction[1] / norm, direction[2] / norm],
            &mut table,
        )
    }

    pub(crate) fn eval_sphere(&self, p: [f64; 3], table: &mut Vec<Vec<f64>>) -> f64 {
        normalized_legendre(self.l_max, p[2].clamp(-1.0, 1.0), table);
        let phi = p[1].atan2(p[0]);
        let mut total = 0.0;
        for (m, terms) in self.by_m.iter().enumerate() {
            if terms.is_empty() {
                continue;
            }
            let (sn, cs) = (m as f64 * phi).sin_cos();
            for &(l, c, s) in terms {
                total += table[m][l - m] * (c * cs + s * sn);
            }
        }
        total
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn circle_normalization() {
        let c = SphericalCombo::tone(2, 0, 0).unwrap();
        assert_relative_eq!(sph_eval(&c, &[0.3, 0.4]), 1.0 / (2.0 * PI).sqrt(), epsilon = 1e-15);
        let c = SphericalCombo::tone(2, 5, 0).unwrap();
        let th: f64 = 0.7;
        assert_relative_eq!(sph_eval(&c, &[th.cos(), th.sin()]), (5.0 * th).cos() / PI.sqrt(), epsilon = 1e-15);
        let c = SphericalCombo::tone(2, 3, 1).unwrap();
        assert_relative_eq!(sph_eval(&c, &[th.cos(), th.sin()]), (3.0 * th).sin() / PI.sqrt(), epsilon = 1e-15);
    }

    #[test]
    fn degree_one_is_linear() {
        let k = (3.0 / (4.0 * PI)).sqrt();
        let c = SphericalCombo::new(
            3,
            vec![
                Term { ell: 1, m: 1, a: 0.5 },
                Term { ell: 1, m: -1, a: -1.5 },
                Term { ell: 1, m: 0, a: 2.0 },
            ],
        )
        .unwrap();
        let p = [0.2, -0.5, 0.7];
        let r = p.iter().map(|x| x * x).sum::<f64>().sqrt();
        let want = k * (0.5 * p[0] - 1.5 * p[1] + 2.0 * p[2]) / r;
        assert_relative_eq!(sph_eval(&c, &p), want, epsilon = 1e-14);
    }

    #[test]
    fn degree_two_explicit() {
        // Y_2^0 = sqrt(5/16pi)(3z^2 - 1), Y_2^2 = sqrt(15/16pi)(x^2 - y^2), Y_2^{-1} = sqrt(15/4pi) y z
        let p = [0.48, 0.6, 0.64];
        let c = SphericalCombo::tone(3, 2, 0).unwrap();
        assert_relative_eq!(sph_eval(&c, &p), (5.0 / (16.0 * PI)).sqrt() * (3.0 * p[2] * p[2] - 1.0), epsilon = 1e-14);
        let c = SphericalCombo::tone(3, 2, 2).unwrap();
        assert_relative_eq!(sph_eval(&c, &p), (15.0 / (16.0 * PI)).sqrt() * (p[0] * p[0] - p[1] * p[1]), epsilon = 1e-14);
        let c = SphericalCombo::tone(3, 2, -1).unwrap();
        assert_relative_eq!(sph_eval(&c, &p), (15.0 / (4.0 * PI)).sqrt() * p[1] * p[2], epsilon = 1e-14);
    }

    fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
        let mut j = nalgebra::DMatrix::<f64>::zeros(n, n);
        for i in 1..n {
            let b = i as f64 / ((4 * i * i - 1) as f64).sqrt();
            j[(i, i - 1)] = b;
            j[(i - 1, i)] = b;
        }
        let eig = j.symmetric_eigen();
        (0..n).map(|i| (eig.eigenvalues[i], 2.0 * eig.eigenvectors[(0, i)].powi(2))).collect()
    }

    #[test]
    fn unit_norm_by_quadrature() {
        // Gauss-Legendre in cos(theta) times uniform phi integrates degree <= 2*12 exactly.
        let rule = gauss_legendre(16);
        for &(l, m) in &[(0usize, 0i64), (3, 2), (7, -5), (12, 12), (12, -1)] {
            let c = SphericalCombo::tone(3, l, m).unwrap();
            let nphi = 40;
            let mut total = 0.0;
            for (x, w) in rule.iter() {
                let s = (1.0 - x * x).sqrt();
                for j in 0..nphi {
                    let phi = 2.0 * PI * j as f64 / nphi as f64;
                    let v = sph_eval(&c, &[s * phi.cos(), s * phi.sin(), *x]);
                    total += w * v * v * 2.0 * PI / nphi as f64;
                }
            }
            assert_relative_eq!(total, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn rejects_bad_terms() {
        assert!(matches!(SphericalCombo::tone(2, 0, 1), Err(Error::MalformedSpec(_))));
        assert!(matches!(SphericalCombo::tone(3, 2, 3), Err(Error::MalformedSpec(_))));
        assert!(matches!(
            SphericalCombo::new(3, vec![Term { ell: 2, m: 0, a: 0.0 }]),
            Err(Error::DegenerateInput(_))
        ));
        assert!(matches!(SphericalCombo::tone(4, 1, 0), Err(Error::Unsupported(_))));
    }

    #[test]
    fn json_roundtrip() {
        let c = SphericalCombo::from_json(r#"{"d":3,"terms":[{"ell":2,"m":-1,"a":0.5}]}"#).unwrap();
        assert_eq!(SphericalCombo::from_json(&c.to_json()).unwrap(), c);
    }
}
