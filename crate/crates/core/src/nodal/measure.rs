//! Nodal measures: zero counts on S¹ and nodal-line length on S².

use std::collections::HashMap;
use std::f64::consts::PI;

use nalgebra::{Matrix3, Rotation3, Vector3};
use rayon::prelude::*;
use serde::Serialize;

use super::harmonics::SphericalCombo;
use crate::error::{Error, Result};

/// Fractional offset of the circle grid, keeps grid points off rational zeros.
const GRID_OFFSET: f64 = 0.381_966_011_250_105_1;
const BISECTION_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NodalSample {
    pub combo: SphericalCombo,
    pub refinement: usize,
    /// Zero count (d = 2) or nodal length on the unit sphere (d = 3).
    pub measure_raw: f64,
    /// `raw / 2pi` (d = 2) or `raw / 4pi` (d = 3).
    pub measure_normalized: f64,
    /// `(refinement, raw measure)` for the levels computed.
    pub convergence: Vec<(usize, f64)>,
    /// Zero angles (d = 2 only).
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub zeros: Vec<f64>,
}

impl NodalSample {
    /// Successive differences of the convergence record.
    pub fn deltas(&self) -> Vec<f64> {
        self.convergence.windows(2).map(|w| (w[1].1 - w[0].1).abs()).collect()
    }
}

pub fn normalization(d: usize) -> f64 {
    if d == 2 {
        2.0 * PI
    } else {
        4.0 * PI
    }
}

/// Nodal measure at `refinement`, with the two coarser levels recorded for d = 3
/// and every level from 0 for d = 2.
pub fn nodal_measure(combo: &SphericalCombo, refinement: usize) -> Result<NodalSample> {
    nodal_measure_rotated(combo, refinement, &Rotation3::identity())
}

/// Nodal measure of `omega -> f(R omega)`.
pub fn nodal_measure_rotated(
    combo: &SphericalCombo,
    refinement: usize,
    rotation: &Rotation3<f64>,
) -> Result<NodalSample> {
    combo.check()?;
    match combo.d {
        2 => {
            let angle = rotation.scaled_axis().z;
            let mut convergence = Vec::new();
            let mut zeros = Vec::new();
            for level in 0..=refinement {
                zeros = circle_zeros(combo, level, angle);
                convergence.push((level, zeros.len() as f64));
            }
            let raw = zeros.len() as f64;
            Ok(NodalSample {
                combo: combo.clone(),
                refinement,
                measure_raw: raw,
                measure_normalized: raw / normalization(2),
                convergence,
                zeros,
            })
        }
        _ => {
            let lo = refinement.saturating_sub(2);
            let convergence: Vec<(usize, f64)> = (lo..=refinement)
                .map(|level| (level, sphere_length(combo, level, rotation.matrix())))
                .collect();
            let raw = convergence.last().map(|c| c.1).unwrap_or(0.0);
            Ok(NodalSample {
                combo: combo.clone(),
                refinement,
                measure_raw: raw,
                measure_normalized: raw / normalization(3),
                convergence,
                zeros: Vec::new(),
            })
        }
    }
}

/// Grid size `2^level * 8 l_max` with bisection of every bracketed sign change.
fn circle_zeros(combo: &SphericalCombo, level: usize, shift: f64) -> Vec<f64> {
    let ev = combo.evaluator();
    let n = (8 * combo.ell_max().max(1)) << level;
    let step = 2.0 * PI / n as f64;
    let theta = |j: usize| (j as f64 + GRID_OFFSET) * step;
    let f = |t: f64| ev.eval_angle(t + shift);
    let values: Vec<f64> = (0..n).into_par_iter().map(|j| f(theta(j))).collect();
    (0..n)
        .into_par_iter()
        .filter_map(|j| {
            let (a, b) = (values[j], values[(j + 1) % n]);
            if (a >= 0.0) == (b >= 0.0) {
                return None;
            }
            let (mut lo, mut hi) = (theta(j), theta(j) + step);
            let mut flo = a;
            while hi - lo > BISECTION_TOL {
                let mid = 0.5 * (lo + hi);
                let fm = f(mid);
                if (fm >= 0.0) == (flo >= 0.0) {
                    lo = mid;
                    flo = fm;
                } else {
                    hi = mid;
                }
            }
            Some((0.5 * (lo + hi)).rem_euclid(2.0 * PI))
        })
        .collect()
}

/// Unit icosphere after `level` subdivisions, tilted off the coordinate planes.
pub fn icosphere(level: usize) -> (Vec<[f64; 3]>, Vec<[u32; 3]>) {
    let t = (1.0 + 5f64.sqrt()) / 2.0;
    let mut verts: Vec<[f64; 3]> = [
        [-1.0, t, 0.0],
        [1.0, t, 0.0],
        [-1.0, -t, 0.0],
        [1.0, -t, 0.0],
        [0.0, -1.0, t],
        [0.0, 1.0, t],
        [0.0, -1.0, -t],
        [0.0, 1.0, -t],
        [t, 0.0, -1.0],
        [t, 0.0, 1.0],
        [-t, 0.0, -1.0],
        [-t, 0.0, 1.0],
    ]
    .iter()
    .map(|v| unit(*v))
    .collect();
    let mut faces: Vec<[u32; 3]> = vec![
        [0, 11, 5], [0, 5, 1], [0, 1, 7], [0, 7, 10], [0, 10, 11],
        [1, 5, 9], [5, 11, 4], [11, 10, 2], [10, 7, 6], [7, 1, 8],
        [3, 9, 4], [3, 4, 2], [3, 2, 6], [3, 6, 8], [3, 8, 9],
        [4, 9, 5], [2, 4, 11], [6, 2, 10], [8, 6, 7], [9, 8, 1],
    ];
    for _ in 0..level {
        let mut cache: HashMap<(u32, u32), u32> = HashMap::new();
        let mut mid = |a: u32, b: u32, verts: &mut Vec<[f64; 3]>| -> u32 {
            let key = (a.min(b), a.max(b));
            *cache.entry(key).or_insert_with(|| {
                let (p, q) = (verts[a as usize], verts[b as usize]);
                verts.push(unit([p[0] + q[0], p[1] + q[1], p[2] + q[2]]));
                (verts.len() - 1) as u32
            })
        };
        let mut next = Vec::with_capacity(faces.len() * 4);
        for &[a, b, c] in &faces {
            let ab = mid(a, b, &mut verts);
            let bc = mid(b, c, &mut verts);
            let ca = mid(c, a, &mut verts);
            next.extend_from_slice(&[[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]);
        }
        faces = next;
    }
    let tilt = Rotation3::from_euler_angles(0.123_456_7, 0.314_159_2, 0.271_828_1);
    let verts = verts
        .into_iter()
        .map(|v| {
            let w = tilt * Vector3::from(v);
            [w.x, w.y, w.z]
        })
        .collect();
    (verts, faces)
}

fn unit(v: [f64; 3]) -> [f64; 3] {
    let r = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    [v[0] / r, v[1] / r, v[2] / r]
}

/// Sum in a fixed binary-tree order, independent of thread count.
pub fn pairwise_sum(x: &[f64]) -> f64 {
    match x.len() {
        0 => 0.0,
        1 => x[0],
        n if n <= 8 => x.iter().sum(),
        n => pairwise_sum(&x[..n / 2]) + pairwise_sum(&x[n / 2..]),
    }
}

fn sphere_length(combo: &SphericalCombo, level: usize, rotation: &Matrix3<f64>) -> f64 {
    let (verts, faces) = icosphere(level);
    let ev = combo.evaluator();
    let values: Vec<f64> = verts
        .par_iter()
        .map_init(Vec::new, |table, v| {
            let w = rotation * Vector3::from(*v);
            ev.eval_sphere([w.x, w.y, w.z], table)
        })
        .collect();
    let lengths: Vec<f64> = faces
        .par_iter()
        .map(|&[a, b, c]| {
            let idx = [a as usize, b as usize, c as usize];
            let f = idx.map(|i| values[i]);
            let pos = f.map(|x| x >= 0.0);
            if pos[0] == pos[1] && pos[1] == pos[2] {
                return 0.0;
            }
            let mut pts = Vec::with_capacity(2);
            for (i, j) in [(0, 1), (1, 2), (2, 0)] {
                if pos[i] != pos[j] {
                    let s = f[i] / (f[i] - f[j]);
                    let (p, q) = (verts[idx[i]], verts[idx[j]]);
                    pts.push(unit([
                        p[0] + s * (q[0] - p[0]),
                        p[1] + s * (q[1] - p[1]),
                        p[2] + s * (q[2] - p[2]),
                    ]));
                }
            }
            let (p, q) = (pts[0], pts[1]);
            let dot = (p[0] * q[0] + p[1] * q[1] + p[2] * q[2]).clamp(-1.0, 1.0);
            let cross = Vector3::from(p).cross(&Vector3::from(q)).norm();
            cross.atan2(dot)
        })
        .collect();
    pairwise_sum(&lengths)
}

/// Pure-tone calibration `C = max raw / l` over the given tones.
pub fn calibrate_pure_tones(d: usize, tones: &[(usize, i64)], refinement: usize) -> Result<f64> {
    let mut best: f64 = 0.0;
    for &(ell, m) in tones {
        if ell == 0 {
            continue;
        }
        let s = nodal_measure(&SphericalCombo::tone(d, ell, m)?, refinement)?;
        best = best.max(s.measure_raw / ell as f64);
    }
    if best == 0.0 {
        return Err(Error::DegenerateInput("no calibration tone with l > 0".into()));
    }
    Ok(best)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MixedFrequencyReport {
    pub ell_max: usize,
    pub measure_raw: f64,
    pub c_hat: f64,
    pub bound: f64,
    /// `bound - measure`.
    pub margin: f64,
    pub passed: bool,
}

/// Checks `raw measure <= c_hat * l_max`.
pub fn mixed_frequency_bound_check(combo: &SphericalCombo, refinement: usize, c_hat: f64) -> Result<MixedFrequencyReport> {
    let s = nodal_measure(combo, refinement)?;
    let ell_max = combo.ell_max();
    let bound = c_hat * ell_max as f64;
    Ok(MixedFrequencyReport {
        ell_max,
        measure_raw: s.measure_raw,
        c_hat,
        bound,
        margin: bound - s.measure_raw,
        passed: s.measure_raw <= bound,
    })
}

#[cfg(test)]
mod tests {
    use super::super::harmonics::Term;
    use super::*;

    #[test]
    fn pure_tone_zero_counts() {
        for ell in [1usize, 2, 7, 64, 511, 512] {
            for m in [0, 1] {
                let s = nodal_measure(&SphericalCombo::tone(2, ell, m).unwrap(), 0).unwrap();
                assert_eq!(s.measure_raw, 2.0 * ell as f64, "l = {ell}");
            }
        }
        let s = nodal_measure(&SphericalCombo::tone(2, 0, 0).unwrap(), 2).unwrap();
        assert_eq!(s.measure_raw, 0.0);
    }

    #[test]
    fn zeros_are_bisected() {
        let s = nodal_measure(&SphericalCombo::tone(2, 3, 0).unwrap(), 0).unwrap();
        for z in &s.zeros {
            assert!((3.0 * z).cos().abs() < 1e-11);
        }
    }

    #[test]
    fn two_tone_bound() {
        let c = SphericalCombo::new(2, vec![Term { ell: 3, m: 0, a: 1.0 }, Term { ell: 5, m: 0, a: 0.5 }]).unwrap();
        let r = mixed_frequency_bound_check(&c, 2, 2.0).unwrap();
        assert!(r.passed && r.measure_raw <= 10.0);
    }

    #[test]
    fn great_circle_length() {
        let s = nodal_measure(&SphericalCombo::tone(3, 1, 0).unwrap(), 6).unwrap();
        assert!((s.measure_raw / (2.0 * PI) - 1.0).abs() < 0.01, "{}", s.measure_raw);
        assert!((s.measure_normalized - 0.5).abs() < 0.005);
        assert!(s.deltas().iter().all(|&d| d < 1e-12));
    }

    #[test]
    fn refinement_converges_geometrically() {
        let c = SphericalCombo::new(
            3,
            vec![Term { ell: 4, m: 1, a: 1.0 }, Term { ell: 4, m: -3, a: 0.7 }, Term { ell: 4, m: 0, a: -0.4 }],
        )
        .unwrap();
        let s = nodal_measure(&c, 6).unwrap();
        let d = s.deltas();
        assert!(d[1] < d[0], "{:?}", s.convergence);
        assert!(d[1] / s.measure_raw < 0.005);
    }

    #[test]
    fn icosphere_counts() {
        let (v, f) = icosphere(3);
        assert_eq!(v.len(), 10 * 64 + 2);
        assert_eq!(f.len(), 20 * 64);
    }

    #[test]
    fn pairwise_sum_is_exact_for_integers() {
        let x: Vec<f64> = (0..1000).map(|i| i as f64).collect();
        assert_eq!(pairwise_sum(&x), 499500.0);
    }

    #[test]
    fn zero_combo_is_degenerate() {
        let c = SphericalCombo { d: 3, terms: vec![Term { ell: 1, m: 0, a: 0.0 }], energies: None };
        assert!(matches!(nodal_measure(&c, 2), Err(Error::DegenerateInput(_))));
    }
}
