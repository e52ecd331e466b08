use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::laguerre::overlap::matrix_element;
use crate::laguerre::poly::alpha_for;
use crate::laguerre::quadrature::{cached_rule, normalized_functions};
use crate::potentials::{eval_potential, EvalMode, PotentialSpec, TruncatedPotential};

/// Extra quadrature nodes beyond the basis size for non-polynomial `V`.
const EXTRA_NODES: usize = 32;
/// Agreement required between the `m`- and `2m`-node assemblies.
const DOUBLING_TOL: f64 = 1e-11;
/// Largest Gauss–Laguerre rule tried by the doubling loop.
const MAX_NODES: usize = 2048;
/// Relative eigen-residual accepted by [`eigen_energies`].
const RESIDUAL_TOL: f64 = 1e-10;

/// The angular-momentum sector `(l, d)` at a fixed `h`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sector {
    pub ell: usize,
    pub d: usize,
    pub hbar: f64,
}

impl Sector {
    pub fn alpha(&self) -> f64 {
        alpha_for(self.ell, self.d)
    }

    /// Principal index of basis function `i`.
    pub fn principal(&self, i: usize) -> usize {
        self.ell + 2 * i
    }
}

/// The perturbation entering the Hamiltonian.
#[derive(Debug, Clone, PartialEq)]
pub enum Perturbation {
    /// Polynomial `V_K`; matrix elements from the closed-form overlaps.
    Truncated(TruncatedPotential),
    /// Full `V` (closed form if present); matrix elements by quadrature.
    Full(PotentialSpec),
}

impl Perturbation {
    /// Coupling range in reduced indices (`None` for dense coupling).
    pub fn bandwidth(&self) -> Option<usize> {
        match self {
            Perturbation::Truncated(vk) => Some(vk.effective_order()),
            Perturbation::Full(spec) if spec.closed_form.is_none() => Some(spec.k_max()),
            Perturbation::Full(_) => None,
        }
    }
}

/// `<V psi_{l+2i}, psi_{l+2j}>` for `i, j < size`, with its bandwidth.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialMatrix {
    pub data: DMatrix<f64>,
    pub bandwidth: Option<usize>,
}

pub fn potential_matrix(sector: Sector, v: &Perturbation, size: usize) -> Result<PotentialMatrix> {
    match v {
        Perturbation::Truncated(vk) => {
            let bw = vk.effective_order();
            let mut data = DMatrix::zeros(size, size);
            if bw > 0 {
                let rows: Vec<Vec<(usize, f64)>> = (0..size)
                    .into_par_iter()
                    .map(|i| {
                        (i..size.min(i + bw + 1))
                            .map(|j| {
                                let s = sector.principal(i);
                                let t = sector.principal(j);
                                Ok((j, matrix_element(vk, s, t, sector.ell, sector.d, sector.hbar)?))
                            })
                            .collect::<Result<Vec<_>>>()
                    })
                    .collect::<Result<Vec<_>>>()?;
                for (i, row) in rows.into_iter().enumerate() {
                    for (j, value) in row {
                        data[(i, j)] = value;
                        data[(j, i)] = value;
                    }
                }
            }
            Ok(PotentialMatrix {
                data,
                bandwidth: Some(bw),
            })
        }
        Perturbation::Full(spec) => {
            if spec.closed_form.is_none() {
                let vk = TruncatedPotential {
                    coeffs: spec.taylor_coeffs.get(2..).unwrap_or(&[]).to_vec(),
                    order: spec.k_max().max(2),
                };
                return potential_matrix(sector, &Perturbation::Truncated(vk), size);
            }
            let mut m = size + EXTRA_NODES;
            let mut coarse = quadrature_matrix(sector, spec, size, m)?;
            loop {
                let fine = quadrature_matrix(sector, spec, size, 2 * m)?;
                let gap = (&coarse - &fine).amax();
                if gap <= DOUBLING_TOL {
                    return Ok(PotentialMatrix {
                        data: fine,
                        bandwidth: None,
                    });
                }
                if 4 * m > MAX_NODES {
                    return Err(Error::NumericalFailure(format!(
                        "potential matrix not converged: {m} vs {} nodes differ by {gap:e}",
                        2 * m
                    )));
                }
                m *= 2;
                coarse = fine;
            }
        }
    }
}

fn quadrature_matrix(sector: Sector, spec: &PotentialSpec, size: usize, nodes: usize) -> Result<DMatrix<f64>> {
    let rule = cached_rule(nodes, sector.alpha())?;
    let phi = normalized_functions(&rule, size);
    let values: Vec<f64> = rule
        .nodes
        .iter()
        .map(|&x| eval_potential(spec, sector.hbar * x, EvalMode::Full))
        .collect::<Result<_>>()?;
    let rows: Vec<Vec<f64>> = (0..size)
        .into_par_iter()
        .map(|a| {
            (0..size)
                .map(|b| {
                    phi[a]
                        .iter()
                        .zip(&phi[b])
                        .zip(&values)
                        .map(|((p, q), v)| v * p * q)
                        .sum()
                })
                .collect()
        })
        .collect();
    let mut data = DMatrix::zeros(size, size);
    for a in 0..size {
        for b in a..size {
            // symmetrise exactly
            data[(a, b)] = rows[a][b];
            data[(b, a)] = rows[a][b];
        }
    }
    Ok(data)
}

/// `Op_{h,l}(eps)` in the first `size` Laguerre functions of the sector.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialHamiltonian {
    pub sector: Sector,
    pub eps: f64,
    pub size: usize,
    /// `h (m + d/2) δ_{ij} + eps h <V psi_i, psi_j>`.
    pub matrix: DMatrix<f64>,
    pub bandwidth: Option<usize>,
}

pub fn build_hamiltonian(sector: Sector, v: &Perturbation, eps: f64, size: usize) -> Result<RadialHamiltonian> {
    let w = potential_matrix(sector, v, size)?;
    hamiltonian_from_matrix(sector, &w, eps)
}

/// Assembles `H` from a precomputed potential matrix (reused across `eps`).
pub fn hamiltonian_from_matrix(sector: Sector, w: &PotentialMatrix, eps: f64) -> Result<RadialHamiltonian> {
    let size = w.data.nrows();
    if size < 8 {
        return Err(Error::Domain(format!("basis size {size} must be >= 8")));
    }
    if !(eps >= 0.0) {
        return Err(Error::Domain(format!("eps = {eps} must be >= 0")));
    }
    let h = sector.hbar;
    let mut matrix = &w.data * (eps * h);
    for i in 0..size {
        matrix[(i, i)] += h * (sector.principal(i) as f64 + 0.5 * sector.d as f64);
    }
    Ok(RadialHamiltonian {
        sector,
        eps,
        size,
        matrix,
        bandwidth: w.bandwidth,
    })
}

/// Eigenvalues (ascending) with unit eigenvectors and residual norms.
#[derive(Debug, Clone)]
pub struct EigenSystem {
    pub values: Vec<f64>,
    pub vectors: Vec<DVector<f64>>,
    pub residuals: Vec<f64>,
    pub norm: f64,
}

pub fn eigen_system(h: &RadialHamiltonian) -> Result<EigenSystem> {
    let eig = SymmetricEigen::try_new(h.matrix.clone(), f64::EPSILON, 100 * h.size.max(10)).ok_or_else(|| {
        Error::NumericalFailure(format!("symmetric eigensolver did not converge (size {})", h.size))
    })?;
    let mut order: Vec<usize> = (0..h.size).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let norm = eig.eigenvalues.amax();
    let mut values = Vec::with_capacity(h.size);
    let mut vectors = Vec::with_capacity(h.size);
    let mut residuals = Vec::with_capacity(h.size);
    for &i in &order {
        let lambda = eig.eigenvalues[i];
        let v = eig.eigenvectors.column(i).into_owned();
        let r = (&h.matrix * &v - &v * lambda).norm();
        values.push(lambda);
        vectors.push(v);
        residuals.push(r);
    }
    Ok(EigenSystem {
        values,
        vectors,
        residuals,
        norm,
    })
}

/// Two steps of shifted inverse iteration from `(lambda, v)`; returns the
/// Rayleigh quotient, the refined unit vector and its residual. Recovers full
/// accuracy when the QR sweep stopped early on tiny couplings.
pub fn refine_eigenpair(matrix: &DMatrix<f64>, lambda: f64, v: &DVector<f64>) -> (f64, DVector<f64>, f64) {
    let n = matrix.nrows();
    let residual = |l: f64, x: &DVector<f64>| (matrix * x - x * l).norm();
    let mut best = (lambda, v.clone(), residual(lambda, v));
    let (mut l, mut x) = (lambda, v.clone());
    for _ in 0..2 {
        let shifted = matrix - DMatrix::<f64>::identity(n, n) * l;
        let Some(y) = shifted.lu().solve(&x) else { break };
        let norm = y.norm();
        if !norm.is_finite() || norm == 0.0 {
            break;
        }
        x = y / norm;
        l = x.dot(&(matrix * &x));
        let r = residual(l, &x);
        if r < best.2 {
            best = (l, x.clone(), r);
        }
    }
    best
}

/// Lowest `count` eigenvalues, ascending, with a residual check.
pub fn eigen_energies(h: &RadialHamiltonian, count: usize) -> Result<Vec<f64>> {
    if count > h.size {
        return Err(Error::Domain(format!("requested {count} eigenvalues of a {}-dim matrix", h.size)));
    }
    let mut sys = eigen_system(h)?;
    for i in 0..count {
        if sys.residuals[i] > RESIDUAL_TOL * sys.norm {
            let (l, v, r) = refine_eigenpair(&h.matrix, sys.values[i], &sys.vectors[i]);
            sys.values[i] = l;
            sys.vectors[i] = v;
            sys.residuals[i] = r;
        }
    }
    for (lambda, r) in sys.values.iter().zip(&sys.residuals).take(count) {
        if *r > RESIDUAL_TOL * sys.norm {
            return Err(Error::NumericalFailure(format!(
                "eigenpair {lambda} has residual {r:e} > {RESIDUAL_TOL:e} * {}",
                sys.norm
            )));
        }
    }
    Ok(sys.values.into_iter().take(count).collect())
}
