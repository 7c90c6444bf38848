//! Gauge capacitance matrices and their subwavelength spectra.
//!
//! Row `i` of every matrix is built from resonator `i`'s own length and
//! gauge, `C_{i,i±1} = -g(±γ_i ℓ_i)/s`, with `g(x) = x/(1-e^{-x})`. For
//! equal lengths this coincides with the usual printed coefficients; for
//! unequal lengths it keeps `C 𝟙 = 0`.

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::geometry::{resonator_positions, ChainSpec, UnitCellSpec};
use crate::linalg::{self, CMatrix, C64};

/// `x / (1 - e^{-x})`, exact at `x = 0`.
pub fn g(x: f64) -> f64 {
    if x.abs() < 1e-6 {
        1.0 + x / 2.0 + x * x / 12.0
    } else {
        x / -(-x).exp_m1()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaugeCapacitanceMatrix {
    data: CMatrix,
}

impl GaugeCapacitanceMatrix {
    pub fn from_matrix(data: CMatrix) -> Self {
        GaugeCapacitanceMatrix { data }
    }

    pub fn as_matrix(&self) -> &CMatrix {
        &self.data
    }

    pub fn into_matrix(self) -> CMatrix {
        self.data
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data[[i, j]]
    }

    pub fn frobenius(&self) -> f64 {
        linalg::frobenius(&self.data)
    }

    pub fn conj(&self) -> Self {
        GaugeCapacitanceMatrix { data: self.data.mapv(|z| z.conj()) }
    }
}

/// Finite-chain matrix `C^γ` (tridiagonal).
pub fn build_capacitance(chain: &ChainSpec) -> GaugeCapacitanceMatrix {
    let n = chain.len();
    let mut c = CMatrix::zeros((n, n));
    for i in 0..n {
        let x = chain.gammas[i] * chain.lengths[i];
        if i + 1 < n {
            let t = g(x) / chain.spacings[i];
            c[[i, i]] += t;
            c[[i, i + 1]] -= t;
        }
        if i > 0 {
            let t = g(-x) / chain.spacings[i - 1];
            c[[i, i]] += t;
            c[[i, i - 1]] -= t;
        }
    }
    GaugeCapacitanceMatrix { data: c }
}

/// Quasiperiodic matrix `C^{γ,α}` of one unit cell; `alpha` may be complex.
/// The corner `(K,1)` carries `e^{-iαL}` and `(1,K)` carries `e^{+iαL}`.
pub fn build_quasiperiodic_capacitance(cell: &UnitCellSpec, alpha: C64) -> GaugeCapacitanceMatrix {
    let k = cell.len();
    let l = cell.cell_length();
    let phase = (linalg::I * alpha * l).exp();
    let mut c = CMatrix::zeros((k, k));
    for i in 0..k {
        let x = cell.gamma * cell.lengths[i];
        let right = g(x) / cell.spacings[i];
        let left = g(-x) / cell.spacings[(i + k - 1) % k];
        c[[i, i]] += right + left;
        let (jr, pr) = if i + 1 == k { (0, phase.inv()) } else { (i + 1, C64::new(1.0, 0.0)) };
        let (jl, pl) = if i == 0 { (k - 1, phase) } else { (i - 1, C64::new(1.0, 0.0)) };
        c[[i, jr]] -= pr * right;
        c[[i, jl]] -= pl * left;
    }
    GaugeCapacitanceMatrix { data: c }
}

/// Diagonal of the volume matrix `V = diag(ℓ_1, …, ℓ_N)`.
pub fn volume_matrix(lengths: &[f64]) -> Vec<f64> {
    lengths.to_vec()
}

/// Eigenvalues, frequencies and normalised eigenvectors of one matrix.
#[derive(Debug, Clone)]
pub struct SpectralResult {
    /// Sorted by (Re, Im).
    pub eigenvalues: Vec<C64>,
    pub omegas: Vec<C64>,
    /// Column `k` pairs with `eigenvalues[k]`; ∞-norm 1 with the first
    /// largest-modulus entry real positive.
    pub eigenvectors: CMatrix,
    /// `‖v‖∞/‖v‖₂` per mode.
    pub localization: Vec<f64>,
    /// 0-based site of the largest entry per mode.
    pub peak_index: Vec<usize>,
    /// `max_k ‖C v_k - λ_k V v_k‖₂ / ‖C‖_F`.
    pub max_residual: f64,
}

impl SpectralResult {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn eigenvector(&self, k: usize) -> Vec<C64> {
        self.eigenvectors.column(k).to_vec()
    }
}

/// Rescales to ∞-norm 1 and rotates the first largest-modulus entry onto
/// the positive real axis. Returns the index of that entry.
pub fn normalize_inf(v: &mut [C64]) -> usize {
    let mut p = 0;
    let mut m = 0.0;
    for (i, z) in v.iter().enumerate() {
        if z.norm() > m {
            m = z.norm();
            p = i;
        }
    }
    if m > 0.0 {
        let s = v[p].conj() / (m * m);
        for z in v.iter_mut() {
            *z *= s;
        }
        v[p] = C64::new(1.0, 0.0);
    }
    p
}

/// Sorted, normalised eigenpairs of `op`. The residual is measured against
/// `c` and `weight` (`C v = λ W v`); `omega` maps eigenvalues to frequencies.
fn eigen_decompose(
    op: &CMatrix,
    c: &CMatrix,
    weight: &[C64],
    omega: impl Fn(C64) -> C64,
) -> Result<SpectralResult> {
    let n = op.nrows();
    let (vals, vecs) = linalg::eig(op)?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| linalg::cmp_re_im(&vals[x], &vals[y]));

    let mut eigenvalues = Vec::with_capacity(n);
    let mut eigenvectors = Array2::zeros((n, n));
    let mut localization = Vec::with_capacity(n);
    let mut peak_index = Vec::with_capacity(n);
    let mut max_residual = 0.0f64;
    let cf = linalg::frobenius(c).max(f64::MIN_POSITIVE);
    for (k, &src) in order.iter().enumerate() {
        let lam = vals[src];
        let mut v: Vec<C64> = vecs.column(src).to_vec();
        let p = normalize_inf(&mut v);
        let cv = linalg::mat_vec(c, &v);
        let r: Vec<C64> = cv
            .iter()
            .zip(&v)
            .zip(weight)
            .map(|((x, y), w)| x - lam * w * y)
            .collect();
        let res = linalg::norm2(&r) / cf;
        if !res.is_finite() {
            return Err(Error::Eigen(format!("non-finite residual for mode {k}")));
        }
        max_residual = max_residual.max(res);
        localization.push(1.0 / linalg::norm2(&v));
        peak_index.push(p);
        for (i, z) in v.into_iter().enumerate() {
            eigenvectors[[i, k]] = z;
        }
        eigenvalues.push(lam);
    }
    // Eigenvalues at roundoff level belong to the kernel mode: ω = 0 there.
    let top = eigenvalues.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let omegas = eigenvalues
        .iter()
        .map(|&l| if l.norm() <= 64.0 * f64::EPSILON * top { C64::new(0.0, 0.0) } else { omega(l) })
        .collect();
    Ok(SpectralResult { eigenvalues, omegas, eigenvectors, localization, peak_index, max_residual })
}

/// Solves `C a = λ V a` through `V⁻¹ C` and maps `ω = v_b √(δλ)` on the
/// branch with non-negative real part.
pub fn solve_spectrum(
    c: &GaugeCapacitanceMatrix,
    volume: &[f64],
    delta: f64,
    v_b: f64,
) -> Result<SpectralResult> {
    let n = c.dim();
    if volume.len() != n {
        return Err(Error::Validation(format!(
            "volume matrix has {} entries for a {n}x{n} matrix",
            volume.len()
        )));
    }
    if volume.iter().any(|&v| v.is_nan() || v <= 0.0) {
        return Err(Error::Validation("volume matrix must be positive".into()));
    }
    let mut op = c.as_matrix().clone();
    for i in 0..n {
        for j in 0..n {
            op[[i, j]] /= volume[i];
        }
    }
    let w: Vec<C64> = volume.iter().map(|&v| C64::from(v)).collect();
    eigen_decompose(&op, c.as_matrix(), &w, |l| v_b * linalg::sqrt_positive_re(delta * l))
}

pub fn chain_spectrum(chain: &ChainSpec) -> Result<SpectralResult> {
    solve_spectrum(&build_capacitance(chain), &volume_matrix(&chain.lengths), chain.delta, chain.v_b)
}

/// Complex-material problem: eigenpairs of `diag(δ v_i²/ℓ_i) C`, with
/// `ω = √λ`.
pub fn solve_material_spectrum(
    c: &GaugeCapacitanceMatrix,
    lengths: &[f64],
    speeds: &[C64],
    delta: f64,
) -> Result<SpectralResult> {
    let n = c.dim();
    if lengths.len() != n || speeds.len() != n {
        return Err(Error::Validation("material data does not match the matrix size".into()));
    }
    let d: Vec<C64> = (0..n).map(|i| delta * speeds[i] * speeds[i] / lengths[i]).collect();
    let mut op = c.as_matrix().clone();
    for i in 0..n {
        for j in 0..n {
            op[[i, j]] *= d[i];
        }
    }
    let w: Vec<C64> = d.iter().map(|z| z.inv()).collect();
    eigen_decompose(&op, c.as_matrix(), &w, linalg::sqrt_positive_re)
}

/// Spectrum of a chain, using the material path when speeds are given.
pub fn chain_spectrum_auto(chain: &ChainSpec) -> Result<SpectralResult> {
    match &chain.speeds {
        Some(v) => solve_material_spectrum(&build_capacitance(chain), &chain.lengths, v, chain.delta),
        None => chain_spectrum(chain),
    }
}

/// Evaluates `u(x) = Σ_j a_j V_j(x)`: `a_j` on resonator `j`, linear across
/// gaps and constant beyond the outermost resonators.
pub fn reconstruct_mode(chain: &ChainSpec, eigvec: &[C64], grid: &[f64]) -> Result<Vec<C64>> {
    let pos = resonator_positions(chain);
    if eigvec.len() != pos.len() {
        return Err(Error::Validation(format!(
            "eigenvector has {} entries for {} resonators",
            eigvec.len(),
            pos.len()
        )));
    }
    let n = pos.len();
    Ok(grid
        .iter()
        .map(|&x| {
            if x <= pos[0].0 {
                return eigvec[0];
            }
            if x >= pos[n - 1].1 {
                return eigvec[n - 1];
            }
            let j = pos.partition_point(|&(l, _)| l <= x) - 1;
            let (_, r) = pos[j];
            if x <= r {
                eigvec[j]
            } else {
                let l_next = pos[j + 1].0;
                let t = (x - r) / (l_next - r);
                eigvec[j] * (1.0 - t) + eigvec[j + 1] * t
            }
        })
        .collect())
}
