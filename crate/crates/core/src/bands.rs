//! Band functions of periodic chains: closed-form monomer and dimer bands,
//! exceptional points, vorticity and the complex-material band problem.

use std::f64::consts::PI;

use crate::capmat::{build_quasiperiodic_capacitance, g};
use crate::error::{Error, Result};
use crate::geometry::UnitCellSpec;
use crate::linalg::{self, CMatrix, C64, I};

/// One quasiperiodicity with its band eigenvalues and frequencies.
#[derive(Debug, Clone, PartialEq)]
pub struct BandSample {
    pub alpha: C64,
    pub lambdas: Vec<C64>,
    pub omegas: Vec<C64>,
}

impl BandSample {
    /// Sorts the eigenvalues and maps `ω = v_b √(δλ)`.
    pub fn from_lambdas(alpha: C64, mut lambdas: Vec<C64>, delta: f64, v_b: f64) -> Self {
        lambdas.sort_by(linalg::cmp_re_im);
        let omegas = lambdas.iter().map(|&l| v_b * linalg::sqrt_positive_re(delta * l)).collect();
        BandSample { alpha, lambdas, omegas }
    }
}

/// Periodic dimer with unit resonator lengths.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DimerParams {
    pub s1: f64,
    pub s2: f64,
    pub gamma: f64,
    pub delta: f64,
    pub v_b: f64,
}

impl DimerParams {
    pub fn new(s1: f64, s2: f64, gamma: f64) -> Result<Self> {
        if !(s1 > 0.0 && s2 > 0.0 && s1.is_finite() && s2.is_finite()) {
            return Err(Error::Validation(format!("spacings must be positive, got {s1}, {s2}")));
        }
        if !gamma.is_finite() {
            return Err(Error::Validation("gamma must be finite".into()));
        }
        Ok(DimerParams { s1, s2, gamma, delta: 1e-3, v_b: 1.0 })
    }

    pub fn cell_length(&self) -> f64 {
        2.0 + self.s1 + self.s2
    }

    pub fn cell(&self) -> UnitCellSpec {
        UnitCellSpec::new(vec![1.0, 1.0], vec![self.s1, self.s2], self.gamma, self.delta, self.v_b, None)
            .expect("dimer parameters are validated on construction")
    }
}

/// Closed-form dimer eigenvalues (unit lengths), sorted by (Re, Im).
pub fn dimer_lambdas(p: &DimerParams, alpha: C64) -> [C64; 2] {
    let (s1, s2, gm) = (p.s1, p.s2, p.gamma);
    let l = p.cell_length();
    let d = gm.cosh() * (s1 - s2).powi(2) + (s1 + s2).powi(2);
    let root = (4.0 * s1 * s2 * (C64::from(gm) - I * alpha * l).cosh() + d).sqrt();
    let pre = g(-gm) / (2.0 * s1 * s2);
    let a = (gm.exp() + 1.0) * (s1 + s2);
    let b = 2f64.sqrt() * (gm / 2.0).exp() * root;
    let mut out = [pre * (a - b), pre * (a + b)];
    out.sort_by(linalg::cmp_re_im);
    out
}

pub fn dimer_bands(p: &DimerParams, alpha: C64) -> BandSample {
    BandSample::from_lambdas(alpha, dimer_lambdas(p, alpha).to_vec(), p.delta, p.v_b)
}

/// Single-resonator band `λ^α = [g(γℓ)(1 - e^{-iαL}) + g(-γℓ)(1 - e^{iαL})] / (ℓ s)`
/// with `L = ℓ + s`.
pub fn monomer_band(ell: f64, s: f64, gamma: f64, alpha: C64) -> C64 {
    let l = ell + s;
    let e = (I * alpha * l).exp();
    let x = gamma * ell;
    (g(x) * (1.0 - e.inv()) + g(-x) * (1.0 - e)) / (s * ell)
}

/// Eigenvalues of `V⁻¹ C^{γ,α}`, sorted by (Re, Im). Uses the closed forms
/// for monomer cells and unit-length dimers.
pub fn cell_lambdas(cell: &UnitCellSpec, alpha: C64) -> Result<Vec<C64>> {
    match cell.len() {
        1 => Ok(vec![monomer_band(cell.lengths[0], cell.spacings[0], cell.gamma, alpha)]),
        2 if cell.lengths == [1.0, 1.0] => {
            let p = DimerParams { s1: cell.spacings[0], s2: cell.spacings[1], gamma: cell.gamma, delta: cell.delta, v_b: cell.v_b };
            Ok(dimer_lambdas(&p, alpha).to_vec())
        }
        _ => dense_cell_lambdas(cell, alpha),
    }
}

pub fn dense_cell_lambdas(cell: &UnitCellSpec, alpha: C64) -> Result<Vec<C64>> {
    let mut m = build_quasiperiodic_capacitance(cell, alpha).into_matrix();
    for i in 0..cell.len() {
        for j in 0..cell.len() {
            m[[i, j]] /= cell.lengths[i];
        }
    }
    let mut v = linalg::eigvals(&m)?;
    v.sort_by(linalg::cmp_re_im);
    Ok(v)
}

/// `ω` sheets of a cell at `alpha`: the material problem when speeds are
/// set, otherwise `v_b √(δλ)`.
pub fn cell_omegas(cell: &UnitCellSpec, alpha: C64) -> Result<Vec<C64>> {
    match &cell.speeds {
        Some(v) => Ok(material_band_eigs(cell, alpha, v, cell.delta)?.omegas),
        None => Ok(BandSample::from_lambdas(alpha, cell_lambdas(cell, alpha)?, cell.delta, cell.v_b).omegas),
    }
}

/// `γ_c = arccosh((s1+s2)² / (6 s1 s2 - s1² - s2²))`.
pub fn critical_gamma(s1: f64, s2: f64) -> Result<f64> {
    if !(s1 > 0.0 && s2 > 0.0) {
        return Err(Error::Validation(format!("spacings must be positive, got {s1}, {s2}")));
    }
    if s1 == s2 {
        return Ok(0.0);
    }
    let den = 6.0 * s1 * s2 - s1 * s1 - s2 * s2;
    if den <= 0.0 {
        return Err(Error::NoExceptionalPoint(den));
    }
    Ok(((s1 + s2).powi(2) / den).acosh())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExceptionalPointReport {
    /// `tr(C)² - 4 det(C)`.
    pub discriminant: C64,
    /// `‖C‖_F²`, the scale the discriminant is compared against.
    pub scale: f64,
    pub coalesced: bool,
    /// Principal angle between the two computed eigenvectors.
    pub eigenvector_angle: f64,
}

pub fn exceptional_point_check(p: &DimerParams, alpha: C64) -> Result<ExceptionalPointReport> {
    let c = build_quasiperiodic_capacitance(&p.cell(), alpha);
    let m = c.as_matrix();
    let tr = m[[0, 0]] + m[[1, 1]];
    let det = m[[0, 0]] * m[[1, 1]] - m[[0, 1]] * m[[1, 0]];
    let discriminant = tr * tr - 4.0 * det;
    let scale = c.frobenius().powi(2);
    let (_, vecs) = linalg::eig(m)?;
    let u: Vec<C64> = vecs.column(0).to_vec();
    let v: Vec<C64> = vecs.column(1).to_vec();
    let ip: C64 = u.iter().zip(&v).map(|(x, y)| x.conj() * y).sum();
    let cos = (ip.norm() / (linalg::norm2(&u) * linalg::norm2(&v))).min(1.0);
    let eigenvector_angle = (1.0 - cos * cos).max(0.0).sqrt().asin();
    Ok(ExceptionalPointReport {
        discriminant,
        scale,
        coalesced: discriminant.norm() < 1e-8 * scale,
        eigenvector_angle,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Vorticity {
    /// Rounded to a half-integer when within 1e-3 of one, raw otherwise.
    pub nu: f64,
    pub raw: f64,
    pub quantized: bool,
    pub samples: usize,
}

/// Permutation of `next` that follows `prev` (exhaustive for two bands,
/// greedy nearest match otherwise).
pub fn track_order(prev: &[C64], next: &[C64]) -> Vec<usize> {
    if prev.len() == 2 && next.len() == 2 {
        let keep = (next[0] - prev[0]).norm() + (next[1] - prev[1]).norm();
        let swap = (next[1] - prev[0]).norm() + (next[0] - prev[1]).norm();
        return if swap < keep { vec![1, 0] } else { vec![0, 1] };
    }
    let mut used = vec![false; next.len()];
    prev.iter()
        .map(|p| {
            let j = (0..next.len())
                .filter(|&j| !used[j])
                .min_by(|&x, &y| (next[x] - p).norm().total_cmp(&(next[y] - p).norm()))
                .unwrap();
            used[j] = true;
            j
        })
        .collect()
}

/// Relabels band samples by continuity, starting from the sorted first sample.
pub fn track_bands(samples: &mut [BandSample]) {
    for k in 1..samples.len() {
        let order = track_order(&samples[k - 1].lambdas, &samples[k].lambdas);
        let cur = &mut samples[k];
        cur.lambdas = order.iter().map(|&i| cur.lambdas[i]).collect();
        cur.omegas = order.iter().map(|&i| cur.omegas[i]).collect();
    }
}

/// `(1/2π)` times the total unwrapped change of `arg(ω₂ - ω₁)` over
/// `α ∈ [-π/L, π/L]`, with band labels carried by continuity. Doubles the
/// sample count (up to 6 times) whenever the phase jumps by more than π/2
/// between neighbouring samples.
pub fn band_difference_winding(
    omegas: impl Fn(f64) -> Result<Vec<C64>>,
    zone_edge: f64,
    samples: usize,
) -> Result<Vorticity> {
    if samples < 64 {
        return Err(Error::Precondition(format!("vorticity needs at least 64 samples, got {samples}")));
    }
    let mut m = samples;
    let mut last_jump = 0.0;
    for refinement in 0..=6 {
        match winding_pass(&omegas, zone_edge, m)? {
            Ok(raw) => {
                let half = (2.0 * raw).round() / 2.0;
                let quantized = (raw - half).abs() < 1e-3;
                return Ok(Vorticity { nu: if quantized { half + 0.0 } else { raw }, raw, quantized, samples: m });
            }
            Err(jump) => last_jump = jump,
        }
        if refinement < 6 {
            m *= 2;
        }
    }
    Err(Error::BandTracking { refinements: 6, jump: last_jump })
}

fn winding_pass(
    omegas: &impl Fn(f64) -> Result<Vec<C64>>,
    zone_edge: f64,
    m: usize,
) -> Result<std::result::Result<f64, f64>> {
    let mut prev: Option<Vec<C64>> = None;
    let mut prev_d = C64::new(0.0, 0.0);
    let mut total = 0.0;
    for k in 0..=m {
        let alpha = -zone_edge + 2.0 * zone_edge * k as f64 / m as f64;
        let mut w = omegas(alpha)?;
        if w.len() != 2 {
            return Err(Error::Precondition(format!("vorticity needs two bands, got {}", w.len())));
        }
        w = match &prev {
            None => {
                w.sort_by(linalg::cmp_re_im);
                w
            }
            Some(p) => track_order(p, &w).into_iter().map(|i| w[i]).collect(),
        };
        let d = w[1] - w[0];
        if d.norm() == 0.0 {
            return Err(Error::Precondition(format!("bands touch at α = {alpha}")));
        }
        if prev.is_some() {
            let step = (d / prev_d).arg();
            if step.abs() > PI / 2.0 {
                return Ok(Err(step.abs()));
            }
            total += step;
        }
        prev_d = d;
        prev = Some(w);
    }
    Ok(Ok(total / (2.0 * PI)))
}

/// Vorticity of a periodic dimer.
pub fn vorticity(p: &DimerParams, samples: usize) -> Result<Vorticity> {
    if p.gamma == 0.0 {
        return Err(Error::Precondition("vorticity is undefined at γ = 0".into()));
    }
    if let Ok(gc) = critical_gamma(p.s1, p.s2) {
        if (p.gamma.abs() - gc).abs() < 1e-9 {
            return Err(Error::Precondition("bands touch at the critical gauge".into()));
        }
    }
    let q = *p;
    band_difference_winding(
        move |a| Ok(dimer_bands(&q, C64::from(a)).omegas),
        PI / p.cell_length(),
        samples,
    )
}

/// Bands of the complex-material problem: eigenvalues of
/// `diag(δ v_i²/ℓ_i) C^{0,α}` and `ω = √λ`.
pub fn material_band_eigs(cell: &UnitCellSpec, alpha: C64, speeds: &[C64], delta: f64) -> Result<BandSample> {
    if cell.gamma != 0.0 {
        return Err(Error::Precondition("complex-material bands need γ = 0".into()));
    }
    let k = cell.len();
    if speeds.len() != k {
        return Err(Error::Validation(format!("{} speeds for a cell of {k}", speeds.len())));
    }
    let c = build_quasiperiodic_capacitance(cell, alpha);
    let mut m: CMatrix = c.into_matrix();
    for i in 0..k {
        let d = delta * speeds[i] * speeds[i] / cell.lengths[i];
        for j in 0..k {
            m[[i, j]] *= d;
        }
    }
    let mut lambdas = linalg::eigvals(&m)?;
    lambdas.sort_by(linalg::cmp_re_im);
    let omegas = lambdas.iter().map(|&l| linalg::sqrt_positive_re(l)).collect();
    Ok(BandSample { alpha, lambdas, omegas })
}

pub fn material_vorticity(cell: &UnitCellSpec, speeds: &[C64], delta: f64, samples: usize) -> Result<Vorticity> {
    band_difference_winding(
        |a| Ok(material_band_eigs(cell, C64::from(a), speeds, delta)?.omegas),
        cell.zone_edge(),
        samples,
    )
}

/// Real-α sweep over `[-π/L, π/L]` with continuity-tracked labels.
pub fn band_sweep(cell: &UnitCellSpec, samples: usize) -> Result<Vec<BandSample>> {
    if samples < 2 {
        return Err(Error::Validation("band sweep needs at least 2 samples".into()));
    }
    let edge = cell.zone_edge();
    let mut out: Vec<BandSample> = (0..samples)
        .map(|k| {
            let a = C64::from(-edge + 2.0 * edge * k as f64 / (samples - 1) as f64);
            match &cell.speeds {
                Some(v) => material_band_eigs(cell, a, v, cell.delta),
                None => Ok(BandSample::from_lambdas(a, dense_cell_lambdas(cell, a)?, cell.delta, cell.v_b)),
            }
        })
        .collect::<Result<_>>()?;
    track_bands(&mut out);
    Ok(out)
}
