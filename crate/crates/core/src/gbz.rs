//! Generalised Brillouin zones, quasiperiodicity recovery from finite-chain
//! frequencies, and convergence of finite spectra to the GBZ bands.

use argmin::core::{CostFunction, Executor, State};
use argmin::solver::neldermead::NelderMead;
use rayon::prelude::*;

use crate::bands::cell_lambdas;
use crate::bands::cell_omegas;
use crate::capmat::chain_spectrum_auto;
use crate::error::{Error, Result};
use crate::geometry::{ChainSpec, UnitCellSpec};
use crate::linalg::C64;
use crate::spectral::{hausdorff_distance, Window};
use crate::toeplitz::polyline_distance;

/// Relative tolerance on `Im λ` for a GBZ point.
pub const TOL_REAL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GBZPoint {
    pub alpha: f64,
    pub beta: f64,
    pub lambda: f64,
    /// 0-based band label (bands sorted by (Re, Im)).
    pub band_index: usize,
}

#[derive(Debug, Clone, Default)]
pub struct GbzCurve {
    pub points: Vec<GBZPoint>,
    /// α samples where no admissible β was found.
    pub missing: Vec<f64>,
}

fn band_at(cell: &UnitCellSpec, band: usize, alpha: C64) -> Result<C64> {
    let v = cell_lambdas(cell, alpha)?;
    v.get(band)
        .copied()
        .ok_or_else(|| Error::Validation(format!("band {band} out of range for a cell of {}", v.len())))
}

fn find_sign_change(f: &impl Fn(f64) -> f64, lo: f64, hi: f64) -> Option<(f64, f64)> {
    let (flo, fhi) = (f(lo), f(hi));
    if flo == 0.0 {
        return Some((lo, lo));
    }
    if flo.signum() != fhi.signum() {
        return Some((lo, hi));
    }
    let m = 64;
    let mut x0 = lo;
    let mut f0 = flo;
    for k in 1..=m {
        let x1 = lo + (hi - lo) * k as f64 / m as f64;
        let f1 = f(x1);
        if f1 == 0.0 || f0.signum() != f1.signum() {
            return Some((x0, x1));
        }
        x0 = x1;
        f0 = f1;
    }
    None
}

fn bisect(f: &impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let mut flo = f(lo);
    if flo == 0.0 {
        return lo;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// `β(α)` for one real `α` and band, or `None` when no admissible root
/// exists in `[-2h, 2h]`, `h = max(|γ| ℓ_max, 1e-6)`.
pub fn gbz_beta(cell: &UnitCellSpec, band: usize, alpha: f64) -> Result<Option<GBZPoint>> {
    let lmax = cell.lengths.iter().cloned().fold(0.0, f64::max);
    let h = (cell.gamma.abs() * lmax).max(1e-6);
    let im_at = |a: f64, b: f64| band_at(cell, band, C64::new(a, b)).map(|z| z.im).unwrap_or(f64::NAN);

    // Where Im λ vanishes for every β (e.g. α = 0 or π/L), take the
    // one-sided limit from the interior of the zone.
    let probe: Vec<f64> = (0..=8).map(|k| -h + 2.0 * h * k as f64 / 8.0).collect();
    let scale = probe
        .iter()
        .map(|&b| band_at(cell, band, C64::new(alpha, b)).map(|z| z.norm()).unwrap_or(0.0))
        .fold(0.0, f64::max);
    let flat = probe.iter().all(|&b| im_at(alpha, b).abs() <= 1e-12 * (1.0 + scale));
    let eta = 1e-6 * 2.0 * cell.zone_edge();
    let a_eval = if !flat { alpha } else if alpha > 0.0 { alpha - eta } else { alpha + eta };
    let f = |b: f64| im_at(a_eval, b);

    let bracket = find_sign_change(&f, -h, h).or_else(|| find_sign_change(&f, -2.0 * h, 2.0 * h));
    let Some((lo, hi)) = bracket else { return Ok(None) };
    let beta = if lo == hi { lo } else { bisect(&f, lo, hi) };
    let lam = band_at(cell, band, C64::new(alpha, beta))?;
    if lam.im.abs() > TOL_REAL * lam.norm() || lam.re.is_nan() || lam.re <= 0.0 {
        return Ok(None);
    }
    Ok(Some(GBZPoint { alpha, beta, lambda: lam.re, band_index: band }))
}

/// Samples `α_m = -π/L + 2π(m+1)/(LM)`, `m = 0..M-1`, covering `(-π/L, π/L]`.
pub fn zone_samples(cell: &UnitCellSpec, m: usize) -> Vec<f64> {
    let e = cell.zone_edge();
    (0..m).map(|k| -e + 2.0 * e * (k + 1) as f64 / m as f64).collect()
}

pub fn gbz_curve(cell: &UnitCellSpec, band_index: usize, alpha_samples: usize) -> Result<GbzCurve> {
    if alpha_samples < 16 {
        return Err(Error::Validation(format!("need at least 16 α samples, got {alpha_samples}")));
    }
    if band_index >= cell.len() {
        return Err(Error::Validation(format!("band {band_index} out of range for a cell of {}", cell.len())));
    }
    let alphas = zone_samples(cell, alpha_samples);
    let found: Vec<Option<GBZPoint>> = alphas
        .par_iter()
        .map(|&a| gbz_beta(cell, band_index, a))
        .collect::<Result<_>>()?;
    let mut curve = GbzCurve::default();
    for (a, p) in alphas.into_iter().zip(found) {
        match p {
            Some(p) => curve.points.push(p),
            None => curve.missing.push(a),
        }
    }
    Ok(curve)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecoveredQuasiperiodicity {
    pub mode_index: usize,
    pub omega: C64,
    pub alpha_hat: C64,
    /// `min_j |ω - ω_j^{α̂}|`.
    pub residual: f64,
    /// `-conj(α̂)` when it attains the same residual within 1e-12.
    pub mirror: Option<C64>,
    /// The local refinement left the search window and was clamped.
    pub clipped: bool,
}

/// Default search window: `[-π/L, π/L] × [-(|γ|ℓ_max + 0.5), |γ|ℓ_max + 0.5]`.
pub fn default_window(cell: &UnitCellSpec) -> Window {
    let e = cell.zone_edge();
    let lmax = cell.lengths.iter().cloned().fold(0.0, f64::max);
    let h = cell.gamma.abs() * lmax + 0.5;
    Window { re_min: -e, re_max: e, im_min: -h, im_max: h }
}

struct Objective<'a> {
    f: &'a (dyn Fn(C64) -> f64 + Sync),
}

impl CostFunction for Objective<'_> {
    type Param = Vec<f64>;
    type Output = f64;

    fn cost(&self, p: &Self::Param) -> std::result::Result<f64, argmin::core::Error> {
        Ok((self.f)(C64::new(p[0], p[1])))
    }
}

fn nelder_mead(f: &(dyn Fn(C64) -> f64 + Sync), start: C64, step: (f64, f64)) -> Result<(C64, f64)> {
    let simplex = vec![
        vec![start.re, start.im],
        vec![start.re + step.0, start.im],
        vec![start.re, start.im + step.1],
    ];
    let solver = NelderMead::new(simplex)
        .with_sd_tolerance(1e-15)
        .map_err(|e| Error::Eigen(e.to_string()))?;
    let res = Executor::new(Objective { f }, solver)
        .configure(|s| s.max_iters(4000))
        .run()
        .map_err(|e| Error::Eigen(e.to_string()))?;
    let p = res
        .state()
        .get_best_param()
        .cloned()
        .unwrap_or_else(|| vec![start.re, start.im]);
    Ok((C64::new(p[0], p[1]), res.state().get_best_cost()))
}

/// `α̂ = argmin_α min_j |ω - ω_j^α|` over `window`: a 64×64 grid search
/// followed by Nelder–Mead refinement.
pub fn recover_quasiperiodicity(
    omega: C64,
    sheets: &(dyn Fn(C64) -> Result<Vec<C64>> + Sync),
    window: Window,
) -> Result<RecoveredQuasiperiodicity> {
    let f = |a: C64| match sheets(a) {
        Ok(v) => v.iter().map(|w| (omega - w).norm()).fold(f64::INFINITY, f64::min),
        Err(_) => f64::INFINITY,
    };
    let n = 64;
    let dx = (window.re_max - window.re_min) / (n - 1) as f64;
    let dy = (window.im_max - window.im_min) / (n - 1) as f64;
    let mut best = (f64::INFINITY, C64::new(window.re_min, window.im_min));
    for j in 0..n {
        for i in 0..n {
            let a = C64::new(window.re_min + dx * i as f64, window.im_min + dy * j as f64);
            let v = f(a);
            if v < best.0 {
                best = (v, a);
            }
        }
    }
    let (mut a, mut r) = nelder_mead(&f, best.1, (dx, dy))?;
    let (a2, r2) = nelder_mead(&f, a, (dx * 1e-3, dy * 1e-3))?;
    if r2 <= r {
        (a, r) = (a2, r2);
    }
    let mut clipped = false;
    if !window.contains(a) {
        clipped = true;
        a = window.clamp(a);
        r = f(a);
    }
    if best.0 < r {
        (a, r) = (best.1, best.0);
    }
    let m = -a.conj();
    let rm = f(m);
    let mut mirror = None;
    if (rm - r).abs() <= 1e-12 && m != a {
        mirror = Some(m);
        if a.re < 0.0 {
            mirror = Some(a);
            a = m;
            r = rm;
        }
    }
    Ok(RecoveredQuasiperiodicity { mode_index: 0, omega, alpha_hat: a, residual: r, mirror, clipped })
}

/// Recovers `α̂_j` for every non-kernel mode of `chain`, using the band
/// sheets of `cell` evaluated with the chain's `δ` and `v_b`.
pub fn recover_modes(
    chain: &ChainSpec,
    cell: &UnitCellSpec,
    window: Option<Window>,
) -> Result<Vec<RecoveredQuasiperiodicity>> {
    if chain.speeds.is_some() != cell.speeds.is_some() {
        return Err(Error::Validation("chain and cell must both give speeds or neither".into()));
    }
    let mut cell = cell.clone();
    cell.delta = chain.delta;
    cell.v_b = chain.v_b;
    let window = window.unwrap_or_else(|| default_window(&cell));
    let spec = chain_spectrum_auto(chain)?;
    let top = spec.eigenvalues.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let modes: Vec<(usize, C64)> = spec
        .eigenvalues
        .iter()
        .zip(&spec.omegas)
        .enumerate()
        .filter(|(_, (l, _))| l.norm() > 1e-9 * top)
        .map(|(k, (_, w))| (k, *w))
        .collect();
    let sheets = |a: C64| cell_omegas(&cell, a);
    modes
        .par_iter()
        .map(|&(k, w)| {
            let mut r = recover_quasiperiodicity(w, &sheets, window)?;
            r.mode_index = k;
            Ok(r)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceRow {
    pub cells: usize,
    pub resonators: usize,
    /// `max_k dist(λ_k, GBZ band polylines)` over non-zero eigenvalues.
    pub max_distance: f64,
    /// Two-sided Hausdorff distance between the finite spectrum and the
    /// sampled GBZ bands.
    pub hausdorff: f64,
}

/// Number of α samples per band used for the GBZ polylines.
pub const CONVERGENCE_SAMPLES: usize = 1024;

pub fn convergence_study(cell: &UnitCellSpec, sizes: &[usize]) -> Result<Vec<ConvergenceRow>> {
    if sizes.is_empty() || sizes[0] == 0 || sizes.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Validation("sizes must be positive and strictly increasing".into()));
    }
    let mut bands: Vec<Vec<C64>> = Vec::new();
    for b in 0..cell.len() {
        let curve = gbz_curve(cell, b, CONVERGENCE_SAMPLES)?;
        bands.push(curve.points.iter().map(|p| C64::from(p.lambda)).collect());
    }
    let all: Vec<C64> = bands.iter().flatten().copied().collect();
    if all.is_empty() {
        return Err(Error::Eigen("generalised Brillouin zone is empty".into()));
    }
    sizes
        .iter()
        .map(|&n| {
            let chain = cell.repeat(n)?;
            let mut plain = chain.clone();
            plain.speeds = None;
            let spec = chain_spectrum_auto(&plain)?;
            let top = spec.eigenvalues.iter().map(|z| z.norm()).fold(0.0, f64::max);
            let ev: Vec<C64> = spec.eigenvalues.into_iter().filter(|z| z.norm() > 1e-9 * top).collect();
            let max_distance = ev
                .iter()
                .map(|&z| {
                    bands
                        .iter()
                        .filter(|b| !b.is_empty())
                        .map(|b| polyline_distance(b, z, false))
                        .fold(f64::INFINITY, f64::min)
                })
                .fold(0.0, f64::max);
            let hausdorff = if ev.is_empty() { f64::NAN } else { hausdorff_distance(&ev, &all)? };
            Ok(ConvergenceRow { cells: n, resonators: chain.len(), max_distance, hausdorff })
        })
        .collect()
}
