//! Tridiagonal Toeplitz matrices `T_N(a,b,c)` (`a` below, `b` on, `c` above
//! the diagonal), the perturbed form `T̃_N` whose corner entries are
//! `b + a` and `b + c`, their closed-form eigenpairs, symbols and winding
//! numbers.

use std::f64::consts::PI;

use crate::capmat::g;
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, C64};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TridiagonalSymbol {
    /// Subdiagonal, coefficient of `z`.
    pub a: C64,
    /// Diagonal.
    pub b: C64,
    /// Superdiagonal, coefficient of `z⁻¹`.
    pub c: C64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpectrumClass {
    Essential,
    Winding(i64),
    Resolvent,
}

impl TridiagonalSymbol {
    pub fn new(a: C64, b: C64, c: C64) -> Self {
        TridiagonalSymbol { a, b, c }
    }

    pub fn real(a: f64, b: f64, c: f64) -> Self {
        TridiagonalSymbol { a: a.into(), b: b.into(), c: c.into() }
    }

    /// Symbol of the uniform gauge capacitance matrix: `C^γ = T̃_N(a,b,c)`.
    pub fn gauge_capacitance(gamma: f64, ell: f64, s: f64) -> Self {
        let x = gamma * ell;
        let a = -g(-x) / s;
        let c = -g(x) / s;
        TridiagonalSymbol::real(a, -(a + c), c)
    }

    pub fn eval(&self, z: C64) -> C64 {
        self.b + self.a * z + self.c / z
    }

    pub fn sqrt_ac(&self) -> C64 {
        (self.a * self.c).sqrt()
    }

    fn scale(&self) -> f64 {
        self.a.norm().max(self.b.norm()).max(self.c.norm())
    }

    pub fn toeplitz_matrix(&self, n: usize) -> CMatrix {
        let mut m = CMatrix::zeros((n, n));
        for i in 0..n {
            m[[i, i]] = self.b;
            if i + 1 < n {
                m[[i + 1, i]] = self.a;
                m[[i, i + 1]] = self.c;
            }
        }
        m
    }

    pub fn perturbed_matrix(&self, n: usize) -> CMatrix {
        let mut m = self.toeplitz_matrix(n);
        m[[0, 0]] += self.a;
        m[[n - 1, n - 1]] += self.c;
        m
    }

    /// True when `c√(a/c)` is the negative of the principal `√(ac)`, in which
    /// case the closed-form eigenvectors pair with the mirrored index.
    fn mirrored(&self) -> bool {
        let s = self.c * (self.a / self.c).sqrt();
        let p = self.sqrt_ac();
        (s + p).norm() < (s - p).norm()
    }
}

/// `λ_k = b + 2√(ac) cos(kπ/(N+1))`, `k = 1..N`.
pub fn toeplitz_eigenvalues(sym: &TridiagonalSymbol, n: usize) -> Vec<C64> {
    let r = sym.sqrt_ac();
    (1..=n)
        .map(|k| sym.b + 2.0 * r * (k as f64 * PI / (n as f64 + 1.0)).cos())
        .collect()
}

/// Closed-form eigenpairs of `T_N(a,b,c)` in the index order of
/// [`toeplitz_eigenvalues`]; eigenvector entries `(a/c)^{i/2} sin(ikπ/(N+1))`.
pub fn toeplitz_eigenpairs(sym: &TridiagonalSymbol, n: usize) -> Result<Vec<(C64, Vec<C64>)>> {
    if n == 0 {
        return Err(Error::Precondition("N must be at least 1".into()));
    }
    if sym.a.norm() == 0.0 || sym.c.norm() == 0.0 {
        return Err(Error::Precondition("eigenvectors need a·c ≠ 0".into()));
    }
    let r = (sym.a / sym.c).sqrt();
    let flip = sym.mirrored();
    let h = PI / (n as f64 + 1.0);
    Ok(toeplitz_eigenvalues(sym, n)
        .into_iter()
        .enumerate()
        .map(|(idx, lam)| {
            let k = idx + 1;
            let kv = if flip { n + 1 - k } else { k };
            let v = (1..=n)
                .map(|i| r.powi(i as i32) * (i as f64 * kv as f64 * h).sin())
                .collect();
            (lam, v)
        })
        .collect())
}

/// `μ_1 = 0`, `μ_k = b + 2√(ac) cos(π(k-1)/N)` for `k = 2..N`.
pub fn perturbed_toeplitz_eigenvalues(sym: &TridiagonalSymbol, n: usize) -> Vec<C64> {
    let r = sym.sqrt_ac();
    let mut out = vec![C64::new(0.0, 0.0)];
    out.extend((2..=n).map(|k| sym.b + 2.0 * r * (PI * (k as f64 - 1.0) / n as f64).cos()));
    out
}

/// Closed-form eigenpairs of `T̃_N(a,b,c)`, requiring `ac ≠ 0` and
/// `a + b + c = 0`. The first pair is `(0, 𝟙)`.
pub fn perturbed_toeplitz_eigenpairs(sym: &TridiagonalSymbol, n: usize) -> Result<Vec<(C64, Vec<C64>)>> {
    if n == 0 {
        return Err(Error::Precondition("N must be at least 1".into()));
    }
    if sym.a.norm() == 0.0 || sym.c.norm() == 0.0 {
        return Err(Error::Precondition("a·c must be non-zero".into()));
    }
    if (sym.a + sym.b + sym.c).norm() > 1e-12 * sym.scale() {
        return Err(Error::Precondition(format!(
            "a + b + c = {} is not zero",
            sym.a + sym.b + sym.c
        )));
    }
    let r = (sym.a / sym.c).sqrt();
    let flip = sym.mirrored();
    let nf = n as f64;
    let mut out = Vec::with_capacity(n);
    for (idx, mu) in perturbed_toeplitz_eigenvalues(sym, n).into_iter().enumerate() {
        let k = idx + 1;
        if k == 1 {
            out.push((mu, vec![C64::new(1.0, 0.0); n]));
            continue;
        }
        let kv = if flip { n + 2 - k } else { k };
        let phi = (kv as f64 - 1.0) * PI / nf;
        let v = (1..=n)
            .map(|j| {
                let jf = j as f64;
                r.powi(j as i32 - 1) * (sym.a * (jf * phi).sin() - sym.a * r * ((jf - 1.0) * phi).sin())
            })
            .collect();
        out.push((mu, v));
    }
    Ok(out)
}

/// `f(e^{iθ_m})` at `θ_m = 2πm/M`.
pub fn symbol_curve(sym: &TridiagonalSymbol, m: usize) -> Result<Vec<C64>> {
    if m < 8 {
        return Err(Error::Precondition(format!("symbol curve needs M >= 8, got {m}")));
    }
    Ok((0..m)
        .map(|k| sym.eval(C64::from_polar(1.0, 2.0 * PI * k as f64 / m as f64)))
        .collect())
}

fn segment_distance(p: C64, q: C64, z: C64) -> f64 {
    let d = q - p;
    let len2 = d.norm_sqr();
    if len2 == 0.0 {
        return (z - p).norm();
    }
    let t = (((z - p) * d.conj()).re / len2).clamp(0.0, 1.0);
    (p + d * t - z).norm()
}

/// Distance from `z` to the closed polyline through `pts`.
pub fn polyline_distance(pts: &[C64], z: C64, closed: bool) -> f64 {
    let n = pts.len();
    if n == 1 {
        return (pts[0] - z).norm();
    }
    let segs = if closed { n } else { n - 1 };
    (0..segs)
        .map(|i| segment_distance(pts[i], pts[(i + 1) % n], z))
        .fold(f64::INFINITY, f64::min)
}

fn diameter(pts: &[C64]) -> f64 {
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for p in pts {
        x0 = x0.min(p.re);
        x1 = x1.max(p.re);
        y0 = y0.min(p.im);
        y1 = y1.max(p.im);
    }
    ((x1 - x0).powi(2) + (y1 - y0).powi(2)).sqrt()
}

/// Winding number of the closed polyline `curve` around `lam`.
pub fn winding_number(curve: &[C64], lam: C64) -> Result<i64> {
    if curve.is_empty() {
        return Err(Error::Validation("empty curve".into()));
    }
    let dist = polyline_distance(curve, lam, true);
    if dist <= 1e-9 * diameter(curve).max(f64::MIN_POSITIVE) {
        return Err(Error::OnEssentialSpectrum { distance: dist });
    }
    let n = curve.len();
    let mut total = 0.0;
    for i in 0..n {
        let w0 = curve[i] - lam;
        let w1 = curve[(i + 1) % n] - lam;
        total += (w1 / w0).arg();
    }
    Ok((total / (2.0 * PI)).round() as i64)
}

/// Distance from `lam` to the smooth symbol curve `f(S¹)`: dense sampling
/// followed by golden-section refinement around the best sample.
pub fn symbol_distance(sym: &TridiagonalSymbol, lam: C64) -> f64 {
    let m = 4096;
    let h = 2.0 * PI / m as f64;
    let d = |t: f64| (sym.eval(C64::from_polar(1.0, t)) - lam).norm();
    let best = (0..m).min_by(|&i, &j| d(i as f64 * h).total_cmp(&d(j as f64 * h))).unwrap();
    let (mut lo, mut hi) = ((best as f64 - 1.0) * h, (best as f64 + 1.0) * h);
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..80 {
        let x1 = hi - phi * (hi - lo);
        let x2 = lo + phi * (hi - lo);
        if d(x1) < d(x2) {
            hi = x2;
        } else {
            lo = x1;
        }
    }
    d(0.5 * (lo + hi)).min(d(best as f64 * h))
}

/// Winding number of the symbol curve around `lam`, doubling the sample
/// count from 64 until the value is unchanged on two successive doublings.
pub fn symbol_winding(sym: &TridiagonalSymbol, lam: C64) -> Result<i64> {
    let curve = symbol_curve(sym, 64)?;
    let dist = symbol_distance(sym, lam);
    if dist <= 1e-9 * diameter(&curve).max(sym.scale() * 1e-300) {
        return Err(Error::OnEssentialSpectrum { distance: dist });
    }
    let mut m = 64;
    let mut last = None;
    let mut stable = 0;
    loop {
        let w = match winding_number(&symbol_curve(sym, m)?, lam) {
            Ok(w) => Some(w),
            Err(Error::OnEssentialSpectrum { .. }) => None,
            Err(e) => return Err(e),
        };
        if let Some(v) = w.filter(|_| w == last) {
            stable += 1;
            if stable == 2 {
                return Ok(v);
            }
        } else {
            stable = 0;
        }
        last = w;
        m *= 2;
        if m > 1 << 22 {
            return Err(Error::OnEssentialSpectrum { distance: dist });
        }
    }
}

/// Essential spectrum, winding region or resolvent set of the semi-infinite
/// Toeplitz operator with symbol `sym`.
pub fn operator_spectrum_classify(sym: &TridiagonalSymbol, lam: C64) -> SpectrumClass {
    match symbol_winding(sym, lam) {
        Err(_) => SpectrumClass::Essential,
        Ok(0) => SpectrumClass::Resolvent,
        Ok(n) => SpectrumClass::Winding(n),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecayReport {
    /// `max_i |a_i| e^{γℓ(i-1)/2}`.
    pub kappa_hat: f64,
    /// `(1 + e^{γℓ/2})²`.
    pub bound: f64,
    pub pass: bool,
    /// Constant vector: the kernel mode, which does not decay.
    pub kernel_mode: bool,
}

/// Checks `|a_i| ≤ κ e^{-γℓ(i-1)/2}` with `κ ≤ (1+e^{γℓ/2})²` for
/// ∞-normalised vectors.
pub fn decay_bound_check(vectors: &[Vec<C64>], gamma: f64, ell: f64) -> Result<Vec<DecayReport>> {
    let x = gamma * ell;
    if x.is_nan() || x <= 0.0 {
        return Err(Error::Precondition("decay check needs γℓ > 0".into()));
    }
    let bound = (1.0 + (x / 2.0).exp()).powi(2);
    Ok(vectors
        .iter()
        .map(|v| {
            let kappa_hat = v
                .iter()
                .enumerate()
                .map(|(i, z)| z.norm() * (x * i as f64 / 2.0).exp())
                .fold(0.0, f64::max);
            let m = linalg::norm_inf(v);
            let kernel_mode = m > 0.0 && v.iter().all(|z| (z - v[0]).norm() <= 1e-8 * m);
            DecayReport { kappa_hat, bound, pass: !kernel_mode && kappa_hat <= bound, kernel_mode }
        })
        .collect())
}

#[derive(Debug, Clone)]
pub struct CorrespondenceReport {
    /// `(k, i)`: eigenvalue `μ_k` of `T̃_N` matched to `λ_i` of `T_N`
    /// (1-based); `μ_1 = 0` is left out.
    pub matches: Vec<(usize, usize)>,
    pub max_eigenvalue_gap: f64,
    /// Largest phase-aligned distance between unit-2-norm eigenvectors.
    pub max_vector_distance: f64,
}

fn unit_distance(u: &[C64], v: &[C64]) -> f64 {
    let nu = linalg::norm2(u);
    let nv = linalg::norm2(v);
    let ip: C64 = u.iter().zip(v).map(|(x, y)| x.conj() * y).sum();
    (2.0 - 2.0 * (ip.norm() / (nu * nv)).min(1.0)).max(0.0).sqrt()
}

/// Greedily pairs each `μ_k` (k ≥ 2) with the nearest unused `λ_i`.
pub fn eigenpair_correspondence(sym: &TridiagonalSymbol, n: usize) -> Result<CorrespondenceReport> {
    let pert = perturbed_toeplitz_eigenpairs(sym, n)?;
    let plain = toeplitz_eigenpairs(sym, n)?;
    let mut used = vec![false; n];
    let mut matches = Vec::new();
    let mut gap = 0.0f64;
    let mut vdist = 0.0f64;
    for (k, (mu, v)) in pert.iter().enumerate().skip(1) {
        let i = (0..n)
            .filter(|&i| !used[i])
            .min_by(|&x, &y| (plain[x].0 - mu).norm().total_cmp(&(plain[y].0 - mu).norm()))
            .expect("at most N-1 values are matched");
        used[i] = true;
        gap = gap.max((plain[i].0 - mu).norm());
        vdist = vdist.max(unit_distance(v, &plain[i].1));
        matches.push((k + 1, i + 1));
    }
    Ok(CorrespondenceReport { matches, max_eigenvalue_gap: gap, max_vector_distance: vdist })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn skin() -> TridiagonalSymbol {
        TridiagonalSymbol::gauge_capacitance(1.0, 1.0, 1.0)
    }

    fn sorted_re(mut v: Vec<C64>) -> Vec<f64> {
        v.sort_by(linalg::cmp_re_im);
        v.into_iter().map(|z| z.re).collect()
    }

    #[test]
    fn skin_symbol_values() {
        let s = skin();
        assert_abs_diff_eq!(s.a.re, -0.5819767068693265, epsilon = 1e-15);
        assert_abs_diff_eq!(s.b.re, 2.163953413738653, epsilon = 1e-15);
        assert_abs_diff_eq!(s.c.re, -1.5819767068693265, epsilon = 1e-15);
        assert_abs_diff_eq!(s.b.re, 1.0 / (0.5f64).tanh(), epsilon = 1e-14);
        assert_abs_diff_eq!(s.sqrt_ac().re, 0.9595173756674719, epsilon = 1e-15);
    }

    #[test]
    fn small_toeplitz_spectra() {
        let e = toeplitz_eigenvalues(&TridiagonalSymbol::real(1.0, 5.0, 1.0), 1);
        assert_abs_diff_eq!(e[0].re, 5.0, epsilon = 1e-15);
        let e = sorted_re(toeplitz_eigenvalues(&TridiagonalSymbol::real(1.0, 0.0, 1.0), 2));
        assert_abs_diff_eq!(e[0], -1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(e[1], 1.0, epsilon = 1e-15);
    }

    #[test]
    fn perturbed_small_cases() {
        let s = skin();
        let e = sorted_re(perturbed_toeplitz_eigenvalues(&s, 2));
        assert_abs_diff_eq!(e[0], 0.0);
        assert_abs_diff_eq!(e[1], s.b.re, epsilon = 1e-15);
        let e = sorted_re(perturbed_toeplitz_eigenvalues(&s, 3));
        assert_abs_diff_eq!(e[1], 1.2044360380711803, epsilon = 1e-14);
        assert_abs_diff_eq!(e[2], 3.123470789406122, epsilon = 1e-14);
    }

    fn max_residual(m: &CMatrix, pairs: &[(C64, Vec<C64>)]) -> f64 {
        pairs
            .iter()
            .map(|(l, v)| {
                let mv = linalg::mat_vec(m, v);
                let r: Vec<C64> = mv.iter().zip(v).map(|(x, y)| x - l * y).collect();
                linalg::norm2(&r) / linalg::norm2(v)
            })
            .fold(0.0, f64::max)
    }

    #[test]
    fn closed_form_vectors_are_eigenvectors() {
        for sym in [skin(), TridiagonalSymbol::real(0.7, -0.2, 1.9), TridiagonalSymbol::new(C64::new(0.3, 1.0), C64::new(0.0, 0.5), C64::new(-1.0, 0.2))] {
            for n in [1, 2, 5, 12] {
                let p = toeplitz_eigenpairs(&sym, n).unwrap();
                assert!(max_residual(&sym.toeplitz_matrix(n), &p) < 1e-12);
            }
        }
        for n in [2, 3, 7, 20] {
            let p = perturbed_toeplitz_eigenpairs(&skin(), n).unwrap();
            assert!(max_residual(&skin().perturbed_matrix(n), &p) < 1e-12);
        }
    }

    #[test]
    fn perturbed_needs_zero_row_sum() {
        assert!(perturbed_toeplitz_eigenpairs(&TridiagonalSymbol::real(1.0, 1.0, 1.0), 4).is_err());
        assert!(toeplitz_eigenpairs(&TridiagonalSymbol::real(0.0, 1.0, 1.0), 4).is_err());
    }

    #[test]
    fn curves() {
        let c = symbol_curve(&TridiagonalSymbol::real(1.0, 0.0, 0.0), 8).unwrap();
        let want = [C64::new(1.0, 0.0), C64::new(0.0, 1.0), C64::new(-1.0, 0.0), C64::new(0.0, -1.0)];
        for (k, w) in want.iter().enumerate() {
            assert!((c[2 * k] - w).norm() < 1e-15);
        }
        let c = symbol_curve(&TridiagonalSymbol::real(0.0, 7.0, 0.0), 9).unwrap();
        assert!(c.iter().all(|z| *z == C64::new(7.0, 0.0)));
        let c = symbol_curve(&TridiagonalSymbol::real(1.0, 0.0, 1.0), 8).unwrap();
        assert!((c[0] - 2.0).norm() < 1e-15 && c[2].norm() < 1e-15 && (c[4] + 2.0).norm() < 1e-15);
        assert!(symbol_curve(&skin(), 4).is_err());
    }

    #[test]
    fn windings() {
        let circle = symbol_curve(&TridiagonalSymbol::real(1.0, 0.0, 0.0), 64).unwrap();
        assert_eq!(winding_number(&circle, C64::new(0.0, 0.0)).unwrap(), 1);
        assert_eq!(winding_number(&circle, C64::new(2.0, 0.0)).unwrap(), 0);
        assert!(winding_number(&circle, C64::new(1.0, 0.0)).is_err());
        let s = skin();
        assert_eq!(symbol_winding(&s, s.b).unwrap(), -1);
    }

    #[test]
    fn classification() {
        let seg = TridiagonalSymbol::real(1.0, 0.0, 1.0);
        assert_eq!(operator_spectrum_classify(&seg, C64::new(1.5, 0.0)), SpectrumClass::Essential);
        assert_eq!(operator_spectrum_classify(&seg, C64::new(1.0, 1.0)), SpectrumClass::Resolvent);
        let s = skin();
        assert_eq!(operator_spectrum_classify(&s, s.b), SpectrumClass::Winding(-1));
        assert_eq!(operator_spectrum_classify(&s, C64::new(0.0, 0.0)), SpectrumClass::Essential);
    }

    #[test]
    fn decay_on_three_sites() {
        let pairs = perturbed_toeplitz_eigenpairs(&skin(), 3).unwrap();
        let vs: Vec<Vec<C64>> = pairs
            .into_iter()
            .map(|(_, mut v)| {
                crate::capmat::normalize_inf(&mut v);
                v
            })
            .collect();
        let r = decay_bound_check(&vs, 1.0, 1.0).unwrap();
        assert_abs_diff_eq!(r[0].bound, 7.015724369859302, epsilon = 1e-12);
        assert!(r[0].kernel_mode && !r[0].pass);
        assert_abs_diff_eq!(r[0].kappa_hat, 1f64.exp(), epsilon = 1e-12);
        assert!(r[1].pass && r[2].pass);
    }

    #[test]
    fn decay_large_gauge() {
        let sym = TridiagonalSymbol::gauge_capacitance(5.0, 1.0, 1.0);
        let pairs = perturbed_toeplitz_eigenpairs(&sym, 10).unwrap();
        for (_, mut v) in pairs.into_iter().skip(1) {
            crate::capmat::normalize_inf(&mut v);
            let r = decay_bound_check(std::slice::from_ref(&v), 5.0, 1.0).unwrap();
            assert!(r[0].pass);
            assert_eq!(v[0], C64::new(1.0, 0.0));
            assert!(v[1].norm() < 0.2 && v[3].norm() < 1e-2);
        }
    }

    #[test]
    fn correspondence_improves() {
        let r10 = eigenpair_correspondence(&skin(), 10).unwrap();
        let r40 = eigenpair_correspondence(&skin(), 40).unwrap();
        assert!(r40.max_eigenvalue_gap < r10.max_eigenvalue_gap);
        let r2 = eigenpair_correspondence(&skin(), 2).unwrap();
        assert_eq!(r2.matches.len(), 1);
        assert!(r10.matches.iter().all(|&(k, _)| k >= 2));
    }
}
