//! Dense complex linear algebra used across the crate.
//!
//! Eigenpairs and singular values come from LAPACK (through `ndarray-linalg`).
//! Gauge capacitance matrices are extremely non-normal: their eigenvector
//! condition numbers grow like `e^{γℓN/2}`. LAPACK's own balancing does not
//! undo the imaginary gauge, so [`eig`] applies an explicit diagonal
//! similarity first and maps the eigenvectors back afterwards.

use ndarray::{Array1, Array2};
use ndarray_linalg::{Eig, SVD};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = Array2<C64>;

pub const I: C64 = C64::new(0.0, 1.0);

/// Diagonal similarity `B = F⁻¹ A F` chosen so that `|B_ij| ≈ |B_ji|`.
///
/// The scaling is seeded along the first off-diagonals (exact for
/// tridiagonal matrices) and then polished with Parlett–Reinsch sweeps on
/// off-diagonal 2-norms, which also handles the corner entries of
/// quasiperiodic matrices.
pub fn balance(a: &CMatrix) -> (CMatrix, Vec<f64>) {
    let n = a.nrows();
    let mut log_f = vec![0.0f64; n];
    for i in 0..n.saturating_sub(1) {
        let up = a[[i, i + 1]].norm();
        let lo = a[[i + 1, i]].norm();
        log_f[i + 1] = if up > 0.0 && lo > 0.0 {
            log_f[i] + 0.5 * (lo.ln() - up.ln())
        } else {
            log_f[i]
        };
    }
    let mean = log_f.iter().sum::<f64>() / n.max(1) as f64;
    let mut f: Vec<f64> = log_f.iter().map(|l| (l - mean).exp()).collect();

    let mut b = a.clone();
    for i in 0..n {
        for j in 0..n {
            b[[i, j]] *= f[j] / f[i];
        }
    }

    for _sweep in 0..200 {
        let mut worst = 0.0f64;
        for i in 0..n {
            let mut r = 0.0;
            let mut c = 0.0;
            for j in 0..n {
                if j != i {
                    r += b[[i, j]].norm_sqr();
                    c += b[[j, i]].norm_sqr();
                }
            }
            if r == 0.0 || c == 0.0 {
                continue;
            }
            let g = (r / c).sqrt().sqrt();
            if (g.ln()).abs() > 1e-6 {
                worst = worst.max(g.ln().abs());
                for j in 0..n {
                    b[[i, j]] /= g;
                    b[[j, i]] *= g;
                }
                f[i] *= g;
            }
        }
        if worst < 1e-3 {
            break;
        }
    }
    (b, f)
}

/// Right eigenpairs of a general complex matrix. Eigenvectors are the
/// columns of the returned matrix, unnormalised.
pub fn eig(a: &CMatrix) -> Result<(Vec<C64>, CMatrix)> {
    let n = a.nrows();
    if n != a.ncols() {
        return Err(Error::Eigen(format!("matrix is {}x{}", n, a.ncols())));
    }
    if n == 1 {
        return Ok((vec![a[[0, 0]]], Array2::from_elem((1, 1), C64::new(1.0, 0.0))));
    }
    if a.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Eigen("non-finite matrix entry".into()));
    }
    let (b, f) = balance(a);
    let (vals, mut vecs) = b.eig().map_err(|e| Error::Eigen(e.to_string()))?;
    for i in 0..n {
        for k in 0..n {
            vecs[[i, k]] *= f[i];
        }
    }
    Ok((vals.to_vec(), vecs))
}

pub fn eigvals(a: &CMatrix) -> Result<Vec<C64>> {
    Ok(eig(a)?.0)
}

/// Singular values in decreasing order.
pub fn singular_values(a: &CMatrix) -> Result<Vec<f64>> {
    if a.is_empty() {
        return Ok(Vec::new());
    }
    let (_, s, _) = a.svd(false, false).map_err(|e| Error::Eigen(e.to_string()))?;
    let mut s = s.to_vec();
    s.sort_by(|x, y| y.total_cmp(x));
    Ok(s)
}

pub fn sigma_min(a: &CMatrix) -> Result<f64> {
    Ok(singular_values(a)?.last().copied().unwrap_or(0.0))
}

pub fn frobenius(a: &CMatrix) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn mat_vec(a: &CMatrix, v: &[C64]) -> Vec<C64> {
    let x = Array1::from(v.to_vec());
    a.dot(&x).to_vec()
}

pub fn norm2(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn norm_inf(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Lexicographic (Re, Im) order used for every reported spectrum.
pub fn cmp_re_im(a: &C64, b: &C64) -> std::cmp::Ordering {
    a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
}

/// Square root on the branch with non-negative real part; on the negative
/// real axis the root with positive imaginary part is taken.
pub fn sqrt_positive_re(z: C64) -> C64 {
    if z == C64::new(0.0, 0.0) {
        return z;
    }
    let w = z.sqrt();
    if w.re < 0.0 || (w.re == 0.0 && w.im < 0.0) {
        -w
    } else {
        w
    }
}
