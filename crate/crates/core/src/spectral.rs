//! Pseudospectra, localisation diagnostics and set distances.

use ndarray::Array2;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, C64};

/// Rectangle `[re_min, re_max] × [im_min, im_max]` in the complex plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl Window {
    pub fn new(re_min: f64, re_max: f64, im_min: f64, im_max: f64) -> Result<Self> {
        if !(re_min < re_max && im_min < im_max) || ![re_min, re_max, im_min, im_max].iter().all(|x| x.is_finite()) {
            return Err(Error::Validation(format!(
                "degenerate window [{re_min}, {re_max}] x [{im_min}, {im_max}]"
            )));
        }
        Ok(Window { re_min, re_max, im_min, im_max })
    }

    pub fn contains(&self, z: C64) -> bool {
        z.re >= self.re_min && z.re <= self.re_max && z.im >= self.im_min && z.im <= self.im_max
    }

    pub fn clamp(&self, z: C64) -> C64 {
        C64::new(z.re.clamp(self.re_min, self.re_max), z.im.clamp(self.im_min, self.im_max))
    }

    /// Bounding box of `points` widened by half the larger side on every
    /// edge, plus `pad`.
    pub fn around(points: &[C64], pad: f64) -> Self {
        let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
        for p in points {
            x0 = x0.min(p.re);
            x1 = x1.max(p.re);
            y0 = y0.min(p.im);
            y1 = y1.max(p.im);
        }
        if points.is_empty() {
            (x0, x1, y0, y1) = (0.0, 0.0, 0.0, 0.0);
        }
        let span = (x1 - x0).max(y1 - y0);
        let mut h = 0.5 * span + pad;
        if h <= 0.0 {
            h = 1.0;
        }
        Window { re_min: x0 - h, re_max: x1 + h, im_min: y0 - h, im_max: y1 + h }
    }
}

/// Smallest singular value of `A - λI` on a uniform grid.
#[derive(Debug, Clone)]
pub struct PseudospectrumGrid {
    pub re_axis: Vec<f64>,
    pub im_axis: Vec<f64>,
    /// Indexed `[im, re]`.
    pub sigma_min: Array2<f64>,
    pub eps_levels: Vec<f64>,
}

fn axis(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

/// Evaluates `σ_min(A - λI)` on a `resolution × resolution` grid over
/// `window` (default: [`Window::around`] the eigenvalues, padded by the
/// largest ε). Nodes are evaluated in parallel.
pub fn pseudospectrum(
    a: &CMatrix,
    window: Option<Window>,
    resolution: usize,
    eps_levels: &[f64],
) -> Result<PseudospectrumGrid> {
    if resolution < 2 {
        return Err(Error::Validation("resolution must be at least 2".into()));
    }
    if a.nrows() != a.ncols() || a.nrows() == 0 {
        return Err(Error::Validation("pseudospectrum needs a non-empty square matrix".into()));
    }
    if eps_levels.iter().any(|e| e.is_nan() || *e <= 0.0) {
        return Err(Error::Validation("eps levels must be positive".into()));
    }
    let window = match window {
        Some(w) => w,
        None => {
            let ev = linalg::eigvals(a)?;
            let pad = eps_levels.iter().cloned().fold(0.0, f64::max);
            Window::around(&ev, pad)
        }
    };
    let re_axis = axis(window.re_min, window.re_max, resolution);
    let im_axis = axis(window.im_min, window.im_max, resolution);
    let n = a.nrows();
    let nodes: Vec<(usize, usize)> = (0..resolution)
        .flat_map(|j| (0..resolution).map(move |i| (j, i)))
        .collect();
    let values: Vec<f64> = nodes
        .par_iter()
        .map(|&(j, i)| {
            let lam = C64::new(re_axis[i], im_axis[j]);
            let mut m = a.clone();
            for d in 0..n {
                m[[d, d]] -= lam;
            }
            linalg::sigma_min(&m)
        })
        .collect::<Result<_>>()?;
    let sigma_min = Array2::from_shape_vec((resolution, resolution), values)
        .expect("grid shape matches node count");
    let mut eps_levels = eps_levels.to_vec();
    eps_levels.sort_by(f64::total_cmp);
    Ok(PseudospectrumGrid { re_axis, im_axis, sigma_min, eps_levels })
}

impl PseudospectrumGrid {
    pub fn inside(&self, eps: f64, j: usize, i: usize) -> bool {
        self.sigma_min[[j, i]] < eps
    }

    /// Grid node closest to `z`, as `(im index, re index)`.
    pub fn nearest_node(&self, z: C64) -> (usize, usize) {
        let near = |ax: &[f64], x: f64| {
            (0..ax.len())
                .min_by(|&p, &q| (ax[p] - x).abs().total_cmp(&(ax[q] - x).abs()))
                .unwrap()
        };
        (near(&self.im_axis, z.im), near(&self.re_axis, z.re))
    }

    /// Marching-squares segments of the level set `σ_min = eps`.
    pub fn level_set(&self, eps: f64) -> Vec<(C64, C64)> {
        let (ny, nx) = self.sigma_min.dim();
        let mut segs = Vec::new();
        for j in 0..ny - 1 {
            for i in 0..nx - 1 {
                let corners = [(j, i), (j, i + 1), (j + 1, i + 1), (j + 1, i)];
                let v: Vec<f64> = corners.iter().map(|&(a, b)| self.sigma_min[[a, b]] - eps).collect();
                let p: Vec<C64> = corners
                    .iter()
                    .map(|&(a, b)| C64::new(self.re_axis[b], self.im_axis[a]))
                    .collect();
                let cross = |e: usize| {
                    let (s, t) = (e, (e + 1) % 4);
                    let w = v[s] / (v[s] - v[t]);
                    p[s] + (p[t] - p[s]) * w
                };
                let edges: Vec<usize> = (0..4).filter(|&e| (v[e] < 0.0) != (v[(e + 1) % 4] < 0.0)).collect();
                match edges.len() {
                    2 => segs.push((cross(edges[0]), cross(edges[1]))),
                    4 => {
                        let centre = v.iter().sum::<f64>() / 4.0;
                        if (centre < 0.0) == (v[0] < 0.0) {
                            segs.push((cross(0), cross(1)));
                            segs.push((cross(2), cross(3)));
                        } else {
                            segs.push((cross(3), cross(0)));
                            segs.push((cross(1), cross(2)));
                        }
                    }
                    _ => {}
                }
            }
        }
        segs
    }

    /// Segment endpoints of [`level_set`](Self::level_set) as a point cloud.
    pub fn boundary_points(&self, eps: f64) -> Vec<C64> {
        self.level_set(eps).into_iter().flat_map(|(a, b)| [a, b]).collect()
    }
}

/// `‖v‖∞ / ‖v‖₂`.
pub fn localization_metric(v: &[C64]) -> Result<f64> {
    let n2 = linalg::norm2(v);
    if n2 == 0.0 {
        return Err(Error::Validation("zero vector has no localisation".into()));
    }
    Ok(linalg::norm_inf(v) / n2)
}

/// Singular values of the eigenvector matrix, decreasing and divided by the
/// largest.
pub fn eigenmatrix_singular_values(vectors: &CMatrix) -> Result<Vec<f64>> {
    let s = linalg::singular_values(vectors)?;
    let top = s.first().copied().unwrap_or(0.0);
    if top == 0.0 {
        return Ok(s);
    }
    Ok(s.into_iter().map(|x| x / top).collect())
}

fn directed(a: &[C64], b: &[C64]) -> f64 {
    a.par_iter()
        .map(|p| b.iter().map(|q| (p - q).norm()).fold(f64::INFINITY, f64::min))
        .reduce(|| 0.0, f64::max)
}

pub fn hausdorff_distance(a: &[C64], b: &[C64]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::Validation("Hausdorff distance of an empty set".into()));
    }
    Ok(directed(a, b).max(directed(b, a)))
}
