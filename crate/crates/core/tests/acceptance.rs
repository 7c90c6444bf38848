//! Acceptance criteria. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails.

use std::f64::consts::PI;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use skinfx::bands::{critical_gamma, dimer_bands, exceptional_point_check, material_vorticity, vorticity, DimerParams};
use skinfx::capmat::{build_capacitance, build_quasiperiodic_capacitance, chain_spectrum};
use skinfx::gbz::{convergence_study, gbz_curve, recover_modes};
use skinfx::geometry::{interface_chain, ChainSpec, UnitCellSpec};
use skinfx::linalg::{self, C64};
use skinfx::spectral::{eigenmatrix_singular_values, pseudospectrum, Window};
use skinfx::toeplitz::{decay_bound_check, operator_spectrum_classify, SpectrumClass, TridiagonalSymbol};

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn list(xs: &[f64], digits: usize) -> String {
    let v: Vec<String> = xs.iter().map(|x| format!("{x:.digits$e}")).collect();
    format!("[{}]", v.join(", "))
}

fn uniform(n: usize, gamma: f64) -> ChainSpec {
    ChainSpec::uniform(n, 1.0, 1.0, gamma, 1e-3, 1.0).unwrap()
}

// Closed-form symbol entries, computed here without the library kernel.
fn skin_abc(gamma: f64) -> (f64, f64, f64) {
    let a = gamma / (1.0 - gamma.exp());
    let c = -gamma / (1.0 - (-gamma).exp());
    let b = gamma / (gamma / 2.0).tanh();
    (a, b, c)
}

fn c01_critical_gamma() -> Outcome {
    let gc = critical_gamma(1.0, 2.0).unwrap();
    let exact = (9.0f64 / 7.0).acosh();
    let equal_ok = [0.5, 1.0, 2.0, 3.7].iter().all(|&s| critical_gamma(s, s).unwrap() == 0.0);
    let pass = (gc - 0.73899).abs() <= 1e-4 && (gc - exact).abs() <= 1e-12 && equal_ok;
    outcome(pass, format!("gamma_c(1,2) = {gc:.12}, |gamma_c - arccosh(9/7)| = {:.1e}, gamma_c(s,s) = 0: {equal_ok}", (gc - exact).abs()))
}

fn c02_closed_form_oracle() -> Outcome {
    let mut worst_rel = 0.0f64;
    let mut worst_kernel = 0.0f64;
    let mut worst_vec = 0.0f64;
    for &gamma in &[0.1, 0.5, 1.0, 2.0] {
        let (a, b, c) = skin_abc(gamma);
        let r = (a * c).sqrt();
        for n in 2..=50 {
            let chain = uniform(n, gamma);
            let s = chain_spectrum(&chain).unwrap();
            let mut want: Vec<f64> = (1..=n)
                .map(|k| if k == 1 { 0.0 } else { b + 2.0 * r * (PI * (k as f64 - 1.0) / n as f64).cos() })
                .collect();
            want.sort_by(f64::total_cmp);
            let scale = want.iter().fold(0.0f64, |m, x| m.max(x.abs()));
            for (got, w) in s.eigenvalues.iter().zip(&want) {
                worst_rel = worst_rel.max((got - w).norm() / scale);
            }
            let cm = build_capacitance(&chain);
            let ones = vec![C64::new(1.0, 0.0); n];
            let c1 = linalg::norm_inf(&linalg::mat_vec(cm.as_matrix(), &ones));
            worst_kernel = worst_kernel.max(c1).max(s.eigenvalues[0].norm());
            let v = s.eigenvector(0);
            worst_vec = worst_vec.max(v.iter().map(|z| (z - 1.0).norm()).fold(0.0, f64::max));
        }
    }
    let pass = worst_rel <= 1e-9 && worst_kernel <= 1e-12;
    outcome(
        pass,
        format!("max rel eigenvalue error {worst_rel:.2e}; kernel |C1|, |lambda_1| <= {worst_kernel:.2e}; solver kernel vector vs 1 (informational): {worst_vec:.2e}"),
    )
}

fn c03_skin_decay() -> Outcome {
    let n = 36;
    let gamma = 0.5;
    let s = chain_spectrum(&uniform(n, gamma)).unwrap();
    let vecs: Vec<Vec<C64>> = (1..n).map(|k| s.eigenvector(k)).collect();
    let reports = decay_bound_check(&vecs, gamma, 1.0).unwrap();
    let failing: Vec<String> = reports
        .iter()
        .enumerate()
        .filter(|(_, r)| !r.pass)
        .map(|(k, r)| format!("mode {} (lambda {:.4}) kappa {:.3}", k + 1, s.eigenvalues[k + 1].re, r.kappa_hat))
        .collect();
    let max_kappa = reports.iter().map(|r| r.kappa_hat).fold(0.0, f64::max);
    let flipped = chain_spectrum(&uniform(n, -gamma)).unwrap();
    let left_edge = (1..n).all(|k| s.peak_index[k] < n / 4);
    let mirrored = (1..n).all(|k| flipped.peak_index[k] == n - 1 - s.peak_index[k]);
    let pass = failing.is_empty() && left_edge && mirrored;
    outcome(
        pass,
        format!(
            "bound {:.4}, max kappa {max_kappa:.4}, {} of {} modes over the bound [{}]; peaks in the left edge region: {left_edge}; flipped gamma mirrors every peak: {mirrored}",
            reports[0].bound,
            failing.len(),
            n - 1,
            failing.join("; ")
        ),
    )
}

fn c04_dimer_closed_forms() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_d1e5);
    let mut worst = 0.0f64;
    let mut worst_zero = 0.0f64;
    for _ in 0..200 {
        let s1 = rng.random_range(0.3..3.0);
        let s2 = rng.random_range(0.3..3.0);
        let mut gamma: f64 = rng.random_range(-2.0..2.0);
        if gamma.abs() < 1e-3 {
            gamma = 0.5;
        }
        let p = DimerParams::new(s1, s2, gamma).unwrap();
        let edge = PI / p.cell_length();
        let alpha = rng.random_range(-edge..edge);
        let cf = dimer_bands(&p, C64::from(alpha)).lambdas;
        let mut dense = linalg::eigvals(build_quasiperiodic_capacitance(&p.cell(), C64::from(alpha)).as_matrix()).unwrap();
        dense.sort_by(linalg::cmp_re_im);
        let scale = dense.iter().map(|z| z.norm()).fold(0.0, f64::max);
        for (x, y) in cf.iter().zip(&dense) {
            worst = worst.max((x - y).norm() / scale);
        }
        worst_zero = worst_zero.max(dimer_bands(&p, C64::from(0.0)).lambdas[0].norm());
    }
    outcome(worst <= 1e-10 && worst_zero <= 1e-12, format!("max rel deviation {worst:.2e} over 200 draws; max |lambda_1(alpha=0)| {worst_zero:.2e}"))
}

fn c05_vorticity_boundary() -> Outcome {
    let mut parts = Vec::new();
    let mut pass = true;
    for &g in &[0.3, 0.5, 0.7] {
        let v = vorticity(&DimerParams::new(1.0, 2.0, g).unwrap(), 2048).unwrap();
        pass &= (v.nu.abs() - 0.5).abs() < 1e-3;
        parts.push(format!("nu({g}) = {}", v.nu));
    }
    for &g in &[0.8, 0.9, 1.2] {
        let v = vorticity(&DimerParams::new(1.0, 2.0, g).unwrap(), 2048).unwrap();
        pass &= v.nu.abs() <= 1e-3;
        parts.push(format!("nu({g}) = {}", v.nu));
    }
    outcome(pass, format!("{} (want |nu| = 0.5 below 0.73899, 0 above)", parts.join(", ")))
}

fn c06_exceptional_point() -> Outcome {
    let gc = critical_gamma(1.0, 2.0).unwrap();
    let p = DimerParams::new(1.0, 2.0, gc).unwrap();
    let r = exceptional_point_check(&p, C64::from(PI / p.cell_length())).unwrap();
    let ratio = r.discriminant.norm() / r.scale;
    outcome(ratio < 1e-8 && r.eigenvector_angle < 1e-4, format!("|disc|/|C|_F^2 = {ratio:.2e}, eigenvector angle {:.2e}", r.eigenvector_angle))
}

fn c07_gbz() -> Outcome {
    let cell = UnitCellSpec::new(vec![1.0], vec![1.0], 1.0, 1e-3, 1.0, None).unwrap();
    let curve = gbz_curve(&cell, 0, 128).unwrap();
    let beta_err = curve.points.iter().map(|p| (p.beta + 0.25).abs()).fold(0.0, f64::max);
    let lo = curve.points.iter().map(|p| p.lambda).fold(f64::INFINITY, f64::min);
    let hi = curve.points.iter().map(|p| p.lambda).fold(0.0, f64::max);
    let beta_ok = curve.missing.is_empty() && curve.points.len() == 128 && beta_err <= 1e-9;
    let band_ok = (lo - 0.24492).abs() <= 1e-5 && (hi - 4.08298).abs() <= 1e-5;
    let rows = convergence_study(&cell, &[10, 20, 40, 60]).unwrap();
    let d: Vec<f64> = rows.iter().map(|r| r.max_distance).collect();
    let h: Vec<f64> = rows.iter().map(|r| r.hausdorff).collect();
    let decreasing = d.windows(2).all(|w| w[1] < w[0]);
    let small = d[3] < 5e-3;
    outcome(
        beta_ok && band_ok && decreasing && small,
        format!(
            "max |beta + 0.25| = {beta_err:.1e} ({} missing); band [{lo:.6}, {hi:.6}]; max distances {} strictly decreasing: {decreasing}, N=60 < 5e-3: {small}; Hausdorff {}",
            curve.missing.len(),
            list(&d, 2),
            list(&h, 4)
        ),
    )
}

fn c08_recovery() -> Outcome {
    let skin_cell = UnitCellSpec::new(vec![1.0], vec![1.0], 1.0, 1e-3, 1.0, None).unwrap();
    let skin = recover_modes(&uniform(60, 1.0), &skin_cell, None).unwrap();
    let skin_im = skin.iter().map(|r| (r.alpha_hat.im + 0.25).abs()).fold(0.0, f64::max);
    let skin_res = skin.iter().map(|r| r.residual).fold(0.0, f64::max);

    let herm_cell = UnitCellSpec::new(vec![1.0], vec![1.0], 0.0, 1e-3, 1.0, None).unwrap();
    let herm = recover_modes(&uniform(60, 0.0), &herm_cell, None).unwrap();
    let herm_im = herm.iter().map(|r| r.alpha_hat.im.abs()).fold(0.0, f64::max);

    let v = [C64::new(1.0, 1.38), C64::new(1.0, -1.42)];
    let mat_cell = UnitCellSpec::new(vec![1.0, 1.0], vec![1.0, 1.0], 0.0, 1e-3, 1.0, Some(v.to_vec())).unwrap();
    let mut mat_chain = uniform(60, 0.0);
    mat_chain.speeds = Some((0..60).map(|i| v[i % 2]).collect());
    let mat = recover_modes(&mat_chain, &mat_cell, None).unwrap();
    let bad: Vec<String> = mat
        .iter()
        .filter(|r| r.alpha_hat.im.abs() >= 1e-4)
        .map(|r| format!("omega {:.6}{:+.6}i -> Im alpha {:.4}, residual {:.1e}", r.omega.re, r.omega.im, r.alpha_hat.im, r.residual))
        .collect();
    let mat_im = mat.iter().map(|r| r.alpha_hat.im.abs()).fold(0.0, f64::max);

    let pass = skin_im <= 2e-2 && skin_res < 1e-6 && herm_im < 1e-6 && bad.is_empty();
    outcome(
        pass,
        format!(
            "skin ({} modes): max |Im a + 0.25| {skin_im:.1e}, max residual {skin_res:.1e}; hermitian ({} modes): max |Im a| {herm_im:.1e}; complex material ({} modes): max |Im a| {mat_im:.1e}, {} over 1e-4 [{}]",
            skin.len(),
            herm.len(),
            mat.len(),
            bad.len(),
            bad.join("; ")
        ),
    )
}

fn c09_pseudospectrum() -> Outcome {
    let eps = [1e-3, 1e-2, 1e-1];
    let sym = TridiagonalSymbol::gauge_capacitance(0.5, 1.0, 1.0);
    let mut parts = Vec::new();
    let mut pass = true;
    for n in [30, 70] {
        let chain = uniform(n, 0.5);
        let a = build_capacitance(&chain).into_matrix();
        let ev = linalg::eigvals(&a).unwrap();
        let w = Window::new(-0.5, 4.5, -1.5, 1.5).unwrap();
        let g = pseudospectrum(&a, Some(w), 41, &eps).unwrap();
        let mut inclusion = true;
        for z in &ev {
            let (j, i) = g.nearest_node(*z);
            let h = (C64::new(g.re_axis[i], g.im_axis[j]) - z).norm();
            inclusion &= eps.iter().all(|&e| g.sigma_min[[j, i]] < e + h);
        }
        let (ny, nx) = g.sigma_min.dim();
        let mut nesting = true;
        let mut sym_err = 0.0f64;
        for j in 0..ny {
            for i in 0..nx {
                for k in 1..eps.len() {
                    nesting &= !g.inside(eps[k - 1], j, i) || g.inside(eps[k], j, i);
                }
                sym_err = sym_err.max((g.sigma_min[[j, i]] - g.sigma_min[[ny - 1 - j, i]]).abs());
            }
        }
        let top = ev.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let winding_ok = ev
            .iter()
            .filter(|z| z.norm() > 1e-9 * top)
            .all(|z| operator_spectrum_classify(&sym, *z) == SpectrumClass::Winding(-1));
        let zero_excluded = operator_spectrum_classify(&sym, C64::new(0.0, 0.0)) != SpectrumClass::Winding(-1);
        pass &= inclusion && nesting && sym_err <= 1e-10 && winding_ok && zero_excluded;
        parts.push(format!(
            "N={n}: inclusion {inclusion}, nesting {nesting}, conjugate asymmetry {sym_err:.1e}, nontrivial eigenvalues in winding(-1) {winding_ok}, 0 excluded {zero_excluded}"
        ));
    }
    outcome(pass, parts.join("; "))
}

fn c10_interface() -> Outcome {
    let n = 24;
    let chain = interface_chain(n, 1.0, 1.0, 1.0, 1e-3, 1.0).unwrap();
    let s = chain_spectrum(&chain).unwrap();
    let near: Vec<usize> = (0..s.len()).filter(|&k| s.peak_index[k].abs_diff(n) <= 2).collect();
    let weak: Vec<String> = near
        .iter()
        .filter(|&&k| s.localization[k] <= 0.5)
        .map(|&k| format!("lambda {:.4}: {:.3}", s.eigenvalues[k].re, s.localization[k]))
        .collect();
    let pass = near.len() + 2 == s.len() && weak.is_empty();
    outcome(
        pass,
        format!("{} of {} modes peak within 2 sites of site {}; {} of them with localisation <= 0.5 [{}]", near.len(), s.len(), n + 1, weak.len(), weak.join("; ")),
    )
}

fn c11_rank_collapse() -> Outcome {
    let vals: Vec<f64> = [12usize, 24, 36]
        .iter()
        .map(|&n| {
            let s = chain_spectrum(&uniform(n, 0.5)).unwrap();
            eigenmatrix_singular_values(&s.eigenvectors).unwrap()[n / 2]
        })
        .collect();
    outcome(vals.windows(2).all(|w| w[1] < w[0]), format!("normalised sigma at i/N = 0.5: {}", list(&vals, 4)))
}

fn c12_material_vorticity() -> Outcome {
    let v = vec![C64::new(1.0, 1.38), C64::new(1.0, -1.42)];
    let cell = UnitCellSpec::new(vec![1.0, 1.0], vec![1.0, 1.0], 0.0, 1e-3, 1.0, Some(v.clone())).unwrap();
    let r = material_vorticity(&cell, &v, 1e-3, 2048).unwrap();
    outcome(r.nu.abs() <= 1e-3, format!("nu = {} (raw {:.2e})", r.nu, r.raw))
}

fn main() {
    let criteria: [Criterion; 12] = [
        ("exceptional point constant", c01_critical_gamma),
        ("closed-form / dense equivalence", c02_closed_form_oracle),
        ("skin-effect decay", c03_skin_decay),
        ("dimer closed forms", c04_dimer_closed_forms),
        ("vorticity phase boundary", c05_vorticity_boundary),
        ("exceptional-point coalescence", c06_exceptional_point),
        ("GBZ constancy and convergence", c07_gbz),
        ("quasiperiodicity recovery", c08_recovery),
        ("pseudospectrum properties", c09_pseudospectrum),
        ("interface localisation", c10_interface),
        ("rank collapse", c11_rank_collapse),
        ("complex-material vorticity", c12_material_vorticity),
    ];
    let mut failed = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let o = f();
        if !o.pass {
            failed += 1;
        }
        println!(
            "criterion {:>2} {} {name} ({:.1}s): {}",
            k + 1,
            if o.pass { "PASS" } else { "FAIL" },
            t.elapsed().as_secs_f64(),
            o.detail
        );
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
