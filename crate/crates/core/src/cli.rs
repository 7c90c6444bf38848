//! Command-line front end. Every subcommand writes CSV (to `--out`, or to
//! stdout) and, when writing to a file, a `<out>.manifest.json` next to it.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde_json::json;

use crate::bands::{band_sweep, critical_gamma, vorticity, DimerParams};
use crate::capmat::{build_capacitance, chain_spectrum_auto, reconstruct_mode, SpectralResult};
use crate::error::{Error, Result};
use crate::gbz::{convergence_study, default_window, gbz_curve, recover_modes, CONVERGENCE_SAMPLES};
use crate::geometry::{cell_from_config, chain_from_config, interface_chain, resonator_positions, ChainSpec, UnitCellSpec};
use crate::output::{sibling, write_atomic, Cell, Csv, RunManifest};
use crate::spectral::{pseudospectrum, Window};

#[derive(Debug, Parser)]
#[command(name = "skinfx", version, about = "Gauge capacitance spectra, bands and generalised Brillouin zones")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Dump the gauge capacitance matrix of a chain.
    Capmat {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Eigenvalues, frequencies, eigenvectors and localisation of a chain.
    Spectrum {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Mode shapes u(x) sampled on a uniform grid.
    Modes {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        grid: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Spectrum of a 2n+1 chain whose gauge switches sign at site n+1.
    Interface {
        #[arg(long)]
        n: usize,
        #[arg(long, allow_hyphen_values = true)]
        gamma: f64,
        #[arg(long, default_value_t = 1.0)]
        length: f64,
        #[arg(long, default_value_t = 1.0)]
        spacing: f64,
        #[arg(long, default_value_t = 1e-3)]
        delta: f64,
        #[arg(long = "v-b", default_value_t = 1.0)]
        v_b: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Smallest singular value of C - λ on a grid, plus ε level sets.
    Pseudospectrum {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_delimiter = ',')]
        eps: Vec<f64>,
        #[arg(long)]
        res: usize,
        /// re_min,re_max,im_min,im_max
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        window: Option<Vec<f64>>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Band functions over the real Brillouin zone.
    Bands {
        #[arg(long)]
        cell: PathBuf,
        #[arg(long)]
        samples: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Critical gauge of a periodic dimer.
    Exceptional {
        #[arg(long)]
        s1: f64,
        #[arg(long)]
        s2: f64,
    },
    /// Vorticity of a periodic dimer.
    Vorticity {
        #[arg(long)]
        s1: f64,
        #[arg(long)]
        s2: f64,
        #[arg(long, allow_hyphen_values = true)]
        gamma: f64,
        #[arg(long, default_value_t = 2048)]
        samples: usize,
    },
    /// Generalised Brillouin zone β(α) for every band of a cell.
    Gbz {
        #[arg(long)]
        cell: PathBuf,
        #[arg(long = "alpha-samples")]
        alpha_samples: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Complex quasiperiodicity of every finite-chain mode.
    Recover {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        cell: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Distance of finite spectra to the GBZ bands for growing chains.
    Convergence {
        #[arg(long)]
        cell: PathBuf,
        #[arg(long, value_delimiter = ',')]
        sizes: Vec<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Parses `argv` (without the program name) and runs one subcommand.
/// Returns 0 on success, 1 on invalid input, 2 on numerical failure.
pub fn run(argv: &[String]) -> i32 {
    configure_threads();
    let cli = match Cli::try_parse_from(std::iter::once("skinfx".to_string()).chain(argv.iter().cloned())) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    print!("{e}");
                    0
                }
                _ => {
                    eprint!("{e}");
                    1
                }
            };
        }
    };
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_validation() {
                1
            } else {
                2
            }
        }
    }
}

fn configure_threads() {
    if let Ok(v) = std::env::var("SKINFX_THREADS") {
        if let Ok(n) = v.trim().parse::<usize>() {
            if n > 0 {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
        }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

fn load_chain(path: &Path) -> Result<ChainSpec> {
    chain_from_config(&read(path)?)
}

fn load_cell(path: &Path) -> Result<UnitCellSpec> {
    cell_from_config(&read(path)?)
}

/// Collected datasets of one run: `(suffix, csv)` with an empty suffix for
/// the primary file.
struct Emit {
    command: &'static str,
    parameters: serde_json::Value,
    files: Vec<(&'static str, Csv)>,
}

impl Emit {
    fn finish(self, out: Option<&Path>, started: Instant) -> Result<()> {
        match out {
            None => {
                let mut stdout = std::io::stdout().lock();
                if let Some((_, csv)) = self.files.first() {
                    stdout.write_all(csv.as_str().as_bytes())?;
                }
                Ok(())
            }
            Some(path) => {
                let mut outputs = Vec::new();
                for (suffix, csv) in &self.files {
                    let p = if suffix.is_empty() { path.to_path_buf() } else { sibling(path, suffix) };
                    write_atomic(&p, csv.as_str())?;
                    outputs.push(p.display().to_string());
                }
                RunManifest {
                    command: self.command.to_string(),
                    parameters: self.parameters,
                    version: env!("CARGO_PKG_VERSION").to_string(),
                    outputs,
                    duration_seconds: started.elapsed().as_secs_f64(),
                }
                .write(path)
            }
        }
    }
}

fn spectrum_tables(s: &SpectralResult) -> (Csv, Csv) {
    let mut main = Csv::new(&["index", "lambda_re", "lambda_im", "omega_re", "omega_im", "localization"]);
    for k in 0..s.len() {
        main.row(&[
            Cell::U(k),
            Cell::F(s.eigenvalues[k].re),
            Cell::F(s.eigenvalues[k].im),
            Cell::F(s.omegas[k].re),
            Cell::F(s.omegas[k].im),
            Cell::F(s.localization[k]),
        ]);
    }
    let mut vecs = Csv::new(&["mode", "site", "re", "im"]);
    for k in 0..s.len() {
        for i in 0..s.len() {
            let z = s.eigenvectors[[i, k]];
            vecs.row(&[Cell::U(k), Cell::U(i), Cell::F(z.re), Cell::F(z.im)]);
        }
    }
    (main, vecs)
}

fn chain_json(chain: &ChainSpec) -> serde_json::Value {
    serde_json::from_str(&crate::geometry::chain_to_config(chain)).expect("valid json")
}

fn cell_json(cell: &UnitCellSpec) -> serde_json::Value {
    serde_json::from_str(&crate::geometry::cell_to_config(cell)).expect("valid json")
}

fn dispatch(cmd: Command) -> Result<()> {
    let started = Instant::now();
    match cmd {
        Command::Capmat { config, out } => {
            let chain = load_chain(&config)?;
            let c = build_capacitance(&chain);
            let mut csv = Csv::new(&["row", "col", "re", "im"]);
            for i in 0..c.dim() {
                for j in 0..c.dim() {
                    let z = c.get(i, j);
                    csv.row(&[Cell::U(i), Cell::U(j), Cell::F(z.re), Cell::F(z.im)]);
                }
            }
            Emit { command: "capmat", parameters: json!({ "chain": chain_json(&chain) }), files: vec![("", csv)] }
                .finish(out.as_deref(), started)
        }
        Command::Spectrum { config, out } => {
            let chain = load_chain(&config)?;
            let s = chain_spectrum_auto(&chain)?;
            let (main, vecs) = spectrum_tables(&s);
            Emit {
                command: "spectrum",
                parameters: json!({ "chain": chain_json(&chain), "max_residual": s.max_residual }),
                files: vec![("", main), ("vectors", vecs)],
            }
            .finish(out.as_deref(), started)
        }
        Command::Modes { config, grid, out } => {
            if grid < 2 {
                return Err(Error::Validation("--grid needs at least 2 points".into()));
            }
            let chain = load_chain(&config)?;
            let s = chain_spectrum_auto(&chain)?;
            let pos = resonator_positions(&chain);
            let pad = chain.spacings.iter().cloned().fold(chain.lengths[0], f64::max);
            let (x0, x1) = (pos[0].0 - pad, pos[pos.len() - 1].1 + pad);
            let xs: Vec<f64> = (0..grid).map(|k| x0 + (x1 - x0) * k as f64 / (grid - 1) as f64).collect();
            let mut csv = Csv::new(&["mode", "x", "re", "im"]);
            for k in 0..s.len() {
                let u = reconstruct_mode(&chain, &s.eigenvector(k), &xs)?;
                for (x, z) in xs.iter().zip(u) {
                    csv.row(&[Cell::U(k), Cell::F(*x), Cell::F(z.re), Cell::F(z.im)]);
                }
            }
            Emit { command: "modes", parameters: json!({ "chain": chain_json(&chain), "grid": grid }), files: vec![("", csv)] }
                .finish(out.as_deref(), started)
        }
        Command::Interface { n, gamma, length, spacing, delta, v_b, out } => {
            let chain = interface_chain(n, gamma, length, spacing, delta, v_b)?;
            let s = chain_spectrum_auto(&chain)?;
            let (main, vecs) = spectrum_tables(&s);
            Emit {
                command: "interface",
                parameters: json!({ "n": n, "interface_site": n + 1, "chain": chain_json(&chain), "max_residual": s.max_residual }),
                files: vec![("", main), ("vectors", vecs)],
            }
            .finish(out.as_deref(), started)
        }
        Command::Pseudospectrum { config, eps, res, window, out } => {
            if eps.is_empty() {
                return Err(Error::Validation("--eps needs at least one level".into()));
            }
            let chain = load_chain(&config)?;
            let mut a = build_capacitance(&chain).into_matrix();
            for i in 0..chain.len() {
                for j in 0..chain.len() {
                    a[[i, j]] /= chain.lengths[i];
                }
            }
            let window = match window {
                None => None,
                Some(w) if w.len() == 4 => Some(Window::new(w[0], w[1], w[2], w[3])?),
                Some(_) => return Err(Error::Validation("--window takes re_min,re_max,im_min,im_max".into())),
            };
            let grid = pseudospectrum(&a, window, res, &eps)?;
            let mut main = Csv::new(&["re", "im", "sigma_min"]);
            for (j, y) in grid.im_axis.iter().enumerate() {
                for (i, x) in grid.re_axis.iter().enumerate() {
                    main.row(&[Cell::F(*x), Cell::F(*y), Cell::F(grid.sigma_min[[j, i]])]);
                }
            }
            let mut levels = Csv::new(&["eps", "segment_id", "re", "im"]);
            for &e in &grid.eps_levels {
                for (id, (p, q)) in grid.level_set(e).into_iter().enumerate() {
                    levels.row(&[Cell::F(e), Cell::U(id), Cell::F(p.re), Cell::F(p.im)]);
                    levels.row(&[Cell::F(e), Cell::U(id), Cell::F(q.re), Cell::F(q.im)]);
                }
            }
            let w = [grid.re_axis[0], grid.re_axis[res - 1], grid.im_axis[0], grid.im_axis[res - 1]];
            Emit {
                command: "pseudospectrum",
                parameters: json!({ "chain": chain_json(&chain), "eps": grid.eps_levels, "resolution": res, "window": w, "norm": "2" }),
                files: vec![("", main), ("levels", levels)],
            }
            .finish(out.as_deref(), started)
        }
        Command::Bands { cell, samples, out } => {
            let cell = load_cell(&cell)?;
            let sweep = band_sweep(&cell, samples)?;
            let mut csv = Csv::new(&["alpha_re", "alpha_im", "band_index", "lambda_re", "lambda_im", "omega_re", "omega_im"]);
            for s in &sweep {
                for (b, (l, w)) in s.lambdas.iter().zip(&s.omegas).enumerate() {
                    csv.row(&[
                        Cell::F(s.alpha.re),
                        Cell::F(s.alpha.im),
                        Cell::U(b),
                        Cell::F(l.re),
                        Cell::F(l.im),
                        Cell::F(w.re),
                        Cell::F(w.im),
                    ]);
                }
            }
            Emit { command: "bands", parameters: json!({ "cell": cell_json(&cell), "samples": samples }), files: vec![("", csv)] }
                .finish(out.as_deref(), started)
        }
        Command::Exceptional { s1, s2 } => {
            match critical_gamma(s1, s2) {
                Ok(g) => println!("gamma_c={:.5}", (g * 1e5).trunc() / 1e5),
                Err(Error::NoExceptionalPoint(_)) => println!("gamma_c=none"),
                Err(e) => return Err(e),
            }
            Ok(())
        }
        Command::Vorticity { s1, s2, gamma, samples } => {
            let p = DimerParams::new(s1, s2, gamma)?;
            let v = vorticity(&p, samples)?;
            if !v.quantized {
                eprintln!("warning: vorticity {} is not within 1e-3 of a half-integer", v.raw);
            }
            println!("nu={:?}", v.nu + 0.0);
            Ok(())
        }
        Command::Gbz { cell, alpha_samples, out } => {
            let cell = load_cell(&cell)?;
            let mut csv = Csv::new(&["alpha", "beta", "lambda", "band_index"]);
            let mut missing = Vec::new();
            for b in 0..cell.len() {
                let curve = gbz_curve(&cell, b, alpha_samples)?;
                for p in &curve.points {
                    csv.row(&[Cell::F(p.alpha), Cell::F(p.beta), Cell::F(p.lambda), Cell::U(p.band_index)]);
                }
                missing.extend(curve.missing.iter().map(|a| json!({ "band_index": b, "alpha": a })));
            }
            if !missing.is_empty() {
                eprintln!("warning: {} samples without an admissible beta", missing.len());
            }
            Emit {
                command: "gbz",
                parameters: json!({
                    "cell": cell_json(&cell),
                    "alpha_samples": alpha_samples,
                    "corner_convention": "(K,1) carries exp(-i alpha L)",
                    "missing": missing,
                }),
                files: vec![("", csv)],
            }
            .finish(out.as_deref(), started)
        }
        Command::Recover { config, cell, out } => {
            let chain = load_chain(&config)?;
            let cell = load_cell(&cell)?;
            let window = default_window(&cell);
            let rec = recover_modes(&chain, &cell, Some(window))?;
            let mut csv = Csv::new(&["mode_index", "omega_re", "omega_im", "alpha_re", "alpha_im", "residual"]);
            for r in &rec {
                csv.row(&[
                    Cell::U(r.mode_index),
                    Cell::F(r.omega.re),
                    Cell::F(r.omega.im),
                    Cell::F(r.alpha_hat.re),
                    Cell::F(r.alpha_hat.im),
                    Cell::F(r.residual),
                ]);
            }
            let clipped: Vec<usize> = rec.iter().filter(|r| r.clipped).map(|r| r.mode_index).collect();
            Emit {
                command: "recover",
                parameters: json!({
                    "chain": chain_json(&chain),
                    "cell": cell_json(&cell),
                    "window": [window.re_min, window.re_max, window.im_min, window.im_max],
                    "clipped_modes": clipped,
                    "corner_convention": "(K,1) carries exp(-i alpha L)",
                }),
                files: vec![("", csv)],
            }
            .finish(out.as_deref(), started)
        }
        Command::Convergence { cell, sizes, out } => {
            let cell = load_cell(&cell)?;
            let rows = convergence_study(&cell, &sizes)?;
            let mut csv = Csv::new(&["N", "max_distance", "hausdorff"]);
            for r in &rows {
                csv.row(&[Cell::U(r.cells), Cell::F(r.max_distance), Cell::F(r.hausdorff)]);
            }
            Emit {
                command: "convergence",
                parameters: json!({ "cell": cell_json(&cell), "sizes": sizes, "gbz_samples": CONVERGENCE_SAMPLES }),
                files: vec![("", csv)],
            }
            .finish(out.as_deref(), started)
        }
    }
}
