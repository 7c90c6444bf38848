//! Compiles and runs a small C program against the generated header and
//! the shared library.

use std::path::PathBuf;
use std::process::Command;

const PROGRAM: &str = r#"
#include <math.h>
#include <stdio.h>
#include "skinfx.h"

int main(void) {
    SkinfxChain *chain = NULL;
    if (skinfx_chain_uniform(3, 1.0, 1.0, 1.0, 1e-3, 1.0, &chain) != SKINFX_STATUS_OK) return 10;
    SkinfxSpectrum *spec = NULL;
    if (skinfx_spectrum_solve(chain, &spec) != SKINFX_STATUS_OK) return 11;
    double re, im;
    if (skinfx_spectrum_eigenvalue(spec, 2, &re, &im) != SKINFX_STATUS_OK) return 12;
    if (fabs(re - 3.123470789406122) > 1e-12) return 13;
    double g;
    if (skinfx_critical_gamma(1.0, 2.0, &g) != SKINFX_STATUS_OK) return 14;
    char msg[128];
    if (skinfx_chain_uniform(0, 1.0, 1.0, 1.0, 1e-3, 1.0, &chain) != SKINFX_STATUS_INVALID_ARGUMENT) return 15;
    if (skinfx_last_error(msg, sizeof msg) == 0) return 16;
    skinfx_spectrum_free(spec);
    printf("%.5f\n", g);
    return 0;
}
"#;

fn target_dir() -> PathBuf {
    // tests run from target/<profile>/deps
    let exe = std::env::current_exe().unwrap();
    exe.parent().unwrap().parent().unwrap().to_path_buf()
}

#[test]
fn c_program_links_and_runs() {
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let header = manifest.join("include").join("skinfx.h");
    assert!(header.exists(), "header not generated");
    let text = std::fs::read_to_string(&header).unwrap();
    for name in ["skinfx_chain_from_json", "skinfx_spectrum_solve", "skinfx_last_error", "SKINFX_STATUS_OK", "typedef struct SkinfxChain SkinfxChain"] {
        assert!(text.contains(name), "{name} missing from header");
    }

    let lib_dir = target_dir();
    if !lib_dir.join("libskinfx_ffi.so").exists() {
        eprintln!("shared library not found in {}, skipping link check", lib_dir.display());
        return;
    }
    let Ok(cc) = which_cc() else {
        eprintln!("no C compiler, skipping link check");
        return;
    };
    let tmp = tempfile::tempdir().unwrap();
    let src = tmp.path().join("main.c");
    let bin = tmp.path().join("main");
    std::fs::write(&src, PROGRAM).unwrap();
    let status = Command::new(cc)
        .arg(&src)
        .arg("-I")
        .arg(manifest.join("include"))
        .arg("-L")
        .arg(&lib_dir)
        .arg(format!("-Wl,-rpath,{}", lib_dir.display()))
        .args(["-lskinfx_ffi", "-lm", "-o"])
        .arg(&bin)
        .status()
        .unwrap();
    assert!(status.success(), "C compilation failed");
    let out = Command::new(&bin).output().unwrap();
    assert!(out.status.success(), "C program exited with {:?}", out.status.code());
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "0.73900");
}

fn which_cc() -> Result<&'static str, ()> {
    for cc in ["cc", "gcc", "clang"] {
        if Command::new(cc).arg("--version").output().is_ok() {
            return Ok(cc);
        }
    }
    Err(())
}
