//! Compiles and runs a C program against the generated header and the static library.

use std::path::PathBuf;
use std::process::Command;

const PROGRAM: &str = r#"
#include <stdio.h>
#include <math.h>
#include "ge_sim.h"

int main(void) {
    GeModel *m = NULL;
    if (ge_model_new(1e-3, 1.2, 1.1, 0.5, 0.0, &m) != GE_STATUS_RESONANCE_ORDERING || m != NULL) return 1;
    if (ge_last_error_message() == NULL) return 2;
    if (ge_model_new(1e-3, 0.8, 1.2, 0.5, 0.0, &m) != GE_STATUS_OK) return 3;
    double k_res, t_sat, p, n;
    if (ge_model_resonance(m, &k_res, &t_sat) != GE_STATUS_OK) return 4;
    if (ge_pex(m, 3.0 * t_sat, GE_PEX_METHOD_NUMERIC, &p) != GE_STATUS_OK) return 5;
    if (ge_negativity(m, 3.0 * t_sat, GE_NEGATIVITY_METHOD_CLOSED_FORM, &n) != GE_STATUS_OK) return 6;
    if (fabs(2.0 * n * n - p) > 1e-12 * p) return 7;
    GeGridSpec spec = ge_grid_spec_default();
    if (spec.nx == 0 || spec.dt <= 0.0) return 8;
    ge_model_free(m);
    printf("%s %.6e\n", ge_version(), p);
    return 0;
}
"#;

#[test]
fn c_program_links_against_static_library() {
    let crate_dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    // target/<profile>/deps/<test binary>
    let profile_dir = std::env::current_exe()
        .unwrap()
        .parent()
        .unwrap()
        .parent()
        .unwrap()
        .to_path_buf();
    let lib = profile_dir.join("libge_sim_ffi.a");
    assert!(lib.exists(), "{} missing", lib.display());
    let work = tempfile::tempdir().unwrap();
    let src = work.path().join("smoke.c");
    let exe = work.path().join("smoke");
    std::fs::write(&src, PROGRAM).unwrap();
    let status = Command::new("cc")
        .arg("-std=c99")
        .arg("-Wall")
        .arg("-Werror")
        .arg("-I")
        .arg(crate_dir.join("include"))
        .arg(&src)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .expect("C compiler available");
    assert!(status.success());
    let out = Command::new(&exe).output().unwrap();
    assert!(out.status.success(), "exit {:?}", out.status.code());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with(env!("CARGO_PKG_VERSION")));
}
