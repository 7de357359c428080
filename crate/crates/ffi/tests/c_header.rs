//! Compiles and runs a small C program against the generated header and the
//! static library.

use std::path::PathBuf;
use std::process::Command;

const PROGRAM: &str = r#"
#include <stdio.h>
#include <string.h>
#include "mbqc_fidelity.h"

int main(void) {
    MfState *s = NULL;
    if (mf_state_cluster_1d(5, &s) != MF_OK) return 10;
    MfSpectralSummary sum;
    if (mf_spectral_summary(s, 26, &sum) != MF_OK) return 11;
    if (sum.nu < 0.2499 || sum.nu > 0.2501) return 12;
    MfSampler *sm = NULL;
    if (mf_sampler_new(s, 1, &sm) != MF_OK) return 13;
    char *w = NULL;
    if (mf_sampler_next(sm, &w, NULL) != MF_OK) return 14;
    if (strlen(w) != 6) return 15;
    mf_string_free(w);
    mf_sampler_free(sm);
    if (mf_state_cluster_2d(1, 0, &s) == MF_OK) return 16;
    if (mf_last_error() == NULL) return 17;
    mf_state_free(s);
    printf("ok %s\n", mf_version());
    return 0;
}
"#;

#[test]
fn c_program_links_and_runs() {
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let exe = std::env::current_exe().unwrap();
    // target/<profile>/deps/<test binary>
    let profile_dir = exe.parent().unwrap().parent().unwrap();
    let lib = profile_dir.join("libmbqc_fidelity_ffi.a");
    assert!(lib.exists(), "static library not found at {}", lib.display());

    let tmp = tempfile::tempdir().unwrap();
    let src = tmp.path().join("main.c");
    let bin = tmp.path().join("main");
    std::fs::write(&src, PROGRAM).unwrap();
    let status = Command::new("cc")
        .arg("-std=c99")
        .arg("-Wall")
        .arg("-Werror")
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&src)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status()
        .expect("C compiler available");
    assert!(status.success());
    let out = Command::new(&bin).output().unwrap();
    assert!(out.status.success(), "exit {:?}", out.status.code());
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("ok "));
}
