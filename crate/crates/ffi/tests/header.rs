//! The generated header is in sync with the exported symbols and compiles
//! and links from C when a C compiler is available.

use std::path::{Path, PathBuf};
use std::process::Command;

const EXPORTS: &[&str] = &[
    "sl_profile_new_power",
    "sl_profile_new_zero",
    "sl_profile_new_step",
    "sl_profile_from_json",
    "sl_profile_free",
    "sl_eval_intensity",
    "sl_poisson_log_pmf",
    "sl_bessel_i",
    "sl_skellam_pmf",
    "sl_skellam_cf",
    "sl_skellam_tail",
    "sl_hellinger_sq_poisson",
    "sl_rn_square_integral",
    "sl_hellinger_growth",
    "sl_classify",
    "sl_report_verdict",
    "sl_report_to_json",
    "sl_report_free",
    "sl_string_free",
    "sl_last_error_message",
    "sl_version",
];

fn header() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("include/suspension_lab.h")
}

#[test]
fn header_declares_every_export() {
    let text = std::fs::read_to_string(header()).unwrap();
    for name in EXPORTS {
        assert!(
            text.contains(&format!("{name}(")),
            "{name} missing from header"
        );
    }
    assert!(text.contains("typedef struct SlProfile SlProfile;"));
    assert!(text.contains("SL_STATUS_PRECONDITION = 4"));
}

const PROGRAM: &str = r#"
#include <stdio.h>
#include <string.h>
#include "suspension_lab.h"

int main(void) {
    SlProfile *p = NULL;
    if (sl_profile_new_power(1.0, 1.0, 0.5, -1, &p) != SL_STATUS_OK) return 1;
    double v = 0.0;
    if (sl_rn_square_integral(p, 10, 1e-13, &v) != SL_STATUS_OK) return 2;
    if (v < 4.5438841 || v > 4.5438842) return 3;
    SlReport *r = NULL;
    if (sl_classify(p, &r) != SL_STATUS_OK) return 4;
    SlVerdict verdict;
    sl_report_verdict(r, &verdict);
    if (verdict != SL_VERDICT_INCONCLUSIVE) return 5;
    char *json = NULL;
    sl_report_to_json(r, &json);
    if (strstr(json, "\"verdict\":\"inconclusive\"") == NULL) return 6;
    sl_string_free(json);
    sl_report_free(r);
    sl_profile_free(p);
    if (sl_poisson_log_pmf(0.0, 2, &v) != SL_STATUS_DOMAIN_ERROR) return 7;
    if (sl_last_error_message() == NULL) return 8;
    printf("%s\n", sl_version());
    return 0;
}
"#;

#[test]
fn c_program_links_against_the_static_library() {
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    if Command::new(&cc).arg("--version").output().is_err() {
        eprintln!("no C compiler; skipping");
        return;
    }
    // target/<profile>/deps/<test binary> -> target/<profile>
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().unwrap().parent().unwrap();
    let lib = profile_dir.join("libsuspension_lab_ffi.a");
    if !lib.exists() {
        eprintln!("static library not built at {}; skipping", lib.display());
        return;
    }
    let dir = tempfile::TempDir::new().unwrap();
    let src = dir.path().join("main.c");
    let bin = dir.path().join("main");
    std::fs::write(&src, PROGRAM).unwrap();
    let status = Command::new(&cc)
        .arg("-std=c99")
        .arg("-Wall")
        .arg("-Werror")
        .arg("-I")
        .arg(header().parent().unwrap())
        .arg(&src)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status()
        .unwrap();
    assert!(status.success(), "C compilation failed");
    let out = Command::new(&bin).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    assert_eq!(
        String::from_utf8_lossy(&out.stdout).trim(),
        suspension_lab::VERSION
    );
}
