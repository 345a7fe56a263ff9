//! The generated header compiles as C and links against the static library.

use std::path::{Path, PathBuf};
use std::process::Command;

fn header_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("include")
}

const PROGRAM: &str = r#"
#include <stdio.h>
#include <string.h>
#include "permint.h"

int main(void) {
    PmiFamily *f = NULL;
    if (pmi_family_full(4, &f) != PMI_STATUS_OK) return 1;
    size_t len = 0;
    if (pmi_family_len(f, &len) != PMI_STATUS_OK || len != 24) return 2;
    bool free_ = false;
    if (pmi_is_cross_free(f, f, 1, &free_) != PMI_STATUS_OK || free_) return 3;
    pmi_family_free(f);
    if (pmi_family_full(9, &f) != PMI_STATUS_CAPACITY) return 4;
    char msg[256];
    if (pmi_last_error(msg, sizeof msg, &len) != PMI_STATUS_OK || strstr(msg, "capacity") == NULL) return 5;
    printf("%s\n", pmi_version());
    return 0;
}
"#;

#[test]
fn header_declares_the_api() {
    let h = std::fs::read_to_string(header_dir().join("permint.h")).unwrap();
    for sym in ["pmi_family_parse", "pmi_search", "pmi_bounds_table", "pmi_coverage", "pmi_last_error", "PMI_STATUS_PANIC"] {
        assert!(h.contains(sym), "{sym} missing from header");
    }
}

#[test]
fn header_compiles_and_links() {
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("probe.c");
    std::fs::write(&src, PROGRAM).unwrap();
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());

    let syntax = Command::new(&cc).arg("-fsyntax-only").arg("-I").arg(header_dir()).arg(&src).status();
    let Ok(syntax) = syntax else {
        eprintln!("no C compiler available; header compile check not run");
        return;
    };
    assert!(syntax.success(), "header does not compile");

    // test binaries live in <target>/<profile>/deps
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().unwrap().parent().unwrap();
    let lib = profile_dir.join("libpermint_ffi.a");
    if !lib.exists() {
        eprintln!("{} not built; link check not run", lib.display());
        return;
    }
    let bin = dir.path().join("probe");
    let status = Command::new(&cc)
        .arg("-I")
        .arg(header_dir())
        .arg(&src)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status()
        .unwrap();
    assert!(status.success(), "link failed");
    let out = Command::new(&bin).output().unwrap();
    assert!(out.status.success(), "probe exited with {:?}", out.status.code());
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), env!("CARGO_PKG_VERSION"));
}
