//! Compiles a C program against the generated header and links it with the
//! static library.

use std::path::{Path, PathBuf};
use std::process::Command;

const PROGRAM: &str = r#"
#include <stdio.h>
#include <string.h>
#include "ftp.h"

int main(void) {
    FtpInstance *inst = ftp_instance_new(false, 2, 0, 1, 1);
    for (int i = 0; i < 4; i++) {
        if (ftp_instance_add_edge(inst, 0, 1, 1, true, NULL) != FTP_STATUS_OK) return 10;
    }
    FtpSolution *sol = NULL;
    if (ftp_solve(inst, FTP_ALGORITHM_AUTO, &sol) != FTP_STATUS_OK) return 11;
    printf("cost=%lld edges=%zu\n", (long long)ftp_solution_cost(sol), ftp_solution_edge_count(sol));
    ftp_solution_free(sol);
    char *value = NULL;
    if (ftp_frac_value(inst, &value) != FTP_STATUS_OK) return 12;
    printf("frac=%s\n", value);
    ftp_string_free(value);
    if (ftp_solve(NULL, FTP_ALGORITHM_AUTO, &sol) != FTP_STATUS_NULL_POINTER) return 13;
    printf("error=%s\n", ftp_last_error());
    ftp_instance_free(inst);
    return 0;
}
"#;

fn target_dir() -> PathBuf {
    // tests run from <target>/<profile>/deps
    let exe = std::env::current_exe().unwrap();
    exe.parent().and_then(Path::parent).unwrap().to_path_buf()
}

#[test]
fn c_program_links_and_runs() {
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("main.c");
    std::fs::write(&src, PROGRAM).unwrap();
    let include = Path::new(env!("CARGO_MANIFEST_DIR")).join("include");
    let lib = target_dir().join("libftp_ffi.a");
    assert!(lib.exists(), "missing {}", lib.display());
    let exe = dir.path().join("main");
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    let status = Command::new(&cc)
        .args(["-std=c99", "-Wall", "-Werror", "-o"])
        .arg(&exe)
        .arg(&src)
        .arg("-I")
        .arg(&include)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm"])
        .status()
        .expect("C compiler available");
    assert!(status.success());
    let out = Command::new(&exe).output().unwrap();
    assert!(out.status.success(), "{out:?}");
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "cost=2 edges=2\nfrac=4/3\nerror=instance is null\n");
}
