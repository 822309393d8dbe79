use std::path::PathBuf;
use std::process::Command;

/// Directory holding the cdylib built alongside this test binary.
fn artifact_dir() -> PathBuf {
    let exe = std::env::current_exe().unwrap();
    exe.parent().and_then(|deps| deps.parent()).unwrap().to_path_buf()
}

#[test]
fn python_smoke_test() {
    let lib = artifact_dir().join("libmcfin_py.so");
    assert!(lib.exists(), "{} not built", lib.display());
    let dir = std::env::temp_dir().join(format!("mcfin-py-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    std::fs::copy(&lib, dir.join("mcfin.so")).unwrap();
    let script = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("python/smoke_test.py");
    let out = Command::new("python3")
        .arg(&script)
        .env("MCFIN_PY_PATH", &dir)
        .output()
        .expect("python3 on PATH");
    std::fs::remove_dir_all(&dir).ok();
    assert!(
        out.status.success(),
        "stdout:\n{}\nstderr:\n{}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(String::from_utf8_lossy(&out.stdout).contains("smoke test passed"));
}
