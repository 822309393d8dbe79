use std::process::{Command, Output};

fn mcfin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mcfin"))
        .args(args)
        .output()
        .expect("spawn mcfin")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn help(path: &[&str]) -> String {
    let mut args = path.to_vec();
    args.push("--help");
    let o = mcfin(&args);
    assert!(o.status.success(), "{path:?} --help failed");
    stdout(&o)
}

/// Names listed under `Commands:` in a help page, without `help`.
fn subcommands(help_text: &str) -> Vec<String> {
    help_text
        .lines()
        .skip_while(|l| !l.starts_with("Commands:"))
        .skip(1)
        .take_while(|l| l.starts_with("  "))
        .filter_map(|l| l.split_whitespace().next())
        .filter(|name| *name != "help")
        .map(str::to_string)
        .collect()
}

fn examples(help_text: &str) -> Vec<Vec<String>> {
    help_text
        .lines()
        .filter_map(|l| l.trim().strip_prefix("mcfin "))
        .map(|cmd| shlex::split(cmd).expect("balanced quotes"))
        .collect()
}

/// Every leaf subcommand path, found by walking the help pages.
fn leaf_paths() -> Vec<Vec<String>> {
    let mut out = Vec::new();
    let mut stack = vec![Vec::<String>::new()];
    while let Some(path) = stack.pop() {
        let refs: Vec<&str> = path.iter().map(String::as_str).collect();
        let subs = subcommands(&help(&refs));
        if subs.is_empty() {
            out.push(path);
        } else {
            for s in subs {
                let mut p = path.clone();
                p.push(s);
                stack.push(p);
            }
        }
    }
    out.sort();
    out
}

#[test]
fn every_help_example_runs() {
    let paths = leaf_paths();
    assert!(paths.len() >= 16, "found only {paths:?}");
    let mut ran = 0;
    let mut pages: Vec<Vec<String>> = paths;
    pages.push(Vec::new());
    for path in pages {
        let refs: Vec<&str> = path.iter().map(String::as_str).collect();
        let ex = examples(&help(&refs));
        assert!(!ex.is_empty(), "{path:?} has no examples in its help");
        for args in ex {
            let refs: Vec<&str> = args.iter().map(String::as_str).collect();
            let o = mcfin(&refs);
            assert!(
                o.status.success(),
                "mcfin {args:?} exited {:?}: {}",
                o.status.code(),
                String::from_utf8_lossy(&o.stderr)
            );
            assert!(!o.stdout.is_empty(), "mcfin {args:?} printed nothing");
            ran += 1;
        }
    }
    assert!(ran >= 25, "only {ran} examples");
}

#[test]
fn documented_outputs() {
    assert_eq!(stdout(&mcfin(&["gen", "--family", "bell", "--n", "10"])), "115975\n");
    let phi = stdout(&mcfin(&["cex", "phi", "--k", "3"]));
    let bits: Vec<&str> = phi.lines().map(|l| l.rsplit(' ').next().unwrap()).collect();
    assert_eq!(bits, ["000", "100", "010", "111", "001", "101", "011", "110"]);
    assert_eq!(stdout(&mcfin(&["cex", "beta", "--start", "3", "--count", "3"])), "111\n");
}

#[test]
fn report_json_schema() {
    let o = mcfin(&["report", "--family", "bell", "--moduli", "2,3,4,5", "--n-max", "2000", "--format", "json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let entries = v.as_array().unwrap();
    assert_eq!(entries.len(), 4);
    for (e, m) in entries.iter().zip([2, 3, 4, 5]) {
        for key in ["spec", "modulus", "recurrence", "period", "cfinite", "growth"] {
            assert!(e.get(key).is_some(), "missing {key}");
        }
        assert_eq!(e["modulus"], m);
        assert!(e["recurrence"]["order"].is_u64());
        assert!(e["cfinite"].is_null());
    }
    assert_eq!(entries[0]["period"]["q"], 0);
    assert_eq!(entries[0]["period"]["p"], 3);
}

#[test]
fn output_is_deterministic_across_job_counts() {
    let args = ["report", "--family", "fubini", "--moduli", "2,3,4,6,8,12", "--n-max", "300", "--format", "csv"];
    let a = mcfin(&args);
    let mut with_jobs = args.to_vec();
    with_jobs.extend(["--jobs", "1"]);
    let b = mcfin(&with_jobs);
    assert!(a.status.success() && b.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stdout, mcfin(&args).stdout);
}

#[test]
fn timestamps_are_opt_in() {
    let plain = stdout(&mcfin(&["gen", "--family", "bell", "--n", "5"]));
    assert!(!plain.contains("timestamp"));
    let stamped = stdout(&mcfin(&["gen", "--family", "bell", "--n", "5", "--timestamps"]));
    assert!(stamped.starts_with("# timestamp "));
    assert!(stamped.ends_with("52\n"));
}

#[test]
fn exit_codes() {
    // usage errors
    assert_eq!(mcfin(&["gen", "--family", "bell"]).status.code(), Some(2));
    assert_eq!(mcfin(&["gen", "--family", "nope", "--n", "1"]).status.code(), Some(2));
    assert_eq!(mcfin(&["gen", "--family", "bell", "--sizes", "mod 0 in {1}", "--n", "1"]).status.code(), Some(2));
    assert_eq!(mcfin(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(mcfin(&["prs", "cycle", "--preset", "a086714", "--modulus", "8"]).status.code(), Some(2));
    // check failure: Bell against the Catalan b-file
    let o = mcfin(&["crosscheck", "--a", "A000108", "--generator", "--family bell", "--count", "10"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("n = 4"));
    assert!(stdout(&o).contains("expected 14, got 15"));
}

#[test]
fn offline_fetch_is_refused() {
    let cache = std::env::temp_dir().join(format!("mcfin-cli-test-{}", std::process::id()));
    let o = mcfin(&[
        "crosscheck",
        "--a",
        "A000001",
        "--generator",
        "--family bell",
        "--fixtures",
        cache.to_str().unwrap(),
        "--cache-dir",
        cache.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("network disabled"));
}

#[test]
fn prs_file_round_trip() {
    let dir = std::env::temp_dir().join(format!("mcfin-prs-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("pair.prs");
    std::fs::write(&path, "# Fibonacci pair\nx1' = x2\nx2' = x1 + x2\ninit: 0, 1\n").unwrap();
    let o = mcfin(&["prs", "cycle", "--file", path.to_str().unwrap(), "--modulus", "10", "--format", "json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    // Pisano period of 10
    assert_eq!((v["q"].as_u64(), v["p"].as_u64()), (Some(0), Some(60)));
    std::fs::remove_dir_all(&dir).ok();
}
