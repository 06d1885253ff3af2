use std::fs;
use std::process::{Command, Output};

use weil_lab::linalg::{read_matrix, unitarity_defect};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_weil-lab"));
    c.env_remove("WEIL_LAB_OUT");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn euler_kind(disc: i64, p: i64) -> &'static str {
    let d = disc.rem_euclid(p);
    if d == 0 {
        return "ramified";
    }
    let mut acc = 1i64;
    for _ in 0..(p - 1) / 2 {
        acc = acc * d % p;
    }
    if acc == 1 {
        "split"
    } else {
        "inert"
    }
}

#[test]
fn classify_matches_euler_criterion() {
    let o = run(&["classify", "--matrix", "2,1;1,1", "--primes", "5..13"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let rows: Vec<&str> = text.lines().skip(1).collect();
    let expect: Vec<String> = [5, 7, 11, 13]
        .iter()
        .map(|&p| format!("{p},{}", euler_kind(5, p)))
        .collect();
    assert_eq!(rows, expect);
    assert_eq!(rows, ["5,ramified", "7,inert", "11,split", "13,inert"]);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(
        run(&["classify", "--primes", "5..13", "--bogus"]).status.code(),
        Some(2)
    );
    assert_eq!(
        run(&["classify", "--matrix", "1,1;1,1", "--primes", "5..13"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(run(&["sweep", "--primes", "9..3"]).status.code(), Some(2));
    assert_eq!(run(&[]).status.code(), Some(2));
}

#[test]
fn sweep_is_byte_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for (dir, jobs) in [(&a, "1"), (&b, "2")] {
        let o = run(&[
            "sweep",
            "--primes",
            "3..29",
            "--realizations",
            "all",
            "--seed",
            "5",
            "--jobs",
            jobs,
            "--out",
            dir.path().to_str().unwrap(),
        ]);
        assert!(o.status.code().is_some());
    }
    let x = fs::read(a.path().join("sweep.csv")).unwrap();
    let y = fs::read(b.path().join("sweep.csv")).unwrap();
    assert_eq!(x, y);
}

#[test]
fn sweep_exit_code_reflects_gating() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    // inert primes only: bound holds
    let o = run(&["sweep", "--primes", "7..7", "--realizations", "all", "--out", out]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("# weil-lab sweep v1"));
    assert_eq!(
        lines.next(),
        Some("p,kind,realization,character,multiplicity,sup,argmax,a_max,pass")
    );
    assert_eq!(lines.count(), 8 * 7);

    // split primes exceed 2 slightly under the ‖Ψ‖² = p normalization
    let o = run(&["sweep", "--primes", "5..61", "--realizations", "all", "--out", out]);
    assert_eq!(o.status.code(), Some(1));
    let csv = fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    for row in csv.lines().skip(2) {
        let f: Vec<&str> = row.split(',').collect();
        assert_eq!(f.len(), 9);
        if f[8] == "false" && f[4] == "1" {
            assert_eq!(f[1], "split");
        }
    }
    assert!(stdout(&o).contains("skipped p = 5: ramified"));
}

#[test]
fn json_lines_mirror_csv_fields() {
    let o = run(&["sweep", "--primes", "7..7", "--format", "json"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let rows: Vec<serde_json::Value> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(rows.len(), 7);
    let keys: Vec<&String> = rows[0].as_object().unwrap().keys().collect();
    for k in [
        "p",
        "kind",
        "realization",
        "character",
        "multiplicity",
        "sup",
        "argmax",
        "a_max",
        "pass",
    ] {
        assert!(keys.iter().any(|x| x.as_str() == k), "missing {k}");
    }
    assert_eq!(keys.len(), 9);
}

#[test]
fn env_out_dir_and_flag_precedence() {
    let env_dir = tempfile::tempdir().unwrap();
    let flag_dir = tempfile::tempdir().unwrap();
    let o = bin()
        .env("WEIL_LAB_OUT", env_dir.path())
        .args(["classify", "--primes", "7..11"])
        .output()
        .unwrap();
    assert!(o.status.success());
    assert!(env_dir.path().join("classify.csv").exists());
    let o = bin()
        .env("WEIL_LAB_OUT", env_dir.path())
        .args([
            "distribution",
            "--primes",
            "101..113",
            "--out",
            flag_dir.path().to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(o.status.success());
    assert!(flag_dir.path().join("distribution.csv").exists());
    assert!(!env_dir.path().join("distribution.csv").exists());
}

#[test]
fn distribution_rejects_split_range() {
    let o = run(&["distribution", "--primes", "11..11"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("split"));
}

#[test]
fn spectrum_dumps_unitary_operators_and_eigenfunctions() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&[
        "spectrum",
        "--prime",
        "7",
        "--realization",
        "1:3",
        "--dump-operators",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let ops: Vec<_> = fs::read_dir(dir.path().join("operators")).unwrap().collect();
    assert_eq!(ops.len(), 8);
    let m = read_matrix(&fs::read_to_string(dir.path().join("operators/rho_0003.txt")).unwrap()).unwrap();
    assert_eq!(m.shape(), (7, 7));
    assert!(unitarity_defect(&m) < 1e-12);
    let eig = fs::read_to_string(dir.path().join("eigenfunctions.csv")).unwrap();
    assert_eq!(eig.lines().nth(1), Some("p,kind,character_index,multiplicity,x,re,im"));
    assert_eq!(eig.lines().count(), 2 + 7 * 7);
    assert!(stdout(&o).contains("realization 1:3"));
}

#[test]
fn selftest_passes() {
    let o = run(&["selftest", "--primes", "5..11"]);
    assert!(o.status.success());
    let text = String::from_utf8_lossy(&o.stderr);
    assert!(text.lines().all(|l| l.starts_with("PASS")));
    assert!(text.contains("projector identity"));
}
