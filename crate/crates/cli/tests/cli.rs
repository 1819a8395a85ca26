//! End-to-end CLI checks: exit codes, deterministic artifacts, the
//! output-directory override, and manifest aggregation.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_hypharm")
}

fn run_in(dir: &Path, args: &[&str]) -> Output {
    Command::new(bin())
        .args(args)
        .env_remove("HYPHARM_OUT")
        .current_dir(dir)
        .output()
        .expect("spawn hypharm")
}

fn tempdir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("hypharm-cli-{tag}-{}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn phi_table_matches_closed_form() {
    let dir = tempdir("phi");
    let out = run_in(&dir, &["phi", "--n", "2", "--grid", "5", "--out", "o"]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let csv = fs::read_to_string(dir.join("o/phi_n2.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "r,phi,log_phi");
    for line in lines {
        let cells: Vec<f64> = line.split(',').map(|c| c.parse().unwrap()).collect();
        assert!((cells[1] - (1.0 - cells[0] * cells[0])).abs() < 1e-12);
    }
    // Config echo sits next to the CSV table.
    assert!(dir.join("o/phi_n2.config.json").exists());
}

#[test]
fn upsilon_value_matches_remark() {
    let dir = tempdir("ups");
    let out = run_in(
        &dir,
        &[
            "upsilon",
            "--n",
            "2",
            "--v",
            "12.566370614359172",
            "--out",
            "o",
        ],
    );
    assert!(out.status.success());
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(
        stdout.contains("3.9788735772973"),
        "expected 1/(8 pi) in output: {stdout}"
    );
}

#[test]
fn check_contraction_unit_exits_zero() {
    let dir = tempdir("chk");
    let out = run_in(
        &dir,
        &[
            "check",
            "contraction",
            "--n",
            "2",
            "--r",
            "1",
            "--alphas",
            "2,3",
            "--field",
            "unit",
            "--out",
            "o",
        ],
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let verdict: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.join("o/verdict_contraction.json")).unwrap())
            .unwrap();
    assert_eq!(verdict["schema_version"], 1);
    assert_eq!(verdict["verdict"]["passed"], true);
}

#[test]
fn usage_errors_exit_two() {
    let dir = tempdir("usage");
    let out = run_in(&dir, &["check", "frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run_in(&dir, &["norm", "bergman", "--n", "2", "--p", "2"]);
    // Missing --alpha is reported as an input error.
    assert_eq!(out.status.code(), Some(2));
    let out = run_in(&dir, &["report", "--dir", "does-not-exist"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn outputs_are_byte_identical_for_fixed_seed() {
    let dir = tempdir("det");
    let args = [
        "check",
        "weaktype",
        "--n",
        "2",
        "--p",
        "2",
        "--field",
        "expharm",
        "--seed",
        "42",
        "--t-points",
        "30",
        "--t-span",
        "100",
    ];
    let out1 = run_in(&dir, &[&args[..], &["--out", "a"]].concat());
    assert!(out1.status.success());
    let out2 = run_in(&dir, &[&args[..], &["--out", "b"]].concat());
    assert!(out2.status.success());
    let a = fs::read(dir.join("a/verdict_weaktype.json")).unwrap();
    let b = fs::read(dir.join("b/verdict_weaktype.json")).unwrap();
    // The argv echo differs only in the --out flag; compare after
    // normalizing it away.
    let norm = |bytes: &[u8]| String::from_utf8_lossy(bytes).replace("\"b\"", "\"a\"");
    assert_eq!(norm(&a), norm(&b));
}

#[test]
fn jobs_flag_keeps_outputs_stable() {
    let dir = tempdir("jobs");
    let base = [
        "check",
        "monotone",
        "--n",
        "2",
        "--p",
        "1",
        "--alpha",
        "1",
        "--field",
        "unit,expharm",
        "--seed",
        "7",
        "--t-points",
        "25",
        "--t-span",
        "50",
    ];
    let seq = run_in(&dir, &[&base[..], &["--out", "s", "--jobs", "1"]].concat());
    assert!(
        seq.status.success(),
        "{}",
        String::from_utf8_lossy(&seq.stderr)
    );
    let par = run_in(&dir, &[&base[..], &["--out", "p", "--jobs", "2"]].concat());
    assert!(par.status.success());
    for name in ["verdict_monotone_00.json", "verdict_monotone_01.json"] {
        let a = String::from_utf8_lossy(&fs::read(dir.join("s").join(name)).unwrap())
            .replace("\"s\"", "\"p\"")
            .replace("--jobs\",\n      \"1", "--jobs\",\n      \"2")
            .replace("\"jobs\": 1", "\"jobs\": 2");
        let b = String::from_utf8_lossy(&fs::read(dir.join("p").join(name)).unwrap()).to_string();
        assert_eq!(a, b, "{name} differs between --jobs 1 and --jobs 2");
    }
}

#[test]
fn env_var_overrides_output_dir() {
    let dir = tempdir("env");
    let out = Command::new(bin())
        .args(["calpha", "--n", "2", "--alphas", "2", "--out", "ignored"])
        .env("HYPHARM_OUT", dir.join("env-out"))
        .current_dir(&dir)
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(dir.join("env-out/calpha_n2.csv").exists());
    assert!(!dir.join("ignored").exists());
    // c(2) = alpha - 1 = 1 for n = 2.
    let csv = fs::read_to_string(dir.join("env-out/calpha_n2.csv")).unwrap();
    let row = csv.lines().nth(1).unwrap();
    let c: f64 = row.split(',').nth(1).unwrap().parse().unwrap();
    assert!((c - 1.0).abs() < 1e-8);
}

#[test]
fn field_file_and_inline_expressions() {
    let dir = tempdir("field");
    fs::write(
        dir.join("field.txt"),
        "# a positive combination\n(poscomb 0.6 (constant 1) 0.4 (expharmonic 0.2 0.1 0))\n",
    )
    .unwrap();
    let out = run_in(
        &dir,
        &[
            "norm",
            "hardy",
            "--n",
            "2",
            "--p",
            "2",
            "--field",
            "@field.txt",
            "--out",
            "o",
        ],
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let out = run_in(
        &dir,
        &[
            "norm",
            "hardy",
            "--n",
            "2",
            "--p",
            "2",
            "--field",
            "(constant 2)",
            "--out",
            "o",
        ],
    );
    assert!(out.status.success());
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("2.0000000000"), "constant norm: {stdout}");
}

#[test]
fn config_file_fills_missing_flags() {
    let dir = tempdir("cfg");
    fs::write(dir.join("run.conf"), "n = 3\nseed = 9\nformat = json\n").unwrap();
    let out = run_in(
        &dir,
        &["phi", "--grid", "3", "--config", "run.conf", "--out", "o"],
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    // n came from the config file, format json produced a .json table.
    let text = fs::read_to_string(dir.join("o/phi_n3.json")).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["schema_version"], 1);
    // Flags win over the config file.
    let out = run_in(
        &dir,
        &[
            "phi", "--n", "2", "--grid", "3", "--config", "run.conf", "--format", "csv", "--out",
            "o",
        ],
    );
    assert!(out.status.success());
    assert!(dir.join("o/phi_n2.csv").exists());
}

#[test]
fn lemma_check_and_report_manifest() {
    let dir = tempdir("report");
    let out = run_in(
        &dir,
        &[
            "check", "lemma", "--trials", "60", "--seed", "3", "--out", "o",
        ],
    );
    assert!(out.status.success());
    let out = run_in(
        &dir,
        &[
            "check",
            "coeff",
            "--p",
            "1.5",
            "--mappings",
            "6",
            "--degree",
            "6",
            "--out",
            "o",
        ],
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let out = run_in(&dir, &["report", "--dir", "o", "--out", "o"]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.join("o/manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["all_passed"], true);
    assert_eq!(manifest["runs"].as_array().unwrap().len(), 2);
}

#[test]
fn csv_cells_round_trip_through_json() {
    // Every numeric cell written to CSV parses back to the exact f64
    // that the JSON table carries.
    let dir = tempdir("roundtrip");
    let out = run_in(
        &dir,
        &[
            "phi", "--n", "3", "--grid", "7", "--out", "c", "--format", "csv",
        ],
    );
    assert!(out.status.success());
    let out = run_in(
        &dir,
        &[
            "phi", "--n", "3", "--grid", "7", "--out", "j", "--format", "json",
        ],
    );
    assert!(out.status.success());
    let csv = fs::read_to_string(dir.join("c/phi_n3.csv")).unwrap();
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.join("j/phi_n3.json")).unwrap()).unwrap();
    let rows = json["rows"].as_array().unwrap();
    for (line, row) in csv.lines().skip(1).zip(rows) {
        for (cell, jval) in line.split(',').zip(row.as_array().unwrap()) {
            let from_csv: f64 = cell.parse().unwrap();
            let from_json = jval.as_f64().unwrap();
            assert_eq!(from_csv.to_bits(), from_json.to_bits());
        }
    }
}

#[test]
fn levelset_and_remaining_suites_smoke() {
    let dir = tempdir("smoke");
    let runs: &[&[&str]] = &[
        &[
            "levelset",
            "--n",
            "2",
            "--field",
            "unit",
            "--a",
            "1",
            "--alpha",
            "1",
            "--t-points",
            "20",
            "--t-span",
            "50",
            "--out",
            "o",
        ],
        &[
            "check",
            "limits",
            "--n",
            "2",
            "--p",
            "2",
            "--field",
            "planar-abs-z",
            "--alphas",
            "1.5,1.2,1.05",
            "--out",
            "o",
        ],
        &[
            "check",
            "hardy-thm",
            "--n",
            "2",
            "--p",
            "2",
            "--field",
            "expharm",
            "--transform",
            "power:2",
            "--t-points",
            "30",
            "--t-span",
            "100",
            "--out",
            "o",
        ],
        &[
            "check",
            "bergman-thm",
            "--n",
            "2",
            "--p",
            "2",
            "--alpha",
            "2",
            "--field",
            "unit",
            "--transform",
            "pwl:0,0;1,0.5;2,2",
            "--t-points",
            "30",
            "--t-span",
            "100",
            "--out",
            "o",
        ],
        &[
            "check",
            "isoperim",
            "--p",
            "2",
            "--mappings",
            "5",
            "--degree",
            "4",
            "--out",
            "o",
        ],
        &[
            "check",
            "co32",
            "--p",
            "2",
            "--alpha",
            "2",
            "--mappings",
            "5",
            "--degree",
            "4",
            "--out",
            "o",
        ],
    ];
    for args in runs {
        let out = run_in(&dir, args);
        assert!(
            out.status.success(),
            "{:?}: {}",
            args,
            String::from_utf8_lossy(&out.stderr)
        );
    }
    // The levelset table carries the g columns.
    let csv = fs::read_to_string(dir.join("o/levelset_n2_a1_al1.csv")).unwrap();
    assert!(csv.starts_with("t,mu,mu_err,g,g_err"));
    // g ≡ 1 for the unit field.
    for line in csv.lines().skip(1) {
        let g: f64 = line.split(',').nth(3).unwrap().parse().unwrap();
        assert!((g - 1.0).abs() < 1e-5, "{line}");
    }
    // Coefficient file input drives the planar checks.
    fs::write(dir.join("f.csv"), "k,ra,ia,rb,ib\n0,1,0,0,0\n1,1,0,0,0\n").unwrap();
    let out = run_in(
        &dir,
        &[
            "check", "isoperim", "--p", "2", "--coeffs", "f.csv", "--out", "o",
        ],
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn norm_csv_output_and_bad_field() {
    let dir = tempdir("normcsv");
    let out = run_in(
        &dir,
        &[
            "norm",
            "bergman",
            "--n",
            "2",
            "--p",
            "2",
            "--alpha",
            "2",
            "--field",
            "planar-abs-z",
            "--format",
            "csv",
            "--out",
            "o",
        ],
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let csv = fs::read_to_string(dir.join("o/norm_bergman_n2_p2_a2.csv")).unwrap();
    assert!(csv.starts_with("n,p,alpha,value,error,seed"));
    let value: f64 = csv
        .lines()
        .nth(1)
        .unwrap()
        .split(',')
        .nth(3)
        .unwrap()
        .parse()
        .unwrap();
    assert!((value - 0.5f64.sqrt()).abs() < 1e-7, "got {value}");

    let out = run_in(
        &dir,
        &[
            "norm", "hardy", "--n", "2", "--p", "2", "--field", "no-such",
        ],
    );
    assert_eq!(out.status.code(), Some(2));
    let out = run_in(
        &dir,
        &[
            "norm",
            "hardy",
            "--n",
            "3",
            "--p",
            "2",
            "--field",
            "planar-abs-z",
        ],
    );
    assert_eq!(out.status.code(), Some(2), "planar field must reject n = 3");
}
