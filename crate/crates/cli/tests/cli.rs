use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use twostage_cli::commands::{ClassifyReport, MonotoneReport, NgmReport};

const R0_REFERENCE: f64 = 3.9327471467109305;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_twostage"))
}

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

fn scratch(test: &str) -> PathBuf {
    let dir = Path::new(env!("CARGO_TARGET_TMPDIR")).join(test);
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn run(cmd: &mut Command) -> Output {
    cmd.output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn classify(dir: &Path, a: &str, u: &str, v: &str) -> Output {
    let (a, u, v) = (write(dir, "a.csv", a), write(dir, "u.csv", u), write(dir, "v.csv", v));
    run(bin().arg("classify").arg("--a").arg(a).arg("--u").arg(u).arg("--v").arg(v))
}

#[test]
fn classify_jacobi_example() {
    let dir = scratch("classify_jacobi");
    let out = classify(&dir, "2,-1\n-1,2\n", "2,0\n0,2\n", "0,1\n1,0\n");
    assert_eq!(out.status.code(), Some(0));
    let r: ClassifyReport = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(r.regular && r.weak_type1 && r.weak_type2 && r.convergent);
    assert!((r.rho - 0.5).abs() < 1e-12);
}

#[test]
fn classify_zero_v() {
    let dir = scratch("classify_zero_v");
    let out = classify(&dir, "2,-1\n-1,2\n", "2,-1\n-1,2\n", "0,0\n0,0\n");
    let r: ClassifyReport = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(r.regular);
    assert_eq!(r.rho, 0.0);
}

#[test]
fn classify_exit_codes() {
    let dir = scratch("classify_codes");
    assert_eq!(classify(&dir, "2,-1\n-1,2\n", "2,0\n0,2\n", "0,1\n1,1\n").status.code(), Some(3));
    assert_eq!(classify(&dir, "2,-1\n-1,2\n", "1,1\n1,1\n", "-1,2\n2,-1\n").status.code(), Some(4));
    assert_eq!(classify(&dir, "2,-1\n-1,x\n", "2,0\n0,2\n", "0,1\n1,0\n").status.code(), Some(2));
    assert_eq!(classify(&dir, "2,-1\n-1,2\n", "2,0,0\n0,2,0\n", "0,1\n1,0\n").status.code(), Some(3));
}

#[test]
fn classify_csv_format() {
    let dir = scratch("classify_csv");
    let (a, u, v) = (write(&dir, "a.csv", "4\n"), write(&dir, "u.csv", "5\n"), write(&dir, "v.csv", "1\n"));
    let out = run(bin().args(["--format", "csv", "classify"]).arg("--a").arg(a).arg("--u").arg(u).arg("--v").arg(v));
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "regular,weak_type1,weak_type2,rho,convergent");
    assert_eq!(lines[1].split(',').nth(3).unwrap().parse::<f64>().unwrap(), 0.2);
}

fn ngm(args: &[&str], params: &Path) -> (Output, Option<NgmReport>) {
    let out = run(bin().arg("ngm").arg("--params").arg(params).args(args));
    let report = serde_json::from_str(&stdout(&out)).ok();
    (out, report)
}

#[test]
fn ngm_reference_r0() {
    let (out, r) = ngm(&[], &data("saiuqr_phi007.params"));
    assert_eq!(out.status.code(), Some(0));
    let r = r.unwrap();
    assert!((r.r0 - R0_REFERENCE).abs() / R0_REFERENCE <= 1e-9);
    assert_eq!(r.size, 4);
}

#[test]
fn ngm_two_stage_agrees() {
    let (_, r) = ngm(&["--method", "twostage", "--omega", "1.7", "--s", "2"], &data("saiuqr_phi007.params"));
    assert!((r.unwrap().r0 - R0_REFERENCE).abs() <= 1e-6);
}

#[test]
fn ngm_zero_beta_and_errors() {
    let dir = scratch("ngm_errors");
    let (_, r) = ngm(&[], &write(&dir, "b0", "beta = 0\n"));
    assert_eq!(r.unwrap().r0, 0.0);
    let (out, _) = ngm(&[], &write(&dir, "sing", "xi_a=0\ngamma_a=0\neta_a=0\ndelta=0\n"));
    assert_eq!(out.status.code(), Some(5));
    let (out, _) = ngm(&[], &write(&dir, "bad", "beta = fast\n"));
    assert_eq!(out.status.code(), Some(2));
    let (out, _) = ngm(&["--method", "twostage", "--max-outer", "3"], &data("saiuqr_phi007.params"));
    assert_eq!(out.status.code(), Some(6));
}

#[test]
fn ngm_with_identity_contacts() {
    let dir = scratch("ngm_contacts");
    let contact: String = (0..16).map(|i| (0..16).map(|j| if i == j { "1" } else { "0" }).collect::<Vec<_>>().join(",") + "\n").collect();
    let c = write(&dir, "c.csv", &contact);
    let n = write(&dir, "n.csv", &vec!["1000"; 16].join(","));
    let out = run(bin().arg("ngm").arg("--params").arg(data("saiuqr_phi007.params")).arg("--contact").arg(c).arg("--populations").arg(n));
    let r: NgmReport = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(r.size, 64);
    assert!((r.r0 - R0_REFERENCE).abs() / R0_REFERENCE <= 1e-9);
}

#[test]
fn json_round_trips_bit_exactly() {
    let (out, r) = ngm(&[], &data("saiuqr_phi010.params"));
    let r = r.unwrap();
    let params = twostage_cli::input::read_params(&data("saiuqr_phi010.params")).unwrap();
    assert_eq!(params, twostage_core::SaiuqrParams::reference());
    let lib = twostage_cli::commands::ngm_report(
        &params,
        None,
        &twostage_core::NgmMethod::Direct,
    )
    .unwrap();
    assert_eq!(r.r0.to_bits(), lib.r0.to_bits());
    assert_eq!(r.a_inverse_checksum.to_bits(), lib.a_inverse_checksum.to_bits());
    for (x, y) in r.ngm_first_row.iter().zip(&lib.ngm_first_row) {
        assert_eq!(x.to_bits(), y.to_bits());
    }
    assert_eq!(serde_json::to_string_pretty(&r).unwrap() + "\n", stdout(&out));
}

fn table(args: &[&str]) -> (Output, Vec<Vec<String>>) {
    let out = run(bin().arg("table1").arg("--params").arg(data("saiuqr_phi010.params")).args(args));
    let rows = stdout(&out).lines().skip(1).map(|l| l.split(',').map(String::from).collect()).collect();
    (out, rows)
}

#[test]
fn table1_shape_and_trends() {
    let (out, rows) = table(&[]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(rows.len(), 8);
    for size_rows in rows.chunks(4) {
        for col in 2..5 {
            let counts: Vec<usize> = size_rows.iter().map(|r| r[col].parse().unwrap()).collect();
            assert!(counts.windows(2).all(|w| w[0] < w[1]), "column {col}: {counts:?}");
        }
    }
    for r in &rows[4..] {
        let rho: f64 = r[6].parse().unwrap();
        assert!(rho > 0.0 && rho < 1.0);
        assert!(r[5].is_empty());
    }
    for r in &rows[..4] {
        assert!(r[6].is_empty() && !r[5].is_empty());
    }
}

#[test]
fn table1_is_deterministic_and_reports_non_convergence() {
    let (a, _) = table(&["--sizes", "4", "--phis", "0.1,0.07"]);
    let (b, _) = table(&["--sizes", "4", "--phis", "0.1,0.07"]);
    assert_eq!(a.stdout, b.stdout);
    let (out, rows) = table(&["--sizes", "4", "--phis", "0.1", "--max-outer", "10"]);
    assert_eq!(out.status.code(), Some(6));
    assert_eq!(rows[0][7], "false");
    let (out, _) = table(&["--sizes", "6"]);
    assert_eq!(out.status.code(), Some(2));
}

fn monotone(args: &[&str]) -> (Output, Option<MonotoneReport>) {
    let out = run(bin()
        .args(["--format", "json", "monotone", "--params"])
        .arg(data("saiuqr_phi010.params"))
        .args(args));
    let r = serde_json::from_str(&stdout(&out)).ok();
    (out, r)
}

#[test]
fn monotone_with_reference_initials() {
    let (out, r) = monotone(&["--x0", "0,0,0,0", "--y0", "106.5647,10,1,241.9189"]);
    assert_eq!(out.status.code(), Some(0));
    let r = r.unwrap();
    for k in 1..r.lower.len() {
        for i in 0..4 {
            assert!(r.lower[k][i] >= r.lower[k - 1][i] - 1e-10);
            assert!(r.upper[k][i] <= r.upper[k - 1][i] + 1e-10);
        }
    }
    let last = r.lower.len() - 1;
    for i in 0..4 {
        assert!((r.lower[last][i] - r.solution[i]).abs() <= 1e-6);
        assert!((r.upper[last][i] - r.solution[i]).abs() <= 1e-6);
    }
    assert!(!r.a_nonneg);
}

#[test]
fn monotone_from_the_solution_is_one_row() {
    let (_, r) = monotone(&[]);
    let sol = r.unwrap().solution;
    let s: Vec<String> = sol.iter().map(|v| format!("{v:e}")).collect();
    let s = s.join(",");
    let out = run(bin()
        .args(["monotone", "--params"])
        .arg(data("saiuqr_phi010.params"))
        .args(["--x0", &s, "--y0", &s]));
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).lines().count(), 2);
}

#[test]
fn monotone_hypothesis_failure() {
    let (out, _) = monotone(&["--x0", "0,0,0,0", "--y0", "1,1,1,1"]);
    assert_eq!(out.status.code(), Some(7));
    assert!(String::from_utf8_lossy(&out.stderr).contains("y0"));
}

#[test]
fn compare_gauss_seidel_with_jacobi() {
    let dir = scratch("compare");
    let a = write(&dir, "a.csv", "4,-1,-1\n-1,4,-1\n-1,-1,4\n");
    let u1 = write(&dir, "u1.csv", "4,0,0\n-1,4,0\n-1,-1,4\n");
    let v1 = write(&dir, "v1.csv", "0,1,1\n0,0,1\n0,0,0\n");
    let u2 = write(&dir, "u2.csv", "4,0,0\n0,4,0\n0,0,4\n");
    let v2 = write(&dir, "v2.csv", "0,1,1\n1,0,1\n1,1,0\n");
    let out = run(bin().arg("compare").arg("--a").arg(&a).arg("--u1").arg(u1).arg("--v1").arg(v1).arg("--u2").arg(u2).arg("--v2").arg(v2));
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(v["rho1"].as_f64().unwrap() < v["rho2"].as_f64().unwrap());
    assert!(!v["applied"].as_array().unwrap().is_empty());
}

#[test]
fn solve_matches_direct_solution() {
    let dir = scratch("solve");
    let a = write(&dir, "a.csv", "4,-1,0\n-1,4,-1\n0,-1,4\n");
    let b = write(&dir, "b.csv", "3\n2\n3\n");
    for method in ["one-stage", "two-stage"] {
        let out = run(bin().arg("solve").arg("--a").arg(&a).arg("--b").arg(&b).args(["--method", method, "--eps", "1e-13"]));
        assert_eq!(out.status.code(), Some(0));
        let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
        for row in v["solution"].as_array().unwrap() {
            assert!((row[0].as_f64().unwrap() - 1.0).abs() < 1e-12);
        }
    }
    let out = run(bin().arg("solve").arg("--a").arg(&a).arg("--b").arg(&b).args(["--max-outer", "2"]));
    assert_eq!(out.status.code(), Some(6));
}
