use std::path::Path;
use std::process::{Command, Output};

use polariton::cli::{parse_config, RunConfig};

fn polc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_polc"))
        .args(args)
        .output()
        .expect("polc runs")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn bands_is_deterministic() {
    let a = polc(&[
        "bands",
        "--params",
        "fig2.json",
        "--n-points",
        "101",
        "--quiet",
    ]);
    let b = polc(&[
        "bands",
        "--params",
        "fig2.json",
        "--n-points",
        "101",
        "--quiet",
    ]);
    assert!(a.status.success(), "{}", stderr(&a));
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "kl,omega_ph_k,omega_at_k,delta_omega,Omega_1,Omega_2,mu1_sq,mu2_sq,v1,v2"
    );
    assert_eq!(lines.count(), 101);
}

#[test]
fn echoed_config_reproduces_the_run() {
    let dir = tempfile::tempdir().unwrap();
    let first = polc(&["masses", "--params", "reduced.json", "--M", "5"]);
    assert!(first.status.success(), "{}", stderr(&first));
    let echo = stderr(&first);
    let cfg: RunConfig = serde_json::from_str(&echo).unwrap();
    assert_eq!(cfg.params.m, 5);
    let path = dir.path().join("run.json");
    std::fs::write(&path, &echo).unwrap();
    let second = polc(&["--config", path.to_str().unwrap()]);
    assert!(second.status.success(), "{}", stderr(&second));
    assert_eq!(first.stdout, second.stdout);
    let reparsed: RunConfig = serde_json::from_str(&stderr(&second)).unwrap();
    assert_eq!(reparsed, cfg);
}

#[test]
fn config_round_trip_in_process() {
    let cfg = parse_config([
        "polc",
        "packet",
        "--mode",
        "full-band",
        "--d-store",
        "-8",
        "--grid-n",
        "1024",
    ])
    .unwrap();
    let json = cfg.to_json();
    let back: RunConfig = serde_json::from_str(&json).unwrap();
    assert_eq!(back, cfg);
}

#[test]
fn exit_codes() {
    assert_eq!(polc(&["--help"]).status.code(), Some(0));
    let bad = polc(&["bands", "--n-points", "abc"]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(stderr(&bad).contains("abc"));
    assert_eq!(
        polc(&["bands", "--params", "/no/such.json"]).status.code(),
        Some(1)
    );
    assert_eq!(
        polc(&["oracle", "--params", "reduced.json", "--M", "2"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(polc(&["bands", "--n-points", "1"]).status.code(), Some(1));
    // Too few steps for the grid's largest momentum: numerical failure.
    let dir = tempfile::tempdir().unwrap();
    let coarse = polc(&[
        "packet",
        "--steps",
        "10",
        "--quiet",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(coarse.status.code(), Some(2));
    assert!(stderr(&coarse).contains("segment 0"));
}

#[test]
fn oracle_writes_csv_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("oracle.csv");
    let out = polc(&[
        "oracle",
        "--params",
        "fig2.json",
        "--quiet",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let csv = std::fs::read_to_string(&path).unwrap();
    assert_eq!(csv.lines().next().unwrap(), "oracle_rad_s,analytic_rad_s");
    assert_eq!(csv.lines().count(), 1 + 16);
    assert!(String::from_utf8_lossy(&out.stdout).contains("max_rel_dev"));
}

#[test]
fn masses_and_degeneracy_output() {
    let out = polc(&["masses", "--params", "fig2.json", "--quiet"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let m2r = v["m_2_resonant_kg"].as_f64().unwrap();
    assert!((m2r / 1e-35 - 1.0).abs() < 0.01);
    let gap = v["rabi_gap_2g_rad_s"].as_f64().unwrap();
    assert!((gap / (4.0 * std::f64::consts::PI * 2e9) - 1.0).abs() < 1e-12);

    let out = polc(&[
        "degeneracy",
        "--n1",
        "1e6",
        "--T",
        "300",
        "--m2",
        "1e-35",
        "--quiet",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let td_line = text.lines().find(|l| l.starts_with("T_d")).unwrap();
    let td: f64 = td_line.split_whitespace().nth(1).unwrap().parse().unwrap();
    assert!(td >= 300.0);
}

fn read_csv(path: &Path) -> (String, Vec<Vec<f64>>) {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap().to_string();
    let rows = lines
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect();
    (header, rows)
}

#[test]
fn packet_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = polc(&[
        "packet",
        "--protocol",
        "default",
        "--mode",
        "parabolic",
        "--quiet",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let (header, rows) = read_csv(&dir.path().join("trace.csv"));
    assert_eq!(header, "tau,center_X,sigma_X,norm");
    assert!(rows.iter().all(|r| (r[3] - 1.0).abs() < 1e-10));
    for tau in ["0.0000", "0.2500", "0.5000", "0.7500", "1.0000"] {
        let (h, env) = read_csv(&dir.path().join(format!("envelope_tau_{tau}.csv")));
        assert_eq!(h, "X,S");
        assert_eq!(env.len(), 2048);
    }
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("summary.json")).unwrap())
            .unwrap();
    assert!(summary["round_trip_overlap"].as_f64().unwrap() >= 0.99);
    assert!(summary["t_stor_over_tau_b"].as_f64().unwrap() > 0.0);
    assert_eq!(summary["plateau_velocities"].as_array().unwrap().len(), 3);
}

#[test]
fn custom_schedule_file() {
    let dir = tempfile::tempdir().unwrap();
    let sched = dir.path().join("s.json");
    std::fs::write(
        &sched,
        r#"{"segments":[{"tau_start":0,"tau_end":0.1,"d_start":3,"d_end":3}]}"#,
    )
    .unwrap();
    let out_dir = dir.path().join("run");
    let out = polc(&[
        "packet",
        "--protocol",
        sched.to_str().unwrap(),
        "--grid-n",
        "512",
        "--snapshots",
        "0,0.1",
        "--quiet",
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(out_dir.join("envelope_tau_0.1000.csv").exists());

    std::fs::write(
        &sched,
        r#"{"segments":[{"tau_start":0.2,"tau_end":0.1,"d_start":3,"d_end":3}]}"#,
    )
    .unwrap();
    let bad = polc(&["packet", "--protocol", sched.to_str().unwrap(), "--quiet"]);
    assert_eq!(bad.status.code(), Some(1));
}

proptest::proptest! {
    #[test]
    fn params_json_round_trip(
        cells in 3usize..64,
        l in 1e-9f64..1e-2,
        g in 1e-3f64..1e12,
        alpha in 1e-3f64..1e13,
        beta in 1e-3f64..1e13,
        w_ph in 1.0f64..1e16,
        w_ab in 1.0f64..1e16,
    ) {
        let p = polariton::CrystalParams { cells, l, g, alpha, beta, omega_ph: w_ph, omega_ab: w_ab };
        let file = polariton::params::ParamsFile::from(&p);
        let text = serde_json::to_string(&file).unwrap();
        let back = polariton::params::ParamsFile::from_json(&text).unwrap();
        proptest::prop_assert_eq!(back.resolve().unwrap(), p);
    }
}
