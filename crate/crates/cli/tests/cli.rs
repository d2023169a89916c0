use std::process::{Command, Output};

fn eapm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_eapm"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines()
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn curves_at_reference_energies() {
    let o = eapm(&[
        "w2-curves",
        "--omega-start",
        "0.2",
        "--omega-stop",
        "0.2",
        "--omega-step",
        "0.1",
    ]);
    assert!(o.status.success());
    let r = rows(&stdout(&o));
    assert_eq!(
        r[0],
        [
            "omega",
            "w2_qc",
            "r_qubit",
            "w2_qubit",
            "r_qutrit",
            "w2_qutrit"
        ]
    );
    assert_eq!(r[1][1], "0.9");

    let o = eapm(&[
        "w2-curves",
        "--omega-start",
        "0.5",
        "--omega-stop",
        "0.5",
        "--omega-step",
        "0.1",
    ]);
    let r = rows(&stdout(&o));
    for col in [1, 3, 5] {
        assert_eq!(r[1][col], "1");
    }

    let t = format!("{}", 2f64.sqrt() - 1.0);
    let o = eapm(&[
        "w2-curves",
        "--omega-start",
        &t,
        "--omega-stop",
        &t,
        "--omega-step",
        "0.1",
        "--scheme",
        "qutrit",
    ]);
    let r = rows(&stdout(&o));
    let v: f64 = r[1][2].parse().unwrap();
    assert!((v - 1.0).abs() < 1e-6);
}

#[test]
fn csv_is_lf_terminated_and_grid_sized() {
    let o = eapm(&["w2-curves", "--scheme", "qc"]);
    let s = stdout(&o);
    assert!(!s.contains('\r'));
    assert_eq!(s.lines().count(), 51);
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let args = |p: &str| {
        vec![
            "correlator-region".to_string(),
            "--e0-points".into(),
            "5".into(),
            "--restarts".into(),
            "3".into(),
            "--seed".into(),
            "7".into(),
            "--out".into(),
            p.to_string(),
        ]
    };
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for p in [&a, &b] {
        let argv = args(p.to_str().unwrap());
        let o = eapm(&argv.iter().map(String::as_str).collect::<Vec<_>>());
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let (a, b) = (std::fs::read(a).unwrap(), std::fs::read(b).unwrap());
    assert_eq!(a, b);
    // the entangled interval contains the unentangled one on every row
    for r in rows(std::str::from_utf8(&a).unwrap()).iter().skip(1) {
        let v: Vec<f64> = r.iter().map(|c| c.parse().unwrap()).collect();
        assert!(v[3] <= v[1] + 1e-9 && v[4] >= v[2] - 1e-9);
    }
}

#[test]
fn threshold_energy_region_is_the_full_square() {
    let o = eapm(&[
        "correlator-region",
        "--omega",
        "0.5",
        "--e0-points",
        "5",
        "--restarts",
        "2",
    ]);
    assert!(o.status.success());
    for r in rows(&stdout(&o)).iter().skip(1) {
        assert_eq!(&r[1..], ["-1", "1", "-1", "1"]);
    }
}

#[test]
fn attacks_at_high_energy_leave_no_randomness() {
    let o = eapm(&[
        "attacks",
        "--omega-start",
        "0.45",
        "--omega-stop",
        "0.45",
        "--restarts",
        "2",
        "--max-iters",
        "20",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let r = rows(&stdout(&o));
    assert_eq!(r[0][3], "h_min_attack");
    let h_min: f64 = r[1][3].parse().unwrap();
    let h_vn: f64 = r[1][4].parse().unwrap();
    assert!(h_min.abs() < 1e-6 && h_vn.abs() < 1e-4);
    assert_eq!(r[1][2], "");
}

#[test]
fn classical_reference_column_is_filled_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("ref.csv");
    std::fs::write(&f, "omega,h_min\n0.45,0.125\n").unwrap();
    let o = eapm(&[
        "attacks",
        "--omega-start",
        "0.45",
        "--omega-stop",
        "0.45",
        "--restarts",
        "1",
        "--max-iters",
        "5",
        "--classical-ref",
        f.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    assert_eq!(rows(&stdout(&o))[1][2], "0.125");
}

#[test]
fn verify_passes_and_catches_an_injected_fault() {
    let base = ["verify", "--trials", "200", "--restarts", "4"];
    let o = eapm(&base);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));

    let mut args = base.to_vec();
    args.extend(["--inject-fault", "incomplete-channel"]);
    let o = eapm(&args);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("IncompleteChannel"));
}

#[test]
fn exit_codes_for_bad_input_and_io() {
    let o = eapm(&["w2-curves", "--omega-step", "-0.1"]);
    assert_eq!(o.status.code(), Some(2));
    let o = eapm(&["w2-curves", "--out", "/nonexistent-dir/x.csv"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn json_output_has_columns_and_rows() {
    let o = eapm(&[
        "w2-curves",
        "--omega-start",
        "0.2",
        "--omega-stop",
        "0.3",
        "--format",
        "json",
    ]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["columns"][1], "w2_qc");
    assert_eq!(v["rows"].as_array().unwrap().len(), 11);
    assert_eq!(v["rows"][0][1], 0.9);
}
