use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_josephson"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn records(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn field(rows: &[Vec<String>], name: &str, row: usize) -> String {
    let idx = rows[0].iter().position(|h| h == name).unwrap();
    rows[row][idx].clone()
}

#[test]
fn equilibrium_rows() {
    let out = run(&[
        "equilibrium",
        "--epsilon",
        "0.25",
        "--beta",
        "4",
        "--phi",
        "0",
    ]);
    assert!(out.status.success());
    let rows = records(&stdout(&out));
    assert_eq!(
        rows[0],
        ["epsilon", "beta", "beta_c", "lambda", "k", "gap_residual"]
    );
    let lambda: f64 = field(&rows, "lambda", 1).parse().unwrap();
    assert!((lambda - 0.4083).abs() < 5e-5);
    let beta_c: f64 = field(&rows, "beta_c", 1).parse().unwrap();
    assert!((beta_c - 3f64.ln() * 2.0).abs() < 1e-14);

    let below = records(&stdout(&run(&[
        "equilibrium",
        "--epsilon",
        "0.25",
        "--beta",
        "2",
    ])));
    assert_eq!(field(&below, "lambda", 1).parse::<f64>().unwrap(), 0.0);

    let normal = records(&stdout(&run(&[
        "equilibrium",
        "--epsilon",
        "0.6",
        "--beta",
        "50",
    ])));
    assert_eq!(field(&normal, "beta_c", 1), "none");
    assert_eq!(field(&normal, "lambda", 1).parse::<f64>().unwrap(), 0.0);
}

#[test]
fn fields_carry_full_precision() {
    let out = stdout(&run(&["equilibrium", "--epsilon", "0.25", "--beta", "4"]));
    assert!(!out.contains('\r'));
    let lambda = field(&records(&out), "lambda", 1);
    let mantissa = lambda.split('e').next().unwrap().replace(['.', '-'], "");
    assert_eq!(mantissa.len(), 17, "{lambda}");
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(
        run(&["equilibrium", "--epsilon", "0.25"]).status.code(),
        Some(2)
    );
    assert_eq!(
        run(&["equilibrium", "--epsilon", "-1", "--beta", "2"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(run(&["sweep", "--count", "1"]).status.code(), Some(2));
    assert_eq!(
        run(&[
            "sweep",
            "--variable",
            "gamma",
            "--start",
            "1",
            "--stop",
            "0.5"
        ])
        .status
        .code(),
        Some(2)
    );
    assert_eq!(run(&["sweep", "--variable", "mass"]).status.code(), Some(2));
    assert_eq!(run(&["ness", "--gamma", "-0.5"]).status.code(), Some(2));
}

#[test]
fn single_junction_row() {
    let out = run(&["ness", "--phi-ii", "1.5707963267948966"]);
    assert!(out.status.success());
    let rows = records(&stdout(&out));
    assert_eq!(rows.len(), 2);
    let j: f64 = field(&rows, "josephson", 1).parse().unwrap();
    assert!(j < -0.1);
    assert_eq!(field(&rows, "heat_limit", 1).parse::<f64>().unwrap(), 0.0);
    assert!(field(&rows, "entropy_e1", 1).parse::<f64>().unwrap().abs() < 1e-12);
}

#[test]
fn phase_sweep_shape_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for path in [&a, &b] {
        let out = run(&["sweep", "--count", "64", "--output", path.to_str().unwrap()]);
        assert!(out.status.success());
    }
    let (ta, tb) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(ta, tb);

    let rows = records(&String::from_utf8(ta).unwrap());
    assert_eq!(rows.len(), 65);
    assert_eq!(rows[0][0], "delta_phi");
    let j: Vec<f64> = (1..=64)
        .map(|r| field(&rows, "josephson", r).parse().unwrap())
        .collect();
    assert!(j[0].abs() < 1e-10 && j[32].abs() < 1e-10);
    assert!(j[1..32].iter().all(|&v| v < 0.0));
    assert!(j[33..].iter().all(|&v| v > 0.0));
    assert!((1..64).all(|r| field(&rows, "failed", r) == "false"));
}

#[test]
fn gamma_sweep_starts_uncoupled() {
    let out = run(&[
        "sweep",
        "--variable",
        "gamma",
        "--start",
        "0",
        "--stop",
        "1",
        "--count",
        "11",
        "--phi-ii",
        "1.5707963267948966",
    ]);
    assert!(out.status.success());
    let rows = records(&stdout(&out));
    let j: Vec<f64> = (1..=11)
        .map(|r| field(&rows, "josephson", r).parse().unwrap())
        .collect();
    assert_eq!(j[0], 0.0);
    assert!(j.windows(2).all(|w| (w[1] - w[0]).abs() < 0.1));
    assert!(j[10] < j[5] && j[5] < 0.0);
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn json_config_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("sweep.csv");
    let cfg = write(
        dir.path(),
        "cfg.json",
        &format!(
            r#"{{"gamma": 0.3, "beta_ii": 6.0,
                "sweep": {{"variable": "beta", "start": 3.0, "stop": 8.0, "count": 6}},
                "output": "{}"}}"#,
            out_path.display()
        ),
    );
    let ok = run(&["sweep", "--config", &cfg, "--count", "3"]);
    assert!(
        ok.status.success(),
        "{}",
        String::from_utf8_lossy(&ok.stderr)
    );
    let rows = records(&std::fs::read_to_string(&out_path).unwrap());
    assert_eq!(rows[0][0], "beta");
    let xs: Vec<f64> = (1..=3).map(|r| rows[r][0].parse().unwrap()).collect();
    assert_eq!(xs, vec![3.0, 5.5, 8.0]);

    let bad = write(dir.path(), "bad.json", r#"{"gama": 0.3}"#);
    assert_eq!(run(&["ness", "--config", &bad]).status.code(), Some(2));
    assert_eq!(
        run(&["ness", "--config", "/nonexistent.json"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn evolve_trajectory_and_footer() {
    let out = run(&[
        "evolve", "--n", "1", "--gamma", "0.5", "--phi-ii", "1.2", "--t-max", "1000", "--steps",
        "10000",
    ]);
    assert!(out.status.success());
    let rows = records(&stdout(&out));
    assert_eq!(rows[0][0], "time");
    assert_eq!(rows.len(), 1 + 10001 + 2);
    let footer = &rows[rows.len() - 2..];
    assert_eq!(footer[0][0], "cesaro_average");
    assert_eq!(footer[1][0], "energy_drift");
    let drift: f64 = field(&rows, "H", rows.len() - 1).parse().unwrap();
    assert!(drift < 1e-10);
    let avg_current: f64 = field(&rows, "current", rows.len() - 2).parse().unwrap();
    assert!(avg_current.abs() < 0.01);
}

#[test]
fn evolve_decoupled_keeps_surface_populations() {
    let rows = records(&stdout(&run(&[
        "evolve", "--gamma", "0", "--phi-ii", "1.0", "--t-max", "500", "--steps", "500",
    ])));
    for name in ["sz_Ib", "sz_IIb", "C", "H_I", "H_II"] {
        let first: f64 = field(&rows, name, 1).parse().unwrap();
        assert!(
            (1..=501)
                .all(|r| (field(&rows, name, r).parse::<f64>().unwrap() - first).abs() < 1e-10),
            "{name}"
        );
    }
}

#[test]
fn evolve_guards() {
    let out = run(&["evolve", "--n", "3"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("n <= 2"));
    assert_eq!(run(&["evolve", "--t-max", "50"]).status.code(), Some(2));
}
