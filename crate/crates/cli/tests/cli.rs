use std::path::PathBuf;
use std::process::{Command, Output};

fn rydcat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rydcat"))
        .args(args)
        .env_remove("RYDCAT_DATA_DIR")
        .output()
        .unwrap()
}

fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("rydcat-cli-{}-{name}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn missing_data_file_exits_2() {
    let empty = scratch("empty");
    let o = rydcat(&["phonon", "--data-dir", empty.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("quantum_defects.dat"));
    let o = Command::new(env!("CARGO_BIN_EXE_rydcat"))
        .arg("phonon")
        .env("RYDCAT_DATA_DIR", &empty)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn data_dir_flag_overrides_environment() {
    let empty = scratch("env");
    let o = Command::new(env!("CARGO_BIN_EXE_rydcat"))
        .args(["phonon", "--data-dir", data_dir().to_str().unwrap()])
        .env("RYDCAT_DATA_DIR", &empty)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    // the shipped files are the embedded defaults, so headers agree
    assert_eq!(stdout(&o), stdout(&rydcat(&["phonon"])));
}

#[test]
fn validation_failures_exit_3() {
    assert_eq!(
        rydcat(&["phonon", "--lamb-dicke", "0.5"]).status.code(),
        Some(3)
    );
    assert_eq!(
        rydcat(&["fnl-scan", "--target", "1.5"]).status.code(),
        Some(3)
    );
    assert_eq!(rydcat(&["husimi", "--state", "dog"]).status.code(), Some(3));
    assert_eq!(rydcat(&["phonon", "--no-such-flag"]).status.code(), Some(3));
    let cfg = scratch("badcfg").join("run.toml");
    std::fs::write(&cfg, "lamb-dicke = 0.1\nunknown-key = 3\n").unwrap();
    let o = rydcat(&["phonon", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("unknown-key"));
}

#[test]
fn numerical_failure_exits_4() {
    let o = rydcat(&[
        "catsize",
        "--n",
        "80",
        "--fdc",
        "0.99999",
        "--table-points",
        "3",
    ]);
    assert_eq!(
        o.status.code(),
        Some(4),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
}

#[test]
fn flags_win_over_config_file() {
    let cfg = scratch("cfg").join("run.toml");
    std::fs::write(&cfg, "lamb-dicke = 0.05\ntrap-hz = 200000.0\n").unwrap();
    let from_file = rows(&stdout(&rydcat(&[
        "phonon",
        "--config",
        cfg.to_str().unwrap(),
    ])));
    assert_eq!(from_file[0][0], "5.00000000e-2");
    let overridden = rows(&stdout(&rydcat(&[
        "phonon",
        "--config",
        cfg.to_str().unwrap(),
        "--lamb-dicke",
        "0.1",
    ])));
    assert_eq!(overridden[0][0], "1.00000000e-1");
    // trap frequency still comes from the file: (0.1 * 1 kHz / 200 kHz)^2
    assert_eq!(overridden[0][2], "2.50000000e-7");
}

#[test]
fn header_records_config_and_data() {
    let text = stdout(&rydcat(&["phonon"]));
    let header: Vec<&str> = text.lines().take_while(|l| l.starts_with('#')).collect();
    assert!(header.iter().any(|l| l.starts_with("# config-sha256 ")));
    for f in ["quantum_defects.dat", "constants_overrides.dat", "c6.dat"] {
        assert!(
            header
                .iter()
                .any(|l| l.starts_with(&format!("# data {f} sha256 "))),
            "{f}"
        );
    }
    let other = stdout(&rydcat(&["phonon", "--lamb-dicke", "0.05"]));
    assert_ne!(text.lines().nth(1), other.lines().nth(1));
}

#[test]
fn output_file_and_json() {
    let path = scratch("out").join("q.json");
    let o = rydcat(&[
        "sigma-bound",
        "--format",
        "json",
        "-o",
        path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["columns"][3], "sigma_min");
    let sigma = v["rows"][0][3].as_f64().unwrap();
    assert!(sigma > 1e-35 && sigma < 1e-33);
}

#[test]
fn fnl_scan_w_is_monotone() {
    let t = rows(&stdout(&rydcat(&[
        "fnl-scan", "--N", "20..200", "--points", "4", "--target", "0.8",
    ])));
    let w: Vec<f64> = t.iter().map(|r| r[1].parse().unwrap()).collect();
    assert_eq!(w.len(), 4);
    assert!(w.windows(2).all(|p| p[1] < p[0]), "{w:?}");
}

#[test]
fn husimi_cat_has_two_lobes() {
    let t = rows(&stdout(&rydcat(&[
        "husimi", "--state", "cat", "--N", "100", "--grid", "24",
    ])));
    let pts: Vec<(f64, f64, f64)> = t
        .iter()
        .map(|r| {
            (
                r[0].parse().unwrap(),
                r[1].parse().unwrap(),
                r[3].parse().unwrap(),
            )
        })
        .collect();
    let near = |phi0: f64| {
        pts.iter()
            .filter(|p| (p.1 - phi0).abs() < 0.2)
            .map(|p| p.2)
            .fold(0.0f64, f64::max)
    };
    let (a, b) = (near(0.0), near(std::f64::consts::PI));
    let side = near(std::f64::consts::FRAC_PI_2);
    assert!((a / b - 1.0).abs() < 1e-6);
    assert!(side < 1e-6 * a);
}
