use std::f64::consts::PI;
use std::path::Path;
use std::process::{Command, Output};

use num_complex::Complex64;

fn pathstitch(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pathstitch")).args(args).arg("--out").arg(dir).output().expect("binary runs")
}

fn write_config(dir: &Path, text: &str) -> String {
    let path = dir.join("run.toml");
    std::fs::write(&path, text).unwrap();
    path.display().to_string()
}

fn meta(dir: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join("meta.json")).unwrap()).unwrap()
}

fn rows(path: &Path) -> (String, Vec<Vec<f64>>) {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap().to_string();
    let body = lines.map(|l| l.split(',').map(|c| c.parse().unwrap()).collect()).collect();
    (header, body)
}

const FREE: &str = r#"
[physical]
m = 1.0
hbar = 0.25
T = 10.0
N = 4
x0 = -5.0

[potential]
name = "free"

[lattice]
x_min = -40.0
x_max = 40.0
M = 1024
"#;

#[test]
fn propagate_free_matches_closed_form() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let cfg = write_config(dir.path(), FREE);
    let run = pathstitch(&out, &["propagate", "--config", &cfg]);
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    let (header, body) = rows(&out.join("propagator.csv"));
    assert_eq!(header, "n,t,x1,re_G,im_G,abs2_G");
    assert_eq!(body.len(), 4 * 1024);
    let mut worst: f64 = 0.0;
    for row in body.iter().filter(|r| r[0] == 4.0 && (r[2] + 5.0).abs() <= 20.0) {
        assert_eq!(row[1], 10.0);
        let exact = (1.0 / (2.0 * PI * 0.25 * 10.0)).sqrt()
            * Complex64::from_polar(1.0, -PI / 4.0 + (row[2] + 5.0).powi(2) / (2.0 * 0.25 * 10.0));
        worst = worst.max((Complex64::new(row[3], row[4]) - exact).norm() / exact.norm());
        assert!((row[5] - row[3] * row[3] - row[4] * row[4]).abs() < 1e-15);
    }
    assert!(worst < 1e-8, "{worst}");
    let m = meta(&out);
    assert_eq!(m["status"], "ok");
    assert_eq!(m["command"], "propagate");
    assert_eq!(m["mode"], "quadrature");
    assert!(m["config"]["physical"].is_object());
}

#[test]
fn identical_config_gives_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &FREE.replace("\"free\"", "\"rosen-morse\"\nV0 = 1.0"));
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    assert!(pathstitch(&a, &["propagate", "--config", &cfg]).status.success());
    assert!(pathstitch(&b, &["propagate", "--config", &cfg, "--threads", "1"]).status.success());
    let first = std::fs::read(a.join("propagator.csv")).unwrap();
    assert_eq!(first, std::fs::read(b.join("propagator.csv")).unwrap());
    assert!(!first.contains(&b'\r'));
}

#[test]
fn config_errors_exit_1_with_field_path() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let cfg = write_config(dir.path(), &FREE.replace("m = 1.0\n", ""));
    let run = pathstitch(&out, &["propagate", "--config", &cfg]);
    assert_eq!(run.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&run.stderr).contains("physical.m: required, > 0"));
    let m = meta(&out);
    assert_eq!(m["status"], "error");
    assert_eq!(m["error"]["exit_code"], 1);

    let cfg = write_config(dir.path(), &FREE.replace("N = 4", "N = 1"));
    let run = pathstitch(&out, &["propagate", "--config", &cfg]);
    assert_eq!(run.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&run.stderr).contains("physical.N: must be ≥ 2"));

    let run = pathstitch(&out, &["propagate", "--preset", "no-such-figure"]);
    assert_eq!(run.status.code(), Some(1));
    let run = pathstitch(&out, &["no-such-command"]);
    assert_eq!(run.status.code(), Some(1));
}

#[test]
fn numeric_failure_exits_2_and_still_writes_meta() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    // Eikonal saddles do not exist everywhere at coarse slicing of a strong barrier.
    let cfg = write_config(
        dir.path(),
        &FREE
            .replace("\"free\"", "\"rosen-morse\"\nV0 = 10.0")
            .replace("N = 4", "N = 3")
            .replace("x0 = -5.0", "x0 = -1.0"),
    );
    let run = pathstitch(&out, &["propagate", "--config", &cfg, "--mode", "eikonal"]);
    assert_eq!(run.status.code(), Some(2), "{}", String::from_utf8_lossy(&run.stderr));
    let m = meta(&out);
    assert_eq!(m["status"], "error");
    assert_eq!(m["error"]["kind"], "numeric");
    assert_eq!(m["mode"], "eikonal");
}

#[test]
fn unwritable_output_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    std::fs::write(&blocker, "").unwrap();
    let cfg = write_config(dir.path(), FREE);
    let run = pathstitch(&blocker.join("out"), &["propagate", "--config", &cfg]);
    assert_eq!(run.status.code(), Some(3));
}

#[test]
fn dump_jn_columns_and_free_identity() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let cfg = write_config(dir.path(), FREE);
    assert!(pathstitch(&out, &["dump-jn", "--config", &cfg]).status.success());
    let (header, body) = rows(&out.join("jn.csv"));
    assert_eq!(header, "n,q,re_J,im_J,re_Jbar,im_Jbar");
    assert_eq!(body.len(), 3 * 1024);
    assert!(body.iter().all(|r| r[2] == r[4] && r[3] == r[5]));
}

#[test]
fn evolve_with_crank_nicolson_cross_check() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let text = format!("{FREE}\n[state]\nmu = -5.0\nsigma = 1.0\np0 = 1.0\ncrank_steps = 400\ncrank_refine = 2\n")
        .replace("T = 10.0", "T = 2.0");
    let cfg = write_config(dir.path(), &text);
    let run = pathstitch(&out, &["evolve", "--config", &cfg]);
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    let (header, body) = rows(&out.join("evolve.csv"));
    assert_eq!(header, "n,t,x,re_psi,im_psi,abs2_psi");
    assert_eq!(body.len(), 4 * 1024);
    let (header, _) = rows(&out.join("crank.csv"));
    assert_eq!(header, "x,re_psi,im_psi,abs2_psi");
    let m = meta(&out);
    assert!(m["details"]["norm_drift"].as_f64().unwrap() < 1e-2);
    assert!(m["details"]["crank_nicolson"]["l2_difference"].as_f64().unwrap() < 1e-2);
}

#[test]
fn caustics_on_fig3_preset() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let run = pathstitch(&out, &["caustics", "--preset", "rosen-morse-fig3"]);
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    let (header, body) = rows(&out.join("caustics.csv"));
    assert_eq!(header, "x0,x1");
    assert!(!body.is_empty());
    assert!(body.iter().all(|r| r[0] == -5.0));
}

#[test]
fn field_rows_cover_the_grid() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let text = format!("{FREE}\n[field]\nx0_min = -2.0\nx0_max = 2.0\nx0_count = 3\nx1_min = -1.0\nx1_max = 1.0\n");
    let cfg = write_config(dir.path(), &text);
    assert!(pathstitch(&out, &["field", "--config", &cfg]).status.success());
    let (header, body) = rows(&out.join("field.csv"));
    assert_eq!(header, "x0,x1,re_G,im_G,abs2_G");
    let per_x0 = body.iter().filter(|r| r[0] == -2.0).count();
    assert!(per_x0 > 0 && body.len() == 3 * per_x0);
    assert!(body.iter().all(|r| (-1.0..=1.0).contains(&r[1])));
}

#[test]
fn exact_rm_rejects_other_potentials() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let cfg = write_config(dir.path(), FREE);
    let run = pathstitch(&out, &["exact-rm", "--config", &cfg]);
    assert_eq!(run.status.code(), Some(1));
    assert_eq!(meta(&out)["error"]["kind"], "config");
}

/// About a minute on one core.
#[test]
fn converge_on_fig3_preset_decreases() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let run = pathstitch(&out, &["converge", "--preset", "rosen-morse-fig3"]);
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    let (header, body) = rows(&out.join("converge.csv"));
    assert_eq!(header, "N,a,epsilon");
    assert_eq!(body.iter().map(|r| r[0] as usize).collect::<Vec<_>>(), vec![2, 6, 11, 16]);
    assert!(body.iter().all(|r| r[1] == 10.0 / r[0]));
    assert!(body.windows(2).all(|w| w[1][2] < w[0][2]), "{body:?}");
}

#[test]
fn help_lists_defaults() {
    let out = Command::new(env!("CARGO_BIN_EXE_pathstitch")).arg("--help").output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    for needle in ["pad_factor = 2", "rosen-morse-fig3", "Exit codes"] {
        assert!(text.contains(needle), "{needle}");
    }
}
