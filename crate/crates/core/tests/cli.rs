use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("hitchin-cli-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn hitchin(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hitchin"))
        .args(args)
        .current_dir(cwd)
        .env_remove("HITCHIN_OUTPUT_DIR")
        .output()
        .unwrap()
}

fn header(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap().lines().next().unwrap().to_string()
}

#[test]
fn every_command_succeeds_and_names_its_equations() {
    let dir = scratch("all");
    for cmd in [
        vec!["algebra-check"],
        vec!["liouville", "--nu", "2"],
        vec!["liouville", "--nu", "1", "--sign", "bottom"],
        vec!["sinh", "--a", "-1", "--r-max", "60"],
        vec!["sine", "--a", "1", "--r-max", "60"],
        vec!["torus", "--nx", "64", "--ny", "16"],
    ] {
        let out = hitchin(&cmd, &dir);
        let stdout = String::from_utf8_lossy(&out.stdout);
        assert_eq!(out.status.code(), Some(0), "{cmd:?}: {}", String::from_utf8_lossy(&out.stderr));
        assert!(stdout.contains("equations:"), "{cmd:?}");
        assert!(!stdout.contains("FAIL"), "{cmd:?}: {stdout}");
    }
    for f in ["algebra.csv", "liouville.csv", "sinh.csv", "sine.csv", "torus.csv"] {
        assert!(dir.join(f).exists(), "{f}");
    }
}

#[test]
fn radial_header_and_precision() {
    let dir = scratch("header");
    assert_eq!(hitchin(&["sinh", "--r-max", "60"], &dir).status.code(), Some(0));
    let csv = dir.join("sinh.csv");
    assert_eq!(header(&csv), "r,alpha,dalpha,sigma,cumulative_action,F12,J_theta");
    let text = std::fs::read_to_string(&csv).unwrap();
    let first = text.lines().nth(1).unwrap();
    let cell = first.split(',').next().unwrap();
    let mantissa = cell.split('e').next().unwrap().replace(['-', '.'], "");
    assert_eq!(mantissa.len(), 17);
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = scratch("repeat");
    let mut outputs = Vec::new();
    for k in 0..2 {
        let name = format!("run{k}.csv");
        assert_eq!(hitchin(&["sinh", "--a", "-4", "--output", &name], &dir).status.code(), Some(0));
        outputs.push(std::fs::read(dir.join(name)).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn exit_codes() {
    let dir = scratch("codes");
    assert_eq!(hitchin(&["sinh", "--kappa", "-1"], &dir).status.code(), Some(2));
    assert_eq!(hitchin(&["sinh", "--r0", "2"], &dir).status.code(), Some(2));
    assert_eq!(hitchin(&["liouville", "--nu", "0"], &dir).status.code(), Some(2));
    assert_eq!(hitchin(&["no-such-command"], &dir).status.code(), Some(2));
    assert_eq!(hitchin(&["torus", "--nx", "8"], &dir).status.code(), Some(2));
    let out = hitchin(&["sinh", "--a", "1", "--sign", "bottom"], &dir);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("r ="));
}

#[test]
fn config_and_flag_precedence() {
    let dir = scratch("config");
    std::fs::write(dir.join("run.conf"), "# test\nkappa = 2\nr-max = 40\noutput = from_config.csv\n").unwrap();
    let out = hitchin(&["--config", "run.conf", "sinh"], &dir);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(dir.join("from_config.csv")).unwrap();
    let last_r: f64 = text.lines().last().unwrap().split(',').next().unwrap().parse().unwrap();
    assert!((last_r - 40.0).abs() < 1e-9);
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("kappa = 2,"), "{stdout}");

    let out = hitchin(&["--config", "run.conf", "sinh", "--r-max", "50", "--output", "flag.csv"], &dir);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(dir.join("flag.csv")).unwrap();
    let last_r: f64 = text.lines().last().unwrap().split(',').next().unwrap().parse().unwrap();
    assert!((last_r - 50.0).abs() < 1e-9);
}

#[test]
fn output_directory_from_environment_and_flag() {
    let dir = scratch("env");
    let env_dir = dir.join("env_out");
    let out = Command::new(env!("CARGO_BIN_EXE_hitchin"))
        .args(["algebra-check"])
        .current_dir(&dir)
        .env("HITCHIN_OUTPUT_DIR", &env_dir)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(env_dir.join("algebra.csv").exists());

    let flag_dir = dir.join("flag_out");
    let out = Command::new(env!("CARGO_BIN_EXE_hitchin"))
        .args(["--output-dir", flag_dir.to_str().unwrap(), "algebra-check"])
        .current_dir(&dir)
        .env("HITCHIN_OUTPUT_DIR", &env_dir)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(flag_dir.join("algebra.csv").exists());
}

#[test]
fn torus_with_bundled_dataset() {
    let dir = scratch("torus");
    let data = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/genus1.txt");
    let out = hitchin(&["torus", "--dataset", data.to_str().unwrap()], &dir);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = dir.join("torus.csv");
    assert_eq!(std::fs::read_to_string(&csv).unwrap().lines().count(), 1 + 256 * 16);
}
