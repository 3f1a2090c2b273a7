use std::path::Path;
use std::process::{Command, Output};

fn kolocal(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kolocal"))
        .args(args)
        .env("KOLOCAL_OUT_DIR", out)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn artifact(dir: &Path, name: &str) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join(name)).unwrap()).unwrap()
}

#[test]
fn ko_class_of_regular_cl01() {
    let dir = tempfile::tempdir().unwrap();
    let o = kolocal(dir.path(), &["ko", "class", "--module", "regular", "--sig", "0,1"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), r#"{"degree": -1, "value": "Z/2:1"}"#);
    let a = artifact(dir.path(), "ko-class.json");
    assert_eq!(a["seed"], 20240611);
    assert_eq!(a["result"]["value"], "Z/2:1");
}

#[test]
fn t_ind_of_connected_sum_example() {
    let dir = tempfile::tempdir().unwrap();
    let o = kolocal(dir.path(), &["ledger", "t-ind", "--x", "rp3crp3xs1", "--u", "standard", "--h", "one-zero", "--format", "text"]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert!(s.contains("1 (non-orientable)"), "{s}");
    assert!(s.contains("determinant bundle non-orientable"));
    let o = kolocal(dir.path(), &["ledger", "t-ind", "--x", "rp3crp3xs1", "--u", "trivial", "--h", "one-zero"]);
    assert!(stdout(&o).contains("0 (orientable)"));
}

#[test]
fn ledger_run_json_lists_steps() {
    let dir = tempfile::tempdir().unwrap();
    let o = kolocal(dir.path(), &["ledger", "run", "--space", "s0", "--sections", "one-zero"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["steps"][0]["to"]["space"], "S1_Lie");
    assert_eq!(v["terminal"]["value"], "Z/2:1");
    let o = kolocal(dir.path(), &["ledger", "run", "--space", "s0", "--sections", "two-zero"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn usage_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let o = kolocal(dir.path(), &["--no-such-flag"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("Usage"));
    let o = kolocal(dir.path(), &["ledger", "run", "--space", "nowhere", "--sections", "one-zero"]);
    assert_eq!(o.status.code(), Some(2));
    let o = kolocal(dir.path(), &["witten", "fiber", "--N", "400"]);
    assert_eq!(o.status.code(), Some(2), "even N is rejected");
}

#[test]
fn nonconvergence_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let o = kolocal(dir.path(), &["witten", "fiber", "--N", "201", "--dense-limit", "10", "--tol", "1e-30"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("did not converge"));
}

#[test]
fn spectral_csv_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["witten", "fiber", "--n", "1", "--m", "1", "--N", "201", "--R", "10"];
    let first = kolocal(dir.path(), &args);
    assert!(first.status.success());
    let json1 = std::fs::read(dir.path().join("witten-fiber.json")).unwrap();
    let csv1 = std::fs::read_to_string(dir.path().join("witten-fiber.csv")).unwrap();
    assert!(csv1.starts_with("index,eigenvalue,mass_inside\n"));
    assert!(csv1.ends_with("# seed=20240611\n"));
    let second = kolocal(dir.path(), &args);
    assert_eq!(first.stdout, second.stdout);
    assert_eq!(json1, std::fs::read(dir.path().join("witten-fiber.json")).unwrap());
    assert_eq!(csv1, std::fs::read_to_string(dir.path().join("witten-fiber.csv")).unwrap());
    let v: serde_json::Value = serde_json::from_slice(&first.stdout).unwrap();
    assert_eq!(v["kernel_dim"], 2);
    assert!((v["gap"].as_f64().unwrap() - std::f64::consts::SQRT_2).abs() < 1e-9);
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(&cfg, r#"{"seed": 5, "grid": {"N": 101, "m": 2.0}}"#).unwrap();
    let c = cfg.to_str().unwrap();
    let o = kolocal(dir.path(), &["--config", c, "witten", "fiber"]);
    assert!(o.status.success());
    let a = artifact(dir.path(), "witten-fiber.json");
    assert_eq!(a["seed"], 5);
    assert_eq!(a["result"]["operator"]["grid"]["N"], 101);
    assert_eq!(a["result"]["operator"]["m"], 2.0);
    let o = kolocal(dir.path(), &["--config", c, "--seed", "9", "witten", "fiber", "--N", "51"]);
    assert!(o.status.success());
    let a = artifact(dir.path(), "witten-fiber.json");
    assert_eq!(a["seed"], 9);
    assert_eq!(a["result"]["operator"]["grid"]["N"], 51);
}

#[test]
fn out_dir_env_overrides_flag() {
    let env_dir = tempfile::tempdir().unwrap();
    let flag_dir = tempfile::tempdir().unwrap();
    let o = kolocal(env_dir.path(), &["--out-dir", flag_dir.path().to_str().unwrap(), "ledger", "catalog"]);
    assert!(o.status.success());
    assert!(env_dir.path().join("ledger-catalog.json").exists());
    assert!(!flag_dir.path().join("ledger-catalog.json").exists());
}

#[test]
fn localize_writes_plot_data() {
    let dir = tempfile::tempdir().unwrap();
    let o = kolocal(dir.path(), &["witten", "localize", "--N", "200", "--m-list", "5,10", "--lambda", "0.5", "--format", "csv"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).starts_with("m,count\n5.0,2\n10.0,2\n"));
    let conc = std::fs::read_to_string(dir.path().join("localize-concentration.csv")).unwrap();
    assert!(conc.starts_with("m,concentration\n"));
    assert_eq!(conc.lines().count(), 4);
}

#[test]
fn group_subcommands_pass_sampled_checks() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        vec!["group", "project", "--variant", "minus", "--params", "2,0,2", "--samples", "20"],
        vec!["group", "embed", "--samples", "20"],
        vec!["group", "hn", "--s", "-3", "--samples", "20"],
    ] {
        let o = kolocal(dir.path(), &args);
        assert!(o.status.success(), "{args:?}");
        let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
        assert_eq!(v["check"]["passed"], true);
        assert_eq!(v["check"]["samples"], 20);
    }
}

#[test]
fn cliff_and_module_commands() {
    let dir = tempfile::tempdir().unwrap();
    let o = kolocal(dir.path(), &["cliff", "mul", "--sig", "1,1", "eps{1}", "eps{1}", "--format", "text"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "1 * 1");
    let o = kolocal(dir.path(), &["module", "verify", "--module", "vn", "--n", "2"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["dim"], 4);
    assert_eq!(v["valid"], true);
    let o = kolocal(dir.path(), &["module", "show", "--module", "regular", "--sig", "0,1"]);
    let path = dir.path().join("m.json");
    std::fs::write(&path, &o.stdout).unwrap();
    let o = kolocal(dir.path(), &["ko", "class", "--file", path.to_str().unwrap()]);
    assert_eq!(stdout(&o).trim(), r#"{"degree": -1, "value": "Z/2:1"}"#);
}

#[test]
fn selftest_subset_prints_table() {
    let dir = tempfile::tempdir().unwrap();
    let o = kolocal(dir.path(), &["selftest", "--only", "2,7,9", "--format", "text"]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert!(s.contains("3/3 criteria passed"), "{s}");
    let a = artifact(dir.path(), "selftest.json");
    assert_eq!(a["result"]["all_passed"], true);
}
