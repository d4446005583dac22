use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ramanujan"))
        .args(args)
        .env_remove("RAMANUJAN_CONFIG")
        .output()
        .expect("spawn")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(args: &[&str]) -> serde_json::Value {
    let mut a = args.to_vec();
    a.push("--json");
    let o = run(&a);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_str(&stdout(&o)).unwrap()
}

#[test]
fn qexp_examples() {
    assert!(stdout(&run(&["qexp", "j", "3"])).starts_with("q^-1 + 744 + 196884 q + "));
    assert_eq!(
        stdout(&run(&["qexp", "E2", "2"])).trim(),
        "1 - 24 q - 72 q^2"
    );
    assert_eq!(stdout(&run(&["qexp", "delta", "1"])).trim(), "q");
    assert_eq!(stdout(&run(&["qexp", "g2", "1"])).trim(), "12 + 2880 q");
}

#[test]
fn diff_and_hecke() {
    assert_eq!(stdout(&run(&["diff", "g1"])).trim(), "g1^2 - 1/12 g2");
    assert_eq!(stdout(&run(&["hecke", "g2", "2"])).trim(), "9 g2");
    assert_eq!(stdout(&run(&["hecke", "g1", "3"])).trim(), "4/3 g1");
    let out = stdout(&run(&["diff", "g1^2", "--associated"]));
    assert!(
        out.contains("f_0 = g1^2") && out.contains("f_2 = 1"),
        "{out}"
    );
}

#[test]
fn parse_errors_carry_positions() {
    let o = run(&["diff", "g1 + g4"]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("position 5"), "{err}");
}

#[test]
fn json_documents_are_versioned() {
    for args in [
        vec!["qexp", "E4", "3"],
        vec!["diff", "g2"],
        vec!["hecke", "g3", "2"],
        vec!["periods", "--t1", "0", "--t2", "1", "--t3", "0.5"],
        vec!["gm", "print"],
    ] {
        let v = json(&args);
        assert_eq!(v["schema_version"], 1, "{args:?}");
    }
    let v = json(&["periods", "--t1", "0.1", "--t2", "2-i", "--t3", "-0.3+0.2i"]);
    let det = v["det"].as_str().unwrap();
    assert!(
        det.starts_with("1+") || det.starts_with("0.99999999"),
        "{det}"
    );
}

#[test]
fn periods_in_high_precision_agree() {
    let a = json(&["periods", "--t1", "0.2", "--t2", "1.5+0.5i", "--t3", "-1"]);
    let b = json(&[
        "periods", "--t1", "0.2", "--t2", "1.5+0.5i", "--t3", "-1", "--hp",
    ]);
    assert_eq!(a["reduction"], b["reduction"]);
    assert!((a["b1"].as_f64().unwrap() - b["b1"].as_f64().unwrap()).abs() < 1e-12);
}

#[test]
fn periods_on_the_discriminant_fail_cleanly() {
    let o = run(&["periods", "--t1", "0", "--t2", "3", "--t3", "1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn gm_verify_passes() {
    let o = run(&["gm", "verify"]);
    assert!(o.status.success());
    assert!(!stdout(&o).contains("FAIL"));
}

#[test]
fn gm_transport_from_file() {
    let dir = std::env::temp_dir().join(format!("ramanujan-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("path.json");
    std::fs::write(
        &path,
        "[[1, 0, 0, 1], [1, 0, \"0.5i\", [1.5, 0]], [1, 0, 0, 2]]",
    )
    .unwrap();
    let v = json(&["gm", "transport", "--path", path.to_str().unwrap()]);
    assert!(
        v["det"].as_str().unwrap().starts_with("1")
            || v["det"].as_str().unwrap().starts_with("0.9999")
    );
    assert!(v["min_abs_delta"].as_f64().unwrap() > 1.0);
}

#[test]
fn flow_writes_csv() {
    let dir = std::env::temp_dir().join(format!("ramanujan-flow-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("flow.csv");
    let o = run(&[
        "flow",
        "--eisenstein",
        "2i",
        "--length",
        "1",
        "--samples",
        "4",
        "--csv",
        path.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "s,t1_re,t1_im,t2_re,t2_im,t3_re,t3_im,abs_delta,b2,abs_b3,dist_to_sing"
    );
    assert_eq!(lines.count(), 5);
}

#[test]
fn flow_refuses_singular_start() {
    let o = run(&["flow", "--start", "1,12,8", "--length", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("singular"));
}

#[test]
fn verify_all_with_seed_passes() {
    let o = run(&["verify-all", "--seed", "7"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("0 failed"));
}

#[test]
fn fixed_seed_is_byte_identical() {
    let args = [
        "verify-all",
        "--seed",
        "3",
        "--suite",
        "periods",
        "--suite",
        "reconstruction",
        "--json",
    ];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn config_from_environment() {
    let dir = std::env::temp_dir().join(format!("ramanujan-cfg-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("cfg.toml");
    std::fs::write(&path, "format = \"json\"\n[verify]\nseed = 5\n").unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_ramanujan"))
        .args(["verify-all", "--suite", "ramanujan"])
        .env("RAMANUJAN_CONFIG", &path)
        .output()
        .unwrap();
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["seed"], 5);
    std::fs::write(&path, "bogus = 1\n").unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_ramanujan"))
        .args(["qexp", "E2", "1"])
        .env("RAMANUJAN_CONFIG", &path)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}
