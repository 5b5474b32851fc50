use std::process::Command;

fn pmf() -> Command {
    Command::new(env!("CARGO_BIN_EXE_pmf"))
}

#[test]
fn gen_solve_verify_roundtrip() {
    let dir = std::env::temp_dir().join(format!("pmf-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let inst = dir.join("g.pmf");
    let sol = dir.join("g.sol");

    let out = pmf()
        .args(["gen", "--kind", "grid", "--n", "64", "--seed", "7"])
        .arg("--output")
        .arg(&inst)
        .output()
        .unwrap();
    assert!(out.status.success(), "gen failed: {}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&inst).unwrap();
    assert!(text.starts_with("PMFv1\n"));

    let out = pmf()
        .args(["solve", "--check", "--json"])
        .arg("--input")
        .arg(&inst)
        .arg("--output")
        .arg(&sol)
        .output()
        .unwrap();
    assert!(out.status.success(), "solve failed: {}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["n"], 64);
    assert!(report["value"].as_i64().is_some());
    assert!(report["time_ms"].as_f64().unwrap() >= 0.0);

    let out = pmf()
        .args(["verify"])
        .arg("--input")
        .arg(&inst)
        .arg("--solution")
        .arg(&sol)
        .output()
        .unwrap();
    assert!(out.status.success(), "verify failed: {}", String::from_utf8_lossy(&out.stdout));

    // corrupt the solution: exit code 1
    let text = std::fs::read_to_string(&sol).unwrap();
    let bad = text.replacen("value ", "value 9", 1);
    std::fs::write(&sol, bad).unwrap();
    let out = pmf()
        .args(["verify"])
        .arg("--input")
        .arg(&inst)
        .arg("--solution")
        .arg(&sol)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));

    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn solve_agrees_with_oracle_flag() {
    let gen = pmf()
        .args(["gen", "--kind", "random-triangulation", "--n", "120", "--seed", "3"])
        .output()
        .unwrap();
    assert!(gen.status.success());
    let dir = std::env::temp_dir().join(format!("pmf-cli2-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let inst = dir.join("t.pmf");
    std::fs::write(&inst, &gen.stdout).unwrap();

    let mut values = Vec::new();
    for algo in ["msms", "oracle"] {
        let out = pmf()
            .args(["solve", "--algo", algo, "--json"])
            .arg("--input")
            .arg(&inst)
            .output()
            .unwrap();
        assert!(out.status.success());
        let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
        values.push(report["value"].as_i64().unwrap());
    }
    assert_eq!(values[0], values[1]);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn bad_input_exit_code_two() {
    let dir = std::env::temp_dir().join(format!("pmf-cli3-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let inst = dir.join("bad.pmf");
    std::fs::write(&inst, "not a pmf file\n").unwrap();
    let out = pmf().args(["solve"]).arg("--input").arg(&inst).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn match_command_agrees_with_oracle() {
    let out = pmf().args(["match", "--n", "100", "--seed", "5", "--json"]).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["matching"], v["oracle"]);
}

#[test]
fn bench_outputs_csv() {
    let out = pmf()
        .args(["bench", "--kind", "grid", "--sizes", "64,100", "--runs", "1", "--check"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "kind,n,m,value,time_ms");
    assert_eq!(lines.len(), 3);
    let n1: usize = lines[1].split(',').nth(1).unwrap().parse().unwrap();
    let n2: usize = lines[2].split(',').nth(1).unwrap().parse().unwrap();
    assert!(n1 < n2);
}
