//! CLI-level acceptance checks: seeded commands are byte-deterministic
//! (timestamps excluded), reports match the known instance values, and exit
//! codes follow the documented mapping.

use std::path::Path;
use std::process::{Command, Output};
use std::time::Instant;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_kellycache"))
}

fn run_ok(args: &[&str], dir: &Path) -> Output {
    let out = bin().args(args).current_dir(dir).output().expect("binary runs");
    assert!(
        out.status.success(),
        "command {:?} failed: {}",
        args,
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn json_report(args: &[&str], dir: &Path) -> serde_json::Value {
    let out = run_ok(args, dir);
    serde_json::from_slice(&out.stdout).expect("report is JSON")
}

/// Strip the wallclock column (index 6) from a CSV body.
fn strip_wallclock(csv: &str) -> String {
    csv.lines()
        .map(|line| {
            let fields: Vec<&str> = line.splitn(8, ',').collect();
            let mut kept: Vec<&str> = fields.clone();
            if kept.len() == 8 {
                kept.remove(6);
            }
            kept.join(",")
        })
        .collect::<Vec<_>>()
        .join("\n")
}

#[test]
fn criterion_10_cli_determinism() {
    let start = Instant::now();
    let dir = tempfile::tempdir().unwrap();
    let spec = r#"{
        "id": "det",
        "topology": {"kind": "path-fig3"},
        "cost": "delay",
        "algorithms": [
            {"alg": "greedy"},
            {"alg": "cg-sample", "samples": 40, "steps": 10},
            {"alg": "cg-taylor", "order": 1, "steps": 50},
            {"alg": "rnd"}
        ],
        "seeds": [1, 2, 3]
    }"#;
    std::fs::write(dir.path().join("exp.json"), spec).unwrap();
    let a = run_ok(&["compare", "--spec", "exp.json", "--normalize", "rnd"], dir.path());
    let b = run_ok(&["compare", "--spec", "exp.json", "--normalize", "rnd"], dir.path());
    let a = String::from_utf8(a.stdout).unwrap();
    let b = String::from_utf8(b.stdout).unwrap();
    assert_eq!(strip_wallclock(&a), strip_wallclock(&b), "CSV differs across reruns");
    // Row count: 4 algorithms x 3 seeds + header.
    assert_eq!(a.lines().count(), 13);

    // Seeded generation is byte-deterministic too.
    run_ok(
        &["generate", "--kind", "erdos-renyi", "--n", "30", "--p", "0.2", "--catalog", "5",
          "--requests", "20", "--sources", "2", "--seed", "9", "--out", "a.txt"],
        dir.path(),
    );
    run_ok(
        &["generate", "--kind", "erdos-renyi", "--n", "30", "--p", "0.2", "--catalog", "5",
          "--requests", "20", "--sources", "2", "--seed", "9", "--out", "b.txt"],
        dir.path(),
    );
    let a = std::fs::read(dir.path().join("a.txt")).unwrap();
    let b = std::fs::read(dir.path().join("b.txt")).unwrap();
    assert_eq!(a, b, "generated instances differ across reruns");
    println!(
        "criterion 10 (CLI determinism): PASS in {:.3}s",
        start.elapsed().as_secs_f64()
    );
}

#[test]
fn place_reports_match_reference_values() {
    let dir = tempfile::tempdir().unwrap();
    run_ok(&["generate", "--kind", "path-fig3", "--out", "fig3.txt"], dir.path());

    let greedy = json_report(&["place", "--instance", "fig3.txt", "--alg", "greedy"], dir.path());
    let expect = 1.0 / 199.5 + 2.0;
    assert!((greedy["gain"].as_f64().unwrap() - expect).abs() < 1e-6);

    let brute = json_report(&["place", "--instance", "fig3.txt", "--alg", "brute"], dir.path());
    assert_eq!(brute["gain"].as_f64().unwrap(), 4.0);

    let cg = json_report(
        &["place", "--instance", "fig3.txt", "--alg", "cg-taylor", "--L", "1", "--K", "1000",
          "--rounding", "swap", "--seed", "1"],
        dir.path(),
    );
    let cg_gain = cg["gain"].as_f64().unwrap();
    assert!(cg["stable"].as_bool().unwrap());
    assert!(
        cg_gain >= greedy["gain"].as_f64().unwrap() - 1e-9 && cg_gain <= 4.0 + 1e-9,
        "cg gain {cg_gain} outside [greedy, brute]"
    );
    let diag = &cg["diagnostics"];
    assert_eq!(diag["steps"].as_u64().unwrap(), 1000);
    assert!(diag["lipschitz_p"].as_f64().unwrap() > 0.0);
}

#[test]
fn pipage_rounding_flag_works() {
    let dir = tempfile::tempdir().unwrap();
    run_ok(&["generate", "--kind", "path-fig3", "--out", "fig3.txt"], dir.path());
    let report = json_report(
        &["place", "--instance", "fig3.txt", "--alg", "cg-power", "--L", "2", "--K", "200",
          "--rounding", "pipage"],
        dir.path(),
    );
    assert!(report["gain"].as_f64().unwrap() > 0.0);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();

    // Missing required flag: usage error 2 (from clap).
    let out = bin().args(["generate", "--kind", "star"]).current_dir(dir.path()).output().unwrap();
    assert_eq!(out.status.code(), Some(2));

    // Unknown topology kind: 2.
    let out = bin()
        .args(["generate", "--kind", "nonsense", "--out", "x.txt"])
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));

    // Malformed instance file: 2, message carries the line number.
    std::fs::write(dir.path().join("bad.txt"), "nodes 2\nedge a b 1.0\nwhatever\n").unwrap();
    let out = bin()
        .args(["place", "--instance", "bad.txt", "--alg", "greedy"])
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));

    // Unstable instance: 3 with the documented message.
    let unstable = "nodes 2\nedge a b 1.0\nedge b a 1.0\nserver 0 b\nrequest 0 2.0 a b\n";
    std::fs::write(dir.path().join("unstable.txt"), unstable).unwrap();
    let out = bin()
        .args(["place", "--instance", "unstable.txt", "--alg", "greedy"])
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
    assert!(
        String::from_utf8_lossy(&out.stderr).contains("no stable starting placement given")
    );

    // Malformed experiment spec: 2.
    std::fs::write(dir.path().join("bad.json"), "{ not json").unwrap();
    let out = bin()
        .args(["compare", "--spec", "bad.json"])
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));

    // W-DNF term cap override via the environment: 4. The star instance
    // has multi-class edges, so squared load polynomials exceed one term.
    run_ok(
        &["generate", "--kind", "star", "--n", "5", "--catalog", "2", "--requests", "8",
          "--sources", "2", "--law", "uniform", "--seed", "3", "--out", "star.txt"],
        dir.path(),
    );
    let out = bin()
        .args(["place", "--instance", "star.txt", "--alg", "cg-taylor", "--L", "2", "--K", "5"])
        .env("KELLYCACHE_TERM_CAP", "1")
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(4), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stderr).contains("reduce L or network size"));
}

#[test]
fn compare_row_shape() {
    let dir = tempfile::tempdir().unwrap();
    let spec = r#"{
        "id": "rows",
        "topology": {"kind": "path-fig3"},
        "algorithms": [{"alg": "greedy"}, {"alg": "cg-taylor", "steps": 25}, {"alg": "rnd"}],
        "seeds": [5]
    }"#;
    std::fs::write(dir.path().join("exp.json"), spec).unwrap();
    let out = run_ok(&["compare", "--spec", "exp.json", "--out", "r.csv"], dir.path());
    assert!(out.stdout.is_empty());
    let csv = std::fs::read_to_string(dir.path().join("r.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 4); // header + 3 algorithms x 1 seed
    assert!(lines[0].starts_with("experiment_id,topology,algorithm,seed,gain"));
    // Without --normalize the normalized column is empty.
    assert!(lines[1].contains(",,"));
}
