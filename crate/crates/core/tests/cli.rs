use std::path::Path;
use std::process::{Command, Output};

use covertlat::placement::Placement;
use covertlat::ramsey::{read_csv, RamseyRecord, SummaryRow};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_covertlat"));
    c.env_remove("COVERTLAT_SEED");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn plan_reports_overhead_and_bound() {
    let out = run(&["plan", "--device", "emerald.json", "--n", "25"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    let last = text.lines().last().unwrap();
    assert!(last.starts_with("overhead=20 bound="), "{last}");
    let bound: f64 = last.split("bound=").nth(1).unwrap().parse().unwrap();
    assert!((bound - 30.0).abs() < 1e-12);
}

#[test]
fn plan_json_and_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "plan",
        "--device",
        "ibm_fez",
        "--n",
        "2",
        "--json",
        "--out",
        path(dir.path()),
    ]);
    assert_eq!(code(&out), 0);
    let p: Placement =
        serde_json::from_slice(&std::fs::read(dir.path().join("placement.json")).unwrap()).unwrap();
    assert_eq!(p.computational.len(), 2);
    assert_eq!(p.buffer.len(), 6);
    for name in ["placement.csv", "map.txt", "manifest.json"] {
        assert!(dir.path().join(name).is_file(), "{name}");
    }
}

#[test]
fn exit_codes() {
    assert_eq!(
        code(&run(&["plan", "--device", "emerald", "--n", "1000000"])),
        3
    );
    let err =
        String::from_utf8(run(&["plan", "--device", "emerald", "--n", "1000000"]).stderr).unwrap();
    assert!(err.contains("largest feasible n is"), "{err}");
    assert_eq!(code(&run(&["plan", "--device", "nowhere", "--n", "2"])), 2);
    assert_eq!(
        code(&run(&[
            "plan", "--device", "emerald", "--n", "2", "--anchor", "[oops"
        ])),
        2
    );
    assert_eq!(code(&run(&["budget", "--delta", "-0.1"])), 2);
    assert_eq!(
        code(&run(&["budget", "--delta", "0.1", "--target", "-1"])),
        2
    );
    assert_eq!(
        code(&run(&["bounds", "--kind", "pentagonal", "--shape", "disk"])),
        2
    );
    assert_eq!(
        code(&run(&["bounds", "--kind", "hex", "--shape", "diamond"])),
        2
    );
    assert_eq!(code(&run(&["frobnicate"])), 2);
    assert_eq!(code(&run(&["pinsker", "--dim", "9"])), 2);
    assert_eq!(
        code(&run(&["bounds", "--kind", "hex", "--shape", "disk"])),
        0
    );
}

#[test]
fn bounds_examples() {
    let out = run(&[
        "bounds", "--kind", "hex", "--shape", "disk", "--radius", "0", "--which", "vertex",
    ]);
    let text = stdout(&out);
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row[..4], ["hex", "vertex", "6", "6"]);
    assert_eq!(row[5].parse::<f64>().unwrap(), 0.0);

    let out = run(&[
        "bounds", "--kind", "square", "--shape", "random", "--count", "100", "--seed", "7",
    ]);
    assert_eq!(code(&out), 0);
    let rows: Vec<String> = stdout(&out).lines().skip(1).map(String::from).collect();
    assert_eq!(rows.len(), 100);
    assert!(rows.iter().all(|r| r.ends_with(",true")));

    let out = run(&[
        "bounds",
        "--kind",
        "heavy-hex",
        "--shape",
        "disk",
        "--radius",
        "2",
        "--format",
        "json",
    ]);
    let reports: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(reports[0]["satisfied"].as_bool().unwrap());
    assert!(reports[0]["gap"].as_f64().unwrap() > 0.0);
}

#[test]
fn budget_examples() {
    let json =
        |args: &[&str]| -> serde_json::Value { serde_json::from_slice(&run(args).stdout).unwrap() };
    assert_eq!(
        json(&["budget", "--delta", "0.05", "--k", "100"])["k_shot_bound"],
        0.5
    );
    assert_eq!(
        json(&["budget", "--delta", "0.01", "--target", "0.1"])["max_shots"],
        100
    );
    assert_eq!(
        json(&["budget", "--delta", "0", "--k", "5"])["k_shot_bound"],
        0.0
    );
    assert_eq!(
        json(&["budget", "--delta", "0", "--target", "0.1"])["max_shots"],
        "unbounded"
    );
}

#[test]
fn environment_seed_overrides_flag() {
    let dir = tempfile::tempdir().unwrap();
    let from_env = bin()
        .args([
            "pinsker",
            "--count",
            "3",
            "--seed",
            "1",
            "--out",
            path(dir.path()),
        ])
        .env("COVERTLAT_SEED", "9")
        .output()
        .unwrap();
    assert_eq!(code(&from_env), 0);
    let dir2 = tempfile::tempdir().unwrap();
    assert_eq!(
        code(&run(&[
            "pinsker",
            "--count",
            "3",
            "--seed",
            "9",
            "--out",
            path(dir2.path())
        ])),
        0
    );
    let read = |d: &Path| std::fs::read(d.join("pinsker.csv")).unwrap();
    assert_eq!(read(dir.path()), read(dir2.path()));
    let manifest: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["seed"], 9);

    let bad = bin()
        .args(["pinsker", "--count", "1"])
        .env("COVERTLAT_SEED", "x")
        .output()
        .unwrap();
    assert_eq!(code(&bad), 2);
}

#[test]
fn simulate_null_and_crosstalk() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let null = run(&[
        "simulate",
        "--device",
        "emerald",
        "--n",
        "2",
        "--out",
        path(&d.join("null")),
    ]);
    assert_eq!(code(&null), 0);
    let s: Vec<SummaryRow> =
        read_csv(std::fs::File::open(d.join("null/summary.csv")).unwrap()).unwrap();
    let s = &s[0];
    assert!(s.nn_detected + s.nonnn_detected <= 3, "{s:?}");

    let loud = run(&[
        "simulate",
        "--device",
        "emerald",
        "--n",
        "2",
        "--zeta-nn",
        "90e3",
        "--zeta-lr",
        "15e3",
        "--lr-decay",
        "0.5",
        "--threshold",
        "12850",
        "--traces",
        "--out",
        path(&d.join("loud")),
    ]);
    assert_eq!(code(&loud), 0, "{}", String::from_utf8_lossy(&loud.stderr));
    let records: Vec<RamseyRecord> =
        read_csv(std::fs::File::open(d.join("loud/records.csv")).unwrap()).unwrap();
    let s: Vec<SummaryRow> =
        read_csv(std::fs::File::open(d.join("loud/summary.csv")).unwrap()).unwrap();
    assert_eq!(s[0].nn_detected, s[0].nn_total);
    assert!(s[0].nonnn_detected > 0);
    assert_eq!(records.len(), s[0].nn_total + s[0].nonnn_total);
    let traces = std::fs::read_to_string(d.join("loud/traces.csv")).unwrap();
    // Three runs of 39 points per record, plus the header.
    assert_eq!(traces.lines().count(), 1 + records.len() * 3 * 39);

    assert_eq!(
        code(&run(&[
            "simulate",
            "--device",
            "emerald",
            "--n",
            "2",
            "--shots",
            "0",
            "--out",
            path(d)
        ])),
        2
    );
}

#[test]
fn rerun_detects_changed_inputs() {
    let dir = tempfile::tempdir().unwrap();
    let device = dir.path().join("grid.json");
    let grid = covertlat::placement::DeviceTopology::square_grid(6, 6);
    std::fs::write(&device, grid.to_json().to_string()).unwrap();
    let out = dir.path().join("run");
    assert_eq!(
        code(&run(&[
            "plan",
            "--device",
            path(&device),
            "--n",
            "4",
            "--out",
            path(&out)
        ])),
        0
    );
    let manifest = out.join("manifest.json");
    assert_eq!(
        code(&run(&["rerun", "--manifest", path(&manifest), "--check"])),
        0
    );

    // Replaying into a fresh directory writes the same bytes.
    let again = dir.path().join("again");
    assert_eq!(
        code(&run(&[
            "rerun",
            "--manifest",
            path(&manifest),
            "--out",
            path(&again)
        ])),
        0
    );
    for name in ["placement.csv", "placement.json", "map.txt"] {
        assert_eq!(
            std::fs::read(out.join(name)).unwrap(),
            std::fs::read(again.join(name)).unwrap()
        );
    }

    let smaller = covertlat::placement::DeviceTopology::square_grid(5, 6);
    std::fs::write(&device, smaller.to_json().to_string()).unwrap();
    let stale = run(&["rerun", "--manifest", path(&manifest), "--check"]);
    assert_eq!(code(&stale), 4);
    assert!(String::from_utf8_lossy(&stale.stderr).contains("changed"));
}

#[test]
fn rerun_detects_tampered_outputs() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(
        code(&run(&[
            "budget",
            "--delta",
            "0.02",
            "--k",
            "9",
            "--out",
            path(dir.path())
        ])),
        0
    );
    let manifest = dir.path().join("manifest.json");
    assert_eq!(
        code(&run(&["rerun", "--manifest", path(&manifest), "--check"])),
        0
    );
    std::fs::write(dir.path().join("budget.csv"), "tampered\n").unwrap();
    assert_eq!(
        code(&run(&["rerun", "--manifest", path(&manifest), "--check"])),
        4
    );
}
