use std::process::Command;

fn choreo(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_choreo"))
        .args(args)
        .output()
        .unwrap();
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

#[test]
fn closed_form() {
    let (code, out, _) = choreo(&["closed-form", "--n", "5"]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().nth(1), Some("5,6,2,6,2"));
    let (code, _, err) = choreo(&["closed-form", "--n", "1"]);
    assert_eq!(code, 2);
    assert!(err.contains("at least 2"));
}

#[test]
fn study_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s.csv");
    let (code, _, err) = choreo(&[
        "study",
        "--runs",
        "200",
        "--seed",
        "4",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "{err}");
    let csv = std::fs::read_to_string(&out).unwrap();
    assert!(csv.starts_with("name,n,orch_mean,chor_mean,ratio_pct,runs\nworst,100,2.0,2.0,100,200\n"));
    assert!(dir.path().join("s.th10-in3-n5.hist.csv").exists());
    assert_eq!(err.lines().filter(|l| l.ends_with("ok")).count(), 6);
}

#[test]
fn failing_scenario_sets_exit_code() {
    // at a tiny radius almost nothing attaches and the rows miss their targets
    let (code, _, err) = choreo(&["study", "--runs", "20", "--radius", "0.05"]);
    assert_eq!(code, 1);
    assert!(err.contains("FAIL"));
}

#[test]
fn topology_dump() {
    let (code, out, _) = choreo(&["topology", "--n", "30", "--seed", "9"]);
    assert_eq!(code, 0);
    for line in out.lines() {
        let fields: Vec<&str> = line.split(' ').collect();
        assert_eq!(fields.len(), 5);
        let depth: u32 = fields[2].parse().unwrap();
        assert!((1..=4).contains(&depth));
    }
    assert_eq!(out, choreo(&["topology", "--n", "30", "--seed", "9"]).1);
}

#[test]
fn load_summary() {
    let (code, out, err) = choreo(&["load", "--runs", "4"]);
    assert_eq!(code, 0, "{err}");
    assert_eq!(out.lines().count(), 1 + 8);
    assert!(err.contains("100.0% of runs"));
}

#[test]
fn bad_parameters() {
    let (code, _, err) = choreo(&["topology", "--radius", "1.5"]);
    assert_eq!(code, 2);
    assert!(err.contains("radius"));
}
