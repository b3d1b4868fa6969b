use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn spca(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spca"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn gen_solve_tune_certify() {
    let dir = tempfile::tempdir().unwrap();
    let m = dir.path().join("m.csv");
    let truth = dir.path().join("truth.csv");
    let mask = dir.path().join("mask.csv");
    let o = spca(&[
        "gen", "--d", "8", "--s", "3", "--gap", "20", "--budget", "64", "--seed", "3",
        "--out", path(&m), "--truth", path(&truth), "--mask", path(&mask),
    ]);
    assert!(o.status.success(), "{o:?}");
    let out = stdout(&o);
    let support = out.lines().find_map(|l| l.strip_prefix("support: ")).unwrap().to_owned();
    assert_eq!(support.split(',').count(), 3);

    let o = spca(&["solve", "--in", path(&m), "--rho", "0.3", "--strict"]);
    assert!(o.status.success(), "{o:?}");
    assert!(stdout(&o).contains("converged: true"));
    assert!(stdout(&o).contains(&format!("support: {support}")));

    let o = spca(&["tune", "--in", path(&m), "--grid-start", "0.1", "--grid-stop", "0.5", "--grid-step", "0.1"]);
    assert!(o.status.success(), "{o:?}");
    let text = stdout(&o);
    assert_eq!(text.lines().filter(|l| l.starts_with("0.")).count(), 5);
    assert!(text.contains("chosen_rho: "));

    let o = spca(&[
        "certify", "--truth", path(&truth), "--in", path(&m), "--mask", path(&mask), "--rho", "0.3",
        "--support", &support,
    ]);
    assert!(o.status.success(), "{o:?}");
    assert!(stdout(&o).contains("certified: "));
    assert!(stdout(&o).contains("all_hold: "));
}

#[test]
fn strict_not_converged_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let m = dir.path().join("m.csv");
    assert!(spca(&["gen", "--d", "6", "--s", "2", "--gap", "1", "--sigma", "0.5", "--seed", "1", "--out", path(&m)])
        .status
        .success());
    let o = spca(&["solve", "--in", path(&m), "--rho", "0.1", "--max-iter", "1", "--strict"]);
    assert_eq!(o.status.code(), Some(3), "{o:?}");
    let o = spca(&["solve", "--in", path(&m), "--rho", "0.1", "--max-iter", "1"]);
    assert_eq!(o.status.code(), Some(0), "{o:?}");
}

#[test]
fn validation_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.csv");
    fs::write(&bad, "1,2\n3\n").unwrap();
    let o = spca(&["solve", "--in", path(&bad), "--rho", "0.1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("row 2"));

    let o = spca(&["solve", "--rho", "0.1"]);
    assert_eq!(o.status.code(), Some(2));

    let ok = dir.path().join("ok.csv");
    fs::write(&ok, "1,0\n0,1\n").unwrap();
    let o = spca(&["solve", "--in", path(&ok), "--rho", "-1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn synthetic_experiment_writes_rows() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("rows.csv");
    let args = [
        "experiment", "--mode", "synthetic", "--d", "10", "--s", "3", "--gap", "10", "--budget", "60",
        "--buckets", "0:2,2:4", "--reps", "2", "--grid-start", "0.2", "--grid-stop", "0.4",
        "--grid-step", "0.2", "--seed", "5", "--out", path(&out),
    ];
    let o = spca(&args);
    assert!(o.status.success(), "{o:?}");
    let text = fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "bucket_lo,bucket_hi,gap,sigma,reps,rate,mean_rescaled");
    assert_eq!(lines.len(), 3);
    assert!(lines[1].starts_with("0,2,10,0,"));

    let again = dir.path().join("again.csv");
    let mut args2 = args.to_vec();
    *args2.last_mut().unwrap() = path(&again);
    args2.extend(["--threads", "1"]);
    assert!(spca(&args2).status.success());
    assert_eq!(fs::read(&out).unwrap(), fs::read(&again).unwrap());
}

#[test]
fn pitprops_experiment_runs() {
    let data = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/pitprops.csv");
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("p.csv");
    let o = spca(&[
        "experiment", "--mode", "pitprops", "--matrix", path(&data), "--buckets", "0:2", "--reps", "2",
        "--method", "dtspca", "--out", path(&out),
    ]);
    assert!(o.status.success(), "{o:?}");
    let text = fs::read_to_string(&out).unwrap();
    assert!(text.lines().nth(1).unwrap().starts_with("0,2,"));
}

#[test]
fn bounds_checks() {
    let o = spca(&["bounds", "--check", "thm2", "--rows", "4", "--cols", "5", "--trials", "2000"]);
    assert!(o.status.success(), "{o:?}");
    assert!(stdout(&o).contains("holds: true"));

    let dir = tempfile::tempdir().unwrap();
    let y = dir.path().join("y.csv");
    let mask = dir.path().join("mask.csv");
    fs::write(&y, "1,2,0\n2,-1,0.5\n0,0.5,3\n").unwrap();
    fs::write(&mask, "1,1,0\n1,1,1\n0,1,1\n").unwrap();
    let o = spca(&["bounds", "--check", "thm3", "--in", path(&y), "--mask", path(&mask)]);
    assert!(o.status.success(), "{o:?}");
    assert!(stdout(&o).contains("holds: true"));

    let o = spca(&["bounds", "--check", "thm3"]);
    assert_eq!(o.status.code(), Some(2));
}
