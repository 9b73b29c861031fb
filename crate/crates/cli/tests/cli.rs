use std::path::Path;
use std::process::Command;

use glassey_lab::run_with;

fn run(args: &[&str]) -> (i32, String) {
    let mut err = Vec::new();
    let mut argv = vec!["glassey-lab"];
    argv.extend_from_slice(args);
    let code = run_with(argv, &mut err);
    (code, String::from_utf8(err).unwrap())
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name)).unwrap()
}

fn assert_csv(text: &str, sub: &str) {
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), format!("# glassey-lab v1 {sub}"));
    assert!(lines.next().is_some_and(|h| !h.is_empty() && !h.starts_with('#')));
}

#[test]
fn hardy_example_has_200_clean_rows() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let (code, err) = run(&["ineq", "--lemma", "hardy", "--n", "3", "--s", "1.0", "--samples", "200", "--seed", "7", "--out", out]);
    assert_eq!(code, 0, "{err}");
    let csv = read(dir.path(), "ineq.csv");
    assert_csv(&csv, "ineq");
    let rows: Vec<&str> = csv.lines().skip(2).collect();
    assert_eq!(rows.len(), 200);
    assert!(rows.iter().all(|r| r.ends_with(",false")));
}

#[test]
fn unknown_flag_exits_2_with_usage() {
    let (code, err) = run(&["solve", "--nonsense", "1"]);
    assert_eq!(code, 2);
    assert!(err.contains("Usage"), "{err}");
    let (code, _) = run(&["frobnicate"]);
    assert_eq!(code, 2);
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_glassey-lab");
    let st = Command::new(bin).args(["solve", "--bogus"]).output().unwrap();
    assert_eq!(st.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&st.stderr).contains("Usage"));
    let st = Command::new(bin).arg("--help").output().unwrap();
    assert_eq!(st.status.code(), Some(0));
}

#[test]
fn precondition_and_assertion_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let (code, err) = run(&["kss", "--mode", "inhom", "--n", "2", "--cells", "300", "--out", out]);
    assert_eq!(code, 2);
    assert!(err.contains("parameters: kss") && err.contains("n=2"), "{err}");
    let (code, _) = run(&["solve", "--p", "abc", "--out", out]);
    assert_eq!(code, 2);
    let (code, _) = run(&["solve", "--jobs", "0", "--out", out]);
    assert_eq!(code, 2);
    // large data: the iteration diverges, which is an assertion failure
    let (code, err) = run(&["picard", "--eps", "5", "--cells", "400", "--out", out]);
    assert_eq!(code, 3, "{err}");
    assert_csv(&read(dir.path(), "picard.csv"), "picard");
}

#[test]
fn config_rerun_is_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = ["picard", "--t", "4", "--cells", "300", "--rmax", "14", "--out", a.path().to_str().unwrap()];
    assert_eq!(run(&args).0, 0);
    let cfg = a.path().join("config.txt");
    assert_csv(&read(a.path(), "config.txt"), "picard config");
    let (code, err) = run(&["picard", "--config", cfg.to_str().unwrap(), "--out", b.path().to_str().unwrap(), "--jobs", "3"]);
    assert_eq!(code, 0, "{err}");
    for f in ["picard.csv", "picard_summary.csv"] {
        assert_eq!(read(a.path(), f), read(b.path(), f), "{f}");
    }
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("in.txt");
    std::fs::write(&cfg, "n = 4\ncells = 300\nt = 1\n").unwrap();
    let out = dir.path().join("o");
    let (code, err) = run(&["solve", "--config", cfg.to_str().unwrap(), "--t", "0.5", "--out", out.to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    let echoed = read(&out, "config.txt");
    assert!(echoed.contains("n = 4\n") && echoed.contains("t = 0.5\n") && echoed.contains("cells = 300\n"));
    std::fs::write(&cfg, "mystery = 1\n").unwrap();
    assert_eq!(run(&["solve", "--config", cfg.to_str().unwrap()]).0, 2);
}

#[test]
fn every_subcommand_writes_tagged_csvs() {
    let dir = tempfile::tempdir().unwrap();
    let o = |s: &str| dir.path().join(s).to_str().unwrap().to_owned();
    let cases: Vec<(&str, Vec<String>, Vec<&str>)> = vec![
        ("solve", vec!["--t".into(), "1".into(), "--cells".into(), "300".into()], vec!["solve.csv", "solve_summary.csv"]),
        ("norms", vec!["--t".into(), "1".into(), "--cells".into(), "300".into(), "--eps".into(), "0.1".into()], vec!["norms.csv"]),
        (
            "kss",
            vec!["--horizons".into(), "1,2".into(), "--rmax".into(), "12".into(), "--cells".into(), "240".into()],
            vec!["kss.csv", "kss_detail.csv"],
        ),
        (
            "lifespan",
            vec![
                "--eps".into(), "2,3,4,6".into(), "--rmax".into(), "30".into(), "--cells".into(), "300".into(),
                "--horizon".into(), "15".into(), "--jobs".into(), "2".into(),
            ],
            vec!["sweep.csv", "fit.csv"],
        ),
        ("ineq", vec!["--lemma".into(), "trace_variant".into(), "--n".into(), "2".into(), "--s".into(), "0".into(), "--samples".into(), "20".into()], vec!["ineq.csv"]),
        ("ineq", vec!["--lemma".into(), "energy_ineq".into(), "--cells".into(), "400".into(), "--rmax".into(), "12".into()], vec!["ineq.csv", "ineq_detail.csv"]),
    ];
    for (k, (sub, extra, files)) in cases.into_iter().enumerate() {
        let out = o(&format!("{sub}{k}"));
        let mut args = vec![sub.to_owned(), "--out".into(), out.clone()];
        args.extend(extra);
        let refs: Vec<&str> = args.iter().map(String::as_str).collect();
        let (code, err) = run(&refs);
        assert_eq!(code, 0, "{sub}: {err}");
        for f in files {
            assert_csv(&read(Path::new(&out), f), sub);
        }
    }
}
