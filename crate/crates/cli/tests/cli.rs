use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn hs2(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hs2")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn value<'a>(text: &'a str, key: &str) -> &'a str {
    text.lines()
        .find_map(|l| l.strip_prefix(&format!("{key}=")))
        .unwrap_or_else(|| panic!("no {key} in\n{text}"))
}

fn write_instance(dir: &Path, graph: &str, labels: &str) -> (String, String) {
    let g = dir.join("g.txt");
    let l = dir.join("l.txt");
    fs::write(&g, graph).unwrap();
    fs::write(&l, labels).unwrap();
    (g.display().to_string(), l.display().to_string())
}

#[test]
fn generate_hsbm_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    for out in [&a, &b] {
        let o = hs2(&["generate", "--n", "30", "--k", "2", "--seed", "7", "--out", out.to_str().unwrap()]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    for f in ["hypergraph.txt", "labels.txt", "manifest.txt"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f}");
    }
    assert!(fs::read_to_string(a.join("manifest.txt")).unwrap().contains("seed=7"));
}

#[test]
fn generate_rejects_uneven_classes() {
    let dir = tempfile::tempdir().unwrap();
    let o = hs2(&["generate", "--n", "31", "--k", "2", "--out", dir.path().to_str().unwrap()]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("not divisible by k"));
}

#[test]
fn generate_knn_from_three_points() {
    let dir = tempfile::tempdir().unwrap();
    let feats = dir.path().join("x.csv");
    fs::write(&feats, "0\n1\n2\n").unwrap();
    let out = dir.path().join("out");
    let o = hs2(&["generate", "--generator", "knn", "--features", feats.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    assert_eq!(fs::read_to_string(out.join("hypergraph.txt")).unwrap(), "3 1\n0 1 2\n");
}

#[test]
fn analyze_size_four_edge() {
    let dir = tempfile::tempdir().unwrap();
    let (g, l) = write_instance(dir.path(), "4 1\n0 1 2 3\n", "0 0\n1 1\n2 2\n3 3\n");
    let o = hs2(&["analyze", "--hypergraph", &g, "--labels", &l]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert_eq!(value(&text, "c_size"), "1");
    assert_eq!(value(&text, "ce_c_size"), "6");
    assert_eq!(value(&text, "boundary_size"), "4");
    assert_eq!(value(&text, "ce_boundary_size"), "4");
}

#[test]
fn analyze_uncut_and_two_uniform() {
    let dir = tempfile::tempdir().unwrap();
    let (g, l) = write_instance(dir.path(), "3 2\n0 1\n1 2\n", "0 0\n1 0\n2 0\n");
    let text = stdout(&hs2(&["analyze", "--hypergraph", &g, "--labels", &l]));
    assert_eq!(value(&text, "c_size"), "0");
    assert_eq!(value(&text, "kappa"), "none");

    let (g, l) = write_instance(dir.path(), "4 3\n0 1\n1 2\n2 3\n", "0 0\n1 0\n2 1\n3 1\n");
    let text = stdout(&hs2(&["analyze", "--hypergraph", &g, "--labels", &l]));
    for key in ["n", "k", "beta", "m", "kappa", "c_size", "boundary_size", "c_min"] {
        assert_eq!(value(&text, key), value(&text, &format!("ce_{key}")), "{key}");
    }
}

#[test]
fn bound_worked_example() {
    let base = ["bound", "--n", "100", "--k", "2", "--beta", "0.5", "--m", "1", "--kappa", "3", "--c-min", "2"];
    let text = stdout(&hs2(&base));
    assert_eq!(value(&text, "q_star"), "16.321928");
    assert_eq!(value(&text, "budget"), "17");
    let pair: Vec<&str> = base.iter().copied().chain(["--mode", "pair"]).collect();
    assert_eq!(value(&stdout(&hs2(&pair)), "budget"), "33");
    let noisy: Vec<&str> = base.iter().copied().chain(["--mode", "noisy", "--p", "0.1"]).collect();
    let text = stdout(&hs2(&noisy));
    assert_eq!(text.lines().filter(|l| l.starts_with("constraint_")).count(), 4);
    assert!(text.contains("min_M="));
    let bad: Vec<&str> = base.iter().copied().chain(["--mode", "noisy", "--p", "0.6"]).collect();
    assert!(!hs2(&bad).status.success());
}

#[test]
fn run_is_deterministic_across_workers() {
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for workers in ["1", "4"] {
        let out = dir.path().join(format!("r{workers}.csv"));
        let o = hs2(&[
            "run", "--algorithm", "hs2-point", "--hsbm-n", "12", "--budget", "12", "--trials", "4", "--seed", "3",
            "--workers", workers, "--out", out.to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        outputs.push(fs::read_to_string(&out).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
    let rows: Vec<&str> = outputs[0].lines().skip(1).collect();
    assert_eq!(rows.len(), 4);
    for r in rows {
        let cols: Vec<&str> = r.split(',').collect();
        assert_eq!(cols[8], "1", "exhaustive budget must succeed: {r}");
    }
}

#[test]
fn run_rejects_noisy_without_p() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.csv");
    let o = hs2(&["run", "--algorithm", "hs2-pair-noisy", "--hsbm-n", "12", "--budget", "50", "--out", out.to_str().unwrap()]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("need p"));
}

#[test]
fn run_writes_traces() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.csv");
    let traces = dir.path().join("traces");
    let o = hs2(&[
        "run", "--algorithm", "hs2-pair", "--hsbm-n", "12", "--budget", "20", "--out", out.to_str().unwrap(),
        "--trace", traces.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let trace = fs::read_to_string(traces.join("hs2-pair_trial0.trace")).unwrap();
    assert!(trace.lines().count() > 0);
    assert!(trace.lines().all(|l| l.split(' ').nth(1) == Some("pair")));
}
