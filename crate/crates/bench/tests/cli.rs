use std::io::Write;
use std::process::{Command, Output};

fn spgemm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spgemm"))
        .args(args)
        .env_remove("SPGEMM_THREADS")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn field(text: &str, name: &str) -> String {
    text.lines()
        .find_map(|l| {
            l.strip_prefix(name)
                .map(|v| v.split_whitespace().next().unwrap().to_string())
        })
        .unwrap_or_else(|| panic!("no {name} in {text}"))
}

#[test]
fn multiply_with_check() {
    for algo in ["pb", "heap", "hash"] {
        let o = spgemm(&[
            "multiply", "--algo", algo, "--gen", "er", "--scale", "6", "--check",
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        let text = stdout(&o);
        assert!(text.contains("check     ok (against dense reference)"));
        assert_eq!(field(&text, "flop"), "1024");
    }
}

#[test]
fn er_scale_14_has_cf_near_one() {
    let o = spgemm(&[
        "multiply",
        "--algo",
        "pb",
        "--gen",
        "er",
        "--scale",
        "14",
        "--edge-factor",
        "4",
    ]);
    assert!(o.status.success());
    let cf: f64 = field(&stdout(&o), "cf").parse().unwrap();
    assert!((1.0..=1.05).contains(&cf), "cf = {cf}");
}

#[test]
fn pb_options_are_accepted() {
    let o = spgemm(&[
        "multiply",
        "--gen",
        "rmat",
        "--scale",
        "8",
        "--nbins",
        "16",
        "--lbin-bytes",
        "64",
        "--threads",
        "2",
        "--check",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(field(&stdout(&o), "threads"), "2");
}

#[test]
fn threads_env_fallback() {
    let o = Command::new(env!("CARGO_BIN_EXE_spgemm"))
        .args(["multiply", "--gen", "er", "--scale", "5"])
        .env("SPGEMM_THREADS", "3")
        .output()
        .unwrap();
    assert!(o.status.success());
    assert_eq!(field(&stdout(&o), "threads"), "3");
}

#[test]
fn analyze_prints_bounds() {
    let o = spgemm(&["analyze", "--gen", "er", "--scale", "10", "--beta", "50"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let cf: f64 = field(&text, "cf").parse().unwrap();
    let up: f64 = field(&text, "ai_upper").parse().unwrap();
    // Both fields are printed rounded: cf to 4 decimals, ai_upper to 6.
    assert!((up - cf / 16.0).abs() < 0.5e-4 / 16.0 + 0.5e-6);
}

#[test]
fn bench_writes_csv_and_plotdata() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("r.csv");
    let dat = dir.path().join("r.dat");
    let o = spgemm(&[
        "bench",
        "--algos",
        "pb,hash",
        "--gen",
        "er",
        "--scale",
        "6,7",
        "--threads",
        "1,2",
        "--beta",
        "10",
        "--out",
        csv.to_str().unwrap(),
        "--plotdata",
        dat.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().count(), 1 + 2 * 2 * 2);
    assert!(std::fs::read_to_string(&dat).unwrap().contains("# ceiling"));
}

#[test]
fn stream_reports_bandwidth() {
    let o = spgemm(&[
        "stream",
        "--bytes",
        "8388608",
        "--trials",
        "5",
        "--threads",
        "1",
    ]);
    assert!(o.status.success());
    let gbs: f64 = field(&stdout(&o), "median").parse().unwrap();
    assert!(gbs > 0.0);
}

#[test]
fn errors_exit_nonzero_with_message() {
    let o = spgemm(&["multiply", "--algo", "spa", "--gen", "er"]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("unknown algorithm"));

    let o = spgemm(&["multiply", "--matrix", "/nonexistent/a.mtx"]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("/nonexistent/a.mtx"));

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("rect.mtx");
    let mut f = std::fs::File::create(&path).unwrap();
    writeln!(
        f,
        "%%MatrixMarket matrix coordinate real general\n3 4 2\n1 1 1.0\n3 4 2.0"
    )
    .unwrap();
    drop(f);
    let o = spgemm(&["multiply", "--matrix", path.to_str().unwrap()]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("dimension mismatch"));

    let o = spgemm(&["bench", "--algos", "pb", "--out", "/tmp/never.csv"]);
    assert!(!o.status.success());
}

#[test]
fn file_input_is_squared() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sym.mtx");
    std::fs::write(
        &path,
        "%%MatrixMarket matrix coordinate real symmetric\n3 3 3\n1 1 2.0\n2 1 1.0\n3 3 4.0\n",
    )
    .unwrap();
    let o = spgemm(&["multiply", "--matrix", path.to_str().unwrap(), "--check"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    // A = [[2,1,0],[1,0,0],[0,0,4]]: columns hold 2, 1 and 1 entries.
    assert_eq!(field(&text, "flop"), "6");
    assert_eq!(field(&text, "nnz_c"), "5");
    assert!(text.contains("matrix    sym"));
}
