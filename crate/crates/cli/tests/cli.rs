use std::fs;
use std::process::{Command, Output};

fn hexdimer(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hexdimer")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn reader(o: &Output) -> csv::Reader<&[u8]> {
    csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(&o.stdout[..])
}

/// Data rows of a CSV report, metadata lines skipped.
fn rows(o: &Output) -> Vec<Vec<String>> {
    reader(o)
        .records()
        .map(|r| r.unwrap().iter().map(str::to_owned).collect())
        .collect()
}

#[test]
fn constant_value() {
    let o = hexdimer(&["constant"]);
    assert!(o.status.success());
    let c: f64 = rows(&o)[0][0].parse().unwrap();
    assert!((c + 0.080842).abs() < 5e-6);
    assert!(stdout(&o).contains("# convention: f = -ln Z / V"));
}

#[test]
fn verify_passes() {
    let o = hexdimer(&["verify"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn failed_verification_exits_three() {
    let o = hexdimer(&["--tol-override", "oracle_tol=0", "verify", "--kasteleyn"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(hexdimer(&["partition", "--M", "2"]).status.code(), Some(1));
    assert_eq!(hexdimer(&["coeffs", "--scenario", "finite", "--a", "1", "--b", "1"]).status.code(), Some(1));
    assert_eq!(hexdimer(&["--tol-override", "bogus=1", "constant"]).status.code(), Some(1));
    assert_eq!(hexdimer(&["--help"]).status.code(), Some(0));
}

#[test]
fn numerical_failure_exits_two() {
    let o = hexdimer(&["fit", "--scenario", "finite", "--a", "1", "--b", "1", "--c", "1", "--inv-eps-max", "8"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn partition_methods_agree() {
    let o = hexdimer(&["partition", "--M", "2", "--N", "2", "--K", "2", "--q", "0.5"]);
    assert!(o.status.success());
    let r = rows(&o);
    let methods: Vec<&str> = r.iter().map(|x| x[0].as_str()).collect();
    assert_eq!(methods, ["macmahon", "enumeration", "kasteleyn"]);
    for x in &r {
        let z: f64 = x[2].parse().unwrap();
        assert!((z - 3.02734375).abs() < 1e-12, "{x:?}");
    }
}

#[test]
fn table_row_reproduces_fit() {
    let o = hexdimer(&["table1", "--row", "cosine:1,3"]);
    assert!(o.status.success());
    let r = rows(&o);
    assert_eq!(r.len(), 1);
    let header: Vec<String> = reader(&o).headers().unwrap().iter().map(str::to_owned).collect();
    let col = |name: &str| -> f64 { r[0][header.iter().position(|h| *h == name).unwrap()].parse().unwrap() };
    assert!((col("f0_fitted") - 0.472206693).abs() < 1e-7);
    assert!((col("f3_fitted") + 0.043827958).abs() < 1e-6);
    assert!((col("12ab_f2_fitted") - 1.0).abs() < 2e-3);
}

#[test]
fn json_output_parses() {
    let o = hexdimer(&["--json", "coeffs", "--scenario", "infinite", "--a", "1", "--b", "1"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v["meta"]["convention"].as_str().unwrap().contains("-ln Z / V"));
    let row = &v["rows"][0];
    let f2 = row["f2"].as_f64().unwrap();
    assert!((12.0 * f2 + 1.0).abs() < 1e-14);
}

#[test]
fn output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, threads: &str| {
        let path = dir.path().join(name);
        let p = path.to_str().unwrap();
        let o = hexdimer(&["--out", p, "--threads", threads, "free-energy", "--a", "1", "--b", "3", "--phi", "cosine", "--inv-eps-min", "2", "--inv-eps-max", "40"]);
        assert!(o.status.success());
        fs::read(path).unwrap()
    };
    let first = run("a.csv", "1");
    assert_eq!(first, run("b.csv", "4"));
    assert!(String::from_utf8(first).unwrap().lines().count() > 39);
}

#[test]
fn tabulated_profile_matches_closed_form() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("phi.csv");
    let mut text = String::from("t,phi\n");
    for i in 0..=400 {
        let t = -1.5 + 5.0 * f64::from(i) / 400.0;
        text += &format!("{t},{}\n", 1.0 + 0.5 * t);
    }
    fs::write(&path, text).unwrap();
    let tab = format!("tabulated:{}", path.display());
    let value = |phi: &str| -> f64 {
        let o = hexdimer(&["partition", "--M", "3", "--N", "4", "--phi", phi, "--inv-eps", "4"]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        rows(&o)[0][1].parse().unwrap()
    };
    // A natural spline reproduces a linear profile exactly.
    assert!((value(&tab) - value("linear:1,0.5")).abs() < 1e-12);
}
