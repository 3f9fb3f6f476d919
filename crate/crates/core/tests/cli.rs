use std::fs;
use std::path::Path;
use std::process::Command;

use zsf::cli::run;
use zsf::embed::parse_pattern;
use zsf::graphcore::{random_zero_sum, EdgeLabeling};

fn zsf(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("zsf").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn value<'a>(report: &'a str, key: &str) -> &'a str {
    report
        .lines()
        .find_map(|l| l.strip_prefix(key).and_then(|r| r.strip_prefix('=')))
        .unwrap_or_else(|| panic!("no {key} in\n{report}"))
}

fn p(dir: &Path, name: &str) -> String {
    dir.join(name).to_str().unwrap().to_string()
}

#[test]
fn extremal_star_example() {
    let dir = tempfile::tempdir().unwrap();
    let e8 = p(dir.path(), "e8.zsg");
    let (code, _, _) = zsf(&["gen", "--n", "8", "--extremal", "0mod4", "--out", &e8]);
    assert_eq!(code, 0);
    let (code, out, _) = zsf(&["star", "--in", &e8]);
    assert_eq!(code, 0);
    assert_eq!(value(&out, "abs_weight"), "3");
}

#[test]
fn p3_factor_example_and_verify() {
    let dir = tempfile::tempdir().unwrap();
    let r9 = p(dir.path(), "r9.zsg");
    assert_eq!(zsf(&["gen", "--n", "9", "--seed", "7", "--out", &r9]).0, 0);
    assert_eq!(fs::read_to_string(&r9).unwrap(), include_str!("fixtures/r9_seed7.zsg"));

    let (code, out, _) = zsf(&["factor", "--in", &r9, "--k", "3"]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("factor k=3 weight=0\n"));
    let fac = p(dir.path(), "r9.factor");
    fs::write(&fac, &out).unwrap();
    let (code, v, _) = zsf(&["verify", "--in", &r9, "--factor", &fac]);
    assert_eq!((code, value(&v, "verdict")), (0, "ok"));

    // the exhaustive oracle agrees that weight 0 is reachable
    let l = EdgeLabeling::from_zsg(&fs::read_to_string(&r9).unwrap()).unwrap();
    let f = parse_pattern("factor:P3", 9).unwrap();
    assert_eq!(zsf::embed::min_abs_weight_exhaustive(&l, &f).unwrap().0, 0);

    let (code, _, err) = zsf(&["factor", "--in", &r9, "--k", "4"]);
    assert_eq!(code, 1);
    assert!(err.contains("error=DivisibilityError"), "{err}");
}

#[test]
fn verify_rejects_tampering() {
    let dir = tempfile::tempdir().unwrap();
    let r9 = p(dir.path(), "r9.zsg");
    zsf(&["gen", "--n", "9", "--seed", "7", "--out", &r9]);
    let (_, out, _) = zsf(&["factor", "--in", &r9, "--k", "3"]);
    let fac = p(dir.path(), "f");

    // duplicated vertex
    let mut lines: Vec<String> = out.lines().skip_while(|l| !l.starts_with("factor ")).map(String::from).collect();
    let first = lines[1].split(' ').next().unwrap().to_string();
    let mut last: Vec<String> = lines[3].split(' ').map(String::from).collect();
    last[0] = first;
    lines[3] = last.join(" ");
    fs::write(&fac, lines.join("\n") + "\n").unwrap();
    let (code, v, _) = zsf(&["verify", "--in", &r9, "--factor", &fac]);
    assert_eq!((code, value(&v, "verdict")), (1, "mismatch"));
    assert!(value(&v, "reason").contains("twice"));

    // one label flipped on a factor edge
    fs::write(&fac, &out).unwrap();
    let l = EdgeLabeling::from_zsg(&fs::read_to_string(&r9).unwrap()).unwrap();
    let (path, _) = zsf::factorsolve::parse_factor(&out, 9).unwrap();
    let (a, b) = (path.paths()[0][0], path.paths()[0][1]);
    let flipped = l.with_label(a, b, -l.label(a, b));
    let bad = p(dir.path(), "flipped.zsg");
    fs::write(&bad, flipped.to_zsg()).unwrap();
    let (code, v, _) = zsf(&["verify", "--in", &bad, "--factor", &fac]);
    assert_eq!((code, value(&v, "verdict")), (1, "mismatch"));
    assert_eq!(value(&v, "weight").parse::<i64>().unwrap().abs(), 2);
}

#[test]
fn walk_output_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let mut rejected = 0;
    for seed in 0..25u64 {
        for (n, pattern) in [(8, "path"), (9, "factor:P3"), (12, "star"), (8, "matching"), (9, "edges:0-1,1-2,1-3,3-4")] {
            let zsg = p(dir.path(), "g.zsg");
            fs::write(&zsg, random_zero_sum(n, seed).unwrap().to_zsg()).unwrap();
            let (code, out, err) = zsf(&["walk", "--in", &zsg, "--pattern", pattern, "--seed", &seed.to_string()]);
            assert_eq!(code, 0, "{err}");
            let f = parse_pattern(pattern, n).unwrap();
            let w: i64 = value(&out, "weight").parse().unwrap();
            assert!(w.unsigned_abs() as usize <= f.max_degree() + 1);
            let emb = p(dir.path(), "e");
            fs::write(&emb, &out).unwrap();
            let (code, v, _) = zsf(&["verify", "--in", &zsg, "--embedding", &emb]);
            assert_eq!((code, value(&v, "verdict")), (0, "ok"), "{out}");
            // a non-permutation is caught
            let broken = out.replace("embedding pattern", "x").replacen("x", "embedding pattern", 1);
            let mut lines: Vec<&str> = broken.lines().collect();
            let host_line = lines.len() - 1;
            let dup = lines[host_line].split(' ').next().unwrap().to_string();
            let mut hosts: Vec<String> = lines[host_line].split(' ').map(String::from).collect();
            hosts[1] = dup;
            let joined = hosts.join(" ");
            lines[host_line] = &joined;
            fs::write(&emb, lines.join("\n")).unwrap();
            let (code, _, _) = zsf(&["verify", "--in", &zsg, "--embedding", &emb]);
            rejected += usize::from(code == 1);
        }
    }
    assert_eq!(rejected, 125);
}

#[test]
fn reports_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let g = p(dir.path(), "g.zsg");
    let g16 = p(dir.path(), "g16.zsg");
    zsf(&["gen", "--n", "12", "--seed", "3", "--out", &g]);
    zsf(&["gen", "--n", "16", "--seed", "3", "--out", &g16]);
    for args in [
        vec!["factor", "--in", &g16, "--k", "4"],
        vec!["factor", "--in", &g, "--k", "3"],
        vec!["walk", "--in", &g, "--pattern", "path"],
        vec!["conjecture", "--id", "2", "--n", "8", "--pattern", "star", "--samples", "200", "--seed", "5"],
        vec!["conjecture", "--id", "1", "--n", "9", "--pattern", "P3", "--samples", "200"],
    ] {
        let a = zsf(&args);
        let b = zsf(&[&["--jobs", "2"], &args[..]].concat());
        assert_eq!(a, b);
        assert_eq!(a.0, 0, "{}", a.1);
    }
}

#[test]
fn conjecture_reports() {
    let (code, out, _) = zsf(&["conjecture", "--id", "2", "--n", "4", "--pattern", "matching"]);
    assert_eq!(code, 0);
    assert_eq!(value(&out, "tested"), "20");
    assert_eq!(value(&out, "worst_min"), "0");
    assert_eq!(value(&out, "verdict"), "consistent");
    let (code, out, _) = zsf(&["conjecture", "--id", "2", "--n", "8", "--pattern", "star", "--mode", "canonical"]);
    assert_eq!(code, 0);
    assert_eq!(value(&out, "worst_min"), "3");
    assert_eq!(value(&out, "bound"), "3");
    let (code, _, err) = zsf(&["conjecture", "--id", "1", "--n", "10", "--pattern", "P3"]);
    assert_eq!(code, 1);
    assert!(err.contains("DivisibilityError"));
}

#[test]
fn lemma1_report() {
    let (code, out, _) = zsf(&["lemma1"]);
    assert_eq!(code, 0);
    assert_eq!(value(&out, "certified_value"), "5/256");
    let v: f64 = value(&out, "value").parse().unwrap();
    assert!((v - 5.0 / 256.0).abs() < 1e-9);
}

#[test]
fn usage_errors() {
    assert_eq!(zsf(&[]).0, 1);
    assert_eq!(zsf(&["factor", "--k", "3"]).0, 1);
    assert_eq!(zsf(&["factor", "--in", "/nonexistent", "--k", "3"]).0, 1);
    assert_eq!(zsf(&["factor", "--in", "x", "--k", "7"]).0, 1);
    assert_eq!(zsf(&["--help"]).0, 0);
}

#[test]
fn binary_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let g = p(dir.path(), "g.zsg");
    let bin = env!("CARGO_BIN_EXE_zsf");
    let st = Command::new(bin).args(["gen", "--n", "9", "--seed", "7", "--out", &g]).output().unwrap();
    assert!(st.status.success());
    let out = Command::new(bin).args(["factor", "--in", &g, "--k", "4"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let out = Command::new(bin).env("ZSF_JOBS", "0").args(["lemma1"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
}
