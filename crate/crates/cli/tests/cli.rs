use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn rcgs(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rcgs"))
        .args(args)
        .output()
        .expect("failed to run rcgs")
}

fn ok(args: &[&str]) -> String {
    let out = rcgs(args);
    assert!(
        out.status.success(),
        "rcgs {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn camera() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/tests/data/camera.pgm")
}

#[test]
fn encode_decode_round_trip() {
    let dir = TempDir::new().unwrap();
    let input = dir.path().join("text.txt");
    let data = b"the quick brown fox jumps over the lazy dog. ".repeat(200);
    std::fs::write(&input, &data).unwrap();

    let report = ok(&["encode", p(&input)]);
    assert!(report.contains("bits/symbol"), "{report}");
    let packed = dir.path().join("text.txt.rcgs");
    assert!(packed.exists());

    std::fs::remove_file(&input).unwrap();
    ok(&["decode", p(&packed)]);
    assert_eq!(std::fs::read(&input).unwrap(), data);

    let explicit = dir.path().join("again.bin");
    ok(&["decode", p(&packed), "-o", p(&explicit)]);
    assert_eq!(std::fs::read(&explicit).unwrap(), data);
}

#[test]
fn encode_flags_change_output() {
    let dir = TempDir::new().unwrap();
    let input = dir.path().join("g.bin");
    ok(&[
        "gen",
        "-o",
        p(&input),
        "gaussian",
        "--sigma-sq",
        "25",
        "--length",
        "20000",
    ]);
    let a = dir.path().join("a.rcgs");
    let b = dir.path().join("b.rcgs");
    ok(&["encode", p(&input), "-o", p(&a)]);
    ok(&[
        "encode",
        p(&input),
        "-o",
        p(&b),
        "--t-delta",
        "0.2",
        "--raw-threshold",
        "1000",
    ]);
    assert_ne!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    for packed in [&a, &b] {
        let out = dir.path().join("out.bin");
        ok(&["decode", p(packed), "-o", p(&out)]);
        assert_eq!(std::fs::read(&out).unwrap(), std::fs::read(&input).unwrap());
    }
    assert!(!rcgs(&["encode", p(&input), "--t-delta", "1.5"])
        .status
        .success());
}

#[test]
fn empty_file() {
    let dir = TempDir::new().unwrap();
    let input = dir.path().join("empty");
    std::fs::write(&input, b"").unwrap();
    ok(&["encode", p(&input)]);
    let packed = std::fs::read(dir.path().join("empty.rcgs")).unwrap();
    assert_eq!(packed, b"RCGS\x01\x00\x00\x00");
    let out = dir.path().join("restored");
    ok(&["decode", p(&dir.path().join("empty.rcgs")), "-o", p(&out)]);
    assert!(std::fs::read(&out).unwrap().is_empty());
}

#[test]
fn gaussian_file_within_three_percent_of_entropy() {
    let dir = TempDir::new().unwrap();
    let input = dir.path().join("g25.bin");
    ok(&[
        "gen",
        "gaussian",
        "--sigma-sq",
        "25",
        "--seed",
        "7",
        "-o",
        p(&input),
    ]);
    assert_eq!(std::fs::metadata(&input).unwrap().len(), 262144);
    let report = ok(&["encode", p(&input)]);
    // "... -> N bytes, X bits/symbol (entropy H), ..."
    let bps: f64 = report
        .split(", ")
        .nth(1)
        .unwrap()
        .split(' ')
        .next()
        .unwrap()
        .parse()
        .unwrap();
    let h: f64 = report
        .split("entropy ")
        .nth(1)
        .unwrap()
        .split(')')
        .next()
        .unwrap()
        .parse()
        .unwrap();
    assert!(bps >= h && bps <= 1.03 * h, "{report}");
}

#[test]
fn decode_rejects_bad_input_without_writing() {
    let dir = TempDir::new().unwrap();
    let bogus = dir.path().join("bogus.rcgs");
    std::fs::write(&bogus, b"PK\x03\x04 definitely not ours").unwrap();
    let out = rcgs(&["decode", p(&bogus)]);
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("not an RCGS container"), "{err}");
    assert!(!dir.path().join("bogus").exists());

    let input = dir.path().join("m.bin");
    ok(&[
        "gen",
        "markov",
        "--p-stay",
        "0.9",
        "--length",
        "5000",
        "-o",
        p(&input),
    ]);
    let packed_path = dir.path().join("m.rcgs");
    ok(&["encode", p(&input), "-o", p(&packed_path)]);
    let packed = std::fs::read(&packed_path).unwrap();
    let cut = dir.path().join("cut.rcgs");
    std::fs::write(&cut, &packed[..packed.len() / 2]).unwrap();
    let target = dir.path().join("cut.out");
    let out = rcgs(&["decode", p(&cut), "-o", p(&target)]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("truncated"));
    assert!(!target.exists());

    let missing = rcgs(&["decode", p(&dir.path().join("nope.rcgs"))]);
    assert!(!missing.status.success());
}

#[test]
fn entropy_prints_three_decimals() {
    let dir = TempDir::new().unwrap();
    let f = dir.path().join("ab");
    std::fs::write(&f, b"aabb").unwrap();
    let one = dir.path().join("one");
    std::fs::write(&one, b"x").unwrap();
    let out = ok(&["entropy", p(&f), p(&one)]);
    let lines: Vec<&str> = out.lines().collect();
    assert!(lines[0].starts_with("1.000\t4\t"), "{out}");
    assert!(lines[1].starts_with("0.000\t1\t"), "{out}");
}

#[test]
fn gen_is_deterministic_and_validates() {
    let dir = TempDir::new().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    for f in [&a, &b] {
        ok(&[
            "gen",
            "markov",
            "--p-stay",
            "0.99",
            "--length",
            "1000",
            "--seed",
            "3",
            "-o",
            p(f),
        ]);
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert!(!rcgs(&["gen", "markov", "--p-stay", "1.5", "-o", p(&a)])
        .status
        .success());
    assert!(!rcgs(&["gen", "gaussian", "--sigma-sq", "1"])
        .status
        .success());

    let dct = dir.path().join("dct");
    let out = ok(&[
        "gen",
        "dct",
        "--image",
        p(&camera()),
        "--qs",
        "30",
        "-o",
        p(&dct),
    ]);
    assert_eq!(std::fs::metadata(&dct).unwrap().len(), 512 * 512, "{out}");
}

#[test]
fn analyze_lists_levels() {
    let dir = TempDir::new().unwrap();
    let input = dir.path().join("g");
    ok(&[
        "gen",
        "gaussian",
        "--sigma-sq",
        "400",
        "--length",
        "50000",
        "-o",
        p(&input),
    ]);
    let out = ok(&["analyze", p(&input)]);
    assert!(out.contains("level 0:") && out.contains("N_s") && out.contains("t_delta_used"));
    assert!(out.contains("grouped") && out.contains("vs entropy"));
}

#[test]
fn bench_gen_spec_tsv() {
    let out = ok(&[
        "bench",
        "gen:gaussian,σ²=0.5,len=262144,seed=1",
        "--format",
        "tsv",
        "--repeats",
        "1",
    ]);
    let lines: Vec<Vec<&str>> = out.lines().map(|l| l.split('\t').collect()).collect();
    assert_eq!(lines.len(), 2, "{out}");
    let header = &lines[0];
    let row = &lines[1];
    assert_eq!(header.len(), 3 + 3 * 5);
    let col = |name: &str| row[header.iter().position(|h| *h == name).unwrap()];
    let h: f64 = col("entropy").parse().unwrap();
    let r: f64 = col("rcgs_bps").parse().unwrap();
    assert!(r <= 1.03 * h, "{out}");
    assert!(col("ac_bps").parse::<f64>().unwrap() > 0.0);
    assert!(col("hc_enc_MiB/s").parse::<f64>().unwrap() > 0.0);
}

#[test]
fn bench_directory_adds_average_row() {
    let dir = TempDir::new().unwrap();
    std::fs::write(dir.path().join("one"), b"x").unwrap();
    std::fs::write(dir.path().join("two"), b"hello hello hello").unwrap();
    let out = ok(&[p(dir.path())]
        .iter()
        .fold(vec!["bench", "--coders", "rcgs"], |mut v, a| {
            v.push(a);
            v
        }));
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 4, "{out}");
    assert!(lines[1].starts_with("one"));
    assert!(lines[1].contains("0.000"));
    assert!(lines[3].starts_with("Average"));
    assert!(!out.contains("ac_bps"));
}

#[test]
fn bench_rejects_bad_specs() {
    assert!(!rcgs(&["bench", "gen:uniform,len=10"]).status.success());
    assert!(
        !rcgs(&["bench", "gen:gaussian,sigma_sq=1", "--repeats", "0"])
            .status
            .success()
    );
    assert!(
        !rcgs(&["bench", "gen:gaussian,sigma_sq=1", "--coders", "zip"])
            .status
            .success()
    );
}
