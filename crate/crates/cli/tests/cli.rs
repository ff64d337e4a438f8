use std::path::Path;
use std::process::{Command, Output};

use kissbound_core::exactbounds::total_bound;
use kissbound_core::{BoundReport, CurveSample, ExponentResult};

fn kissbound(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kissbound"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn bound_examples() {
    let dir = tempfile::tempdir().unwrap();
    let text = stdout(&kissbound(
        &[
            "bound", "--p", "1", "--n", "10", "--m", "7", "--format", "csv",
        ],
        dir.path(),
    ));
    assert!(text.contains("\n3,1,20,1,20\n"), "{text}");
    let one = stdout(&kissbound(
        &["bound", "--p", "2", "--n", "1", "--format", "csv"],
        dir.path(),
    ));
    assert!(one.ends_with("total,,,,2\n"));
    let large = stdout(&kissbound(
        &[
            "bound",
            "--p",
            "3",
            "--n",
            "8",
            "--m",
            "n",
            "--large-p",
            "--format",
            "csv",
        ],
        dir.path(),
    ));
    assert!(large.ends_with("total,,,,272\n"));
}

#[test]
fn bound_json_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let json = stdout(&kissbound(
        &[
            "bound", "--p", "2.1", "--n", "30", "--m", "12", "--format", "json",
        ],
        dir.path(),
    ));
    let parsed: BoundReport = serde_json::from_str(&json).unwrap();
    assert_eq!(parsed, total_bound(2.1, 30, 12).unwrap());
    assert_eq!(serde_json::to_string_pretty(&parsed).unwrap() + "\n", json);
}

#[test]
fn exponent_json_carries_full_precision() {
    let dir = tempfile::tempdir().unwrap();
    let json = stdout(&kissbound(
        &["exponent", "--p", "2", "--format", "json"],
        dir.path(),
    ));
    let parsed: ExponentResult = serde_json::from_str(&json).unwrap();
    assert!((parsed.g_value - 0.2059).abs() < 5e-4);
    let value: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert!(value["euclid_exponent"].as_f64().unwrap() > parsed.g_value);
    let text = stdout(&kissbound(&["exponent", "--p", "2"], dir.path()));
    assert!(text.contains("g* 0.2059"), "{text}");
}

#[test]
fn curve_csv_shape() {
    let dir = tempfile::tempdir().unwrap();
    let csv = stdout(&kissbound(
        &["curve", "--p", "1", "--step", "0.001"],
        dir.path(),
    ));
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "sigma,g");
    assert_eq!(lines.len(), 1000);
    assert!(!csv.contains('\r'));
    let best = lines[1..]
        .iter()
        .map(|l| {
            let (s, g) = l.split_once(',').unwrap();
            (s.parse::<f64>().unwrap(), g.parse::<f64>().unwrap())
        })
        .fold((0.0, f64::MIN), |a, b| if b.1 > a.1 { b } else { a });
    assert!((best.0 - 0.2605).abs() < 2e-3 && (best.1 - 0.1825).abs() < 5e-4);

    let json = stdout(&kissbound(
        &["curve", "--p", "4", "--step", "0.01", "--format", "json"],
        dir.path(),
    ));
    let samples: Vec<CurveSample> = serde_json::from_str(&json).unwrap();
    let top = samples.iter().max_by(|a, b| a.g.total_cmp(&b.g)).unwrap();
    assert_eq!(top.sigma, samples.last().unwrap().sigma);
}

#[test]
fn construct_then_verify() {
    let dir = tempfile::tempdir().unwrap();
    stdout(&kissbound(
        &[
            "construct",
            "--p",
            "1",
            "--n",
            "6",
            "--m",
            "4",
            "--cert",
            "c.txt",
        ],
        dir.path(),
    ));
    let summary = stdout(&kissbound(
        &["verify", "c.txt", "--format", "json"],
        dir.path(),
    ));
    let value: serde_json::Value = serde_json::from_str(&summary).unwrap();
    assert!(
        value["points"].as_u64().unwrap() >= value["guarantee"].as_str().unwrap().parse().unwrap()
    );

    let text = std::fs::read_to_string(dir.path().join("c.txt")).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    let mut tampered: Vec<String> = lines.iter().map(|s| s.to_string()).collect();
    tampered[9] = tampered[8].clone();
    std::fs::write(dir.path().join("bad.txt"), tampered.join("\n") + "\n").unwrap();
    let out = kissbound(&["verify", "bad.txt"], dir.path());
    assert_eq!(out.status.code(), Some(4));

    std::fs::write(dir.path().join("garbled.txt"), "not a certificate\n").unwrap();
    assert_eq!(
        kissbound(&["verify", "garbled.txt"], dir.path())
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn binary_first_shell_at_full_weight() {
    let dir = tempfile::tempdir().unwrap();
    stdout(&kissbound(
        &[
            "construct",
            "--p",
            "2",
            "--n",
            "5",
            "--m",
            "5",
            "--cert",
            "c.txt",
        ],
        dir.path(),
    ));
    let text = std::fs::read_to_string(dir.path().join("c.txt")).unwrap();
    let signs: Vec<u32> = text
        .lines()
        .skip_while(|l| !l.starts_with("shell 1 "))
        .skip(1)
        .take_while(|l| !l.starts_with("shell") && *l != "end")
        .map(|l| {
            let s = l.split_whitespace().last().unwrap();
            s.chars().fold(0, |acc, c| acc << 1 | (c == '-') as u32)
        })
        .collect();
    assert!(!signs.is_empty());
    for (i, a) in signs.iter().enumerate() {
        for b in &signs[i + 1..] {
            assert!((a ^ b).count_ones() >= 2);
        }
    }
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let code = |args: &[&str]| kissbound(args, dir.path()).status.code();
    assert_eq!(code(&["bound", "--p", "0.5", "--n", "4"]), Some(2));
    assert_eq!(
        code(&["bound", "--p", "2", "--n", "4", "--m", "9"]),
        Some(2)
    );
    assert_eq!(code(&["compare", "--p", "2.5"]), Some(2));
    assert_eq!(
        code(&["sweep", "--p-range", "1:x:0.1", "--quantity", "gstar"]),
        Some(2)
    );
    assert_eq!(
        code(&[
            "construct",
            "--p",
            "2",
            "--n",
            "8",
            "--m",
            "8",
            "--cap",
            "100"
        ]),
        Some(3)
    );
    assert_eq!(code(&["exponent", "--p", "2"]), Some(0));
}

#[test]
fn failed_runs_leave_no_output_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = kissbound(
        &["bound", "--p", "0.5", "--n", "4", "--out", "r.txt"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(!dir.path().join("r.txt").exists());
    let out = kissbound(
        &["curve", "--p", "1", "--out", "missing/dir/c.csv"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 0);

    stdout(&kissbound(
        &["curve", "--p", "2", "--step", "0.1", "--out", "c.csv"],
        dir.path(),
    ));
    let written = std::fs::read_to_string(dir.path().join("c.csv")).unwrap();
    assert_eq!(written.lines().count(), 10);
}

#[test]
fn sweep_over_p() {
    let dir = tempfile::tempdir().unwrap();
    let csv = stdout(&kissbound(
        &["sweep", "--p-range", "1:4:0.1", "--quantity", "leading"],
        dir.path(),
    ));
    let rows: Vec<&str> = csv.lines().skip(1).collect();
    assert_eq!(rows.len(), 31);
    let value = |p: &str| -> f64 {
        let row = rows
            .iter()
            .find(|r| r.split(',').next() == Some(p))
            .unwrap();
        row.split(',').nth(1).unwrap().parse().unwrap()
    };
    assert!((value("3") - 0.4564).abs() < 5e-4);
    assert!((value("2.2") - 0.2442).abs() < 5e-4);

    let by_n = stdout(&kissbound(
        &[
            "sweep",
            "--n-range",
            "1:5",
            "--p",
            "2",
            "--quantity",
            "bound",
        ],
        dir.path(),
    ));
    assert_eq!(by_n.lines().next(), Some("n,bound"));
    assert_eq!(by_n.lines().nth(1), Some("1,2"));
}

#[test]
fn compare_reports_the_larger_exponent() {
    let dir = tempfile::tempdir().unwrap();
    let at2 = stdout(&kissbound(
        &["compare", "--p", "2", "--format", "json"],
        dir.path(),
    ));
    let v: serde_json::Value = serde_json::from_str(&at2).unwrap();
    assert_eq!(v["comparison_is_larger"], true);
    let at15 = stdout(&kissbound(
        &["compare", "--p", "1.5", "--format", "json"],
        dir.path(),
    ));
    let v: serde_json::Value = serde_json::from_str(&at15).unwrap();
    assert_eq!(v["comparison_is_larger"], false);
}
