use std::io::Cursor;

use clipscale::cli::records::{GradientRecord, NoiseRecord, NormRecord, SolutionRecord, Status};
use clipscale::cli::{run, EXIT_FAILED_RECORDS, EXIT_OK, EXIT_USAGE};

fn cli(args: &[&str], stdin: &str) -> (i32, String, String) {
    let mut argv = vec!["clipscale"];
    argv.extend_from_slice(args);
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = run(argv, &mut Cursor::new(stdin.as_bytes()), &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

fn parse<T: serde::de::DeserializeOwned>(out: &str) -> Vec<T> {
    out.lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect()
}

#[test]
fn solve_worked_examples() {
    let input = concat!(
        r#"{"id":"a","x":[0.9,0.5],"delta":[1,1],"eps":0.5}"#,
        "\n",
        r#"{"id":"b","x":[0.9],"delta":[1],"eps":0.5}"#,
        "\n",
        r#"{"id":"c","x":[0.9,0.5],"delta":[1,1],"eps":0}"#,
        "\n",
    );
    let (code, out, _) = cli(&["solve"], input);
    assert_eq!(code, EXIT_FAILED_RECORDS);
    let recs: Vec<SolutionRecord> = parse(&out);
    assert_eq!(recs.len(), 3);

    assert_eq!(recs[0].id.as_deref(), Some("a"));
    assert_eq!(recs[0].status, Status::Ok);
    assert!((recs[0].eta.unwrap() - 0.24f64.sqrt()).abs() < 1e-12);
    assert_eq!(recs[0].saturated_count, Some(1));
    assert!((recs[0].achieved_norm.unwrap() - 0.5).abs() <= 1e-9);

    assert_eq!(recs[1].status, Status::Unreachable);
    assert!((recs[1].max_norm.unwrap() - 0.1).abs() < 1e-12);

    assert_eq!(recs[2].status, Status::Ok);
    assert_eq!(recs[2].eta, Some(0.0));
}

#[test]
fn solve_all_ok_exits_zero_and_emits_vector() {
    let input = r#"{"x":[0.9,0.5],"delta":[1,1],"eps":0.5}"#;
    let (code, out, _) = cli(&["solve", "--emit-vector"], input);
    assert_eq!(code, EXIT_OK);
    let rec: SolutionRecord = serde_json::from_str(out.trim()).unwrap();
    let v = rec.vector.unwrap();
    assert_eq!(v[0], 1.0);
    assert!((v[1] - (0.5 + 0.24f64.sqrt())).abs() < 1e-12);
}

#[test]
fn flags_supply_defaults() {
    let input = r#"{"x":[100.0,250.0],"delta":[1,1]}"#;
    let (code, out, _) = cli(
        &[
            "solve", "--min", "0", "--max", "255", "--p", "1", "--eps", "10",
        ],
        input,
    );
    assert_eq!(code, EXIT_OK);
    let rec: SolutionRecord = serde_json::from_str(out.trim()).unwrap();
    // 5 units left on the second coordinate, the first carries the rest.
    assert!((rec.eta.unwrap() - 5.0).abs() < 1e-12);
    assert_eq!(rec.saturated_count, Some(1));
}

#[test]
fn malformed_lines_are_reported_with_line_numbers() {
    let input = concat!(
        r#"{"x":[0.5],"delta":[1],"eps":0.1}"#,
        "\n",
        "\n",
        "not json\n",
        r#"{"x":[0.5],"delta":[1],"eps":0.1,"extra":1}"#,
        "\n",
        r#"{"x":[1.5],"delta":[1],"eps":0.1}"#,
        "\n",
        r#"{"x":[0.5],"delta":[0],"eps":0.1}"#,
        "\n",
    );
    let (code, out, err) = cli(&["solve"], input);
    assert_eq!(code, EXIT_USAGE);
    let recs: Vec<SolutionRecord> = parse(&out);
    let statuses: Vec<Status> = recs.iter().map(|r| r.status).collect();
    assert_eq!(
        statuses,
        [
            Status::Ok,
            Status::Invalid,
            Status::Invalid,
            Status::Invalid,
            Status::ZeroDelta
        ]
    );
    assert!(err.contains("line 3:"), "{err}");
    assert!(err.contains("line 4:"), "{err}");
    assert!(err.contains("line 5:"), "{err}");
    assert!(recs[3].error.as_deref().unwrap().contains("outside"));
}

#[test]
fn output_order_matches_input_order() {
    let mut input = String::new();
    for k in 0..200 {
        let eps = 0.001 * (k + 1) as f64;
        input.push_str(&format!(
            r#"{{"id":"{k}","x":[0.3,0.6,0.9],"delta":[1,-1,0.5],"eps":{eps}}}"#
        ));
        input.push('\n');
    }
    let (_, out, _) = cli(&["solve"], &input);
    let recs: Vec<SolutionRecord> = parse(&out);
    for (k, rec) in recs.iter().enumerate() {
        assert_eq!(rec.id.as_deref(), Some(k.to_string().as_str()));
    }
}

#[test]
fn files_and_csv_input() {
    let dir = tempdir();
    let input = dir.join("in.csv");
    let output = dir.join("out.jsonl");
    std::fs::write(
        &input,
        "id,x0,x1,d0,d1,eps\nr1,0.9,0.5,1,1,0.5\nr2,0.5,0.5,3,4,0.1\n",
    )
    .unwrap();
    let (code, out, err) = cli(
        &[
            "solve",
            "--format",
            "csv",
            "--x-cols",
            "1-2",
            "--delta-cols",
            "d0,d1",
            "--input",
            input.to_str().unwrap(),
            "--output",
            output.to_str().unwrap(),
        ],
        "",
    );
    assert_eq!(code, EXIT_OK, "{err}");
    assert!(out.is_empty());
    let recs: Vec<SolutionRecord> = parse(&std::fs::read_to_string(&output).unwrap());
    assert_eq!(recs[0].id.as_deref(), Some("r1"));
    assert!((recs[0].eta.unwrap() - 0.24f64.sqrt()).abs() < 1e-12);
    assert!((recs[1].eta.unwrap() - 0.02).abs() < 1e-15);

    let (code, _, err) = cli(&["solve", "--format", "csv"], "x0\n0.5\n");
    assert_eq!(code, EXIT_USAGE);
    assert!(err.contains("--x-cols"));
}

#[test]
fn norm_at_fixed_eta() {
    let input = r#"{"x":[0.9],"delta":[1]}"#;
    let (code, out, _) = cli(&["norm", "--eta", "0.5"], input);
    assert_eq!(code, EXIT_OK);
    let rec: NormRecord = serde_json::from_str(out.trim()).unwrap();
    assert!((rec.effective_norm.unwrap() - 0.1).abs() < 1e-15);
    assert_eq!(rec.unclipped_norm, Some(0.5));
    assert!((rec.max_norm.unwrap() - 0.1).abs() < 1e-15);
    let (code, _, _) = cli(&["norm", "--eta", "-1"], input);
    assert_eq!(code, EXIT_USAGE);
}

#[test]
fn grad_records() {
    let input = concat!(
        r#"{"x":[0.5,0.5],"delta":[3,4],"eps":0.1}"#,
        "\n",
        r#"{"x":[0.9,0.5],"delta":[1,1],"eps":0.5}"#,
        "\n",
        r#"{"x":[0.9,0.5],"delta":[1,1],"eps":0}"#,
        "\n",
    );
    let (code, out, _) = cli(&["grad"], input);
    assert_eq!(code, EXIT_FAILED_RECORDS);
    let recs: Vec<GradientRecord> = parse(&out);
    assert!((recs[0].d_eps.unwrap() - 0.2).abs() < 1e-14);
    assert_eq!(recs[0].d_x.as_deref(), Some(&[0.0, 0.0][..]));

    let eta = 0.24f64.sqrt();
    assert!((recs[1].d_eps.unwrap() - 0.5 / eta).abs() < 1e-12);
    assert!((recs[1].d_x.as_ref().unwrap()[0] - 0.1 / eta).abs() < 1e-12);
    assert!((recs[1].d_delta.as_ref().unwrap()[1] + eta).abs() < 1e-12);
    assert_eq!(recs[1].at_breakpoint, Some(false));

    assert_eq!(recs[2].status, Status::Degenerate);
}

#[test]
fn noise_is_deterministic_per_seed() {
    let input = concat!(
        r#"{"x":[0.1,0.9,0.5,0.99]}"#,
        "\n",
        r#"{"x":[0.2,0.2,0.2,0.2],"eps":0.3}"#,
        "\n"
    );
    let args = ["noise", "--eps", "0.4", "--seed", "9", "--dist", "uniform"];
    let (code, first, err) = cli(&args, input);
    assert_eq!(code, EXIT_OK, "{err}");
    let (_, second, _) = cli(&args, input);
    assert_eq!(first, second);
    let (_, other, _) = cli(&["noise", "--eps", "0.4", "--seed", "10"], input);
    assert_ne!(first, other);

    let recs: Vec<NoiseRecord> = parse(&first);
    let xs = [[0.1, 0.9, 0.5, 0.99], [0.2; 4]];
    for ((rec, x), eps) in recs.iter().zip(&xs).zip([0.4, 0.3]) {
        let v = rec.solution.vector.as_ref().unwrap();
        let norm = v
            .iter()
            .zip(x)
            .map(|(v, x)| (v - x) * (v - x))
            .sum::<f64>()
            .sqrt();
        assert!((norm - eps).abs() <= 1e-9);
        assert!(rec.naive_norm.unwrap() <= eps + 1e-12);
        assert!(rec.delta.is_none());
    }
}

#[test]
fn noise_without_seed_reports_one() {
    let (code, _, err) = cli(&["noise", "--eps", "0.1"], r#"{"x":[0.5,0.5]}"#);
    assert_eq!(code, EXIT_OK);
    let seed: u64 = err.trim().strip_prefix("seed: ").unwrap().parse().unwrap();
    let (_, a, _) = cli(
        &["noise", "--eps", "0.1", "--seed", &seed.to_string()],
        r#"{"x":[0.5,0.5]}"#,
    );
    let (_, b, _) = cli(
        &["noise", "--eps", "0.1", "--seed", &seed.to_string()],
        r#"{"x":[0.5,0.5]}"#,
    );
    assert_eq!(a, b);
}

#[test]
fn noise_rejects_delta_and_reports_unreachable() {
    let input = concat!(
        r#"{"x":[0.5],"delta":[1]}"#,
        "\n",
        r#"{"x":[1.0,1.0]}"#,
        "\n"
    );
    let (code, out, _) = cli(&["noise", "--eps", "5", "--seed", "1"], input);
    assert_eq!(code, EXIT_USAGE);
    let recs: Vec<NoiseRecord> = parse(&out);
    assert_eq!(recs[0].solution.status, Status::Invalid);
    assert_eq!(recs[1].solution.status, Status::Unreachable);
    assert!(recs[1].solution.max_norm.unwrap() <= 2f64.sqrt());
}

#[test]
fn bench_reports_both_methods() {
    let (code, out, _) = cli(
        &[
            "bench", "--n", "32", "--batch", "2", "--trials", "2", "--seed", "3",
        ],
        "",
    );
    assert_eq!(code, EXIT_OK);
    assert!(
        out.contains("analytic_ns") && out.contains("bisect_ns") && out.contains("max_rel_diff")
    );

    let (code, out, _) = cli(
        &[
            "bench", "--n", "32", "--batch", "2", "--trials", "2", "--seed", "3", "--format",
            "jsonl",
        ],
        "",
    );
    assert_eq!(code, EXIT_OK);
    let recs: Vec<serde_json::Value> = parse(&out);
    assert_eq!(recs.len(), 4);
    for rec in &recs {
        for field in ["n", "method", "nanos", "eta"] {
            assert!(rec.get(field).is_some(), "missing {field}");
        }
        assert!(rec["max_rel_diff"].as_f64().unwrap() <= 1e-6);
    }
    assert_eq!(recs[0]["iterations"], 1.0);
    assert!(recs[1]["iterations"].as_f64().unwrap() > 20.0);

    let (code, _, _) = cli(&["bench", "--n", "0"], "");
    assert_eq!(code, EXIT_USAGE);
}

#[test]
fn usage_errors() {
    assert_eq!(cli(&[], "").0, EXIT_USAGE);
    assert_eq!(cli(&["frobnicate"], "").0, EXIT_USAGE);
    assert_eq!(cli(&["noise", "--dist", "cauchy"], "").0, EXIT_USAGE);
    let (code, out, _) = cli(&["--help"], "");
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("solve") && out.contains("bench"));
}

fn tempdir() -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("clipscale-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}
