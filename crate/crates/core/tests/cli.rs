mod common;

use std::path::Path;
use std::process::Command;

use expsum::cli::run;
use serde_json::Value;

struct Out {
    code: i32,
    stdout: String,
    stderr: String,
}

fn cli(args: &[&str]) -> Out {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("expsum").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    Out {
        code,
        stdout: String::from_utf8(out).unwrap(),
        stderr: String::from_utf8(err).unwrap(),
    }
}

fn json(o: &Out) -> Value {
    serde_json::from_str(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", o.stdout))
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn extremal_round_trips_through_bound() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("w.txt");
    let o = cli(&["extremal", "--theta", "3/7", "--emit-phases", p(&file)]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    let w = json(&o);
    assert_eq!(w["attained"], true);
    assert_eq!(w["n"], 7);
    let target = common::cot_half(3.0 / 7.0);
    assert!((w["abs_sum"].as_f64().unwrap() - target).abs() < 1e-10);

    let o = cli(&["bound", "--theta", "3/7", "--phases", p(&file)]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    let b = json(&o);
    assert_eq!(b["n"], 7);
    assert_eq!(b["flags"]["landau"], true);
    assert!((b["abs_sum"].as_f64().unwrap() - w["abs_sum"].as_f64().unwrap()).abs() < 1e-15);
    assert!((b["bound_refined"].as_f64().unwrap() - target).abs() < 1e-10);
}

#[test]
fn half_witness() {
    let o = cli(&["extremal", "--theta", "1/2"]);
    assert_eq!(o.code, 0);
    let w = json(&o);
    assert!((w["abs_sum"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert_eq!(w["phases"], serde_json::json!([0.0, 0.5, 1.0]));
}

#[test]
fn bound_ladder_without_phases() {
    let o = cli(&["bound", "--theta", "0.25"]);
    assert_eq!(o.code, 0);
    let v = json(&o);
    for key in [
        "bound_landau",
        "bound_kuzmin",
        "bound_simple",
        "bound_2_over_pi_theta",
        "bound_false",
    ] {
        assert!(v[key].is_number(), "{key}");
    }
}

#[test]
fn check_exit_codes() {
    let o = cli(&["check", "--theta", "0.2", "--inline", "0,0.2,0.5"]);
    assert_eq!(o.code, 0);
    assert_eq!(json(&o)["admissible"], true);

    let o = cli(&["check", "--theta", "0.3", "--inline", "0,0.2,0.5"]);
    assert_eq!(o.code, 2);
    let v = json(&o);
    assert_eq!(v["admissible"], false);
    assert_eq!(v["theta_star"], 0.2);

    let o = cli(&["check", "--theta", "0.1", "--inline", "0,0.4,0.6"]);
    assert_eq!(o.code, 2);
    assert_eq!(json(&o)["first_violation"], 1);
}

#[test]
fn bound_on_inadmissible_input_exits_two() {
    let o = cli(&["bound", "--theta", "0.3", "--inline", "0,0.2,0.5"]);
    assert_eq!(o.code, 2);
    assert!(o.stderr.contains("not admissible"));
    assert_eq!(json(&o)["admissible"], false);
}

#[test]
fn refute_point_two() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("r.json");
    let o = cli(&["refute", "--theta", "0.2", "--emit-phases", p(&file)]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    let v = json(&o);
    let false_bound = 1.0 / (std::f64::consts::PI * 0.2) + 1.0;
    let phases: Vec<f64> = std::fs::read_to_string(&file)
        .unwrap()
        .lines()
        .map(|l| l.parse().unwrap())
        .collect();
    let recomputed = common::naive_abs_sum(&phases) - false_bound;
    let margin = v["margin"].as_f64().unwrap();
    assert!((margin - recomputed).abs() < 1e-9);
    assert!((margin - (common::cot_half(0.2) - false_bound)).abs() < 1e-9);
}

#[test]
fn refute_without_counterexample_exits_three() {
    let o = cli(&["refute", "--theta", "1/3"]);
    assert_eq!(o.code, 3);
    let v = json(&o);
    assert!(v["bound_landau"].as_f64().unwrap() < v["bound_false"].as_f64().unwrap());

    let o = cli(&["refute", "--theta", "1/3", "--search-below"]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    assert!(json(&o)["margin"].as_f64().unwrap() > 0.0);
}

#[test]
fn near_extremal_output() {
    let o = cli(&["near-extremal", "--theta", "0.3", "--epsilon", "0.01"]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    let v = json(&o);
    assert!(v["abs_sum"].as_f64().unwrap() > common::cot_half(0.3) - 0.01);
    assert_eq!(v["epsilon"], 0.01);
}

#[test]
fn decompose_json_and_csv() {
    let o = cli(&[
        "decompose",
        "--method",
        "landau",
        "--inline",
        "0,0.2,0.45,0.75",
    ]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    let v = json(&o);
    assert!(v.is_object());

    let o = cli(&[
        "decompose",
        "--method",
        "landau",
        "--format",
        "csv",
        "--inline",
        "0,0.2,0.45,0.75",
    ]);
    let lines: Vec<&str> = o.stdout.lines().collect();
    assert_eq!(lines[0], "k,b,cot_b,middle_re,middle_im");
    assert_eq!(lines.len(), 1 + 3);

    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("k.csv");
    let o = cli(&[
        "decompose",
        "--method",
        "kuzmin",
        "--theta",
        "0.2",
        "--inline",
        "0,0.2,0.45,0.75",
        "--csv",
        p(&csv),
    ]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    let table = std::fs::read_to_string(&csv).unwrap();
    assert!(table.starts_with("m,a_re,a_im,mid_re,mid_im,center_re,center_im,turn_angle,radius"));
    assert_eq!(table.lines().count(), 1 + 5);
}

#[test]
fn plot_writes_svg() {
    let dir = tempfile::tempdir().unwrap();
    let svg = dir.path().join("chain.svg");
    let o = cli(&[
        "plot",
        "--inline",
        "0,0.2,0.45,0.75,1.1",
        "--out",
        p(&svg),
        "--circles",
    ]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    let text = std::fs::read_to_string(&svg).unwrap();
    assert!(text.starts_with("<svg") || text.starts_with("<?xml"));
    assert!(text.contains("id=\"chain\""));
    assert!(text.contains("<circle"));
    assert!(text.trim_end().ends_with("</svg>"));

    // same input, same bytes
    let again = dir.path().join("again.svg");
    cli(&[
        "plot",
        "--inline",
        "0,0.2,0.45,0.75,1.1",
        "--out",
        p(&again),
        "--circles",
    ]);
    assert_eq!(text, std::fs::read_to_string(&again).unwrap());
}

#[test]
fn best_constant_csv() {
    let o = cli(&["best-constant", "--jmax", "5"]);
    assert_eq!(o.code, 0);
    let lines: Vec<&str> = o.stdout.lines().collect();
    assert_eq!(lines[0], "j,theta,abs_sum,theta_times_abs_sum");
    assert_eq!(lines.len(), 6);
    let last: Vec<f64> = lines[5].split(',').map(|x| x.parse().unwrap()).collect();
    assert_eq!(last[0], 5.0);
    assert!((last[1] - 1.0 / 11.0).abs() < 1e-15);
}

#[test]
fn search_output_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s.json");
    let o = cli(&[
        "search",
        "--theta",
        "0.2",
        "--n",
        "5",
        "--restarts",
        "2",
        "--seed",
        "4",
        "--output",
        p(&out),
    ]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    assert!(o.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["n"], 5);
    assert!(v["best_abs_sum"].as_f64().unwrap() <= common::cot_half(0.2) + 1e-9);
}

#[test]
fn usage_errors_exit_one() {
    for args in [
        &["bound"][..],
        &["frobnicate"],
        &["bound", "--theta", "0.7"],
        &["bound", "--theta", "abc"],
        &["extremal", "--theta", "2/5"],
        &["check", "--theta", "0.2"],
        &["check", "--theta", "0.2", "--inline", "0,0.5,0.4"],
        &[
            "check",
            "--theta",
            "0.2",
            "--phases",
            "/nonexistent/phases.txt",
        ],
    ] {
        let o = cli(args);
        assert_eq!(o.code, 1, "{args:?}");
        assert!(o.stderr.starts_with("error:"), "{args:?}: {}", o.stderr);
        assert_eq!(o.stderr.trim_end().lines().count(), 1, "{args:?}");
    }
}

#[test]
fn binary_reads_seed_from_environment() {
    let exe = env!("CARGO_BIN_EXE_expsum");
    let run_with = |seed: Option<&str>| {
        let mut c = Command::new(exe);
        c.args([
            "search",
            "--theta",
            "0.2",
            "--n",
            "9",
            "--restarts",
            "2",
            "--no-extremal-seed",
        ]);
        c.env_remove("EXPSUM_SEED");
        if let Some(s) = seed {
            c.env("EXPSUM_SEED", s);
        }
        let out = c.output().unwrap();
        assert!(out.status.success());
        String::from_utf8(out.stdout).unwrap()
    };
    let default = run_with(None);
    assert_eq!(default, run_with(Some("0")));
    assert_ne!(default, run_with(Some("17")));

    let status = Command::new(exe)
        .args(["check", "--theta", "0.3", "--inline", "0,0.2,0.5"])
        .output()
        .unwrap()
        .status;
    assert_eq!(status.code(), Some(2));
    let status = Command::new(exe).arg("--bogus").output().unwrap().status;
    assert_eq!(status.code(), Some(1));
}
