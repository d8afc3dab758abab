use std::path::{Path, PathBuf};

use conerefine_cli::record::{parse_trace, Record};
use conerefine_cli::{parse_sdpa, run_cli_with, WarmStartFile};

fn fixture(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name).to_str().unwrap().to_string()
}

fn run(args: &[&str]) -> (i32, Record, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("conerefine").chain(args.iter().copied());
    let code = run_cli_with(argv, &mut out, &mut err);
    (code, Record::parse_lines(&String::from_utf8(out).unwrap()), String::from_utf8(err).unwrap())
}

fn tmp(dir: &tempfile::TempDir, name: &str) -> String {
    let p: PathBuf = dir.path().join(name);
    p.to_str().unwrap().to_string()
}

#[test]
fn dimacs_of_exact_solution_is_zero() {
    let (code, rec, _) = run(&["dimacs", &fixture("exB.dat-s"), &fixture("exB-exact.sol")]);
    assert_eq!(code, 0);
    for k in 1..=6 {
        assert_eq!(rec.get_f64(&format!("err{k}")), Some(0.0), "err{k}");
    }
}

#[test]
fn status_on_ex11_reports_a_reducing_direction() {
    let (code, rec, _) = run(&["status", &fixture("ex11.dat-s"), "--side", "primal"]);
    assert_eq!(code, 2);
    assert_eq!(rec.get("verdict"), Some("not_strongly_feasible"));
    assert_eq!(rec.get("certificate"), Some("reducing_dir_p"));
    assert!((rec.get_f64("value").unwrap() - 1.0).abs() <= 1e-8);
}

#[test]
fn refine_from_sloppy_start_keeps_record_fields() {
    let (code, rec, _) = run(&["refine", &fixture("ex11.dat-s"), "--warm", &fixture("ex11-sloppy.sol")]);
    assert!(code == 0 || code == 3, "exit {code}");
    for key in [
        "problem", "exit", "err1", "err2", "err3", "err4", "err5", "err6", "dual_objective", "primal_objective", "seconds",
        "iterations", "pr_rounds", "bp_iterations",
    ] {
        assert!(rec.get(key).is_some(), "missing {key}");
    }
    let by = rec.get_f64("dual_objective").unwrap();
    assert!((1.0 - 1e-6..=1.0 + 1e-8).contains(&by), "b'y = {by}");
}

#[test]
fn gen_refine_dimacs_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let (prob, sol, warm, trace, out) =
        (tmp(&dir, "p.dat-s"), tmp(&dir, "p.sol"), tmp(&dir, "p.warm"), tmp(&dir, "p.trace"), tmp(&dir, "p.out"));
    let (code, gen, _) = run(&[
        "gen", "--mode", "known-optimal", "--blocks", "4,-2", "--m", "3", "--seed", "11", "--out", &prob, "--solution", &sol,
        "--warm", &warm,
    ]);
    assert_eq!(code, 0);
    assert_eq!(gen.get("mode"), Some("known_optimal"));
    let theta = gen.get_f64("theta").unwrap();

    let (code, planted, _) = run(&["dimacs", &prob, &sol]);
    assert_eq!(code, 0);
    assert!(planted.get_f64("err1").unwrap() <= 1e-12);

    let (code, rec, _) = run(&["refine", &prob, "--warm", &warm, "--trace", &trace, "--out", &out]);
    assert_eq!(code, 0, "{rec:?}");
    assert_eq!(rec.get("exit"), Some("complete"));
    assert!((rec.get_f64("dual_objective").unwrap() - theta).abs() <= 1e-8 * (1.0 + theta.abs()));
    let lines = parse_trace(&std::fs::read_to_string(&trace).unwrap());
    assert_eq!(lines.len(), rec.get("iterations").unwrap().parse::<usize>().unwrap());

    let (code, refined, _) = run(&["dimacs", &prob, &out]);
    assert_eq!(code, 0);
    for k in 1..=6 {
        assert_eq!(refined.get(&format!("err{k}")), rec.get(&format!("err{k}")), "err{k}");
    }
}

#[test]
fn ray_instance_exits_with_certificate() {
    let dir = tempfile::tempdir().unwrap();
    let prob = tmp(&dir, "ray.dat-s");
    assert_eq!(run(&["gen", "--mode", "ray-p", "--blocks", "3", "--m", "2", "--seed", "1", "--out", &prob]).0, 0);
    let (code, rec, _) = run(&["refine", &prob]);
    assert_eq!(code, 2);
    assert_eq!(rec.get("certificate"), Some("improving_ray_p"));
    assert!(rec.get("direction_x").is_some());
}

#[test]
fn strongly_feasible_instance_on_both_sides() {
    let dir = tempfile::tempdir().unwrap();
    let prob = tmp(&dir, "s.dat-s");
    assert_eq!(run(&["gen", "--mode", "strong-both", "--blocks", "3,-2", "--m", "2", "--seed", "5", "--out", &prob]).0, 0);
    for side in ["primal", "dual"] {
        let (code, rec, _) = run(&["status", &prob, "--side", side]);
        assert_eq!(code, 0, "{side}: {rec:?}");
        assert_eq!(rec.get("verdict"), Some("strongly_feasible"));
    }
}

#[test]
fn weak_primal_generator_plants_a_reducing_direction() {
    let dir = tempfile::tempdir().unwrap();
    let prob = tmp(&dir, "w.dat-s");
    let (code, gen, _) = run(&["gen", "--mode", "weak-primal", "--blocks", "4", "--m", "3", "--seed", "2", "--out", &prob]);
    assert_eq!(code, 0);
    let f: Vec<f64> = gen.get("reducing_y").unwrap().split(',').map(|v| v.parse().unwrap()).collect();
    let p = parse_sdpa(&std::fs::read_to_string(&prob).unwrap()).unwrap();
    let f = nalgebra::DVector::from_vec(f);
    assert_eq!(p.dual_objective(&f), 0.0);
    assert!((-&p.a.adjoint(&f)).lambda_min().unwrap() >= -1e-12);
}

#[test]
fn usage_and_input_errors() {
    assert_eq!(run(&["refine"]).0, 1);
    assert_eq!(run(&["frobnicate"]).0, 1);
    let (code, _, err) = run(&["refine", "/nonexistent/problem.dat-s"]);
    assert_eq!(code, 1);
    assert!(err.contains("/nonexistent/problem.dat-s"));

    let dir = tempfile::tempdir().unwrap();
    let bad = tmp(&dir, "bad.dat-s");
    std::fs::write(&bad, "1\n1\n2\n1.0\n1 1 1 x 1.0\n").unwrap();
    let (code, _, err) = run(&["dimacs", &bad, &fixture("exB-exact.sol")]);
    assert_eq!(code, 1);
    assert!(err.contains("line 5"), "{err}");

    let (code, _, err) = run(&["dimacs", &fixture("ex11.dat-s"), &fixture("exB-exact.sol")]);
    assert_eq!(code, 1, "{err}");
    assert_eq!(run(&["--help"]).0, 0);
}

#[test]
fn warm_start_file_round_trips_through_refine_output() {
    let dir = tempfile::tempdir().unwrap();
    let out = tmp(&dir, "exb.out");
    let (code, _, _) = run(&["refine", &fixture("exB.dat-s"), "--out", &out]);
    assert!(code == 0 || code == 3);
    let text = std::fs::read_to_string(&out).unwrap();
    let parsed = WarmStartFile::parse(&text).unwrap();
    assert_eq!(parsed.write(), text);
}
