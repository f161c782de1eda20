use std::io::Write;
use std::process::{Command, Output, Stdio};

use drsp_core::io::parse_any;
use drsp_core::validate_special_orthogonal;

fn drsp(args: &[&str], stdin: Option<&str>) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_drsp"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    if let Some(text) = stdin {
        child.stdin.take().unwrap().write_all(text.as_bytes()).unwrap();
    }
    drop(child.stdin.take());
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn feasibility_three_writes_verified_witness() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("w.json");
    let out = drsp(&["feasibility", "--n", "3", "--witness", path.to_str().unwrap()], None);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).starts_with("verdict=feasible n=3"));
    let w = parse_any(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert!(validate_special_orthogonal(&w).unwrap());
    let v = drsp(&["verify", path.to_str().unwrap()], None);
    assert_eq!(v.status.code(), Some(0));
    assert!(stdout(&v).contains("verified=true mode=special"));
}

#[test]
fn feasibility_four_is_infeasible_with_ranks() {
    let out = drsp(&["feasibility", "--n", "4"], None);
    assert_eq!(out.status.code(), Some(1));
    let line = stdout(&out);
    assert!(line.starts_with("verdict=infeasible n=4 basis=solved"));
    let field = |k: &str| -> usize {
        line.split_whitespace()
            .find_map(|kv| kv.strip_prefix(k))
            .unwrap()
            .parse()
            .unwrap()
    };
    assert!(field("rank_full=") > field("rank_coeff="));
}

#[test]
fn feasibility_beyond_four_uses_nesting() {
    let out = drsp(&["feasibility", "--n", "6"], None);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stdout(&out).trim(), "verdict=infeasible n=6 basis=nested anchor=4");
}

#[test]
fn ordered_piped_to_solve_matches_feasibility() {
    for k in 1..=4 {
        let n = k.to_string();
        let ordered = drsp(&["ordered", "--n", &n], None);
        assert_eq!(ordered.status.code(), Some(0));
        let solved = drsp(&["solve", "-"], Some(&stdout(&ordered)));
        let feas = drsp(&["feasibility", "--n", &n], None);
        assert_eq!(solved.status.code(), feas.status.code(), "n = {k}");
        let verdict = |o: &Output| stdout(o).split_whitespace().next().unwrap().to_string();
        assert_eq!(verdict(&solved), verdict(&feas));
    }
}

#[test]
fn repeated_index_is_malformed() {
    let out = drsp(
        &["verify", "-"],
        Some("{\"n\":1,\"mode\":\"semi\",\"cells\":[[1,2],[1,1]]}"),
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).starts_with("error reason=MalformedMatrix"));
}

#[test]
fn verify_reports_non_orthogonal_signs() {
    let out = drsp(&["verify", "-"], Some("# mode: special\na0 a1\na1 a0\n"));
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).starts_with("verified=false"));
}

#[test]
fn oracle_exit_codes() {
    let ordered = stdout(&drsp(&["ordered", "--n", "2"], None));
    let out = drsp(&["oracle", "-"], Some(&ordered));
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).trim(), "count=16 variables=6");

    let big = stdout(&drsp(&["ordered", "--n", "4"], None));
    let out = drsp(&["oracle", "-"], Some(&big));
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).starts_with("error reason=TooLarge"));

    let out = drsp(&["oracle", "--gf2", "-"], Some("1|0\n1|1\n"));
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).starts_with("consistent=false"));
}

#[test]
fn solve_dumps_sidecars() {
    let dir = tempfile::tempdir().unwrap();
    let sys = dir.path().join("sys.txt");
    let vars = dir.path().join("vars.txt");
    let ordered = stdout(&drsp(&["ordered", "--n", "2"], None));
    let out = drsp(
        &[
            "solve",
            "-",
            "--dump-system",
            sys.to_str().unwrap(),
            "--dump-variables",
            vars.to_str().unwrap(),
        ],
        Some(&ordered),
    );
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(std::fs::read_to_string(&sys).unwrap().lines().count(), 3);
    assert_eq!(std::fs::read_to_string(&vars).unwrap().lines().count(), 6);
}

#[test]
fn simplify_scrambled_matrix() {
    let scrambled = "a3 a2 a1 a0\na0 a1 a2 a3\na2 a3 a0 a1\na1 a0 a3 a2\n";
    let out = drsp(&["simplify", "-", "--format", "text"], Some(scrambled));
    assert_eq!(out.status.code(), Some(0));
    assert!(stderr(&out).contains("ordered=true"));
    let m = parse_any(&stdout(&out)).unwrap();
    assert_eq!(m.order(), 4);
}

#[test]
fn simulate_is_deterministic() {
    let out = drsp(&["simulate", "--n", "2", "--seed", "4"], None);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert_eq!(text.lines().filter(|l| l.starts_with("outcome=")).count(), 4);
    assert!(text.contains("deterministic=true"));
    assert_eq!(text, stdout(&drsp(&["simulate", "--n", "2", "--seed", "4"], None)));

    let out = drsp(&["simulate", "--n", "1", "--psi", "0.6,-0.8"], None);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn non_unit_psi_is_invalid_input() {
    let out = drsp(&["simulate", "--n", "1", "--psi", "1,1"], None);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).starts_with("error reason=NonUnitParameters"));
}
