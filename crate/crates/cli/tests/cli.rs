use std::io::Write;
use std::path::Path;
use std::process::{Command, Output, Stdio};

fn relim(args: &[&str], stdin: Option<&str>) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_relim"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    let mut pipe = child.stdin.take().unwrap();
    pipe.write_all(stdin.unwrap_or("").as_bytes()).unwrap();
    drop(pipe);
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn family_prints_the_matching_encoding() {
    let o = relim(&["family", "--delta", "3", "--x", "0", "--y", "0"], None);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "# Pi_3(0,0)\nwhite: M O^2 | P^3\nblack: M [OP]^2 | O^3\n");

    let o = relim(&["family", "--delta", "4", "--x", "1", "--y", "1"], None);
    assert!(stdout(&o).contains("white: M O^2 X | O P^2 X"), "{}", stdout(&o));
}

#[test]
fn family_rejects_out_of_range_parameters() {
    let o = relim(&["family", "--delta", "3", "--x", "3", "--y", "1"], None);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn output_round_trips_through_parse() {
    let family = stdout(&relim(&["family", "--delta", "3"], None));
    let sped = stdout(&relim(&["speedup", "-"], Some(&family)));
    let o = relim(&["--format", "json", "parse", "-"], Some(&sped));
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["problem"]["alphabet"].as_array().map(Vec::len), Some(4));
}

#[test]
fn merge_and_zero_round() {
    let family = stdout(&relim(&["family", "--delta", "3"], None));
    let o = relim(&["merge", "-", "--map", "M=M", "--map", "O=P", "--map", "P=P"], Some(&family));
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let merged = stdout(&o);
    let o = relim(&["--format", "json", "zero-round", "-"], Some(&merged));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["solvable"], true);

    // a partial map is an input error
    let o = relim(&["merge", "-", "--map", "M=M"], Some(&family));
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn malformed_input_exits_2() {
    let o = relim(&["speedup", "-"], Some("white: M O\nblack: M [O\n"));
    assert_eq!(o.status.code(), Some(2));
    let o = relim(&["--format", "json", "speedup", "-"], Some("this is not a problem"));
    assert_eq!(o.status.code(), Some(2));
    let err: serde_json::Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(err["error"]["code"], "usage");
    assert_eq!(relim(&["speedup", "/no/such/file"], None).status.code(), Some(2));
    assert_eq!(relim(&["no-such-command"], None).status.code(), Some(2));
    assert_eq!(relim(&["bounds", "--delta", "3", "--p", "7"], None).status.code(), Some(2));
}

#[test]
fn certify_then_verify() {
    let dir = tempfile::tempdir().unwrap();
    let cert = dir.path().join("c.json");
    let o = relim(&["certify", "--delta", "3", "--max-t", "2", "-o", path(&cert)], None);
    assert_eq!(o.status.code(), Some(0));
    let o = relim(&["verify-cert", path(&cert)], None);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("ok: "));

    // stdout form verifies too
    let o = relim(&["certify", "--delta", "4", "--max-t", "1"], None);
    let o = relim(&["verify-cert", "-"], Some(&stdout(&o)));
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn flipped_byte_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let cert = dir.path().join("c.json");
    relim(&["certify", "--delta", "3", "--max-t", "1", "-o", path(&cert)], None);
    let mut bytes = std::fs::read(&cert).unwrap();
    let at = String::from_utf8_lossy(&bytes).find("\"mapping\"").unwrap() + 20;
    bytes[at] ^= 0x01;
    std::fs::write(&cert, &bytes).unwrap();
    let o = relim(&["verify-cert", path(&cert)], None);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).starts_with("rejected: "));
}

#[test]
fn simulations() {
    let dir = tempfile::tempdir().unwrap();
    let labels = dir.path().join("labels.json");
    let graph = dir.path().join("graph.json");
    let problem = dir.path().join("pi.txt");
    let o = relim(&["sim", "run-proposal", "--delta", "3", "--n", "40", "--seed", "5", "--labels-out", path(&labels)], None);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    std::fs::write(&graph, relim(&["sim", "gen", "--delta", "3", "--n", "40", "--seed", "5"], None).stdout).unwrap();
    std::fs::write(&problem, relim(&["family", "--delta", "3"], None).stdout).unwrap();
    let check = |p: &Path| relim(&["sim", "check", "--problem", path(p), "--graph", path(&graph), "--labels", path(&labels)], None);
    assert_eq!(check(&problem).status.code(), Some(0));

    // the same labels fail a stricter problem
    std::fs::write(&problem, "white: M O^2\nblack: M O^2 | O^3\n").unwrap();
    assert_eq!(check(&problem).status.code(), Some(1));

    let o = relim(&["--format", "json", "sim", "split-match", "--delta", "9", "--n", "30", "--seed", "1"], None);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!((v["k"].as_u64(), v["passed"].as_bool()), (Some(3), Some(true)));
}

#[test]
fn seeds_are_reproducible() {
    let a = stdout(&relim(&["sim", "gen", "--delta", "3", "--n", "200", "--seed", "1"], None));
    let b = stdout(&relim(&["sim", "gen", "--delta", "3", "--n", "200", "--seed", "1"], None));
    assert_eq!(a, b);
    assert_ne!(a, stdout(&relim(&["sim", "gen", "--delta", "3", "--n", "200", "--seed", "2"], None)));
}

#[test]
fn bounds_table() {
    let o = relim(&["--format", "json", "bounds", "--delta", "8", "--t", "1", "--p", "2^-40", "--n", "1000"], None);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["p"]["log2"], -40.0);
    assert_eq!(v["base"]["log2"], -24.0);
    assert_eq!(v["multi_round"]["chain_holds"], true);
}
