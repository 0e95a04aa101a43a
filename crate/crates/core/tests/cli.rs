use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

const BIN: &str = env!("CARGO_BIN_EXE_topoloom");

fn fixture(name: &str) -> String {
    format!("{}/tests/fixtures/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("binary runs")
}

fn run_stdin(args: &[&str], input: &str) -> Output {
    let mut child = Command::new(BIN)
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn scratch(name: &str, contents: &[u8]) -> PathBuf {
    let p = std::env::temp_dir().join(format!("topoloom-{}-{name}", std::process::id()));
    std::fs::write(&p, contents).unwrap();
    p
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn synth_then_verify() {
    for algo in ["bounded", "unbounded"] {
        let out = run(&["synth", "--algo", algo, &fixture("sample.cnot")]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
        let field = scratch(&format!("synth-{algo}.fld"), &out.stdout);
        let v = run(&["verify", &fixture("sample.cnot"), field.to_str().unwrap()]);
        assert_eq!(v.status.code(), Some(0), "{}", String::from_utf8_lossy(&v.stderr));
    }
}

#[test]
fn synth_reads_stdin() {
    let netlist = std::fs::read_to_string(fixture("sample.cnot")).unwrap();
    let piped = run_stdin(&["synth", "--algo", "bounded", "-"], &netlist);
    let direct = run(&["synth", "--algo", "bounded", &fixture("sample.cnot")]);
    assert_eq!(piped.status.code(), Some(0));
    assert_eq!(piped.stdout, direct.stdout);
    assert!(stdout(&piped).starts_with("field 6 "));
}

#[test]
fn verify_fixture_fields() {
    for f in ["compact.fld", "padded.fld"] {
        let v = run(&["verify", &fixture("sample.cnot"), &fixture(f)]);
        assert_eq!(v.status.code(), Some(0), "{f}");
    }
}

#[test]
fn wrong_circuit_fails_verification() {
    let other = scratch("other.cnot", b"qubits 4\ncnot 0: 1\n");
    let v = run(&["verify", other.to_str().unwrap(), &fixture("compact.fld")]);
    assert_eq!(v.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&v.stderr).contains("not equivalent"));
}

#[test]
fn invalid_field_fails_verification() {
    let broken = scratch("broken.fld", b"field 1 2\ncell 0 0 WIRE_H h=0 v=-\n");
    let c = scratch("one.cnot", b"qubits 1\n");
    let v = run(&["verify", c.to_str().unwrap(), broken.to_str().unwrap()]);
    assert_eq!(v.status.code(), Some(1));
}

#[test]
fn usage_errors_exit_2() {
    let bad = scratch("bad.cnot", b"qubits 2\ncnot 0: 0\n");
    assert_eq!(run(&["synth", "--algo", "bounded", bad.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(run(&["synth", "--algo", "sideways", &fixture("sample.cnot")]).status.code(), Some(2));
    assert_eq!(run(&["synth", "--algo", "bounded", "/nonexistent/x.cnot"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["bench", "--trials", "2"]).status.code(), Some(2));
    assert_eq!(run(&["bench", "--qubits", "3", "--gates", "2", "--max-targets", "3"]).status.code(), Some(2));
    assert_eq!(run(&["render", "--format", "geometry", "--pitch", "1", &fixture("compact.fld")]).status.code(), Some(1));
}

#[test]
fn bench_is_reproducible() {
    let args = ["bench", "--qubits", "5,8", "--gates", "10,30", "--max-targets", "2,4", "--trials", "12", "--seed", "4"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(stdout(&a).lines().count(), 1 + 8);

    let mut json_args = args.to_vec();
    json_args.extend(["--format", "json"]);
    let j = run(&json_args);
    let lines: Vec<serde_json::Value> = stdout(&j).lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 8);
    assert!(lines.iter().all(|v| v["bounded_row_violations"] == 0));
    assert_eq!(j.stdout, run(&json_args).stdout);
}

#[test]
fn gen_is_seeded() {
    let a = run(&["gen", "--qubits", "6", "--gates", "15", "--max-targets", "3", "--seed", "9"]);
    let b = run(&["gen", "--qubits", "6", "--gates", "15", "--max-targets", "3", "--seed", "9"]);
    let c = run(&["gen", "--qubits", "6", "--gates", "15", "--max-targets", "3", "--seed", "9", "--trial", "1"]);
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);
    assert_eq!(stdout(&a).lines().filter(|l| l.starts_with("cnot ")).count(), 15);
}

#[test]
fn render_formats() {
    let ascii = run(&["render", &fixture("compact.fld")]);
    assert_eq!(stdout(&ascii), "@7|\n@+@\nL@+\n");
    let svg = run(&["render", "--format", "svg", &fixture("compact.fld")]);
    assert!(stdout(&svg).starts_with("<svg"));
    let geo = run(&["render", "--format", "geometry", "--pitch", "2", &fixture("compact.fld")]);
    assert_eq!(geo.status.code(), Some(0));
    assert_eq!(stdout(&geo).lines().filter(|l| l.starts_with("junction ")).count(), 4);
}

#[test]
fn junction_check_prints_corrections() {
    let out = run(&["verify-junctions", "--samples", "20"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("junction CNOT: 24/24 states pass"));
    assert!(text.contains("Z on control, I on target"));
}
