use std::io::{BufRead, BufReader, Read, Write};
use std::net::TcpStream;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../core/fixtures")
        .join(name)
}

fn macie(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_macie"))
        .args(args)
        .output()
        .expect("spawn macie")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("macie-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn train_writes_a_knowledge_base_of_the_right_shape() {
    let out = scratch("trained.json");
    let o = macie(&[
        "train",
        fixture("lemonade.json").to_str().unwrap(),
        "--iterations",
        "2000",
        "--seed",
        "3",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{o:?}");
    assert!(stdout(&o).starts_with("iterations=2000 best_run="));
    let kb = macie_core::KnowledgeBase::load(&out).unwrap();
    assert_eq!((kb.m_goals(), kb.n_inputs()), (9, 8));
    assert_eq!(kb.goal_name(0), "G1");
}

#[test]
fn zero_iterations_is_a_usage_error() {
    let o = macie(&[
        "train",
        fixture("lemonade.json").to_str().unwrap(),
        "--iterations",
        "0",
        "--out",
        scratch("never.json").to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn eval_is_deterministic_and_ends_with_summary() {
    let args = [
        "eval".to_string(),
        fixture("appendix_kb.json").to_str().unwrap().to_string(),
        fixture("lemonade.json").to_str().unwrap().to_string(),
        "--seed".into(),
        "5".into(),
    ];
    let args: Vec<&str> = args.iter().map(String::as_str).collect();
    let a = macie(&args);
    let b = macie(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    let last = text.lines().last().unwrap();
    assert!(last.starts_with("fom_mean="), "{last}");
    assert!(
        last.contains("baseline_majority=512.8 baseline_random=111.1"),
        "{last}"
    );
}

#[test]
fn eval_json_parses() {
    let o = macie(&[
        "eval",
        fixture("appendix_kb.json").to_str().unwrap(),
        fixture("lemonade.json").to_str().unwrap(),
        "--groups",
        "2",
        "--json",
    ]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["groups"], 2);
    assert_eq!(v["fom_points"].as_array().unwrap().len(), 2);
}

#[test]
fn eval_rejects_mismatched_dimensions() {
    let o = macie(&[
        "eval",
        fixture("toy_kb.json").to_str().unwrap(),
        fixture("lemonade.json").to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("kb expects 3 inputs, scenario has 8"), "{err}");
}

#[test]
fn missing_file_is_a_runtime_error() {
    let o = macie(&["show", "/nonexistent/kb.json"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn show_prints_rows_then_column_footer() {
    let o = macie(&["show", fixture("appendix_kb.json").to_str().unwrap()]);
    assert!(o.status.success());
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 10);
    assert!(lines[0].starts_with("G1") && lines[0].ends_with("9 9 5 -3 3 5 3 3 5"));
    assert!(lines[9].trim() == "bias V1 V2 V3 V4 V5 V6 V7 V8");
}

#[test]
fn consult_over_stdin() {
    let mut child = Command::new(env!("CARGO_BIN_EXE_macie"))
        .args([
            "consult",
            fixture("toy_kb.json").to_str().unwrap(),
            "--set",
            "V2=true",
        ])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(b"why G2\nt\n")
        .unwrap();
    let o = child.wait_with_output().unwrap();
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("V3? "), "{text}");
    assert!(text.contains("IF V2=True THEN not G2"), "{text}");
    assert!(text.contains("Concluded: G1"), "{text}");
}

#[test]
fn consult_rejects_unknown_preset_variable() {
    let o = macie(&[
        "consult",
        fixture("toy_kb.json").to_str().unwrap(),
        "--set",
        "V9=true",
    ]);
    assert_eq!(o.status.code(), Some(1));
}

struct Server(std::process::Child);

impl Drop for Server {
    fn drop(&mut self) {
        let _ = self.0.kill();
        let _ = self.0.wait();
    }
}

#[test]
fn serve_answers_health() {
    let mut server = Server(
        Command::new(env!("CARGO_BIN_EXE_macie"))
            .args([
                "serve",
                fixture("appendix_kb.json").to_str().unwrap(),
                "--listen",
                "127.0.0.1:0",
            ])
            .stdout(Stdio::piped())
            .spawn()
            .unwrap(),
    );
    let mut first = String::new();
    BufReader::new(server.0.stdout.take().unwrap())
        .read_line(&mut first)
        .unwrap();
    let addr = first
        .trim()
        .strip_prefix("listening on ")
        .expect(&first)
        .to_string();

    let mut stream = TcpStream::connect(&addr).unwrap();
    write!(
        stream,
        "GET /health HTTP/1.1\r\nHost: {addr}\r\nConnection: close\r\n\r\n"
    )
    .unwrap();
    let mut response = String::new();
    stream.read_to_string(&mut response).unwrap();
    assert!(response.starts_with("HTTP/1.1 200"), "{response}");
    assert!(response.contains("\"goals\":9"), "{response}");

    // A second server on the same port fails to bind.
    let clash = macie(&[
        "serve",
        fixture("appendix_kb.json").to_str().unwrap(),
        "--listen",
        &addr,
    ]);
    assert_eq!(clash.status.code(), Some(1));
}
