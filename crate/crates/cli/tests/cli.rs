use std::fs;
use std::io::{BufRead, BufReader, Read, Write};
use std::net::{TcpListener, TcpStream};
use std::path::{Path, PathBuf};
use std::process::{Child, Command, Output, Stdio};

use serde_json::Value;
use tempfile::TempDir;

const REAL: [&str; 8] = ["0100", "0101", "0110", "1000", "1001", "1100", "1101", "1110"];
const FAKE: [&str; 7] = ["0001", "0010", "0011", "0111", "1010", "1011", "1111"];

fn discourse(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_discourse")).args(args).output().unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn read_json(p: PathBuf) -> Value {
    serde_json::from_slice(&fs::read(p).unwrap()).unwrap()
}

/// 10 usable rows, 2 too short, 1 exact duplicate.
fn raw_fixture(dir: &Path) -> PathBuf {
    let mut csv = String::from("headline,label\n");
    for i in 0..10 {
        csv.push_str(&format!("Headline number {i} with enough words,{}\n", u8::from(i >= 6)));
    }
    csv.push_str("Too short,0\nAlso short,1\n");
    csv.push_str("Headline number 3 with enough words,0\n");
    let p = dir.join("raw.csv");
    fs::write(&p, csv).unwrap();
    p
}

fn prepared(dir: &TempDir) -> PathBuf {
    let out = dir.path().join("out");
    let raw = raw_fixture(dir.path());
    let o = discourse(&["prepare", "--input", path(&raw), "--out", path(&out)]);
    assert!(o.status.success(), "{}", stderr(&o));
    out
}

#[test]
fn prepare_counts_on_fixture() {
    let dir = TempDir::new().unwrap();
    let out = prepared(&dir);
    let s = read_json(out.join("summary.json"));
    assert_eq!(s["input_rows"], 13);
    assert_eq!(s["removed_short"], 2);
    assert_eq!(s["removed_dup"], 1);
    assert_eq!(s["total"], 10);
    assert_eq!(s["label_counts"]["0"], 6);
    assert_eq!(s["label_counts"]["1"], 4);
    assert_eq!(s["test_size"], 4);
    assert_eq!(s["eval_size"], 6);
    let split = read_json(out.join("split.json"));
    assert_eq!(split["test_ids"].as_array().unwrap().len(), 4);
    assert_eq!(fs::read_to_string(out.join("dataset.csv")).unwrap().lines().count(), 11);
}

#[test]
fn prepare_is_deterministic_per_seed() {
    let dir = TempDir::new().unwrap();
    let raw = raw_fixture(dir.path());
    let run = |name: &str| {
        let out = dir.path().join(name);
        assert!(discourse(&["prepare", "--input", path(&raw), "--out", path(&out), "--seed", "9"]).status.success());
        fs::read(out.join("split.json")).unwrap()
    };
    assert_eq!(run("a"), run("b"));
}

#[test]
fn prepare_missing_label_column() {
    let dir = TempDir::new().unwrap();
    let raw = dir.path().join("raw.csv");
    fs::write(&raw, "headline,verdict\nSome headline with words,0\n").unwrap();
    let o = discourse(&["prepare", "--input", path(&raw), "--out", path(&dir.path().join("out"))]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("label"), "{}", stderr(&o));
}

#[test]
fn outputs_are_not_overwritten_without_force() {
    let dir = TempDir::new().unwrap();
    let out = prepared(&dir);
    let raw = dir.path().join("raw.csv");
    let again = discourse(&["prepare", "--input", path(&raw), "--out", path(&out)]);
    assert_eq!(again.status.code(), Some(1));
    assert!(stderr(&again).contains("--force"), "{}", stderr(&again));
    let forced = discourse(&["prepare", "--input", path(&raw), "--out", path(&out), "--force"]);
    assert!(forced.status.success(), "{}", stderr(&forced));
}

#[test]
fn synthetic_traits_are_reproducible() {
    let dir = TempDir::new().unwrap();
    let out = prepared(&dir);
    let mut runs = Vec::new();
    for _ in 0..2 {
        let o = discourse(&["traits", "--out", path(&out), "--trait-source", "synthetic:7", "--split", "all", "--force"]);
        assert!(o.status.success(), "{}", stderr(&o));
        runs.push((fs::read(out.join("curves.csv")).unwrap(), fs::read(out.join("rule_metrics.json")).unwrap()));
    }
    assert_eq!(runs[0], runs[1]);
    let curves = String::from_utf8(runs[0].0.clone()).unwrap();
    // Header plus 101 grid points for each of four traits.
    assert_eq!(curves.lines().count(), 1 + 4 * 101);
    let m: Value = serde_json::from_slice(&runs[0].1).unwrap();
    assert_eq!(m["rules"].as_array().unwrap().len(), 7);
    assert_eq!(m["records"], 10);
}

#[test]
fn separable_traits_give_perfect_any_low() {
    // Real rows have one low screened trait, Fake rows two.
    let dir = TempDir::new().unwrap();
    let mut csv = String::from("headline,label,EI,SN,TF,JP\n");
    for i in 0..30 {
        let (label, v) = if i % 2 == 0 {
            (0, [0.1, 0.8, 0.8, 0.5])
        } else {
            (1, [0.1, 0.1, 0.8, 0.5])
        };
        csv.push_str(&format!("Separable headline {i} here,{label},{},{},{},{}\n", v[0], v[1], v[2], v[3]));
    }
    let input = dir.path().join("traits.csv");
    fs::write(&input, csv).unwrap();
    let out = dir.path().join("out");
    let o = discourse(&["traits", "--input", path(&input), "--out", path(&out), "--split", "all", "--rules", "any_low,low_ei"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let m = read_json(out.join("rule_metrics.json"));
    let rules = m["rules"].as_array().unwrap();
    assert_eq!(rules.len(), 2);
    assert_eq!(rules[0]["rule"], "any_low");
    assert_eq!(rules[0]["population"], 30);
    assert_eq!(rules[0]["accuracy_pct"], 100.0);
}

#[test]
fn traits_without_trait_columns_fail() {
    let dir = TempDir::new().unwrap();
    let out = prepared(&dir);
    let o = discourse(&["traits", "--out", path(&out)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(!out.join("rule_metrics.json").exists());
}

fn write_annotations(dir: &Path, rows: &[(u64, &str, u8)]) -> PathBuf {
    let p = dir.join("annotations.jsonl");
    let text: String = rows
        .iter()
        .map(|(id, code, label)| format!("{{\"headline_id\":{id},\"code\":\"{code}\",\"label\":{label}}}\n"))
        .collect();
    fs::write(&p, text).unwrap();
    p
}

fn table_rows() -> Vec<(u64, &'static str, u8)> {
    let real = REAL.iter().map(|c| (*c, 0));
    let fake = FAKE.iter().map(|c| (*c, 1));
    real.chain(fake).enumerate().map(|(i, (c, l))| (i as u64, c, l)).collect()
}

#[test]
fn lacan_on_table_annotations() {
    let dir = TempDir::new().unwrap();
    let ann = write_annotations(dir.path(), &table_rows());

    let free = dir.path().join("free");
    let o = discourse(&["lacan", "--annotations", path(&ann), "--out", path(&free)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v = read_json(free.join("verification.json"));
    assert_eq!(v["derived"]["complementarity"]["abstain_codes"], serde_json::json!([]));
    assert_eq!(v["derived"]["literal_cost"], serde_json::json!([6, 6]));
    assert_eq!(v["derived_mismatches"], serde_json::json!([]));
    assert_eq!(v["reference_mismatches"], serde_json::json!([]));
    assert_eq!(v["reference"]["complementarity"]["abstain_codes"], serde_json::json!(["0000"]));
    let table = fs::read_to_string(free.join("classification.csv")).unwrap();
    assert_eq!(table.lines().count(), 17);
    assert!(table.lines().nth(1).unwrap().starts_with("0000,0,0,0,0,0,,"));

    let off = dir.path().join("off");
    let o = discourse(&["lacan", "--annotations", path(&ann), "--out", path(&off), "--dont-care", "off"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v = read_json(off.join("verification.json"));
    assert_eq!(v["derived"]["complementarity"]["abstain_codes"], serde_json::json!(["0000"]));
    assert_eq!(v["derived"]["literal_cost"], serde_json::json!([6, 7]));
    let p = read_json(off.join("partition.json"));
    assert_eq!(p["dont_care"], serde_json::json!(["0000"]));
}

#[test]
fn lacan_rejects_ambiguous_annotations() {
    let dir = TempDir::new().unwrap();
    let mut rows = table_rows();
    rows.push((99, "0100", 1));
    let ann = write_annotations(dir.path(), &rows);
    let out = dir.path().join("out");
    let o = discourse(&["lacan", "--annotations", path(&ann), "--out", path(&out)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("0100"), "{}", stderr(&o));
    assert!(!out.join("classifier.json").exists());
}

#[test]
fn lacan_holdout_agreement() {
    let dir = TempDir::new().unwrap();
    let rows: Vec<(u64, &str, u8)> = (0..600u64)
        .map(|i| match i % 15 {
            k if k < 8 => (i, REAL[k as usize], 0),
            k => (i, FAKE[k as usize - 8], 1),
        })
        .collect();
    let ann = write_annotations(dir.path(), &rows);
    let out = dir.path().join("out");
    let o = discourse(&["lacan", "--annotations", path(&ann), "--out", path(&out), "--train-count", "300"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let h = read_json(out.join("holdout.json"));
    assert_eq!(h["train"], 300);
    assert_eq!(h["derived"]["held_out"], 300);
    assert_eq!(h["derived"]["correct"], 300);
    assert_eq!(h["reference"]["correct"], 300);
    let c = read_json(out.join("classifier.json"));
    assert_eq!(c["expr0_text"], "M.!U + A.!U + A.!H");
}

#[test]
fn serve_requires_prepared_dataset() {
    let dir = TempDir::new().unwrap();
    let o = discourse(&["serve", "--out", path(&dir.path().join("empty")), "--addr", "127.0.0.1:0"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("not prepared"), "{}", stderr(&o));
}

#[test]
fn serve_reports_port_in_use() {
    let dir = TempDir::new().unwrap();
    let out = prepared(&dir);
    let taken = TcpListener::bind("127.0.0.1:0").unwrap();
    let addr = taken.local_addr().unwrap().to_string();
    let o = discourse(&["serve", "--out", path(&out), "--addr", &addr]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("port in use"), "{}", stderr(&o));
}

struct Server(Child);

impl Drop for Server {
    fn drop(&mut self) {
        let _ = self.0.kill();
        let _ = self.0.wait();
    }
}

fn http(addr: &str, method: &str, target: &str, body: &str) -> (u16, String) {
    let mut s = TcpStream::connect(addr).unwrap();
    write!(
        s,
        "{method} {target} HTTP/1.1\r\nHost: {addr}\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{body}",
        body.len()
    )
    .unwrap();
    let mut resp = String::new();
    s.read_to_string(&mut resp).unwrap();
    let status = resp.split_whitespace().nth(1).unwrap().parse().unwrap();
    let body = resp.split_once("\r\n\r\n").map(|(_, b)| b.to_owned()).unwrap_or_default();
    (status, body)
}

#[test]
fn serve_answers_blind_requests() {
    let dir = TempDir::new().unwrap();
    let out = prepared(&dir);
    let mut child = Command::new(env!("CARGO_BIN_EXE_discourse"))
        .args(["serve", "--out", path(&out), "--addr", "127.0.0.1:0"])
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    let mut line = String::new();
    BufReader::new(child.stderr.take().unwrap()).read_line(&mut line).unwrap();
    let _server = Server(child);
    let addr = line.trim().strip_prefix("listening on http://").expect(&line).to_owned();

    let (status, body) = http(&addr, "POST", "/sessions", r#"{"headline_ids":[0,1,2,3,4,5],"batch_size":3}"#);
    assert_eq!(status, 200, "{body}");
    let state: Value = serde_json::from_str(&body).unwrap();
    let id = state["session_id"].as_str().unwrap();
    let (status, body) = http(&addr, "GET", &format!("/sessions/{id}/next"), "");
    assert_eq!(status, 200);
    let next: Value = serde_json::from_str(&body).unwrap();
    assert!(next.get("label").is_none(), "{body}");
    assert!(next["text"].as_str().unwrap().starts_with("Headline number"));
    assert_eq!(http(&addr, "GET", "/sessions/nope", "").0, 404);
    assert!(out.join("sessions").join(format!("{id}.jsonl")).exists());
}
