//! End-to-end runs of the `subregkl` binary.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str], cache: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_subregkl"))
        .arg("--cache")
        .arg(cache)
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(text: &str) -> serde_json::Value {
    serde_json::from_str(text).unwrap()
}

#[test]
fn verify_writes_report_and_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("g2.json");
    let o = run(
        &["kl", "verify", "--type", "G2", "--box", "2", "--report", report.to_str().unwrap()],
        &dir.path().join("cache"),
    );
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let r = json(&fs::read_to_string(&report).unwrap());
    assert_eq!(r["passed"], true);
    assert_eq!(r["kind"], "G2");
    let side = json(&fs::read_to_string(dir.path().join("g2.json.run.json")).unwrap());
    assert!(side.get("cache").is_some());
}

#[test]
fn verify_is_deterministic_across_thread_counts_and_cache_state() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache");
    let mut texts = Vec::new();
    for (k, threads) in ["1", "4", "4"].iter().enumerate() {
        let path = dir.path().join(format!("r{k}.json"));
        let o = run(
            &["--threads", threads, "kl", "verify", "--type", "B3", "--box", "1", "--report", path.to_str().unwrap()],
            &cache,
        );
        assert_eq!(o.status.code(), Some(0));
        texts.push(fs::read(&path).unwrap());
    }
    assert_eq!(texts[0], texts[1]);
    assert_eq!(texts[1], texts[2]);
}

#[test]
fn verify_csv_and_empty_box() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["kl", "verify", "--type", "C2", "--box", "1", "--format", "csv"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(text.lines().next(), Some("gamma,label,m_formula,m_hecke,m_cellmod,agree"));
    assert!(text.lines().skip(1).all(|l| l.ends_with(",true")));

    let o = run(&["kl", "verify", "--type", "F4", "--box", "-1", "--format", "csv"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "gamma,label,m_formula,m_hecke,m_cellmod,agree\n");
}

#[test]
fn usage_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &["kl", "m", "--type", "G2", "--gamma", "1,2,3"][..],
        &["kl", "m", "--type", "A2", "--gamma", "1,2"][..],
        &["kl", "m", "--type", "G2", "--gamma", "1,1", "--label", "nope"][..],
        &["char", "--type", "G2", "--lambda=-L0", "--w", "s1s0", "--box", "1"][..],
        &["kl", "verify", "--type", "G2", "--box", "1", "--methods", "xml"][..],
    ] {
        let o = run(args, dir.path());
        assert_eq!(o.status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn m_prints_one_row_per_label() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["kl", "m", "--type", "G2", "--gamma", "2,1", "--label", "s0"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "label\tformula\thecke\tcellmod\ns0\t1\t1\t1\n");
    let o = run(&["kl", "m", "--type", "G2", "--gamma", "0,0", "--method", "formula"], dir.path());
    let text = stdout(&o);
    assert_eq!(text.lines().next(), Some("label\tformula"));
    assert_eq!(text.lines().count(), 1 + 8 + 1);
}

#[test]
fn cell_list_formats() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["cell", "list", "--type", "G2"], dir.path());
    let v = json(&stdout(&o));
    let nodes = v.as_array().unwrap();
    assert_eq!(nodes.len(), 8);
    assert_eq!(nodes[0]["label"], "s0");
    assert_eq!(nodes[0]["nu"], serde_json::json!([2, 1]));
    let o = run(&["cell", "list", "--type", "B3", "--format", "csv"], dir.path());
    let text = stdout(&o);
    assert!(text.starts_with("word,label,nu,mu,length,neighbors\n"), "{text}");
}

#[test]
fn char_emits_weight_table() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["char", "--type", "G2", "--lambda=-L0", "--w", "s0", "--box", "2"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("L0,L1,L2,delta,coefficient"));
    assert!(lines.count() > 0);
    let o = run(&["char", "--type", "G2", "--lambda=-L0", "--w", "0", "--box", "2", "--format", "json"], dir.path());
    let v = json(&stdout(&o));
    assert_eq!(v["w"], "s0");
    assert_eq!(v["leading"], 1);
}

#[test]
fn quasipoly_reports_minimal_fit_and_holdout() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("qp.json");
    let o = run(
        &[
            "quasipoly", "--type", "B3", "--label", "e1+e2", "--box", "3", "--lmax", "2", "--dmax", "2", "--holdout",
            "4", "--report", report.to_str().unwrap(),
        ],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0));
    let v = json(&fs::read_to_string(&report).unwrap());
    assert_eq!(v["scan"]["minimal"], serde_json::json!([2, 2]));
    assert_eq!(v["holdout"]["outcome"], "feasible");
    assert_eq!(v["holdout"]["holdout_mismatches"], serde_json::json!([]));
}

#[test]
fn cartan_check_passes() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["cartan-check", "--type", "G2"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("PASSED"));
}

#[test]
fn findings_match_the_committed_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("f.json");
    let o = run(&["kl", "findings", "--out", out.to_str().unwrap()], dir.path());
    let committed = concat!(env!("CARGO_MANIFEST_DIR"), "/../core/findings/corollaries.json");
    assert_eq!(fs::read(&out).unwrap(), fs::read(committed).unwrap());
    // Anchor mismatches are recorded in the file and reported through the exit code.
    let v = json(&fs::read_to_string(&out).unwrap());
    let anchors: usize = v["audits"].as_array().unwrap().iter().map(|a| a["anchor_mismatches"].as_array().unwrap().len()).sum();
    assert!(anchors > 0);
    assert_eq!(o.status.code(), Some(1));
}
