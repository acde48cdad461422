use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use clap::CommandFactory;
use glyph_cli::Cli;

fn glyph(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_glyph")).args(args).output().unwrap()
}

fn levels_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/levels")
}

fn level_file(id: &str) -> String {
    levels_dir().join(format!("{id}.json")).to_string_lossy().into_owned()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn every_flag_has_help_text() {
    let cmd = Cli::command();
    cmd.clone().debug_assert();
    for sub in cmd.get_subcommands() {
        assert!(sub.get_about().is_some(), "{} has no about", sub.get_name());
        for arg in sub.get_arguments() {
            if matches!(arg.get_id().as_str(), "help" | "version") {
                continue;
            }
            assert!(arg.get_help().is_some(), "{} --{} has no help", sub.get_name(), arg.get_id());
        }
    }
}

#[test]
fn help_output_lists_every_flag() {
    let cmd = Cli::command();
    let top = String::from_utf8(glyph(&["--help"]).stdout).unwrap();
    for sub in cmd.get_subcommands() {
        assert!(top.contains(sub.get_name()), "{}", sub.get_name());
        let help = glyph(&[sub.get_name(), "--help"]);
        assert!(help.status.success());
        let text = String::from_utf8(help.stdout).unwrap();
        for arg in sub.get_arguments() {
            if let Some(long) = arg.get_long() {
                assert!(text.contains(&format!("--{long}")), "{} --{long}", sub.get_name());
            }
        }
    }
}

#[test]
fn gen_is_seeded() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b, c) = (tmp.path().join("a.jsonl"), tmp.path().join("b.jsonl"), tmp.path().join("c.jsonl"));
    for (out, seed) in [(&a, "7"), (&b, "7"), (&c, "8")] {
        let fig3 = level_file("fig3");
        let o = glyph(&["gen", "--level", &fig3, "--policy", "mixed", "--count", "100", "--seed", seed, "--out", s(out)]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let first = fs::read(&a).unwrap();
    assert!(!first.is_empty());
    assert_eq!(first, fs::read(&b).unwrap());
    assert_ne!(first, fs::read(&c).unwrap());
}

#[test]
fn exported_matrix_has_zero_diagonal() {
    let tmp = tempfile::tempdir().unwrap();
    let log = tmp.path().join("t.jsonl");
    let ds = tmp.path().join("ds");
    assert!(glyph(&["gen", "--level", &level_file("T1"), "--count", "60", "--seed", "1", "--out", s(&log)]).status.success());
    let levels = levels_dir();
    assert!(glyph(&["precompute", "--traces", s(&log), "--levels", s(&levels), "--out", s(&ds)]).status.success());

    let o = glyph(&["export", "--dataset", s(&ds), "--level", "T1", "--what", "matrix"]);
    assert!(o.status.success());
    let csv = String::from_utf8(o.stdout).unwrap();
    let rows: Vec<Vec<&str>> = csv.lines().map(|l| l.split(',').collect()).collect();
    assert_eq!(rows[0][0], "sequence_id");
    let n = rows.len() - 1;
    assert!(n > 1);
    for (i, row) in rows[1..].iter().enumerate() {
        assert_eq!(row.len(), n + 1);
        assert_eq!(row[i + 1].parse::<f64>().unwrap(), 0.0);
    }

    for what in ["state-graph", "sequence-graph", "state-svg", "sequence-svg"] {
        let out = tmp.path().join(what);
        let o = glyph(&["export", "--dataset", s(&ds), "--level", "T1", "--what", what, "--out", s(&out)]);
        assert!(o.status.success(), "{what}");
        assert!(fs::metadata(&out).unwrap().len() > 0);
    }
}

#[test]
fn ingest_reports_one_corrupt_line() {
    let tmp = tempfile::tempdir().unwrap();
    let log = tmp.path().join("t.jsonl");
    assert!(glyph(&["gen", "--level", &level_file("T1"), "--count", "20", "--seed", "4", "--out", s(&log)]).status.success());
    let mut lines: Vec<String> = fs::read_to_string(&log).unwrap().lines().map(String::from).collect();
    lines.insert(lines.len() / 2, "{\"player_id\": \"broken".into());
    fs::write(&log, lines.join("\n") + "\n").unwrap();

    let o = glyph(&["ingest", "--traces", s(&log), "--levels", s(&levels_dir())]);
    assert!(o.status.success());
    let report = String::from_utf8(o.stdout).unwrap();
    assert!(report.contains("warnings: 1\n"), "{report}");
    assert!(report.contains("malformed line"), "{report}");

    let o = glyph(&["ingest", "--traces", s(&log), "--levels", s(&levels_dir()), "--json"]);
    let json: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(json["warnings"].as_array().unwrap().len(), 1);
    assert_eq!(json["traces_accepted"], 20);
}

#[test]
fn failures_name_their_stage() {
    let tmp = tempfile::tempdir().unwrap();
    let missing = tmp.path().join("missing");
    let o = glyph(&["precompute", "--traces", s(&missing), "--levels", s(&levels_dir()), "--out", s(&tmp.path().join("ds"))]);
    assert!(!o.status.success());
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("precompute failed"), "{err}");
    assert!(err.contains("missing"), "{err}");

    let o = glyph(&["export", "--dataset", s(&missing), "--level", "T1", "--what", "matrix"]);
    assert!(!o.status.success());
    assert!(String::from_utf8(o.stderr).unwrap().contains("export failed"));

    let o = glyph(&["serve", "--dataset", s(&missing), "--bind", "127.0.0.1:0"]);
    assert!(!o.status.success());
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("serve failed") && err.contains(s(&missing)), "{err}");
}

#[test]
fn bad_flags_print_usage() {
    let o = glyph(&["gen", "--count", "3"]);
    assert!(!o.status.success());
    assert!(String::from_utf8(o.stderr).unwrap().contains("Usage"));
    let o = glyph(&["gen", "--level", &level_file("T1"), "--policy", "psychic"]);
    assert!(!o.status.success());
}
