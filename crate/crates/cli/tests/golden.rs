//! The shipped scenario corpus must reproduce its committed reports exactly
//! (timing excluded), and machine reports must parse back losslessly.

use qduo_cli::{run_scenario_text, Flags, Report};
use std::path::{Path, PathBuf};

fn corpus_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus")
}

fn corpus_scenarios() -> Vec<PathBuf> {
    let mut out: Vec<PathBuf> = std::fs::read_dir(corpus_dir())
        .unwrap()
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "scn"))
        .collect();
    out.sort();
    assert!(out.len() >= 12, "corpus shrank to {} scenarios", out.len());
    out
}

#[test]
fn corpus_reproduces_committed_reports() {
    for scn in corpus_scenarios() {
        let name = scn.file_stem().unwrap().to_string_lossy().to_string();
        let text = std::fs::read_to_string(&scn).unwrap();
        let report = run_scenario_text(&text, &Flags::default())
            .unwrap_or_else(|e| panic!("{name}: {}", e.message()));
        let got = report.emit_machine_without_timing();
        let golden_path = corpus_dir().join("golden").join(format!("{name}.txt"));
        let want = std::fs::read_to_string(&golden_path)
            .unwrap_or_else(|e| panic!("missing golden for {name}: {e}"));
        assert_eq!(got, want, "report drift for {name}");
    }
}

#[test]
fn machine_reports_round_trip() {
    for scn in corpus_scenarios() {
        let text = std::fs::read_to_string(&scn).unwrap();
        let report = run_scenario_text(&text, &Flags::default()).unwrap();
        let emitted = report.emit_machine();
        let parsed = Report::parse_machine(&emitted).unwrap();
        assert_eq!(parsed.emit_machine(), emitted);
        assert_eq!(parsed, report);
    }
}

#[test]
fn human_format_carries_every_machine_field() {
    for scn in corpus_scenarios() {
        let text = std::fs::read_to_string(&scn).unwrap();
        let report = run_scenario_text(&text, &Flags::default()).unwrap();
        let human = report.emit_human();
        for (k, v) in report.fields() {
            assert!(human.contains(k.as_str()), "missing key {k}");
            assert!(human.contains(v.as_str()), "missing value of {k}");
        }
    }
}
