//! Integration tests for the command line surface: subcommands, exit
//! codes, and the manifest contract.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

fn litscan(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_litscan"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn out_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("litscan-cli-test-{tag}"));
    let _ = std::fs::remove_dir_all(&dir);
    dir
}

#[test]
fn stats_stage_writes_two_outputs_and_a_manifest() {
    let out = out_dir("stats");
    let config = fixtures().join("config.toml");
    let result = litscan(&[
        "stats",
        "--config",
        config.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(result.status.code(), Some(0), "{result:?}");

    let manifest = std::fs::read_to_string(out.join("manifest.tsv")).unwrap();
    let outputs: Vec<&str> = manifest
        .lines()
        .filter(|line| line.starts_with("output\t"))
        .collect();
    assert_eq!(outputs.len(), 2, "manifest: {manifest}");
    assert!(manifest.contains("growth_curve.tsv"));
    assert!(manifest.contains("category_report.tsv"));
    assert!(manifest.starts_with("fingerprint\t"));
}

#[test]
fn compare_without_second_corpus_is_a_config_error() {
    let dir = out_dir("no-compare");
    std::fs::create_dir_all(&dir).unwrap();
    let config = dir.join("config.toml");
    std::fs::write(
        &config,
        format!(
            "[inputs]\npubtator = \"{}\"\n[lexicons]\nsymptoms = \"{}\"\n",
            fixtures().join("tiny.pubtator").display(),
            fixtures().join("symptoms.tsv").display()
        ),
    )
    .unwrap();
    let result = litscan(&["compare", "--config", config.to_str().unwrap()]);
    assert_eq!(result.status.code(), Some(2), "{result:?}");
}

#[test]
fn missing_config_flag_is_a_config_error() {
    let result = litscan(&["stats"]);
    assert_eq!(result.status.code(), Some(2));
}

#[test]
fn nonexistent_input_path_is_a_config_error() {
    let dir = out_dir("bad-path");
    std::fs::create_dir_all(&dir).unwrap();
    let config = dir.join("config.toml");
    std::fs::write(&config, "[inputs]\npubtator = \"missing.pubtator\"\n").unwrap();
    let result = litscan(&["stats", "--config", config.to_str().unwrap()]);
    assert_eq!(result.status.code(), Some(2), "{result:?}");
}

#[test]
fn empty_lexicon_after_filtering_is_a_stage_error() {
    let dir = out_dir("stage-error");
    std::fs::create_dir_all(&dir).unwrap();
    let config = dir.join("config.toml");
    std::fs::write(
        &config,
        format!(
            "[inputs]\npubtator = \"{}\"\n[lexicons]\nsymptoms = \"{}\"\nsymptoms_branch = \"Z99\"\n",
            fixtures().join("tiny.pubtator").display(),
            fixtures().join("symptoms.tsv").display()
        ),
    )
    .unwrap();
    let out = out_dir("stage-error-out");
    let result = litscan(&[
        "symptoms",
        "--config",
        config.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(result.status.code(), Some(3), "{result:?}");
    // The manifest still exists and records what completed (nothing).
    assert!(out.join("manifest.tsv").is_file());
}

#[test]
fn stage_error_retains_completed_outputs() {
    // stats runs before symptoms; a symptoms failure must not destroy
    // the stats outputs.
    let dir = out_dir("partial");
    std::fs::create_dir_all(&dir).unwrap();
    let config = dir.join("config.toml");
    std::fs::write(
        &config,
        format!(
            "[inputs]\npubtator = \"{}\"\n[lexicons]\nsymptoms = \"{}\"\nsymptoms_branch = \"Z99\"\n",
            fixtures().join("tiny.pubtator").display(),
            fixtures().join("symptoms.tsv").display()
        ),
    )
    .unwrap();
    let out = out_dir("partial-out");
    let result = litscan(&[
        "all",
        "--config",
        config.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(result.status.code(), Some(3), "{result:?}");
    assert!(out.join("growth_curve.tsv").is_file());
    assert!(out.join("category_report.tsv").is_file());
    let manifest = std::fs::read_to_string(out.join("manifest.tsv")).unwrap();
    assert!(manifest.contains("growth_curve.tsv"));
    assert!(!manifest.contains("symptom_counts.tsv"));
}

#[test]
fn ingest_writes_a_round_trippable_canonical_corpus() {
    let out = out_dir("ingest");
    let config = fixtures().join("config.toml");
    let result = litscan(&[
        "ingest",
        "--config",
        config.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(result.status.code(), Some(0), "{result:?}");
    let canonical = std::fs::read_to_string(out.join("corpus_canonical.txt")).unwrap();
    let corpus = litscan::canonical::from_canonical(&canonical).unwrap();
    assert_eq!(corpus.len(), 6);
    assert_eq!(litscan::canonical::to_canonical(&corpus), canonical);
}

#[test]
fn report_emits_requested_plot_kinds() {
    let out = out_dir("report");
    let config = fixtures().join("config.toml");
    let result = litscan(&[
        "report",
        "--kind",
        "growth_curve",
        "--kind",
        "category_bars",
        "--config",
        config.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(result.status.code(), Some(0), "{result:?}");
    assert!(out.join("growth_curve.tsv").is_file());
    assert!(out.join("category_bars.tsv").is_file());
    let bars = std::fs::read_to_string(out.join("category_bars.tsv")).unwrap();
    assert!(bars.starts_with("label\tcount\n"));
    assert_eq!(bars.lines().count(), 9);
}

#[test]
fn unknown_plot_kind_is_a_config_error() {
    let out = out_dir("bad-kind");
    let config = fixtures().join("config.toml");
    let result = litscan(&[
        "report",
        "--kind",
        "pie_chart",
        "--config",
        config.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(result.status.code(), Some(2), "{result:?}");
}

#[test]
fn strict_flag_overrides_config() {
    // A malformed annotation line: strict run fails at ingest, the
    // default lenient run (config here says nothing) succeeds.
    let dir = out_dir("strict-flag");
    std::fs::create_dir_all(&dir).unwrap();
    let pubtator = dir.join("corpus.pubtator");
    std::fs::write(
        &pubtator,
        "1|t|Alpha.\n1|a|Beta.\n1\t0\t99\tAlpha\tGene\tG1\n",
    )
    .unwrap();
    let config = dir.join("config.toml");
    std::fs::write(
        &config,
        format!("[inputs]\npubtator = \"{}\"\n", pubtator.display()),
    )
    .unwrap();

    let out_lenient = out_dir("strict-flag-lenient");
    let ok = litscan(&[
        "stats",
        "--config",
        config.to_str().unwrap(),
        "--out",
        out_lenient.to_str().unwrap(),
    ]);
    assert_eq!(ok.status.code(), Some(0), "{ok:?}");

    let out_strict = out_dir("strict-flag-strict");
    let fail = litscan(&[
        "stats",
        "--strict",
        "--config",
        config.to_str().unwrap(),
        "--out",
        out_strict.to_str().unwrap(),
    ]);
    assert_eq!(fail.status.code(), Some(3), "{fail:?}");
}
