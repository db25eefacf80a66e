mod common;

use std::fs;
use std::io::Write;

use eho_forage::harness::config::{Engine, ExperimentConfig};
use eho_forage::harness::experiment::run_experiment;
use eho_forage::harness::ingest::ingest;
use eho_forage::harness::synth::{generate, SynthConfig};
use eho_forage::rng::seeded;
use eho_forage::Error;

fn corpus_file(dir: &tempfile::TempDir, posts: usize) -> (std::path::PathBuf, Vec<String>) {
    let synth = generate(&SynthConfig { posts, ..SynthConfig::default() });
    let path = dir.path().join("corpus.jsonl");
    fs::write(&path, synth.to_jsonl()).unwrap();
    let queries = synth.queries(70, 2, &mut seeded(3)).into_iter().map(|q| q.1).collect();
    (path, queries)
}

#[test]
fn hundred_thousand_lines_are_all_accounted_for() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("big.jsonl");
    let mut f = std::io::BufWriter::new(fs::File::create(&path).unwrap());
    let n = 100_000;
    for i in 0..n {
        let line = match i % 20 {
            0 => "not json at all".to_string(),
            1 => format!(r#"{{"id":"x{i}","author":"u{}","kind":"like"}}"#, i % 97),
            2 => format!(r#"{{"id":"f{i}","author":"u{}","kind":"follow","target_user":"u{}"}}"#, i % 97, (i + 1) % 97),
            3 => format!(r#"{{"id":"r{i}","author":"u{}","kind":"reply","parent_post":"p{}","text":"re"}}"#, i % 97, i - 3),
            _ => format!(r#"{{"id":"p{i}","author":"u{}","kind":"post","text":"post {i}"}}"#, i % 97),
        };
        writeln!(f, "{line}").unwrap();
    }
    f.flush().unwrap();
    drop(f);

    let loaded = ingest(&path).unwrap();
    assert_eq!(loaded.lines, n);
    assert_eq!(loaded.malformed, n / 10);
    assert_eq!(loaded.graph.content_len() + loaded.graph.structural_edges().len() + loaded.malformed, n);
    assert_eq!(loaded.graph.structural_edges().len(), n / 20);
    assert_eq!(loaded.graph.dangling_parents(), n / 20);
}

#[test]
fn seventy_interests_give_seventy_rows() {
    let dir = tempfile::tempdir().unwrap();
    let (path, queries) = corpus_file(&dir, 300);
    let mut cfg = ExperimentConfig::default();
    cfg.engine = Engine::Acsif;
    cfg.corpus = Some(path);
    cfg.interests = queries;
    cfg.set("n_ants", "5").unwrap();
    cfg.set("max_gen", "3").unwrap();
    let report = run_experiment(&cfg).unwrap();
    assert_eq!(report.rows.len(), 70);
    for r in &report.rows {
        assert!((0.0..=1.0).contains(&r.score));
        assert_eq!(r.curve.len(), r.generations);
        assert_eq!(r.generations, 3);
        assert_eq!(r.depth, r.path_edges.len());
    }
}

#[test]
fn snapshot_is_written_then_reused() {
    let dir = tempfile::tempdir().unwrap();
    let (path, queries) = corpus_file(&dir, 600);
    let snapshot = dir.path().join("snap.json");
    let mut cfg = ExperimentConfig::default();
    cfg.corpus = Some(path.clone());
    cfg.interests = queries[..2].to_vec();
    cfg.snapshot = Some(snapshot.clone());
    cfg.k = 3;
    for (k, v) in [("n_per_clan", "10"), ("max_gen", "4")] {
        cfg.set(k, v).unwrap();
    }

    cfg.no_cluster = true;
    assert!(matches!(run_experiment(&cfg), Err(Error::Config(_))));

    cfg.no_cluster = false;
    let first = run_experiment(&cfg).unwrap();
    assert!(snapshot.exists());
    cfg.no_cluster = true;
    let second = run_experiment(&cfg).unwrap();
    assert_eq!(first.rows.iter().map(|r| r.score).collect::<Vec<_>>(), second.rows.iter().map(|r| r.score).collect::<Vec<_>>());

    // a different corpus must not silently reuse the snapshot
    let mut other = generate(&SynthConfig { posts: 600, seed: 99, ..SynthConfig::default() }).to_jsonl();
    other.push('\n');
    fs::write(&path, other).unwrap();
    assert!(matches!(run_experiment(&cfg), Err(Error::SnapshotMismatch(_))));
}

#[test]
fn config_errors_are_usage_errors() {
    let mut cfg = ExperimentConfig::default();
    let err = cfg.set("engine", "gwo").unwrap_err();
    assert!(err.is_usage());
    assert!(run_experiment(&cfg).unwrap_err().is_usage());
}

#[test]
fn every_engine_echoes_its_parameters() {
    for engine in Engine::ALL {
        let mut cfg = ExperimentConfig::default();
        cfg.engine = engine;
        let echo = cfg.echo().unwrap();
        let keys: Vec<&str> = echo.iter().map(|(k, _)| k.as_str()).collect();
        assert_eq!(keys[..2], ["engine", "seed"]);
        assert!(keys.contains(&"max_gen"), "{engine}");
    }
}
