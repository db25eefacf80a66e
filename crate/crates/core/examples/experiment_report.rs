// Drives a full experiment from a key = value configuration, writes the
// report files and reads them back.

use std::fs;

use eho_forage::harness::config::ExperimentConfig;
use eho_forage::harness::experiment::{run_experiment, RunReport};
use eho_forage::harness::report::{read_report, write_report};
use eho_forage::harness::synth::{generate, SynthConfig};
use eho_forage::rng::seeded;

pub fn run_example() -> (RunReport, RunReport, Vec<String>) {
    let dir = std::env::temp_dir().join(format!("eho-forage-report-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    let synth = generate(&SynthConfig::default());
    let corpus = dir.join("corpus.jsonl");
    fs::write(&corpus, synth.to_jsonl()).unwrap();
    let queries: Vec<String> = synth.queries(3, 2, &mut seeded(1)).into_iter().map(|q| q.1).collect();

    let mut cfg = ExperimentConfig::default();
    cfg.apply_text(&format!(
        "engine = eeholsif\ncorpus = {}\ninterests = {}\nseed = 11\nk = 3\nsnapshot = {}\n",
        corpus.display(),
        queries.join("; "),
        dir.join("snapshot.json").display()
    ))
    .unwrap();
    // flags applied after the file win
    cfg.set("max_gen", "15").unwrap();

    let report = run_experiment(&cfg).unwrap();
    let paths = write_report(&report, dir.join("run.csv")).unwrap();
    let params: Vec<String> = fs::read_to_string(&paths.params).unwrap().lines().map(String::from).collect();
    let back = read_report(&paths.rows).unwrap();
    fs::remove_dir_all(&dir).ok();
    (report, back, params)
}

fn main() {
    let (report, back, params) = run_example();
    for line in &params {
        println!("{line}");
    }
    for r in &report.rows {
        println!("query {}: score {:.4}, depth {}, {} generations, posts {:?}", r.query, r.score, r.depth, r.generations, r.path_posts);
    }
    println!("report reads back identically: {}", back == report);
}
