// Writes a small planted-topic corpus as JSON Lines, appends a malformed line,
// then loads it back and prints what the graph holds.

use std::fs;

use eho_forage::harness::ingest::{ingest, Ingested};
use eho_forage::harness::synth::{generate, SynthConfig};

pub fn run_example() -> Ingested {
    let corpus = generate(&SynthConfig { posts: 300, users_per_topic: 20, ..SynthConfig::default() });
    let dir = std::env::temp_dir().join(format!("eho-forage-ingest-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    let path = dir.join("corpus.jsonl");
    let mut text = corpus.to_jsonl();
    text.push_str("{\"id\": \"broken\"\n");
    fs::write(&path, text).unwrap();
    let loaded = ingest(&path).expect("one bad line is under the malformed threshold");
    fs::remove_dir_all(&dir).ok();
    loaded
}

fn main() {
    let i = run_example();
    println!("{} lines, {} malformed", i.lines, i.malformed);
    println!("{} content edges, {} follow edges, {} users", i.graph.content_len(), i.graph.structural_edges().len(), i.graph.users().len());
    for e in i.graph.content_edges().iter().take(3) {
        let (from, to) = (i.graph.user(e.source), i.graph.user(e.target));
        println!("  edge {} ({}) {from} -> {to}: {:.40}", e.id, e.kind.as_str(), e.raw_text);
    }
    for w in &i.warnings {
        println!("warning: {w}");
    }
}
