#![allow(dead_code)]

use eho_forage::graph::{PostRecord, SocialGraph};
use eho_forage::harness::experiment::Corpus;
use eho_forage::harness::synth::{generate, SynthConfig, SynthCorpus};
use eho_forage::text::Normalizer;

/// Planted-topic corpus and its vectorized form.
pub fn planted(posts: usize, seed: u64) -> (SynthCorpus, Corpus) {
    let synth = generate(&SynthConfig { posts, seed, ..SynthConfig::default() });
    let graph = SocialGraph::build(&synth.records).expect("synthetic records are valid");
    let corpus = Corpus::new(graph, Normalizer::default(), None, String::new());
    (synth, corpus)
}

pub fn post(id: &str, author: &str, text: &str) -> PostRecord {
    PostRecord {
        id: id.into(),
        author: author.into(),
        kind: "post".into(),
        target_user: None,
        parent_post: None,
        text: text.into(),
    }
}

pub fn median(mut v: Vec<f64>) -> f64 {
    assert!(!v.is_empty());
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}
