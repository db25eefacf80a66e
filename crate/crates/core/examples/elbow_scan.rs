// Elbow scan: WSS for k = 1..=8 on a planted three-topic corpus. The curve
// bends at the planted topic count.

use eho_forage::harness::synth::{generate, SynthConfig};
use eho_forage::rng::seeded;
use eho_forage::territory::{scan_k, KMeansConfig};
use eho_forage::text::{tfidf_vectorize, Normalizer};

pub fn run_example() -> Vec<(usize, f64)> {
    let corpus = generate(&SynthConfig { posts: 1500, ..SynthConfig::default() });
    let normalizer = Normalizer::default();
    let docs: Vec<Vec<String>> = corpus
        .records
        .iter()
        .zip(&corpus.topic_of_record)
        .filter(|(_, topic)| topic.is_some())
        .map(|(r, _)| normalizer.normalize(&r.text))
        .collect();
    let (_, vectors) = tfidf_vectorize(&docs, None);
    let config = KMeansConfig { restarts: 5, ..KMeansConfig::default() };
    let ks: Vec<usize> = (1..=8).collect();
    scan_k(&vectors, &ks, &config, &mut seeded(1)).expect("corpus has enough posts")
}

fn main() {
    let mut previous: Option<f64> = None;
    for (k, wss) in run_example() {
        match previous {
            Some(p) => println!("k={k}  wss={wss:9.3}  drop={:5.1}%", 100.0 * (p - wss) / p),
            None => println!("k={k}  wss={wss:9.3}"),
        }
        previous = Some(wss);
    }
}
