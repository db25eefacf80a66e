// Clusters a planted three-topic corpus into territories, checks how well the
// territories recover the topics, and round-trips the snapshot file.

use eho_forage::harness::experiment::Corpus;
use eho_forage::harness::synth::{generate, SynthConfig};
use eho_forage::graph::SocialGraph;
use eho_forage::rng::seeded;
use eho_forage::territory::{run_kmeans, Clustering, KMeansConfig};
use eho_forage::text::Normalizer;

pub struct Outcome {
    pub clustering: Clustering,
    pub purity: f64,
    pub reloaded: bool,
}

pub fn run_example() -> Outcome {
    let synth = generate(&SynthConfig { posts: 900, ..SynthConfig::default() });
    let graph = SocialGraph::build(&synth.records).unwrap();
    let corpus = Corpus::new(graph, Normalizer::default(), None, "example".into());
    let config = KMeansConfig { restarts: 5, ..KMeansConfig::default() };
    let clustering = run_kmeans(&corpus.vectors(), 3, &config, &mut seeded(2)).unwrap();

    let topics = synth.content_topics();
    let majority: usize = clustering
        .territories
        .iter()
        .map(|t| {
            let mut counts = vec![0; synth.config.topics];
            t.members.iter().for_each(|&e| counts[topics[e]] += 1);
            counts.into_iter().max().unwrap_or(0)
        })
        .sum();

    let path = std::env::temp_dir().join(format!("eho-forage-snapshot-{}.json", std::process::id()));
    clustering.save(&path, &corpus.digest).unwrap();
    let reloaded = Clustering::load(&path, &corpus.digest, clustering.m()).is_ok_and(|c| c == clustering);
    std::fs::remove_file(&path).ok();

    Outcome {
        purity: majority as f64 / topics.len() as f64,
        clustering,
        reloaded,
    }
}

fn main() {
    let out = run_example();
    for t in &out.clustering.territories {
        println!("territory {}: positions {}..={}, centroid edge {}", t.cluster_id, t.position_range.0, t.position_range.1, t.centroid_edge);
    }
    println!("purity {:.3}, snapshot reloaded: {}", out.purity, out.reloaded);
}
