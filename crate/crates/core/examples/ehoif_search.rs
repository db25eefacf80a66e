// Runs the elephant herding search over raw edge positions for one interest
// query and prints the best surfing paths and the convergence curve.

use eho_forage::eho::{run_ehoif, EhoParams};
use eho_forage::foraging::{Forager, PositionSpace, RankedPaths, SimilarityTable};
use eho_forage::graph::SocialGraph;
use eho_forage::harness::experiment::Corpus;
use eho_forage::harness::synth::{generate, SynthConfig};
use eho_forage::rng::seeded;
use eho_forage::text::{extract_interests, Normalizer};

pub fn run_example() -> RankedPaths {
    let synth = generate(&SynthConfig { posts: 1200, ..SynthConfig::default() });
    let corpus = Corpus::new(SocialGraph::build(&synth.records).unwrap(), Normalizer::default(), None, String::new());
    let (_, keywords) = synth.queries(1, 2, &mut seeded(5)).remove(0);
    let interest = extract_interests(&corpus.normalizer, &keywords, None, 10).unwrap();
    let table = SimilarityTable::new(&corpus.graph, &interest.embed(&corpus.vocab));
    let forager = Forager::new(&corpus.graph, &table, PositionSpace::Raw(corpus.graph.content_len()));

    // 4 clans of 30 keep the placement constraints satisfiable on 1200 edges.
    let params = EhoParams { n_clans: 4, n_per_clan: 30, max_generations: 20, seed: 1, ..EhoParams::default() };
    run_ehoif(&forager, &params).unwrap()
}

fn main() {
    let ranked = run_example();
    for p in ranked.paths.iter().take(5) {
        println!("fitness {:.4}  depth {}  edges {:?}", p.fitness(), p.depth(), p.edges());
    }
    let curve: Vec<String> = ranked.curve.iter().map(|v| format!("{v:.4}")).collect();
    println!("best so far: {}", curve.join(" "));
    println!("converged at generation {:?}", ranked.convergence_generation());
}
