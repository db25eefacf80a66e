// Runs all four engines on the same queries and prints mean score, depth,
// convergence generation and search time per engine.

use std::time::Instant;

use eho_forage::baselines::{run_acsif, run_psoif, AcsParams, PsoParams};
use eho_forage::eeholsif::{run_eeholsif, EeholsifParams};
use eho_forage::eho::{run_ehoif, EhoParams};
use eho_forage::foraging::{Forager, PositionSpace, RankedPaths, SimilarityTable};
use eho_forage::graph::SocialGraph;
use eho_forage::harness::config::Engine;
use eho_forage::harness::experiment::Corpus;
use eho_forage::harness::synth::{generate, SynthConfig};
use eho_forage::rng::seeded;
use eho_forage::territory::{run_kmeans, KMeansConfig};
use eho_forage::text::{extract_interests, Normalizer};

pub struct Summary {
    pub engine: Engine,
    pub score: f64,
    pub depth: f64,
    pub convergence: f64,
    pub seconds: f64,
}

pub fn run_example() -> Vec<Summary> {
    let synth = generate(&SynthConfig { posts: 4000, ..SynthConfig::default() });
    let corpus = Corpus::new(SocialGraph::build(&synth.records).unwrap(), Normalizer::default(), None, String::new());
    let m = corpus.graph.content_len();
    let clustering = run_kmeans(&corpus.vectors(), 3, &KMeansConfig::default(), &mut seeded(4)).unwrap();
    let queries = synth.queries(4, 2, &mut seeded(9));

    Engine::ALL
        .into_iter()
        .map(|engine| {
            let mut totals = [0.0; 4];
            for (i, (_, keywords)) in queries.iter().enumerate() {
                let seed = i as u64;
                let interest = extract_interests(&corpus.normalizer, keywords, None, 10).unwrap().embed(&corpus.vocab);
                let table = SimilarityTable::new(&corpus.graph, &interest);
                let forager = Forager::new(&corpus.graph, &table, PositionSpace::Raw(m));
                let start = Instant::now();
                let ranked: RankedPaths = match engine {
                    Engine::Ehoif => run_ehoif(&forager, &EhoParams { seed, ..EhoParams::default() }),
                    Engine::Eeholsif => {
                        let mut p = EeholsifParams::default();
                        p.eho.seed = seed;
                        run_eeholsif(&corpus.graph, &table, &clustering, &interest, &p)
                    }
                    Engine::Acsif => run_acsif(&forager, &AcsParams { seed, ..AcsParams::default() }),
                    Engine::Psoif => run_psoif(&forager, &PsoParams { seed, ..PsoParams::default() }),
                }
                .unwrap();
                totals[3] += start.elapsed().as_secs_f64();
                let best = ranked.best().unwrap();
                totals[0] += best.fitness();
                totals[1] += best.depth() as f64;
                totals[2] += ranked.convergence_generation().unwrap() as f64;
            }
            let n = queries.len() as f64;
            Summary {
                engine,
                score: totals[0] / n,
                depth: totals[1] / n,
                convergence: totals[2] / n,
                seconds: totals[3] / n,
            }
        })
        .collect()
}

fn main() {
    println!("{:<9} {:>7} {:>6} {:>6} {:>9}", "engine", "score", "depth", "conv", "time_ms");
    for s in run_example() {
        println!("{:<9} {:>7.4} {:>6.2} {:>6.1} {:>9.2}", s.engine.name(), s.score, s.depth, s.convergence, s.seconds * 1e3);
    }
}
