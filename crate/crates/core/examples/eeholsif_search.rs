// Territory-aware search: clans start in the territory nearest the interest,
// migrate when they stagnate, and the run reports where each clan went.

use std::collections::BTreeMap;

use eho_forage::eeholsif::{run_eeholsif_observed, EeholsifParams};
use eho_forage::eho::Stage;
use eho_forage::foraging::{RankedPaths, SimilarityTable};
use eho_forage::graph::SocialGraph;
use eho_forage::harness::experiment::Corpus;
use eho_forage::harness::synth::{generate, SynthConfig};
use eho_forage::rng::seeded;
use eho_forage::territory::{run_kmeans, KMeansConfig};
use eho_forage::text::{extract_interests, Normalizer};

pub struct Outcome {
    pub ranked: RankedPaths,
    /// Territory each clan occupied at placement.
    pub placements: BTreeMap<usize, usize>,
    /// `(generation, clan, new territory)` for every migration.
    pub migrations: Vec<(usize, usize, usize)>,
}

pub fn run_example() -> Outcome {
    let synth = generate(&SynthConfig { posts: 3000, ..SynthConfig::default() });
    let corpus = Corpus::new(SocialGraph::build(&synth.records).unwrap(), Normalizer::default(), None, String::new());
    let clustering = run_kmeans(&corpus.vectors(), 3, &KMeansConfig { restarts: 3, ..KMeansConfig::default() }, &mut seeded(3)).unwrap();
    let (_, keywords) = synth.queries(1, 2, &mut seeded(8)).remove(0);
    let interest = extract_interests(&corpus.normalizer, &keywords, None, 10).unwrap().embed(&corpus.vocab);
    let table = SimilarityTable::new(&corpus.graph, &interest);

    let mut placements = BTreeMap::new();
    let mut migrations = Vec::new();
    let ranked = run_eeholsif_observed(&corpus.graph, &table, &clustering, &interest, &EeholsifParams::default(), &mut |o| {
        match o.stage {
            Stage::Evaluated if o.generation == 1 => {
                placements.insert(o.clan, o.territory.unwrap());
            }
            Stage::Migrated => migrations.push((o.generation, o.clan, o.territory.unwrap())),
            _ => {}
        }
    })
    .unwrap();
    Outcome { ranked, placements, migrations }
}

fn main() {
    let out = run_example();
    for (clan, territory) in &out.placements {
        println!("clan {clan} placed on territory {territory}");
    }
    for (generation, clan, territory) in &out.migrations {
        println!("generation {generation}: clan {clan} migrated to territory {territory}");
    }
    let best = out.ranked.best().unwrap();
    println!("best fitness {:.4} at depth {}, converged at generation {:?}", best.fitness(), best.depth(), out.ranked.convergence_generation());
}
