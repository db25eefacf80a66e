use std::time::Instant;

use crate::baselines::{run_acsif, run_psoif};
use crate::eeholsif::run_eeholsif;
use crate::eho::run_ehoif;
use crate::error::{Error, Result};
use crate::foraging::{Forager, PositionSpace, RankedPaths, SimilarityTable};
use crate::graph::{EdgeId, SocialGraph};
use crate::rng::seeded;
use crate::territory::{run_kmeans, Clustering};
use crate::text::{extract_interests, vectorize_graph, Normalizer, TermVector, Vocabulary};

use super::config::{Engine, ExperimentConfig};
use super::ingest::ingest;

/// A vectorized corpus ready for searching.
#[derive(Debug)]
pub struct Corpus {
    pub graph: SocialGraph,
    pub vocab: Vocabulary,
    pub normalizer: Normalizer,
    pub digest: String,
    pub warnings: Vec<String>,
}

impl Corpus {
    pub fn new(mut graph: SocialGraph, normalizer: Normalizer, idf_log_base: Option<f64>, digest: String) -> Self {
        let vocab = vectorize_graph(&mut graph, &normalizer, idf_log_base);
        Corpus {
            graph,
            vocab,
            normalizer,
            digest,
            warnings: Vec::new(),
        }
    }

    /// Ingests and vectorizes the corpus named by `cfg`.
    pub fn load(cfg: &ExperimentConfig) -> Result<Self> {
        let path = cfg.corpus.as_ref().ok_or_else(|| Error::Config("no corpus given".into()))?;
        let normalizer = match &cfg.stopwords {
            Some(p) => Normalizer::from_stopword_file(p)?,
            None => Normalizer::default(),
        };
        let ing = ingest(path)?;
        let mut corpus = Corpus::new(ing.graph, normalizer, cfg.idf_log_base, ing.digest);
        corpus.warnings = ing.warnings;
        Ok(corpus)
    }

    pub fn vectors(&self) -> Vec<TermVector> {
        self.graph.content_edges().iter().map(|e| e.vector.clone()).collect()
    }

    /// Clusters the content edges with the configured k-means settings.
    pub fn cluster(&self, cfg: &ExperimentConfig) -> Result<Clustering> {
        run_kmeans(&self.vectors(), cfg.k, &cfg.kmeans, &mut seeded(cfg.seed))
    }

    /// Loads the configured snapshot, or clusters and saves it.
    pub fn clustering_for(&self, cfg: &ExperimentConfig) -> Result<Clustering> {
        let m = self.graph.content_len();
        match &cfg.snapshot {
            Some(p) if p.exists() => Clustering::load(p, &self.digest, m),
            _ if cfg.no_cluster => Err(Error::Config("clustering disabled and no snapshot found".into())),
            Some(p) => {
                let c = self.cluster(cfg)?;
                c.save(p, &self.digest)?;
                Ok(c)
            }
            None => self.cluster(cfg),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QueryRow {
    pub query: usize,
    /// Extracted interest terms, space separated.
    pub interests: String,
    pub score: f64,
    pub depth: usize,
    pub convergence_generation: Option<usize>,
    pub generations: usize,
    pub path_edges: Vec<EdgeId>,
    pub path_posts: Vec<String>,
    pub path_texts: Vec<String>,
    pub curve: Vec<f64>,
    /// Search loop wall time in seconds.
    pub wall_time: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub engine: Engine,
    pub seed: u64,
    pub corpus_digest: String,
    /// Resolved parameters, in echo order.
    pub params: Vec<(String, String)>,
    pub rows: Vec<QueryRow>,
}

/// Ingests the corpus, prepares clustering when needed and runs every query.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunReport> {
    let corpus = Corpus::load(cfg)?;
    let clustering = match cfg.engine {
        Engine::Eeholsif => Some(corpus.clustering_for(cfg)?),
        Engine::Psoif if cfg.snapshot.as_ref().is_some_and(|p| p.exists()) => Some(corpus.clustering_for(cfg)?),
        _ => None,
    };
    run_queries(cfg, &corpus, clustering.as_ref())
}

/// Runs every configured interest query against a prepared corpus. Query `i`
/// uses seed `cfg.seed + i`.
pub fn run_queries(cfg: &ExperimentConfig, corpus: &Corpus, clustering: Option<&Clustering>) -> Result<RunReport> {
    let params = cfg.echo()?;
    let graph = &corpus.graph;
    let m = graph.content_len();
    if cfg.engine == Engine::Eeholsif && clustering.is_none() {
        return Err(Error::Config("eeholsif needs a clustering".into()));
    }
    let space = match clustering {
        Some(c) if cfg.engine != Engine::Ehoif && cfg.engine != Engine::Acsif => PositionSpace::Semantic(c),
        _ => PositionSpace::Raw(m),
    };

    let mut rows = Vec::with_capacity(cfg.interests.len());
    for (query, keywords) in cfg.interests.iter().enumerate() {
        let interest = extract_interests(&corpus.normalizer, keywords, None, cfg.top_n)?;
        let vector = interest.embed(&corpus.vocab);
        let table = SimilarityTable::new(graph, &vector);
        let forager = Forager::new(graph, &table, space);
        let seed = cfg.seed.wrapping_add(query as u64);
        let mut q = cfg.clone();
        q.seed = seed;

        let start = Instant::now();
        let ranked: RankedPaths = if m == 0 {
            RankedPaths::default()
        } else {
            match cfg.engine {
                Engine::Ehoif => run_ehoif(&forager, &q.ehoif_params()?)?,
                Engine::Eeholsif => {
                    run_eeholsif(graph, &table, clustering.expect("checked above"), &vector, &q.eeholsif_params()?)?
                }
                Engine::Acsif => run_acsif(&forager, &q.acsif_params()?)?,
                Engine::Psoif => run_psoif(&forager, &q.psoif_params()?)?,
            }
        };
        let wall_time = start.elapsed().as_secs_f64();

        let best = ranked.best();
        let path_edges: Vec<EdgeId> = best.map(|p| p.edges().to_vec()).unwrap_or_default();
        let edges = graph.content_edges();
        rows.push(QueryRow {
            query,
            interests: interest.label(),
            score: best.map_or(0.0, |p| p.fitness()),
            depth: best.map_or(0, |p| p.depth()),
            convergence_generation: ranked.convergence_generation(),
            generations: ranked.generations(),
            path_posts: path_edges.iter().map(|&e| edges[e].post_id.clone()).collect(),
            path_texts: path_edges.iter().map(|&e| edges[e].raw_text.clone()).collect(),
            path_edges,
            curve: ranked.curve,
            wall_time,
        });
    }
    Ok(RunReport {
        engine: cfg.engine,
        seed: cfg.seed,
        corpus_digest: corpus.digest.clone(),
        params,
        rows,
    })
}
