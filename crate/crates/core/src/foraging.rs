//! Information scent, the surfing decision rule and surfing path construction.

use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{EdgeId, SocialGraph};
use crate::territory::Clustering;
use crate::text::{cosine_similarity, TermVector};

/// Change in interest similarity when moving from `current` to `candidate`.
pub fn info_scent(current: &TermVector, candidate: &TermVector, interest: &TermVector) -> f64 {
    cosine_similarity(candidate, interest) - cosine_similarity(current, interest)
}

/// Similarity of every content edge to one interest vector.
#[derive(Debug, Clone)]
pub struct SimilarityTable {
    sims: Vec<f64>,
}

impl SimilarityTable {
    pub fn new(graph: &SocialGraph, interest: &TermVector) -> Self {
        SimilarityTable {
            sims: graph
                .content_edges()
                .par_iter()
                .map(|e| cosine_similarity(&e.vector, interest))
                .collect(),
        }
    }

    pub fn from_values(sims: Vec<f64>) -> Self {
        SimilarityTable { sims }
    }

    pub fn sim(&self, e: EdgeId) -> f64 {
        self.sims[e]
    }

    pub fn scent(&self, current: EdgeId, candidate: EdgeId) -> f64 {
        self.sims[candidate] - self.sims[current]
    }

    pub fn len(&self) -> usize {
        self.sims.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sims.is_empty()
    }
}

/// Decision-rule probabilities over `neighbors`: zero-scent and negative-scent
/// edges are dropped, the rest normalized by total scent. Empty when no
/// neighbor has positive scent.
pub fn selection_probabilities(table: &SimilarityTable, current: EdgeId, neighbors: &[EdgeId]) -> Vec<(EdgeId, f64)> {
    let positive: Vec<(EdgeId, f64)> = neighbors
        .iter()
        .map(|&n| (n, table.scent(current, n)))
        .filter(|&(_, s)| s > 0.0)
        .collect();
    let total: f64 = positive.iter().map(|&(_, s)| s).sum();
    positive.into_iter().map(|(n, s)| (n, s / total)).collect()
}

/// Ordered chain of content edges with strictly increasing interest similarity.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfingPath {
    edges: Vec<EdgeId>,
    similarities: Vec<f64>,
}

impl SurfingPath {
    pub fn start(edge: EdgeId, sim: f64) -> Self {
        SurfingPath {
            edges: vec![edge],
            similarities: vec![sim],
        }
    }

    /// Panics unless `sim` exceeds the current last similarity.
    pub fn push(&mut self, edge: EdgeId, sim: f64) {
        assert!(
            self.similarities.last().is_none_or(|&l| sim > l),
            "surfing path similarity must strictly increase"
        );
        self.edges.push(edge);
        self.similarities.push(sim);
    }

    pub fn edges(&self) -> &[EdgeId] {
        &self.edges
    }

    pub fn similarities(&self) -> &[f64] {
        &self.similarities
    }

    pub fn depth(&self) -> usize {
        self.edges.len()
    }

    pub fn terminal(&self) -> EdgeId {
        *self.edges.last().expect("paths are never empty")
    }

    /// Similarity of the last edge.
    pub fn fitness(&self) -> f64 {
        *self.similarities.last().expect("paths are never empty")
    }
}

/// Fitness of a path given as raw parts: the last edge's similarity to the interests.
pub fn path_fitness(edges: &[EdgeId], table: &SimilarityTable) -> Result<f64> {
    edges.last().map(|&e| table.sim(e)).ok_or(Error::EmptyPath)
}

/// How integer positions map onto content edges.
#[derive(Debug, Clone, Copy)]
pub enum PositionSpace<'a> {
    /// Position `p` is edge `p - 1`.
    Raw(usize),
    /// Positions follow the clustering's semantic layout.
    Semantic(&'a Clustering),
}

impl PositionSpace<'_> {
    pub fn m(&self) -> usize {
        match self {
            PositionSpace::Raw(m) => *m,
            PositionSpace::Semantic(c) => c.m(),
        }
    }

    pub fn edge_at(&self, position: usize) -> Result<EdgeId> {
        let m = self.m();
        let invalid = Error::InvalidPosition { position, m };
        if position == 0 || position > m {
            return Err(invalid);
        }
        match self {
            PositionSpace::Raw(_) => Ok(position - 1),
            PositionSpace::Semantic(c) => c.edge_at(position).ok_or(invalid),
        }
    }

    pub fn position_of(&self, edge: EdgeId) -> usize {
        match self {
            PositionSpace::Raw(_) => edge + 1,
            PositionSpace::Semantic(c) => c.position_of(edge),
        }
    }
}

/// Read-only view shared by every engine: graph, similarities and positions.
#[derive(Debug, Clone, Copy)]
pub struct Forager<'a> {
    pub graph: &'a SocialGraph,
    pub table: &'a SimilarityTable,
    pub space: PositionSpace<'a>,
    /// Optional hard cap on path depth.
    pub max_depth: Option<usize>,
}

impl<'a> Forager<'a> {
    pub fn new(graph: &'a SocialGraph, table: &'a SimilarityTable, space: PositionSpace<'a>) -> Self {
        assert_eq!(graph.content_len(), table.len());
        assert_eq!(graph.content_len(), space.m());
        Forager {
            graph,
            table,
            space,
            max_depth: None,
        }
    }

    pub fn m(&self) -> usize {
        self.space.m()
    }

    /// Builds a surfing path starting at the edge under `position`.
    pub fn build_path<R: Rng + ?Sized>(&self, position: usize, rng: &mut R) -> Result<SurfingPath> {
        let start = self.space.edge_at(position)?;
        Ok(self.build_path_from_edge(start, rng))
    }

    /// Repeatedly samples a positive-scent neighbor until none is left.
    pub fn build_path_from_edge<R: Rng + ?Sized>(&self, start: EdgeId, rng: &mut R) -> SurfingPath {
        let mut path = SurfingPath::start(start, self.table.sim(start));
        let mut neighbors = Vec::new();
        let mut current = start;
        loop {
            if self.max_depth.is_some_and(|d| path.depth() >= d) {
                return path;
            }
            self.graph.adjacent_into(current, &mut neighbors).expect("path edges belong to the graph");
            neighbors.retain(|n| !path.edges.contains(n));
            let probs = selection_probabilities(self.table, current, &neighbors);
            if probs.is_empty() {
                return path;
            }
            let next = sample_inverse_cdf(&probs, rng);
            path.push(next, self.table.sim(next));
            current = next;
        }
    }
}

/// Inverse-CDF draw from `(item, probability)` pairs summing to about one.
pub fn sample_inverse_cdf<R: Rng + ?Sized>(probs: &[(EdgeId, f64)], rng: &mut R) -> EdgeId {
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    for &(e, p) in probs {
        acc += p;
        if u < acc {
            return e;
        }
    }
    probs.last().expect("non-empty distribution").0
}

/// Search output: paths ranked by fitness plus the best-so-far curve.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RankedPaths {
    pub paths: Vec<SurfingPath>,
    /// Best fitness found up to and including each generation.
    pub curve: Vec<f64>,
}

impl RankedPaths {
    /// Sorts by fitness descending, keeping one path per terminal edge.
    pub fn from_candidates(mut candidates: Vec<SurfingPath>, curve: Vec<f64>) -> Self {
        candidates.sort_by(|a, b| {
            b.fitness()
                .total_cmp(&a.fitness())
                .then(a.terminal().cmp(&b.terminal()))
                .then(a.depth().cmp(&b.depth()))
        });
        let mut seen = std::collections::HashSet::new();
        candidates.retain(|p| seen.insert(p.terminal()));
        RankedPaths { paths: candidates, curve }
    }

    pub fn best(&self) -> Option<&SurfingPath> {
        self.paths.first()
    }

    pub fn generations(&self) -> usize {
        self.curve.len()
    }

    /// First generation (1-based) at which the best-so-far value reached its final level.
    pub fn convergence_generation(&self) -> Option<usize> {
        let last = *self.curve.last()?;
        self.curve.iter().position(|&v| v >= last).map(|i| i + 1)
    }
}

/// Appends `value` to a best-so-far curve.
pub(crate) fn push_best(curve: &mut Vec<f64>, value: f64) {
    let prev = curve.last().copied().unwrap_or(f64::NEG_INFINITY);
    curve.push(prev.max(value));
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::PostRecord;
    use crate::rng::seeded;
    use approx::assert_abs_diff_eq;

    fn chain_graph(n: usize) -> SocialGraph {
        // edge i connects user i and user i+1, so edges form a path
        let recs: Vec<PostRecord> = (0..n)
            .map(|i| PostRecord {
                id: format!("p{i}"),
                author: format!("u{i}"),
                kind: "mention".into(),
                target_user: Some(format!("u{}", i + 1)),
                parent_post: None,
                text: String::new(),
            })
            .collect();
        SocialGraph::build(&recs).unwrap()
    }

    #[test]
    fn scent_examples() {
        let i = TermVector::from_dense(&[1.0, 1.0]);
        let a = TermVector::from_dense(&[1.0, 0.0]);
        let b = TermVector::from_dense(&[1.0, 1.0]);
        assert_eq!(info_scent(&a, &a, &i), 0.0);
        assert_abs_diff_eq!(info_scent(&a, &b, &i), 1.0 - 0.5f64.sqrt(), epsilon = 1e-12);
        let t = SimilarityTable::from_values(vec![0.5, 0.8]);
        assert_abs_diff_eq!(t.scent(0, 1), 0.3, epsilon = 1e-12);
        assert_abs_diff_eq!(t.scent(1, 0), -0.3, epsilon = 1e-12);
    }

    #[test]
    fn probability_examples() {
        let t = SimilarityTable::from_values(vec![0.5, 0.6]);
        assert_eq!(selection_probabilities(&t, 0, &[1]), vec![(1, 1.0)]);

        let t = SimilarityTable::from_values(vec![0.5, 0.8, 0.6, 0.3, 0.5]);
        let p = selection_probabilities(&t, 0, &[1, 2, 3, 4]);
        assert_eq!(p.len(), 2);
        assert_abs_diff_eq!(p[0].1, 0.75, epsilon = 1e-12);
        assert_abs_diff_eq!(p[1].1, 0.25, epsilon = 1e-12);
        assert!(selection_probabilities(&t, 1, &[0, 2, 3, 4]).is_empty());
    }

    #[test]
    fn single_successor_chain_is_walked() {
        let g = chain_graph(3);
        let t = SimilarityTable::from_values(vec![0.1, 0.5, 0.9]);
        let f = Forager::new(&g, &t, PositionSpace::Raw(3));
        let p = f.build_path(1, &mut seeded(0)).unwrap();
        assert_eq!(p.edges(), &[0, 1, 2]);
        assert_eq!(p.depth(), 3);
        assert_eq!(p.fitness(), 0.9);
        assert_eq!(path_fitness(p.edges(), &t).unwrap(), 0.9);
    }

    #[test]
    fn dead_end_has_depth_one() {
        let g = chain_graph(3);
        let t = SimilarityTable::from_values(vec![0.9, 0.5, 0.1]);
        let f = Forager::new(&g, &t, PositionSpace::Raw(3));
        let p = f.build_path(1, &mut seeded(0)).unwrap();
        assert_eq!(p.edges(), &[0]);
        assert_eq!(p.fitness(), 0.9);
    }

    #[test]
    fn depth_cap_and_invalid_position() {
        let g = chain_graph(3);
        let t = SimilarityTable::from_values(vec![0.1, 0.5, 0.9]);
        let mut f = Forager::new(&g, &t, PositionSpace::Raw(3));
        f.max_depth = Some(2);
        assert_eq!(f.build_path(1, &mut seeded(0)).unwrap().depth(), 2);
        assert!(matches!(f.build_path(0, &mut seeded(0)), Err(Error::InvalidPosition { position: 0, m: 3 })));
        assert!(matches!(f.build_path(4, &mut seeded(0)), Err(Error::InvalidPosition { .. })));
        assert!(matches!(path_fitness(&[], &t), Err(Error::EmptyPath)));
    }

    #[test]
    #[should_panic(expected = "strictly increase")]
    fn path_rejects_non_improving_edge() {
        let mut p = SurfingPath::start(0, 0.5);
        p.push(1, 0.5);
    }

    #[test]
    fn ranking_dedups_terminal_edges() {
        let mut a = SurfingPath::start(0, 0.2);
        a.push(3, 0.9);
        let b = SurfingPath::start(3, 0.9);
        let c = SurfingPath::start(1, 0.4);
        let r = RankedPaths::from_candidates(vec![c, a, b.clone()], vec![0.4, 0.9, 0.9]);
        assert_eq!(r.paths.len(), 2);
        assert_eq!(r.best(), Some(&b));
        assert_eq!(r.convergence_generation(), Some(2));
        assert_eq!(RankedPaths::default().convergence_generation(), None);
    }
}
