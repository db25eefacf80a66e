//! Enhanced EHO for large-scale information foraging (EEHOLSIF).
//!
//! Positions are semantic: each territory owns a contiguous position range
//! ordered by distance to its centroid. Clans are placed on a territory chosen
//! by a pseudo-random proportional rule over interest-to-centroid distances,
//! and a clan that fails to improve its best solution for `t0` consecutive
//! generations migrates to another territory. Path construction itself is
//! unbounded, so elephants may walk into neighboring territories.

use std::collections::BTreeSet;

use rand::seq::index::sample;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::eho::{
    evaluate, ops_rng, separate_worst, update_matriarch, update_positions, Clan, EhoParams, Observation,
    PositionBounds, Stage, STREAM_INIT,
};
use crate::error::{Error, Result};
use crate::foraging::{push_best, Forager, PositionSpace, RankedPaths, SimilarityTable};
use crate::graph::SocialGraph;
use crate::rng::stream;
use crate::territory::{Clustering, Territory};
use crate::text::{euclidean_distance, TermVector};

const STREAM_MIGRATE: u64 = 3;

/// Territory weights used when the exploration branch of clan placement fires.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExplorationWeighting {
    /// Probability proportional to the interest-to-centroid distance.
    Proportional,
    /// Probability proportional to the inverse distance.
    Inverse,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EeholsifParams {
    pub eho: EhoParams,
    pub q0: f64,
    pub t0: usize,
    pub exploration: ExplorationWeighting,
}

impl Default for EeholsifParams {
    /// alpha 0.5, beta 0.5, 5 clans of 50, 25 generations, q0 0.75, t0 6.
    fn default() -> Self {
        EeholsifParams {
            eho: EhoParams {
                alpha: 0.5,
                beta: 0.5,
                n_clans: 5,
                n_per_clan: 50,
                max_generations: 25,
                ..EhoParams::default()
            },
            q0: 0.75,
            t0: 6,
            exploration: ExplorationWeighting::Proportional,
        }
    }
}

impl EeholsifParams {
    pub fn validate(&self) -> Result<()> {
        self.eho.validate()?;
        if !(0.0..=1.0).contains(&self.q0) {
            return Err(Error::InvalidParameter(format!("q0 = {} is outside [0, 1]", self.q0)));
        }
        if self.t0 == 0 {
            return Err(Error::InvalidParameter("t0 must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClanState {
    pub clan: Clan,
    pub territory: usize,
    /// Consecutive generations without improving the clan's best solution.
    pub stagnation: usize,
}

impl ClanState {
    pub fn best_fitness(&self) -> Option<f64> {
        self.clan.best_solution.as_ref().map(|p| p.fitness())
    }
}

/// Euclidean distance from the interests to each territory's centroid post.
pub fn territory_distances(graph: &SocialGraph, clustering: &Clustering, interest: &TermVector) -> Vec<f64> {
    clustering
        .territories
        .iter()
        .map(|t| euclidean_distance(interest, &graph.content_edges()[t.centroid_edge].vector))
        .collect()
}

/// With probability `q0` the nearest territory, otherwise a weighted draw.
pub fn choose_territory<R: Rng + ?Sized>(
    distances: &[f64],
    q0: f64,
    weighting: ExplorationWeighting,
    rng: &mut R,
) -> usize {
    assert!(!distances.is_empty(), "at least one territory");
    let q: f64 = rng.gen();
    if q < q0 {
        return argmin(distances);
    }
    let weights = exploration_probabilities(distances, weighting);
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    for (j, w) in weights.iter().enumerate() {
        acc += w;
        if u < acc {
            return j;
        }
    }
    weights.iter().rposition(|&w| w > 0.0).unwrap_or(distances.len() - 1)
}

fn argmin(xs: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in xs.iter().enumerate().skip(1) {
        if x < xs[best] {
            best = i;
        }
    }
    best
}

/// Probabilities of the exploration branch; uniform when all weights vanish.
pub fn exploration_probabilities(distances: &[f64], weighting: ExplorationWeighting) -> Vec<f64> {
    let raw: Vec<f64> = match weighting {
        ExplorationWeighting::Proportional => distances.to_vec(),
        ExplorationWeighting::Inverse => distances
            .iter()
            .map(|&d| if d > 0.0 { 1.0 / d } else { f64::INFINITY })
            .collect(),
    };
    if raw.iter().any(|w| w.is_infinite()) {
        let n = raw.iter().filter(|w| w.is_infinite()).count() as f64;
        return raw.iter().map(|w| if w.is_infinite() { 1.0 / n } else { 0.0 }).collect();
    }
    let total: f64 = raw.iter().sum();
    if total <= 0.0 {
        return vec![1.0 / distances.len() as f64; distances.len()];
    }
    raw.iter().map(|w| w / total).collect()
}

/// Draws `n` positions inside `territory`, kept within `dist_elephant` of a
/// seed when the range allows and distinct when the territory is large enough.
fn positions_in<R: Rng + ?Sized>(
    territory: &Territory,
    n: usize,
    dist_elephant: usize,
    taken_seeds: &[usize],
    dist_clan: usize,
    rng: &mut R,
) -> Vec<usize> {
    let (lo, hi) = territory.position_range;
    let mut seed = rng.gen_range(lo..=hi);
    for _ in 0..100 {
        if taken_seeds.iter().all(|&s| s.abs_diff(seed) >= dist_clan) {
            break;
        }
        seed = rng.gen_range(lo..=hi);
    }
    let wlo = seed.saturating_sub(dist_elephant).max(lo);
    let whi = (seed + dist_elephant).min(hi);
    let (wlo, whi) = if whi - wlo + 1 >= n { (wlo, whi) } else { (lo, hi) };
    let span = whi - wlo + 1;
    let mut out = vec![seed];
    if span >= n {
        let others: Vec<usize> = (wlo..=whi).filter(|&p| p != seed).collect();
        out.extend(sample(rng, others.len(), n - 1).into_iter().map(|i| others[i]));
    } else {
        out.extend((1..n).map(|_| rng.gen_range(wlo..=whi)));
    }
    out
}

/// Places every clan on a territory and draws its positions there.
pub fn place_clans<R: Rng + ?Sized>(
    graph: &SocialGraph,
    clustering: &Clustering,
    interest: &TermVector,
    params: &EeholsifParams,
    rng: &mut R,
) -> Result<Vec<ClanState>> {
    params.validate()?;
    if clustering.territories.is_empty() {
        return Err(Error::InvalidParameter("clustering has no territories".into()));
    }
    let m = clustering.m();
    let distances = territory_distances(graph, clustering, interest);
    let dist_elephant = params.eho.dist_elephant_for(m);
    let dist_clan = params.eho.dist_clan_for(m);
    let mut seeds_by_territory: Vec<Vec<usize>> = vec![Vec::new(); clustering.territories.len()];
    let mut out = Vec::with_capacity(params.eho.n_clans);
    for id in 0..params.eho.n_clans {
        let t = choose_territory(&distances, params.q0, params.exploration, rng);
        let positions = positions_in(
            &clustering.territories[t],
            params.eho.n_per_clan,
            dist_elephant,
            &seeds_by_territory[t],
            dist_clan,
            rng,
        );
        seeds_by_territory[t].push(positions[0]);
        out.push(ClanState {
            clan: Clan::new(id, positions),
            territory: t,
            stagnation: 0,
        });
    }
    Ok(out)
}

/// Moves a stagnant clan to a uniformly chosen other territory, keeping its
/// best solution and resetting its stagnation counter.
pub fn migrate_clan<R: Rng + ?Sized>(state: &mut ClanState, clustering: &Clustering, params: &EeholsifParams, rng: &mut R) {
    state.stagnation = 0;
    let k = clustering.territories.len();
    if k < 2 {
        return;
    }
    let mut target = rng.gen_range(0..k - 1);
    if target >= state.territory {
        target += 1;
    }
    let m = clustering.m();
    let positions = positions_in(
        &clustering.territories[target],
        state.clan.members.len(),
        params.eho.dist_elephant_for(m),
        &[],
        0,
        rng,
    );
    for (e, p) in state.clan.members.iter_mut().zip(positions) {
        e.position = p;
        e.path = None;
        e.fitness = 0.0;
    }
    state.territory = target;
}

/// Territories sharing at least one pair of adjacent content edges.
pub fn neighbor_territories(graph: &SocialGraph, clustering: &Clustering) -> Vec<BTreeSet<usize>> {
    let mut out = vec![BTreeSet::new(); clustering.territories.len()];
    for user in 0..graph.users().len() {
        let ts: BTreeSet<usize> = graph
            .incident_edges(user)
            .iter()
            .filter_map(|&e| clustering.assignment[e])
            .collect();
        for &a in &ts {
            for &b in &ts {
                if a != b {
                    out[a].insert(b);
                }
            }
        }
    }
    out
}

pub fn run_eeholsif(
    graph: &SocialGraph,
    table: &SimilarityTable,
    clustering: &Clustering,
    interest: &TermVector,
    params: &EeholsifParams,
) -> Result<RankedPaths> {
    run_eeholsif_observed(graph, table, clustering, interest, params, &mut |_| {})
}

pub fn run_eeholsif_observed(
    graph: &SocialGraph,
    table: &SimilarityTable,
    clustering: &Clustering,
    interest: &TermVector,
    params: &EeholsifParams,
    observer: &mut dyn FnMut(Observation),
) -> Result<RankedPaths> {
    params.validate()?;
    if clustering.m() != graph.content_len() {
        return Err(Error::SnapshotMismatch(format!(
            "clustering covers {} edges, graph has {}",
            clustering.m(),
            graph.content_len()
        )));
    }
    if params.eho.max_generations == 0 {
        return Ok(RankedPaths::default());
    }
    let seed = params.eho.seed;
    let mut forager = Forager::new(graph, table, PositionSpace::Semantic(clustering));
    forager.max_depth = params.eho.max_depth;
    let bounds = PositionBounds::new(clustering.m());
    let mut states = place_clans(graph, clustering, interest, params, &mut stream(seed, &[STREAM_INIT]))?;

    let mut candidates = Vec::new();
    let mut curve = Vec::with_capacity(params.eho.max_generations);
    for generation in 1..=params.eho.max_generations {
        evaluate(&forager, states.par_iter_mut().map(|s| &mut s.clan), seed, generation)?;
        let mut gen_best = f64::NEG_INFINITY;
        for state in &mut states {
            let best = state.clan.generation_best().expect("evaluated").clone();
            gen_best = gen_best.max(best.fitness());
            if state.clan.offer_best(&best) {
                state.stagnation = 0;
            } else {
                state.stagnation += 1;
            }
            candidates.push(best);
            observe(observer, generation, state, Stage::Evaluated);

            let mut rng = ops_rng(seed, generation, state.clan.id);
            if state.stagnation >= params.t0 {
                let mut mrng = stream(seed, &[STREAM_MIGRATE, generation as u64, state.clan.id as u64]);
                migrate_clan(state, clustering, params, &mut mrng);
                observe(observer, generation, state, Stage::Migrated);
            } else {
                update_positions(&mut state.clan, params.eho.alpha, bounds, &mut rng);
                observe(observer, generation, state, Stage::PositionsUpdated);
                update_matriarch(&mut state.clan, params.eho.beta, params.eho.matriarch_update, bounds);
                observe(observer, generation, state, Stage::MatriarchUpdated);
                if params.eho.separating {
                    separate_worst(&mut state.clan, bounds, &mut rng);
                    observe(observer, generation, state, Stage::Separated);
                }
            }
        }
        push_best(&mut curve, gen_best);
    }
    Ok(RankedPaths::from_candidates(candidates, curve))
}

fn observe(observer: &mut dyn FnMut(Observation), generation: usize, state: &ClanState, stage: Stage) {
    observer(Observation {
        generation,
        clan: state.clan.id,
        stage,
        positions: state.clan.positions(),
        stagnation: state.stagnation,
        territory: Some(state.territory),
    });
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;
    use approx::assert_abs_diff_eq;

    #[test]
    fn exploration_weights() {
        let p = exploration_probabilities(&[1.0, 3.0], ExplorationWeighting::Proportional);
        assert_abs_diff_eq!(p[0], 0.25);
        assert_abs_diff_eq!(p[1], 0.75);
        let p = exploration_probabilities(&[1.0, 3.0], ExplorationWeighting::Inverse);
        assert_abs_diff_eq!(p[0], 0.75);
        assert_abs_diff_eq!(p[1], 0.25);
        assert_eq!(exploration_probabilities(&[0.0, 0.0], ExplorationWeighting::Proportional), vec![0.5, 0.5]);
    }

    #[test]
    fn q0_one_always_exploits() {
        let mut rng = seeded(1);
        for _ in 0..200 {
            assert_eq!(choose_territory(&[2.0, 0.5, 3.0], 1.0, ExplorationWeighting::Proportional, &mut rng), 1);
        }
    }

    #[test]
    fn q0_zero_follows_distance_weights() {
        let mut rng = seeded(2);
        let n = 20_000;
        let far = (0..n)
            .filter(|_| choose_territory(&[1.0, 3.0], 0.0, ExplorationWeighting::Proportional, &mut rng) == 1)
            .count();
        assert_abs_diff_eq!(far as f64 / n as f64, 0.75, epsilon = 0.015);
    }

    #[test]
    fn params_default_and_validation() {
        let p = EeholsifParams::default();
        assert_eq!((p.eho.alpha, p.eho.beta, p.eho.n_clans, p.eho.n_per_clan, p.eho.max_generations), (0.5, 0.5, 5, 50, 25));
        assert_eq!((p.q0, p.t0), (0.75, 6));
        assert!(EeholsifParams { t0: 0, ..p.clone() }.validate().is_err());
        assert!(EeholsifParams { q0: 1.1, ..p }.validate().is_err());
    }
}
