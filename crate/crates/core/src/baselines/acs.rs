use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::foraging::{push_best, Forager, RankedPaths, SurfingPath};
use crate::graph::EdgeId;
use crate::rng::stream;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AcsParams {
    /// Pheromone exponent.
    pub alpha: f64,
    /// Scent exponent.
    pub beta: f64,
    /// Evaporation rate, used for both local and global updates.
    pub rho: f64,
    pub q0: f64,
    pub n_ants: usize,
    pub n_generations: usize,
    pub seed: u64,
    pub max_depth: Option<usize>,
}

impl Default for AcsParams {
    fn default() -> Self {
        AcsParams {
            alpha: 0.2,
            beta: 0.4,
            rho: 0.8,
            q0: 0.8,
            n_ants: 50,
            n_generations: 50,
            seed: 0,
            max_depth: None,
        }
    }
}

impl AcsParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.rho > 0.0 && self.rho <= 1.0) {
            return Err(Error::InvalidParameter(format!("rho = {} is outside (0, 1]", self.rho)));
        }
        if !(0.0..=1.0).contains(&self.q0) {
            return Err(Error::InvalidParameter(format!("q0 = {} is outside [0, 1]", self.q0)));
        }
        if self.n_ants == 0 {
            return Err(Error::InvalidParameter("n_ants must be positive".into()));
        }
        Ok(())
    }
}

/// Pheromone on content edges, initialised to `tau0 = 1 / m`.
#[derive(Debug, Clone, PartialEq)]
pub struct AcsColony {
    pub tau: Vec<f64>,
    pub tau0: f64,
    params: AcsParams,
}

impl AcsColony {
    pub fn new(m: usize, params: AcsParams) -> Self {
        let tau0 = 1.0 / m as f64;
        AcsColony {
            tau: vec![tau0; m],
            tau0,
            params,
        }
    }

    fn desirability(&self, edge: EdgeId, scent: f64) -> f64 {
        self.tau[edge].powf(self.params.alpha) * scent.powf(self.params.beta)
    }

    /// One ant's walk over positive-scent neighbors. With probability `q0` the
    /// most desirable neighbor is taken, otherwise a desirability-weighted draw.
    pub fn construct<R: Rng + ?Sized>(&self, forager: &Forager<'_>, start: EdgeId, rng: &mut R) -> SurfingPath {
        let table = forager.table;
        let mut path = SurfingPath::start(start, table.sim(start));
        let mut neighbors = Vec::new();
        let mut current = start;
        loop {
            if forager.max_depth.is_some_and(|d| path.depth() >= d) {
                return path;
            }
            forager.graph.adjacent_into(current, &mut neighbors).expect("path edges belong to the graph");
            let options: Vec<(EdgeId, f64)> = neighbors
                .iter()
                .filter(|n| !path.edges().contains(n))
                .map(|&n| (n, table.scent(current, n)))
                .filter(|&(_, s)| s > 0.0)
                .map(|(n, s)| (n, self.desirability(n, s)))
                .collect();
            if options.is_empty() {
                return path;
            }
            let q: f64 = rng.gen();
            let next = if q < self.params.q0 {
                options
                    .iter()
                    .copied()
                    .max_by(|a, b| a.1.total_cmp(&b.1).then(b.0.cmp(&a.0)))
                    .unwrap()
                    .0
            } else {
                let total: f64 = options.iter().map(|o| o.1).sum();
                let u = rng.gen::<f64>() * total;
                let mut acc = 0.0;
                options
                    .iter()
                    .find(|o| {
                        acc += o.1;
                        u < acc
                    })
                    .unwrap_or(options.last().unwrap())
                    .0
            };
            path.push(next, table.sim(next));
            current = next;
        }
    }

    /// Decays visited edges toward `tau0`.
    pub fn local_update(&mut self, path: &SurfingPath) {
        let rho = self.params.rho;
        for &e in &path.edges()[1..] {
            self.tau[e] = (1.0 - rho) * self.tau[e] + rho * self.tau0;
        }
    }

    /// Reinforces the best path's edges with its fitness.
    pub fn global_update(&mut self, best: &SurfingPath) {
        let rho = self.params.rho;
        let deposit = best.fitness();
        for &e in best.edges() {
            self.tau[e] = (1.0 - rho) * self.tau[e] + rho * deposit;
        }
    }
}

pub fn run_acsif(forager: &Forager<'_>, params: &AcsParams) -> Result<RankedPaths> {
    params.validate()?;
    if params.n_generations == 0 {
        return Ok(RankedPaths::default());
    }
    let m = forager.m();
    let mut forager = *forager;
    forager.max_depth = params.max_depth.or(forager.max_depth);
    let mut colony = AcsColony::new(m, params.clone());
    let mut best: Option<SurfingPath> = None;
    let mut candidates = Vec::new();
    let mut curve = Vec::with_capacity(params.n_generations);

    for generation in 1..=params.n_generations {
        let paths: Vec<SurfingPath> = (0..params.n_ants)
            .into_par_iter()
            .map(|ant| {
                let mut rng = stream(params.seed, &[generation as u64, ant as u64]);
                let start = rng.gen_range(0..m);
                colony.construct(&forager, start, &mut rng)
            })
            .collect();
        for p in &paths {
            colony.local_update(p);
        }
        let gen_best = paths
            .into_iter()
            .max_by(|a, b| a.fitness().total_cmp(&b.fitness()).then(b.terminal().cmp(&a.terminal())))
            .expect("at least one ant");
        if best.as_ref().is_none_or(|b| gen_best.fitness() > b.fitness()) {
            best = Some(gen_best.clone());
        }
        colony.global_update(best.as_ref().unwrap());
        push_best(&mut curve, gen_best.fitness());
        candidates.push(gen_best);
    }
    Ok(RankedPaths::from_candidates(candidates, curve))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::foraging::{PositionSpace, SimilarityTable};
    use crate::graph::{PostRecord, SocialGraph};
    use crate::rng::seeded;

    fn chain(n: usize) -> SocialGraph {
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
    fn single_positive_neighbor_always_chosen() {
        let g = chain(3);
        let t = SimilarityTable::from_values(vec![0.1, 0.5, 0.2]);
        let f = Forager::new(&g, &t, PositionSpace::Raw(3));
        let colony = AcsColony::new(3, AcsParams { q0: 0.0, ..Default::default() });
        let mut rng = seeded(4);
        for _ in 0..100 {
            assert_eq!(colony.construct(&f, 0, &mut rng).edges(), &[0, 1]);
        }
    }

    #[test]
    fn global_update_reinforces_best_path() {
        let g = chain(5);
        let t = SimilarityTable::from_values(vec![0.1, 0.3, 0.5, 0.7, 0.9]);
        let f = Forager::new(&g, &t, PositionSpace::Raw(5));
        let mut colony = AcsColony::new(5, AcsParams::default());
        let p = colony.construct(&f, 0, &mut seeded(0));
        assert_eq!(p.edges(), &[0, 1, 2, 3, 4]);
        colony.local_update(&p);
        colony.global_update(&p);
        for &e in p.edges() {
            assert!(colony.tau[e] > colony.tau0);
        }
    }

    #[test]
    fn zero_generations_and_bad_rho() {
        let g = chain(2);
        let t = SimilarityTable::from_values(vec![0.1, 0.2]);
        let f = Forager::new(&g, &t, PositionSpace::Raw(2));
        let r = run_acsif(&f, &AcsParams { n_generations: 0, ..Default::default() }).unwrap();
        assert!(r.paths.is_empty());
        assert!(run_acsif(&f, &AcsParams { rho: 0.0, ..Default::default() }).is_err());
    }

    #[test]
    fn pheromone_stays_positive_and_bounded() {
        let g = chain(6);
        let t = SimilarityTable::from_values(vec![0.1, 0.3, 0.2, 0.7, 0.4, 0.9]);
        let f = Forager::new(&g, &t, PositionSpace::Raw(6));
        let mut colony = AcsColony::new(6, AcsParams::default());
        let mut rng = seeded(1);
        for _ in 0..200 {
            let start = rng.gen_range(0..6);
            let p = colony.construct(&f, start, &mut rng);
            colony.local_update(&p);
            colony.global_update(&p);
            assert!(colony.tau.iter().all(|&x| x > 0.0 && x <= 1.0f64.max(colony.tau0)));
        }
    }
}
