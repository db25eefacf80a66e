//! Elephant herding optimization adapted to information foraging (EHOIF).
//!
//! Each elephant sits on an integer position in `[1, m]`, builds a surfing
//! path from there every generation, and is scored by the similarity of the
//! path's last post. Between generations the clan operators move elephants
//! toward their matriarch, relocate the matriarch, and replace the worst
//! elephant with a random newcomer.

use std::collections::HashSet;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::foraging::{push_best, Forager, RankedPaths, SurfingPath};
use crate::rng::{stream, SearchRng};

/// How the matriarch is relocated from the average-fitness elephant's position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MatriarchUpdate {
    /// `x_avg * beta`
    Scaled,
    /// `x_best + beta * (x_avg - x_best)`
    Convex,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EhoParams {
    pub alpha: f64,
    pub beta: f64,
    pub n_clans: usize,
    pub n_per_clan: usize,
    pub max_generations: usize,
    /// Minimum gap between clan seeds; `m / (2 * n_clans)` when unset.
    pub dist_clan: Option<usize>,
    /// Maximum gap between a clan member and its seed; `m / (10 * n_clans)` when unset.
    pub dist_elephant: Option<usize>,
    pub seed: u64,
    pub matriarch_update: MatriarchUpdate,
    /// Disables the separating operator when false.
    pub separating: bool,
    pub max_depth: Option<usize>,
}

impl Default for EhoParams {
    /// Tuned values for the adapted algorithm: alpha 0.9, beta 0.4, 8 clans of 90, 40 generations.
    fn default() -> Self {
        EhoParams {
            alpha: 0.9,
            beta: 0.4,
            n_clans: 8,
            n_per_clan: 90,
            max_generations: 40,
            dist_clan: None,
            dist_elephant: None,
            seed: 0,
            matriarch_update: MatriarchUpdate::Scaled,
            separating: true,
            max_depth: None,
        }
    }
}

impl EhoParams {
    pub fn validate(&self) -> Result<()> {
        let unit = |name: &str, v: f64| {
            if (0.0..=1.0).contains(&v) {
                Ok(())
            } else {
                Err(Error::InvalidParameter(format!("{name} = {v} is outside [0, 1]")))
            }
        };
        unit("alpha", self.alpha)?;
        unit("beta", self.beta)?;
        if self.n_clans == 0 || self.n_per_clan == 0 {
            return Err(Error::InvalidParameter("n_clans and n_per_clan must be positive".into()));
        }
        Ok(())
    }

    pub fn dist_clan_for(&self, m: usize) -> usize {
        self.dist_clan.unwrap_or(m / (2 * self.n_clans))
    }

    pub fn dist_elephant_for(&self, m: usize) -> usize {
        self.dist_elephant.unwrap_or(m / (10 * self.n_clans))
    }
}

/// Inclusive position bounds `[min, max]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PositionBounds {
    pub min: usize,
    pub max: usize,
}

impl PositionBounds {
    pub fn new(m: usize) -> Self {
        assert!(m >= 1, "position space must be non-empty");
        PositionBounds { min: 1, max: m }
    }

    /// Rounds half up, then clamps.
    pub fn discretize(&self, x: f64) -> usize {
        let r = (x + 0.5).floor();
        if r <= self.min as f64 {
            self.min
        } else if r >= self.max as f64 {
            self.max
        } else {
            r as usize
        }
    }

    pub fn contains(&self, x: usize) -> bool {
        (self.min..=self.max).contains(&x)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Elephant {
    pub position: usize,
    pub path: Option<SurfingPath>,
    pub fitness: f64,
}

impl Elephant {
    pub fn at(position: usize) -> Self {
        Elephant {
            position,
            path: None,
            fitness: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Clan {
    pub id: usize,
    pub members: Vec<Elephant>,
    pub best_solution: Option<SurfingPath>,
}

impl Clan {
    pub fn new(id: usize, positions: impl IntoIterator<Item = usize>) -> Self {
        Clan {
            id,
            members: positions.into_iter().map(Elephant::at).collect(),
            best_solution: None,
        }
    }

    /// Index of the highest-fitness member, lowest index on ties.
    pub fn matriarch(&self) -> usize {
        let mut best = 0;
        for (i, e) in self.members.iter().enumerate().skip(1) {
            if e.fitness > self.members[best].fitness {
                best = i;
            }
        }
        best
    }

    pub fn positions(&self) -> Vec<usize> {
        self.members.iter().map(|e| e.position).collect()
    }

    /// Best path built this generation, if members have been evaluated.
    pub fn generation_best(&self) -> Option<&SurfingPath> {
        self.members[self.matriarch()].path.as_ref()
    }

    /// Replaces `best_solution` when `candidate` is strictly fitter; returns whether it did.
    pub fn offer_best(&mut self, candidate: &SurfingPath) -> bool {
        let better = self.best_solution.as_ref().is_none_or(|b| candidate.fitness() > b.fitness());
        if better {
            self.best_solution = Some(candidate.clone());
        }
        better
    }
}

/// Seeds `n_clans` clans at least `dist_clan` apart, then fills each with
/// distinct positions within `dist_elephant` of its seed.
pub fn init_population<R: Rng + ?Sized>(params: &EhoParams, m: usize, rng: &mut R) -> Result<Vec<Clan>> {
    params.validate()?;
    let total = params.n_clans * params.n_per_clan;
    if total > m {
        return Err(Error::Unsatisfiable(format!("{total} elephants need distinct positions but m = {m}")));
    }
    let dist_clan = params.dist_clan_for(m);
    let dist_elephant = params.dist_elephant_for(m);
    if params.n_clans > 1 && (params.n_clans - 1) * dist_clan >= m {
        return Err(Error::Unsatisfiable(format!(
            "distClan = {dist_clan} cannot separate {} clans over {m} positions",
            params.n_clans
        )));
    }
    if params.n_per_clan > 2 * dist_elephant + 1 {
        return Err(Error::Unsatisfiable(format!(
            "distElephant = {dist_elephant} leaves room for {} members, {} requested",
            2 * dist_elephant + 1,
            params.n_per_clan
        )));
    }

    'attempt: for _ in 0..200 {
        let mut seeds: Vec<usize> = Vec::with_capacity(params.n_clans);
        let mut tries = 0;
        while seeds.len() < params.n_clans {
            tries += 1;
            if tries > 10_000 {
                continue 'attempt;
            }
            let s = rng.gen_range(1..=m);
            if seeds.iter().all(|&o| o.abs_diff(s) >= dist_clan.max(1)) {
                seeds.push(s);
            }
        }
        let mut used: HashSet<usize> = seeds.iter().copied().collect();
        let mut clans = Vec::with_capacity(params.n_clans);
        for (id, &s) in seeds.iter().enumerate() {
            let lo = s.saturating_sub(dist_elephant).max(1);
            let hi = (s + dist_elephant).min(m);
            let free: Vec<usize> = (lo..=hi).filter(|p| !used.contains(p)).collect();
            let need = params.n_per_clan - 1;
            if free.len() < need {
                continue 'attempt;
            }
            let mut positions = vec![s];
            for i in rand::seq::index::sample(rng, free.len(), need) {
                positions.push(free[i]);
            }
            used.extend(positions.iter().copied());
            clans.push(Clan::new(id, positions));
        }
        return Ok(clans);
    }
    Err(Error::Unsatisfiable(format!(
        "no placement found with distClan = {dist_clan}, distElephant = {dist_elephant}"
    )))
}

/// Pulls every non-matriarch toward the matriarch: `x + alpha * (x_best - x) * r`.
pub fn update_positions<R: Rng + ?Sized>(clan: &mut Clan, alpha: f64, bounds: PositionBounds, rng: &mut R) {
    let mi = clan.matriarch();
    let best = clan.members[mi].position as f64;
    for (i, e) in clan.members.iter_mut().enumerate() {
        let r: f64 = rng.gen();
        if i == mi {
            continue;
        }
        e.position = update_position(e.position, best, alpha, r, bounds);
    }
}

/// Single-elephant form of [`update_positions`] with `r` supplied.
pub fn update_position(x: usize, x_best: f64, alpha: f64, r: f64, bounds: PositionBounds) -> usize {
    let x = x as f64;
    bounds.discretize(x + alpha * (x_best - x) * r)
}

/// Position of the member whose fitness is closest to the clan mean, lowest index on ties.
pub fn average_position(clan: &Clan) -> usize {
    let n = clan.members.len() as f64;
    let avg = clan.members.iter().map(|e| e.fitness).sum::<f64>() / n;
    let mut pick = 0;
    for (i, e) in clan.members.iter().enumerate().skip(1) {
        if (e.fitness - avg).abs() < (clan.members[pick].fitness - avg).abs() {
            pick = i;
        }
    }
    clan.members[pick].position
}

/// Relocates the matriarch from the average-fitness elephant's position.
pub fn update_matriarch(clan: &mut Clan, beta: f64, mode: MatriarchUpdate, bounds: PositionBounds) {
    let x_avg = average_position(clan) as f64;
    let mi = clan.matriarch();
    let x_best = clan.members[mi].position as f64;
    let raw = match mode {
        MatriarchUpdate::Scaled => x_avg * beta,
        MatriarchUpdate::Convex => x_best + beta * (x_avg - x_best),
    };
    clan.members[mi].position = bounds.discretize(raw);
}

/// Replaces the worst member (never the matriarch of a multi-member clan) by a
/// newcomer at `x_min + (x_max - x_min + 1) * r`. Returns the replaced index.
pub fn separate_worst<R: Rng + ?Sized>(clan: &mut Clan, bounds: PositionBounds, rng: &mut R) -> usize {
    let r: f64 = rng.gen();
    separate_worst_with(clan, bounds, r)
}

pub fn separate_worst_with(clan: &mut Clan, bounds: PositionBounds, r: f64) -> usize {
    let mi = clan.matriarch();
    let mut worst: Option<usize> = None;
    for (i, e) in clan.members.iter().enumerate() {
        if i == mi && clan.members.len() > 1 {
            continue;
        }
        if worst.is_none_or(|w| e.fitness < clan.members[w].fitness) {
            worst = Some(i);
        }
    }
    let w = worst.expect("clans are non-empty");
    let raw = bounds.min as f64 + (bounds.max - bounds.min + 1) as f64 * r;
    clan.members[w] = Elephant::at(bounds.discretize(raw));
    w
}

/// Which step of a generation an observation follows.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Evaluated,
    PositionsUpdated,
    MatriarchUpdated,
    Separated,
    Migrated,
}

/// Snapshot handed to run observers after each step of each clan.
#[derive(Debug, Clone, PartialEq)]
pub struct Observation {
    pub generation: usize,
    pub clan: usize,
    pub stage: Stage,
    pub positions: Vec<usize>,
    /// Stagnation counter (always 0 for EHOIF).
    pub stagnation: usize,
    /// Territory the clan occupies (EEHOLSIF only).
    pub territory: Option<usize>,
}

pub(crate) const STREAM_INIT: u64 = 0;
pub(crate) const STREAM_PATH: u64 = 1;
pub(crate) const STREAM_OPS: u64 = 2;

/// Builds a path and fitness for every elephant of every clan.
pub(crate) fn evaluate<'c>(
    forager: &Forager<'_>,
    clans: impl IntoParallelIterator<Item = &'c mut Clan>,
    seed: u64,
    generation: usize,
) -> Result<()> {
    clans.into_par_iter().try_for_each(|clan| {
        let cid = clan.id as u64;
        clan.members.par_iter_mut().enumerate().try_for_each(|(j, e)| {
            let mut rng = stream(seed, &[STREAM_PATH, generation as u64, cid, j as u64]);
            let path = forager.build_path(e.position, &mut rng)?;
            e.fitness = path.fitness();
            e.path = Some(path);
            Ok(())
        })
    })
}

pub(crate) fn ops_rng(seed: u64, generation: usize, clan: usize) -> SearchRng {
    stream(seed, &[STREAM_OPS, generation as u64, clan as u64])
}

/// Runs EHOIF over raw or semantic positions.
pub fn run_ehoif(forager: &Forager<'_>, params: &EhoParams) -> Result<RankedPaths> {
    run_ehoif_observed(forager, params, &mut |_| {})
}

pub fn run_ehoif_observed(
    forager: &Forager<'_>,
    params: &EhoParams,
    observer: &mut dyn FnMut(Observation),
) -> Result<RankedPaths> {
    params.validate()?;
    if params.max_generations == 0 {
        return Ok(RankedPaths::default());
    }
    let m = forager.m();
    let bounds = PositionBounds::new(m);
    let mut forager = *forager;
    forager.max_depth = params.max_depth.or(forager.max_depth);
    let mut clans = init_population(params, m, &mut stream(params.seed, &[STREAM_INIT]))?;

    let mut candidates = Vec::new();
    let mut curve = Vec::with_capacity(params.max_generations);
    for generation in 1..=params.max_generations {
        evaluate(&forager, &mut clans, params.seed, generation)?;
        let mut gen_best = f64::NEG_INFINITY;
        for clan in &mut clans {
            let best = clan.generation_best().expect("evaluated").clone();
            gen_best = gen_best.max(best.fitness());
            clan.offer_best(&best);
            candidates.push(best);
            observe(observer, generation, clan, Stage::Evaluated);

            let mut rng = ops_rng(params.seed, generation, clan.id);
            update_positions(clan, params.alpha, bounds, &mut rng);
            observe(observer, generation, clan, Stage::PositionsUpdated);
            update_matriarch(clan, params.beta, params.matriarch_update, bounds);
            observe(observer, generation, clan, Stage::MatriarchUpdated);
            if params.separating {
                separate_worst(clan, bounds, &mut rng);
                observe(observer, generation, clan, Stage::Separated);
            }
        }
        push_best(&mut curve, gen_best);
    }
    Ok(RankedPaths::from_candidates(candidates, curve))
}

fn observe(observer: &mut dyn FnMut(Observation), generation: usize, clan: &Clan, stage: Stage) {
    observer(Observation {
        generation,
        clan: clan.id,
        stage,
        positions: clan.positions(),
        stagnation: 0,
        territory: None,
    });
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;

    fn clan_with(fitness: &[f64], positions: &[usize]) -> Clan {
        let mut c = Clan::new(0, positions.iter().copied());
        for (e, &f) in c.members.iter_mut().zip(fitness) {
            e.fitness = f;
        }
        c
    }

    #[test]
    fn discretize_rounds_half_up_and_clamps() {
        let b = PositionBounds::new(100);
        assert_eq!(b.discretize(19.5), 20);
        assert_eq!(b.discretize(19.49), 19);
        assert_eq!(b.discretize(0.2), 1);
        assert_eq!(b.discretize(-3.0), 1);
        assert_eq!(b.discretize(101.0), 100);
    }

    #[test]
    fn position_update_examples() {
        let b = PositionBounds::new(100);
        assert_eq!(update_position(10, 50.0, 0.5, 0.5, b), 20);
        assert_eq!(update_position(50, 50.0, 0.9, 0.7, b), 50);
        assert_eq!(update_position(10, 50.0, 0.0, 0.7, b), 10);

        let mut c = clan_with(&[0.1, 0.9, 0.3], &[5, 60, 90]);
        update_positions(&mut c, 0.0, b, &mut seeded(1));
        assert_eq!(c.positions(), vec![5, 60, 90]);
        update_positions(&mut c, 1.0, b, &mut seeded(1));
        assert_eq!(c.positions()[1], 60);
        assert!(c.positions()[0] >= 5 && c.positions()[0] <= 60);
        assert!(c.positions()[2] >= 60 && c.positions()[2] <= 90);
    }

    #[test]
    fn matriarch_update_examples() {
        let b = PositionBounds::new(1000);
        let c = clan_with(&[0.5, 0.5, 0.5], &[7, 8, 9]);
        assert_eq!(average_position(&c), 7);
        let c = clan_with(&[0.2, 0.4, 0.9], &[10, 20, 30]);
        assert_eq!(average_position(&c), 20);

        let mut c = clan_with(&[0.2, 0.5, 0.9], &[10, 100, 300]);
        update_matriarch(&mut c, 0.4, MatriarchUpdate::Scaled, b);
        assert_eq!(c.members[2].position, 40);

        let mut c = clan_with(&[0.2, 0.5, 0.9], &[10, 100, 300]);
        update_matriarch(&mut c, 0.4, MatriarchUpdate::Convex, b);
        assert_eq!(c.members[2].position, 220);

        let mut c = clan_with(&[0.9, 0.9], &[1, 2]);
        update_matriarch(&mut c, 0.1, MatriarchUpdate::Scaled, b);
        assert_eq!(c.members[0].position, 1);
    }

    #[test]
    fn separation_examples() {
        let b = PositionBounds::new(100);
        let mut c = clan_with(&[0.5, 0.1, 0.9], &[10, 20, 30]);
        let w = separate_worst_with(&mut c, b, 0.0);
        assert_eq!(w, 1);
        assert_eq!(c.members[1].position, 1);
        assert_eq!(c.members.len(), 3);

        let mut c = clan_with(&[0.5, 0.1, 0.9], &[10, 20, 30]);
        separate_worst_with(&mut c, b, 0.999_999);
        assert_eq!(c.members[1].position, 100);

        // matriarch is protected even when every fitness ties
        let mut c = clan_with(&[0.3, 0.3], &[10, 20]);
        assert_eq!(separate_worst_with(&mut c, b, 0.5), 1);
    }

    #[test]
    fn separation_is_structural() {
        let b = PositionBounds::new(500);
        let mut rng = seeded(5);
        for _ in 0..100 {
            let fit: Vec<f64> = (0..6).map(|_| rng.gen()).collect();
            let mut c = clan_with(&fit, &[1, 2, 3, 4, 5, 6]);
            let worst = (0..6).min_by(|&a, &b| fit[a].total_cmp(&fit[b])).unwrap();
            let w = separate_worst(&mut c, b, &mut rng);
            assert_eq!(w, worst);
            assert_eq!(c.members.len(), 6);
            assert!(c.members[w].path.is_none());
            assert!(b.contains(c.members[w].position));
        }
    }

    #[test]
    fn init_population_cases() {
        let p = EhoParams { n_clans: 1, n_per_clan: 1, ..Default::default() };
        let clans = init_population(&p, 50, &mut seeded(0)).unwrap();
        assert_eq!(clans.len(), 1);
        assert_eq!(clans[0].members.len(), 1);

        let p = EhoParams { n_clans: 3, n_per_clan: 20, dist_clan: Some(1000), ..Default::default() };
        for s in 0..100 {
            let clans = init_population(&p, 4000, &mut seeded(s)).unwrap();
            let seeds: Vec<usize> = clans.iter().map(|c| c.members[0].position).collect();
            for i in 0..3 {
                for j in i + 1..3 {
                    assert!(seeds[i].abs_diff(seeds[j]) >= 1000);
                }
            }
            let all: HashSet<usize> = clans.iter().flat_map(|c| c.positions()).collect();
            assert_eq!(all.len(), 60);
            for c in &clans {
                for &x in &c.positions() {
                    assert!(x.abs_diff(c.members[0].position) <= p.dist_elephant_for(4000));
                }
            }
        }
        assert_eq!(init_population(&p, 4000, &mut seeded(3)).unwrap(), init_population(&p, 4000, &mut seeded(3)).unwrap());

        let p = EhoParams { n_clans: 5, n_per_clan: 50, ..Default::default() };
        assert!(matches!(init_population(&p, 100, &mut seeded(0)), Err(Error::Unsatisfiable(_))));
        let p = EhoParams { n_clans: 2, n_per_clan: 10, dist_elephant: Some(2), ..Default::default() };
        assert!(matches!(init_population(&p, 1000, &mut seeded(0)), Err(Error::Unsatisfiable(m)) if m.contains("distElephant")));
        let p = EhoParams { alpha: 1.5, ..Default::default() };
        assert!(matches!(init_population(&p, 1000, &mut seeded(0)), Err(Error::InvalidParameter(_))));
    }
}
