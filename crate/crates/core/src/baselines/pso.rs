use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::eho::PositionBounds;
use crate::error::{Error, Result};
use crate::foraging::{push_best, Forager, RankedPaths, SurfingPath};
use crate::rng::stream;

const STREAM_INIT: u64 = 0;
const STREAM_PATH: u64 = 1;
const STREAM_MOVE: u64 = 2;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PsoParams {
    pub c1: f64,
    pub c2: f64,
    pub inertia: f64,
    pub n_particles: usize,
    pub n_generations: usize,
    pub seed: u64,
    pub max_depth: Option<usize>,
}

impl Default for PsoParams {
    fn default() -> Self {
        PsoParams {
            c1: 1.5,
            c2: 0.4,
            inertia: 0.7,
            n_particles: 600,
            n_generations: 90,
            seed: 0,
            max_depth: None,
        }
    }
}

#[derive(Debug, Clone)]
struct Particle {
    position: usize,
    velocity: f64,
    best_position: usize,
    best_fitness: f64,
    path: Option<SurfingPath>,
}

/// `w * v + c1 * r1 * (pbest - x) + c2 * r2 * (gbest - x)`
pub fn pso_velocity(params: &PsoParams, x: f64, v: f64, pbest: f64, gbest: f64, r1: f64, r2: f64) -> f64 {
    params.inertia * v + params.c1 * r1 * (pbest - x) + params.c2 * r2 * (gbest - x)
}

pub fn run_psoif(forager: &Forager<'_>, params: &PsoParams) -> Result<RankedPaths> {
    run_psoif_observed(forager, params, &mut |_, _| {})
}

/// Runs PSO over the forager's position space; `observer` sees every particle
/// position after each move.
pub fn run_psoif_observed(
    forager: &Forager<'_>,
    params: &PsoParams,
    observer: &mut dyn FnMut(usize, &[usize]),
) -> Result<RankedPaths> {
    if params.n_particles == 0 {
        return Err(Error::InvalidParameter("n_particles must be positive".into()));
    }
    if params.n_generations == 0 {
        return Ok(RankedPaths::default());
    }
    let m = forager.m();
    let bounds = PositionBounds::new(m);
    let vmax = m as f64;
    let mut forager = *forager;
    forager.max_depth = params.max_depth.or(forager.max_depth);

    let mut init = stream(params.seed, &[STREAM_INIT]);
    let mut swarm: Vec<Particle> = (0..params.n_particles)
        .map(|_| {
            let position = init.gen_range(1..=m);
            Particle {
                position,
                velocity: init.gen_range(-0.1..=0.1) * vmax,
                best_position: position,
                best_fitness: f64::NEG_INFINITY,
                path: None,
            }
        })
        .collect();
    let mut gbest: Option<(usize, f64)> = None;
    let mut candidates = Vec::new();
    let mut curve = Vec::with_capacity(params.n_generations);

    for generation in 1..=params.n_generations {
        swarm.par_iter_mut().enumerate().try_for_each(|(i, p)| -> Result<()> {
            let mut rng = stream(params.seed, &[STREAM_PATH, generation as u64, i as u64]);
            let path = forager.build_path(p.position, &mut rng)?;
            if path.fitness() > p.best_fitness {
                p.best_fitness = path.fitness();
                p.best_position = p.position;
            }
            p.path = Some(path);
            Ok(())
        })?;

        let (leader, _) = swarm
            .iter()
            .enumerate()
            .max_by(|a, b| {
                let fa = a.1.path.as_ref().unwrap().fitness();
                let fb = b.1.path.as_ref().unwrap().fitness();
                fa.total_cmp(&fb).then(b.0.cmp(&a.0))
            })
            .unwrap();
        let gen_best = swarm[leader].path.clone().unwrap();
        if gbest.is_none_or(|(_, f)| gen_best.fitness() > f) {
            gbest = Some((swarm[leader].position, gen_best.fitness()));
        }
        push_best(&mut curve, gen_best.fitness());
        candidates.push(gen_best);

        let g = gbest.unwrap().0 as f64;
        swarm.par_iter_mut().enumerate().for_each(|(i, p)| {
            let mut rng = stream(params.seed, &[STREAM_MOVE, generation as u64, i as u64]);
            let (r1, r2): (f64, f64) = (rng.gen(), rng.gen());
            let x = p.position as f64;
            p.velocity = pso_velocity(params, x, p.velocity, p.best_position as f64, g, r1, r2).clamp(-vmax, vmax);
            p.position = bounds.discretize(x + p.velocity);
        });
        let positions: Vec<usize> = swarm.iter().map(|p| p.position).collect();
        observer(generation, &positions);
    }
    Ok(RankedPaths::from_candidates(candidates, curve))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn velocity_examples() {
        let p = PsoParams::default();
        assert_eq!(pso_velocity(&p, 10.0, 0.0, 10.0, 10.0, 0.3, 0.9), 0.0);
        let still = PsoParams { c1: 0.0, c2: 0.0, inertia: 0.0, ..p.clone() };
        assert_eq!(pso_velocity(&still, 10.0, 5.0, 40.0, 90.0, 0.5, 0.5), 0.0);
        let v = pso_velocity(&p, 10.0, 2.0, 20.0, 30.0, 0.5, 0.5);
        assert!((v - (0.7 * 2.0 + 1.5 * 0.5 * 10.0 + 0.4 * 0.5 * 20.0)).abs() < 1e-12);
    }
}
