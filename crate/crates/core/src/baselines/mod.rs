//! Ant colony system and particle swarm baselines for comparison runs.

mod acs;
mod pso;

pub use acs::{run_acsif, AcsColony, AcsParams};
pub use pso::{pso_velocity, run_psoif, run_psoif_observed, PsoParams};
