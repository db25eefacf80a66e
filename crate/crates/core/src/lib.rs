//! Information foraging on social graphs.
//!
//! Posts shared between users form the search space. Text is modeled with
//! TF-IDF, posts are grouped into territories with medoid k-means, and
//! surfing paths toward a user's interests are searched with an adapted
//! elephant herding optimizer (EHOIF), its territory-aware enhancement
//! (EEHOLSIF), and ant colony / particle swarm baselines.

pub mod baselines;
pub mod eeholsif;
pub mod eho;
pub mod error;
pub mod foraging;
pub mod graph;
pub mod harness;
pub mod rng;
pub mod stopwords;
pub mod territory;
pub mod text;

pub use error::{Error, Result};
