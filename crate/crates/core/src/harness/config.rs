//! Experiment configuration.
//!
//! Settings come from a plain `key = value` file (`#` starts a comment) and
//! are then overridden by command-line flags; the last assignment wins.
//! Engine parameters are stored as overrides on top of each engine's tuned
//! defaults and resolved once the engine is known.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::baselines::{AcsParams, PsoParams};
use crate::eeholsif::{EeholsifParams, ExplorationWeighting};
use crate::eho::{EhoParams, MatriarchUpdate};
use crate::error::{Error, Result};
use crate::territory::KMeansConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Engine {
    Ehoif,
    Eeholsif,
    Acsif,
    Psoif,
}

impl Engine {
    pub const ALL: [Engine; 4] = [Engine::Ehoif, Engine::Eeholsif, Engine::Acsif, Engine::Psoif];

    pub fn name(self) -> &'static str {
        match self {
            Engine::Ehoif => "ehoif",
            Engine::Eeholsif => "eeholsif",
            Engine::Acsif => "acsif",
            Engine::Psoif => "psoif",
        }
    }
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Engine {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Engine::ALL
            .into_iter()
            .find(|e| e.name() == s.to_ascii_lowercase())
            .ok_or_else(|| Error::Config(format!("unknown engine `{s}` (expected ehoif, eeholsif, acsif or psoif)")))
    }
}

/// Engine parameter keys accepted as overrides.
pub const ENGINE_KEYS: &[&str] = &[
    "alpha",
    "beta",
    "n_clans",
    "n_per_clan",
    "max_gen",
    "dist_clan",
    "dist_elephant",
    "matriarch_update",
    "separating",
    "q0",
    "t0",
    "exploration",
    "rho",
    "n_ants",
    "c1",
    "c2",
    "inertia",
    "n_particles",
    "max_depth",
];

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub engine: Engine,
    pub corpus: Option<PathBuf>,
    /// One keyword string per query.
    pub interests: Vec<String>,
    pub seed: u64,
    pub top_n: usize,
    pub snapshot: Option<PathBuf>,
    pub no_cluster: bool,
    pub k: usize,
    pub kmeans: KMeansConfig,
    pub stopwords: Option<PathBuf>,
    pub idf_log_base: Option<f64>,
    overrides: BTreeMap<String, String>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            engine: Engine::Eeholsif,
            corpus: None,
            interests: Vec::new(),
            seed: 0,
            top_n: 10,
            snapshot: None,
            no_cluster: false,
            k: 55,
            kmeans: KMeansConfig::default(),
            stopwords: None,
            idf_log_base: None,
            overrides: BTreeMap::new(),
        }
    }
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("invalid value `{value}` for `{key}`")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value.to_ascii_lowercase().as_str() {
        "true" | "yes" | "1" | "on" => Ok(true),
        "false" | "no" | "0" | "off" => Ok(false),
        _ => Err(Error::Config(format!("invalid boolean `{value}` for `{key}`"))),
    }
}

impl ExperimentConfig {
    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let mut cfg = ExperimentConfig::default();
        cfg.apply_text(&fs::read_to_string(path)?)?;
        Ok(cfg)
    }

    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", n + 1)))?;
            self.set(k.trim(), v.trim())?;
        }
        Ok(())
    }

    /// Applies one setting. `interests` takes `;`-separated queries.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "engine" => self.engine = value.parse()?,
            "corpus" => self.corpus = Some(PathBuf::from(value)),
            "interests" => {
                self.interests = value.split(';').map(str::trim).filter(|s| !s.is_empty()).map(String::from).collect()
            }
            "interests_file" => {
                let text = fs::read_to_string(value)?;
                self.interests = text.lines().map(str::trim).filter(|s| !s.is_empty()).map(String::from).collect();
            }
            "seed" => self.seed = parse(key, value)?,
            "top_n" => self.top_n = parse(key, value)?,
            "snapshot" => self.snapshot = Some(PathBuf::from(value)),
            "no_cluster" => self.no_cluster = parse_bool(key, value)?,
            "k" => self.k = parse(key, value)?,
            "max_iter" => self.kmeans.max_iterations = parse(key, value)?,
            "restarts" => self.kmeans.restarts = parse(key, value)?,
            "wss_squared" => self.kmeans.wss_squared = parse_bool(key, value)?,
            "stopwords" => self.stopwords = Some(PathBuf::from(value)),
            "idf_log_base" => {
                self.idf_log_base = match value {
                    "e" | "ln" => None,
                    v => Some(parse(key, v)?),
                }
            }
            k if ENGINE_KEYS.contains(&k) => {
                self.overrides.insert(k.to_string(), value.to_string());
            }
            _ => return Err(Error::Config(format!("unknown configuration key `{key}`"))),
        }
        Ok(())
    }

    fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        self.overrides.get(key).map(|v| parse(key, v)).transpose()
    }

    fn apply_eho(&self, p: &mut EhoParams) -> Result<()> {
        p.seed = self.seed;
        if let Some(v) = self.get("alpha")? {
            p.alpha = v;
        }
        if let Some(v) = self.get("beta")? {
            p.beta = v;
        }
        if let Some(v) = self.get("n_clans")? {
            p.n_clans = v;
        }
        if let Some(v) = self.get("n_per_clan")? {
            p.n_per_clan = v;
        }
        if let Some(v) = self.get("max_gen")? {
            p.max_generations = v;
        }
        if let Some(v) = self.get("dist_clan")? {
            p.dist_clan = Some(v);
        }
        if let Some(v) = self.get("dist_elephant")? {
            p.dist_elephant = Some(v);
        }
        if let Some(v) = self.get("max_depth")? {
            p.max_depth = Some(v);
        }
        if let Some(v) = self.overrides.get("separating") {
            p.separating = parse_bool("separating", v)?;
        }
        if let Some(v) = self.overrides.get("matriarch_update") {
            p.matriarch_update = match v.as_str() {
                "scaled" => MatriarchUpdate::Scaled,
                "convex" => MatriarchUpdate::Convex,
                _ => return Err(Error::Config(format!("invalid matriarch_update `{v}`"))),
            };
        }
        Ok(())
    }

    pub fn ehoif_params(&self) -> Result<EhoParams> {
        let mut p = EhoParams::default();
        self.apply_eho(&mut p)?;
        p.validate()?;
        Ok(p)
    }

    pub fn eeholsif_params(&self) -> Result<EeholsifParams> {
        let mut p = EeholsifParams::default();
        self.apply_eho(&mut p.eho)?;
        if let Some(v) = self.get("q0")? {
            p.q0 = v;
        }
        if let Some(v) = self.get("t0")? {
            p.t0 = v;
        }
        if let Some(v) = self.overrides.get("exploration") {
            p.exploration = match v.as_str() {
                "proportional" => ExplorationWeighting::Proportional,
                "inverse" => ExplorationWeighting::Inverse,
                _ => return Err(Error::Config(format!("invalid exploration `{v}`"))),
            };
        }
        p.validate()?;
        Ok(p)
    }

    pub fn acsif_params(&self) -> Result<AcsParams> {
        let mut p = AcsParams { seed: self.seed, ..AcsParams::default() };
        if let Some(v) = self.get("alpha")? {
            p.alpha = v;
        }
        if let Some(v) = self.get("beta")? {
            p.beta = v;
        }
        if let Some(v) = self.get("rho")? {
            p.rho = v;
        }
        if let Some(v) = self.get("q0")? {
            p.q0 = v;
        }
        if let Some(v) = self.get("n_ants")? {
            p.n_ants = v;
        }
        if let Some(v) = self.get("max_gen")? {
            p.n_generations = v;
        }
        if let Some(v) = self.get("max_depth")? {
            p.max_depth = Some(v);
        }
        p.validate()?;
        Ok(p)
    }

    pub fn psoif_params(&self) -> Result<PsoParams> {
        let mut p = PsoParams { seed: self.seed, ..PsoParams::default() };
        if let Some(v) = self.get("c1")? {
            p.c1 = v;
        }
        if let Some(v) = self.get("c2")? {
            p.c2 = v;
        }
        if let Some(v) = self.get("inertia")? {
            p.inertia = v;
        }
        if let Some(v) = self.get("n_particles")? {
            p.n_particles = v;
        }
        if let Some(v) = self.get("max_gen")? {
            p.n_generations = v;
        }
        if let Some(v) = self.get("max_depth")? {
            p.max_depth = Some(v);
        }
        Ok(p)
    }

    /// Every setting that influences a run of the configured engine, resolved.
    pub fn echo(&self) -> Result<Vec<(String, String)>> {
        let mut out: Vec<(String, String)> = vec![
            ("engine".into(), self.engine.to_string()),
            ("seed".into(), self.seed.to_string()),
            ("top_n".into(), self.top_n.to_string()),
            ("idf_log_base".into(), self.idf_log_base.map_or("e".to_string(), |b| b.to_string())),
            ("stopwords".into(), self.stopwords.as_ref().map_or("bundled".into(), |p| p.display().to_string())),
        ];
        let opt = |v: Option<usize>| v.map_or("auto".to_string(), |x| x.to_string());
        let push_eho = |out: &mut Vec<(String, String)>, p: &EhoParams| {
            out.push(("alpha".into(), p.alpha.to_string()));
            out.push(("beta".into(), p.beta.to_string()));
            out.push(("n_clans".into(), p.n_clans.to_string()));
            out.push(("n_per_clan".into(), p.n_per_clan.to_string()));
            out.push(("max_gen".into(), p.max_generations.to_string()));
            out.push(("dist_clan".into(), opt(p.dist_clan)));
            out.push(("dist_elephant".into(), opt(p.dist_elephant)));
            out.push(("matriarch_update".into(), format!("{:?}", p.matriarch_update).to_lowercase()));
            out.push(("separating".into(), p.separating.to_string()));
            out.push(("max_depth".into(), p.max_depth.map_or("none".into(), |d| d.to_string())));
        };
        match self.engine {
            Engine::Ehoif => push_eho(&mut out, &self.ehoif_params()?),
            Engine::Eeholsif => {
                let p = self.eeholsif_params()?;
                push_eho(&mut out, &p.eho);
                out.push(("q0".into(), p.q0.to_string()));
                out.push(("t0".into(), p.t0.to_string()));
                out.push(("exploration".into(), format!("{:?}", p.exploration).to_lowercase()));
            }
            Engine::Acsif => {
                let p = self.acsif_params()?;
                out.push(("alpha".into(), p.alpha.to_string()));
                out.push(("beta".into(), p.beta.to_string()));
                out.push(("rho".into(), p.rho.to_string()));
                out.push(("q0".into(), p.q0.to_string()));
                out.push(("n_ants".into(), p.n_ants.to_string()));
                out.push(("max_gen".into(), p.n_generations.to_string()));
                out.push(("tau0".into(), "1/m".into()));
                out.push(("max_depth".into(), p.max_depth.map_or("none".into(), |d| d.to_string())));
            }
            Engine::Psoif => {
                let p = self.psoif_params()?;
                out.push(("c1".into(), p.c1.to_string()));
                out.push(("c2".into(), p.c2.to_string()));
                out.push(("inertia".into(), p.inertia.to_string()));
                out.push(("n_particles".into(), p.n_particles.to_string()));
                out.push(("max_gen".into(), p.n_generations.to_string()));
                out.push(("max_depth".into(), p.max_depth.map_or("none".into(), |d| d.to_string())));
            }
        }
        if matches!(self.engine, Engine::Eeholsif) || (self.engine == Engine::Psoif && self.snapshot.is_some()) {
            out.push(("k".into(), self.k.to_string()));
            out.push(("max_iter".into(), self.kmeans.max_iterations.to_string()));
            out.push(("restarts".into(), self.kmeans.restarts.to_string()));
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_then_flags() {
        let mut c = ExperimentConfig::default();
        c.apply_text("engine = ehoif\n# comment\nalpha = 0.3\ninterests = a b; c d\n").unwrap();
        c.set("alpha", "0.6").unwrap();
        assert_eq!(c.engine, Engine::Ehoif);
        assert_eq!(c.interests, vec!["a b", "c d"]);
        assert_eq!(c.ehoif_params().unwrap().alpha, 0.6);
        assert_eq!(c.ehoif_params().unwrap().beta, 0.4);
    }

    #[test]
    fn eeholsif_defaults_echo() {
        let c = ExperimentConfig::default();
        let echo: BTreeMap<_, _> = c.echo().unwrap().into_iter().collect();
        for (k, v) in [("alpha", "0.5"), ("beta", "0.5"), ("n_clans", "5"), ("n_per_clan", "50"), ("max_gen", "25"), ("q0", "0.75"), ("t0", "6")] {
            assert_eq!(echo[k], v, "{k}");
        }
    }

    #[test]
    fn rejects_bad_input() {
        let mut c = ExperimentConfig::default();
        assert!(matches!(c.set("engine", "gwo"), Err(Error::Config(_))));
        assert!(matches!(c.set("bogus", "1"), Err(Error::Config(_))));
        assert!(c.apply_text("no equals sign").is_err());
        c.set("alpha", "x").unwrap();
        assert!(c.ehoif_params().is_err());
        c.set("alpha", "2").unwrap();
        assert!(c.ehoif_params().unwrap_err().is_usage());
    }
}
