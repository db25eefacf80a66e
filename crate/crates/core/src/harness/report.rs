//! Report files.
//!
//! For a report written to `run.csv` the siblings are:
//!
//! * `run.csv`: one row per query
//! * `run.curves.csv`: best fitness per generation, long format
//! * `run.params.txt`: `key = value` parameter echo with the corpus digest
//! * `run.timing.csv`: search wall time per query
//!
//! Wall times live in their own file so that the other three are
//! byte-identical across runs with the same seed, configuration and corpus.
//! Floats are written in shortest round-trip form.

use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

use super::experiment::{QueryRow, RunReport};

const ROW_HEADER: [&str; 9] = [
    "query",
    "interests",
    "score",
    "depth",
    "convergence_generation",
    "generations",
    "path_edges",
    "path_posts",
    "path_texts",
];

/// Paths of the four report files for a report at `path`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReportPaths {
    pub rows: PathBuf,
    pub curves: PathBuf,
    pub params: PathBuf,
    pub timing: PathBuf,
}

impl ReportPaths {
    pub fn new(path: impl AsRef<Path>) -> Self {
        let path = path.as_ref();
        let sibling = |suffix: &str| path.with_extension(suffix);
        ReportPaths {
            rows: sibling("csv"),
            curves: sibling("curves.csv"),
            params: sibling("params.txt"),
            timing: sibling("timing.csv"),
        }
    }
}

fn bad(file: &Path, what: impl std::fmt::Display) -> Error {
    Error::Config(format!("{}: {what}", file.display()))
}

pub fn write_report(report: &RunReport, path: impl AsRef<Path>) -> Result<ReportPaths> {
    let paths = ReportPaths::new(path);

    let mut w = csv::Writer::from_path(&paths.rows)?;
    w.write_record(ROW_HEADER)?;
    for r in &report.rows {
        let edges: Vec<String> = r.path_edges.iter().map(|e| e.to_string()).collect();
        w.write_record([
            r.query.to_string(),
            r.interests.clone(),
            r.score.to_string(),
            r.depth.to_string(),
            r.convergence_generation.map_or(String::new(), |g| g.to_string()),
            r.generations.to_string(),
            edges.join(" "),
            serde_json::to_string(&r.path_posts)?,
            serde_json::to_string(&r.path_texts)?,
        ])?;
    }
    w.flush()?;

    let mut w = csv::Writer::from_path(&paths.curves)?;
    w.write_record(["query", "generation", "best_fitness"])?;
    for r in &report.rows {
        for (g, v) in r.curve.iter().enumerate() {
            w.write_record([r.query.to_string(), (g + 1).to_string(), v.to_string()])?;
        }
    }
    w.flush()?;

    let mut w = csv::Writer::from_path(&paths.timing)?;
    w.write_record(["query", "wall_time_s"])?;
    for r in &report.rows {
        w.write_record([r.query.to_string(), r.wall_time.to_string()])?;
    }
    w.flush()?;

    let mut params = format!("corpus_digest = {}\n", report.corpus_digest);
    for (k, v) in &report.params {
        params.push_str(&format!("{k} = {v}\n"));
    }
    fs::write(&paths.params, params)?;
    Ok(paths)
}

fn field<T: std::str::FromStr>(file: &Path, rec: &csv::StringRecord, i: usize) -> Result<T> {
    let s = rec.get(i).ok_or_else(|| bad(file, format!("missing column {i}")))?;
    s.parse().map_err(|_| bad(file, format!("cannot parse `{s}`")))
}

/// Reads back a report written by [`write_report`]. The timing file is optional.
pub fn read_report(path: impl AsRef<Path>) -> Result<RunReport> {
    let paths = ReportPaths::new(path);

    let mut params = Vec::new();
    let mut digest = String::new();
    for line in fs::read_to_string(&paths.params)?.lines() {
        let (k, v) = line.split_once(" = ").ok_or_else(|| bad(&paths.params, "expected key = value"))?;
        if k == "corpus_digest" {
            digest = v.to_string();
        } else {
            params.push((k.to_string(), v.to_string()));
        }
    }
    let lookup = |key: &str| {
        params
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.clone())
            .ok_or_else(|| bad(&paths.params, format!("missing `{key}`")))
    };
    let engine = lookup("engine")?.parse()?;
    let seed = lookup("seed")?.parse().map_err(|_| bad(&paths.params, "bad seed"))?;

    let mut rows = Vec::new();
    let file = &paths.rows;
    for rec in csv::Reader::from_path(file)?.records() {
        let rec = rec?;
        let conv = rec.get(4).unwrap_or("");
        let edges = rec.get(6).unwrap_or("");
        rows.push(QueryRow {
            query: field(file, &rec, 0)?,
            interests: rec.get(1).unwrap_or("").to_string(),
            score: field(file, &rec, 2)?,
            depth: field(file, &rec, 3)?,
            convergence_generation: if conv.is_empty() { None } else { Some(field(file, &rec, 4)?) },
            generations: field(file, &rec, 5)?,
            path_edges: edges
                .split_whitespace()
                .map(|e| e.parse().map_err(|_| bad(file, format!("bad edge id `{e}`"))))
                .collect::<Result<_>>()?,
            path_posts: serde_json::from_str(rec.get(7).unwrap_or("[]"))?,
            path_texts: serde_json::from_str(rec.get(8).unwrap_or("[]"))?,
            curve: Vec::new(),
            wall_time: 0.0,
        });
    }

    for rec in csv::Reader::from_path(&paths.curves)?.records() {
        let rec = rec?;
        let q: usize = field(&paths.curves, &rec, 0)?;
        let v: f64 = field(&paths.curves, &rec, 2)?;
        let row = rows
            .iter_mut()
            .find(|r| r.query == q)
            .ok_or_else(|| bad(&paths.curves, format!("curve for unknown query {q}")))?;
        row.curve.push(v);
    }

    if paths.timing.exists() {
        for rec in csv::Reader::from_path(&paths.timing)?.records() {
            let rec = rec?;
            let q: usize = field(&paths.timing, &rec, 0)?;
            if let Some(row) = rows.iter_mut().find(|r| r.query == q) {
                row.wall_time = field(&paths.timing, &rec, 1)?;
            }
        }
    }

    Ok(RunReport {
        engine,
        seed,
        corpus_digest: digest,
        params,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::config::Engine;

    fn report(rows: Vec<QueryRow>) -> RunReport {
        RunReport {
            engine: Engine::Ehoif,
            seed: 3,
            corpus_digest: "abc".into(),
            params: vec![("engine".into(), "ehoif".into()), ("seed".into(), "3".into()), ("alpha".into(), "0.9".into())],
            rows,
        }
    }

    #[test]
    fn empty_report_is_header_only() {
        let dir = tempfile::tempdir().unwrap();
        let paths = write_report(&report(vec![]), dir.path().join("r.csv")).unwrap();
        assert_eq!(fs::read_to_string(&paths.rows).unwrap().lines().count(), 1);
        assert_eq!(read_report(&paths.rows).unwrap(), report(vec![]));
    }

    #[test]
    fn one_query_round_trips_exactly() {
        let dir = tempfile::tempdir().unwrap();
        let row = QueryRow {
            query: 0,
            interests: "machin learn".into(),
            score: 0.1 + 0.2,
            depth: 2,
            convergence_generation: Some(3),
            generations: 4,
            path_edges: vec![7, 2],
            path_posts: vec!["p7".into(), "p,2".into()],
            path_texts: vec!["a \"quoted\" text".into(), "line\nbreak".into()],
            curve: vec![0.1, 1.0 / 3.0, 0.1 + 0.2, 0.1 + 0.2],
            wall_time: 0.015625,
        };
        let r = report(vec![row]);
        let paths = write_report(&r, dir.path().join("r.csv")).unwrap();
        assert_eq!(fs::read_to_string(&paths.curves).unwrap().lines().count(), 5);
        assert_eq!(read_report(&paths.rows).unwrap(), r);
    }
}
