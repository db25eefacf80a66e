use std::fs;
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::graph::{EdgeKind, PostRecord, SocialGraph};

/// A loaded corpus plus bookkeeping about the lines that were skipped.
#[derive(Debug)]
pub struct Ingested {
    pub graph: SocialGraph,
    /// Non-blank lines read.
    pub lines: usize,
    pub malformed: usize,
    /// Hex SHA-256 of the file bytes.
    pub digest: String,
    pub warnings: Vec<String>,
}

/// Parses JSON Lines records; blank lines are skipped, unparsable lines and
/// lines naming an unknown edge kind or empty ids are counted as malformed.
pub fn parse_records(content: &str) -> (Vec<PostRecord>, usize, usize) {
    let mut records = Vec::new();
    let (mut lines, mut malformed) = (0, 0);
    for line in content.lines() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        lines += 1;
        match serde_json::from_str::<PostRecord>(line) {
            Ok(r) if r.kind.parse::<EdgeKind>().is_ok() && !r.id.is_empty() && !r.author.is_empty() => records.push(r),
            _ => malformed += 1,
        }
    }
    (records, lines, malformed)
}

pub fn digest(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Reads a JSON Lines corpus and builds its graph. More than 10% malformed
/// lines aborts the load.
pub fn ingest(path: impl AsRef<Path>) -> Result<Ingested> {
    let bytes = fs::read(path)?;
    let content = String::from_utf8_lossy(&bytes);
    let (records, lines, malformed) = parse_records(&content);
    if malformed * 10 > lines {
        return Err(Error::TooManyMalformed { malformed, total: lines });
    }
    let graph = SocialGraph::build(&records)?;
    let mut warnings = Vec::new();
    if lines == 0 {
        warnings.push("corpus is empty".to_string());
    }
    if malformed > 0 {
        warnings.push(format!("{malformed} malformed lines skipped"));
    }
    if graph.dangling_parents() > 0 {
        warnings.push(format!("{} records reference unseen parent posts", graph.dangling_parents()));
    }
    Ok(Ingested {
        graph,
        lines,
        malformed,
        digest: digest(&bytes),
        warnings,
    })
}
