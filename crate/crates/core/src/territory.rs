//! Territory definition: medoid-style k-means over post vectors, the WSS elbow
//! statistic, and semantic position assignment.
//!
//! Centroids are always real posts. Each update computes the member mean and
//! moves the centroid to the member nearest that mean. Posts with an empty
//! vector never join a cluster; they sit in an overflow territory whose
//! positions follow every real territory.

use std::fs;
use std::path::Path;

use rand::seq::index::sample;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::EdgeId;
use crate::text::{euclidean_distance, TermVector};

const SNAPSHOT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KMeansConfig {
    pub max_iterations: usize,
    /// Independent runs per call; the lowest-WSS clustering is kept.
    pub restarts: usize,
    /// Sum squared distances in WSS instead of plain distances.
    pub wss_squared: bool,
}

impl Default for KMeansConfig {
    fn default() -> Self {
        KMeansConfig {
            max_iterations: 100,
            restarts: 1,
            wss_squared: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Territory {
    pub cluster_id: usize,
    pub centroid_edge: EdgeId,
    pub members: Vec<EdgeId>,
    /// Inclusive semantic position range `[lo, hi]`.
    pub position_range: (usize, usize),
}

impl Territory {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains_position(&self, position: usize) -> bool {
        (self.position_range.0..=self.position_range.1).contains(&position)
    }
}

/// Posts with empty vectors, placed after all territories.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Overflow {
    pub members: Vec<EdgeId>,
    pub position_range: (usize, usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Clustering {
    pub k: usize,
    pub territories: Vec<Territory>,
    pub overflow: Option<Overflow>,
    /// edge id -> cluster id; `None` for overflow posts
    pub assignment: Vec<Option<usize>>,
    /// edge id -> semantic position in `[1, m]`
    positions: Vec<usize>,
    /// position - 1 -> edge id
    edges_by_position: Vec<EdgeId>,
    pub converged: bool,
    pub iterations: usize,
}

impl Clustering {
    pub fn m(&self) -> usize {
        self.assignment.len()
    }

    pub fn position_of(&self, edge: EdgeId) -> usize {
        self.positions[edge]
    }

    pub fn edge_at(&self, position: usize) -> Option<EdgeId> {
        position.checked_sub(1).and_then(|i| self.edges_by_position.get(i)).copied()
    }

    /// Position-ordered edge ids, index `p - 1` holding position `p`.
    pub fn edges_by_position(&self) -> &[EdgeId] {
        &self.edges_by_position
    }

    pub fn territory_of_position(&self, position: usize) -> Option<usize> {
        self.territories.iter().position(|t| t.contains_position(position))
    }

    pub fn save(&self, path: impl AsRef<Path>, corpus_digest: &str) -> Result<()> {
        let snap = Snapshot {
            version: SNAPSHOT_VERSION,
            corpus_digest: corpus_digest.to_string(),
            clustering: self.clone(),
        };
        fs::write(path, serde_json::to_vec(&snap)?)?;
        Ok(())
    }

    /// Loads a snapshot, checking version, corpus digest and edge count.
    pub fn load(path: impl AsRef<Path>, corpus_digest: &str, m: usize) -> Result<Self> {
        let snap: Snapshot = serde_json::from_slice(&fs::read(path)?)?;
        if snap.version != SNAPSHOT_VERSION {
            return Err(Error::SnapshotMismatch(format!("version {} != {}", snap.version, SNAPSHOT_VERSION)));
        }
        if snap.corpus_digest != corpus_digest {
            return Err(Error::SnapshotMismatch("corpus digest differs".into()));
        }
        if snap.clustering.m() != m {
            return Err(Error::SnapshotMismatch(format!("{} edges in snapshot, {} in corpus", snap.clustering.m(), m)));
        }
        Ok(snap.clustering)
    }
}

#[derive(Serialize, Deserialize)]
struct Snapshot {
    version: u32,
    corpus_digest: String,
    clustering: Clustering,
}

fn eligible(vectors: &[TermVector]) -> Vec<EdgeId> {
    (0..vectors.len()).filter(|&i| !vectors[i].is_empty()).collect()
}

/// Draws `k` distinct centroid posts uniformly from posts with non-empty vectors.
pub fn init_centroids<R: Rng + ?Sized>(vectors: &[TermVector], k: usize, rng: &mut R) -> Result<Vec<EdgeId>> {
    let pool = eligible(vectors);
    if k == 0 || k > pool.len() {
        return Err(Error::TooManyClusters { k, eligible: pool.len() });
    }
    Ok(sample(rng, pool.len(), k).into_iter().map(|i| pool[i]).collect())
}

/// Nearest-centroid assignment; ties go to the lowest cluster id.
pub fn assign_clusters(vectors: &[TermVector], centroids: &[EdgeId]) -> Vec<Option<usize>> {
    assert!(!centroids.is_empty(), "at least one centroid required");
    vectors
        .par_iter()
        .map(|v| {
            if v.is_empty() {
                return None;
            }
            let mut best = 0;
            let mut best_d = f64::INFINITY;
            for (j, &c) in centroids.iter().enumerate() {
                let d = euclidean_distance(v, &vectors[c]);
                if d < best_d {
                    best_d = d;
                    best = j;
                }
            }
            Some(best)
        })
        .collect()
}

/// The member closest to the members' mean vector; ties go to the lowest edge id.
pub fn update_centroid(vectors: &[TermVector], members: &[EdgeId]) -> Option<EdgeId> {
    let mean = TermVector::mean(members.iter().map(|&e| &vectors[e]));
    members
        .iter()
        .map(|&e| (euclidean_distance(&vectors[e], &mean), e))
        .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)))
        .map(|(_, e)| e)
}

fn members_of(assignment: &[Option<usize>], k: usize) -> Vec<Vec<EdgeId>> {
    let mut out = vec![Vec::new(); k];
    for (e, a) in assignment.iter().enumerate() {
        if let Some(c) = a {
            out[*c].push(e);
        }
    }
    out
}

/// Re-seeds each empty cluster with the post farthest from the centroid of the
/// currently largest cluster.
fn repair_empty(vectors: &[TermVector], centroids: &mut [EdgeId], assignment: &mut [Option<usize>]) {
    let k = centroids.len();
    loop {
        let members = members_of(assignment, k);
        let Some(empty) = members.iter().position(Vec::is_empty) else {
            return;
        };
        let largest = (0..k).max_by(|&a, &b| members[a].len().cmp(&members[b].len()).then(b.cmp(&a))).unwrap();
        let centre = &vectors[centroids[largest]];
        let far = members[largest]
            .iter()
            .map(|&e| (euclidean_distance(&vectors[e], centre), e))
            .max_by(|a, b| a.0.total_cmp(&b.0).then(b.1.cmp(&a.1)))
            .map(|(_, e)| e)
            .expect("largest cluster is non-empty");
        centroids[empty] = far;
        assignment[far] = Some(empty);
    }
}

/// Runs k-means until the assignment stops changing or `max_iterations` passes.
pub fn run_kmeans<R: Rng + ?Sized>(
    vectors: &[TermVector],
    k: usize,
    config: &KMeansConfig,
    rng: &mut R,
) -> Result<Clustering> {
    let mut best: Option<(f64, Clustering)> = None;
    for _ in 0..config.restarts.max(1) {
        let c = run_once(vectors, k, config.max_iterations, rng)?;
        let score = wss(&c, vectors, config.wss_squared);
        if best.as_ref().is_none_or(|(b, _)| score < *b) {
            best = Some((score, c));
        }
    }
    Ok(best.expect("at least one run").1)
}

fn run_once<R: Rng + ?Sized>(vectors: &[TermVector], k: usize, max_iterations: usize, rng: &mut R) -> Result<Clustering> {
    let mut centroids = init_centroids(vectors, k, rng)?;
    let mut assignment = assign_clusters(vectors, &centroids);
    repair_empty(vectors, &mut centroids, &mut assignment);

    let mut iterations = 0;
    let mut converged = false;
    while iterations < max_iterations {
        iterations += 1;
        let members = members_of(&assignment, k);
        centroids = members
            .par_iter()
            .zip(centroids.par_iter())
            .map(|(m, &old)| update_centroid(vectors, m).unwrap_or(old))
            .collect();
        let mut next = assign_clusters(vectors, &centroids);
        repair_empty(vectors, &mut centroids, &mut next);
        if next == assignment {
            converged = true;
            break;
        }
        assignment = next;
    }

    let territories = members_of(&assignment, k)
        .into_iter()
        .zip(centroids)
        .enumerate()
        .map(|(cluster_id, (members, c))| {
            let centroid_edge = if members.contains(&c) {
                c
            } else {
                // duplicate vectors can pull a centroid's own post elsewhere
                update_centroid(vectors, &members).expect("repaired clusters are non-empty")
            };
            Territory {
                cluster_id,
                centroid_edge,
                members,
                position_range: (0, 0),
            }
        })
        .collect();
    let overflow: Vec<EdgeId> = (0..vectors.len()).filter(|&e| assignment[e].is_none()).collect();
    let mut clustering = Clustering {
        k,
        territories,
        overflow: (!overflow.is_empty()).then_some(Overflow {
            members: overflow,
            position_range: (0, 0),
        }),
        assignment,
        positions: Vec::new(),
        edges_by_position: Vec::new(),
        converged,
        iterations,
    };
    assign_semantic_positions(&mut clustering, vectors);
    Ok(clustering)
}

/// Within-cluster sum of post-to-centroid distances (squared when asked).
/// Overflow posts are excluded.
pub fn wss(clustering: &Clustering, vectors: &[TermVector], squared: bool) -> f64 {
    clustering
        .territories
        .iter()
        .map(|t| {
            let c = &vectors[t.centroid_edge];
            t.members
                .iter()
                .map(|&e| {
                    let d = euclidean_distance(&vectors[e], c);
                    if squared {
                        d * d
                    } else {
                        d
                    }
                })
                .sum::<f64>()
        })
        .sum()
}

/// One clustering and WSS per requested k, in input order.
pub fn scan_k<R: Rng + ?Sized>(
    vectors: &[TermVector],
    k_values: &[usize],
    config: &KMeansConfig,
    rng: &mut R,
) -> Result<Vec<(usize, f64)>> {
    if k_values.is_empty() {
        return Err(Error::InvalidParameter("k_values must be non-empty".into()));
    }
    k_values
        .iter()
        .map(|&k| {
            let c = run_kmeans(vectors, k, config, rng)?;
            Ok((k, wss(&c, vectors, config.wss_squared)))
        })
        .collect()
}

/// Lays territories out consecutively by cluster id; inside each, positions
/// ascend with distance to the centroid (ties by edge id). Overflow posts come last.
pub fn assign_semantic_positions(clustering: &mut Clustering, vectors: &[TermVector]) {
    let m = clustering.assignment.len();
    let mut order = Vec::with_capacity(m);
    for t in &mut clustering.territories {
        let c = &vectors[t.centroid_edge];
        let mut keyed: Vec<(f64, EdgeId)> = t.members.iter().map(|&e| (euclidean_distance(&vectors[e], c), e)).collect();
        keyed.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let lo = order.len() + 1;
        order.extend(keyed.iter().map(|&(_, e)| e));
        t.members = keyed.into_iter().map(|(_, e)| e).collect();
        t.position_range = (lo, order.len());
    }
    if let Some(o) = &mut clustering.overflow {
        let lo = order.len() + 1;
        o.members.sort_unstable();
        order.extend(o.members.iter().copied());
        o.position_range = (lo, order.len());
    }
    let mut positions = vec![0; m];
    for (i, &e) in order.iter().enumerate() {
        positions[e] = i + 1;
    }
    clustering.positions = positions;
    clustering.edges_by_position = order;
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// 1-D points embedded as (x, 1) so that x = 0 is not an empty vector.
    fn line(xs: &[f64]) -> Vec<TermVector> {
        xs.iter().map(|&x| TermVector::from_dense(&[x, 1.0])).collect()
    }

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    #[test]
    fn init_centroids_cases() {
        let v = line(&[1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0, 10.0]);
        let mut all = init_centroids(&v, 10, &mut rng(1)).unwrap();
        all.sort();
        assert_eq!(all, (0..10).collect::<Vec<_>>());
        assert_eq!(init_centroids(&v, 1, &mut rng(1)).unwrap().len(), 1);
        assert_eq!(init_centroids(&v, 3, &mut rng(42)).unwrap(), init_centroids(&v, 3, &mut rng(42)).unwrap());
        assert!(matches!(init_centroids(&v, 11, &mut rng(1)), Err(Error::TooManyClusters { k: 11, eligible: 10 })));

        let mut with_empty = v.clone();
        with_empty.push(TermVector::default());
        for s in 0..20 {
            assert!(!init_centroids(&with_empty, 10, &mut rng(s)).unwrap().contains(&10));
        }
    }

    #[test]
    fn assign_cases() {
        let v = line(&[0.0, 1.0, 10.0, 11.0]);
        assert_eq!(assign_clusters(&v, &[0, 2]), vec![Some(0), Some(0), Some(1), Some(1)]);
        // point 5 equidistant from 0 and 10
        let v = line(&[0.0, 10.0, 5.0]);
        assert_eq!(assign_clusters(&v, &[0, 1])[2], Some(0));
        assert_eq!(assign_clusters(&v, &[1, 0])[2], Some(0));
        assert_eq!(assign_clusters(&v, &[2, 0])[2], Some(0));
    }

    #[test]
    fn update_centroid_cases() {
        let v = line(&[0.0, 1.0]);
        assert_eq!(update_centroid(&v, &[1]), Some(1));
        assert_eq!(update_centroid(&v, &[0, 1]), Some(0));
        assert_eq!(update_centroid(&v, &[]), None);
        let v = vec![
            TermVector::from_dense(&[1.0, 0.0]),
            TermVector::from_dense(&[0.0, 1.0]),
            TermVector::from_dense(&[1.0, 1.0]),
        ];
        assert_eq!(update_centroid(&v, &[0, 1, 2]), Some(2));
        let mean = TermVector::from_dense(&[2.0 / 3.0, 2.0 / 3.0]);
        assert_abs_diff_eq!(euclidean_distance(&v[2], &mean), (2.0f64 / 9.0).sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(euclidean_distance(&v[0], &mean), (5.0f64 / 9.0).sqrt(), epsilon = 1e-12);
    }

    #[test]
    fn kmeans_line_fixture_every_seed() {
        let v = line(&[0.0, 1.0, 10.0, 11.0]);
        for seed in 0..50 {
            let c = run_kmeans(&v, 2, &KMeansConfig::default(), &mut rng(seed)).unwrap();
            assert!(c.converged);
            let mut groups: Vec<Vec<usize>> = c.territories.iter().map(|t| {
                let mut m = t.members.clone();
                m.sort();
                m
            }).collect();
            groups.sort();
            assert_eq!(groups, vec![vec![0, 1], vec![2, 3]]);
            assert_abs_diff_eq!(wss(&c, &v, false), 2.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn kmeans_k1_and_zero_iterations() {
        let v = line(&[0.0, 1.0, 10.0, 11.0]);
        let c = run_kmeans(&v, 1, &KMeansConfig::default(), &mut rng(3)).unwrap();
        assert_eq!(c.territories[0].len(), 4);
        assert!(c.converged);
        assert_eq!(c.iterations, 1);

        let cfg = KMeansConfig { max_iterations: 0, ..Default::default() };
        let c = run_kmeans(&v, 2, &cfg, &mut rng(3)).unwrap();
        assert!(!c.converged);
        assert_eq!(c.iterations, 0);
    }

    #[test]
    fn wss_examples() {
        let v = line(&[0.0, 1.0, 10.0, 11.0]);
        let c = run_kmeans(&v, 4, &KMeansConfig::default(), &mut rng(0)).unwrap();
        assert_eq!(wss(&c, &v, false), 0.0);
        assert_eq!(scan_k(&v, &[4], &KMeansConfig::default(), &mut rng(0)).unwrap(), vec![(4, 0.0)]);
        let v = line(&[0.0, 2.0]);
        let c = run_kmeans(&v, 1, &KMeansConfig::default(), &mut rng(0)).unwrap();
        assert_eq!(wss(&c, &v, false), 2.0);
        assert_eq!(wss(&c, &v, true), 4.0);
        assert!(scan_k(&v, &[], &KMeansConfig::default(), &mut rng(0)).is_err());
    }

    #[test]
    fn positions_layout() {
        let mut v = line(&[11.0, 0.0, 10.0, 1.0, 12.0]);
        v.push(TermVector::default());
        let c = run_kmeans(&v, 2, &KMeansConfig::default(), &mut rng(7)).unwrap();
        let mut seen: Vec<usize> = (0..v.len()).map(|e| c.position_of(e)).collect();
        seen.sort();
        assert_eq!(seen, (1..=6).collect::<Vec<_>>());
        for t in &c.territories {
            assert_eq!(c.position_of(t.centroid_edge), t.position_range.0);
        }
        let o = c.overflow.as_ref().unwrap();
        assert_eq!(o.members, vec![5]);
        assert_eq!(o.position_range, (6, 6));
        assert_eq!(c.edge_at(6), Some(5));
        assert_eq!(c.edge_at(0), None);
        assert_eq!(c.edge_at(7), None);
    }

    #[test]
    fn contiguous_layout_ranges() {
        // three territories of 1500, 1501 and 999 posts over 4000 positions
        let mut vectors = Vec::new();
        let mut assignment = Vec::new();
        let mut territories = Vec::new();
        for (cid, size) in [1500usize, 1501, 999].into_iter().enumerate() {
            let start = vectors.len();
            for i in 0..size {
                vectors.push(TermVector::from_pairs([(cid as u32, 1.0 + i as f64 * 1e-3)]));
                assignment.push(Some(cid));
            }
            territories.push(Territory {
                cluster_id: cid,
                centroid_edge: start,
                members: (start..start + size).collect(),
                position_range: (0, 0),
            });
        }
        let mut c = Clustering {
            k: 3,
            territories,
            overflow: None,
            assignment,
            positions: vec![],
            edges_by_position: vec![],
            converged: true,
            iterations: 1,
        };
        assign_semantic_positions(&mut c, &vectors);
        let ranges: Vec<_> = c.territories.iter().map(|t| t.position_range).collect();
        assert_eq!(ranges, vec![(1, 1500), (1501, 3001), (3002, 4000)]);
    }

    #[test]
    fn snapshot_round_trip_and_mismatch() {
        let v = line(&[0.0, 1.0, 10.0, 11.0]);
        let c = run_kmeans(&v, 2, &KMeansConfig::default(), &mut rng(0)).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("snap.json");
        c.save(&p, "abc").unwrap();
        assert_eq!(Clustering::load(&p, "abc", 4).unwrap(), c);
        assert!(matches!(Clustering::load(&p, "other", 4), Err(Error::SnapshotMismatch(_))));
        assert!(matches!(Clustering::load(&p, "abc", 5), Err(Error::SnapshotMismatch(_))));
    }

    #[test]
    fn fixed_seed_is_bit_identical() {
        let v: Vec<TermVector> = (0..60)
            .map(|i| TermVector::from_pairs([((i % 7) as u32, 1.0 + (i as f64).sin().abs()), ((i % 5) as u32 + 7, 0.5)]))
            .collect();
        let cfg = KMeansConfig::default();
        assert_eq!(run_kmeans(&v, 4, &cfg, &mut rng(9)).unwrap(), run_kmeans(&v, 4, &cfg, &mut rng(9)).unwrap());
    }
}
