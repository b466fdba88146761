//! Seeded k-means (Lloyd iterations from k-means++ seeding) and an exhaustive
//! minimum-SSE oracle for small inputs.
//!
//! k-means here is unsupervised: it never sees labels.
//!
//! Determinism: points are sorted into a canonical order (values, then key)
//! before any random draw, and draws come from ChaCha8 (`rand_chacha`) seeded
//! with `seed_from_u64(seed)`. ChaCha8 output is specified bit-for-bit, so a
//! given `(points, k, seed)` clusters identically on every platform and for
//! every input ordering.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const MAX_ITERATIONS: usize = 100;
pub const ORACLE_MAX_POINTS: usize = 10;
pub const ORACLE_MAX_K: usize = 3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeaturePoint {
    pub key: String,
    pub values: Vec<f64>,
}

impl FeaturePoint {
    pub fn new(key: impl Into<String>, values: Vec<f64>) -> Self {
        Self {
            key: key.into(),
            values,
        }
    }

    pub fn scalar(key: impl Into<String>, value: f64) -> Self {
        Self::new(key, vec![value])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Clustering {
    pub assignments: BTreeMap<String, usize>,
    pub centroids: Vec<Vec<f64>>,
    pub sse: f64,
    pub iterations: usize,
    /// SSE after seeding, then after each Lloyd iteration.
    pub sse_history: Vec<f64>,
}

impl Clustering {
    /// Member keys of each cluster, by cluster index.
    pub fn groups(&self) -> Vec<Vec<String>> {
        let mut groups = vec![Vec::new(); self.centroids.len()];
        for (key, &c) in &self.assignments {
            groups[c].push(key.clone());
        }
        groups
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum ClusterError {
    #[error("no points to cluster")]
    EmptyInput,
    #[error("k must be at least 1")]
    ZeroClusters,
    #[error("k = {k} exceeds the {distinct} distinct points available")]
    TooManyClusters { k: usize, distinct: usize },
    #[error("point `{key}` has {found} values, expected {expected}")]
    DimensionMismatch { key: String, expected: usize, found: usize },
    #[error("point `{0}` has a non-finite value")]
    NonFinite(String),
    #[error("duplicate point key `{0}`")]
    DuplicateKey(String),
    #[error("exhaustive oracle limited to {max_n} points and k <= {max_k}, got n = {n}, k = {k}")]
    OracleTooLarge {
        n: usize,
        k: usize,
        max_n: usize,
        max_k: usize,
    },
    #[error("labels need 1-D centroids, found dimension {0}")]
    NotOrderable(usize),
}

fn cmp_values(a: &[f64], b: &[f64]) -> Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or_else(|| a.len().cmp(&b.len()))
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Validates and returns the points in canonical order plus the number of
/// distinct value vectors.
fn canonical(points: &[FeaturePoint], k: usize) -> Result<(Vec<&FeaturePoint>, usize), ClusterError> {
    if k == 0 {
        return Err(ClusterError::ZeroClusters);
    }
    let first = points.first().ok_or(ClusterError::EmptyInput)?;
    let dim = first.values.len();
    let mut keys = HashSet::with_capacity(points.len());
    for p in points {
        if p.values.len() != dim {
            return Err(ClusterError::DimensionMismatch {
                key: p.key.clone(),
                expected: dim,
                found: p.values.len(),
            });
        }
        if !p.values.iter().all(|v| v.is_finite()) {
            return Err(ClusterError::NonFinite(p.key.clone()));
        }
        if !keys.insert(p.key.as_str()) {
            return Err(ClusterError::DuplicateKey(p.key.clone()));
        }
    }
    let mut sorted: Vec<&FeaturePoint> = points.iter().collect();
    sorted.sort_by(|a, b| cmp_values(&a.values, &b.values).then_with(|| a.key.cmp(&b.key)));
    let distinct = 1 + sorted.windows(2).filter(|w| w[0].values != w[1].values).count();
    Ok((sorted, distinct))
}

fn nearest(point: &[f64], centroids: &[Vec<f64>]) -> usize {
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for (i, c) in centroids.iter().enumerate() {
        let d = sq_dist(point, c);
        if d < best_d {
            best = i;
            best_d = d;
        }
    }
    best
}

fn assign_all(points: &[&FeaturePoint], centroids: &[Vec<f64>]) -> Vec<usize> {
    points.iter().map(|p| nearest(&p.values, centroids)).collect()
}

fn sse(points: &[&FeaturePoint], assign: &[usize], centroids: &[Vec<f64>]) -> f64 {
    points
        .iter()
        .zip(assign)
        .map(|(p, &c)| sq_dist(&p.values, &centroids[c]))
        .sum()
}

fn means(points: &[&FeaturePoint], assign: &[usize], k: usize) -> (Vec<Vec<f64>>, Vec<usize>) {
    let dim = points[0].values.len();
    let mut sums = vec![vec![0.0; dim]; k];
    let mut counts = vec![0usize; k];
    for (p, &c) in points.iter().zip(assign) {
        counts[c] += 1;
        for (s, v) in sums[c].iter_mut().zip(&p.values) {
            *s += v;
        }
    }
    for (s, &n) in sums.iter_mut().zip(&counts) {
        if n > 0 {
            s.iter_mut().for_each(|x| *x /= n as f64);
        }
    }
    (sums, counts)
}

/// Recomputes centroids as member means. An empty cluster takes over the
/// point farthest from its centroid (among clusters that can spare one).
fn update(points: &[&FeaturePoint], assign: &mut [usize], k: usize) -> Vec<Vec<f64>> {
    loop {
        let (centroids, counts) = means(points, assign, k);
        let Some(empty) = counts.iter().position(|&n| n == 0) else {
            return centroids;
        };
        let mut far = None;
        let mut far_d = -1.0;
        for (i, p) in points.iter().enumerate() {
            if counts[assign[i]] < 2 {
                continue;
            }
            let d = sq_dist(&p.values, &centroids[assign[i]]);
            if d > far_d {
                far = Some(i);
                far_d = d;
            }
        }
        // n >= k guarantees some cluster holds two or more points.
        let far = far.expect("an empty cluster implies a cluster with two members");
        assign[far] = empty;
    }
}

fn plus_plus_init(points: &[&FeaturePoint], k: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let first = rng.gen_range(0..points.len());
    let mut centroids = vec![points[first].values.clone()];
    let mut d2: Vec<f64> = points.iter().map(|p| sq_dist(&p.values, &centroids[0])).collect();
    while centroids.len() < k {
        let total: f64 = d2.iter().sum();
        let target = rng.gen::<f64>() * total;
        let mut acc = 0.0;
        let mut chosen = None;
        for (i, &d) in d2.iter().enumerate() {
            if d <= 0.0 {
                continue;
            }
            acc += d;
            chosen = Some(i);
            if acc > target {
                break;
            }
        }
        // Fewer than k centroids while k <= distinct points leaves some d2 > 0.
        let chosen = chosen.expect("a point away from every centroid exists");
        let c = points[chosen].values.clone();
        for (d, p) in d2.iter_mut().zip(points) {
            *d = d.min(sq_dist(&p.values, &c));
        }
        centroids.push(c);
    }
    centroids
}

fn finish(
    points: &[&FeaturePoint],
    assign: &[usize],
    centroids: Vec<Vec<f64>>,
    iterations: usize,
    sse_history: Vec<f64>,
) -> Clustering {
    Clustering {
        assignments: points.iter().zip(assign).map(|(p, &c)| (p.key.clone(), c)).collect(),
        sse: sse(points, assign, &centroids),
        centroids,
        iterations,
        sse_history,
    }
}

/// Clusters `points` into `k` groups by squared Euclidean distance.
///
/// Stops when an iteration leaves every assignment unchanged, or after
/// [`MAX_ITERATIONS`].
pub fn kmeans(points: &[FeaturePoint], k: usize, seed: u64) -> Result<Clustering, ClusterError> {
    let (pts, distinct) = canonical(points, k)?;
    if k > distinct {
        return Err(ClusterError::TooManyClusters { k, distinct });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let init = plus_plus_init(&pts, k, &mut rng);
    let mut assign = assign_all(&pts, &init);
    let mut history = vec![sse(&pts, &assign, &init)];
    let mut iterations = 0;
    let centroids = loop {
        let mut centroids = update(&pts, &mut assign, k);
        iterations += 1;
        let next = assign_all(&pts, &centroids);
        history.push(sse(&pts, &next, &centroids));
        if next == assign {
            break centroids;
        }
        assign = next;
        if iterations >= MAX_ITERATIONS {
            centroids = update(&pts, &mut assign, k);
            history.push(sse(&pts, &assign, &centroids));
            break centroids;
        }
    };
    Ok(finish(&pts, &assign, centroids, iterations, history))
}

/// Exact minimum-SSE clustering into exactly `k` non-empty groups, by
/// enumerating every set partition of the canonically ordered points.
///
/// Cluster indices follow first appearance in canonical order; among equal
/// SSEs the first partition enumerated wins.
pub fn brute_force_optimal(points: &[FeaturePoint], k: usize) -> Result<Clustering, ClusterError> {
    let (pts, _) = canonical(points, k)?;
    let n = pts.len();
    if n > ORACLE_MAX_POINTS || k > ORACLE_MAX_K {
        return Err(ClusterError::OracleTooLarge {
            n,
            k,
            max_n: ORACLE_MAX_POINTS,
            max_k: ORACLE_MAX_K,
        });
    }
    if k > n {
        return Err(ClusterError::TooManyClusters { k, distinct: n });
    }

    let mut best: Option<(f64, Vec<usize>)> = None;
    let mut labels = vec![0usize; n];
    // Restricted growth strings: labels[i] <= 1 + max(labels[..i]).
    fn walk(
        i: usize,
        used: usize,
        k: usize,
        labels: &mut Vec<usize>,
        pts: &[&FeaturePoint],
        best: &mut Option<(f64, Vec<usize>)>,
    ) {
        let n = labels.len();
        if n - i < k - used {
            return;
        }
        if i == n {
            let (centroids, _) = means(pts, labels, k);
            let cost = sse(pts, labels, &centroids);
            let better = match best {
                None => true,
                Some((b, _)) => cost < *b - 1e-9 * b.abs().max(1.0),
            };
            if better {
                *best = Some((cost, labels.clone()));
            }
            return;
        }
        for label in 0..=used.min(k - 1) {
            labels[i] = label;
            walk(i + 1, used.max(label + 1), k, labels, pts, best);
        }
    }
    walk(0, 0, k, &mut labels, &pts, &mut best);

    let (_, assign) = best.expect("k <= n admits at least one partition");
    let (centroids, _) = means(&pts, &assign, k);
    let cost = sse(&pts, &assign, &centroids);
    Ok(finish(&pts, &assign, centroids, 0, vec![cost]))
}

/// Band labels by cluster index: `L1` for the highest centroid down to `Lk`.
/// Equal centroids give the lower cluster index the higher band.
pub fn label_clusters(clustering: &Clustering) -> Result<Vec<String>, ClusterError> {
    if let Some(c) = clustering.centroids.iter().find(|c| c.len() != 1) {
        return Err(ClusterError::NotOrderable(c.len()));
    }
    let mut order: Vec<usize> = (0..clustering.centroids.len()).collect();
    order.sort_by(|&a, &b| {
        clustering.centroids[b][0]
            .total_cmp(&clustering.centroids[a][0])
            .then(a.cmp(&b))
    });
    let mut labels = vec![String::new(); order.len()];
    for (rank, &cluster) in order.iter().enumerate() {
        labels[cluster] = format!("L{}", rank + 1);
    }
    Ok(labels)
}
