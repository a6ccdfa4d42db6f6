//! Variable grouping strategies. All four methods partition `{0..n-1}` into
//! clusters of size at most `d`.
//!
//! The clustering method builds a correlation matrix from the instance and
//! the current solution, splits it into repulsive/attractive views, embeds
//! each view spectrally through its normalized Laplacian, concatenates the
//! per-view features and k-means-clusters the joint rows, then repairs any
//! cluster over the size cap.

use std::collections::VecDeque;

use nalgebra::{DMatrix, SymmetricEigen};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::qubo::QuboInstance;

/// Symmetric pairwise correlation `Σ_ij = (-1)^{x_i + x_j} c_ij` with zero
/// diagonal; equivalently the excess objective change of a joint flip over
/// the two individual flips.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationMatrix {
    mat: DMatrix<f64>,
}

impl CorrelationMatrix {
    pub fn n(&self) -> usize {
        self.mat.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.mat[(i, j)]
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.mat
    }
}

/// Builds the correlation matrix of `instance` at the solution `bits`.
pub fn correlation_matrix(instance: &QuboInstance, bits: &[u8]) -> Result<CorrelationMatrix> {
    let n = instance.n();
    if bits.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: bits.len(),
        });
    }
    let mut mat = DMatrix::zeros(n, n);
    for &(i, j, c) in instance.couplings() {
        let value = if (bits[i] ^ bits[j]) == 0 { c } else { -c };
        mat[(i, j)] = value;
        mat[(j, i)] = value;
    }
    Ok(CorrelationMatrix { mat })
}

/// Splits `Σ` into the elementwise-nonnegative views `Σ₊ = max(Σ, 0)` and
/// `Σ₋ = max(-Σ, 0)`, so `Σ = Σ₊ - Σ₋`.
pub fn split_views(sigma: &CorrelationMatrix) -> (DMatrix<f64>, DMatrix<f64>) {
    let plus = sigma.mat.map(|v| v.max(0.0));
    let minus = sigma.mat.map(|v| (-v).max(0.0));
    (plus, minus)
}

/// Normalized Laplacian `L = I - D^{-1/2} A D^{-1/2}` with `D` the diagonal
/// of row sums. Zero-degree rows produce identity rows.
pub fn normalized_laplacian(a: &DMatrix<f64>) -> DMatrix<f64> {
    let n = a.nrows();
    let inv_sqrt_deg: Vec<f64> = (0..n)
        .map(|i| {
            let d: f64 = a.row(i).sum();
            if d > 0.0 {
                1.0 / d.sqrt()
            } else {
                0.0
            }
        })
        .collect();
    let mut l = DMatrix::zeros(n, n);
    for i in 0..n {
        l[(i, i)] = 1.0;
        for j in 0..n {
            if i != j {
                l[(i, j)] = -a[(i, j)] * inv_sqrt_deg[i] * inv_sqrt_deg[j];
            }
        }
    }
    l
}

/// First `m` eigenvectors of `l` by ascending eigenvalue, unit-norm, as the
/// columns of an `n x m` matrix; row `i` is the feature vector of node `i`.
/// Column signs are canonicalized (largest-magnitude entry positive).
pub fn spectral_features(l: &DMatrix<f64>, m: usize) -> Result<DMatrix<f64>> {
    let n = l.nrows();
    if m == 0 || m > n {
        return Err(Error::InvalidArgument(format!(
            "feature count {m} outside 1..={n}"
        )));
    }
    let eig = SymmetricEigen::new(l.clone());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[a]
            .total_cmp(&eig.eigenvalues[b])
            .then(a.cmp(&b))
    });
    let mut features = DMatrix::zeros(n, m);
    for (col, &src) in order.iter().take(m).enumerate() {
        let v = eig.eigenvectors.column(src);
        let norm = v.norm();
        let mut pivot = 0;
        for i in 1..n {
            if v[i].abs() > v[pivot].abs() {
                pivot = i;
            }
        }
        let sign = if v[pivot] < 0.0 { -1.0 } else { 1.0 };
        let scale = if norm > 0.0 { sign / norm } else { sign };
        for i in 0..n {
            features[(i, col)] = v[i] * scale;
        }
    }
    Ok(features)
}

fn sq_dist(points: &DMatrix<f64>, row: usize, center: &[f64]) -> f64 {
    let f = points.ncols();
    (0..f)
        .map(|c| {
            let d = points[(row, c)] - center[c];
            d * d
        })
        .sum()
}

/// Lloyd's k-means with k-means++ seeding. Deterministic under `seed`;
/// terminates on stable assignments or after 300 iterations; empty clusters
/// reseed from the point farthest from its assigned centroid.
pub fn kmeans(points: &DMatrix<f64>, k: usize, seed: u64) -> Result<Vec<usize>> {
    let n = points.nrows();
    let f = points.ncols();
    if k == 0 || k > n {
        return Err(Error::InvalidArgument(format!(
            "cluster count {k} outside 1..={n}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // k-means++ seeding
    let mut centers: Vec<Vec<f64>> = Vec::with_capacity(k);
    let mut chosen = vec![false; n];
    let first = rng.random_range(0..n);
    chosen[first] = true;
    centers.push((0..f).map(|c| points[(first, c)]).collect());
    while centers.len() < k {
        let weights: Vec<f64> = (0..n)
            .map(|i| {
                centers
                    .iter()
                    .map(|c| sq_dist(points, i, c))
                    .fold(f64::INFINITY, f64::min)
            })
            .collect();
        let total: f64 = weights.iter().sum();
        let idx = if total > 0.0 {
            let mut u = rng.random::<f64>() * total;
            let mut pick = n - 1;
            for (i, &w) in weights.iter().enumerate() {
                if u < w {
                    pick = i;
                    break;
                }
                u -= w;
            }
            pick
        } else {
            // all remaining points coincide with a center
            (0..n).find(|&i| !chosen[i]).unwrap_or(0)
        };
        chosen[idx] = true;
        centers.push((0..f).map(|c| points[(idx, c)]).collect());
    }

    let mut labels = vec![0usize; n];
    for _ in 0..300 {
        let mut changed = false;
        for (i, label) in labels.iter_mut().enumerate() {
            let mut best = 0usize;
            let mut best_d = f64::INFINITY;
            for (ci, c) in centers.iter().enumerate() {
                let d = sq_dist(points, i, c);
                if d < best_d {
                    best_d = d;
                    best = ci;
                }
            }
            if *label != best {
                *label = best;
                changed = true;
            }
        }

        let mut counts = vec![0usize; k];
        for &l in &labels {
            counts[l] += 1;
        }
        for empty in 0..k {
            if counts[empty] > 0 {
                continue;
            }
            // reseed from the farthest point in a non-singleton cluster
            let mut far = None;
            let mut far_d = -1.0;
            for i in 0..n {
                if counts[labels[i]] <= 1 {
                    continue;
                }
                let d = sq_dist(points, i, &centers[labels[i]]);
                if d > far_d {
                    far_d = d;
                    far = Some(i);
                }
            }
            if let Some(i) = far {
                counts[labels[i]] -= 1;
                labels[i] = empty;
                counts[empty] = 1;
                centers[empty] = (0..f).map(|c| points[(i, c)]).collect();
                changed = true;
            }
        }

        for (ci, center) in centers.iter_mut().enumerate() {
            if counts[ci] == 0 {
                continue;
            }
            center.iter_mut().for_each(|v| *v = 0.0);
            for i in 0..n {
                if labels[i] == ci {
                    for c in 0..f {
                        center[c] += points[(i, c)];
                    }
                }
            }
            let inv = 1.0 / counts[ci] as f64;
            center.iter_mut().for_each(|v| *v *= inv);
        }

        if !changed {
            break;
        }
    }
    Ok(labels)
}

/// Partition of the variable indices into non-empty disjoint clusters of
/// size at most `max_size`, covering `{0..n-1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grouping {
    clusters: Vec<Vec<usize>>,
    max_size: usize,
}

impl Grouping {
    /// Validates the partition invariants.
    pub fn new(clusters: Vec<Vec<usize>>, n: usize, max_size: usize) -> Result<Self> {
        let mut seen = vec![false; n];
        let mut covered = 0usize;
        for cluster in &clusters {
            if cluster.is_empty() {
                return Err(Error::InvalidArgument("empty cluster".into()));
            }
            if cluster.len() > max_size {
                return Err(Error::InvalidArgument(format!(
                    "cluster of size {} exceeds cap {max_size}",
                    cluster.len()
                )));
            }
            for &i in cluster {
                if i >= n {
                    return Err(Error::IndexOutOfRange { index: i, n });
                }
                if seen[i] {
                    return Err(Error::InvalidArgument(format!(
                        "index {i} in more than one cluster"
                    )));
                }
                seen[i] = true;
                covered += 1;
            }
        }
        if covered != n {
            return Err(Error::InvalidArgument(format!(
                "clusters cover {covered} of {n} indices"
            )));
        }
        Ok(Self { clusters, max_size })
    }

    pub fn clusters(&self) -> &[Vec<usize>] {
        &self.clusters
    }

    pub fn max_size(&self) -> usize {
        self.max_size
    }

    pub fn len(&self) -> usize {
        self.clusters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clusters.is_empty()
    }
}

/// Pool of recent local minima with FIFO eviction at capacity.
#[derive(Debug, Clone)]
pub struct SolutionPool {
    capacity: usize,
    entries: VecDeque<Vec<u8>>,
}

impl SolutionPool {
    pub fn new(capacity: usize) -> Self {
        Self {
            capacity: capacity.max(1),
            entries: VecDeque::new(),
        }
    }

    pub fn push(&mut self, bits: Vec<u8>) {
        if self.entries.len() == self.capacity {
            self.entries.pop_front();
        }
        self.entries.push_back(bits);
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn entries(&self) -> impl Iterator<Item = &[u8]> {
        self.entries.iter().map(Vec::as_slice)
    }
}

fn check_sub_size(n: usize, d: usize) -> Result<()> {
    if d == 0 || d > n {
        return Err(Error::InvalidArgument(format!(
            "sub-problem size {d} outside 1..={n}"
        )));
    }
    Ok(())
}

/// Splits `order` into ceil(len/d) successive blocks of size at most `d`.
fn chunk_order(order: &[usize], d: usize) -> Vec<Vec<usize>> {
    order.chunks(d).map(|c| c.to_vec()).collect()
}

/// Clustering-based grouping: multi-view spectral embedding of the
/// correlation matrix followed by capacity-repaired k-means.
pub fn cluster_grouping(
    instance: &QuboInstance,
    bits: &[u8],
    d: usize,
    seed: u64,
) -> Result<Grouping> {
    let n = instance.n();
    check_sub_size(n, d)?;
    let k = n.div_ceil(d);
    let sigma = correlation_matrix(instance, bits)?;
    let (plus, minus) = split_views(&sigma);

    let mut blocks: Vec<DMatrix<f64>> = Vec::new();
    for view in [&plus, &minus] {
        if view.iter().any(|&v| v != 0.0) {
            let lap = normalized_laplacian(view);
            blocks.push(spectral_features(&lap, k)?);
        }
    }
    if blocks.is_empty() {
        // zero instance: no geometry to cluster on
        return random_grouping(n, d, seed);
    }

    let f: usize = blocks.iter().map(|b| b.ncols()).sum();
    let mut points = DMatrix::zeros(n, f);
    let mut col = 0;
    for block in &blocks {
        for c in 0..block.ncols() {
            for i in 0..n {
                points[(i, col)] = block[(i, c)];
            }
            col += 1;
        }
    }

    let labels = kmeans(&points, k, seed)?;
    let labels = repair_capacity(&points, labels, k, d);

    let mut clusters: Vec<Vec<usize>> = vec![Vec::new(); k];
    for (i, &l) in labels.iter().enumerate() {
        clusters[l].push(i);
    }
    clusters.retain(|c| !c.is_empty());
    clusters.sort_by_key(|c| c[0]);
    Grouping::new(clusters, n, d)
}

/// Moves members of oversized clusters to the nearest cluster with spare
/// capacity, farthest-from-centroid first. Centroids stay fixed, so every
/// move lowers the total excess and the pass ends within n moves.
fn repair_capacity(
    points: &DMatrix<f64>,
    mut labels: Vec<usize>,
    k: usize,
    d: usize,
) -> Vec<usize> {
    let n = points.nrows();
    let f = points.ncols();
    let mut counts = vec![0usize; k];
    for &l in &labels {
        counts[l] += 1;
    }
    let mut centers = vec![vec![0.0; f]; k];
    for i in 0..n {
        for c in 0..f {
            centers[labels[i]][c] += points[(i, c)];
        }
    }
    for ci in 0..k {
        if counts[ci] > 0 {
            let inv = 1.0 / counts[ci] as f64;
            centers[ci].iter_mut().for_each(|v| *v *= inv);
        }
    }

    while let Some(over) = (0..k).find(|&ci| counts[ci] > d) {
        let mut member = None;
        let mut member_d = -1.0;
        for (i, &label) in labels.iter().enumerate() {
            if label != over {
                continue;
            }
            let dist = sq_dist(points, i, &centers[over]);
            if dist > member_d {
                member_d = dist;
                member = Some(i);
            }
        }
        let member = member.expect("oversized cluster has members");
        let mut target = None;
        let mut target_d = f64::INFINITY;
        for ci in 0..k {
            if ci == over || counts[ci] >= d {
                continue;
            }
            let dist = sq_dist(points, member, &centers[ci]);
            if dist < target_d {
                target_d = dist;
                target = Some(ci);
            }
        }
        let target = target.expect("spare capacity exists while a cluster is oversized");
        counts[over] -= 1;
        counts[target] += 1;
        labels[member] = target;
    }
    labels
}

/// Impact-indexed grouping: indices sorted by single-flip objective change
/// (ascending, ties by index) and split into contiguous blocks.
pub fn impact_grouping(instance: &QuboInstance, bits: &[u8], d: usize) -> Result<Grouping> {
    let n = instance.n();
    check_sub_size(n, d)?;
    if bits.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: bits.len(),
        });
    }
    let impacts: Vec<f64> = (0..n).map(|i| instance.delta_flip_raw(bits, i)).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| impacts[a].total_cmp(&impacts[b]).then(a.cmp(&b)));
    Grouping::new(chunk_order(&order, d), n, d)
}

/// Certainty-degree grouping: `d_i = |N_S/2 - c_i|` over the solution pool,
/// most undetermined variables first, contiguous blocks.
pub fn certainty_grouping(pool: &SolutionPool, d: usize) -> Result<Grouping> {
    if pool.is_empty() {
        return Err(Error::InvalidArgument(
            "certainty grouping needs a non-empty solution pool".into(),
        ));
    }
    let n = pool.entries().next().unwrap().len();
    check_sub_size(n, d)?;
    let pool_size = pool.len() as f64;
    let mut counts = vec![0u64; n];
    for entry in pool.entries() {
        for (i, &b) in entry.iter().enumerate() {
            counts[i] += u64::from(b);
        }
    }
    let certainty: Vec<f64> = counts
        .iter()
        .map(|&c| (pool_size / 2.0 - c as f64).abs())
        .collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| certainty[a].total_cmp(&certainty[b]).then(a.cmp(&b)));
    Grouping::new(chunk_order(&order, d), n, d)
}

/// Uniformly random permutation split into contiguous blocks.
pub fn random_grouping(n: usize, d: usize, seed: u64) -> Result<Grouping> {
    check_sub_size(n, d)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    Grouping::new(chunk_order(&order, d), n, d)
}
