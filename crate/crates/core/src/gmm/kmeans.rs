//! k-means++ seeding followed by Lloyd iterations, used to start EM.

use rand::Rng;

use super::params::GmmParams;
use crate::dataio::FeatureMatrix;
use crate::error::{Error, Result};
use crate::seed;

pub const KMEANS_MAX_ITER: usize = 100;
pub const KMEANS_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct KMeansResult {
    /// Row-major `k × D`.
    pub centroids: Vec<f64>,
    pub assignment: Vec<usize>,
    pub iterations: usize,
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn nearest(x: &[f64], centroids: &[f64], d: usize) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (j, c) in centroids.chunks_exact(d).enumerate() {
        let dist = sq_dist(x, c);
        if dist < best.1 {
            best = (j, dist);
        }
    }
    best
}

fn plus_plus_seeds(x: &FeatureMatrix, k: usize, rng: &mut impl Rng) -> Vec<f64> {
    let (n, d) = (x.n_rows(), x.n_cols());
    let mut centroids = Vec::with_capacity(k * d);
    centroids.extend_from_slice(x.row(rng.random_range(0..n)));
    let mut dist: Vec<f64> = x.rows().map(|r| sq_dist(r, &centroids[..d])).collect();
    for _ in 1..k {
        let total: f64 = dist.iter().sum();
        let pick = if total > 0.0 {
            let target = rng.random::<f64>() * total;
            let mut acc = 0.0;
            let mut chosen = n - 1;
            for (i, w) in dist.iter().enumerate() {
                acc += w;
                if acc > target {
                    chosen = i;
                    break;
                }
            }
            chosen
        } else {
            rng.random_range(0..n)
        };
        let c = x.row(pick).to_vec();
        for (di, r) in dist.iter_mut().zip(x.rows()) {
            *di = di.min(sq_dist(r, &c));
        }
        centroids.extend_from_slice(&c);
    }
    centroids
}

pub fn kmeans(x: &FeatureMatrix, k: usize, seed: u64) -> Result<KMeansResult> {
    let (n, d) = (x.n_rows(), x.n_cols());
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    if n < k {
        return Err(Error::InvalidArgument(format!("{n} rows cannot form {k} clusters")));
    }
    let mut rng = seed::rng(seed);
    let mut centroids = plus_plus_seeds(x, k, &mut rng);
    let mut assignment = vec![0usize; n];
    let mut iterations = 0;

    for iter in 0..KMEANS_MAX_ITER {
        iterations = iter + 1;
        let mut dists = Vec::with_capacity(n);
        for (i, r) in x.rows().enumerate() {
            let (j, dist) = nearest(r, &centroids, d);
            assignment[i] = j;
            dists.push(dist);
        }
        reseed_empty(x, k, &mut centroids, &mut assignment, &mut dists);

        let mut sums = vec![0.0; k * d];
        let mut counts = vec![0usize; k];
        for (r, &j) in x.rows().zip(&assignment) {
            counts[j] += 1;
            for (s, v) in sums[j * d..(j + 1) * d].iter_mut().zip(r) {
                *s += v;
            }
        }
        let mut shift: f64 = 0.0;
        for j in 0..k {
            let inv = 1.0 / counts[j] as f64;
            let new: Vec<f64> = sums[j * d..(j + 1) * d].iter().map(|s| s * inv).collect();
            shift = shift.max(sq_dist(&new, &centroids[j * d..(j + 1) * d]).sqrt());
            centroids[j * d..(j + 1) * d].copy_from_slice(&new);
        }
        if shift < KMEANS_TOL {
            break;
        }
    }
    // Final assignment against the converged centroids.
    let mut dists = Vec::with_capacity(n);
    for (i, r) in x.rows().enumerate() {
        let (j, dist) = nearest(r, &centroids, d);
        assignment[i] = j;
        dists.push(dist);
    }
    reseed_empty(x, k, &mut centroids, &mut assignment, &mut dists);
    Ok(KMeansResult {
        centroids,
        assignment,
        iterations,
    })
}

/// Moves the point farthest from its centroid into each empty cluster.
fn reseed_empty(
    x: &FeatureMatrix,
    k: usize,
    centroids: &mut [f64],
    assignment: &mut [usize],
    dists: &mut [f64],
) {
    let d = x.n_cols();
    loop {
        let mut counts = vec![0usize; k];
        for &j in assignment.iter() {
            counts[j] += 1;
        }
        let Some(empty) = counts.iter().position(|&c| c == 0) else {
            return;
        };
        // Only donate from clusters that keep at least one member.
        let far = (0..assignment.len())
            .filter(|&i| counts[assignment[i]] > 1)
            .max_by(|&a, &b| dists[a].total_cmp(&dists[b]).then(b.cmp(&a)))
            .expect("n >= k guarantees a cluster with two members");
        assignment[far] = empty;
        dists[far] = 0.0;
        centroids[empty * d..(empty + 1) * d].copy_from_slice(x.row(far));
    }
}

/// GMM starting point from hard k-means clusters: `ω_j = n_j / n`, cluster
/// means, biased within-cluster covariances plus `reg_covar · I`.
pub fn kmeans_init(x: &FeatureMatrix, k: usize, reg_covar: f64, seed: u64) -> Result<GmmParams> {
    let km = kmeans(x, k, seed)?;
    params_from_assignment(x, &km.assignment, k, reg_covar)
}

pub(crate) fn params_from_assignment(
    x: &FeatureMatrix,
    assignment: &[usize],
    k: usize,
    reg_covar: f64,
) -> Result<GmmParams> {
    let (n, d) = (x.n_rows(), x.n_cols());
    let mut counts = vec![0usize; k];
    let mut means = vec![vec![0.0; d]; k];
    for (r, &j) in x.rows().zip(assignment) {
        counts[j] += 1;
        for (m, v) in means[j].iter_mut().zip(r) {
            *m += v;
        }
    }
    for (m, &c) in means.iter_mut().zip(&counts) {
        for v in m.iter_mut() {
            *v /= c as f64;
        }
    }
    let mut covs = vec![vec![0.0; d * d]; k];
    let mut diff = vec![0.0; d];
    for (r, &j) in x.rows().zip(assignment) {
        for (df, (v, m)) in diff.iter_mut().zip(r.iter().zip(&means[j])) {
            *df = v - m;
        }
        let c = &mut covs[j];
        for a in 0..d {
            let da = diff[a];
            for b in a..d {
                c[a * d + b] += da * diff[b];
            }
        }
    }
    for (c, &cnt) in covs.iter_mut().zip(&counts) {
        finish_covariance(c, d, cnt as f64, reg_covar);
    }
    let weights = counts.iter().map(|&c| c as f64 / n as f64).collect();
    GmmParams::new(weights, means, covs)
}

/// Scales the accumulated upper triangle by `1 / mass`, mirrors it and adds
/// the ridge.
pub(crate) fn finish_covariance(c: &mut [f64], d: usize, mass: f64, reg_covar: f64) {
    let inv = 1.0 / mass;
    for a in 0..d {
        for b in a..d {
            let v = c[a * d + b] * inv;
            c[a * d + b] = v;
            c[b * d + a] = v;
        }
        c[a * d + a] += reg_covar;
    }
}
