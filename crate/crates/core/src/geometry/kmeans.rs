use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{check_samples, VectorSample};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

const MAX_ITERATIONS: usize = 100;
const MOVE_TOL: f64 = 1e-9;

#[derive(Clone, Debug)]
pub struct KMeansResult<T> {
    /// Centroid positions with the mean velocity of their members.
    pub representatives: Vec<VectorSample<T>>,
    /// Cluster index of every input sample.
    pub labels: Vec<usize>,
    pub iterations: usize,
    /// Sum of squared distances after each Lloyd update.
    pub objective_history: Vec<T>,
}

/// k-means++ seeding followed by Lloyd iterations; see [`kmeans_detailed`].
pub fn kmeans<T: Scalar>(samples: &[VectorSample<T>], k: usize, seed: u64) -> Result<Vec<VectorSample<T>>> {
    Ok(kmeans_detailed(samples, k, seed)?.representatives)
}

/// Clusters the sample positions. Stops when no centroid moves more than
/// 1e-9 or after 100 iterations. Empty clusters are re-seeded with the point
/// farthest from its centroid, so every cluster ends with at least one member.
pub fn kmeans_detailed<T: Scalar>(samples: &[VectorSample<T>], k: usize, seed: u64) -> Result<KMeansResult<T>> {
    if samples.is_empty() {
        return Err(Error::Parameter("k-means on an empty sample set".into()));
    }
    if k == 0 || k > samples.len() {
        return Err(Error::Parameter(format!("k = {k} must lie in 1..={}", samples.len())));
    }
    let d = check_samples(samples)?;
    let points: Vec<&[T]> = samples.iter().map(|s| s.position.as_slice()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut centroids = seed_plus_plus(&points, k, &mut rng);
    let mut labels = vec![0usize; points.len()];
    let mut history = Vec::new();
    let mut iterations = 0;

    for _ in 0..MAX_ITERATIONS {
        iterations += 1;
        for (i, p) in points.iter().enumerate() {
            labels[i] = nearest(p, &centroids).0;
        }
        fix_empty_clusters(&points, &mut centroids, &mut labels);

        let mut sums = vec![vec![T::zero(); d]; k];
        let mut counts = vec![0usize; k];
        for (i, p) in points.iter().enumerate() {
            counts[labels[i]] += 1;
            for (acc, &c) in sums[labels[i]].iter_mut().zip(p.iter()) {
                *acc = *acc + c;
            }
        }
        let mut max_move = T::zero();
        for c in 0..k {
            let n = T::of(counts[c] as f64);
            let new: Vec<T> = sums[c].iter().map(|&s| s / n).collect();
            max_move = max_move.max(dist2(&new, &centroids[c]).sqrt());
            centroids[c] = new;
        }
        history.push(objective(&points, &centroids, &labels));
        if max_move <= T::of(MOVE_TOL) {
            break;
        }
    }

    let mut vel_sums = vec![vec![T::zero(); d]; k];
    let mut counts = vec![0usize; k];
    for (s, &l) in samples.iter().zip(&labels) {
        counts[l] += 1;
        for (acc, &v) in vel_sums[l].iter_mut().zip(&s.velocity) {
            *acc = *acc + v;
        }
    }
    let representatives = centroids
        .into_iter()
        .zip(vel_sums)
        .zip(&counts)
        .map(|((position, vs), &n)| {
            let n = T::of(n as f64);
            VectorSample { position, velocity: vs.into_iter().map(|v| v / n).collect() }
        })
        .collect();
    Ok(KMeansResult { representatives, labels, iterations, objective_history: history })
}

fn dist2<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&x, &y)| (x - y) * (x - y)).sum()
}

/// Index and squared distance of the nearest centroid; ties go to the lowest index.
fn nearest<T: Scalar>(p: &[T], centroids: &[Vec<T>]) -> (usize, T) {
    let mut best = (0, dist2(p, &centroids[0]));
    for (c, cen) in centroids.iter().enumerate().skip(1) {
        let d = dist2(p, cen);
        if d < best.1 {
            best = (c, d);
        }
    }
    best
}

fn objective<T: Scalar>(points: &[&[T]], centroids: &[Vec<T>], labels: &[usize]) -> T {
    points.iter().zip(labels).map(|(p, &l)| dist2(p, &centroids[l])).sum()
}

fn seed_plus_plus<T: Scalar>(points: &[&[T]], k: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<T>> {
    let n = points.len();
    let mut chosen = vec![rng.gen_range(0..n)];
    let mut d2: Vec<f64> = points.iter().map(|p| dist2(p, points[chosen[0]]).to_f64_lossy()).collect();
    while chosen.len() < k {
        let total: f64 = d2.iter().sum();
        let next = if total > 0.0 {
            let mut target = rng.gen::<f64>() * total;
            let mut pick = None;
            for (i, &w) in d2.iter().enumerate() {
                if w > 0.0 {
                    if target < w {
                        pick = Some(i);
                        break;
                    }
                    target -= w;
                }
            }
            // rounding can exhaust the loop; fall back to the last positive weight
            pick.unwrap_or_else(|| d2.iter().rposition(|&w| w > 0.0).unwrap())
        } else {
            // all remaining points coincide with a center
            (0..n).find(|i| !chosen.contains(i)).unwrap()
        };
        chosen.push(next);
        for (i, p) in points.iter().enumerate() {
            d2[i] = d2[i].min(dist2(p, points[next]).to_f64_lossy());
        }
    }
    chosen.into_iter().map(|i| points[i].to_vec()).collect()
}

fn fix_empty_clusters<T: Scalar>(points: &[&[T]], centroids: &mut [Vec<T>], labels: &mut [usize]) {
    let k = centroids.len();
    loop {
        let mut counts = vec![0usize; k];
        for &l in labels.iter() {
            counts[l] += 1;
        }
        let Some(empty) = counts.iter().position(|&c| c == 0) else { return };
        // farthest point among clusters that can spare a member
        let mut far: Option<(usize, T)> = None;
        for (i, p) in points.iter().enumerate() {
            if counts[labels[i]] < 2 {
                continue;
            }
            let d = dist2(p, &centroids[labels[i]]);
            if far.is_none_or(|(_, best)| d > best) {
                far = Some((i, d));
            }
        }
        let Some((i, _)) = far else { return };
        centroids[empty] = points[i].to_vec();
        labels[i] = empty;
    }
}
