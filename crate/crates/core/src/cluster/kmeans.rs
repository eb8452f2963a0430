use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::ClusterError;
use crate::matrix::{squared_distance, DenseMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct KMeansParams {
    pub restarts: usize,
    pub max_iters: usize,
    pub seed: u64,
}

impl Default for KMeansParams {
    fn default() -> Self {
        Self {
            restarts: 10,
            max_iters: 100,
            seed: 42,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KMeansResult {
    pub assignment: Vec<usize>,
    pub centroids: DenseMatrix,
    /// `sum_i ||x_i - mu_{c(i)}||`, the reported clustering objective.
    pub objective: f64,
    /// `sum_i ||x_i - mu_{c(i)}||^2`, the quantity Lloyd iterations decrease.
    pub inertia: f64,
    /// Inertia after every centroid update of the winning restart.
    pub inertia_history: Vec<f64>,
    /// Objective after every centroid update of the winning restart.
    pub objective_history: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    /// Index of the restart that produced this result.
    pub restart: usize,
}

/// Sum of Euclidean distances from each point to its assigned centroid.
pub fn objective(points: &DenseMatrix, assignment: &[usize], centroids: &DenseMatrix) -> f64 {
    points
        .iter_rows()
        .zip(assignment)
        .map(|(x, &c)| squared_distance(x, centroids.row(c)).sqrt())
        .sum()
}

fn inertia(points: &DenseMatrix, assignment: &[usize], centroids: &DenseMatrix) -> f64 {
    points
        .iter_rows()
        .zip(assignment)
        .map(|(x, &c)| squared_distance(x, centroids.row(c)))
        .sum()
}

/// Lloyd's algorithm with k-means++ seeding, `restarts` independent runs
/// (restart `r` draws from the stream seeded with `seed + r`), keeping the
/// run with the lowest objective (earliest restart on ties).
pub fn kmeans(
    points: &DenseMatrix,
    k: usize,
    params: &KMeansParams,
) -> Result<KMeansResult, ClusterError> {
    let n = points.rows();
    if k == 0 {
        return Err(ClusterError::InvalidParam("k must be >= 1".into()));
    }
    if k > n {
        return Err(ClusterError::TooManyClusters { k, points: n });
    }
    if params.restarts == 0 || params.max_iters == 0 {
        return Err(ClusterError::InvalidParam(
            "restarts and max_iters must be >= 1".into(),
        ));
    }
    if !points.is_finite() {
        return Err(ClusterError::NonFinite);
    }
    let runs: Vec<KMeansResult> = (0..params.restarts)
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(params.seed.wrapping_add(r as u64));
            let init = plus_plus_seeds(points, k, &mut rng);
            let mut res = lloyd(points, init, params.max_iters);
            res.restart = r;
            res
        })
        .collect();
    Ok(runs
        .into_iter()
        .reduce(|best, cand| {
            if cand.objective < best.objective {
                cand
            } else {
                best
            }
        })
        .expect("at least one restart"))
}

/// k-means++: the first centre uniformly, each further centre with
/// probability proportional to its squared distance from the nearest chosen
/// centre. Falls back to the lowest unchosen index when all remaining
/// points coincide with chosen centres.
pub(crate) fn plus_plus_seeds(points: &DenseMatrix, k: usize, rng: &mut impl Rng) -> Vec<usize> {
    let n = points.rows();
    let mut chosen = Vec::with_capacity(k);
    let first = rng.random_range(0..n);
    chosen.push(first);
    let mut d2: Vec<f64> = points
        .iter_rows()
        .map(|x| squared_distance(x, points.row(first)))
        .collect();
    while chosen.len() < k {
        let total: f64 = d2.iter().sum();
        let pick = if total > 0.0 {
            let u = rng.random::<f64>() * total;
            let mut acc = 0.0;
            let mut pick = None;
            for (i, &w) in d2.iter().enumerate() {
                if w <= 0.0 {
                    continue;
                }
                acc += w;
                pick = Some(i);
                if acc > u {
                    break;
                }
            }
            pick.expect("positive total has a positive weight")
        } else {
            (0..n).find(|i| !chosen.contains(i)).expect("k <= n")
        };
        chosen.push(pick);
        let c = points.row(pick);
        for (i, x) in points.iter_rows().enumerate() {
            let d = squared_distance(x, c);
            if d < d2[i] {
                d2[i] = d;
            }
        }
    }
    chosen
}

fn nearest_centroid(x: &[f64], centroids: &DenseMatrix) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (j, c) in centroids.iter_rows().enumerate() {
        let d = squared_distance(x, c);
        if d < best.1 {
            best = (j, d);
        }
    }
    best
}

fn assign_all(points: &DenseMatrix, centroids: &DenseMatrix) -> Vec<usize> {
    points
        .iter_rows()
        .map(|x| nearest_centroid(x, centroids).0)
        .collect()
}

/// Means of each cluster; empty clusters take the point farthest from its
/// centroid among clusters with more than one member.
fn update_centroids(points: &DenseMatrix, assignment: &mut [usize], k: usize) -> DenseMatrix {
    let dim = points.cols();
    loop {
        let mut sums = DenseMatrix::zeros(k, dim);
        let mut counts = vec![0usize; k];
        for (x, &c) in points.iter_rows().zip(assignment.iter()) {
            counts[c] += 1;
            for (s, v) in sums.row_mut(c).iter_mut().zip(x) {
                *s += v;
            }
        }
        for (c, &cnt) in counts.iter().enumerate() {
            if cnt > 0 {
                let inv = 1.0 / cnt as f64;
                sums.row_mut(c).iter_mut().for_each(|s| *s *= inv);
            }
        }
        let Some(empty) = counts.iter().position(|&c| c == 0) else {
            return sums;
        };
        let mut far = (usize::MAX, -1.0);
        for (i, x) in points.iter_rows().enumerate() {
            let c = assignment[i];
            if counts[c] < 2 {
                continue;
            }
            let d = squared_distance(x, sums.row(c));
            if d > far.1 {
                far = (i, d);
            }
        }
        assert!(far.0 != usize::MAX, "k <= n guarantees a donor cluster");
        assignment[far.0] = empty;
    }
}

fn lloyd(points: &DenseMatrix, seeds: Vec<usize>, max_iters: usize) -> KMeansResult {
    let k = seeds.len();
    let mut centroids = DenseMatrix::zeros(k, points.cols());
    for (j, &s) in seeds.iter().enumerate() {
        centroids.row_mut(j).copy_from_slice(points.row(s));
    }
    let mut assignment = assign_all(points, &centroids);
    let mut history = Vec::new();
    let mut objectives = Vec::new();
    let mut converged = false;
    let mut iterations = 0;
    while iterations < max_iters {
        centroids = update_centroids(points, &mut assignment, k);
        let current = inertia(points, &assignment, &centroids);
        history.push(current);
        objectives.push(objective(points, &assignment, &centroids));
        iterations += 1;
        let next = assign_all(points, &centroids);
        // Stop once reassignment no longer lowers the cost.
        if next == assignment || inertia(points, &next, &centroids) >= current {
            converged = true;
            break;
        }
        if iterations == max_iters {
            break;
        }
        assignment = next;
    }
    let objective = objective(points, &assignment, &centroids);
    let inertia = inertia(points, &assignment, &centroids);
    KMeansResult {
        assignment,
        centroids,
        objective,
        inertia,
        inertia_history: history,
        objective_history: objectives,
        iterations,
        converged,
        restart: 0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(xs: &[f64]) -> DenseMatrix {
        let rows: Vec<[f64; 1]> = xs.iter().map(|&x| [x]).collect();
        DenseMatrix::from_rows(&rows)
    }

    #[test]
    fn k_equals_p_is_zero_cost() {
        let pts = line(&[0.0, 3.0, 7.0, 7.5]);
        let r = kmeans(&pts, 4, &KMeansParams::default()).unwrap();
        assert_eq!(r.objective, 0.0);
        let mut seen = r.assignment.clone();
        seen.sort_unstable();
        assert_eq!(seen, vec![0, 1, 2, 3]);
    }

    #[test]
    fn single_cluster_is_mean() {
        let pts = line(&[1.0, 2.0, 6.0]);
        let r = kmeans(&pts, 1, &KMeansParams::default()).unwrap();
        assert_eq!(r.centroids.row(0), &[3.0]);
        assert!((r.objective - (2.0 + 1.0 + 3.0)).abs() < 1e-12);
        assert!(r.converged);
    }

    #[test]
    fn duplicates_with_k_equal_p() {
        let pts = line(&[1.0, 1.0, 1.0]);
        let r = kmeans(&pts, 3, &KMeansParams::default()).unwrap();
        let mut seen = r.assignment.clone();
        seen.sort_unstable();
        assert_eq!(seen, vec![0, 1, 2]);
        assert_eq!(r.objective, 0.0);
    }

    #[test]
    fn empty_cluster_repair() {
        // Two centroids seeded on top of each other leave the second empty
        // after assignment ties go to the lower id.
        let pts = line(&[0.0, 0.0, 5.0, 6.0]);
        let mut assignment = vec![0, 0, 0, 0];
        let c = update_centroids(&pts, &mut assignment, 2);
        assert_eq!(assignment, vec![0, 0, 0, 1]);
        assert_eq!(c.row(1), &[6.0]);
    }

    #[test]
    fn errors() {
        let pts = line(&[0.0, 1.0]);
        assert!(matches!(
            kmeans(&pts, 3, &KMeansParams::default()),
            Err(ClusterError::TooManyClusters { k: 3, points: 2 })
        ));
        let bad = line(&[0.0, f64::INFINITY]);
        assert!(matches!(
            kmeans(&bad, 1, &KMeansParams::default()),
            Err(ClusterError::NonFinite)
        ));
        let p = KMeansParams {
            restarts: 0,
            ..KMeansParams::default()
        };
        assert!(kmeans(&pts, 1, &p).is_err());
    }
}
