//! Two-moons and two-circles generators: the classic shapes on which plain
//! k-means fails and spectral clustering succeeds.

use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::{DataError, Dataset};
use crate::matrix::DenseMatrix;

fn check(n: usize, noise: f64) -> Result<(), DataError> {
    if n < 4 || !n.is_multiple_of(2) {
        return Err(DataError::Invalid(format!(
            "sample count must be even and at least 4, got {n}"
        )));
    }
    if !(noise >= 0.0) || !noise.is_finite() {
        return Err(DataError::Invalid(format!(
            "noise must be >= 0, got {noise}"
        )));
    }
    Ok(())
}

fn jitter(points: &mut DenseMatrix, noise: f64, seed: u64) {
    if noise == 0.0 {
        return;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, noise).expect("noise validated");
    for v in points.as_mut_slice() {
        *v += normal.sample(&mut rng);
    }
}

/// Two interleaved half circles of radius 1: the upper arc centred at the
/// origin (label 0) and the lower arc centred at `(1, 0.5)` (label 1).
pub fn make_two_moons(n: usize, noise: f64, seed: u64) -> Result<Dataset, DataError> {
    check(n, noise)?;
    let half = n / 2;
    let mut pts = DenseMatrix::zeros(n, 2);
    let mut labels = Vec::with_capacity(n);
    for i in 0..half {
        let t = PI * i as f64 / (half - 1) as f64;
        pts[(i, 0)] = t.cos();
        pts[(i, 1)] = t.sin();
        labels.push(0);
    }
    for i in 0..half {
        let t = PI * i as f64 / (half - 1) as f64;
        pts[(half + i, 0)] = 1.0 - t.cos();
        pts[(half + i, 1)] = 0.5 - t.sin();
        labels.push(1);
    }
    jitter(&mut pts, noise, seed);
    Dataset::new(pts, Some(labels), "two_moons")
}

/// Two concentric circles: radius 1 (label 0) and `radius_ratio` (label 1).
pub fn make_two_circles(
    n: usize,
    radius_ratio: f64,
    noise: f64,
    seed: u64,
) -> Result<Dataset, DataError> {
    check(n, noise)?;
    if !(radius_ratio > 0.0 && radius_ratio < 1.0) {
        return Err(DataError::Invalid(format!(
            "radius ratio must lie in (0, 1), got {radius_ratio}"
        )));
    }
    let half = n / 2;
    let mut pts = DenseMatrix::zeros(n, 2);
    let mut labels = Vec::with_capacity(n);
    for (class, radius) in [(0usize, 1.0), (1, radius_ratio)] {
        for i in 0..half {
            let t = 2.0 * PI * i as f64 / half as f64;
            let r = class * half + i;
            pts[(r, 0)] = radius * t.cos();
            pts[(r, 1)] = radius * t.sin();
            labels.push(class);
        }
    }
    jitter(&mut pts, noise, seed);
    Dataset::new(pts, Some(labels), "two_circles")
}
