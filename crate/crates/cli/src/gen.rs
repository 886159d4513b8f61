//! Seeded synthetic data. All draws come from one `ChaCha8Rng` seeded with
//! `seed_from_u64(seed)`, in row-major order:
//!
//! * `uniform`: every coordinate uniform in `[-1, 1)`;
//! * `gaussian`: every coordinate standard normal;
//! * `clustered`: first 5 centers with coordinates uniform in `[-4, 4)`,
//!   then per point a uniformly chosen center plus normal noise of
//!   standard deviation 0.5 per coordinate.

use clap::ValueEnum;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

pub const CLUSTERS: usize = 5;
pub const CLUSTER_SPREAD: f64 = 4.0;
pub const CLUSTER_SIGMA: f64 = 0.5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Distribution {
    Uniform,
    Gaussian,
    Clustered,
}

pub struct Generator {
    rng: ChaCha8Rng,
    dist: Distribution,
    dim: usize,
    centers: Vec<Vec<f64>>,
}

impl Generator {
    pub fn new(dist: Distribution, dim: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let centers = match dist {
            Distribution::Clustered => (0..CLUSTERS)
                .map(|_| (0..dim).map(|_| rng.random_range(-CLUSTER_SPREAD..CLUSTER_SPREAD)).collect())
                .collect(),
            _ => Vec::new(),
        };
        Generator { rng, dist, dim, centers }
    }

    pub fn point(&mut self) -> Vec<f64> {
        match self.dist {
            Distribution::Uniform => (0..self.dim).map(|_| self.rng.random_range(-1.0..1.0)).collect(),
            Distribution::Gaussian => (0..self.dim).map(|_| self.rng.sample(StandardNormal)).collect(),
            Distribution::Clustered => {
                let c = self.rng.random_range(0..CLUSTERS);
                (0..self.dim)
                    .map(|t| {
                        let z: f64 = self.rng.sample(StandardNormal);
                        self.centers[c][t] + CLUSTER_SIGMA * z
                    })
                    .collect()
            }
        }
    }

    pub fn points(&mut self, n: usize) -> Vec<Vec<f64>> {
        (0..n).map(|_| self.point()).collect()
    }
}

pub fn points(dist: Distribution, n: usize, dim: usize, seed: u64) -> Vec<Vec<f64>> {
    Generator::new(dist, dim, seed).points(n)
}

/// `classes` color classes of `k` points each, drawn in order.
pub fn classes(dist: Distribution, classes: usize, k: usize, dim: usize, seed: u64) -> Vec<Vec<Vec<f64>>> {
    let mut g = Generator::new(dist, dim, seed);
    (0..classes).map(|_| g.points(k)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_shaped() {
        for dist in [Distribution::Uniform, Distribution::Gaussian, Distribution::Clustered] {
            let a = points(dist, 100, 2, 9);
            assert_eq!(a, points(dist, 100, 2, 9));
            assert_ne!(a, points(dist, 100, 2, 10));
            assert_eq!(a.len(), 100);
            assert!(a.iter().all(|r| r.len() == 2));
        }
        assert!(points(Distribution::Uniform, 50, 3, 1).iter().flatten().all(|x| (-1.0..1.0).contains(x)));
        let c = classes(Distribution::Gaussian, 3, 4, 2, 5);
        assert_eq!((c.len(), c[0].len()), (3, 4));
    }
}
