//! Seeded fixtures shared by the benchmarks.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use curvflow::transport::TransportResult;
use curvflow::{generate, DirectedWeightedGraph, QuasiMetric};

pub const SIZES: [usize; 3] = [8, 16, 32];

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Strongly connected digraph with roughly `3n` edges.
pub fn sparse_digraph(n: usize) -> DirectedWeightedGraph {
    generate::random_strongly_connected(&mut rng(n as u64), n, 2.0 / n as f64)
}

pub fn dense_digraph(n: usize) -> DirectedWeightedGraph {
    generate::lognormal_complete(&mut rng(n as u64 + 1000), n)
}

/// Kernel rows of the first and last vertex with the limit distance.
pub fn transport_instance(n: usize) -> (Vec<f64>, Vec<f64>, QuasiMetric) {
    let g = dense_digraph(n);
    let k = curvflow::spectral::mean_transition_kernel(&g).expect("strongly connected");
    let d = curvflow::metric::limit_distance(&g).expect("strongly connected");
    (k.mu.row(0).to_vec(), k.mu.row(n - 1).to_vec(), d)
}

pub fn solve(instance: &(Vec<f64>, Vec<f64>, QuasiMetric)) -> TransportResult {
    curvflow::transport::wasserstein1(&instance.0, &instance.1, &instance.2).expect("valid instance")
}
