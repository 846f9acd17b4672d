//! Deterministic graph families and seeded random generators used by tests,
//! benchmarks and the acceptance suite.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, LogNormal};

use crate::graph::DirectedWeightedGraph;
use crate::matrix::DenseMatrix;

fn undirected_edges(pairs: impl IntoIterator<Item = (usize, usize)>) -> Vec<(usize, usize, f64)> {
    pairs
        .into_iter()
        .flat_map(|(a, b)| [(a, b, 1.0), (b, a, 1.0)])
        .collect()
}

/// Unit-weight undirected graph from an edge list.
/// Repeated pairs in either orientation collapse to one edge.
pub fn undirected(n: usize, pairs: &[(usize, usize)]) -> DirectedWeightedGraph {
    let mut canon: Vec<_> = pairs.iter().map(|&(a, b)| (a.min(b), a.max(b))).collect();
    canon.sort_unstable();
    canon.dedup();
    DirectedWeightedGraph::new(n, undirected_edges(canon)).expect("valid undirected graph")
}

/// Undirected cycle `C_n` with unit weights.
pub fn cycle(n: usize) -> DirectedWeightedGraph {
    let pairs: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
    undirected(n, &pairs)
}

/// Directed cycle `0 → 1 → … → n−1 → 0` with unit weights.
pub fn directed_cycle(n: usize) -> DirectedWeightedGraph {
    DirectedWeightedGraph::new(n, (0..n).map(|i| (i, (i + 1) % n, 1.0))).expect("valid cycle")
}

/// Complete digraph `K_n` with unit weights.
pub fn complete(n: usize) -> DirectedWeightedGraph {
    let edges = (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j, 1.0)));
    DirectedWeightedGraph::new(n, edges).expect("valid complete graph")
}

/// Undirected path on `n` vertices.
pub fn path(n: usize) -> DirectedWeightedGraph {
    let pairs: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
    undirected(n, &pairs)
}

/// Two disjoint triangles.
pub fn two_triangles() -> DirectedWeightedGraph {
    cycle(3).disjoint_union(&cycle(3)).expect("valid union")
}

/// Row-stochastic attention on `n` vertices: cycle neighbours get weight 1,
/// other off-diagonal pairs `10^{-t}`, the diagonal 1, then rows are
/// normalized. `t = 0` is uniform attention over `K_n`.
pub fn decaying_off_cycle(n: usize, t: u32) -> DenseMatrix {
    let off = 10f64.powi(-(t as i32));
    let raw = DenseMatrix::from_fn(n, |i, j| {
        let gap = (i + n - j) % n;
        if i == j || gap == 1 || gap == n - 1 {
            1.0
        } else {
            off
        }
    });
    let rows = raw
        .rows()
        .map(|r| {
            let s: f64 = r.iter().sum();
            r.iter().map(|x| x / s).collect()
        })
        .collect();
    DenseMatrix::from_rows(rows).expect("square")
}

fn random_tree<R: Rng>(rng: &mut R, n: usize) -> Vec<(usize, usize)> {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    (1..n)
        .map(|k| {
            let parent = order[rng.random_range(0..k)];
            (parent.min(order[k]), parent.max(order[k]))
        })
        .collect()
}

/// Connected undirected structure: random spanning tree plus each remaining
/// pair independently with probability `p`.
fn connected_pairs<R: Rng>(rng: &mut R, n: usize, p: f64) -> Vec<(usize, usize)> {
    let mut pairs = random_tree(rng, n);
    for a in 0..n {
        for b in a + 1..n {
            if !pairs.contains(&(a, b)) && rng.random_bool(p) {
                pairs.push((a, b));
            }
        }
    }
    pairs.sort_unstable();
    pairs
}

/// Connected unit-weight undirected graph.
pub fn random_connected_undirected<R: Rng>(rng: &mut R, n: usize, p: f64) -> DirectedWeightedGraph {
    undirected(n, &connected_pairs(rng, n, p))
}

/// Undirected `G(n, p)` with unit weights, possibly disconnected.
pub fn random_undirected<R: Rng>(rng: &mut R, n: usize, p: f64) -> DirectedWeightedGraph {
    let mut pairs = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if rng.random_bool(p) {
                pairs.push((a, b));
            }
        }
    }
    undirected(n, &pairs)
}

fn weight<R: Rng>(rng: &mut R) -> f64 {
    // Spread over two decades so the metric is genuinely weighted.
    10f64.powf(rng.random_range(-1.0..1.0))
}

/// Connected symmetric support with independent weights in each direction.
pub fn random_symmetric_support<R: Rng>(rng: &mut R, n: usize, p: f64) -> DirectedWeightedGraph {
    let pairs = connected_pairs(rng, n, p);
    let edges: Vec<_> = pairs
        .into_iter()
        .flat_map(|(a, b)| {
            let (wa, wb) = (weight(rng), weight(rng));
            [(a, b, wa), (b, a, wb)]
        })
        .collect();
    DirectedWeightedGraph::new(n, edges).expect("valid symmetric graph")
}

/// Strongly connected weighted digraph: a random Hamiltonian cycle plus each
/// other ordered pair with probability `p`.
pub fn random_strongly_connected<R: Rng>(rng: &mut R, n: usize, p: f64) -> DirectedWeightedGraph {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut present = vec![false; n * n];
    let mut edges = Vec::new();
    if n > 1 {
        for k in 0..n {
            let (a, b) = (order[k], order[(k + 1) % n]);
            present[a * n + b] = true;
        }
    }
    for a in 0..n {
        for b in 0..n {
            if a != b && !present[a * n + b] && rng.random_bool(p) {
                present[a * n + b] = true;
            }
        }
    }
    for a in 0..n {
        for b in 0..n {
            if present[a * n + b] {
                edges.push((a, b, weight(rng)));
            }
        }
    }
    DirectedWeightedGraph::new(n, edges).expect("valid digraph")
}

/// Complete digraph with independent log-normal(0, 1) weights.
pub fn lognormal_complete<R: Rng>(rng: &mut R, n: usize) -> DirectedWeightedGraph {
    let dist = LogNormal::new(0.0, 1.0).expect("valid parameters");
    let mut edges = Vec::new();
    for a in 0..n {
        for b in 0..n {
            if a != b {
                edges.push((a, b, dist.sample(rng)));
            }
        }
    }
    DirectedWeightedGraph::new(n, edges).expect("valid digraph")
}

/// Uniformly random permutation of `0..n`.
pub fn permutation<R: Rng>(rng: &mut R, n: usize) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    p.shuffle(rng);
    p
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn random_families_have_their_shape() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in 2..10 {
            let g = random_strongly_connected(&mut rng, n, 0.3);
            assert!(g.assert_strongly_connected().is_ok());
            let u = random_connected_undirected(&mut rng, n, 0.3);
            assert!(u.is_unweighted_undirected() && u.assert_strongly_connected().is_ok());
            let s = random_symmetric_support(&mut rng, n, 0.3);
            assert!(s.has_symmetric_support() && s.assert_strongly_connected().is_ok());
            assert_eq!(lognormal_complete(&mut rng, n).edges().len(), n * (n - 1));
        }
    }

    #[test]
    fn fixed_families() {
        assert_eq!(cycle(6).edges().len(), 12);
        assert_eq!(two_triangles().n(), 6);
        assert_eq!(complete(3).edges().len(), 6);
        assert_eq!(path(3).edges().len(), 4);
        assert!(directed_cycle(4).assert_strongly_connected().is_ok());
    }
}
