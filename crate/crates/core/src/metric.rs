//! Reciprocal edge lengths and asymmetric all-pairs shortest paths.

use std::collections::VecDeque;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::DirectedWeightedGraph;
use crate::matrix::DenseMatrix;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "mode", content = "eps", rename_all = "snake_case")]
pub enum DistanceMode {
    Limit,
    Epsilon(f64),
    Hop,
}

/// All-pairs distances; zero diagonal, triangle inequality, not symmetric.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QuasiMetric {
    pub d: DenseMatrix,
    pub mode: DistanceMode,
}

impl QuasiMetric {
    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.d[(x, y)]
    }

    pub fn n(&self) -> usize {
        self.d.n()
    }

    /// Largest finite distance over ordered pairs.
    pub fn diameter(&self) -> f64 {
        self.d.as_slice().iter().copied().fold(0.0, f64::max)
    }
}

/// ε-masked reciprocal lengths: `1/ω` on edges with `ω ≥ ε`, `1/ε` elsewhere.
pub fn reciprocal_lengths(g: &DirectedWeightedGraph, eps: f64) -> Result<DenseMatrix> {
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(Error::InvalidEpsilon(eps));
    }
    let n = g.n();
    let mut len = DenseMatrix::from_fn(n, |x, y| if x == y { 0.0 } else { 1.0 / eps });
    for e in g.edges() {
        if e.weight >= eps {
            len[(e.src, e.dst)] = 1.0 / e.weight;
        }
    }
    Ok(len)
}

/// Floyd–Warshall closure of a nonnegative length matrix.
pub fn shortest_paths(lengths: &DenseMatrix, mode: DistanceMode) -> QuasiMetric {
    let n = lengths.n();
    let mut d = lengths.clone();
    for k in 0..n {
        let dk: Vec<f64> = d.row(k).to_vec();
        for i in 0..n {
            let dik = d[(i, k)];
            if dik == f64::INFINITY {
                continue;
            }
            let row = d.row_mut(i);
            for (dij, dkj) in row.iter_mut().zip(&dk) {
                let via = dik + dkj;
                if via < *dij {
                    *dij = via;
                }
            }
        }
    }
    QuasiMetric { d, mode }
}

/// The ε → 0 distance: shortest paths over support edges with length `1/ω`.
pub fn limit_distance(g: &DirectedWeightedGraph) -> Result<QuasiMetric> {
    g.assert_strongly_connected()?;
    let n = g.n();
    let mut len = DenseMatrix::from_fn(n, |x, y| if x == y { 0.0 } else { f64::INFINITY });
    for e in g.edges() {
        len[(e.src, e.dst)] = 1.0 / e.weight;
    }
    Ok(shortest_paths(&len, DistanceMode::Limit))
}

pub fn epsilon_distance(g: &DirectedWeightedGraph, eps: f64) -> Result<QuasiMetric> {
    let len = reciprocal_lengths(g, eps)?;
    Ok(shortest_paths(&len, DistanceMode::Epsilon(eps)))
}

/// Unweighted BFS distances along edge directions.
pub fn hop_distance(g: &DirectedWeightedGraph) -> Result<QuasiMetric> {
    g.assert_strongly_connected()?;
    let hops = bfs_hops(g);
    let d = DenseMatrix::from_fn(g.n(), |x, y| hops[x][y].map_or(f64::INFINITY, |h| h as f64));
    Ok(QuasiMetric {
        d,
        mode: DistanceMode::Hop,
    })
}

/// Hop counts from every source; `None` where unreachable.
pub fn bfs_hops(g: &DirectedWeightedGraph) -> Vec<Vec<Option<usize>>> {
    let n = g.n();
    (0..n)
        .map(|s| {
            let mut dist = vec![None; n];
            dist[s] = Some(0);
            let mut queue = VecDeque::from([s]);
            while let Some(v) = queue.pop_front() {
                let dv = dist[v].unwrap();
                for e in g.out_edges(v) {
                    if dist[e.dst].is_none() {
                        dist[e.dst] = Some(dv + 1);
                        queue.push_back(e.dst);
                    }
                }
            }
            dist
        })
        .collect()
}

/// A threshold below which the ε-masked distance equals the limit distance:
/// `min(min edge weight, 1 / (2 · weighted diameter))`.
pub fn epsilon_star(g: &DirectedWeightedGraph) -> Result<f64> {
    let d = limit_distance(g)?;
    let w_min = g.min_weight().ok_or(Error::NoEdges)?;
    let diam = d.diameter();
    Ok(if diam > 0.0 { w_min.min(0.5 / diam) } else { w_min })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn asym() -> DirectedWeightedGraph {
        DirectedWeightedGraph::new(2, [(0, 1, 2.0), (1, 0, 1.0)]).unwrap()
    }

    fn cycle(n: usize, both: bool) -> DirectedWeightedGraph {
        let mut edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n, 1.0)).collect();
        if both {
            edges.extend((0..n).map(|i| ((i + 1) % n, i, 1.0)));
        }
        DirectedWeightedGraph::new(n, edges).unwrap()
    }

    #[test]
    fn reciprocal_examples() {
        assert_eq!(reciprocal_lengths(&asym(), 0.1).unwrap()[(0, 1)], 0.5);
        let g = DirectedWeightedGraph::new(3, [(0, 1, 0.005), (1, 2, 1.0), (2, 0, 1.0)]).unwrap();
        let len = reciprocal_lengths(&g, 0.01).unwrap();
        assert_eq!(len[(0, 2)], 100.0);
        assert_eq!(len[(0, 1)], 100.0);
        assert_eq!(len[(1, 2)], 1.0);
        assert!(matches!(reciprocal_lengths(&g, 0.0), Err(Error::InvalidEpsilon(_))));
    }

    #[test]
    fn shortest_path_examples() {
        let d = limit_distance(&asym()).unwrap();
        assert_eq!((d.get(0, 1), d.get(1, 0)), (0.5, 1.0));

        let d = limit_distance(&cycle(3, false)).unwrap();
        assert_eq!((d.get(0, 1), d.get(1, 0)), (1.0, 2.0));

        let path = DirectedWeightedGraph::new(3, [(0, 1, 1.0), (1, 0, 1.0), (1, 2, 1.0), (2, 1, 1.0)]).unwrap();
        assert_eq!(limit_distance(&path).unwrap().get(0, 2), 2.0);
    }

    #[test]
    fn softmax_complete_graph() {
        let g = DirectedWeightedGraph::from_dense(&DenseMatrix::filled(4, 0.25), 0.0).unwrap();
        let d = limit_distance(&g).unwrap();
        for x in 0..4 {
            for y in 0..4 {
                assert_eq!(d.get(x, y), if x == y { 0.0 } else { 4.0 });
            }
        }
    }

    #[test]
    fn hop_examples() {
        let c6 = cycle(6, true);
        let hop = hop_distance(&c6).unwrap();
        assert_eq!(hop.get(0, 1), 1.0);
        assert_eq!(hop.get(0, 3), 3.0);
        assert_eq!(limit_distance(&c6).unwrap(), QuasiMetric { d: hop.d, mode: DistanceMode::Limit });
        let k3 = DirectedWeightedGraph::from_dense(&DenseMatrix::filled(3, 1.0), 0.0).unwrap();
        assert_eq!(hop_distance(&k3).unwrap().get(2, 0), 1.0);
    }

    #[test]
    fn epsilon_below_star_matches_limit() {
        let g = DirectedWeightedGraph::new(
            3,
            [(0, 1, 2.0), (1, 2, 0.3), (2, 0, 5.0), (1, 0, 0.7)],
        )
        .unwrap();
        let star = epsilon_star(&g).unwrap();
        let limit = limit_distance(&g).unwrap();
        for eps in [star, star / 3.0, star * 1e-4] {
            assert_eq!(epsilon_distance(&g, eps).unwrap().d, limit.d);
        }
    }

    #[test]
    fn disconnected_is_rejected() {
        let g = DirectedWeightedGraph::new(2, [(0, 1, 1.0)]).unwrap();
        assert!(matches!(limit_distance(&g), Err(Error::NotStronglyConnected { .. })));
        assert!(matches!(hop_distance(&g), Err(Error::NotStronglyConnected { .. })));
    }
}
