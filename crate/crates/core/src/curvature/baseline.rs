//! Ollivier–Ricci and Forman–Ricci curvature on unweighted undirected graphs.

use rayon::prelude::*;

use super::{CurvatureKind, CurvatureReport, PairSelection, PairValue};
use crate::error::{Error, Result};
use crate::graph::DirectedWeightedGraph;
use crate::matrix::DenseMatrix;
use crate::metric::{hop_distance, QuasiMetric};
use crate::transport::wasserstein1;

fn require_simple(g: &DirectedWeightedGraph) -> Result<()> {
    if let Some((a, b)) = g.first_unreciprocated() {
        return Err(Error::NotUnweightedUndirected(format!("edge {a} -> {b} has no reverse")));
    }
    if let Some(e) = g.edges().iter().find(|e| e.weight != 1.0) {
        return Err(Error::NotUnweightedUndirected(format!(
            "edge {} -> {} has weight {}",
            e.src, e.dst, e.weight
        )));
    }
    Ok(())
}

/// Uniform neighbour measures `μ_x(y) = 1/deg(x)` and hop distances.
pub fn ollivier_kernel(g: &DirectedWeightedGraph) -> Result<(DenseMatrix, QuasiMetric)> {
    require_simple(g)?;
    let d = hop_distance(g)?;
    let mut mu = DenseMatrix::zeros(g.n());
    for x in 0..g.n() {
        let deg = g.out_degree(x) as f64;
        for e in g.out_edges(x) {
            mu[(x, e.dst)] = 1.0 / deg;
        }
    }
    Ok((mu, d))
}

/// `κ_OR(x, y) = 1 − W1(μ_x, μ_y) / d_G(x, y)`.
pub fn ollivier(g: &DirectedWeightedGraph, pairs: &PairSelection) -> Result<CurvatureReport> {
    let (mu, d) = ollivier_kernel(g)?;
    let values = pairs
        .resolve(g)?
        .par_iter()
        .map(|&(x, y)| {
            let w1 = wasserstein1(mu.row(x), mu.row(y), &d)?;
            Ok(PairValue {
                x,
                y,
                kappa: 1.0 - w1.cost / d.get(x, y),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CurvatureReport::new(CurvatureKind::Ollivier, values))
}

/// `κ_FR(x, y) = 4 − deg(x) − deg(y) + 3 · #triangles on the edge`.
pub fn forman(g: &DirectedWeightedGraph, x: usize, y: usize) -> Result<f64> {
    require_simple(g)?;
    if x >= g.n() || y >= g.n() || x == y {
        return Err(Error::InvalidPair(x, y));
    }
    if !g.has_edge(x, y) {
        return Err(Error::NotAdjacent(x, y));
    }
    let triangles = g
        .out_edges(x)
        .iter()
        .filter(|e| e.dst != y && g.has_edge(y, e.dst))
        .count();
    Ok(4.0 - g.out_degree(x) as f64 - g.out_degree(y) as f64 + 3.0 * triangles as f64)
}

pub fn forman_report(g: &DirectedWeightedGraph, pairs: &PairSelection) -> Result<CurvatureReport> {
    let values = pairs
        .resolve(g)?
        .into_iter()
        .map(|(x, y)| forman(g, x, y).map(|kappa| PairValue { x, y, kappa }))
        .collect::<Result<Vec<_>>>()?;
    Ok(CurvatureReport::new(CurvatureKind::Forman, values))
}
