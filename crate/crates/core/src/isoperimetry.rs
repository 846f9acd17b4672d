//! Boundary Perron measure and the brute-force Dirichlet isoperimetric
//! constant, together with its curvature lower bound `(K R + Λ) / D`.

use rayon::prelude::*;
use serde::Serialize;

use crate::curvature::{quantile, CurvatureContext};
use crate::error::{Error, Result};
use crate::graph::DirectedWeightedGraph;
use crate::spectral::PerronKernel;

/// Largest region enumerated exhaustively.
pub const MAX_REGION: usize = 20;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IsoperimetryResult {
    pub x: usize,
    #[serde(rename = "R")]
    pub r: f64,
    pub region: Vec<usize>,
    #[serde(rename = "I")]
    pub i: f64,
    pub argmin_subset: Vec<usize>,
    pub bound: f64,
    pub bound_active: bool,
    #[serde(rename = "K")]
    pub k: f64,
    #[serde(rename = "Lambda")]
    pub lambda: f64,
    #[serde(rename = "D")]
    pub d: f64,
}

fn membership(n: usize, omega: &[usize]) -> Result<Vec<bool>> {
    let mut inside = vec![false; n];
    for &v in omega {
        if v >= n || inside[v] {
            return Err(Error::InvalidSubset);
        }
        inside[v] = true;
    }
    if omega.is_empty() || omega.len() == n {
        return Err(Error::InvalidSubset);
    }
    Ok(inside)
}

fn boundary(k: &PerronKernel, inside: &[bool]) -> f64 {
    let n = inside.len();
    let mut total = 0.0;
    for y in (0..n).filter(|&y| inside[y]) {
        let out: f64 = (0..n).filter(|&z| !inside[z]).map(|z| k.mu[(y, z)]).sum();
        total += k.m[y] * out;
    }
    total
}

/// `m(∂Ω) = Σ_{y ∈ Ω} Σ_{z ∉ Ω} m(y) μ(y, z)`.
pub fn boundary_measure(k: &PerronKernel, omega: &[usize]) -> Result<f64> {
    let inside = membership(k.m.len(), omega)?;
    Ok(boundary(k, &inside))
}

/// The same quantity summed from the complement side,
/// `Σ_{z ∉ Ω} Σ_{y ∈ Ω} m(z) μ(z, y)`; equal by detailed balance.
pub fn boundary_measure_reflected(k: &PerronKernel, omega: &[usize]) -> Result<f64> {
    let inside = membership(k.m.len(), omega)?;
    let outside: Vec<bool> = inside.iter().map(|b| !b).collect();
    Ok(boundary(k, &outside))
}

/// Quantiles {0, .25, .5, .75, 1} of `d(x, y)` over `y ≠ x`.
pub fn distance_quantiles(ctx: &CurvatureContext, x: usize) -> Vec<f64> {
    let mut ds: Vec<f64> = (0..ctx.n()).filter(|&y| y != x).map(|y| ctx.metric.get(x, y)).collect();
    if ds.is_empty() {
        return Vec::new();
    }
    ds.sort_by(f64::total_cmp);
    [0.0, 0.25, 0.5, 0.75, 1.0].iter().map(|&q| quantile(&ds, q)).collect()
}

/// Curvature data of a base vertex: `K = min_y κ(x, y)`, `Λ = ℋ_x`,
/// `D = max_y d(x, y)`.
pub fn base_curvature(ctx: &CurvatureContext, x: usize) -> Result<(f64, f64, f64)> {
    let n = ctx.n();
    let k = (0..n)
        .filter(|&y| y != x)
        .map(|y| ctx.kappa(x, y))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    let d = (0..n).map(|y| ctx.metric.get(x, y)).fold(0.0, f64::max);
    Ok((k, ctx.mean_curvature(x), d))
}

pub fn dirichlet_constant(g: &DirectedWeightedGraph, x: usize, r: f64) -> Result<IsoperimetryResult> {
    if x >= g.n() {
        return Err(Error::IndexOutOfRange { index: x, n: g.n() });
    }
    let ctx = CurvatureContext::new(g)?;
    let base = base_curvature(&ctx, x)?;
    dirichlet_constant_with(&ctx, x, r, base)
}

/// Brute-force minimum of `m(∂Ω) / m(Ω)` over nonempty `Ω ⊆ E_R(x)`, where
/// `E_R(x) = {y : d(x, y) ≥ R}`. Ties go to the lexicographically smallest
/// sorted vertex list.
pub fn dirichlet_constant_with(
    ctx: &CurvatureContext,
    x: usize,
    r: f64,
    (k, lambda, d): (f64, f64, f64),
) -> Result<IsoperimetryResult> {
    let n = ctx.n();
    let region: Vec<usize> = (0..n).filter(|&y| ctx.metric.get(x, y) >= r).collect();
    if region.is_empty() {
        return Err(Error::EmptyRegion);
    }
    if region.len() > MAX_REGION {
        return Err(Error::RegionTooLarge(region.len(), MAX_REGION));
    }
    let kernel = &ctx.kernel;
    let ratio = |mask: u32| -> f64 {
        let mut inside = vec![false; n];
        let mut mass = 0.0;
        for (bit, &v) in region.iter().enumerate() {
            if mask >> bit & 1 == 1 {
                inside[v] = true;
                mass += kernel.m[v];
            }
        }
        boundary(kernel, &inside) / mass
    };
    let members = |mask: u32| -> Vec<usize> {
        region
            .iter()
            .enumerate()
            .filter(|(bit, _)| mask >> bit & 1 == 1)
            .map(|(_, &v)| v)
            .collect()
    };
    let better = |a: (f64, u32), b: (f64, u32)| -> (f64, u32) {
        match a.0.total_cmp(&b.0) {
            std::cmp::Ordering::Less => a,
            std::cmp::Ordering::Greater => b,
            std::cmp::Ordering::Equal => {
                if members(a.1) <= members(b.1) {
                    a
                } else {
                    b
                }
            }
        }
    };
    let full = (1u32 << region.len()) - 1;
    let (best, mask) = (1..=full)
        .into_par_iter()
        .map(|mask| (ratio(mask), mask))
        .reduce(|| (f64::INFINITY, 0), |a, b| if a.1 == 0 { b } else if b.1 == 0 { a } else { better(a, b) });
    let activity = k * r + lambda;
    Ok(IsoperimetryResult {
        x,
        r,
        argmin_subset: members(mask),
        region,
        i: best,
        bound: activity / d,
        bound_active: activity > 0.0,
        k,
        lambda,
        d,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate;
    use crate::spectral::mean_transition_kernel;

    #[test]
    fn boundary_examples() {
        let k = mean_transition_kernel(&generate::complete(3)).unwrap();
        assert!((boundary_measure(&k, &[1]).unwrap() - 1.0 / 3.0).abs() < 1e-12);
        assert!((boundary_measure(&k, &[1, 2]).unwrap() - 1.0 / 3.0).abs() < 1e-12);
        let two = mean_transition_kernel(&generate::cycle(2)).unwrap();
        assert!((boundary_measure(&two, &[0]).unwrap() - 0.5).abs() < 1e-12);
        assert!(matches!(boundary_measure(&two, &[]), Err(Error::InvalidSubset)));
        assert!(matches!(boundary_measure(&two, &[0, 1]), Err(Error::InvalidSubset)));
    }

    #[test]
    fn reflected_boundary_agrees() {
        let g = DirectedWeightedGraph::new(
            4,
            [(0, 1, 2.0), (1, 2, 0.5), (2, 3, 1.5), (3, 0, 1.0), (2, 0, 0.3), (1, 3, 4.0)],
        )
        .unwrap();
        let k = mean_transition_kernel(&g).unwrap();
        for omega in [vec![0], vec![1, 3], vec![0, 2, 3]] {
            let a = boundary_measure(&k, &omega).unwrap();
            let b = boundary_measure_reflected(&k, &omega).unwrap();
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn dirichlet_examples() {
        let r = dirichlet_constant(&generate::complete(3), 0, 1.0).unwrap();
        assert_eq!(r.region, vec![1, 2]);
        assert!((r.i - 0.5).abs() < 1e-12);
        assert_eq!(r.argmin_subset, vec![1, 2]);

        let r = dirichlet_constant(&generate::cycle(2), 0, 1.0).unwrap();
        assert_eq!(r.region, vec![1]);
        assert!((r.i - 1.0).abs() < 1e-12);
        // K = 0, Λ = −1: vacuous.
        assert!(!r.bound_active);

        assert!(matches!(
            dirichlet_constant(&generate::cycle(2), 0, 5.0),
            Err(Error::EmptyRegion)
        ));
    }

    #[test]
    fn json_keys() {
        let r = dirichlet_constant(&generate::complete(3), 0, 1.0).unwrap();
        let v = serde_json::to_value(&r).unwrap();
        for key in ["x", "R", "region", "I", "argmin_subset", "bound", "bound_active", "K", "Lambda", "D"] {
            assert!(v.get(key).is_some(), "missing {key}");
        }
    }
}
