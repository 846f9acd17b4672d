//! Closed-form lower bounds on CURC.

use super::{CurvatureContext, CurvatureKind, CurvatureReport, PairSelection};
use crate::error::{Error, Result};
use crate::graph::DirectedWeightedGraph;

/// Dual-potential lower bound, `O(n)` per pair once the kernel and distance
/// are known.
pub fn lb1_pair(ctx: &CurvatureContext, x: usize, y: usize) -> Result<f64> {
    ctx.check_pair(x, y)?;
    let mu = &ctx.kernel.mu;
    let d = &ctx.metric;
    let dxy = d.get(x, y);
    let dyx = d.get(y, x);
    let big_d = dxy.max(dyx);
    let h: f64 = (0..ctx.n())
        .map(|z| mu[(y, z)] * d.get(y, z) + mu[(x, z)] * d.get(z, x))
        .sum();
    let back = mu[(x, y)] + mu[(y, x)];
    Ok(-(2.0 * big_d / dxy) * (1.0 - back).max(0.0) + (dxy + big_d - h) / dxy - (big_d - dyx) / dxy * back)
}

pub fn lb1(g: &DirectedWeightedGraph, pairs: &PairSelection) -> Result<CurvatureReport> {
    let ctx = CurvatureContext::new(g)?;
    ctx.evaluate(CurvatureKind::Lb1, &pairs.resolve(g)?, lb1_pair)
}

/// Triangle and 4-cycle lower bound for an adjacent pair of a graph with
/// symmetric support, measured in hops. `ctx` must carry the hop metric.
pub fn lb2_pair(g: &DirectedWeightedGraph, ctx: &CurvatureContext, x: usize, y: usize) -> Result<f64> {
    ctx.check_pair(x, y)?;
    if !g.has_edge(x, y) {
        return Err(Error::NotAdjacent(x, y));
    }
    let mu = &ctx.kernel.mu;
    let adj = |a: usize, b: usize| g.has_edge(a, b);
    let nx: Vec<usize> = g.out_edges(x).iter().map(|e| e.dst).collect();
    let ny: Vec<usize> = g.out_edges(y).iter().map(|e| e.dst).collect();

    let common: Vec<usize> = nx.iter().copied().filter(|&z| z != y && adj(y, z)).collect();
    let tri_max: f64 = common.iter().map(|&z| mu[(x, z)].max(mu[(y, z)])).sum();
    let tri_min: f64 = common.iter().map(|&z| mu[(x, z)].min(mu[(y, z)])).sum();

    // z ∈ N_a \ N_b, z ≠ b, with some w ∈ (N_z ∩ N_b) \ N_a, w ≠ a.
    let squares = |a: usize, b: usize, na: &[usize]| -> Vec<usize> {
        na.iter()
            .copied()
            .filter(|&z| z != b && !adj(b, z))
            .filter(|&z| {
                g.out_edges(z)
                    .iter()
                    .any(|e| e.dst != a && adj(b, e.dst) && !adj(a, e.dst))
            })
            .collect()
    };
    let sq_x = squares(x, y, &nx);
    let sq_y = squares(y, x, &ny);
    let weights: Vec<Vec<f64>> = sq_x
        .iter()
        .map(|&z| {
            sq_y.iter()
                .map(|&w| if adj(z, w) { mu[(x, z)].min(mu[(y, w)]) } else { 0.0 })
                .collect()
        })
        .collect();
    let (s_sq, _) = max_weight_matching(&weights);

    let base = 1.0 - mu[(x, y)] - mu[(y, x)];
    Ok(-(base - tri_max - s_sq).max(0.0) - (base - tri_min - s_sq).max(0.0) + tri_min)
}

pub fn lb2(g: &DirectedWeightedGraph, pairs: &PairSelection) -> Result<CurvatureReport> {
    if let Some((a, b)) = g.first_unreciprocated() {
        return Err(Error::AsymmetricSupport(a, b));
    }
    let ctx = CurvatureContext::with_hops(g)?;
    ctx.evaluate(CurvatureKind::Lb2, &pairs.resolve(g)?, |c, x, y| lb2_pair(g, c, x, y))
}

/// Maximum-weight matching on a rectangular matrix of nonnegative weights
/// (Hungarian method). Returns the total and, per row, the matched column.
pub fn max_weight_matching(weights: &[Vec<f64>]) -> (f64, Vec<Option<usize>>) {
    let rows = weights.len();
    let cols = weights.first().map_or(0, Vec::len);
    if rows == 0 || cols == 0 {
        return (0.0, vec![None; rows]);
    }
    let k = rows.max(cols);
    let cost = |i: usize, j: usize| -> f64 {
        if i < rows && j < cols {
            -weights[i][j]
        } else {
            0.0
        }
    };
    // 1-indexed potentials formulation; p[j] is the row matched to column j.
    let inf = f64::INFINITY;
    let mut u = vec![0.0; k + 1];
    let mut v = vec![0.0; k + 1];
    let mut p = vec![0usize; k + 1];
    let mut way = vec![0usize; k + 1];
    for i in 1..=k {
        p[0] = i;
        let mut j0 = 0;
        let mut minv = vec![inf; k + 1];
        let mut used = vec![false; k + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = inf;
            let mut j1 = 0;
            for j in 1..=k {
                if !used[j] {
                    let cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=k {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut assignment = vec![None; rows];
    let mut total = 0.0;
    for j in 1..=k {
        let (i, c) = (p[j] - 1, j - 1);
        if i < rows && c < cols && weights[i][c] > 0.0 {
            assignment[i] = Some(c);
            total += weights[i][c];
        }
    }
    (total, assignment)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curvature::curc;
    use crate::generate;

    #[test]
    fn lb1_examples() {
        let two = generate::cycle(2);
        let r = lb1(&two, &PairSelection::All).unwrap();
        assert!(r.values.iter().all(|v| v.kappa.abs() < 1e-12));

        let k3 = generate::complete(3);
        let bound = lb1(&k3, &PairSelection::All).unwrap();
        let exact = curc(&k3, &PairSelection::All).unwrap();
        for (b, e) in bound.values.iter().zip(&exact.values) {
            assert!(b.kappa <= 0.5 + 1e-12 && b.kappa <= e.kappa + 1e-12);
        }
    }

    #[test]
    fn lb2_examples() {
        let edge = PairSelection::List(vec![(0, 1)]);
        let k3 = lb2(&generate::complete(3), &edge).unwrap();
        assert!((k3.values[0].kappa - 0.5).abs() < 1e-12);
        let c4 = lb2(&generate::cycle(4), &edge).unwrap();
        assert!(c4.values[0].kappa.abs() < 1e-12);
        let c6 = lb2(&generate::cycle(6), &edge).unwrap();
        assert!(c6.values[0].kappa.abs() < 1e-12);
    }

    #[test]
    fn lb2_preconditions() {
        let asym = generate::directed_cycle(3);
        let err = lb2(&asym, &PairSelection::Edges).unwrap_err();
        assert!(err.to_string().contains("symmetric support required"), "{err}");
        let err = lb2(&generate::cycle(4), &PairSelection::List(vec![(0, 2)])).unwrap_err();
        assert!(matches!(err, Error::NotAdjacent(0, 2)));
    }

    #[test]
    fn matching_prefers_heavier_total() {
        let w = vec![vec![3.0, 2.0], vec![2.5, 0.0]];
        let (total, a) = max_weight_matching(&w);
        assert_eq!(total, 4.5);
        assert_eq!(a, vec![Some(1), Some(0)]);
        let (total, a) = max_weight_matching(&[vec![1.0, 5.0, 2.0]]);
        assert_eq!((total, a), (5.0, vec![Some(1)]));
        assert_eq!(max_weight_matching(&[]).0, 0.0);
    }
}
