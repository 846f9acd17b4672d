//! Idle curvature through its Laplacian characterization:
//! `κ^I(x, y) = min (ℒf(y) − ℒf(x)) / d(x, y)` over 1-Lipschitz `f` with
//! `f(y) − f(x) = d(x, y)`, where `ℒ = I − μ`.

use super::{CurvatureContext, CurvatureKind, CurvatureReport, PairSelection};
use crate::error::Result;
use crate::graph::DirectedWeightedGraph;
use crate::lp::{LinearProgram, Relation};

pub fn idle_curc_pair(ctx: &CurvatureContext, x: usize, y: usize) -> Result<f64> {
    ctx.check_pair(x, y)?;
    let n = ctx.n();
    let d = &ctx.metric;
    let mu = &ctx.kernel.mu;
    let dxy = d.get(x, y);

    // f(x) = 0, f(y) = d(x, y); the rest are shifted to g = f + d(·, x) ≥ 0.
    let free: Vec<usize> = (0..n).filter(|&z| z != x && z != y).collect();
    let mut col = vec![usize::MAX; n];
    for (k, &z) in free.iter().enumerate() {
        col[z] = k;
    }
    let fixed = |z: usize| -> Option<f64> {
        if z == x {
            Some(0.0)
        } else if z == y {
            Some(dxy)
        } else {
            None
        }
    };

    // ℒf(y) − ℒf(x) = d(x, y) + Σ_u (μ(x, u) − μ(y, u)) f(u).
    let c: Vec<f64> = (0..n).map(|u| mu[(x, u)] - mu[(y, u)]).collect();
    let constant = dxy + c[y] * dxy;
    let objective: Vec<f64> = free.iter().map(|&z| -c[z]).collect();
    let shift: f64 = free.iter().map(|&z| c[z] * d.get(z, x)).sum();

    let mut lp = LinearProgram::new(objective);
    for a in 0..n {
        for b in 0..n {
            if a == b || (fixed(a).is_some() && fixed(b).is_some()) {
                continue;
            }
            let dab = d.get(a, b);
            if (0..n).any(|k| k != a && k != b && d.get(a, k) + d.get(k, b) <= dab) {
                continue;
            }
            // f(b) − f(a) ≤ d(a, b)
            let mut row = vec![0.0; free.len()];
            let mut rhs = dab;
            match fixed(b) {
                Some(v) => rhs -= v,
                None => {
                    row[col[b]] += 1.0;
                    rhs += d.get(b, x);
                }
            }
            match fixed(a) {
                Some(v) => rhs += v,
                None => {
                    row[col[a]] -= 1.0;
                    rhs -= d.get(a, x);
                }
            }
            lp.add(row, Relation::Le, rhs);
        }
    }
    let sol = lp.maximize()?;
    // min Σ c f = −max(−Σ c g) − Σ c d(·, x)
    let min_linear = -sol.value - shift;
    Ok((constant + min_linear) / dxy)
}

pub fn idle_curc(g: &DirectedWeightedGraph, pairs: &PairSelection) -> Result<CurvatureReport> {
    let ctx = CurvatureContext::new(g)?;
    ctx.evaluate(CurvatureKind::IdleCurc, &pairs.resolve(g)?, idle_curc_pair)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate;

    #[test]
    fn idle_examples() {
        let r = idle_curc(&generate::cycle(2), &PairSelection::All).unwrap();
        assert!(r.values.iter().all(|v| (v.kappa - 2.0).abs() < 1e-12));
        let r = idle_curc(&generate::complete(3), &PairSelection::All).unwrap();
        assert!(r.values.iter().all(|v| (v.kappa - 1.5).abs() < 1e-9), "{:?}", r.values);
    }
}
