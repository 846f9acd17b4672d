//! Continuous unified Ricci curvature, its masked and idle variants, baseline
//! curvatures and two computable lower bounds.

mod baseline;
mod bounds;
mod idle;
mod report;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::DirectedWeightedGraph;
use crate::metric::{self, QuasiMetric};
use crate::spectral::{self, PerronKernel};
use crate::transport;

pub use baseline::{forman, forman_report, ollivier, ollivier_kernel};
pub use bounds::{lb1, lb1_pair, lb2, lb2_pair, max_weight_matching};
pub use idle::{idle_curc, idle_curc_pair};
pub use report::{quantile, CurvatureKind, CurvatureReport, PairValue, Summary};

/// Which ordered pairs a report covers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PairSelection {
    All,
    Edges,
    List(Vec<(usize, usize)>),
}

impl PairSelection {
    pub fn resolve(&self, g: &DirectedWeightedGraph) -> Result<Vec<(usize, usize)>> {
        let n = g.n();
        Ok(match self {
            PairSelection::All => (0..n)
                .flat_map(|x| (0..n).filter(move |&y| y != x).map(move |y| (x, y)))
                .collect(),
            PairSelection::Edges => g.edges().iter().map(|e| (e.src, e.dst)).collect(),
            PairSelection::List(pairs) => {
                for &(x, y) in pairs {
                    if x >= n || y >= n || x == y {
                        return Err(Error::InvalidPair(x, y));
                    }
                }
                pairs.clone()
            }
        })
    }
}

/// Kernel and distance shared by every pair of one graph.
#[derive(Clone, Debug)]
pub struct CurvatureContext {
    pub kernel: PerronKernel,
    pub metric: QuasiMetric,
}

impl CurvatureContext {
    /// Mean transition kernel with the ε → 0 limit distance.
    pub fn new(g: &DirectedWeightedGraph) -> Result<Self> {
        Ok(Self {
            kernel: spectral::mean_transition_kernel(g)?,
            metric: metric::limit_distance(g)?,
        })
    }

    pub fn with_epsilon(g: &DirectedWeightedGraph, eps: f64) -> Result<Self> {
        Ok(Self {
            kernel: spectral::mean_transition_kernel(g)?,
            metric: metric::epsilon_distance(g, eps)?,
        })
    }

    pub fn with_hops(g: &DirectedWeightedGraph) -> Result<Self> {
        Ok(Self {
            kernel: spectral::mean_transition_kernel(g)?,
            metric: metric::hop_distance(g)?,
        })
    }

    pub fn n(&self) -> usize {
        self.metric.n()
    }

    fn check_pair(&self, x: usize, y: usize) -> Result<()> {
        if x >= self.n() || y >= self.n() || x == y {
            return Err(Error::InvalidPair(x, y));
        }
        Ok(())
    }

    /// `κ(x, y) = 1 − W1(μ_x, μ_y) / d(x, y)`.
    pub fn kappa(&self, x: usize, y: usize) -> Result<f64> {
        self.check_pair(x, y)?;
        let mu = &self.kernel.mu;
        let w1 = transport::wasserstein1(mu.row(x), mu.row(y), &self.metric)?;
        Ok(1.0 - w1.cost / self.metric.get(x, y))
    }

    /// `ℋ_x = −Σ_y μ(x, y) d(x, y)`.
    pub fn mean_curvature(&self, x: usize) -> f64 {
        -(0..self.n())
            .map(|y| self.kernel.mu[(x, y)] * self.metric.get(x, y))
            .sum::<f64>()
    }

    /// Evaluates `f` on every pair in parallel, keeping the input order.
    pub fn evaluate(
        &self,
        kind: CurvatureKind,
        pairs: &[(usize, usize)],
        f: impl Fn(&Self, usize, usize) -> Result<f64> + Sync,
    ) -> Result<CurvatureReport> {
        let values = pairs
            .par_iter()
            .map(|&(x, y)| f(self, x, y).map(|kappa| PairValue { x, y, kappa }))
            .collect::<Result<Vec<_>>>()?;
        Ok(CurvatureReport::new(kind, values))
    }
}

/// Exact CURC on the selected pairs.
pub fn curc(g: &DirectedWeightedGraph, pairs: &PairSelection) -> Result<CurvatureReport> {
    let ctx = CurvatureContext::new(g)?;
    ctx.evaluate(CurvatureKind::Curc, &pairs.resolve(g)?, CurvatureContext::kappa)
}

/// CURC with the ε-masked distance in place of the limit distance.
pub fn curc_eps(g: &DirectedWeightedGraph, eps: f64, pairs: &PairSelection) -> Result<CurvatureReport> {
    let ctx = CurvatureContext::with_epsilon(g, eps)?;
    ctx.evaluate(CurvatureKind::CurcEps(eps), &pairs.resolve(g)?, CurvatureContext::kappa)
}

/// CURC with unit edge lengths, the comparison target of [`lb2`].
pub fn curc_hop(g: &DirectedWeightedGraph, pairs: &PairSelection) -> Result<CurvatureReport> {
    let ctx = CurvatureContext::with_hops(g)?;
    ctx.evaluate(CurvatureKind::CurcHop, &pairs.resolve(g)?, CurvatureContext::kappa)
}

/// Full `n × n` CURC matrix with zero diagonal.
pub fn curc_matrix(g: &DirectedWeightedGraph) -> Result<crate::matrix::DenseMatrix> {
    let report = curc(g, &PairSelection::All)?;
    let mut m = crate::matrix::DenseMatrix::zeros(g.n());
    for v in &report.values {
        m[(v.x, v.y)] = v.kappa;
    }
    Ok(m)
}

pub fn asymptotic_mean_curvature(g: &DirectedWeightedGraph, x: usize) -> Result<f64> {
    if x >= g.n() {
        return Err(Error::IndexOutOfRange { index: x, n: g.n() });
    }
    Ok(CurvatureContext::new(g)?.mean_curvature(x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate;

    fn value(r: &CurvatureReport, x: usize, y: usize) -> f64 {
        r.values.iter().find(|v| (v.x, v.y) == (x, y)).unwrap().kappa
    }

    #[test]
    fn curc_examples() {
        let two = generate::cycle(2);
        let r = curc(&two, &PairSelection::All).unwrap();
        assert_eq!(value(&r, 0, 1), 0.0);
        assert_eq!(value(&r, 1, 0), 0.0);

        let asym = DirectedWeightedGraph::new(2, [(0, 1, 2.0), (1, 0, 1.0)]).unwrap();
        let r = curc(&asym, &PairSelection::All).unwrap();
        assert!((value(&r, 0, 1) + 1.0).abs() < 1e-12);
        assert!((value(&r, 1, 0) - 0.5).abs() < 1e-12);

        let r = curc(&generate::complete(3), &PairSelection::All).unwrap();
        assert!(r.values.iter().all(|v| (v.kappa - 0.5).abs() < 1e-12));
    }

    #[test]
    fn eps_examples() {
        let k3 = generate::complete(3);
        let star = metric::epsilon_star(&k3).unwrap();
        let exact = curc(&k3, &PairSelection::All).unwrap();
        assert_eq!(curc_eps(&k3, star, &PairSelection::All).unwrap().values, exact.values);
        let huge = curc_eps(&k3, 5.0, &PairSelection::All).unwrap();
        assert!(huge.values.iter().all(|v| (v.kappa - 0.5).abs() < 1e-12));
    }

    #[test]
    fn eps_two_weight_square() {
        // C4 with heavy edges 0-1, 1-2 and light edges 2-3, 3-0.
        let g = DirectedWeightedGraph::new(
            4,
            [(0, 1, 1.0), (1, 0, 1.0), (1, 2, 1.0), (2, 1, 1.0), (2, 3, 0.1), (3, 2, 0.1), (3, 0, 0.1), (0, 3, 0.1)],
        )
        .unwrap();
        let eps = [0.05, 0.1, 0.3, 0.5, 1.0, 2.0];
        let expected: [(usize, [f64; 6]); 3] = [
            (1, [-9.0 / 11.0, -9.0 / 11.0, -7.0 / 33.0, -1.0 / 11.0, 0.0, 0.0]),
            (2, [1.0; 6]),
            (3, [9.0 / 11.0, 9.0 / 11.0, 7.0 / 11.0, 5.0 / 11.0, 0.0, 0.0]),
        ];
        for (k, &e) in eps.iter().enumerate() {
            let r = curc_eps(&g, e, &PairSelection::List(vec![(0, 1), (0, 2), (0, 3)])).unwrap();
            for (y, row) in &expected {
                let got = value(&r, 0, *y);
                assert!((got - row[k]).abs() < 1e-9, "eps {e} pair (0,{y}): {got} vs {}", row[k]);
            }
        }
    }

    #[test]
    fn mean_curvature_examples() {
        assert!((asymptotic_mean_curvature(&generate::complete(3), 1).unwrap() + 1.0).abs() < 1e-12);
        assert!((asymptotic_mean_curvature(&generate::cycle(2), 0).unwrap() + 1.0).abs() < 1e-12);
        let asym = DirectedWeightedGraph::new(2, [(0, 1, 2.0), (1, 0, 1.0)]).unwrap();
        assert!((asymptotic_mean_curvature(&asym, 0).unwrap() + 0.5).abs() < 1e-12);
    }

    #[test]
    fn pair_selection() {
        let g = generate::directed_cycle(3);
        assert_eq!(PairSelection::All.resolve(&g).unwrap().len(), 6);
        assert_eq!(PairSelection::Edges.resolve(&g).unwrap(), vec![(0, 1), (1, 2), (2, 0)]);
        assert!(matches!(
            PairSelection::List(vec![(1, 1)]).resolve(&g),
            Err(Error::InvalidPair(1, 1))
        ));
    }
}
