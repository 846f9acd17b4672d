//! Perron measure, mean transition kernel and the α-idle kernel.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::DirectedWeightedGraph;
use crate::matrix::DenseMatrix;

const POWER_TOL: f64 = 1e-12;
const POWER_CAP: usize = 1_000_000;
const RESIDUAL_TOL: f64 = 1e-10;

/// Stationary data of the random walk on a strongly connected graph.
#[derive(Clone, Debug, Serialize)]
pub struct PerronKernel {
    /// Perron measure, normalized to a probability vector.
    pub m: Vec<f64>,
    /// Random walk matrix.
    pub w: DenseMatrix,
    /// Mean transition kernel; zero diagonal, row-stochastic.
    pub mu: DenseMatrix,
    /// `max_y |(mW)(y) - m(y)|`.
    pub residual: f64,
}

/// Stationary residual `‖mW − m‖∞`.
pub fn stationarity_residual(w: &DenseMatrix, m: &[f64]) -> f64 {
    w.left_mul(m)
        .iter()
        .zip(m)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max)
}

/// Perron measure of a row-stochastic matrix from the uniform start vector.
pub fn perron_measure(w: &DenseMatrix) -> Result<(Vec<f64>, f64)> {
    let n = w.n();
    perron_measure_from(w, &vec![1.0 / n as f64; n])
}

/// Power iteration on the lazy chain `(I + W) / 2` from a positive start
/// vector. Falls back to a dense solve when the residual stays above 1e-10.
pub fn perron_measure_from(w: &DenseMatrix, start: &[f64]) -> Result<(Vec<f64>, f64)> {
    let n = w.n();
    if start.len() != n {
        return Err(Error::DimensionMismatch {
            context: "perron start vector".into(),
            expected: n,
            found: start.len(),
        });
    }
    let mut m = normalized(start.to_vec());
    for _ in 0..POWER_CAP {
        let mw = w.left_mul(&m);
        let next: Vec<f64> = m.iter().zip(&mw).map(|(a, b)| 0.5 * (a + b)).collect();
        let next = normalized(next);
        let delta = next
            .iter()
            .zip(&m)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        m = next;
        if delta <= POWER_TOL {
            break;
        }
    }
    let residual = stationarity_residual(w, &m);
    if residual <= RESIDUAL_TOL && m.iter().all(|&v| v > 0.0) {
        return Ok((m, residual));
    }
    let m = solve_stationary(w)?;
    let residual = stationarity_residual(w, &m);
    Ok((m, residual))
}

fn normalized(mut v: Vec<f64>) -> Vec<f64> {
    let total: f64 = v.iter().sum();
    for x in &mut v {
        *x /= total;
    }
    v
}

/// Solves `m(W − I) = 0`, `Σ m = 1` with partial pivoting.
fn solve_stationary(w: &DenseMatrix) -> Result<Vec<f64>> {
    let n = w.n();
    // Row i of the system is column i of (W - I); the last row is replaced by
    // the normalization constraint.
    let mut a: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let mut row: Vec<f64> = (0..n).map(|j| w[(j, i)] - if i == j { 1.0 } else { 0.0 }).collect();
            row.push(0.0);
            row
        })
        .collect();
    a[n - 1] = vec![1.0; n + 1];
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&p, &q| a[p][col].abs().total_cmp(&a[q][col].abs()))
            .unwrap();
        if a[pivot][col].abs() < 1e-300 {
            return Err(Error::SingularSystem);
        }
        a.swap(col, pivot);
        for r in 0..n {
            if r != col {
                let factor = a[r][col] / a[col][col];
                if factor != 0.0 {
                    for c in col..=n {
                        a[r][c] -= factor * a[col][c];
                    }
                }
            }
        }
    }
    let m: Vec<f64> = (0..n).map(|i| a[i][n] / a[i][i]).collect();
    if m.iter().any(|&v| !(v > 0.0) || !v.is_finite()) {
        return Err(Error::SingularSystem);
    }
    Ok(normalized(m))
}

/// `μ(x, y) = ½[W(x, y) + (m(y) / m(x)) W(y, x)]` with zero diagonal.
pub fn kernel_from_walk(w: DenseMatrix, m: Vec<f64>, residual: f64) -> PerronKernel {
    let n = w.n();
    let mu = DenseMatrix::from_fn(n, |x, y| {
        if x == y {
            0.0
        } else {
            0.5 * (w[(x, y)] + m[y] / m[x] * w[(y, x)])
        }
    });
    PerronKernel { m, w, mu, residual }
}

pub fn mean_transition_kernel(g: &DirectedWeightedGraph) -> Result<PerronKernel> {
    g.assert_strongly_connected()?;
    let w = g.random_walk_matrix()?;
    let (m, residual) = perron_measure(&w)?;
    Ok(kernel_from_walk(w, m, residual))
}

/// Lazy kernel: `α μ` off the diagonal, `1 − α` on it.
pub fn idle_kernel(k: &PerronKernel, alpha: f64) -> Result<DenseMatrix> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::InvalidAlpha(alpha));
    }
    Ok(DenseMatrix::from_fn(k.mu.n(), |x, y| {
        if x == y {
            1.0 - alpha
        } else {
            alpha * k.mu[(x, y)]
        }
    }))
}
