//! Small dense two-phase simplex with Bland's rule.
//!
//! Used only for the Lipschitz-potential programs (the dual side of the
//! transport problem and the idle curvature characterization), which have at
//! most a few dozen variables.

use crate::error::{Error, Result};

const PIVOT_TOL: f64 = 1e-12;
const COST_TOL: f64 = 1e-11;
const FEAS_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Relation {
    Le,
    #[allow(dead_code)]
    Ge,
    Eq,
}

/// `maximize c·x subject to rows, x ≥ 0`.
#[derive(Clone, Debug)]
pub(crate) struct LinearProgram {
    n_vars: usize,
    objective: Vec<f64>,
    rows: Vec<(Vec<f64>, Relation, f64)>,
}

#[derive(Clone, Debug)]
pub(crate) struct LpSolution {
    pub value: f64,
    #[allow(dead_code)]
    pub x: Vec<f64>,
}

impl LinearProgram {
    pub fn new(objective: Vec<f64>) -> Self {
        Self {
            n_vars: objective.len(),
            objective,
            rows: Vec::new(),
        }
    }

    pub fn add(&mut self, coeffs: Vec<f64>, rel: Relation, rhs: f64) {
        debug_assert_eq!(coeffs.len(), self.n_vars);
        self.rows.push((coeffs, rel, rhs));
    }

    pub fn maximize(&self) -> Result<LpSolution> {
        let n = self.n_vars;
        if self.rows.is_empty() {
            if self.objective.iter().any(|&c| c > COST_TOL) {
                return Err(Error::LinearProgram("unbounded"));
            }
            return Ok(LpSolution {
                value: 0.0,
                x: vec![0.0; n],
            });
        }
        Tableau::build(self).solve(&self.objective, n)
    }
}

struct Tableau {
    m: usize,
    width: usize,
    n_struct: usize,
    first_art: usize,
    data: Vec<f64>,
    basis: Vec<usize>,
    cost: Vec<f64>,
}

impl Tableau {
    fn build(lp: &LinearProgram) -> Self {
        let m = lp.rows.len();
        let n = lp.n_vars;
        let n_slack = lp.rows.iter().filter(|r| r.1 != Relation::Eq).count();
        // An artificial column for every row whose slack cannot start basic.
        let needs_art: Vec<bool> = lp
            .rows
            .iter()
            .map(|(_, rel, rhs)| {
                let flipped = *rhs < 0.0;
                match rel {
                    Relation::Eq => true,
                    Relation::Le => flipped,
                    Relation::Ge => !flipped,
                }
            })
            .collect();
        let n_art = needs_art.iter().filter(|&&a| a).count();
        let n_struct = n + n_slack;
        let width = n_struct + n_art + 1;
        let mut data = vec![0.0; m * width];
        let mut basis = vec![0; m];
        let mut slack = n;
        let mut art = n_struct;
        for (i, (coeffs, rel, rhs)) in lp.rows.iter().enumerate() {
            let sign = if *rhs < 0.0 { -1.0 } else { 1.0 };
            let row = &mut data[i * width..(i + 1) * width];
            for (j, c) in coeffs.iter().enumerate() {
                row[j] = sign * c;
            }
            row[width - 1] = sign * rhs;
            match rel {
                Relation::Le | Relation::Ge => {
                    let s = if *rel == Relation::Le { 1.0 } else { -1.0 };
                    row[slack] = sign * s;
                    if !needs_art[i] {
                        basis[i] = slack;
                    }
                    slack += 1;
                }
                Relation::Eq => {}
            }
            if needs_art[i] {
                row[art] = 1.0;
                basis[i] = art;
                art += 1;
            }
        }
        Self {
            m,
            width,
            n_struct,
            first_art: n_struct,
            data,
            basis,
            cost: vec![0.0; width],
        }
    }

    #[inline]
    fn at(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.width + j]
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let w = self.width;
        let p = self.data[r * w + c];
        for j in 0..w {
            self.data[r * w + j] /= p;
        }
        self.data[r * w + c] = 1.0;
        let pivot_row: Vec<f64> = self.data[r * w..(r + 1) * w].to_vec();
        for i in 0..self.m {
            if i == r {
                continue;
            }
            let f = self.data[i * w + c];
            if f != 0.0 {
                let row = &mut self.data[i * w..(i + 1) * w];
                for (x, p) in row.iter_mut().zip(&pivot_row) {
                    *x -= f * p;
                }
                row[c] = 0.0;
            }
        }
        let f = self.cost[c];
        if f != 0.0 {
            for (x, p) in self.cost.iter_mut().zip(&pivot_row) {
                *x -= f * p;
            }
            self.cost[c] = 0.0;
        }
        self.basis[r] = c;
    }

    /// Runs simplex iterations on the current reduced-cost row, allowing
    /// entering columns below `limit`.
    fn iterate(&mut self, limit: usize) -> Result<()> {
        let rhs = self.width - 1;
        loop {
            let Some(enter) = (0..limit).find(|&j| self.cost[j] > COST_TOL) else {
                return Ok(());
            };
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.m {
                let a = self.at(i, enter);
                if a > PIVOT_TOL {
                    let ratio = self.at(i, rhs).max(0.0) / a;
                    let better = match leave {
                        None => true,
                        Some((l, best)) => {
                            ratio < best - 1e-15 || (ratio <= best + 1e-15 && self.basis[i] < self.basis[l])
                        }
                    };
                    if better {
                        leave = Some((i, ratio));
                    }
                }
            }
            let Some((r, _)) = leave else {
                return Err(Error::LinearProgram("unbounded"));
            };
            self.pivot(r, enter);
        }
    }

    fn solve(mut self, objective: &[f64], n: usize) -> Result<LpSolution> {
        let rhs = self.width - 1;
        // Phase one: maximize minus the sum of artificials.
        if self.first_art < rhs {
            self.cost = vec![0.0; self.width];
            for i in 0..self.m {
                if self.basis[i] >= self.first_art {
                    for j in 0..self.width {
                        if j < self.first_art || j == rhs {
                            self.cost[j] += self.at(i, j);
                        }
                    }
                }
            }
            self.iterate(self.first_art)?;
            if self.cost[rhs] > FEAS_TOL * (1.0 + self.m as f64) {
                return Err(Error::LinearProgram("infeasible"));
            }
            for i in 0..self.m {
                if self.basis[i] >= self.first_art {
                    if let Some(j) = (0..self.n_struct).find(|&j| self.at(i, j).abs() > 1e-9) {
                        self.pivot(i, j);
                    }
                }
            }
        }
        // Phase two.
        self.cost = vec![0.0; self.width];
        self.cost[..n].copy_from_slice(objective);
        for i in 0..self.m {
            let b = self.basis[i];
            let cb = if b < n { objective[b] } else { 0.0 };
            if cb != 0.0 {
                for j in 0..self.width {
                    self.cost[j] -= cb * self.at(i, j);
                }
            }
        }
        self.iterate(self.n_struct)?;
        let mut x = vec![0.0; n];
        for i in 0..self.m {
            if self.basis[i] < n {
                x[self.basis[i]] = self.at(i, rhs);
            }
        }
        let value = objective.iter().zip(&x).map(|(c, v)| c * v).sum();
        Ok(LpSolution { value, x })
    }
}
