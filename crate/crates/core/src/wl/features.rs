use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::graph::DirectedWeightedGraph;
use crate::matrix::DenseMatrix;
use crate::metric::bfs_hops;

/// Recipe for a per-pair adjacency feature.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FeatureKind {
    /// Stacked random-walk powers `[I, M, …, M^{K−1}]`, `M = D⁻¹A`.
    Rrwp(usize),
    /// Hop distance clipped at `cap`; unreachable pairs get `cap`.
    Spd(usize),
    /// Support indicator `A`.
    RawAdjacency,
    /// `D̃^{−1/2} Ã D̃^{−1/2}` with `Ã = A + I`.
    SymNorm,
    /// `D̃^{−1} Ã`.
    RowNorm,
    Concat(Vec<FeatureKind>),
}

impl FeatureKind {
    pub fn build(&self, g: &DirectedWeightedGraph) -> Result<AdjacencyFeatures> {
        match self {
            FeatureKind::Rrwp(k) => rrwp(g, *k),
            FeatureKind::Spd(cap) => spd(g, *cap),
            FeatureKind::RawAdjacency => Ok(raw_adjacency(g)),
            FeatureKind::SymNorm => Ok(sym_norm(g)),
            FeatureKind::RowNorm => Ok(row_norm(g)),
            FeatureKind::Concat(parts) => {
                let built = parts.iter().map(|p| p.build(g)).collect::<Result<Vec<_>>>()?;
                concat(&built)
            }
        }
    }
}

impl fmt::Display for FeatureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FeatureKind::Rrwp(k) => write!(f, "rrwp:{k}"),
            FeatureKind::Spd(c) => write!(f, "spd:{c}"),
            FeatureKind::RawAdjacency => f.write_str("adj"),
            FeatureKind::SymNorm => f.write_str("sym"),
            FeatureKind::RowNorm => f.write_str("row"),
            FeatureKind::Concat(parts) => {
                let names: Vec<String> = parts.iter().map(ToString::to_string).collect();
                write!(f, "{}", names.join("+"))
            }
        }
    }
}

impl FromStr for FeatureKind {
    type Err = Error;

    /// Parses `rrwp:K`, `spd:C`, `adj`, `sym`, `row`, or `+`-joined parts.
    fn from_str(s: &str) -> Result<Self> {
        if s.contains('+') {
            return Ok(FeatureKind::Concat(s.split('+').map(str::parse).collect::<Result<_>>()?));
        }
        let bad = || Error::InvalidFeature(format!("unknown feature {s:?} (expected rrwp:K, spd:C, adj, sym or row)"));
        let positive = |v: &str| -> Result<usize> {
            match v.parse::<usize>() {
                Ok(k) if k >= 1 => Ok(k),
                _ => Err(Error::InvalidFeature(format!("{s:?}: parameter must be a positive integer"))),
            }
        };
        match s.split_once(':') {
            Some(("rrwp", k)) => Ok(FeatureKind::Rrwp(positive(k)?)),
            Some(("spd", c)) => Ok(FeatureKind::Spd(positive(c)?)),
            Some(_) => Err(bad()),
            None => match s {
                "adj" => Ok(FeatureKind::RawAdjacency),
                "sym" => Ok(FeatureKind::SymNorm),
                "row" => Ok(FeatureKind::RowNorm),
                _ => Err(bad()),
            },
        }
    }
}

/// A `dim`-vector for every ordered pair `(v, u)`.
#[derive(Clone, Debug, PartialEq)]
pub struct AdjacencyFeatures {
    pub kind: FeatureKind,
    n: usize,
    dim: usize,
    data: Vec<f64>,
}

impl AdjacencyFeatures {
    fn from_slices(kind: FeatureKind, slices: &[DenseMatrix]) -> Self {
        let n = slices[0].n();
        let dim = slices.len();
        let mut data = Vec::with_capacity(n * n * dim);
        for v in 0..n {
            for u in 0..n {
                data.extend(slices.iter().map(|s| s[(v, u)]));
            }
        }
        Self { kind, n, dim, data }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, v: usize, u: usize) -> &[f64] {
        let at = (v * self.n + u) * self.dim;
        &self.data[at..at + self.dim]
    }

    /// Slice `k` as an `n × n` matrix.
    pub fn slice(&self, k: usize) -> DenseMatrix {
        DenseMatrix::from_fn(self.n, |v, u| self.get(v, u)[k])
    }

    /// Features of the relabelled graph in which vertex `v` becomes `perm[v]`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let mut data = vec![0.0; self.data.len()];
        for v in 0..self.n {
            for u in 0..self.n {
                let at = (perm[v] * self.n + perm[u]) * self.dim;
                data[at..at + self.dim].copy_from_slice(self.get(v, u));
            }
        }
        Self {
            kind: self.kind.clone(),
            n: self.n,
            dim: self.dim,
            data,
        }
    }
}

/// `D⁻¹A` over the support indicator; rows without out-edges stay zero.
pub fn walk_matrix(g: &DirectedWeightedGraph) -> DenseMatrix {
    let mut m = g.adjacency();
    for v in 0..g.n() {
        let deg = g.out_degree(v);
        if deg > 0 {
            for x in m.row_mut(v) {
                *x /= deg as f64;
            }
        }
    }
    m
}

pub fn rrwp(g: &DirectedWeightedGraph, k: usize) -> Result<AdjacencyFeatures> {
    if k == 0 {
        return Err(Error::InvalidFeature("rrwp dimension must be at least 1".into()));
    }
    let m = walk_matrix(g);
    let mut slices = vec![DenseMatrix::identity(g.n())];
    for i in 1..k {
        let next = slices[i - 1].matmul(&m);
        slices.push(next);
    }
    Ok(AdjacencyFeatures::from_slices(FeatureKind::Rrwp(k), &slices))
}

pub fn spd(g: &DirectedWeightedGraph, cap: usize) -> Result<AdjacencyFeatures> {
    if cap == 0 {
        return Err(Error::InvalidFeature("spd cap must be at least 1".into()));
    }
    let hops = bfs_hops(g);
    let d = DenseMatrix::from_fn(g.n(), |v, u| hops[v][u].map_or(cap, |h| h.min(cap)) as f64);
    Ok(AdjacencyFeatures::from_slices(FeatureKind::Spd(cap), &[d]))
}

pub fn raw_adjacency(g: &DirectedWeightedGraph) -> AdjacencyFeatures {
    AdjacencyFeatures::from_slices(FeatureKind::RawAdjacency, &[g.adjacency()])
}

fn with_self_loops(g: &DirectedWeightedGraph) -> (DenseMatrix, Vec<f64>) {
    let mut a = g.adjacency();
    for v in 0..g.n() {
        a[(v, v)] = 1.0;
    }
    let deg = a.rows().map(|r| r.iter().sum()).collect();
    (a, deg)
}

pub fn sym_norm(g: &DirectedWeightedGraph) -> AdjacencyFeatures {
    let (a, deg) = with_self_loops(g);
    let s = DenseMatrix::from_fn(g.n(), |v, u| a[(v, u)] / (deg[v] * deg[u]).sqrt());
    AdjacencyFeatures::from_slices(FeatureKind::SymNorm, &[s])
}

pub fn row_norm(g: &DirectedWeightedGraph) -> AdjacencyFeatures {
    let (a, deg) = with_self_loops(g);
    let s = DenseMatrix::from_fn(g.n(), |v, u| a[(v, u)] / deg[v]);
    AdjacencyFeatures::from_slices(FeatureKind::RowNorm, &[s])
}

/// Pairwise concatenation `f_1(v, u) ∥ f_2(v, u) ∥ …`.
pub fn concat(parts: &[AdjacencyFeatures]) -> Result<AdjacencyFeatures> {
    let first = parts
        .first()
        .ok_or_else(|| Error::InvalidFeature("cannot concatenate zero features".into()))?;
    let n = first.n;
    if let Some(p) = parts.iter().find(|p| p.n != n) {
        return Err(Error::DimensionMismatch {
            context: format!("feature {}", p.kind),
            expected: n,
            found: p.n,
        });
    }
    let dim = parts.iter().map(|p| p.dim).sum();
    let mut data = Vec::with_capacity(n * n * dim);
    for v in 0..n {
        for u in 0..n {
            for p in parts {
                data.extend_from_slice(p.get(v, u));
            }
        }
    }
    Ok(AdjacencyFeatures {
        kind: FeatureKind::Concat(parts.iter().map(|p| p.kind.clone()).collect()),
        n,
        dim,
        data,
    })
}
