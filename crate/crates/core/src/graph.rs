//! Directed weighted graphs: construction, file formats, dense ingestion and
//! connectivity checks.

use std::io::{BufRead, Read, Write};
use std::path::Path;

use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Edge {
    pub src: usize,
    pub dst: usize,
    pub weight: f64,
}

/// Counters recorded while a graph was ingested.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct IngestStats {
    pub dropped_self_loops: usize,
    pub dropped_below_threshold: usize,
}

/// A finite graph with strictly positive directed edge weights.
///
/// Edges are kept sorted by `(src, dst)`; self-loops never survive
/// construction.
#[derive(Clone, Debug, PartialEq)]
pub struct DirectedWeightedGraph {
    n: usize,
    edges: Vec<Edge>,
    offsets: Vec<usize>,
    name: Option<String>,
    stats: IngestStats,
}

#[derive(Serialize, Deserialize)]
struct GraphJson {
    n: usize,
    edges: Vec<(usize, usize, f64)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    name: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GraphFormat {
    Json,
    EdgeList,
}

impl GraphFormat {
    /// `.json` means JSON; every other extension is read as an edge list.
    pub fn from_path(path: &Path) -> Self {
        match path.extension() {
            Some(ext) if ext.eq_ignore_ascii_case("json") => GraphFormat::Json,
            _ => GraphFormat::EdgeList,
        }
    }
}

impl DirectedWeightedGraph {
    /// Validates and normalizes a list of `(src, dst, weight)` triples.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize, f64)>) -> Result<Self> {
        if n == 0 {
            return Err(Error::NoVertices);
        }
        let mut stats = IngestStats::default();
        let mut kept = Vec::new();
        for (src, dst, weight) in edges {
            for index in [src, dst] {
                if index >= n {
                    return Err(Error::IndexOutOfRange { index, n });
                }
            }
            if !(weight > 0.0) || !weight.is_finite() {
                return Err(Error::NonPositiveWeight { src, dst, weight });
            }
            if src == dst {
                stats.dropped_self_loops += 1;
                continue;
            }
            kept.push(Edge { src, dst, weight });
        }
        kept.sort_by_key(|e| (e.src, e.dst));
        if let Some(w) = kept.windows(2).find(|w| (w[0].src, w[0].dst) == (w[1].src, w[1].dst)) {
            return Err(Error::DuplicateEdge(w[0].src, w[0].dst));
        }
        let mut offsets = vec![0; n + 1];
        for e in &kept {
            offsets[e.src + 1] += 1;
        }
        for i in 0..n {
            offsets[i + 1] += offsets[i];
        }
        Ok(Self {
            n,
            edges: kept,
            offsets,
            name: None,
            stats,
        })
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn stats(&self) -> IngestStats {
        self.stats
    }

    pub fn out_edges(&self, x: usize) -> &[Edge] {
        &self.edges[self.offsets[x]..self.offsets[x + 1]]
    }

    pub fn out_degree(&self, x: usize) -> usize {
        self.offsets[x + 1] - self.offsets[x]
    }

    pub fn weight(&self, x: usize, y: usize) -> Option<f64> {
        let row = self.out_edges(x);
        row.binary_search_by_key(&y, |e| e.dst).ok().map(|i| row[i].weight)
    }

    pub fn has_edge(&self, x: usize, y: usize) -> bool {
        self.weight(x, y).is_some()
    }

    pub fn min_weight(&self) -> Option<f64> {
        self.edges.iter().map(|e| e.weight).reduce(f64::min)
    }

    /// Every weight multiplied by `lambda`.
    pub fn scaled(&self, lambda: f64) -> Result<Self> {
        let mut g = Self::new(
            self.n,
            self.edges.iter().map(|e| (e.src, e.dst, e.weight * lambda)),
        )?;
        g.name = self.name.clone();
        Ok(g)
    }

    /// Relabels vertices: vertex `v` becomes `perm[v]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        Self::new(
            self.n,
            self.edges.iter().map(|e| (perm[e.src], perm[e.dst], e.weight)),
        )
    }

    /// Disjoint union with vertices of `other` shifted by `self.n()`.
    pub fn disjoint_union(&self, other: &Self) -> Result<Self> {
        let shift = self.n;
        Self::new(
            self.n + other.n,
            self.edges
                .iter()
                .map(|e| (e.src, e.dst, e.weight))
                .chain(other.edges.iter().map(|e| (e.src + shift, e.dst + shift, e.weight))),
        )
    }

    pub fn has_symmetric_support(&self) -> bool {
        self.first_unreciprocated().is_none()
    }

    pub(crate) fn first_unreciprocated(&self) -> Option<(usize, usize)> {
        self.edges
            .iter()
            .find(|e| !self.has_edge(e.dst, e.src))
            .map(|e| (e.src, e.dst))
    }

    pub fn is_unweighted_undirected(&self) -> bool {
        self.has_symmetric_support() && self.edges.iter().all(|e| e.weight == 1.0)
    }

    /// Support indicator `A(x, y) = 1` iff `ω(x, y) > 0`.
    pub fn adjacency(&self) -> DenseMatrix {
        let mut a = DenseMatrix::zeros(self.n);
        for e in &self.edges {
            a[(e.src, e.dst)] = 1.0;
        }
        a
    }

    /// Weight matrix with zero diagonal and zeros on non-edges.
    pub fn to_dense(&self) -> DenseMatrix {
        let mut a = DenseMatrix::zeros(self.n);
        for e in &self.edges {
            a[(e.src, e.dst)] = e.weight;
        }
        a
    }

    /// Converts a learned propagation or attention matrix into a graph.
    ///
    /// Edge `(i, j)` exists iff `i != j` and `entry >= threshold`; entries
    /// that are not strictly positive can never become edges.
    pub fn from_dense(matrix: &DenseMatrix, threshold: f64) -> Result<Self> {
        let n = matrix.n();
        let mut dropped = 0;
        let mut triples = Vec::new();
        let mut self_loops = 0;
        for i in 0..n {
            for j in 0..n {
                let v = matrix[(i, j)];
                if i == j {
                    if v != 0.0 {
                        self_loops += 1;
                    }
                    continue;
                }
                if v >= threshold && v > 0.0 {
                    triples.push((i, j, v));
                } else if v != 0.0 || threshold > 0.0 {
                    dropped += 1;
                }
            }
        }
        if triples.is_empty() {
            return Err(Error::NoEdges);
        }
        let mut g = Self::new(n, triples)?;
        g.stats = IngestStats {
            dropped_self_loops: self_loops,
            dropped_below_threshold: dropped,
        };
        Ok(g)
    }

    /// Strongly connected components, each sorted, ordered by smallest vertex.
    pub fn strongly_connected_components(&self) -> Vec<Vec<usize>> {
        let mut pg = DiGraph::<(), ()>::with_capacity(self.n, self.edges.len());
        let nodes: Vec<_> = (0..self.n).map(|_| pg.add_node(())).collect();
        for e in &self.edges {
            pg.add_edge(nodes[e.src], nodes[e.dst], ());
        }
        let mut comps: Vec<Vec<usize>> = tarjan_scc(&pg)
            .into_iter()
            .map(|c| {
                let mut c: Vec<usize> = c.into_iter().map(|ix| ix.index()).collect();
                c.sort_unstable();
                c
            })
            .collect();
        comps.sort_by_key(|c| c[0]);
        comps
    }

    pub fn assert_strongly_connected(&self) -> Result<()> {
        let components = self.strongly_connected_components();
        if components.len() == 1 {
            Ok(())
        } else {
            Err(Error::NotStronglyConnected { components })
        }
    }

    /// Row-stochastic random walk matrix `W(x, y) = ω(x, y) / Σ_z ω(x, z)`.
    pub fn random_walk_matrix(&self) -> Result<DenseMatrix> {
        let mut w = DenseMatrix::zeros(self.n);
        for x in 0..self.n {
            let row = self.out_edges(x);
            if row.is_empty() {
                return Err(Error::ZeroOutDegree(x));
            }
            let total: f64 = row.iter().map(|e| e.weight).sum();
            for e in row {
                w[(x, e.dst)] = e.weight / total;
            }
        }
        Ok(w)
    }

    pub fn read_json(reader: impl Read) -> Result<Self> {
        let raw: GraphJson = serde_json::from_reader(reader)?;
        let g = Self::new(raw.n, raw.edges)?;
        Ok(match raw.name {
            Some(name) => g.with_name(name),
            None => g,
        })
    }

    pub fn write_json(&self, writer: impl Write) -> Result<()> {
        let raw = GraphJson {
            n: self.n,
            edges: self.edges.iter().map(|e| (e.src, e.dst, e.weight)).collect(),
            name: self.name.clone(),
        };
        serde_json::to_writer(writer, &raw)?;
        Ok(())
    }

    /// Parses `src dst weight` lines; `#` starts a comment. The vertex count
    /// is one past the largest index seen.
    pub fn read_edgelist(reader: impl BufRead) -> Result<Self> {
        let mut triples = Vec::new();
        let mut n = 0;
        for (lineno, line) in reader.lines().enumerate() {
            let line = line?;
            let body = line.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let fields: Vec<&str> = body.split_whitespace().collect();
            if fields.len() != 3 {
                return Err(Error::Parse(format!(
                    "line {}: expected `src dst weight`, got {body:?}",
                    lineno + 1
                )));
            }
            let bad = |what: &str| Error::Parse(format!("line {}: invalid {what}", lineno + 1));
            let src: usize = fields[0].parse().map_err(|_| bad("source index"))?;
            let dst: usize = fields[1].parse().map_err(|_| bad("target index"))?;
            let weight: f64 = fields[2].parse().map_err(|_| bad("weight"))?;
            n = n.max(src + 1).max(dst + 1);
            triples.push((src, dst, weight));
        }
        Self::new(n, triples)
    }

    pub fn write_edgelist(&self, mut writer: impl Write) -> Result<()> {
        for e in &self.edges {
            writeln!(writer, "{} {} {}", e.src, e.dst, e.weight)?;
        }
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>, format: GraphFormat) -> Result<Self> {
        let path = path.as_ref();
        let file = std::fs::File::open(path).map_err(|e| Error::from(e).in_file(path))?;
        let reader = std::io::BufReader::new(file);
        let parsed = match format {
            GraphFormat::Json => Self::read_json(reader),
            GraphFormat::EdgeList => Self::read_edgelist(reader),
        };
        parsed.map_err(|e| e.in_file(path))
    }

    /// Loads with the format inferred from the file extension.
    pub fn load_auto(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        Self::load(path, GraphFormat::from_path(path))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_cycle(a: f64, b: f64) -> DirectedWeightedGraph {
        DirectedWeightedGraph::new(2, [(0, 1, a), (1, 0, b)]).unwrap()
    }

    #[test]
    fn load_minimal_json() {
        let g = DirectedWeightedGraph::read_json(r#"{"n":2,"edges":[[0,1,1.0],[1,0,1.0]]}"#.as_bytes())
            .unwrap();
        assert_eq!(g.n(), 2);
        assert_eq!(g.weight(0, 1), Some(1.0));
        assert_eq!(g.weight(1, 0), Some(1.0));
        assert!(g.has_symmetric_support());
    }

    #[test]
    fn load_edgelist_asymmetric() {
        let g = DirectedWeightedGraph::read_edgelist("# header\n0 1 2.0\n1 0 1.0 # trailing\n\n".as_bytes())
            .unwrap();
        assert_eq!(g, two_cycle(2.0, 1.0));
    }

    #[test]
    fn rejects_nonpositive_weight() {
        let err = DirectedWeightedGraph::read_json(r#"{"n":2,"edges":[[0,1,0.0]]}"#.as_bytes()).unwrap_err();
        assert!(err.to_string().contains("nonpositive weight"), "{err}");
        let err = DirectedWeightedGraph::new(2, [(0, 1, -1.0)]).unwrap_err();
        assert!(matches!(err, Error::NonPositiveWeight { .. }));
    }

    #[test]
    fn rejects_out_of_range_and_duplicates() {
        assert!(matches!(
            DirectedWeightedGraph::new(2, [(0, 2, 1.0)]).unwrap_err(),
            Error::IndexOutOfRange { index: 2, n: 2 }
        ));
        assert!(matches!(
            DirectedWeightedGraph::new(2, [(0, 1, 1.0), (0, 1, 2.0)]).unwrap_err(),
            Error::DuplicateEdge(0, 1)
        ));
    }

    #[test]
    fn self_loops_are_counted_and_dropped() {
        let g = DirectedWeightedGraph::new(2, [(0, 0, 3.0), (0, 1, 1.0), (1, 0, 1.0)]).unwrap();
        assert_eq!(g.stats().dropped_self_loops, 1);
        assert_eq!(g.edges().len(), 2);
    }

    #[test]
    fn from_dense_examples() {
        let m = DenseMatrix::filled(2, 0.5);
        let g = DirectedWeightedGraph::from_dense(&m, 0.0).unwrap();
        assert_eq!(g, two_cycle(0.5, 0.5).clone_with_stats(g.stats()));
        assert_eq!(g.stats().dropped_self_loops, 2);

        let g = DirectedWeightedGraph::from_dense(&DenseMatrix::filled(3, 1.0), 0.0).unwrap();
        assert_eq!(g.edges().len(), 6);
        assert!(g.edges().iter().all(|e| e.weight == 1.0));

        let err = DirectedWeightedGraph::from_dense(&DenseMatrix::identity(3), 0.0).unwrap_err();
        assert!(matches!(err, Error::NoEdges));
    }

    #[test]
    fn from_dense_threshold_is_inclusive() {
        let m = DenseMatrix::from_rows(vec![vec![0.0, 0.2, 0.1], vec![0.3, 0.0, 0.2], vec![0.2, 0.19, 0.0]])
            .unwrap();
        let g = DirectedWeightedGraph::from_dense(&m, 0.2).unwrap();
        assert!(g.has_edge(0, 1) && g.has_edge(1, 2) && g.has_edge(2, 0));
        assert!(!g.has_edge(0, 2) && !g.has_edge(2, 1));
        assert_eq!(g.stats().dropped_below_threshold, 2);
    }

    #[test]
    fn strong_connectivity() {
        assert!(two_cycle(1.0, 1.0).assert_strongly_connected().is_ok());
        let one_way = DirectedWeightedGraph::new(2, [(0, 1, 1.0)]).unwrap();
        match one_way.assert_strongly_connected().unwrap_err() {
            Error::NotStronglyConnected { components } => {
                assert_eq!(components, vec![vec![0], vec![1]])
            }
            other => panic!("unexpected {other}"),
        }
        let c6 = DirectedWeightedGraph::new(6, (0..6).map(|i| (i, (i + 1) % 6, 1.0))).unwrap();
        assert!(c6.assert_strongly_connected().is_ok());
    }

    #[test]
    fn random_walk_examples() {
        let w = two_cycle(2.0, 1.0).random_walk_matrix().unwrap();
        assert_eq!(w.to_rows(), vec![vec![0.0, 1.0], vec![1.0, 0.0]]);

        let path = DirectedWeightedGraph::new(3, [(0, 1, 1.0), (1, 0, 1.0), (1, 2, 1.0), (2, 1, 1.0)]).unwrap();
        assert_eq!(path.random_walk_matrix().unwrap().row(1), &[0.5, 0.0, 0.5]);

        let k3 = DirectedWeightedGraph::from_dense(&DenseMatrix::filled(3, 1.0), 0.0).unwrap();
        let w = k3.random_walk_matrix().unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(w[(i, j)], if i == j { 0.0 } else { 0.5 });
            }
        }
    }

    #[test]
    fn zero_out_degree_is_an_error() {
        let g = DirectedWeightedGraph::new(2, [(0, 1, 1.0)]).unwrap();
        assert!(matches!(g.random_walk_matrix().unwrap_err(), Error::ZeroOutDegree(1)));
    }

    impl DirectedWeightedGraph {
        fn clone_with_stats(mut self, stats: IngestStats) -> Self {
            self.stats = stats;
            self
        }
    }
}
