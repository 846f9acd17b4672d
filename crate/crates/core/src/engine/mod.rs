//! Executable four-step propagation layer: adjacency features, connectivity,
//! message aggregation over all vertices, node update.

mod config;
mod oracle;
mod presets;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use config::{Affine, Connectivity, LayerConfig, Scope, ScoreWeights, UpdateMap};
pub use oracle::{cast_check, direct_forward};
pub use presets::Preset;

use crate::error::{Error, Result};
use crate::graph::DirectedWeightedGraph;
use crate::matrix::DenseMatrix;
use crate::metric::bfs_hops;
use crate::wl::AdjacencyFeatures;

/// Node representations, `n × c`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct NodeState {
    n: usize,
    c: usize,
    data: Vec<f64>,
}

impl TryFrom<Vec<Vec<f64>>> for NodeState {
    type Error = Error;

    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self> {
        Self::from_rows(rows)
    }
}

impl From<NodeState> for Vec<Vec<f64>> {
    fn from(s: NodeState) -> Self {
        s.to_rows()
    }
}

impl NodeState {
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(n * c);
        for (i, r) in rows.into_iter().enumerate() {
            if r.len() != c {
                return Err(Error::DimensionMismatch {
                    context: format!("node state row {i}"),
                    expected: c,
                    found: r.len(),
                });
            }
            if let Some(j) = r.iter().position(|v| !v.is_finite()) {
                return Err(Error::NonFinite(i, j));
            }
            data.extend(r);
        }
        Ok(Self { n, c, data })
    }

    pub fn zeros(n: usize, c: usize) -> Self {
        Self {
            n,
            c,
            data: vec![0.0; n * c],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn channels(&self) -> usize {
        self.c
    }

    pub fn row(&self, v: usize) -> &[f64] {
        &self.data[v * self.c..(v + 1) * self.c]
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.n).map(|v| self.row(v).to_vec()).collect()
    }

    pub fn permuted(&self, perm: &[usize]) -> Self {
        let mut out = Self::zeros(self.n, self.c);
        for v in 0..self.n {
            let at = perm[v] * self.c;
            out.data[at..at + self.c].copy_from_slice(self.row(v));
        }
        out
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Optional per-pair edge attributes appended to the adjacency feature.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdgeFeatures {
    /// `values[v][u]` is the attribute vector of the pair `(v, u)`.
    pub values: Vec<Vec<Vec<f64>>>,
}

impl EdgeFeatures {
    fn dim(&self) -> usize {
        self.values
            .first()
            .and_then(|r| r.first())
            .map_or(0, Vec::len)
    }

    fn check(&self, n: usize) -> Result<()> {
        let dim = self.dim();
        if self.values.len() != n || self.values.iter().any(|r| r.len() != n || r.iter().any(|e| e.len() != dim)) {
            return Err(Error::DimensionMismatch {
                context: "edge features".into(),
                expected: n,
                found: self.values.len(),
            });
        }
        Ok(())
    }
}

fn scope_mask(g: &DirectedWeightedGraph, scope: Scope) -> Vec<bool> {
    let n = g.n();
    match scope {
        Scope::Global => vec![true; n * n],
        Scope::Local => {
            let mut m = vec![false; n * n];
            for e in g.edges() {
                m[e.src * n + e.dst] = true;
            }
            m
        }
        Scope::Nonlocal(k) => {
            let hops = bfs_hops(g);
            (0..n * n)
                .map(|i| hops[i / n][i % n].is_some_and(|h| h <= k))
                .collect()
        }
    }
}

fn dot(w: &[f64], x: &[f64]) -> f64 {
    w.iter().zip(x).map(|(a, b)| a * b).sum()
}

fn check_len(name: &str, v: &[f64], want: usize) -> Result<()> {
    if !v.is_empty() && v.len() != want {
        return Err(Error::DimensionMismatch {
            context: format!("connectivity {name}"),
            expected: want,
            found: v.len(),
        });
    }
    Ok(())
}

fn scores(
    w: &ScoreWeights,
    feats: &AdjacencyFeatures,
    edges: Option<&EdgeFeatures>,
    h: &NodeState,
    mask: &[bool],
) -> Result<DenseMatrix> {
    let n = h.n();
    let fdim = feats.dim() + edges.map_or(0, EdgeFeatures::dim);
    check_len("w_src", &w.w_src, h.channels())?;
    check_len("w_dst", &w.w_dst, h.channels())?;
    check_len("w_feat", &w.w_feat, fdim)?;
    let src: Vec<f64> = (0..n).map(|v| dot(&w.w_src, h.row(v))).collect();
    let dst: Vec<f64> = (0..n).map(|u| dot(&w.w_dst, h.row(u))).collect();
    Ok(DenseMatrix::from_fn(n, |v, u| {
        if !mask[v * n + u] {
            return 0.0;
        }
        let f = feats.get(v, u);
        let mut s = src[v] + dst[u] + w.bias + dot(&w.w_feat, f);
        if let Some(e) = edges {
            if w.w_feat.len() > f.len() {
                s += dot(&w.w_feat[f.len()..], &e.values[v][u]);
            }
        }
        s
    }))
}

fn head_matrix(
    conn: &Connectivity,
    feats: &AdjacencyFeatures,
    edges: Option<&EdgeFeatures>,
    h: &NodeState,
    mask: &[bool],
) -> Result<DenseMatrix> {
    let n = h.n();
    match conn {
        Connectivity::FixedFeature => {
            if feats.dim() != 1 {
                return Err(Error::InvalidConfig(format!(
                    "fixed_feature needs a scalar adjacency feature, {} has dimension {}",
                    feats.kind,
                    feats.dim()
                )));
            }
            Ok(DenseMatrix::from_fn(n, |v, u| if mask[v * n + u] { feats.get(v, u)[0] } else { 0.0 }))
        }
        Connectivity::SoftmaxLinear(w) => {
            let s = scores(w, feats, edges, h, mask)?;
            let mut out = DenseMatrix::zeros(n);
            for v in 0..n {
                let cols: Vec<usize> = (0..n).filter(|&u| mask[v * n + u]).collect();
                let peak = cols.iter().map(|&u| s[(v, u)]).fold(f64::NEG_INFINITY, f64::max);
                let total: f64 = cols.iter().map(|&u| (s[(v, u)] - peak).exp()).sum();
                for &u in &cols {
                    out[(v, u)] = (s[(v, u)] - peak).exp() / total;
                }
            }
            Ok(out)
        }
        Connectivity::GatedSigmoid(w) => {
            let s = scores(w, feats, edges, h, mask)?;
            let mut out = DenseMatrix::zeros(n);
            for v in 0..n {
                let cols: Vec<usize> = (0..n).filter(|&u| mask[v * n + u]).collect();
                let gates: Vec<f64> = cols.iter().map(|&u| sigmoid(s[(v, u)])).collect();
                let total: f64 = gates.iter().sum();
                for (&u, g) in cols.iter().zip(&gates) {
                    out[(v, u)] = g / total;
                }
            }
            Ok(out)
        }
    }
}

pub(crate) fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

fn check_state(g: &DirectedWeightedGraph, h: &NodeState) -> Result<()> {
    if h.n() != g.n() {
        return Err(Error::DimensionMismatch {
            context: "node state".into(),
            expected: g.n(),
            found: h.n(),
        });
    }
    Ok(())
}

/// Connectivity matrix `ω` of every head.
pub fn propagation_matrices(
    g: &DirectedWeightedGraph,
    cfg: &LayerConfig,
    h: &NodeState,
    edges: Option<&EdgeFeatures>,
) -> Result<Vec<DenseMatrix>> {
    cfg.validate_shape()?;
    check_state(g, h)?;
    if let Some(e) = edges {
        e.check(g.n())?;
    }
    let feats = cfg.adjacency.build(g)?;
    let mask = scope_mask(g, cfg.scope);
    (0..cfg.heads)
        .into_par_iter()
        .map(|k| head_matrix(cfg.connectivity_for(k), &feats, edges, h, &mask))
        .collect()
}

pub fn propagation_matrix(g: &DirectedWeightedGraph, cfg: &LayerConfig, h: &NodeState) -> Result<Vec<DenseMatrix>> {
    propagation_matrices(g, cfg, h, None)
}

/// `m_v = Σ_heads Σ_u ω(v, u) M(h_u)`, then `h' = U(h, m)`.
pub fn layer_forward_with(
    g: &DirectedWeightedGraph,
    cfg: &LayerConfig,
    h: &NodeState,
    edges: Option<&EdgeFeatures>,
) -> Result<NodeState> {
    let omegas = propagation_matrices(g, cfg, h, edges)?;
    let n = h.n();
    let msg_rows: Vec<Vec<f64>> = match &cfg.message {
        None => h.to_rows(),
        Some(map) => {
            if map.in_dim() != h.channels() {
                return Err(Error::DimensionMismatch {
                    context: "message map input".into(),
                    expected: h.channels(),
                    found: map.in_dim(),
                });
            }
            (0..n)
                .map(|u| {
                    let mut out = vec![0.0; map.out_dim()];
                    map.apply_into(h.row(u), &mut out);
                    out
                })
                .collect()
        }
    };
    let cm = msg_rows.first().map_or(0, Vec::len);
    let mut m = vec![vec![0.0; cm]; n];
    for omega in &omegas {
        for v in 0..n {
            for u in 0..n {
                let w = omega[(v, u)];
                if w != 0.0 {
                    for (acc, x) in m[v].iter_mut().zip(&msg_rows[u]) {
                        *acc += w * x;
                    }
                }
            }
        }
    }
    let Some(up) = &cfg.update else {
        return NodeState::from_rows(m);
    };
    let self_map = Affine {
        weight: up.self_weight.clone(),
        bias: up.bias.clone(),
    };
    let msg_map = Affine {
        weight: up.msg_weight.clone(),
        bias: Vec::new(),
    };
    if self_map.in_dim() != h.channels() || msg_map.in_dim() != cm || self_map.out_dim() != msg_map.out_dim() {
        return Err(Error::DimensionMismatch {
            context: "update map".into(),
            expected: h.channels(),
            found: self_map.in_dim(),
        });
    }
    let out = (0..n)
        .map(|v| {
            let mut row = vec![0.0; self_map.out_dim()];
            self_map.apply_into(h.row(v), &mut row);
            msg_map.apply_into(&m[v], &mut row);
            row
        })
        .collect();
    NodeState::from_rows(out)
}

pub fn layer_forward(g: &DirectedWeightedGraph, cfg: &LayerConfig, h: &NodeState) -> Result<NodeState> {
    layer_forward_with(g, cfg, h, None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate;
    use crate::wl::FeatureKind;

    fn state(rows: &[&[f64]]) -> NodeState {
        NodeState::from_rows(rows.iter().map(|r| r.to_vec()).collect()).unwrap()
    }

    #[test]
    fn gcn_on_an_edge() {
        let g = generate::path(2);
        let h = state(&[&[1.0], &[3.0]]);
        let cfg = Preset::Gcn.config(1);
        let w = propagation_matrix(&g, &cfg, &h).unwrap();
        assert_eq!(w[0].to_rows(), vec![vec![0.5, 0.5], vec![0.5, 0.5]]);
        assert_eq!(layer_forward(&g, &cfg, &h).unwrap().to_rows(), vec![vec![2.0], vec![2.0]]);
    }

    #[test]
    fn gin_on_an_edge() {
        let g = generate::path(2);
        let h = state(&[&[1.0], &[3.0]]);
        let cfg = Preset::Gin { theta_self: 0.0, theta_msg: 1.0 }.config(1);
        assert_eq!(propagation_matrix(&g, &cfg, &h).unwrap()[0].to_rows(), vec![vec![0.0, 1.0], vec![1.0, 0.0]]);
        assert_eq!(layer_forward(&g, &cfg, &h).unwrap().to_rows(), vec![vec![3.0], vec![1.0]]);
    }

    #[test]
    fn softmax_with_zero_scores_is_uniform() {
        let g = generate::complete(3);
        let cfg = LayerConfig {
            adjacency: FeatureKind::RawAdjacency,
            connectivity: vec![Connectivity::SoftmaxLinear(ScoreWeights::default())],
            heads: 1,
            scope: Scope::Global,
            message: None,
            update: None,
        };
        let w = propagation_matrix(&g, &cfg, &state(&[&[1.0], &[2.0], &[5.0]])).unwrap();
        for v in 0..3 {
            for u in 0..3 {
                assert!((w[0][(v, u)] - 1.0 / 3.0).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn zero_state_maps_to_zero() {
        let g = generate::cycle(4);
        for preset in [Preset::Gcn, Preset::SageGcn, Preset::gin(), Preset::gated_zero(2)] {
            let out = layer_forward(&g, &preset.config(2), &NodeState::zeros(4, 2)).unwrap();
            assert_eq!(out, NodeState::zeros(4, 2), "{preset:?}");
        }
    }

    #[test]
    fn local_scope_masks_non_edges() {
        let g = generate::path(4);
        let cfg = LayerConfig {
            adjacency: FeatureKind::Rrwp(2),
            connectivity: vec![Connectivity::SoftmaxLinear(ScoreWeights {
                w_src: vec![0.3],
                w_dst: vec![-0.7],
                w_feat: vec![1.0, 2.0],
                bias: 0.1,
            })],
            heads: 1,
            scope: Scope::Local,
            message: None,
            update: None,
        };
        let h = state(&[&[1.0], &[-2.0], &[0.5], &[4.0]]);
        let w = &propagation_matrix(&g, &cfg, &h).unwrap()[0];
        for v in 0..4 {
            for u in 0..4 {
                if !g.has_edge(v, u) {
                    assert_eq!(w[(v, u)], 0.0);
                }
            }
            assert!((w.row(v).iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn identical_heads_add_up() {
        let g = generate::cycle(5);
        let h = state(&[&[1.0, 0.0], &[0.0, 2.0], &[3.0, 1.0], &[-1.0, 1.0], &[0.5, 0.5]]);
        let mut cfg = Preset::Gcn.config(2);
        let single = layer_forward(&g, &cfg, &h).unwrap();
        cfg.heads = 3;
        let triple = layer_forward(&g, &cfg, &h).unwrap();
        for v in 0..5 {
            for (a, b) in single.row(v).iter().zip(triple.row(v)) {
                assert!((3.0 * a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn config_json_round_trip() {
        let cfg = Preset::gated_zero(2).config(2);
        let text = serde_json::to_string(&cfg).unwrap();
        assert_eq!(LayerConfig::from_json(&text).unwrap(), cfg);
        let err = LayerConfig::from_json(r#"{"adjacency":"adj","connectivity":[],"scope":"global"}"#).unwrap_err();
        assert!(err.to_string().starts_with("engine:"), "{err}");
    }

    #[test]
    fn fixed_feature_needs_scalar() {
        let mut cfg = Preset::Gcn.config(1);
        cfg.adjacency = FeatureKind::Rrwp(3);
        let h = state(&[&[1.0], &[2.0]]);
        assert!(matches!(layer_forward(&generate::path(2), &cfg, &h), Err(Error::InvalidConfig(_))));
    }
}
