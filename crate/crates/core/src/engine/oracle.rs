//! Direct formulas for the presets, written without the layer machinery.

use super::presets::Preset;
use super::{layer_forward, sigmoid, NodeState};
use crate::error::Result;
use crate::graph::DirectedWeightedGraph;

fn neighbours(g: &DirectedWeightedGraph, v: usize) -> Vec<usize> {
    g.out_edges(v).iter().map(|e| e.dst).collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Output of the preset computed straight from its textbook formula.
pub fn direct_forward(preset: &Preset, g: &DirectedWeightedGraph, h: &NodeState) -> NodeState {
    let n = g.n();
    let c = h.channels();
    // Degrees counting the added self-loop.
    let deg: Vec<f64> = (0..n).map(|v| g.out_degree(v) as f64 + 1.0).collect();
    let rows = (0..n)
        .map(|v| {
            let mut out = vec![0.0; c];
            let mut add = |scale: f64, u: usize| {
                for (o, x) in out.iter_mut().zip(h.row(u)) {
                    *o += scale * x;
                }
            };
            match preset {
                Preset::Gcn => {
                    add(1.0 / deg[v], v);
                    for u in neighbours(g, v) {
                        add(1.0 / (deg[v] * deg[u]).sqrt(), u);
                    }
                }
                Preset::SageGcn => {
                    add(1.0 / deg[v], v);
                    for u in neighbours(g, v) {
                        add(1.0 / deg[v], u);
                    }
                }
                Preset::Gin { theta_self, theta_msg } => {
                    add(*theta_self, v);
                    for u in neighbours(g, v) {
                        add(*theta_msg, u);
                    }
                }
                Preset::Gated(w) => {
                    let wf = w.w_feat.first().copied().unwrap_or(0.0);
                    let nb = neighbours(g, v);
                    let gates: Vec<f64> = nb
                        .iter()
                        .map(|&u| sigmoid(dot(&w.w_src, h.row(v)) + dot(&w.w_dst, h.row(u)) + wf + w.bias))
                        .collect();
                    let total: f64 = gates.iter().sum();
                    add(1.0, v);
                    for (&u, gate) in nb.iter().zip(&gates) {
                        add(gate / total, u);
                    }
                }
            }
            out
        })
        .collect();
    NodeState::from_rows(rows).expect("finite direct output")
}

/// Whether the engine reproduces the direct formula within 1e-10.
pub fn cast_check(preset: &Preset, g: &DirectedWeightedGraph, h: &NodeState) -> Result<bool> {
    let engine = layer_forward(g, &preset.config(h.channels()), h)?;
    let direct = direct_forward(preset, g, h);
    Ok(engine.max_abs_diff(&direct) <= 1e-10)
}
