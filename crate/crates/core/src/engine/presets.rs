use std::str::FromStr;

use super::config::{Connectivity, LayerConfig, Scope, ScoreWeights, UpdateMap};
use crate::error::{Error, Result};
use crate::wl::FeatureKind;

/// Classic architectures written as propagation layers.
#[derive(Clone, Debug, PartialEq)]
pub enum Preset {
    /// `D̃^{−1/2} Ã D̃^{−1/2} h`.
    Gcn,
    /// `D̃^{−1} Ã h`.
    SageGcn,
    /// `θ_self h + θ_msg A h`.
    Gin { theta_self: f64, theta_msg: f64 },
    /// `h_v + Σ_{u ∈ N(v)} η_vu h_u` with normalized sigmoid gates.
    Gated(ScoreWeights),
}

impl Preset {
    pub fn gin() -> Self {
        Preset::Gin {
            theta_self: 1.0,
            theta_msg: 1.0,
        }
    }

    /// Gated preset with all gate weights zero for `c` channels.
    pub fn gated_zero(c: usize) -> Self {
        Preset::Gated(ScoreWeights {
            w_src: vec![0.0; c],
            w_dst: vec![0.0; c],
            w_feat: vec![0.0],
            bias: 0.0,
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Preset::Gcn => "gcn",
            Preset::SageGcn => "sage_gcn",
            Preset::Gin { .. } => "gin",
            Preset::Gated(_) => "gated",
        }
    }

    /// Layer configuration for node states with `c` channels.
    pub fn config(&self, c: usize) -> LayerConfig {
        let fixed = |adjacency| LayerConfig {
            adjacency,
            connectivity: vec![Connectivity::FixedFeature],
            heads: 1,
            scope: Scope::Global,
            message: None,
            update: None,
        };
        match self {
            Preset::Gcn => fixed(FeatureKind::SymNorm),
            Preset::SageGcn => fixed(FeatureKind::RowNorm),
            Preset::Gin { theta_self, theta_msg } => LayerConfig {
                update: Some(UpdateMap::scaled(c, *theta_self, *theta_msg)),
                ..fixed(FeatureKind::RawAdjacency)
            },
            Preset::Gated(w) => LayerConfig {
                adjacency: FeatureKind::RawAdjacency,
                connectivity: vec![Connectivity::GatedSigmoid(w.clone())],
                heads: 1,
                scope: Scope::Local,
                message: None,
                update: Some(UpdateMap::scaled(c, 1.0, 1.0)),
            },
        }
    }
}

impl FromStr for Preset {
    type Err = Error;

    /// Named presets with default parameters; `gated` uses zero gate weights
    /// and is sized when the configuration is built.
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gcn" => Ok(Preset::Gcn),
            "sage_gcn" => Ok(Preset::SageGcn),
            "gin" => Ok(Preset::gin()),
            "gated" => Ok(Preset::Gated(ScoreWeights::default())),
            other => Err(Error::InvalidConfig(format!(
                "unknown preset {other:?} (expected gcn, sage_gcn, gin or gated)"
            ))),
        }
    }
}
