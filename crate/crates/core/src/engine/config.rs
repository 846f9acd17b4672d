use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::wl::FeatureKind;

/// Which vertex pairs may carry nonzero connectivity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scope {
    /// Graph edges only.
    Local,
    /// Pairs within the given hop budget, including `v = u`.
    Nonlocal(usize),
    /// Every ordered pair.
    Global,
}

/// Parameters of a linear edge score
/// `s(v, u) = w_src·h_v + w_dst·h_u + w_feat·[f_vu ∥ E_vu] + bias`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ScoreWeights {
    #[serde(default)]
    pub w_src: Vec<f64>,
    #[serde(default)]
    pub w_dst: Vec<f64>,
    #[serde(default)]
    pub w_feat: Vec<f64>,
    #[serde(default)]
    pub bias: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Connectivity {
    /// `ω(v, u) = f_vu`; the feature must be scalar.
    FixedFeature,
    /// Row softmax of the score over the scope.
    SoftmaxLinear(ScoreWeights),
    /// Sigmoid gates of the score, normalized over the scope.
    GatedSigmoid(ScoreWeights),
}

/// Affine map `x ↦ x W + b`; `weight` is `in × out`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Affine {
    pub weight: Vec<Vec<f64>>,
    #[serde(default)]
    pub bias: Vec<f64>,
}

impl Affine {
    pub fn identity(c: usize) -> Self {
        Self::scaled_identity(c, 1.0)
    }

    pub fn scaled_identity(c: usize, s: f64) -> Self {
        Self {
            weight: (0..c).map(|i| (0..c).map(|j| if i == j { s } else { 0.0 }).collect()).collect(),
            bias: vec![0.0; c],
        }
    }

    pub fn in_dim(&self) -> usize {
        self.weight.len()
    }

    pub fn out_dim(&self) -> usize {
        self.weight.first().map_or(self.bias.len(), Vec::len)
    }

    fn check(&self, name: &str) -> Result<()> {
        let out = self.out_dim();
        if self.weight.iter().any(|r| r.len() != out) {
            return Err(Error::InvalidConfig(format!("{name}: ragged weight matrix")));
        }
        if !self.bias.is_empty() && self.bias.len() != out {
            return Err(Error::InvalidConfig(format!(
                "{name}: bias has length {}, expected {out}",
                self.bias.len()
            )));
        }
        Ok(())
    }

    pub(crate) fn apply_into(&self, x: &[f64], out: &mut [f64]) {
        for (j, o) in out.iter_mut().enumerate() {
            *o += self.bias.get(j).copied().unwrap_or(0.0);
        }
        for (i, xi) in x.iter().enumerate() {
            if *xi != 0.0 {
                for (o, w) in out.iter_mut().zip(&self.weight[i]) {
                    *o += xi * w;
                }
            }
        }
    }
}

/// Node update `h' = h U_self + m U_msg + b`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UpdateMap {
    pub self_weight: Vec<Vec<f64>>,
    pub msg_weight: Vec<Vec<f64>>,
    #[serde(default)]
    pub bias: Vec<f64>,
}

impl UpdateMap {
    /// `h' = s·h + t·m` for `c` channels.
    pub fn scaled(c: usize, s: f64, t: f64) -> Self {
        Self {
            self_weight: Affine::scaled_identity(c, s).weight,
            msg_weight: Affine::scaled_identity(c, t).weight,
            bias: vec![0.0; c],
        }
    }
}

/// One propagation layer: adjacency feature, connectivity, message and
/// update maps.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LayerConfig {
    #[serde(with = "feature_string")]
    pub adjacency: FeatureKind,
    /// One entry per head, or a single entry shared by every head.
    pub connectivity: Vec<Connectivity>,
    #[serde(default = "one")]
    pub heads: usize,
    pub scope: Scope,
    /// Identity when absent.
    #[serde(default)]
    pub message: Option<Affine>,
    /// `h' = m` when absent.
    #[serde(default)]
    pub update: Option<UpdateMap>,
}

fn one() -> usize {
    1
}

mod feature_string {
    use serde::{Deserialize, Deserializer, Serializer};

    use crate::wl::FeatureKind;

    pub fn serialize<S: Serializer>(k: &FeatureKind, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&k.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<FeatureKind, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl LayerConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| Error::InvalidConfig(e.to_string()))?;
        cfg.validate_shape()?;
        Ok(cfg)
    }

    pub fn connectivity_for(&self, head: usize) -> &Connectivity {
        if self.connectivity.len() == 1 {
            &self.connectivity[0]
        } else {
            &self.connectivity[head]
        }
    }

    /// Checks that do not depend on the node state.
    pub fn validate_shape(&self) -> Result<()> {
        if self.heads == 0 {
            return Err(Error::InvalidConfig("heads must be at least 1".into()));
        }
        if self.connectivity.len() != 1 && self.connectivity.len() != self.heads {
            return Err(Error::InvalidConfig(format!(
                "connectivity lists {} entries for {} heads",
                self.connectivity.len(),
                self.heads
            )));
        }
        if let Some(m) = &self.message {
            m.check("message")?;
        }
        Ok(())
    }
}
