//! Color refinement with per-pair adjacency features, in a static form (one
//! feature for every round) and a dynamic form (features rotating with a
//! fixed period).

mod features;
mod refine;

pub use features::{
    concat, raw_adjacency, row_norm, rrwp, spd, sym_norm, walk_matrix, AdjacencyFeatures, FeatureKind,
};
pub use refine::{
    distinguishes, dynamic_refine, static_refine, ColorHasher, ColorMap, RefineConfig, RefineHistory, Verdict,
};
