pub mod curvature;
pub mod engine;
pub mod error;
pub mod flow;
pub mod generate;
pub mod graph;
pub mod isoperimetry;
mod lp;
pub mod matrix;
pub mod metric;
pub mod spectral;
pub mod transport;
pub mod wl;

pub use error::{Error, Result};
pub use graph::{DirectedWeightedGraph, Edge, GraphFormat, IngestStats};
pub use matrix::DenseMatrix;
pub use metric::{DistanceMode, QuasiMetric};
pub use spectral::PerronKernel;
pub use transport::TransportResult;
pub use curvature::{CurvatureKind, CurvatureReport, PairSelection};
pub use engine::{LayerConfig, NodeState};
pub use flow::{EpochSeries, TrendReport};
pub use isoperimetry::IsoperimetryResult;
pub use wl::{ColorMap, FeatureKind};
