//! Curvature distributions of per-epoch propagation matrices.

use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::curvature::{curc, curc_matrix, PairSelection, Summary};
use crate::error::{Error, Result};
use crate::graph::DirectedWeightedGraph;
use crate::matrix::DenseMatrix;

pub const HIST_BINS: usize = 20;
pub const HIST_LO: f64 = -3.0;
pub const HIST_HI: f64 = 1.0;

#[derive(Clone, Debug, PartialEq)]
pub struct EpochSeries {
    pub graph_name: String,
    pub threshold: f64,
    /// Strictly increasing epoch indices.
    pub epochs: Vec<(i64, DenseMatrix)>,
}

#[derive(Deserialize)]
struct Manifest {
    graph_name: String,
    threshold: f64,
    epochs: Vec<ManifestEntry>,
}

#[derive(Deserialize)]
struct ManifestEntry {
    epoch: i64,
    file: PathBuf,
}

impl EpochSeries {
    /// Sorts by epoch and validates dimensions, thresholded support and
    /// strong connectivity.
    pub fn new(graph_name: impl Into<String>, threshold: f64, mut epochs: Vec<(i64, DenseMatrix)>) -> Result<Self> {
        if epochs.is_empty() {
            return Err(Error::InvalidSeries("series has no epochs".into()));
        }
        if !(threshold >= 0.0) {
            return Err(Error::InvalidSeries(format!("threshold must be nonnegative, got {threshold}")));
        }
        epochs.sort_by_key(|(e, _)| *e);
        if let Some(w) = epochs.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(Error::InvalidSeries(format!("epoch {} listed twice", w[0].0)));
        }
        let n = epochs[0].1.n();
        for (epoch, m) in &epochs {
            if m.n() != n {
                return Err(Error::DimensionMismatch {
                    context: "epoch matrix".into(),
                    expected: n,
                    found: m.n(),
                }
                .in_epoch(*epoch));
            }
            graph_of(m, threshold).map_err(|e| e.in_epoch(*epoch))?;
        }
        Ok(Self {
            graph_name: graph_name.into(),
            threshold,
            epochs,
        })
    }

    pub fn graph(&self, epoch: i64) -> Result<DirectedWeightedGraph> {
        let (_, m) = self
            .epochs
            .iter()
            .find(|(e, _)| *e == epoch)
            .ok_or(Error::MissingEpoch(epoch))?;
        graph_of(m, self.threshold)
    }
}

fn graph_of(m: &DenseMatrix, threshold: f64) -> Result<DirectedWeightedGraph> {
    let g = DirectedWeightedGraph::from_dense(m, threshold)?;
    g.assert_strongly_connected()?;
    Ok(g)
}

/// Reads a manifest; matrix paths are relative to the manifest's directory.
pub fn load_epoch_series(manifest: impl AsRef<Path>) -> Result<EpochSeries> {
    let path = manifest.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::from(e).in_file(path))?;
    let raw: Manifest = serde_json::from_str(&text).map_err(|e| Error::from(e).in_file(path))?;
    let base = path.parent().unwrap_or(Path::new("."));
    let mut epochs = Vec::with_capacity(raw.epochs.len());
    let mut expected = None;
    for entry in &raw.epochs {
        let file = base.join(&entry.file);
        let m = DenseMatrix::load(&file)?;
        let n = *expected.get_or_insert(m.n());
        if m.n() != n {
            return Err(Error::DimensionMismatch {
                context: "epoch matrix".into(),
                expected: n,
                found: m.n(),
            }
            .in_file(file));
        }
        epochs.push((entry.epoch, m));
    }
    EpochSeries::new(raw.graph_name, raw.threshold, epochs)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrendRow {
    pub epoch: i64,
    pub min: f64,
    pub mean: f64,
    pub q05: f64,
    pub q25: f64,
    pub q50: f64,
    pub q75: f64,
    pub q95: f64,
    /// Counts over 20 equal bins of `[−3, 1]`, values clamped into range.
    pub histogram: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrendReport {
    pub graph_name: String,
    pub threshold: f64,
    pub rows: Vec<TrendRow>,
    /// Median at the first epoch minus median at the last epoch.
    pub decurve_score: f64,
}

pub fn histogram(values: &[f64]) -> Vec<u64> {
    let width = (HIST_HI - HIST_LO) / HIST_BINS as f64;
    let mut bins = vec![0u64; HIST_BINS];
    for &v in values {
        let k = ((v - HIST_LO) / width).floor();
        let k = if k.is_nan() { 0.0 } else { k.clamp(0.0, (HIST_BINS - 1) as f64) };
        bins[k as usize] += 1;
    }
    bins
}

pub fn trend(series: &EpochSeries) -> Result<TrendReport> {
    let rows = series
        .epochs
        .par_iter()
        .map(|(epoch, m)| {
            let row = (|| {
                let g = graph_of(m, series.threshold)?;
                let kappas = curc(&g, &PairSelection::All)?.kappas();
                let s = Summary::of(&kappas).ok_or(Error::InvalidSeries("epoch graph has one vertex".into()))?;
                Ok(TrendRow {
                    epoch: *epoch,
                    min: s.min,
                    mean: s.mean,
                    q05: s.q05,
                    q25: s.q25,
                    q50: s.q50,
                    q75: s.q75,
                    q95: s.q95,
                    histogram: histogram(&kappas),
                })
            })();
            row.map_err(|e: Error| e.in_epoch(*epoch))
        })
        .collect::<Result<Vec<_>>>()?;
    let decurve_score = rows[0].q50 - rows[rows.len() - 1].q50;
    Ok(TrendReport {
        graph_name: series.graph_name.clone(),
        threshold: series.threshold,
        rows,
        decurve_score,
    })
}

impl TrendReport {
    /// One row per epoch: summary columns then `h00`…`h19`.
    pub fn write_csv(&self, mut w: impl Write, fmt_float: impl Fn(f64) -> String) -> Result<()> {
        let mut header = vec!["epoch", "min", "mean", "q05", "q25", "q50", "q75", "q95"]
            .into_iter()
            .map(String::from)
            .collect::<Vec<_>>();
        header.extend((0..HIST_BINS).map(|k| format!("h{k:02}")));
        writeln!(w, "{}", header.join(","))?;
        for r in &self.rows {
            let mut cells = vec![r.epoch.to_string()];
            cells.extend([r.min, r.mean, r.q05, r.q25, r.q50, r.q75, r.q95].map(&fmt_float));
            cells.extend(r.histogram.iter().map(u64::to_string));
            writeln!(w, "{}", cells.join(","))?;
        }
        Ok(())
    }
}

/// `κ` of one epoch as an `n × n` matrix with zero diagonal.
pub fn curvature_map(series: &EpochSeries, epoch: i64) -> Result<DenseMatrix> {
    let g = series.graph(epoch)?;
    curc_matrix(&g).map_err(|e| e.in_epoch(epoch))
}
