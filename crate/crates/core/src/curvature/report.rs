use std::fmt;
use std::io::Write;

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::Result;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum CurvatureKind {
    Curc,
    CurcEps(f64),
    CurcHop,
    IdleCurc,
    Ollivier,
    Forman,
    Lb1,
    Lb2,
}

impl CurvatureKind {
    pub fn name(&self) -> &'static str {
        match self {
            CurvatureKind::Curc => "curc",
            CurvatureKind::CurcEps(_) => "curc_eps",
            CurvatureKind::CurcHop => "curc_hop",
            CurvatureKind::IdleCurc => "idle_curc",
            CurvatureKind::Ollivier => "ollivier",
            CurvatureKind::Forman => "forman",
            CurvatureKind::Lb1 => "lb1",
            CurvatureKind::Lb2 => "lb2",
        }
    }
}

impl fmt::Display for CurvatureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PairValue {
    pub x: usize,
    pub y: usize,
    pub kappa: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Summary {
    pub min: f64,
    pub max: f64,
    pub mean: f64,
    pub q05: f64,
    pub q25: f64,
    pub q50: f64,
    pub q75: f64,
    pub q95: f64,
}

/// Linear-interpolation quantile of an ascending slice.
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

impl Summary {
    pub fn of(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        Some(Self {
            min: sorted[0],
            max: sorted[sorted.len() - 1],
            mean: values.iter().sum::<f64>() / values.len() as f64,
            q05: quantile(&sorted, 0.05),
            q25: quantile(&sorted, 0.25),
            q50: quantile(&sorted, 0.50),
            q75: quantile(&sorted, 0.75),
            q95: quantile(&sorted, 0.95),
        })
    }
}

/// Per-pair curvature values in pair order plus summary statistics.
#[derive(Clone, Debug, PartialEq)]
pub struct CurvatureReport {
    pub kind: CurvatureKind,
    pub values: Vec<PairValue>,
    pub summary: Option<Summary>,
}

impl CurvatureReport {
    pub fn new(kind: CurvatureKind, values: Vec<PairValue>) -> Self {
        let kappas: Vec<f64> = values.iter().map(|v| v.kappa).collect();
        Self {
            kind,
            summary: Summary::of(&kappas),
            values,
        }
    }

    pub fn get(&self, x: usize, y: usize) -> Option<f64> {
        self.values.iter().find(|v| v.x == x && v.y == y).map(|v| v.kappa)
    }

    pub fn kappas(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.kappa).collect()
    }

    /// `x,y,kappa` rows with a header line.
    pub fn write_csv(&self, mut w: impl Write, fmt_float: impl Fn(f64) -> String) -> Result<()> {
        writeln!(w, "x,y,kappa")?;
        for v in &self.values {
            writeln!(w, "{},{},{}", v.x, v.y, fmt_float(v.kappa))?;
        }
        Ok(())
    }
}

impl Serialize for CurvatureReport {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let eps = match self.kind {
            CurvatureKind::CurcEps(e) => Some(e),
            _ => None,
        };
        let mut st = s.serialize_struct("CurvatureReport", 3 + eps.is_some() as usize)?;
        st.serialize_field("kind", self.kind.name())?;
        if let Some(e) = eps {
            st.serialize_field("eps", &e)?;
        }
        st.serialize_field("pairs", &self.values)?;
        st.serialize_field("summary", &self.summary)?;
        st.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quantiles_interpolate() {
        let s = Summary::of(&[4.0, 1.0, 3.0, 2.0, 5.0]).unwrap();
        assert_eq!((s.min, s.max, s.mean, s.q50), (1.0, 5.0, 3.0, 3.0));
        assert_eq!(s.q25, 2.0);
        assert!((s.q05 - 1.2).abs() < 1e-12);
        assert!((s.q95 - 4.8).abs() < 1e-12);
        assert!(Summary::of(&[]).is_none());
    }

    #[test]
    fn json_shape() {
        let r = CurvatureReport::new(CurvatureKind::CurcEps(0.5), vec![PairValue { x: 0, y: 1, kappa: 0.25 }]);
        let v = serde_json::to_value(&r).unwrap();
        assert_eq!(v["kind"], "curc_eps");
        assert_eq!(v["eps"], 0.5);
        assert_eq!(v["pairs"][0]["kappa"], 0.25);
        assert_eq!(v["summary"]["q50"], 0.25);
    }
}
