use std::collections::HashMap;

use serde::Serialize;
use xxhash_rust::xxh3::xxh3_64;

use super::features::{AdjacencyFeatures, FeatureKind};
use crate::error::{Error, Result};
use crate::graph::DirectedWeightedGraph;

const QUANT: f64 = 1e12;

/// Colors after one refinement round.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ColorMap {
    pub round: usize,
    pub colors: Vec<u64>,
}

impl ColorMap {
    /// Class index per vertex, numbered by first appearance.
    pub fn partition(&self) -> Vec<usize> {
        let mut ids: HashMap<u64, usize> = HashMap::new();
        self.colors
            .iter()
            .map(|c| {
                let next = ids.len();
                *ids.entry(*c).or_insert(next)
            })
            .collect()
    }

    pub fn class_count(&self) -> usize {
        let mut c = self.colors.clone();
        c.sort_unstable();
        c.dedup();
        c.len()
    }

    /// Sorted color multiset.
    pub fn signature(&self) -> Vec<u64> {
        let mut c = self.colors.clone();
        c.sort_unstable();
        c
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RefineHistory {
    pub rounds: Vec<ColorMap>,
    /// First round whose partition no longer changes, if reached.
    pub stable_round: Option<usize>,
}

impl RefineHistory {
    pub fn last(&self) -> &ColorMap {
        self.rounds.last().expect("history starts with round 0")
    }

    /// Partition at the stable round, or at the last round computed.
    pub fn stable_partition(&self) -> Vec<usize> {
        let at = self.stable_round.unwrap_or(self.rounds.len() - 1);
        self.rounds[at].partition()
    }
}

/// Content hash with an interning table that turns a 64-bit collision
/// into an error instead of a silent merge.
#[derive(Default)]
pub struct ColorHasher {
    seen: HashMap<u64, Vec<u8>>,
}

impl ColorHasher {
    pub fn new() -> Self {
        Self::default()
    }

    fn intern(&mut self, bytes: Vec<u8>) -> Result<u64> {
        let id = xxh3_64(&bytes);
        match self.seen.get(&id) {
            Some(prev) if *prev != bytes => Err(Error::HashCollision(id)),
            Some(_) => Ok(id),
            None => {
                self.seen.insert(id, bytes);
                Ok(id)
            }
        }
    }

    /// `χ^{t+1}(v) = hash{{(χ^t(u), f_vu) : u ∈ V}}`.
    pub fn step(&mut self, colors: &[u64], feats: &AdjacencyFeatures) -> Result<Vec<u64>> {
        let n = colors.len();
        if feats.n() != n {
            return Err(Error::DimensionMismatch {
                context: format!("feature {}", feats.kind),
                expected: n,
                found: feats.n(),
            });
        }
        let mut out = Vec::with_capacity(n);
        for v in 0..n {
            let mut elems: Vec<Vec<u8>> = (0..n)
                .map(|u| {
                    let f = feats.get(v, u);
                    let mut e = Vec::with_capacity(8 * (1 + f.len()));
                    e.extend_from_slice(&colors[u].to_le_bytes());
                    for x in f {
                        e.extend_from_slice(&((x * QUANT).round() as i64).to_le_bytes());
                    }
                    e
                })
                .collect();
            elems.sort_unstable();
            let mut bytes = Vec::with_capacity(8 + elems.iter().map(Vec::len).sum::<usize>());
            bytes.extend_from_slice(&(n as u64).to_le_bytes());
            for e in elems {
                bytes.extend(e);
            }
            out.push(self.intern(bytes)?);
        }
        Ok(out)
    }
}

fn initial(n: usize) -> ColorMap {
    ColorMap {
        round: 0,
        colors: vec![0; n],
    }
}

/// Static refinement with one feature; stops once the partition repeats or
/// after `max_rounds` (default `n`).
pub fn static_refine(feats: &AdjacencyFeatures, max_rounds: Option<usize>) -> Result<RefineHistory> {
    dynamic_refine(std::slice::from_ref(feats), max_rounds)
}

/// Round `t` uses `cycle[t mod p]`. Stable once `p + 1` consecutive
/// partitions coincide; default cap `n · p` rounds.
pub fn dynamic_refine(cycle: &[AdjacencyFeatures], max_rounds: Option<usize>) -> Result<RefineHistory> {
    let p = cycle.len();
    if p == 0 {
        return Err(Error::InvalidFeature("feature cycle must be nonempty".into()));
    }
    let n = cycle[0].n();
    let cap = max_rounds.unwrap_or(n.max(1) * p);
    let mut hasher = ColorHasher::new();
    let mut rounds = vec![initial(n)];
    let mut partitions = vec![rounds[0].partition()];
    let mut stable_round = None;
    for t in 0..cap {
        let next = hasher.step(&rounds[t].colors, &cycle[t % p])?;
        rounds.push(ColorMap {
            round: t + 1,
            colors: next,
        });
        partitions.push(rounds[t + 1].partition());
        let k = partitions.len();
        if k > p && partitions[k - p - 1..].iter().all(|q| *q == partitions[k - 1]) {
            stable_round = Some(k - p - 1);
            break;
        }
    }
    Ok(RefineHistory { rounds, stable_round })
}

/// Configuration shared by both graphs of a discrimination test.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RefineConfig {
    /// One entry for static refinement, several for a dynamic cycle.
    pub cycle: Vec<FeatureKind>,
    pub max_rounds: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub distinguishable: bool,
    /// First round whose color multisets differ.
    pub witness_round: Option<usize>,
    pub rounds: usize,
}

impl Verdict {
    pub fn line(&self) -> String {
        match self.witness_round {
            Some(r) if self.distinguishable => format!("distinguishable, round {r}"),
            _ => format!("indistinguishable after {} rounds", self.rounds),
        }
    }
}

/// Runs both graphs for a common number of rounds (default `(n1 + n2) · p`)
/// and compares sorted color multisets round by round.
pub fn distinguishes(g1: &DirectedWeightedGraph, g2: &DirectedWeightedGraph, cfg: &RefineConfig) -> Result<Verdict> {
    let p = cfg.cycle.len();
    if p == 0 {
        return Err(Error::InvalidFeature("feature cycle must be nonempty".into()));
    }
    let f1 = cfg.cycle.iter().map(|k| k.build(g1)).collect::<Result<Vec<_>>>()?;
    let f2 = cfg.cycle.iter().map(|k| k.build(g2)).collect::<Result<Vec<_>>>()?;
    let rounds = cfg.max_rounds.unwrap_or((g1.n() + g2.n()) * p);
    let mut hasher = ColorHasher::new();
    let (mut c1, mut c2) = (vec![0u64; g1.n()], vec![0u64; g2.n()]);
    let differs = |a: &[u64], b: &[u64]| {
        let (mut a, mut b) = (a.to_vec(), b.to_vec());
        a.sort_unstable();
        b.sort_unstable();
        a != b
    };
    if differs(&c1, &c2) {
        return Ok(Verdict {
            distinguishable: true,
            witness_round: Some(0),
            rounds: 0,
        });
    }
    for t in 0..rounds {
        c1 = hasher.step(&c1, &f1[t % p])?;
        c2 = hasher.step(&c2, &f2[t % p])?;
        if differs(&c1, &c2) {
            return Ok(Verdict {
                distinguishable: true,
                witness_round: Some(t + 1),
                rounds: t + 1,
            });
        }
    }
    Ok(Verdict {
        distinguishable: false,
        witness_round: None,
        rounds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate;
    use crate::wl::features::{concat, raw_adjacency, rrwp, spd};

    #[test]
    fn regular_graph_stays_trivial_under_adjacency() {
        let h = static_refine(&raw_adjacency(&generate::cycle(6)), None).unwrap();
        assert!(h.rounds.iter().all(|r| r.class_count() == 1));
        assert_eq!(h.stable_round, Some(0));
    }

    #[test]
    fn single_vertex() {
        let g = DirectedWeightedGraph::new(1, []).unwrap();
        let h = static_refine(&rrwp(&g, 2).unwrap(), Some(3)).unwrap();
        assert!(h.rounds.iter().all(|r| r.class_count() == 1));
    }

    #[test]
    fn path_splits_ends_from_middle() {
        let h = static_refine(&raw_adjacency(&generate::path(3)), None).unwrap();
        assert_eq!(h.stable_partition(), vec![0, 1, 0]);
    }

    #[test]
    fn c6_versus_two_triangles() {
        let (c6, tt) = (generate::cycle(6), generate::two_triangles());
        let adj = RefineConfig {
            cycle: vec![FeatureKind::RawAdjacency],
            max_rounds: None,
        };
        assert!(!distinguishes(&c6, &tt, &adj).unwrap().distinguishable);
        let pe = RefineConfig {
            cycle: vec![FeatureKind::Rrwp(4)],
            max_rounds: None,
        };
        let v = distinguishes(&c6, &tt, &pe).unwrap();
        assert_eq!(v.witness_round, Some(1));
        assert_eq!(v.line(), "distinguishable, round 1");
    }

    #[test]
    fn trivial_cycles_match_static() {
        let g = generate::path(5);
        let f = rrwp(&g, 3).unwrap();
        let s = static_refine(&f, None).unwrap();
        let d1 = dynamic_refine(&[f.clone()], None).unwrap();
        assert_eq!(s, d1);
        let d2 = dynamic_refine(&[f.clone(), f.clone()], None).unwrap();
        assert_eq!(d2.stable_partition(), s.stable_partition());
    }

    #[test]
    fn deterministic_colors() {
        let g = generate::cycle(5);
        let f = concat(&[rrwp(&g, 3).unwrap(), spd(&g, 8).unwrap()]).unwrap();
        assert_eq!(static_refine(&f, None).unwrap(), static_refine(&f, None).unwrap());
    }
}
