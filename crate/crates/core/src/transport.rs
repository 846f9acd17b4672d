//! Exact first Wasserstein distance under an asymmetric quasi-metric.
//!
//! The primal is a bipartite min-cost flow between the two supports solved by
//! successive shortest paths with node potentials. A 1-Lipschitz potential on
//! the whole vertex set is read off the final node potentials and certifies
//! optimality.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lp::{LinearProgram, Relation};
use crate::metric::QuasiMetric;

const MASS_EPS: f64 = 1e-12;
const SUM_TOL: f64 = 1e-9;
const FLOW_EPS: f64 = 1e-15;

#[derive(Clone, Debug, Serialize)]
pub struct TransportResult {
    pub cost: f64,
    /// `(src, dst, mass)` sorted by `(src, dst)`.
    pub plan: Vec<(usize, usize, f64)>,
    /// 1-Lipschitz potential `f` with `f(0) = 0`.
    pub dual_potentials: Vec<f64>,
    pub duality_gap: f64,
}

fn check_measures(mu: &[f64], nu: &[f64], n: usize) -> Result<()> {
    for (name, m) in [("mu", mu), ("nu", nu)] {
        if m.len() != n {
            return Err(Error::DimensionMismatch {
                context: format!("transport measure {name}"),
                expected: n,
                found: m.len(),
            });
        }
        if let Some(v) = m.iter().find(|v| !(**v >= 0.0) || !v.is_finite()) {
            return Err(Error::InfeasibleMarginals(format!("{name} has entry {v}")));
        }
    }
    let (a, b): (f64, f64) = (mu.iter().sum(), nu.iter().sum());
    if (a - 1.0).abs() > SUM_TOL || (b - 1.0).abs() > SUM_TOL {
        return Err(Error::InfeasibleMarginals(format!("sums {a} and {b} must both be 1")));
    }
    Ok(())
}

/// Minimum of `Σ d(a, b) π(a, b)` over couplings with row marginal `mu` and
/// column marginal `nu`.
pub fn wasserstein1(mu: &[f64], nu: &[f64], d: &QuasiMetric) -> Result<TransportResult> {
    let n = d.n();
    check_measures(mu, nu, n)?;
    let src: Vec<usize> = (0..n).filter(|&i| mu[i] > MASS_EPS).collect();
    let dst: Vec<usize> = (0..n).filter(|&j| nu[j] > MASS_EPS).collect();
    let (s, t) = (src.len(), dst.len());
    let cost = |i: usize, j: usize| d.get(src[i], dst[j]);

    let mut supply: Vec<f64> = src.iter().map(|&v| mu[v]).collect();
    let mut demand: Vec<f64> = dst.iter().map(|&v| nu[v]).collect();
    let mut flow = vec![0.0; s * t];
    // Potentials of S nodes then T nodes.
    let mut pot = vec![0.0; s + t];
    let mut dist = vec![0.0; s + t];
    let mut prev = vec![usize::MAX; s + t];
    let mut done = vec![false; s + t];

    loop {
        if supply.iter().all(|&v| v <= FLOW_EPS) || demand.iter().all(|&v| v <= FLOW_EPS) {
            break;
        }
        dist.fill(f64::INFINITY);
        prev.fill(usize::MAX);
        done.fill(false);
        for i in 0..s {
            if supply[i] > FLOW_EPS {
                dist[i] = 0.0;
            }
        }
        let mut target = None;
        loop {
            let mut u = usize::MAX;
            let mut best = f64::INFINITY;
            for v in 0..s + t {
                if !done[v] && dist[v] < best {
                    best = dist[v];
                    u = v;
                }
            }
            if u == usize::MAX {
                break;
            }
            done[u] = true;
            if u >= s && demand[u - s] > FLOW_EPS {
                target = Some(u);
                break;
            }
            if u < s {
                for j in 0..t {
                    let v = s + j;
                    let rc = (cost(u, j) + pot[u] - pot[v]).max(0.0);
                    if !done[v] && dist[u] + rc < dist[v] {
                        dist[v] = dist[u] + rc;
                        prev[v] = u;
                    }
                }
            } else {
                let j = u - s;
                for i in 0..s {
                    if flow[i * t + j] > FLOW_EPS {
                        let rc = (-cost(i, j) + pot[u] - pot[i]).max(0.0);
                        if !done[i] && dist[u] + rc < dist[i] {
                            dist[i] = dist[u] + rc;
                            prev[i] = u;
                        }
                    }
                }
            }
        }
        let Some(target) = target else {
            return Err(Error::InfeasibleMarginals("no augmenting path".into()));
        };
        let reach = dist[target];
        for v in 0..s + t {
            pot[v] += dist[v].min(reach);
        }
        // Walk back to find the bottleneck.
        let mut delta = demand[target - s];
        let mut v = target;
        while prev[v] != usize::MAX {
            let u = prev[v];
            if u >= s {
                delta = delta.min(flow[v * t + (u - s)]);
            }
            v = u;
        }
        delta = delta.min(supply[v]);
        supply[v] -= delta;
        demand[target - s] -= delta;
        let mut v = target;
        while prev[v] != usize::MAX {
            let u = prev[v];
            if u < s {
                flow[u * t + (v - s)] += delta;
            } else {
                let cell = &mut flow[v * t + (u - s)];
                *cell -= delta;
                if *cell < FLOW_EPS {
                    *cell = 0.0;
                }
            }
            v = u;
        }
    }

    cancel_cycles(&mut flow, s, t);

    let mut plan = Vec::new();
    let mut total = 0.0;
    for i in 0..s {
        for j in 0..t {
            let f = flow[i * t + j];
            if f > 0.0 {
                plan.push((src[i], dst[j], f));
                total += f * cost(i, j);
            }
        }
    }
    plan.sort_by_key(|&(a, b, _)| (a, b));

    let mut f: Vec<f64> = (0..n)
        .map(|z| {
            (0..s)
                .map(|i| pot[i] + d.get(src[i], z))
                .fold(f64::INFINITY, f64::min)
        })
        .collect();
    if s == 0 {
        f = vec![0.0; n];
    }
    let shift = f[0];
    for v in &mut f {
        *v -= shift;
    }
    let dual: f64 = (0..n).map(|z| f[z] * (nu[z] - mu[z])).sum();
    Ok(TransportResult {
        cost: total,
        plan,
        dual_potentials: f,
        duality_gap: (total - dual).abs(),
    })
}

/// Removes cycles from the bipartite support of the plan by shifting mass
/// around each cycle. All support arcs are tight, so cost is unchanged.
fn cancel_cycles(flow: &mut [f64], s: usize, t: usize) {
    loop {
        let Some(cycle) = find_support_cycle(flow, s, t) else {
            return;
        };
        // Cycle alternates S and T nodes: s0 t0 s1 t1 ... ; arcs (s_k, t_k)
        // gain mass, arcs (s_{k+1}, t_k) lose it.
        let k = cycle.len() / 2;
        let minus: Vec<(usize, usize)> = (0..k).map(|m| (cycle[(2 * m + 2) % cycle.len()], cycle[2 * m + 1])).collect();
        let plus: Vec<(usize, usize)> = (0..k).map(|m| (cycle[2 * m], cycle[2 * m + 1])).collect();
        let (arg, theta) = minus
            .iter()
            .enumerate()
            .map(|(k, &(i, j))| (k, flow[i * t + j]))
            .fold((0, f64::INFINITY), |best, cur| if cur.1 < best.1 { cur } else { best });
        for &(i, j) in &plus {
            flow[i * t + j] += theta;
        }
        for (k, &(i, j)) in minus.iter().enumerate() {
            let cell = &mut flow[i * t + j];
            *cell -= theta;
            if k == arg || *cell < FLOW_EPS {
                *cell = 0.0;
            }
        }
    }
}

/// Finds a cycle in the undirected bipartite support graph, returned as an
/// alternating list `[s0, t0, s1, t1, ...]` of row and column indices.
fn find_support_cycle(flow: &[f64], s: usize, t: usize) -> Option<Vec<usize>> {
    // Nodes: rows 0..s, columns s..s+t.
    let total = s + t;
    let mut parent = vec![usize::MAX; total];
    let mut seen = vec![false; total];
    for root in 0..s {
        if seen[root] {
            continue;
        }
        seen[root] = true;
        let mut stack = vec![root];
        while let Some(u) = stack.pop() {
            let neighbors: Vec<usize> = if u < s {
                (0..t).filter(|&j| flow[u * t + j] > 0.0).map(|j| s + j).collect()
            } else {
                (0..s).filter(|&i| flow[i * t + (u - s)] > 0.0).collect()
            };
            for v in neighbors {
                if v == parent[u] {
                    continue;
                }
                if seen[v] {
                    // Cycle: path u -> root and v -> root meet at the LCA.
                    let path_u = ancestors(&parent, u);
                    let path_v = ancestors(&parent, v);
                    let lca = *path_u.iter().find(|x| path_v.contains(x))?;
                    let mut cyc: Vec<usize> = path_u.iter().take_while(|&&x| x != lca).copied().collect();
                    cyc.push(lca);
                    let mut tail: Vec<usize> = path_v.iter().take_while(|&&x| x != lca).copied().collect();
                    tail.reverse();
                    cyc.extend(tail);
                    // Rotate so it starts at a row node and alternates.
                    let start = cyc.iter().position(|&x| x < s)?;
                    cyc.rotate_left(start);
                    return Some(cyc.into_iter().map(|x| if x < s { x } else { x - s }).collect());
                }
                seen[v] = true;
                parent[v] = u;
                stack.push(v);
            }
        }
    }
    None
}

fn ancestors(parent: &[usize], mut v: usize) -> Vec<usize> {
    let mut out = vec![v];
    while parent[v] != usize::MAX {
        v = parent[v];
        out.push(v);
    }
    out
}

/// Optimum of `max Σ f(z)(ν(z) − μ(z))` over potentials with
/// `f(y) − f(x) ≤ d(x, y)` for every ordered pair and `f(0) = 0`, solved as
/// a dense linear program independent of [`wasserstein1`].
pub fn kr_dual_value(mu: &[f64], nu: &[f64], d: &QuasiMetric) -> Result<f64> {
    let n = d.n();
    check_measures(mu, nu, n)?;
    if n == 1 {
        return Ok(0.0);
    }
    let anchor = 0;
    // Shifted variables g(z) = f(z) + d(z, anchor) ≥ 0 for z ≠ anchor.
    let vars: Vec<usize> = (0..n).filter(|&z| z != anchor).collect();
    let col = |z: usize| vars.iter().position(|&v| v == z);
    let c: Vec<f64> = vars.iter().map(|&z| nu[z] - mu[z]).collect();
    let mut lp = LinearProgram::new(c.clone());
    for a in 0..n {
        for b in 0..n {
            if a == b {
                continue;
            }
            let mut row = vec![0.0; vars.len()];
            if let Some(k) = col(b) {
                row[k] += 1.0;
            }
            if let Some(k) = col(a) {
                row[k] -= 1.0;
            }
            let rhs = d.get(a, b) + d.get(b, anchor) - d.get(a, anchor);
            lp.add(row, Relation::Le, rhs);
        }
    }
    let sol = lp.maximize()?;
    let offset: f64 = (0..n).map(|z| (nu[z] - mu[z]) * d.get(z, anchor)).sum();
    Ok(sol.value - offset)
}
