//! Exact discrete optimal transport by successive shortest paths.

use std::io::Write;

use crate::error::{Error, Result};
use crate::num::{compensated_sum, Real};

/// Optimal coupling between two weight vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct TransportPlan<T> {
    /// `Σ π_ij c_ij` at the optimum.
    pub cost: T,
    /// Nonzero entries `(source, target, mass)`, row-major.
    pub entries: Vec<(usize, usize, T)>,
}

impl<T: Real> TransportPlan<T> {
    /// Writes `source_atom,target_atom,mass` rows with a header.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["source_atom", "target_atom", "mass"])?;
        for (i, j, m) in &self.entries {
            out.write_record([i.to_string(), j.to_string(), format!("{:e}", m.to_f64_lossy())])?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Minimises `Σ π_ij cost(i, j)` over couplings of `a` and `b`.
///
/// The flow network is source → rows → columns → sink; each round runs a
/// dense Dijkstra on reduced costs and pushes the bottleneck amount.
pub fn solve<T: Real>(a: &[T], b: &[T], cost: impl Fn(usize, usize) -> T) -> Result<TransportPlan<T>> {
    let (n, m) = (a.len(), b.len());
    if n == 0 || m == 0 {
        return Err(Error::InvalidParameter("transport between empty measures".into()));
    }
    for &w in a.iter().chain(b) {
        if !(w >= T::zero()) || !w.is_finite() {
            return Err(Error::NegativeWeight(w.to_f64_lossy()));
        }
    }
    let (sa, sb) = (compensated_sum(a.iter().copied()), compensated_sum(b.iter().copied()));
    let tiny = T::epsilon() * T::lit(64.0) * sa.max(sb).max(T::one());
    if (sa - sb).abs() > tiny * T::lit(16.0) {
        return Err(Error::Unnormalized((sa - sb).to_f64_lossy()));
    }
    let c: Vec<T> = (0..n * m).map(|k| cost(k / m, k % m)).collect();
    if c.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite {
            what: "ground cost",
            location: "transport".into(),
        });
    }
    let cmin = c.iter().copied().fold(T::infinity(), T::min);

    // node layout: rows 0..n, columns n..n+m, source n+m, sink n+m+1
    let nodes = n + m + 2;
    let (src, snk) = (n + m, n + m + 1);
    let mut supply: Vec<T> = a.to_vec();
    let mut demand: Vec<T> = b.to_vec();
    let mut flow = vec![T::zero(); n * m];
    let mut pot = vec![T::zero(); nodes];
    // shift so every forward arc starts with a nonnegative reduced cost
    for p in pot.iter_mut().take(n + m).skip(n) {
        *p = cmin.min(T::zero());
    }
    pot[snk] = cmin.min(T::zero());

    let inf = T::infinity();
    let mut dist = vec![inf; nodes];
    let mut prev = vec![usize::MAX; nodes];
    let mut done = vec![false; nodes];
    let mut remaining = sa.min(sb);

    let mut rounds = 0usize;
    while remaining > tiny {
        rounds += 1;
        if rounds > 4 * (n + 1) * (m + 1) + 16 {
            return Err(Error::InvalidParameter("transport solver failed to converge".into()));
        }
        dist.iter_mut().for_each(|d| *d = inf);
        prev.iter_mut().for_each(|p| *p = usize::MAX);
        done.iter_mut().for_each(|d| *d = false);
        dist[src] = T::zero();
        loop {
            let mut u = usize::MAX;
            let mut best = inf;
            for v in 0..nodes {
                if !done[v] && dist[v] < best {
                    best = dist[v];
                    u = v;
                }
            }
            if u == usize::MAX {
                break;
            }
            done[u] = true;
            let relax = |v: usize, w: T, dist: &mut Vec<T>, prev: &mut Vec<usize>| {
                let rc = (w + pot[u] - pot[v]).max(T::zero());
                if dist[u] + rc < dist[v] {
                    dist[v] = dist[u] + rc;
                    prev[v] = u;
                }
            };
            if u == src {
                for i in 0..n {
                    if supply[i] > tiny {
                        relax(i, T::zero(), &mut dist, &mut prev);
                    }
                }
            } else if u < n {
                for j in 0..m {
                    relax(n + j, c[u * m + j], &mut dist, &mut prev);
                }
            } else if u < n + m {
                let j = u - n;
                if demand[j] > tiny {
                    relax(snk, T::zero(), &mut dist, &mut prev);
                }
                for i in 0..n {
                    if flow[i * m + j] > tiny {
                        relax(i, -c[i * m + j], &mut dist, &mut prev);
                    }
                }
            }
        }
        if !dist[snk].is_finite() {
            break;
        }
        for v in 0..nodes {
            pot[v] = pot[v] + dist[v].min(dist[snk]);
        }
        // bottleneck along the path
        let mut amount = remaining;
        let mut v = snk;
        while v != src {
            let u = prev[v];
            let cap = if v == snk {
                demand[u - n]
            } else if u == src {
                supply[v]
            } else if u < n {
                inf
            } else {
                flow[v * m + (u - n)]
            };
            amount = amount.min(cap);
            v = u;
        }
        let mut v = snk;
        while v != src {
            let u = prev[v];
            if v == snk {
                demand[u - n] = demand[u - n] - amount;
            } else if u == src {
                supply[v] = supply[v] - amount;
            } else if u < n {
                flow[u * m + (v - n)] = flow[u * m + (v - n)] + amount;
            } else {
                let k = v * m + (u - n);
                flow[k] = (flow[k] - amount).max(T::zero());
            }
            v = u;
        }
        remaining = remaining - amount;
    }
    if remaining > tiny * T::lit(16.0) {
        return Err(Error::InvalidParameter(format!(
            "transport left {} unassigned",
            remaining.to_f64_lossy()
        )));
    }
    let entries: Vec<(usize, usize, T)> = (0..n * m)
        .filter(|&k| flow[k] > tiny)
        .map(|k| (k / m, k % m, flow[k]))
        .collect();
    let cost = compensated_sum(entries.iter().map(|&(i, j, x)| x * c[i * m + j]));
    Ok(TransportPlan { cost, entries })
}
