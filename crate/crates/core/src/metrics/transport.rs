//! Exact transportation problem by successive shortest paths, and the
//! earth mover's distance between empirical edge-set distributions.

use crate::error::{Error, Result};
use crate::metrics::edgeset::{EdgeMultiset, EdgeSetDistribution};

/// Largest support (per side) accepted by [`emd_empirical`].
pub const MAX_SUPPORT: usize = 10_000;

const ARC_TOL: f64 = 1e-15;
const MASS_TOL: f64 = 1e-12;

/// Optimal transport plan between `supply` and `demand`.
#[derive(Clone, Debug)]
pub struct TransportPlan {
    pub cost: f64,
    /// Nonzero flows `(source, sink, mass)`.
    pub flows: Vec<(usize, usize, f64)>,
}

/// Min-cost transportation: ship `supply` to `demand` with per-unit cost
/// `cost[i * demand.len() + j]`. Totals should agree; shipping stops when
/// either side is exhausted to within `1e-12`.
///
/// Successive shortest paths with Johnson potentials and a dense Dijkstra;
/// among equal-distance labels the lowest node index is settled first, so
/// the plan is deterministic.
pub fn solve_transport(supply: &[f64], demand: &[f64], cost: &[f64]) -> TransportPlan {
    let (n1, n2) = (supply.len(), demand.len());
    assert_eq!(cost.len(), n1 * n2, "cost matrix shape");
    // node layout: 0 = S, 1..=n1 sources, n1+1..=n1+n2 sinks, n1+n2+1 = T
    let nodes = n1 + n2 + 2;
    let sink_node = |j: usize| n1 + 1 + j;
    let t_node = nodes - 1;
    let mut rs = supply.to_vec();
    let mut rd = demand.to_vec();
    let mut flow = vec![0.0; n1 * n2];
    let mut pot = vec![0.0; nodes];
    let mut dist = vec![f64::INFINITY; nodes];
    let mut done = vec![false; nodes];
    let mut prev = vec![usize::MAX; nodes];

    let max_rounds = 4 * (n1 + n2 + 1) * (n1 + n2 + 1) + 16;
    for _ in 0..max_rounds {
        let left_s: f64 = rs.iter().sum();
        let left_d: f64 = rd.iter().sum();
        if left_s <= MASS_TOL || left_d <= MASS_TOL {
            break;
        }
        dist.fill(f64::INFINITY);
        done.fill(false);
        prev.fill(usize::MAX);
        dist[0] = 0.0;
        loop {
            let mut x = usize::MAX;
            let mut best = f64::INFINITY;
            for v in 0..nodes {
                if !done[v] && dist[v] < best {
                    best = dist[v];
                    x = v;
                }
            }
            if x == usize::MAX || x == t_node {
                break;
            }
            done[x] = true;
            let dx = dist[x];
            let relax = |y: usize, c: f64, dist: &mut [f64], prev: &mut [usize]| {
                let rc = (c + pot[x] - pot[y]).max(0.0);
                if dx + rc < dist[y] {
                    dist[y] = dx + rc;
                    prev[y] = x;
                }
            };
            if x == 0 {
                for i in 0..n1 {
                    if rs[i] > ARC_TOL {
                        relax(1 + i, 0.0, &mut dist, &mut prev);
                    }
                }
            } else if x <= n1 {
                let i = x - 1;
                for j in 0..n2 {
                    relax(sink_node(j), cost[i * n2 + j], &mut dist, &mut prev);
                }
            } else {
                let j = x - n1 - 1;
                for i in 0..n1 {
                    if flow[i * n2 + j] > ARC_TOL {
                        relax(1 + i, -cost[i * n2 + j], &mut dist, &mut prev);
                    }
                }
                if rd[j] > ARC_TOL {
                    relax(t_node, 0.0, &mut dist, &mut prev);
                }
            }
        }
        if !dist[t_node].is_finite() {
            break;
        }
        let dt = dist[t_node];
        for v in 0..nodes {
            pot[v] += dist[v].min(dt);
        }
        // bottleneck along T <- ... <- S
        let mut bottleneck = f64::INFINITY;
        let mut y = t_node;
        while y != 0 {
            let x = prev[y];
            if x == 0 {
                bottleneck = bottleneck.min(rs[y - 1]);
            } else if y == t_node {
                bottleneck = bottleneck.min(rd[x - n1 - 1]);
            } else if x > n1 {
                // reverse arc sink -> source cancels flow
                bottleneck = bottleneck.min(flow[(y - 1) * n2 + (x - n1 - 1)]);
            }
            y = x;
        }
        let mut y = t_node;
        while y != 0 {
            let x = prev[y];
            if x == 0 {
                rs[y - 1] -= bottleneck;
                if rs[y - 1] <= ARC_TOL {
                    rs[y - 1] = 0.0;
                }
            } else if y == t_node {
                let j = x - n1 - 1;
                rd[j] -= bottleneck;
                if rd[j] <= ARC_TOL {
                    rd[j] = 0.0;
                }
            } else if x <= n1 {
                flow[(x - 1) * n2 + (y - n1 - 1)] += bottleneck;
            } else {
                let k = (y - 1) * n2 + (x - n1 - 1);
                flow[k] -= bottleneck;
                if flow[k] <= ARC_TOL {
                    flow[k] = 0.0;
                }
            }
            y = x;
        }
    }

    let mut flows = Vec::new();
    let mut total = 0.0;
    for i in 0..n1 {
        for j in 0..n2 {
            let f = flow[i * n2 + j];
            if f > 0.0 {
                total += f * cost[i * n2 + j];
                flows.push((i, j, f));
            }
        }
    }
    TransportPlan { cost: total, flows }
}

/// Earth mover's distance between two empirical distributions under `cost`.
pub fn emd_empirical<C>(p: &EdgeSetDistribution, q: &EdgeSetDistribution, cost: C) -> Result<f64>
where
    C: Fn(&EdgeMultiset, &EdgeMultiset) -> f64,
{
    Ok(emd_plan(p, q, cost)?.cost)
}

/// Optimal coupling behind [`emd_empirical`].
pub fn emd_plan<C>(p: &EdgeSetDistribution, q: &EdgeSetDistribution, cost: C) -> Result<TransportPlan>
where
    C: Fn(&EdgeMultiset, &EdgeMultiset) -> f64,
{
    for d in [p, q] {
        if d.support_size() > MAX_SUPPORT {
            return Err(Error::SupportTooLarge(d.support_size()));
        }
    }
    let supply: Vec<f64> = p.outcomes().iter().map(|(_, x)| *x).collect();
    let demand: Vec<f64> = q.outcomes().iter().map(|(_, x)| *x).collect();
    let mut c = Vec::with_capacity(supply.len() * demand.len());
    for (a, _) in p.outcomes() {
        for (b, _) in q.outcomes() {
            c.push(cost(a, b));
        }
    }
    Ok(solve_transport(&supply, &demand, &c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::distance::d_u;

    fn set(ids: &[usize]) -> EdgeMultiset {
        EdgeMultiset::from_set(ids.iter().copied())
    }

    #[test]
    fn point_masses() {
        let p = EdgeSetDistribution::point_mass(set(&[0, 1]));
        let q = EdgeSetDistribution::point_mass(set(&[2]));
        assert_eq!(emd_empirical(&p, &q, d_u).unwrap(), 3.0);
        assert_eq!(emd_empirical(&p, &p, d_u).unwrap(), 0.0);
    }

    #[test]
    fn two_by_two_against_coupling_vertices() {
        // The coupling polytope of a 2x2 problem is the segment
        // f11 in [max(0, a1 - b2), min(a1, b1)]; a linear cost is minimised
        // at one of its two ends.
        let cases: [([f64; 2], [f64; 2], [f64; 4]); 3] = [
            ([0.3, 0.7], [0.6, 0.4], [1.0, 4.0, 2.0, 0.5]),
            ([0.5, 0.5], [0.5, 0.5], [0.0, 1.0, 1.0, 0.0]),
            ([0.9, 0.1], [0.2, 0.8], [3.0, 1.0, 0.0, 7.0]),
        ];
        for (a, b, c) in cases {
            let lo = (a[0] - b[1]).max(0.0);
            let hi = a[0].min(b[0]);
            let value = |f11: f64| {
                let f12 = a[0] - f11;
                let f21 = b[0] - f11;
                let f22 = a[1] - f21;
                f11 * c[0] + f12 * c[1] + f21 * c[2] + f22 * c[3]
            };
            let oracle = value(lo).min(value(hi));
            let plan = solve_transport(&a, &b, &c);
            assert!((plan.cost - oracle).abs() < 1e-12, "{} vs {oracle}", plan.cost);
        }
    }

    #[test]
    fn plan_has_right_marginals() {
        let a = [0.1, 0.2, 0.3, 0.4];
        let b = [0.25, 0.25, 0.5];
        let c: Vec<f64> = (0..12).map(|k| ((k * 7) % 5) as f64).collect();
        let plan = solve_transport(&a, &b, &c);
        let mut rows = [0.0; 4];
        let mut cols = [0.0; 3];
        for &(i, j, f) in &plan.flows {
            rows[i] += f;
            cols[j] += f;
        }
        for i in 0..4 {
            assert!((rows[i] - a[i]).abs() < 1e-12);
        }
        for j in 0..3 {
            assert!((cols[j] - b[j]).abs() < 1e-12);
        }
    }
}
