use crate::error::{Error, Result};
use crate::graph::{bfs_dist, bfs_dist_to, HopGraph};

/// Slack factor in the activity threshold `(1 + kγ)·opt(s,t)`.
pub const ACTIVITY_K: f64 = 16.0;

fn opt_and_tables<G: HopGraph + ?Sized>(
    g: &G,
    s: usize,
    t: usize,
) -> Result<(usize, Vec<Option<usize>>, Vec<Option<usize>>)> {
    for v in [s, t] {
        if v >= g.vertex_count() {
            return Err(Error::InvalidVertex(v));
        }
    }
    let from_s = bfs_dist(g, s);
    let opt = from_s[t].ok_or(Error::Unreachable { from: s, to: t })?;
    Ok((opt, from_s, bfs_dist_to(g, t)))
}

/// Length of a shortest `s`-`t` walk through `v`.
pub fn opt_through<G: HopGraph + ?Sized>(g: &G, s: usize, t: usize, v: usize) -> Result<usize> {
    let (_, from_s, to_t) = opt_and_tables(g, s, t)?;
    if v >= g.vertex_count() {
        return Err(Error::InvalidVertex(v));
    }
    match (from_s[v], to_t[v]) {
        (Some(a), Some(b)) => Ok(a + b),
        (None, _) => Err(Error::Unreachable { from: s, to: v }),
        (_, None) => Err(Error::Unreachable { from: v, to: t }),
    }
}

fn through_edge<G: HopGraph + ?Sized>(
    g: &G,
    e: usize,
    from_s: &[Option<usize>],
    to_t: &[Option<usize>],
) -> Option<usize> {
    g.traversals(e)
        .into_iter()
        .filter_map(|step| g.step_ends(step))
        .filter_map(|(tail, head)| Some(from_s[tail]? + 1 + to_t[head]?))
        .min()
}

/// Length of a shortest `s`-`t` walk that traverses `e`, minimised over the
/// allowed orientations of `e`.
pub fn opt_through_edge<G: HopGraph + ?Sized>(g: &G, s: usize, t: usize, e: usize) -> Result<usize> {
    if e >= g.edge_total() {
        return Err(Error::InvalidEdge(e));
    }
    let (_, from_s, to_t) = opt_and_tables(g, s, t)?;
    through_edge(g, e, &from_s, &to_t).ok_or(Error::Unreachable { from: s, to: t })
}

/// Whether a call on `(s, t)` is active for edge `e`: some walk through `e`
/// has length at most `(1 + 16γ)·opt(s,t)`. An edge no `s`-`t` walk can use
/// is inactive.
pub fn is_active<G: HopGraph + ?Sized>(g: &G, s: usize, t: usize, e: usize, gamma: f64) -> Result<bool> {
    if e >= g.edge_total() {
        return Err(Error::InvalidEdge(e));
    }
    let (opt, from_s, to_t) = opt_and_tables(g, s, t)?;
    Ok(match through_edge(g, e, &from_s, &to_t) {
        Some(len) => len as f64 <= (1.0 + ACTIVITY_K * gamma) * opt as f64,
        None => false,
    })
}
