//! Unweighted shortest paths with low contraction sensitivity.
//!
//! [`rec`] finds an `s`-`t` walk by picking a random pivot close to the
//! middle of some near-shortest path and recursing on both halves; once the
//! distance drops below `1/γ` it falls back to an exact BFS path. [`sp`]
//! samples `γ` from the scale that makes the walk a `(1+ε)`-approximation.
//! Both work on undirected multigraphs and on directed graphs through
//! [`HopGraph`].

mod active;

pub use active::{is_active, opt_through, opt_through_edge, ACTIVITY_K};

use crate::error::{Error, Result};
use crate::graph::{bfs_dist, bfs_dist_to, bfs_path, DirectedGraph, Distances, HopGraph, Walk};
use crate::rng::{lane, Stream};

/// Largest `γ` accepted outside test mode.
pub const MAX_GAMMA: f64 = 0.01;

/// Recursion parameters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RecParams {
    pub gamma: f64,
    /// Set when `γ` was fixed by hand rather than sampled from the
    /// `ε`-dependent range. Such values make the recursion reachable at
    /// small scale but fall outside the approximation analysis.
    pub test_override: bool,
}

impl RecParams {
    pub fn new(gamma: f64) -> Result<Self> {
        if !(gamma > 0.0 && gamma <= MAX_GAMMA) {
            return Err(Error::BadParams(format!(
                "gamma must lie in (0, {MAX_GAMMA}], got {gamma}; use a test override for larger values"
            )));
        }
        Ok(Self {
            gamma,
            test_override: false,
        })
    }

    /// Any `γ < 1/8`, the range on which `[1/4 + 2γ, 3/4 - 2γ]` is a
    /// proper interval.
    pub fn test_override(gamma: f64) -> Result<Self> {
        if !(gamma > 0.0 && gamma < 0.125) {
            return Err(Error::BadParams(format!("gamma must lie in (0, 1/8), got {gamma}")));
        }
        Ok(Self {
            gamma,
            test_override: true,
        })
    }

    pub fn d_range(&self) -> (f64, f64) {
        (0.25 + 2.0 * self.gamma, 0.75 - 2.0 * self.gamma)
    }

    pub fn l_range(&self) -> (f64, f64) {
        (self.gamma, 2.0 * self.gamma)
    }

    /// Distances at or below this are solved exactly.
    pub fn base_threshold(&self) -> f64 {
        1.0 / self.gamma
    }
}

/// The random choices and outcome of one recursion call.
#[derive(Clone, Debug, PartialEq)]
pub struct RecCall {
    pub depth: usize,
    pub source: usize,
    pub target: usize,
    pub opt: usize,
    pub d: f64,
    pub l: f64,
    /// `None` in the base case.
    pub pivot_set_size: Option<usize>,
    pub pivot: Option<usize>,
}

/// `V_{d,l}` from precomputed distances.
pub fn pivot_set_from(from_s: &Distances, to_t: &Distances, opt: usize, d: f64, l: f64) -> Vec<usize> {
    let opt = opt as f64;
    let (a, b) = ((d + l) * opt, (1.0 - d + l) * opt);
    (0..from_s.len())
        .filter(|&v| match (from_s[v], to_t[v]) {
            (Some(x), Some(y)) => x as f64 <= a && y as f64 <= b,
            _ => false,
        })
        .collect()
}

fn distance(from_s: &Distances, s: usize, t: usize) -> Result<usize> {
    from_s[t].ok_or(Error::Unreachable { from: s, to: t })
}

fn check_vertex<G: HopGraph + ?Sized>(g: &G, v: usize) -> Result<()> {
    if v < g.vertex_count() {
        Ok(())
    } else {
        Err(Error::InvalidVertex(v))
    }
}

/// `{v : opt(s,v) ≤ (d+l)·opt(s,t) and opt(v,t) ≤ (1-d+l)·opt(s,t)}`,
/// sorted.
pub fn pivot_set<G: HopGraph + ?Sized>(g: &G, s: usize, t: usize, d: f64, l: f64) -> Result<Vec<usize>> {
    check_vertex(g, s)?;
    check_vertex(g, t)?;
    let from_s = bfs_dist(g, s);
    let opt = distance(&from_s, s, t)?;
    Ok(pivot_set_from(&from_s, &bfs_dist_to(g, t), opt, d, l))
}

/// Draws of one call: `d`, `l` and the pivot index, in that order.
fn draw_dl(params: &RecParams, node: Stream) -> (f64, f64) {
    let (dlo, dhi) = params.d_range();
    let (llo, lhi) = params.l_range();
    (node.uniform_in(0, dlo, dhi), node.uniform_in(1, llo, lhi))
}

/// Outcome of the first recursion level, for inspecting the pivot law.
#[derive(Clone, Debug, PartialEq)]
pub struct PivotDraw {
    pub d: f64,
    pub l: f64,
    pub opt: usize,
    pub set: Vec<usize>,
    /// `None` if the set is empty.
    pub pivot: Option<usize>,
}

/// Replay the top-level pivot choice of `rec(g, s, t, params, rng)`,
/// whether or not the call would reach the recursive branch.
pub fn sample_pivot<G: HopGraph + ?Sized>(
    g: &G,
    s: usize,
    t: usize,
    params: &RecParams,
    rng: Stream,
) -> Result<PivotDraw> {
    let node = rng.derive(lane::REC);
    let (d, l) = draw_dl(params, node);
    let from_s = bfs_dist(g, s);
    let opt = distance(&from_s, s, t)?;
    let set = pivot_set_from(&from_s, &bfs_dist_to(g, t), opt, d, l);
    let pivot = (!set.is_empty()).then(|| set[node.index(2, set.len())]);
    Ok(PivotDraw { d, l, opt, set, pivot })
}

struct Recursion<'a, G: HopGraph + ?Sized> {
    g: &'a G,
    params: RecParams,
    trace: Option<Vec<RecCall>>,
}

impl<G: HopGraph + ?Sized> Recursion<'_, G> {
    fn run(&mut self, s: usize, t: usize, node: Stream, depth: usize) -> Result<Walk> {
        let (d, l) = draw_dl(&self.params, node);
        let from_s = bfs_dist(self.g, s);
        let opt = distance(&from_s, s, t)?;
        if opt as f64 <= self.params.base_threshold() {
            if let Some(trace) = &mut self.trace {
                trace.push(RecCall {
                    depth,
                    source: s,
                    target: t,
                    opt,
                    d,
                    l,
                    pivot_set_size: None,
                    pivot: None,
                });
            }
            return bfs_path(self.g, s, t);
        }
        let set = pivot_set_from(&from_s, &bfs_dist_to(self.g, t), opt, d, l);
        if set.is_empty() {
            return Err(Error::BadParams(format!(
                "empty pivot set for opt {opt} at gamma {}",
                self.params.gamma
            )));
        }
        let v = set[node.index(2, set.len())];
        if let Some(trace) = &mut self.trace {
            trace.push(RecCall {
                depth,
                source: s,
                target: t,
                opt,
                d,
                l,
                pivot_set_size: Some(set.len()),
                pivot: Some(v),
            });
        }
        let left = self.run(s, v, node.derive(0), depth + 1)?;
        let right = self.run(v, t, node.derive(1), depth + 1)?;
        left.concat(right)
    }
}

/// Recursive pivot shortest path with fixed `γ`.
pub fn rec<G: HopGraph + ?Sized>(g: &G, s: usize, t: usize, params: &RecParams, rng: Stream) -> Result<Walk> {
    check_vertex(g, s)?;
    check_vertex(g, t)?;
    Recursion {
        g,
        params: *params,
        trace: None,
    }
    .run(s, t, rng.derive(lane::REC), 0)
}

/// [`rec`] plus the list of calls in preorder.
pub fn rec_traced<G: HopGraph + ?Sized>(
    g: &G,
    s: usize,
    t: usize,
    params: &RecParams,
    rng: Stream,
) -> Result<(Walk, Vec<RecCall>)> {
    check_vertex(g, s)?;
    check_vertex(g, t)?;
    let mut r = Recursion {
        g,
        params: *params,
        trace: Some(Vec::new()),
    };
    let walk = r.run(s, t, rng.derive(lane::REC), 0)?;
    Ok((walk, r.trace.unwrap()))
}

/// Range `γ^{-1}` is drawn from.
pub fn gamma_inverse_range(epsilon: f64, n: usize) -> (f64, f64) {
    let ln = (n.max(1) as f64).ln();
    (720.0 * ln / epsilon, 1440.0 * ln / epsilon)
}

/// Output of [`sp`].
#[derive(Clone, Debug, PartialEq)]
pub struct SpOutcome {
    pub walk: Walk,
    pub gamma: f64,
}

/// Sample `γ^{-1} ~ U[720 ln|V|/ε, 1440 ln|V|/ε]` and run [`rec`]. A
/// `gamma_override` replaces the sampled value (test mode).
pub fn sp<G: HopGraph + ?Sized>(
    g: &G,
    s: usize,
    t: usize,
    epsilon: f64,
    rng: Stream,
    gamma_override: Option<f64>,
) -> Result<SpOutcome> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::BadParams(format!("epsilon must lie in (0, 1), got {epsilon}")));
    }
    check_vertex(g, s)?;
    check_vertex(g, t)?;
    let params = match gamma_override {
        Some(gamma) => RecParams::test_override(gamma)?,
        None => {
            let (lo, hi) = gamma_inverse_range(epsilon, g.vertex_count());
            if hi <= 0.0 {
                // a single vertex: s = t
                return Ok(SpOutcome {
                    walk: Walk::empty(s),
                    gamma: f64::INFINITY,
                });
            }
            let inv = rng.derive(lane::SP_GAMMA).uniform_in(0, lo, hi);
            RecParams::new(1.0 / inv)?
        }
    };
    let walk = rec(g, s, t, &params, rng)?;
    Ok(SpOutcome {
        walk,
        gamma: params.gamma,
    })
}

/// [`sp`] on a directed graph.
pub fn di_sp(
    g: &DirectedGraph,
    s: usize,
    t: usize,
    epsilon: f64,
    rng: Stream,
    gamma_override: Option<f64>,
) -> Result<SpOutcome> {
    sp(g, s, t, epsilon, rng, gamma_override)
}

/// [`rec`] on a directed graph.
pub fn di_rec(g: &DirectedGraph, s: usize, t: usize, params: &RecParams, rng: Stream) -> Result<Walk> {
    rec(g, s, t, params, rng)
}

/// Check that `walk` chains through existing traversals of `g`.
pub fn validate_walk<G: HopGraph + ?Sized>(g: &G, walk: &Walk) -> Result<()> {
    walk.validate_with(|step| g.step_ends(step))
}

/// Per-sample length bound `opt^{1+14γ}` of [`rec`].
pub fn length_bound(opt: usize, gamma: f64) -> f64 {
    (opt as f64).powf(1.0 + 14.0 * gamma)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{contract_edge, WeightedMultigraph};

    fn path(k: usize) -> WeightedMultigraph {
        let e: Vec<_> = (0..k).map(|i| (i, i + 1)).collect();
        WeightedMultigraph::new(k + 1, &e).unwrap()
    }

    fn cycle(k: usize) -> WeightedMultigraph {
        let e: Vec<_> = (0..k).map(|i| (i, (i + 1) % k)).collect();
        WeightedMultigraph::new(k, &e).unwrap()
    }

    fn random_connected(n: usize, extra: usize, seed: u64) -> WeightedMultigraph {
        let s = Stream::new(seed);
        let mut e = Vec::new();
        for v in 1..n {
            e.push((s.index(v as u64, v), v));
        }
        for k in 0..extra {
            let a = s.derive(1).index(2 * k as u64, n);
            let b = s.derive(1).index(2 * k as u64 + 1, n);
            if a != b {
                e.push((a, b));
            }
        }
        WeightedMultigraph::new(n, &e).unwrap()
    }

    #[test]
    fn params_validation() {
        assert!(RecParams::new(0.05).is_err());
        assert!(RecParams::new(0.005).is_ok());
        assert!(RecParams::test_override(0.1).is_ok());
        assert!(RecParams::test_override(0.125).is_err());
    }

    #[test]
    fn base_case_is_exact_bfs() {
        let g = cycle(16);
        let params = RecParams::test_override(0.05).unwrap();
        for seed in 0..20 {
            let w = rec(&g, 0, 8, &params, Stream::new(seed)).unwrap();
            assert_eq!(w, bfs_path(&g, 0, 8).unwrap());
        }
    }

    #[test]
    fn sp_at_desk_scale_is_exact() {
        let g = random_connected(30, 20, 3);
        for seed in 0..20 {
            let out = sp(&g, 0, 29, 0.5, Stream::new(seed), None).unwrap();
            assert_eq!(out.walk, bfs_path(&g, 0, 29).unwrap());
            assert!(1.0 / out.gamma >= 720.0 * 30f64.ln() / 0.5);
        }
        let out = sp(&g, 4, 4, 0.5, Stream::new(0), None).unwrap();
        assert!(out.walk.is_empty());
    }

    #[test]
    fn recursion_on_long_path() {
        let g = path(40);
        let params = RecParams::test_override(0.1).unwrap();
        let mut recursed = false;
        for seed in 0..200 {
            let (walk, calls) = rec_traced(&g, 0, 40, &params, Stream::new(seed)).unwrap();
            validate_walk(&g, &walk).unwrap();
            assert!(walk.len() as f64 <= length_bound(40, 0.1));
            // on a path the only walk without backtracking is the path
            assert_eq!(walk.len(), 40);
            recursed |= calls.len() > 1;
            let depth = calls.iter().map(|c| c.depth).max().unwrap();
            assert!(depth as f64 <= 4.0 * 41f64.ln());
        }
        assert!(recursed);
    }

    #[test]
    fn pivots_are_near_optimal_and_shrink() {
        let params = RecParams::test_override(0.05).unwrap();
        for seed in 0..60 {
            let g = random_connected(60, 10, seed);
            let far = bfs_dist(&g, 0);
            let t = (0..60).max_by_key(|&v| far[v].unwrap()).unwrap();
            let (walk, calls) = rec_traced(&g, 0, t, &params, Stream::new(seed)).unwrap();
            validate_walk(&g, &walk).unwrap();
            assert!(walk.len() as f64 <= length_bound(far[t].unwrap(), 0.05));
            for c in calls.iter().filter(|c| c.pivot.is_some()) {
                let v = c.pivot.unwrap();
                let a = bfs_dist(&g, c.source)[v].unwrap();
                let b = bfs_dist(&g, v)[c.target].unwrap();
                let opt = c.opt as f64;
                assert!((a + b) as f64 <= (1.0 + 4.0 * 0.05) * opt + 1e-9);
                assert!(a.max(b) as f64 <= 0.75 * opt + 1e-9);
                assert!(c.pivot_set_size.unwrap() as f64 >= 0.05 * opt);
            }
        }
    }

    #[test]
    fn pivot_set_on_path_is_contiguous_middle() {
        let g = path(20);
        let set = pivot_set(&g, 0, 20, 0.5, 0.1).unwrap();
        // opt(s,v) = v <= 12 and 20 - v <= 12
        assert_eq!(set, (8..=12).collect::<Vec<_>>());
        // adjacent s,t: opt = 1
        let set = pivot_set(&g, 3, 4, 0.5, 0.1).unwrap();
        assert!(set.is_empty());
        let set = pivot_set(&g, 3, 4, 0.5, 0.5).unwrap();
        assert_eq!(set, vec![3, 4]);
    }

    #[test]
    fn sample_pivot_replays_top_call() {
        let g = path(40);
        let params = RecParams::test_override(0.1).unwrap();
        for seed in 0..50 {
            let rng = Stream::new(seed);
            let draw = sample_pivot(&g, 0, 40, &params, rng).unwrap();
            let (_, calls) = rec_traced(&g, 0, 40, &params, rng).unwrap();
            assert_eq!(calls[0].pivot, draw.pivot);
            assert_eq!(calls[0].d, draw.d);
            assert!(draw.set.contains(&draw.pivot.unwrap()));
        }
    }

    #[test]
    fn directed_paths() {
        let arcs: Vec<_> = (0..5).map(|i| (i, i + 1)).collect();
        let g = DirectedGraph::new(6, &arcs).unwrap();
        let out = di_sp(&g, 0, 5, 0.5, Stream::new(1), None).unwrap();
        assert_eq!(out.walk.len(), 5);
        assert!(di_sp(&g, 5, 0, 0.5, Stream::new(1), None).is_err());

        // two disjoint s->t paths of lengths 5 and 9 sharing only s and t
        let mut arcs = Vec::new();
        let mut next = 2;
        for len in [5, 9] {
            let mut prev = 0;
            for _ in 0..len - 1 {
                arcs.push((prev, next));
                prev = next;
                next += 1;
            }
            arcs.push((prev, 1));
        }
        let g = DirectedGraph::new(next, &arcs).unwrap();
        for seed in 0..20 {
            let w = di_sp(&g, 0, 1, 0.5, Stream::new(seed), None).unwrap().walk;
            assert_eq!(w.len(), 5);
            assert!(w.steps.iter().all(|s| s.edge < 5));
        }
    }

    #[test]
    fn directed_recursion_is_valid() {
        // directed cycle with chords, long enough to recurse
        let n = 50;
        let mut arcs: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        arcs.push((10, 5));
        arcs.push((30, 22));
        let g = DirectedGraph::new(n, &arcs).unwrap();
        let params = RecParams::test_override(0.05).unwrap();
        for seed in 0..50 {
            let w = di_rec(&g, 0, 45, &params, Stream::new(seed)).unwrap();
            validate_walk(&g, &w).unwrap();
            assert!(w.len() as f64 <= length_bound(45, 0.05));
        }
    }

    #[test]
    fn contraction_keeps_walks_valid() {
        let g = cycle(30);
        let c = contract_edge(&g, 7).unwrap();
        let params = RecParams::test_override(0.1).unwrap();
        let s = c.map_vertex(0);
        let t = c.map_vertex(15);
        for seed in 0..20 {
            let w = rec(&c.graph, s, t, &params, Stream::new(seed)).unwrap();
            validate_walk(&c.graph, &w).unwrap();
        }
    }
}
