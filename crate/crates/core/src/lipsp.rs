//! Lipschitz-continuous weighted shortest path.
//!
//! Weights are discretised at a random scale `b`: edge `e` becomes two
//! opposite directed paths of `ŵ(e) ∈ {⌊w(e)/b⌋+2, ⌊w(e)/b⌋+3}` arcs, with
//! the choice made by a uniform `x(e)` so that `E[ŵ(e)] = w(e)/b + 2`. The
//! directed shortest path of the resulting unweighted gadget graph is mapped
//! back to a walk in the input graph.

use std::collections::VecDeque;

use crate::coupling::{coupled_from_stream, Coupled};
use crate::error::{Error, Result};
use crate::graph::{dijkstra, DirectedGraph, Step, Walk, WeightVector, WeightedMultigraph};
use crate::rng::{lane, Stream};
use crate::sp::di_sp;

/// Rounding record of one input edge.
#[derive(Clone, Debug, PartialEq)]
pub struct GadgetEdge {
    pub edge: usize,
    /// `⌊w(e)/b⌋`.
    pub l: u64,
    pub x: f64,
    /// `ŵ(e)`, the number of arcs on each of the two paths.
    pub rounded: u64,
    pub included: bool,
    /// Arcs of the `u -> v` path in order; empty when excluded.
    pub forward_arcs: Vec<usize>,
    /// Arcs of the `v -> u` path in order; empty when excluded.
    pub backward_arcs: Vec<usize>,
}

/// Where a gadget arc comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ArcOrigin {
    pub edge: usize,
    pub forward: bool,
    /// Index of the arc along its path, `0..ŵ(e)`.
    pub position: usize,
}

/// Unweighted directed graph standing in for `(G, w)` at scale `b`.
///
/// Vertices `0..n` are the vertices of `G`; interior path vertices follow.
#[derive(Clone, Debug, PartialEq)]
pub struct GadgetGraph {
    pub graph: DirectedGraph,
    pub b: f64,
    pub epsilon: f64,
    pub base_vertices: usize,
    pub edges: Vec<GadgetEdge>,
    pub arc_origin: Vec<ArcOrigin>,
    /// Owning `(edge, forward)` path of every interior vertex; `None` for the
    /// vertices of `G`.
    pub vertex_origin: Vec<Option<(usize, bool)>>,
}

impl GadgetGraph {
    /// Edges with `ŵ(e)` above this are left out.
    pub fn length_cap(&self) -> f64 {
        length_cap(self.epsilon, self.base_vertices)
    }

    /// Plain `n m` + `tail head` arc list.
    pub fn to_arc_list(&self) -> String {
        let g = &self.graph;
        let mut out = format!("{} {}\n", g.vertex_count(), g.arc_count());
        for a in g.arcs() {
            out.push_str(&format!("{} {}\n", a.tail, a.head));
        }
        out
    }
}

fn length_cap(epsilon: f64, n: usize) -> f64 {
    12.0 * n as f64 / epsilon + 3.0
}

/// Interval `b` is drawn from.
pub fn scale_range(epsilon: f64, opt: f64, n: usize) -> (f64, f64) {
    let n = n as f64;
    (epsilon * opt / (12.0 * n), epsilon * opt / (6.0 * n))
}

/// `(l, ŵ)` for weight `w`, scale `b` and uniform `x`.
pub fn round_weight(w: f64, b: f64, x: f64) -> (u64, u64) {
    let l = (w / b).floor();
    let threshold = ((l + 1.0) * b - w) / b;
    let rounded = if x <= threshold { l + 2.0 } else { l + 3.0 };
    (l as u64, rounded as u64)
}

/// Image of `x(f)` under the coupling for `w(f) -> w(f) + δ` at a shared
/// scale `b`: a rotation of `[0, 1)` by `-δ/b`.
pub fn shift_x(x: f64, delta: f64, b: f64) -> f64 {
    let eta = delta / b;
    if delta >= 0.0 {
        if x > eta {
            x - eta
        } else {
            x - eta + 1.0
        }
    } else {
        (x - eta).rem_euclid(1.0)
    }
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if epsilon > 0.0 && epsilon < 1.0 {
        Ok(())
    } else {
        Err(Error::BadParams(format!("epsilon must lie in (0, 1), got {epsilon}")))
    }
}

/// Gadget for given `b` and per-edge uniforms `x`.
pub fn build_gadget_with(g: &WeightedMultigraph, w: &WeightVector, epsilon: f64, b: f64, x: &[f64]) -> GadgetGraph {
    let n = g.vertex_count();
    let cap = length_cap(epsilon, n);
    let mut arcs = Vec::new();
    let mut arc_origin = Vec::new();
    let mut vertex_origin = vec![None; n];
    let mut records = Vec::with_capacity(g.edge_count());
    for edge in g.edges() {
        let e = edge.id;
        let (l, rounded) = round_weight(w[e], b, x[e]);
        let included = rounded as f64 <= cap && !edge.is_self_loop();
        let mut rec = GadgetEdge {
            edge: e,
            l,
            x: x[e],
            rounded,
            included,
            forward_arcs: Vec::new(),
            backward_arcs: Vec::new(),
        };
        if included {
            for forward in [true, false] {
                let (from, to) = if forward { (edge.u, edge.v) } else { (edge.v, edge.u) };
                let mut prev = from;
                let mut ids = Vec::with_capacity(rounded as usize);
                for position in 0..rounded as usize {
                    let next = if position + 1 == rounded as usize {
                        to
                    } else {
                        vertex_origin.push(Some((e, forward)));
                        vertex_origin.len() - 1
                    };
                    ids.push(arcs.len());
                    arcs.push((prev, next));
                    arc_origin.push(ArcOrigin {
                        edge: e,
                        forward,
                        position,
                    });
                    prev = next;
                }
                if forward {
                    rec.forward_arcs = ids;
                } else {
                    rec.backward_arcs = ids;
                }
            }
        }
        records.push(rec);
    }
    let graph = DirectedGraph::new(vertex_origin.len(), &arcs).expect("gadget arcs use valid vertices");
    GadgetGraph {
        graph,
        b,
        epsilon,
        base_vertices: n,
        edges: records,
        arc_origin,
        vertex_origin,
    }
}

fn lane_of(rng: Stream) -> Stream {
    rng.derive(lane::LIP_SP)
}

fn shortest(g: &WeightedMultigraph, w: &WeightVector, s: usize, t: usize) -> Result<f64> {
    g.check_vertex(s)?;
    g.check_vertex(t)?;
    if w.len() != g.edge_count() {
        return Err(Error::InvalidWeights(format!(
            "length {} but graph has {} edges",
            w.len(),
            g.edge_count()
        )));
    }
    let opt = dijkstra(g, w, s).dist[t];
    if opt.is_finite() {
        Ok(opt)
    } else {
        Err(Error::Unreachable { from: s, to: t })
    }
}

/// Sample `b` and `x` and build the gadget. Requires `opt(s,t) > 0`.
pub fn build_gadget(
    g: &WeightedMultigraph,
    w: &WeightVector,
    s: usize,
    t: usize,
    epsilon: f64,
    rng: Stream,
) -> Result<GadgetGraph> {
    check_epsilon(epsilon)?;
    let opt = shortest(g, w, s, t)?;
    if opt <= 0.0 {
        return Err(Error::ZeroOptimum);
    }
    let (b, x) = sample_scale_and_offsets(g, opt, epsilon, rng);
    Ok(build_gadget_with(g, w, epsilon, b, &x))
}

fn sample_scale_and_offsets(g: &WeightedMultigraph, opt: f64, epsilon: f64, rng: Stream) -> (f64, Vec<f64>) {
    let s = lane_of(rng);
    let (lo, hi) = scale_range(epsilon, opt, g.vertex_count());
    let b = s.derive(0).uniform_in(0, lo, hi);
    let xs = s.derive(1);
    (b, (0..g.edge_count()).map(|e| xs.uniform(e as u64)).collect())
}

/// Translate a gadget walk into a walk of `G`. Every maximal run of arcs
/// from one gadget path must cover that whole path and becomes a single
/// traversal of the edge.
pub fn map_walk_back(gadget: &GadgetGraph, g: &WeightedMultigraph, hat: &Walk) -> Result<Walk> {
    if hat.source >= gadget.base_vertices || hat.target >= gadget.base_vertices {
        return Err(Error::MalformedWalk("walk endpoints are interior gadget vertices".into()));
    }
    let mut steps = Vec::new();
    let mut expect: Option<(ArcOrigin, usize)> = None;
    for (i, step) in hat.steps.iter().enumerate() {
        let origin = *gadget
            .arc_origin
            .get(step.edge)
            .ok_or_else(|| Error::MalformedWalk(format!("step {i} uses unknown arc {}", step.edge)))?;
        match expect {
            None => {
                if origin.position != 0 {
                    return Err(Error::MalformedWalk(format!(
                        "step {i} enters the path of edge {} at position {}",
                        origin.edge, origin.position
                    )));
                }
            }
            Some((prev, _)) => {
                if origin.edge != prev.edge || origin.forward != prev.forward || origin.position != prev.position + 1 {
                    return Err(Error::MalformedWalk(format!(
                        "step {i} leaves the path of edge {} before its end",
                        prev.edge
                    )));
                }
            }
        }
        let len = gadget.edges[origin.edge].rounded as usize;
        if origin.position + 1 == len {
            steps.push(Step::new(origin.edge, origin.forward));
            expect = None;
        } else {
            expect = Some((origin, len));
        }
    }
    if expect.is_some() {
        return Err(Error::MalformedWalk("walk ends inside a gadget path".into()));
    }
    let walk = Walk {
        source: hat.source,
        target: hat.target,
        steps,
    };
    walk.validate_with(|s| (s.edge < g.edge_count()).then(|| g.step_ends(s)))?;
    Ok(walk)
}

/// Fewest-edge `s`-`t` path using only zero-weight edges, if any.
pub fn zero_weight_path(g: &WeightedMultigraph, w: &WeightVector, s: usize, t: usize) -> Option<Walk> {
    let n = g.vertex_count();
    let mut pred: Vec<Option<(Step, usize)>> = vec![None; n];
    let mut seen = vec![false; n];
    seen[s] = true;
    let mut queue = VecDeque::from([s]);
    while let Some(v) = queue.pop_front() {
        if v == t {
            break;
        }
        for &(e, y, fwd) in g.neighbors(v) {
            if w[e] == 0.0 && !seen[y] {
                seen[y] = true;
                pred[y] = Some((Step::new(e, fwd), v));
                queue.push_back(y);
            }
        }
    }
    if !seen[t] {
        return None;
    }
    let mut steps = Vec::new();
    let mut at = t;
    while at != s {
        let (step, prev) = pred[at].unwrap();
        steps.push(step);
        at = prev;
    }
    steps.reverse();
    Some(Walk {
        source: s,
        target: t,
        steps,
    })
}

/// Output of [`lip_sp`].
#[derive(Clone, Debug, PartialEq)]
pub struct LipSpOutcome {
    pub walk: Walk,
    pub opt: f64,
    /// `None` when `opt = 0` and the zero-weight path was returned.
    pub gadget: Option<GadgetGraph>,
}

fn solve_on_gadget(
    g: &WeightedMultigraph,
    gadget: GadgetGraph,
    opt: f64,
    s: usize,
    t: usize,
    rng: Stream,
) -> Result<LipSpOutcome> {
    let hat = di_sp(&gadget.graph, s, t, gadget.epsilon / 4.0, lane_of(rng).derive(2), None)?.walk;
    let walk = map_walk_back(&gadget, g, &hat)?;
    Ok(LipSpOutcome {
        walk,
        opt,
        gadget: Some(gadget),
    })
}

fn zero_outcome(g: &WeightedMultigraph, w: &WeightVector, s: usize, t: usize) -> Result<LipSpOutcome> {
    let walk = zero_weight_path(g, w, s, t).ok_or(Error::Unreachable { from: s, to: t })?;
    Ok(LipSpOutcome {
        walk,
        opt: 0.0,
        gadget: None,
    })
}

/// `(1+ε)`-approximate `s`-`t` walk with low sensitivity to `w`.
pub fn lip_sp(
    g: &WeightedMultigraph,
    w: &WeightVector,
    s: usize,
    t: usize,
    epsilon: f64,
    rng: Stream,
) -> Result<LipSpOutcome> {
    check_epsilon(epsilon)?;
    let opt = shortest(g, w, s, t)?;
    if opt <= 0.0 {
        return zero_outcome(g, w, s, t);
    }
    let (b, x) = sample_scale_and_offsets(g, opt, epsilon, rng);
    let gadget = build_gadget_with(g, w, epsilon, b, &x);
    solve_on_gadget(g, gadget, opt, s, t, rng)
}

/// How the coupled gadgets for `w` and `w + δ1_f` differ.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CouplingCase {
    /// Same scale and same gadget.
    Identical,
    /// The two scales differ.
    ScaleDiffers,
    /// Same scale; the paths of `f` exist in exactly one gadget.
    PathToggled,
    /// Same scale; the paths of `f` exist in both with different lengths.
    LengthChanged,
}

/// Coupled runs of [`lip_sp`].
#[derive(Clone, Debug, PartialEq)]
pub struct CoupledLipSp {
    pub runs: Coupled<LipSpOutcome>,
    pub case: CouplingCase,
}

/// Scales and offsets for `w` and `w + δ1_f` under the shared coupling:
/// `b` is maximally coupled, `x(e)` is shared for `e != f`, and `x(f)` is
/// rotated by [`shift_x`] when the scales agree.
pub fn coupled_scales(
    g: &WeightedMultigraph,
    opt: f64,
    opt_p: f64,
    f: usize,
    delta: f64,
    epsilon: f64,
    rng: Stream,
) -> ((f64, Vec<f64>), (f64, Vec<f64>)) {
    let (b, x) = sample_scale_and_offsets(g, opt, epsilon, rng);
    let n = g.vertex_count();
    let draw = coupled_from_stream(
        scale_range(epsilon, opt, n),
        scale_range(epsilon, opt_p, n),
        lane_of(rng).derive(0),
        0,
        rng.derive(lane::COUPLING).derive(u64::MAX),
    );
    let mut xp = x.clone();
    if draw.coincide() {
        xp[f] = shift_x(x[f], delta, b);
    }
    ((b, x), (draw.second, xp))
}

/// [`lip_sp`] on `w` and `w + δ1_f` with shared randomness; the base run
/// equals `lip_sp(g, w, s, t, epsilon, rng)`.
#[allow(clippy::too_many_arguments)]
pub fn lip_sp_coupled(
    g: &WeightedMultigraph,
    w: &WeightVector,
    s: usize,
    t: usize,
    f: usize,
    delta: f64,
    epsilon: f64,
    rng: Stream,
) -> Result<CoupledLipSp> {
    check_epsilon(epsilon)?;
    let wp = w.perturbed(f, delta)?;
    let opt = shortest(g, w, s, t)?;
    let opt_p = shortest(g, &wp, s, t)?;
    if opt <= 0.0 || opt_p <= 0.0 {
        let base = lip_sp(g, w, s, t, epsilon, rng)?;
        let perturbed = lip_sp(g, &wp, s, t, epsilon, rng)?;
        let case = if base.walk == perturbed.walk && opt == opt_p {
            CouplingCase::Identical
        } else {
            CouplingCase::ScaleDiffers
        };
        return Ok(CoupledLipSp {
            runs: Coupled { base, perturbed },
            case,
        });
    }
    let ((b, x), (bp, xp)) = coupled_scales(g, opt, opt_p, f, delta, epsilon, rng);
    let gadget = build_gadget_with(g, w, epsilon, b, &x);
    let gadget_p = build_gadget_with(g, &wp, epsilon, bp, &xp);
    let case = if b != bp {
        CouplingCase::ScaleDiffers
    } else {
        let (r, rp) = (&gadget.edges[f], &gadget_p.edges[f]);
        match (r.included, rp.included) {
            (true, false) | (false, true) => CouplingCase::PathToggled,
            (true, true) if r.rounded != rp.rounded => CouplingCase::LengthChanged,
            _ => CouplingCase::Identical,
        }
    };
    let base = solve_on_gadget(g, gadget, opt, s, t, rng)?;
    let perturbed = solve_on_gadget(g, gadget_p, opt_p, s, t, rng)?;
    Ok(CoupledLipSp {
        runs: Coupled { base, perturbed },
        case,
    })
}
