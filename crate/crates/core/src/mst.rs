//! Lipschitz-continuous minimum spanning trees.
//!
//! [`lip_mst`] perturbs every weight multiplicatively by a factor drawn from
//! `[1, 1+ε]` and returns the MST of the perturbed weights. [`plip_mst`]
//! adds a common additive scale `b ~ U[εopt/(2(n-1)), εopt/(n-1)]` and draws
//! each weight from `[w(e), w(e)+b]`, which gives a pointwise bound that
//! depends on `opt` instead of the weights themselves.

use crate::coupling::{coupled_from_stream, maximal_uniform_coupling, Coupled, CoupledDraw};
use crate::error::{Error, Result};
use crate::graph::{kruskal_by_weights, kruskal_mst, SpanningTree, WeightVector, WeightedMultigraph};
use crate::rng::{lane, Stream};

/// Label of the coupling lane used for shared scalars like `b`.
const SCALAR_LABEL: u64 = u64::MAX;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MstRunConfig {
    pub epsilon: f64,
    pub seed: u64,
}

impl MstRunConfig {
    pub fn new(epsilon: f64, seed: u64) -> Result<Self> {
        check_epsilon(epsilon)?;
        Ok(Self { epsilon, seed })
    }

    pub fn stream(&self) -> Stream {
        Stream::new(self.seed)
    }
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if epsilon > 0.0 && epsilon.is_finite() {
        Ok(())
    } else {
        Err(Error::BadParams(format!("epsilon must be positive and finite, got {epsilon}")))
    }
}

fn check_weights(g: &WeightedMultigraph, w: &WeightVector) -> Result<()> {
    if w.len() != g.edge_count() {
        return Err(Error::InvalidWeights(format!(
            "length {} but graph has {} edges",
            w.len(),
            g.edge_count()
        )));
    }
    Ok(())
}

/// One run of [`lip_mst`].
#[derive(Clone, Debug, PartialEq)]
pub struct MstSample {
    pub tree: SpanningTree,
    /// The perturbed weights the tree is minimum for.
    pub sampled: Vec<f64>,
}

/// Minimum spanning tree of `ŵ(e) ~ U[w(e), (1+ε)w(e)]`.
pub fn lip_mst(g: &WeightedMultigraph, w: &WeightVector, epsilon: f64, rng: Stream) -> Result<MstSample> {
    check_epsilon(epsilon)?;
    check_weights(g, w)?;
    let s = rng.derive(lane::MST);
    let sampled: Vec<f64> = (0..g.edge_count())
        .map(|e| w[e] * (1.0 + epsilon * s.uniform(e as u64)))
        .collect();
    let tree = kruskal_by_weights(g, &sampled)?;
    Ok(MstSample { tree, sampled })
}

/// The coupled draw of `ŵ(f)` for `w(f)` and `w(f)+δ` used by
/// [`lip_mst_coupled`].
pub fn lip_mst_coupled_draw(wf: f64, delta: f64, epsilon: f64, f: usize, rng: Stream) -> CoupledDraw {
    let wp = wf + delta;
    coupled_from_stream(
        (wf, (1.0 + epsilon) * wf),
        (wp, (1.0 + epsilon) * wp),
        rng.derive(lane::MST),
        f as u64,
        rng.derive(lane::COUPLING).derive(f as u64),
    )
}

/// [`lip_mst`] on `w` and `w + δ1_f` with shared draws: every `e != f` gets
/// the same uniform, and `ŵ(f)` is maximally coupled. The base run is
/// identical to `lip_mst(g, w, epsilon, rng)`.
pub fn lip_mst_coupled(
    g: &WeightedMultigraph,
    w: &WeightVector,
    f: usize,
    delta: f64,
    epsilon: f64,
    rng: Stream,
) -> Result<Coupled<MstSample>> {
    let base = lip_mst(g, w, epsilon, rng)?;
    w.perturbed(f, delta)?;
    let mut sampled = base.sampled.clone();
    sampled[f] = lip_mst_coupled_draw(w[f], delta, epsilon, f, rng).second;
    let tree = kruskal_by_weights(g, &sampled)?;
    Ok(Coupled {
        base,
        perturbed: MstSample { tree, sampled },
    })
}

/// One run of [`plip_mst`].
#[derive(Clone, Debug, PartialEq)]
pub struct PlipMstSample {
    pub tree: SpanningTree,
    /// Additive scale; `None` when the optimum is zero.
    pub b: Option<f64>,
    pub sampled: Vec<f64>,
    pub opt: f64,
    /// Set when `opt = 0`: the interval for `b` collapses and the exact MST
    /// is returned.
    pub zero_optimum: bool,
}

/// The interval `b` is drawn from.
pub fn plip_b_range(epsilon: f64, opt: f64, n: usize) -> (f64, f64) {
    let hi = epsilon * opt / (n.saturating_sub(1).max(1)) as f64;
    (0.5 * hi, hi)
}

fn plip_with_b(g: &WeightedMultigraph, w: &WeightVector, b: f64, s: Stream) -> Result<(SpanningTree, Vec<f64>)> {
    let sampled: Vec<f64> = (0..g.edge_count())
        .map(|e| w[e] + b * s.uniform(e as u64))
        .collect();
    Ok((kruskal_by_weights(g, &sampled)?, sampled))
}

/// Minimum spanning tree of `ŵ(e) ~ U[w(e), w(e)+b]` with a random common
/// scale `b`.
pub fn plip_mst(g: &WeightedMultigraph, w: &WeightVector, epsilon: f64, rng: Stream) -> Result<PlipMstSample> {
    check_epsilon(epsilon)?;
    check_weights(g, w)?;
    let exact = kruskal_mst(g, w)?;
    let opt = exact.weight(w);
    if opt <= 0.0 {
        return Ok(PlipMstSample {
            tree: exact,
            b: None,
            sampled: w.as_slice().to_vec(),
            opt,
            zero_optimum: true,
        });
    }
    let s = rng.derive(lane::PLIP_MST);
    let (lo, hi) = plip_b_range(epsilon, opt, g.vertex_count());
    let b = s.derive(0).uniform_in(0, lo, hi);
    let (tree, sampled) = plip_with_b(g, w, b, s.derive(1))?;
    Ok(PlipMstSample {
        tree,
        b: Some(b),
        sampled,
        opt,
        zero_optimum: false,
    })
}

/// [`plip_mst`] on `w` and `w + δ1_f` with shared randomness. `b` is
/// maximally coupled across the two optima; when it coincides, `ŵ(f)` is
/// maximally coupled as well and every other edge reuses its draw. When the
/// two `b` differ, both runs reuse the same per-edge uniforms.
pub fn plip_mst_coupled(
    g: &WeightedMultigraph,
    w: &WeightVector,
    f: usize,
    delta: f64,
    epsilon: f64,
    rng: Stream,
) -> Result<Coupled<PlipMstSample>> {
    let base = plip_mst(g, w, epsilon, rng)?;
    let wp = w.perturbed(f, delta)?;
    let exact = kruskal_mst(g, &wp)?;
    let opt_p = exact.weight(&wp);
    if base.zero_optimum || opt_p <= 0.0 {
        let perturbed = plip_mst(g, &wp, epsilon, rng)?;
        return Ok(Coupled { base, perturbed });
    }
    let s = rng.derive(lane::PLIP_MST);
    let aux = rng.derive(lane::COUPLING);
    let n = g.vertex_count();
    let b_draw = coupled_from_stream(
        plip_b_range(epsilon, base.opt, n),
        plip_b_range(epsilon, opt_p, n),
        s.derive(0),
        0,
        aux.derive(SCALAR_LABEL),
    );
    let bp = b_draw.second;
    let (tree, sampled) = if b_draw.coincide() {
        let mut sampled = base.sampled.clone();
        let fa = aux.derive(f as u64);
        sampled[f] = maximal_uniform_coupling(
            (w[f], w[f] + bp),
            (wp[f], wp[f] + bp),
            s.derive(1).uniform(f as u64),
            fa.uniform(0),
            fa.uniform(1),
        )
        .second;
        (kruskal_by_weights(g, &sampled)?, sampled)
    } else {
        plip_with_b(g, &wp, bp, s.derive(1))?
    };
    Ok(Coupled {
        base,
        perturbed: PlipMstSample {
            tree,
            b: Some(bp),
            sampled,
            opt: opt_p,
            zero_optimum: false,
        },
    })
}
