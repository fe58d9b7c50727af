//! Lipschitz-continuous maximum weight matching.
//!
//! Edge weights are grouped into geometric classes `[bα^i, bα^{i+1})` with a
//! random offset `b ~ U[1, α]`. Levels are processed from the heaviest
//! class down, each time greedily extending the matching with edges of
//! weight at least `bα^i`, scanned in an order induced by a random vertex
//! permutation.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::graph::{Matching, WeightVector, WeightedMultigraph};
use crate::rng::{lane, Stream};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MwmRunConfig {
    pub alpha: f64,
    pub seed: u64,
}

impl MwmRunConfig {
    pub fn new(alpha: f64, seed: u64) -> Result<Self> {
        check_alpha(alpha)?;
        Ok(Self { alpha, seed })
    }

    /// `α = 2 + ε` for `ε ∈ (0, 1/8)`.
    pub fn from_epsilon(epsilon: f64, seed: u64) -> Result<Self> {
        Self::new(alpha_for_epsilon(epsilon)?, seed)
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 2.0 && alpha.is_finite() {
        Ok(())
    } else {
        Err(Error::BadParams(format!("alpha must exceed 2, got {alpha}")))
    }
}

pub fn alpha_for_epsilon(epsilon: f64) -> Result<f64> {
    if epsilon > 0.0 && epsilon < 0.125 {
        Ok(2.0 + epsilon)
    } else {
        Err(Error::BadParams(format!("epsilon must lie in (0, 1/8), got {epsilon}")))
    }
}

/// Largest `i` with `b·α^i ≤ w`, or `None` for `w = 0`.
pub fn class_index(w: f64, b: f64, alpha: f64) -> Option<i32> {
    if w <= 0.0 {
        return None;
    }
    let mut i = ((w / b).ln() / alpha.ln()).floor() as i32;
    // the logarithm can land one off at exact powers
    while b * alpha.powi(i + 1) <= w {
        i += 1;
    }
    while b * alpha.powi(i) > w {
        i -= 1;
    }
    Some(i)
}

/// Level `i` to the edges whose class is exactly `i`, i.e. `E_i \ E_{i+1}`.
/// Only nonempty levels appear.
pub fn class_partition(w: &WeightVector, b: f64, alpha: f64) -> BTreeMap<i32, Vec<usize>> {
    let mut out: BTreeMap<i32, Vec<usize>> = BTreeMap::new();
    for (e, &x) in w.as_slice().iter().enumerate() {
        if let Some(i) = class_index(x, b, alpha) {
            out.entry(i).or_default().push(e);
        }
    }
    out
}

/// Random offset and vertex ranks (`rank[v]` = position of `v` in `π`).
pub fn draw_offset_and_ranks(n: usize, alpha: f64, rng: Stream) -> (f64, Vec<usize>) {
    let s = rng.derive(lane::MWM);
    let b = s.derive(0).uniform_in(0, 1.0, alpha);
    let order = s.derive(1).permutation(n);
    let mut rank = vec![0; n];
    for (pos, &v) in order.iter().enumerate() {
        rank[v] = pos;
    }
    (b, rank)
}

/// Result of one greedy pass over the classes.
#[derive(Clone, Debug, PartialEq)]
pub struct MwmOutcome {
    pub matching: Matching,
    pub b: f64,
    pub rank: Vec<usize>,
    /// Visited levels, heaviest first.
    pub levels: Vec<i32>,
    /// Matching after each visited level.
    pub after_level: Vec<Matching>,
}

/// Edge scan order: by the smaller endpoint rank, then the larger, then id.
pub fn edge_order(g: &WeightedMultigraph, rank: &[usize]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..g.edge_count()).collect();
    order.sort_by_key(|&e| {
        let edge = g.edge(e);
        let (a, c) = (rank[edge.u], rank[edge.v]);
        (a.min(c), a.max(c), e)
    });
    order
}

/// Deterministic core: the greedy for a fixed offset `b` and ranks.
pub fn lip_mwm_with(g: &WeightedMultigraph, w: &WeightVector, alpha: f64, b: f64, rank: &[usize]) -> MwmOutcome {
    let class: Vec<Option<i32>> = (0..g.edge_count())
        .map(|e| {
            if g.edge(e).is_self_loop() {
                None
            } else {
                class_index(w[e], b, alpha)
            }
        })
        .collect();
    let mut levels: Vec<i32> = class.iter().flatten().copied().collect();
    levels.sort_unstable_by(|a, c| c.cmp(a));
    levels.dedup();
    let order = edge_order(g, rank);
    let mut used = vec![false; g.vertex_count()];
    let mut chosen = Vec::new();
    let mut after_level = Vec::with_capacity(levels.len());
    for &i in &levels {
        for &e in &order {
            if class[e].is_some_and(|c| c >= i) {
                let edge = g.edge(e);
                if !used[edge.u] && !used[edge.v] {
                    used[edge.u] = true;
                    used[edge.v] = true;
                    chosen.push(e);
                }
            }
        }
        after_level.push(Matching::new(chosen.clone()));
    }
    MwmOutcome {
        matching: Matching::new(chosen),
        b,
        rank: rank.to_vec(),
        levels,
        after_level,
    }
}

/// Randomized greedy over shifted geometric weight classes.
pub fn lip_mwm(g: &WeightedMultigraph, w: &WeightVector, alpha: f64, rng: Stream) -> Result<MwmOutcome> {
    check_alpha(alpha)?;
    if w.len() != g.edge_count() {
        return Err(Error::InvalidWeights(format!(
            "length {} but graph has {} edges",
            w.len(),
            g.edge_count()
        )));
    }
    let (b, rank) = draw_offset_and_ranks(g.vertex_count(), alpha, rng);
    Ok(lip_mwm_with(g, w, alpha, b, &rank))
}

/// [`lip_mwm`] with `α = 2 + ε`.
pub fn lip_mwm_eps(g: &WeightedMultigraph, w: &WeightVector, epsilon: f64, rng: Stream) -> Result<MwmOutcome> {
    lip_mwm(g, w, alpha_for_epsilon(epsilon)?, rng)
}
