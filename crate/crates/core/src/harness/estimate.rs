//! Coupled and empirical estimates of Lipschitz constants and contraction
//! sensitivity.

use crate::bmatch::{plip_mwbm, plip_mwbm_coupled};
use crate::error::{Error, Result};
use crate::graph::{contract_edge, kruskal_mst, BipartiteMatching, BipartiteWeights, WeightVector, WeightedMultigraph};
use crate::harness::stats::Summary;
use crate::lipsp::{lip_sp, lip_sp_coupled};
use crate::metrics::{d_u, d_w, emd_empirical, EdgeMultiset, EdgeSetDistribution};
use crate::mst::{lip_mst, lip_mst_coupled, plip_mst, plip_mst_coupled};
use crate::mwm::lip_mwm;
use crate::par::map_trials;
use crate::rng::{lane, Stream};
use crate::sp::sp;

/// An algorithm whose output is an edge multiset of a weighted graph.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Algorithm {
    LipMst { epsilon: f64 },
    PlipMst { epsilon: f64 },
    LipSp { epsilon: f64, source: usize, target: usize },
    LipMwm { alpha: f64 },
    /// On the complete bipartite graph of a `rows × cols` matrix, edge
    /// `i·cols + j` being cell `(i, j)`.
    PlipMwbm { epsilon: f64, rows: usize, cols: usize },
    /// Deterministic exact minimum spanning tree.
    ExactMst,
    /// Always returns the same edge set, ignoring the weights.
    Fixed,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Metric {
    Weighted,
    Unweighted,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LipschitzEstimate {
    /// `‖w - w'‖₁`, or 1 for contraction sensitivity.
    pub delta: f64,
    /// Mean distance over coupled pairs and its standard error.
    pub coupled: f64,
    pub coupled_stderr: f64,
    /// Transportation distance between the two empirical laws.
    pub emd: f64,
    /// Sampling scale of `emd`: the largest pairwise cost times the summed
    /// per-outcome frequency errors of both laws.
    pub emd_stderr: f64,
    pub coupled_ratio: f64,
    /// `emd / delta`.
    pub ratio: f64,
    pub trials: usize,
    pub support_base: usize,
    pub support_perturbed: usize,
}

impl LipschitzEstimate {
    /// The coupled estimate must dominate the EMD estimate up to `sigmas`
    /// combined standard errors.
    pub fn is_consistent(&self, sigmas: f64) -> bool {
        let se = self.coupled_stderr.hypot(self.emd_stderr);
        self.coupled + sigmas * se >= self.emd - 1e-12
    }
}

fn bipartite_edges(m: &BipartiteMatching, cols: usize) -> EdgeMultiset {
    EdgeMultiset::from_set(m.pairs.iter().map(|&(i, j)| i * cols + j))
}

fn as_matrix(w: &WeightVector, rows: usize, cols: usize) -> Result<BipartiteWeights> {
    BipartiteWeights::new(rows, cols, w.as_slice().to_vec())
}

/// One run of `alg`.
pub fn run_algorithm(alg: Algorithm, g: &WeightedMultigraph, w: &WeightVector, rng: Stream) -> Result<EdgeMultiset> {
    Ok(match alg {
        Algorithm::LipMst { epsilon } => EdgeMultiset::from_set(lip_mst(g, w, epsilon, rng)?.tree.edges),
        Algorithm::PlipMst { epsilon } => EdgeMultiset::from_set(plip_mst(g, w, epsilon, rng)?.tree.edges),
        Algorithm::LipSp { epsilon, source, target } => EdgeMultiset::from_walk(&lip_sp(g, w, source, target, epsilon, rng)?.walk),
        Algorithm::LipMwm { alpha } => EdgeMultiset::from_set(lip_mwm(g, w, alpha, rng)?.matching.edges),
        Algorithm::PlipMwbm { epsilon, rows, cols } => {
            bipartite_edges(&plip_mwbm(&as_matrix(w, rows, cols)?, epsilon, rng)?.matching, cols)
        }
        Algorithm::ExactMst => EdgeMultiset::from_set(kruskal_mst(g, w)?.edges),
        Algorithm::Fixed => EdgeMultiset::from_set(0..g.edge_count().min(1)),
    })
}

/// Runs of `alg` on `w` and `w + δ1_f` under the algorithm's coupling.
pub fn run_coupled(
    alg: Algorithm,
    g: &WeightedMultigraph,
    w: &WeightVector,
    f: usize,
    delta: f64,
    rng: Stream,
) -> Result<(EdgeMultiset, EdgeMultiset)> {
    Ok(match alg {
        Algorithm::LipMst { epsilon } => {
            let c = lip_mst_coupled(g, w, f, delta, epsilon, rng)?;
            (EdgeMultiset::from_set(c.base.tree.edges), EdgeMultiset::from_set(c.perturbed.tree.edges))
        }
        Algorithm::PlipMst { epsilon } => {
            let c = plip_mst_coupled(g, w, f, delta, epsilon, rng)?;
            (EdgeMultiset::from_set(c.base.tree.edges), EdgeMultiset::from_set(c.perturbed.tree.edges))
        }
        Algorithm::LipSp { epsilon, source, target } => {
            let c = lip_sp_coupled(g, w, source, target, f, delta, epsilon, rng)?.runs;
            (EdgeMultiset::from_walk(&c.base.walk), EdgeMultiset::from_walk(&c.perturbed.walk))
        }
        Algorithm::PlipMwbm { epsilon, rows, cols } => {
            let m = as_matrix(w, rows, cols)?;
            let c = plip_mwbm_coupled(&m, (f / cols, f % cols), delta, epsilon, rng)?.runs;
            (bipartite_edges(&c.base.matching, cols), bipartite_edges(&c.perturbed.matching, cols))
        }
        // shared (b, π), or no randomness at all
        Algorithm::LipMwm { .. } | Algorithm::ExactMst | Algorithm::Fixed => {
            let wp = w.perturbed(f, delta)?;
            (run_algorithm(alg, g, w, rng)?, run_algorithm(alg, g, &wp, rng)?)
        }
    })
}

fn distance(metric: Metric, a: &EdgeMultiset, wa: &WeightVector, b: &EdgeMultiset, wb: &WeightVector) -> f64 {
    match metric {
        Metric::Weighted => d_w(a, wa, b, wb),
        Metric::Unweighted => d_u(a, b),
    }
}

fn trial_stream(seed: u64, lane_id: u64, k: usize) -> Stream {
    Stream::new(seed).derive(lane_id).derive(k as u64)
}

/// Empirical laws of `alg` on `w` and `w2` from independent draws.
fn independent_laws(
    alg: Algorithm,
    g: &WeightedMultigraph,
    w: &WeightVector,
    w2: &WeightVector,
    trials: usize,
    seed: u64,
) -> Result<(EdgeSetDistribution, EdgeSetDistribution)> {
    let p: Result<Vec<_>> = map_trials(trials, |k| run_algorithm(alg, g, w, trial_stream(seed, lane::INDEPENDENT_P, k)))
        .into_iter()
        .collect();
    let q: Result<Vec<_>> = map_trials(trials, |k| run_algorithm(alg, g, w2, trial_stream(seed, lane::INDEPENDENT_Q, k)))
        .into_iter()
        .collect();
    Ok((EdgeSetDistribution::from_samples(p?), EdgeSetDistribution::from_samples(q?)))
}

fn frequency_error(d: &EdgeSetDistribution, n: usize) -> f64 {
    0.5 * d.outcomes().iter().map(|(_, p)| (p * (1.0 - p) / n as f64).sqrt()).sum::<f64>()
}

fn assemble<C>(coupled: &[f64], p: &EdgeSetDistribution, q: &EdgeSetDistribution, cost: C, delta: f64) -> Result<LipschitzEstimate>
where
    C: Fn(&EdgeMultiset, &EdgeMultiset) -> f64,
{
    let emd = emd_empirical(p, q, &cost)?;
    let diam = p
        .outcomes()
        .iter()
        .flat_map(|(a, _)| q.outcomes().iter().map(|(b, _)| cost(a, b)))
        .fold(0.0, f64::max);
    let n = coupled.len();
    let s = Summary::of(coupled);
    Ok(LipschitzEstimate {
        delta,
        coupled: s.mean,
        coupled_stderr: s.stderr,
        emd,
        emd_stderr: diam * (frequency_error(p, n) + frequency_error(q, n)),
        coupled_ratio: s.mean / delta,
        ratio: emd / delta,
        trials: n,
        support_base: p.support_size(),
        support_perturbed: q.support_size(),
    })
}

/// Lipschitz ratio of `alg` at `w` for a raise of `delta` on edge `f`.
#[allow(clippy::too_many_arguments)]
pub fn estimate_lipschitz(
    alg: Algorithm,
    g: &WeightedMultigraph,
    w: &WeightVector,
    f: usize,
    delta: f64,
    trials: usize,
    seed: u64,
    metric: Metric,
) -> Result<LipschitzEstimate> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::BadParams(format!("delta must be positive, got {delta}")));
    }
    if trials == 0 {
        return Err(Error::BadParams("trials must be at least 1".into()));
    }
    g.check_edge(f)?;
    let wp = w.perturbed(f, delta)?;
    let pairs: Result<Vec<f64>> = map_trials(trials, |k| {
        let (a, b) = run_coupled(alg, g, w, f, delta, trial_stream(seed, lane::TRIAL, k))?;
        Ok(distance(metric, &a, w, &b, &wp))
    })
    .into_iter()
    .collect();
    let pairs = pairs?;
    let (p, q) = independent_laws(alg, g, w, &wp, trials, seed)?;
    assemble(&pairs, &p, &q, |a, b| distance(metric, a, w, b, &wp), delta)
}

/// Lipschitz ratio between two arbitrary weight vectors, dividing by
/// `‖w - w2‖₁`. The coupled estimate reuses the same stream on both.
pub fn estimate_lipschitz_between(
    alg: Algorithm,
    g: &WeightedMultigraph,
    w: &WeightVector,
    w2: &WeightVector,
    trials: usize,
    seed: u64,
    metric: Metric,
) -> Result<LipschitzEstimate> {
    let delta = w.l1_distance(w2);
    if delta <= 0.0 || trials == 0 {
        return Err(Error::BadParams("need distinct weight vectors and at least one trial".into()));
    }
    let pairs: Result<Vec<f64>> = map_trials(trials, |k| {
        let s = trial_stream(seed, lane::TRIAL, k);
        let (a, b) = (run_algorithm(alg, g, w, s)?, run_algorithm(alg, g, w2, s)?);
        Ok(distance(metric, &a, w, &b, w2))
    })
    .into_iter()
    .collect();
    let pairs = pairs?;
    let (p, q) = independent_laws(alg, g, w, w2, trials, seed)?;
    assemble(&pairs, &p, &q, |a, b| distance(metric, a, w, b, w2), delta)
}

/// Unweighted distance between the output laws of the contraction-based
/// shortest path on `G` and on `G/e`, walks on `G/e` written in `G`'s edge
/// ids. Not divided by anything (`delta = 1`).
#[allow(clippy::too_many_arguments)]
pub fn estimate_contraction_sensitivity(
    g: &WeightedMultigraph,
    s: usize,
    t: usize,
    epsilon: f64,
    e: usize,
    gamma_override: Option<f64>,
    trials: usize,
    seed: u64,
) -> Result<LipschitzEstimate> {
    g.check_edge(e)?;
    if g.edge(e).touches(s) || g.edge(e).touches(t) {
        return Err(Error::InvalidEdge(e));
    }
    if trials == 0 {
        return Err(Error::BadParams("trials must be at least 1".into()));
    }
    let c = contract_edge(g, e)?;
    let (cs, ct) = (c.map_vertex(s), c.map_vertex(t));
    let on_g = |rng: Stream| -> Result<EdgeMultiset> { Ok(EdgeMultiset::from_walk(&sp(g, s, t, epsilon, rng, gamma_override)?.walk)) };
    let on_ge = |rng: Stream| -> Result<EdgeMultiset> {
        let walk = sp(&c.graph, cs, ct, epsilon, rng, gamma_override)?.walk;
        Ok(EdgeMultiset::from_iter(c.walk_to_original_ids(&walk)))
    };
    let pairs: Result<Vec<f64>> = map_trials(trials, |k| {
        let r = trial_stream(seed, lane::TRIAL, k);
        Ok(d_u(&on_g(r)?, &on_ge(r)?))
    })
    .into_iter()
    .collect();
    let pairs = pairs?;
    let p: Result<Vec<_>> = map_trials(trials, |k| on_g(trial_stream(seed, lane::INDEPENDENT_P, k))).into_iter().collect();
    let q: Result<Vec<_>> = map_trials(trials, |k| on_ge(trial_stream(seed, lane::INDEPENDENT_Q, k))).into_iter().collect();
    let (p, q) = (EdgeSetDistribution::from_samples(p?), EdgeSetDistribution::from_samples(q?));
    assemble(&pairs, &p, &q, d_u, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::gen::{gen_instance, Instance, InstanceKind};

    fn triangle() -> (WeightedMultigraph, WeightVector) {
        let g = WeightedMultigraph::new(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        (g, WeightVector::new(vec![1.0, 2.0, 3.0]).unwrap())
    }

    #[test]
    fn fixed_output_has_zero_estimates() {
        let (g, w) = triangle();
        let est = estimate_lipschitz(Algorithm::Fixed, &g, &w, 1, 0.5, 200, 3, Metric::Unweighted).unwrap();
        assert_eq!((est.coupled, est.emd, est.ratio), (0.0, 0.0, 0.0));
    }

    #[test]
    fn lip_mst_triangle_ratio_within_bound() {
        let (g, w) = triangle();
        let eps = 0.5;
        let est = estimate_lipschitz(Algorithm::LipMst { epsilon: eps }, &g, &w, 1, 0.01, 20_000, 9, Metric::Weighted).unwrap();
        let bound = 2.0 * (1.0 + eps) * (1.0 + eps) / eps;
        assert!(est.coupled_ratio <= bound + 3.0 * est.coupled_stderr / est.delta, "{est:?}");
        assert!(est.is_consistent(3.0), "{est:?}");
    }

    #[test]
    fn mwm_gadget_full_flip_ratio() {
        let Instance::Graph { graph, weights, .. } = gen_instance(&InstanceKind::GadgetThm8, 0).unwrap() else {
            panic!()
        };
        let w2 = WeightVector::new(vec![0.0, 1.0]).unwrap();
        let est = estimate_lipschitz_between(Algorithm::LipMwm { alpha: 2.1 }, &graph, &weights, &w2, 2000, 1, Metric::Weighted).unwrap();
        assert!((est.ratio - 1.0).abs() < 1e-12, "{est:?}");
    }

    #[test]
    fn base_case_contraction_is_deterministic() {
        // γ⁻¹ = 10 exceeds opt = 6 on a 6-path: both runs are BFS paths
        let Instance::Graph { graph, .. } = gen_instance(&InstanceKind::Path { k: 6 }, 0).unwrap() else {
            panic!()
        };
        let est = estimate_contraction_sensitivity(&graph, 0, 6, 0.5, 3, Some(0.1), 100, 2).unwrap();
        // the contracted edge is missing from the G/e walk
        assert_eq!((est.coupled, est.emd), (1.0, 1.0));
        assert_eq!((est.support_base, est.support_perturbed), (1, 1));
        assert!(matches!(
            estimate_contraction_sensitivity(&graph, 0, 6, 0.5, 0, Some(0.1), 10, 2),
            Err(Error::InvalidEdge(0))
        ));
    }

    #[test]
    fn detour_edge_is_invisible() {
        // path 0-1-2-3-4 with a pendant 2-5-6 detour
        let g = WeightedMultigraph::new(7, &[(0, 1), (1, 2), (2, 3), (3, 4), (2, 5), (5, 6)]).unwrap();
        let est = estimate_contraction_sensitivity(&g, 0, 4, 0.5, 5, Some(0.1), 200, 4).unwrap();
        assert_eq!(est.coupled, 0.0);
        assert_eq!(est.emd, 0.0);
    }
}
