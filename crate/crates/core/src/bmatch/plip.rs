//! Pointwise-Lipschitz maximum weight bipartite matching: solve the
//! entropy-regularised LP at a random regularisation weight, then round.

use super::lp::{solve_lp_ent, EntMatchingLP, DEFAULT_TOL};
use super::rounding::{round_coupled, round_matching, RoundingTranscript};
use crate::coupling::{coupled_from_stream, Coupled};
use crate::error::{Error, Result};
use crate::graph::{hungarian_bipartite, BipartiteMatching, BipartiteWeights};
use crate::rng::{lane, Stream};

const SCALAR_LABEL: u64 = u64::MAX;

#[derive(Clone, Debug, PartialEq)]
pub struct PlipMwbmOutcome {
    pub matching: BipartiteMatching,
    /// Absent when the optimum is zero.
    pub lp: Option<EntMatchingLP>,
    pub transcript: Option<RoundingTranscript>,
    pub b_reg: Option<f64>,
    pub opt: f64,
    pub zero_optimum: bool,
}

/// `[ε·opt/(|U| ln|V|), 2ε·opt/(|U| ln|V|)]`.
pub fn b_range(epsilon: f64, opt: f64, rows: usize, cols: usize) -> (f64, f64) {
    let lo = epsilon * opt / (rows as f64 * (cols as f64).ln());
    (lo, 2.0 * lo)
}

fn check(w: &BipartiteWeights, epsilon: f64) -> Result<()> {
    if !(epsilon > 0.0 && epsilon < 0.5) {
        return Err(Error::BadParams(format!("epsilon must lie in (0, 1/2), got {epsilon}")));
    }
    if w.cols() < 2 || w.rows() == 0 {
        return Err(Error::DegenerateShape(format!(
            "need at least one row and two columns, got {}x{}",
            w.rows(),
            w.cols()
        )));
    }
    Ok(())
}

fn zero(opt: f64) -> PlipMwbmOutcome {
    PlipMwbmOutcome {
        matching: BipartiteMatching::default(),
        lp: None,
        transcript: None,
        b_reg: None,
        opt,
        zero_optimum: true,
    }
}

fn streams(rng: Stream) -> (Stream, Stream, Stream) {
    let s = rng.derive(lane::BMATCH);
    (s.derive(0), s.derive(1), s.derive(2))
}

/// Solve and round at a fixed regularisation weight.
pub fn plip_mwbm_with_b(w: &BipartiteWeights, b_reg: f64, opt: f64, rng: Stream) -> Result<PlipMwbmOutcome> {
    let lp = solve_lp_ent(w, b_reg, DEFAULT_TOL)?;
    let (_, p, q) = streams(rng);
    let t = round_matching(&lp.x, w.rows(), w.cols(), p, q);
    Ok(PlipMwbmOutcome {
        matching: t.matching.clone(),
        lp: Some(lp),
        transcript: Some(t),
        b_reg: Some(b_reg),
        opt,
        zero_optimum: false,
    })
}

pub fn plip_mwbm(w: &BipartiteWeights, epsilon: f64, rng: Stream) -> Result<PlipMwbmOutcome> {
    check(w, epsilon)?;
    let (_, opt) = hungarian_bipartite(w);
    if opt <= 0.0 {
        return Ok(zero(opt));
    }
    let (lo, hi) = b_range(epsilon, opt, w.rows(), w.cols());
    let (bs, _, _) = streams(rng);
    plip_mwbm_with_b(w, bs.uniform_in(0, lo, hi), opt, rng)
}

#[derive(Clone, Debug, PartialEq)]
pub struct CoupledMwbm {
    pub runs: Coupled<PlipMwbmOutcome>,
    /// Whether the two regularisation weights coincided.
    pub same_b: bool,
}

/// [`plip_mwbm`] on `w` and on `w` with cell `(i, j)` raised by `delta`.
/// `B` is maximally coupled across the two optima. Proposals are maximally
/// coupled row by row and acceptances share their draws; when `B` differs
/// the proposals share their uniforms instead. The base run equals the
/// uncoupled run with the same `rng`.
pub fn plip_mwbm_coupled(
    w: &BipartiteWeights,
    cell: (usize, usize),
    delta: f64,
    epsilon: f64,
    rng: Stream,
) -> Result<CoupledMwbm> {
    check(w, epsilon)?;
    let wp = w.perturbed(cell.0, cell.1, delta)?;
    let base = plip_mwbm(w, epsilon, rng)?;
    let (_, opt_p) = hungarian_bipartite(&wp);
    if base.zero_optimum || opt_p <= 0.0 {
        let perturbed = plip_mwbm(&wp, epsilon, rng)?;
        let same_b = base.b_reg == perturbed.b_reg;
        return Ok(CoupledMwbm {
            runs: Coupled { base, perturbed },
            same_b,
        });
    }
    let (r, c) = (w.rows(), w.cols());
    let (bs, p, q) = streams(rng);
    let aux = rng.derive(lane::COUPLING).derive(lane::BMATCH);
    let draw = coupled_from_stream(
        b_range(epsilon, base.opt, r, c),
        b_range(epsilon, opt_p, r, c),
        bs,
        0,
        aux.derive(SCALAR_LABEL),
    );
    let lp_p = solve_lp_ent(&wp, draw.second, DEFAULT_TOL)?;
    let base_lp = base.lp.as_ref().expect("nonzero optimum");
    let t = if draw.coincide() {
        round_coupled(&base_lp.x, &lp_p.x, r, c, p, q, aux).perturbed
    } else {
        round_matching(&lp_p.x, r, c, p, q)
    };
    let perturbed = PlipMwbmOutcome {
        matching: t.matching.clone(),
        lp: Some(lp_p),
        transcript: Some(t),
        b_reg: Some(draw.second),
        opt: opt_p,
        zero_optimum: false,
    };
    Ok(CoupledMwbm {
        runs: Coupled { base, perturbed },
        same_b: draw.coincide(),
    })
}

/// `(‖x - x'‖₁, √|U|·δ/B)` for the LP optima at `B` on `w` and on `w` with
/// cell `(i, j)` raised by `delta`.
pub fn lp_stability_check(
    w: &BipartiteWeights,
    cell: (usize, usize),
    delta: f64,
    b_reg: f64,
    tol: f64,
) -> Result<(f64, f64)> {
    let wp = w.perturbed(cell.0, cell.1, delta)?;
    let a = solve_lp_ent(w, b_reg, tol)?;
    let b = solve_lp_ent(&wp, b_reg, tol)?;
    let lhs = a.x.iter().zip(&b.x).map(|(u, v)| (u - v).abs()).sum();
    Ok((lhs, (w.rows() as f64).sqrt() * delta / b_reg))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn matrix(rows: &[Vec<f64>]) -> BipartiteWeights {
        BipartiteWeights::from_rows(rows).unwrap()
    }

    #[test]
    fn one_row_concentrates_on_heavy_cell() {
        // the row optimum is x = (1, e^{-1/B}) / (1 + e^{-1/B}); average over B
        let w = matrix(&[vec![1.0, 0.0]]);
        let (lo, hi) = b_range(0.1, 1.0, 1, 2);
        let m = 10_000;
        let exact = (0..m)
            .map(|k| {
                let b = lo + (hi - lo) * (k as f64 + 0.5) / m as f64;
                1.0 / (1.0 + (-1.0 / b).exp())
            })
            .sum::<f64>()
            / m as f64;
        assert!(exact > 0.988 && exact < 0.989);
        let n = 20_000;
        let hits = (0..n)
            .filter(|&s| plip_mwbm(&w, 0.1, Stream::new(s)).unwrap().matching.pairs == vec![(0, 0)])
            .count();
        let f = hits as f64 / n as f64;
        assert!((f - exact).abs() < 4.0 * (exact * (1.0 - exact) / n as f64).sqrt(), "{f} vs {exact}");
    }

    #[test]
    fn identity_two_by_two_ratio() {
        let w = matrix(&[vec![1.0, 0.0], vec![0.0, 1.0]]);
        let n = 4000u64;
        let vals: Vec<f64> = (0..n)
            .map(|s| plip_mwbm(&w, 0.05, Stream::new(s)).unwrap().matching.weight(&w))
            .collect();
        let mean = vals.iter().sum::<f64>() / n as f64;
        let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        assert!(mean >= (0.5 - 0.05) * 2.0 - 3.0 * (var / n as f64).sqrt(), "{mean}");
    }

    #[test]
    fn zero_weights_and_bad_shapes() {
        let out = plip_mwbm(&matrix(&[vec![0.0, 0.0], vec![0.0, 0.0]]), 0.1, Stream::new(1)).unwrap();
        assert!(out.zero_optimum && out.matching.pairs.is_empty());
        assert!(matches!(
            plip_mwbm(&matrix(&[vec![1.0], vec![2.0]]), 0.1, Stream::new(1)),
            Err(Error::DegenerateShape(_))
        ));
        assert!(matches!(plip_mwbm(&matrix(&[vec![1.0, 1.0]]), 0.5, Stream::new(1)), Err(Error::BadParams(_))));
    }

    #[test]
    fn fractional_value_is_near_optimal_for_every_b() {
        let s = Stream::new(12);
        for k in 0..200u64 {
            let r = s.derive(k);
            let (rows, cols) = (1 + r.index(0, 4), 2 + r.index(1, 4));
            let data = (0..rows * cols).map(|i| r.uniform(2 + i as u64)).collect();
            let w = BipartiteWeights::new(rows, cols, data).unwrap();
            let out = plip_mwbm(&w, 0.1, r).unwrap();
            let value = out.lp.unwrap().fractional_value(&w);
            assert!(value >= (1.0 - 0.2) * out.opt - 1e-7, "{value} vs {}", out.opt);
        }
    }

    #[test]
    fn stability_bound_holds() {
        assert_eq!(lp_stability_check(&matrix(&[vec![0.4, 0.7]]), (0, 0), 0.0, 0.1, 1e-12).unwrap().0, 0.0);
        let s = Stream::new(5);
        let data = (0..24).map(|i| s.uniform(i)).collect();
        let w = BipartiteWeights::new(4, 6, data).unwrap();
        let (lhs, rhs) = lp_stability_check(&w, (1, 2), 1e-3, 0.05, 1e-12).unwrap();
        assert!(lhs <= rhs + 1e-6, "{lhs} > {rhs}");
        // scalar closed form
        let (lhs, _) = lp_stability_check(&matrix(&[vec![0.2, 0.0]]), (0, 0), 0.01, 0.5, 1e-13).unwrap();
        let x = |v: f64| (v / 0.5 - 1.0f64).exp();
        assert!((lhs - (x(0.21) - x(0.2))).abs() < 1e-9);
    }

    #[test]
    fn coupled_base_matches_uncoupled_and_b_tv() {
        let w = matrix(&[vec![0.9, 0.1, 0.5], vec![0.3, 0.8, 0.2]]);
        let delta = 0.02;
        let n = 3000u64;
        let mut differ = 0;
        for seed in 0..n {
            let c = plip_mwbm_coupled(&w, (0, 0), delta, 0.1, Stream::new(seed)).unwrap();
            assert_eq!(c.runs.base, plip_mwbm(&w, 0.1, Stream::new(seed)).unwrap());
            if !c.same_b {
                differ += 1;
            }
        }
        let opt = hungarian_bipartite(&w).1;
        let bound = 2.0 * delta / opt;
        let f = differ as f64 / n as f64;
        assert!(f <= bound + 3.0 * (bound * (1.0 - bound) / n as f64).sqrt(), "{f} > {bound}");
    }
}
