//! Two-stage randomized rounding of a fractional bipartite matching.
//!
//! Every row proposes to one column (or none) with probabilities `x_i·`;
//! every column that received proposals accepts one uniformly at random.

use crate::coupling::Coupled;
use crate::graph::BipartiteMatching;
use crate::rng::Stream;

/// Everything the rounding decided.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RoundingTranscript {
    /// Column proposed to by each row; `None` is the leftover mass.
    pub p: Vec<Option<usize>>,
    /// Rows proposing to each column, ascending.
    pub candidates: Vec<Vec<usize>>,
    /// Accepted row of each column.
    pub q: Vec<Option<usize>>,
    pub matching: BipartiteMatching,
}

impl RoundingTranscript {
    /// Number of columns whose accepted row differs.
    pub fn q_distance(&self, other: &Self) -> usize {
        self.q.iter().zip(&other.q).filter(|(a, b)| a != b).count()
    }

    /// Number of rows whose proposal differs.
    pub fn p_distance(&self, other: &Self) -> usize {
        self.p.iter().zip(&other.p).filter(|(a, b)| a != b).count()
    }
}

/// Inverse CDF over a row: the first `j` with `u < x_0 + ... + x_j`.
pub fn propose(row: &[f64], u: f64) -> Option<usize> {
    let mut acc = 0.0;
    for (j, &x) in row.iter().enumerate() {
        acc += x;
        if u < acc {
            return Some(j);
        }
    }
    None
}

/// Complete the rounding from proposals: candidate sets and acceptances,
/// with column `j` using draw `j` of `accept`.
pub fn accept(p: Vec<Option<usize>>, cols: usize, accept: Stream) -> RoundingTranscript {
    let mut candidates = vec![Vec::new(); cols];
    for (i, pi) in p.iter().enumerate() {
        if let Some(j) = *pi {
            candidates[j].push(i);
        }
    }
    let q: Vec<Option<usize>> = candidates
        .iter()
        .enumerate()
        .map(|(j, c)| (!c.is_empty()).then(|| c[accept.index(j as u64, c.len())]))
        .collect();
    let pairs = q.iter().enumerate().filter_map(|(j, qi)| qi.map(|i| (i, j))).collect();
    let mut matching = BipartiteMatching { pairs };
    matching.pairs.sort_unstable();
    RoundingTranscript {
        p,
        candidates,
        q,
        matching,
    }
}

/// Round row-major `x` (`rows × cols`) with proposal draws from `propose_s`
/// and acceptance draws from `accept_s`.
pub fn round_matching(x: &[f64], rows: usize, cols: usize, propose_s: Stream, accept_s: Stream) -> RoundingTranscript {
    let p = (0..rows)
        .map(|i| propose(&x[i * cols..(i + 1) * cols], propose_s.uniform(i as u64)))
        .collect();
    accept(p, cols, accept_s)
}

/// Maximal coupling of two categorical laws on `0..n` plus "none". The
/// first outcome is the inverse CDF of `a` at `u1`, so it agrees with
/// [`propose`]; the second equals it with probability `min(1, b_k/a_k)`
/// and otherwise comes from the normalised residual `(b - a)^+` via `u3`.
pub fn coupled_propose(a: &[f64], b: &[f64], u1: f64, u2: f64, u3: f64) -> (Option<usize>, Option<usize>) {
    let none_a = (1.0 - a.iter().sum::<f64>()).max(0.0);
    let none_b = (1.0 - b.iter().sum::<f64>()).max(0.0);
    let mass = |k: Option<usize>, v: &[f64], none: f64| k.map_or(none, |j| v[j]);
    let first = propose(a, u1);
    let (pa, pb) = (mass(first, a, none_a), mass(first, b, none_b));
    if pa > 0.0 && u2 * pa <= pb {
        return (first, first);
    }
    let residual: Vec<f64> = (0..a.len()).map(|j| (b[j] - a[j]).max(0.0)).collect();
    let residual_none = (none_b - none_a).max(0.0);
    let total: f64 = residual.iter().sum::<f64>() + residual_none;
    if total <= 0.0 {
        return (first, first);
    }
    let mut target = u3 * total;
    for (j, &r) in residual.iter().enumerate() {
        if target < r {
            return (first, Some(j));
        }
        target -= r;
    }
    if residual_none > 0.0 {
        (first, None)
    } else {
        let last = residual.iter().rposition(|&r| r > 0.0);
        (first, last)
    }
}

/// Round `x` and `x'` with shared randomness: per-row maximal coupling of
/// the proposals (auxiliary draws from `aux.derive(i)`) and shared
/// acceptance draws. The base transcript equals
/// `round_matching(x, .., propose_s, accept_s)`.
pub fn round_coupled(
    x: &[f64],
    xp: &[f64],
    rows: usize,
    cols: usize,
    propose_s: Stream,
    accept_s: Stream,
    aux: Stream,
) -> Coupled<RoundingTranscript> {
    let mut p = Vec::with_capacity(rows);
    let mut pp = Vec::with_capacity(rows);
    for i in 0..rows {
        let r = i * cols..(i + 1) * cols;
        let a = aux.derive(i as u64);
        let (u, v) = coupled_propose(&x[r.clone()], &xp[r], propose_s.uniform(i as u64), a.uniform(0), a.uniform(1));
        p.push(u);
        pp.push(v);
    }
    Coupled {
        base: accept(p, cols, accept_s),
        perturbed: accept(pp, cols, accept_s),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn permutation_matrix_rounds_to_itself() {
        let x = [0.0, 1.0, 0.0, 0.0, 0.0, 1.0, 1.0, 0.0, 0.0];
        for seed in 0..100 {
            let s = Stream::new(seed);
            let t = round_matching(&x, 3, 3, s.derive(1), s.derive(2));
            assert_eq!(t.matching.pairs, vec![(0, 1), (1, 2), (2, 0)]);
        }
    }

    #[test]
    fn one_column_two_rows_matches_enumeration() {
        // outcomes: both propose (ab), only row 0 (a(1-b)), only row 1
        // ((1-a)b), none; the matched weight follows
        let (a, b) = (0.6, 0.3);
        let (w0, w1) = (2.0, 5.0);
        let expect = a * (1.0 - b) * w0 + (1.0 - a) * b * w1 + a * b * 0.5 * (w0 + w1);
        let x = [a, b];
        let n = 400_000;
        let mut total = 0.0;
        let mut both = 0;
        for seed in 0..n {
            let s = Stream::new(seed);
            let t = round_matching(&x, 2, 1, s.derive(1), s.derive(2));
            if t.candidates[0].len() == 2 {
                both += 1;
            }
            total += t.matching.pairs.iter().map(|&(i, _)| [w0, w1][i]).sum::<f64>();
        }
        let pb = both as f64 / n as f64;
        assert!((pb - a * b).abs() < 4.0 * (a * b * (1.0 - a * b) / n as f64).sqrt());
        let mean = total / n as f64;
        assert!((mean - expect).abs() < 0.02, "{mean} vs {expect}");
    }

    #[test]
    fn transcript_invariants() {
        let x = [0.2, 0.3, 0.1, 0.4, 0.4, 0.1, 0.3, 0.3, 0.3];
        for seed in 0..500 {
            let s = Stream::new(seed);
            let t = round_matching(&x, 3, 3, s.derive(1), s.derive(2));
            for (i, pi) in t.p.iter().enumerate() {
                if let Some(j) = pi {
                    assert!(t.candidates[*j].contains(&i));
                }
            }
            for j in 0..3 {
                match t.q[j] {
                    Some(i) => assert!(t.candidates[j].contains(&i)),
                    None => assert!(t.candidates[j].is_empty()),
                }
            }
            assert!(t.matching.is_valid(3, 3));
        }
    }

    #[test]
    fn coupled_proposals_have_right_marginals_and_tv() {
        let a = [0.5, 0.2, 0.1];
        let b = [0.3, 0.4, 0.1];
        let n = 200_000;
        let mut hb = [0usize; 4];
        let mut differ = 0;
        let s = Stream::new(21);
        for k in 0..n {
            let (x, y) = coupled_propose(&a, &b, s.uniform(3 * k), s.uniform(3 * k + 1), s.uniform(3 * k + 2));
            hb[y.unwrap_or(3)] += 1;
            if x != y {
                differ += 1;
            }
        }
        let pb = [0.3, 0.4, 0.1, 0.2];
        for k in 0..4 {
            let f = hb[k] as f64 / n as f64;
            assert!((f - pb[k]).abs() < 4.0 * (pb[k] * (1.0 - pb[k]) / n as f64).sqrt());
        }
        let tv = 0.2;
        let f = differ as f64 / n as f64;
        assert!((f - tv).abs() < 4.0 * (tv * (1.0 - tv) / n as f64).sqrt(), "{f}");
    }

    #[test]
    fn q_changes_at_most_twice_per_changed_proposal() {
        let x = [0.3, 0.3, 0.3, 0.2, 0.5, 0.2, 0.1, 0.1, 0.7];
        let xp = [0.25, 0.35, 0.3, 0.2, 0.5, 0.2, 0.1, 0.1, 0.7];
        for seed in 0..2000 {
            let s = Stream::new(seed);
            let c = round_coupled(&x, &xp, 3, 3, s.derive(1), s.derive(2), s.derive(3));
            assert_eq!(c.base, round_matching(&x, 3, 3, s.derive(1), s.derive(2)));
            assert!(c.base.q_distance(&c.perturbed) <= 2 * c.base.p_distance(&c.perturbed));
        }
    }
}
