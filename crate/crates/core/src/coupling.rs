//! Maximal couplings of uniform laws.
//!
//! Several algorithms sample one scalar uniformly from an interval whose
//! endpoints move when a weight is perturbed. Coupled runs draw both values
//! so that they coincide with the largest possible probability,
//! `1 - TV(U[a1, b1], U[a2, b2])`.

use crate::rng::Stream;

/// A coupled pair of draws.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoupledDraw {
    pub first: f64,
    pub second: f64,
}

impl CoupledDraw {
    pub fn coincide(&self) -> bool {
        self.first == self.second
    }
}

/// Outputs of one algorithm run on `w` and on a perturbed `w'` with shared
/// randomness.
#[derive(Clone, Debug, PartialEq)]
pub struct Coupled<T> {
    pub base: T,
    pub perturbed: T,
}

/// Total variation distance between `U[a1, b1]` and `U[a2, b2]`.
pub fn uniform_tv(a1: f64, b1: f64, a2: f64, b2: f64) -> f64 {
    let (l1, l2) = (b1 - a1, b2 - a2);
    if l1 <= 0.0 || l2 <= 0.0 {
        return if l1 <= 0.0 && l2 <= 0.0 && a1 == a2 { 0.0 } else { 1.0 };
    }
    let overlap = (b1.min(b2) - a1.max(a2)).max(0.0);
    1.0 - overlap / l1.max(l2)
}

/// Maximal coupling of `U[a1, b1]` and `U[a2, b2]`.
///
/// `first` is always `a1 + u1 (b1 - a1)`, so the first marginal agrees with
/// an uncoupled run that uses the same `u1`. `second` equals `first` when
/// `first` lands in the overlap and `u2` accepts it with probability
/// `min(1, len1 / len2)`; otherwise it is drawn with `u3` from the residual
/// density `(p2 - min(p1, p2))`, which is piecewise constant on at most three
/// pieces.
pub fn maximal_uniform_coupling(
    (a1, b1): (f64, f64),
    (a2, b2): (f64, f64),
    u1: f64,
    u2: f64,
    u3: f64,
) -> CoupledDraw {
    let (l1, l2) = (b1 - a1, b2 - a2);
    let first = a1 + u1 * l1;
    if l2 <= 0.0 {
        return CoupledDraw { first, second: a2 };
    }
    if l1 <= 0.0 {
        // a point mass overlaps a continuous law with probability zero
        return CoupledDraw {
            first,
            second: a2 + u3 * l2,
        };
    }
    let lo = a1.max(a2);
    let hi = b1.min(b2);
    if hi <= lo {
        return CoupledDraw {
            first,
            second: a2 + u3 * l2,
        };
    }
    if first >= lo && first <= hi && u2 * l2 <= l1 {
        return CoupledDraw {
            first,
            second: first,
        };
    }
    // residual pieces: [a2, lo) and (hi, b2] at density 1/l2, and the
    // overlap at density max(0, 1/l2 - 1/l1)
    let inner = (1.0 / l2 - 1.0 / l1).max(0.0);
    let pieces = [
        (a2, lo, if lo > a2 { 1.0 / l2 } else { 0.0 }),
        (lo, hi, inner),
        (hi, b2, if b2 > hi { 1.0 / l2 } else { 0.0 }),
    ];
    let total: f64 = pieces.iter().map(|&(s, e, d)| (e - s) * d).sum();
    if total <= 0.0 {
        // identical laws; rejection has probability zero
        return CoupledDraw {
            first,
            second: first,
        };
    }
    let mut target = u3 * total;
    for &(s, e, d) in &pieces {
        let mass = (e - s) * d;
        if mass <= 0.0 {
            continue;
        }
        if target < mass {
            return CoupledDraw {
                first,
                second: s + target / d,
            };
        }
        target -= mass;
    }
    let &(_, e, _) = pieces.iter().rev().find(|p| p.2 > 0.0).unwrap();
    CoupledDraw { first, second: e }
}

/// Maximal coupling with the three uniforms taken from `stream`: draw
/// `index` of `primary` and draws 0 and 1 of `aux`.
pub fn coupled_from_stream(
    first: (f64, f64),
    second: (f64, f64),
    primary: Stream,
    index: u64,
    aux: Stream,
) -> CoupledDraw {
    maximal_uniform_coupling(
        first,
        second,
        primary.uniform(index),
        aux.uniform(0),
        aux.uniform(1),
    )
}
