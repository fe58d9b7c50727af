use crate::graph::multigraph::WeightVector;
use crate::metrics::edgeset::{EdgeMultiset, EdgeSetDistribution};

/// Merge two canonical multisets, calling `f(edge, mult_a, mult_b)` for every
/// edge in either.
fn merge<F: FnMut(usize, u32, u32)>(a: &EdgeMultiset, b: &EdgeMultiset, mut f: F) {
    let (a, b) = (a.entries(), b.entries());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        match (a.get(i), b.get(j)) {
            (Some(&(ea, ca)), Some(&(eb, cb))) if ea == eb => {
                f(ea, ca, cb);
                i += 1;
                j += 1;
            }
            (Some(&(ea, ca)), Some(&(eb, _))) if ea < eb => {
                f(ea, ca, 0);
                i += 1;
            }
            (Some(&(ea, ca)), None) => {
                f(ea, ca, 0);
                i += 1;
            }
            (_, Some(&(eb, cb))) => {
                f(eb, 0, cb);
                j += 1;
            }
            (None, None) => unreachable!(),
        }
    }
}

/// Unweighted distance: l1 distance of multiplicity vectors.
pub fn d_u(a: &EdgeMultiset, b: &EdgeMultiset) -> f64 {
    let mut total = 0u64;
    merge(a, b, |_, x, y| total += u64::from(x.abs_diff(y)));
    total as f64
}

/// Weighted distance between `(a, wa)` and `(b, wb)`: l1 distance of
/// `sum mult(e) w(e) 1_e`.
pub fn d_w(a: &EdgeMultiset, wa: &WeightVector, b: &EdgeMultiset, wb: &WeightVector) -> f64 {
    let mut total = 0.0;
    merge(a, b, |e, x, y| {
        let lhs = if x > 0 { f64::from(x) * wa[e] } else { 0.0 };
        let rhs = if y > 0 { f64::from(y) * wb[e] } else { 0.0 };
        total += (lhs - rhs).abs();
    });
    total
}

/// Total variation distance over the union support.
pub fn tv_empirical(p: &EdgeSetDistribution, q: &EdgeSetDistribution) -> f64 {
    let (a, b) = (p.outcomes(), q.outcomes());
    let (mut i, mut j) = (0, 0);
    let mut total = 0.0;
    while i < a.len() || j < b.len() {
        match (a.get(i), b.get(j)) {
            (Some((ka, pa)), Some((kb, pb))) => match ka.cmp(kb) {
                std::cmp::Ordering::Equal => {
                    total += (pa - pb).abs();
                    i += 1;
                    j += 1;
                }
                std::cmp::Ordering::Less => {
                    total += pa;
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    total += pb;
                    j += 1;
                }
            },
            (Some((_, pa)), None) => {
                total += pa;
                i += 1;
            }
            (None, Some((_, pb))) => {
                total += pb;
                j += 1;
            }
            (None, None) => unreachable!(),
        }
    }
    (0.5 * total).clamp(0.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(ids: &[usize]) -> EdgeMultiset {
        EdgeMultiset::from_set(ids.iter().copied())
    }

    #[test]
    fn unweighted_examples() {
        assert_eq!(d_u(&set(&[1, 2]), &set(&[1, 2])), 0.0);
        assert_eq!(d_u(&set(&[0]), &set(&[1])), 2.0);
        assert_eq!(d_u(&set(&[4, 4]), &set(&[4])), 1.0);
    }

    #[test]
    fn weighted_examples() {
        let w = WeightVector::new(vec![1.0, 2.0, 5.0]).unwrap();
        let w2 = WeightVector::new(vec![1.25, 2.0, 5.0]).unwrap();
        assert_eq!(d_w(&set(&[0]), &w, &set(&[0]), &w2), 0.25);
        assert_eq!(d_w(&set(&[0, 1]), &w, &set(&[2]), &w), 8.0);
        // walk multiplicities scale the weight
        assert_eq!(d_w(&set(&[2, 2]), &w, &set(&[2]), &w), 5.0);
    }

    #[test]
    fn tv_examples() {
        let a = set(&[0]);
        let b = set(&[1]);
        let p = EdgeSetDistribution::from_weighted(vec![(a.clone(), 0.5), (b.clone(), 0.5)]).unwrap();
        let q = EdgeSetDistribution::point_mass(a.clone());
        assert_eq!(tv_empirical(&p, &p), 0.0);
        assert_eq!(tv_empirical(&q, &EdgeSetDistribution::point_mass(b)), 1.0);
        assert!((tv_empirical(&p, &q) - 0.5).abs() < 1e-15);
    }
}
