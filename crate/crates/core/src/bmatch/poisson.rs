//! Poisson binomial distribution and the acceptance functional of the
//! rounding step.

/// Exact pmf of the number of successes among independent Bernoulli(`y_k`)
/// trials, by iterative convolution. Length `y.len() + 1`.
pub fn poisson_binomial_pmf(y: &[f64]) -> Vec<f64> {
    let mut pmf = vec![1.0];
    for &p in y {
        let mut next = vec![0.0; pmf.len() + 1];
        for (k, &q) in pmf.iter().enumerate() {
            next[k] += q * (1.0 - p);
            next[k + 1] += q * p;
        }
        pmf = next;
    }
    pmf
}

/// `Y(y) = Σ_k pmf(k)/(k+1)`: the chance that a fixed proposer wins a
/// column when the other proposers arrive independently with
/// probabilities `y`.
pub fn y_functional(y: &[f64]) -> f64 {
    poisson_binomial_pmf(y)
        .iter()
        .enumerate()
        .map(|(k, p)| p / (k as f64 + 1.0))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Stream;

    #[test]
    fn small_cases() {
        assert_eq!(poisson_binomial_pmf(&[0.3]), vec![0.7, 0.3]);
        assert_eq!(poisson_binomial_pmf(&[0.5, 0.5]), vec![0.25, 0.5, 0.25]);
        assert_eq!(poisson_binomial_pmf(&[]), vec![1.0]);
        assert!((y_functional(&[1.0]) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn pmf_sums_to_one_and_matches_binomial() {
        let pmf = poisson_binomial_pmf(&[0.2; 6]);
        assert!((pmf.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        // C(6,2) 0.2^2 0.8^4
        assert!((pmf[2] - 15.0 * 0.04 * 0.8f64.powi(4)).abs() < 1e-12);
    }

    #[test]
    fn merging_two_entries_never_raises_y() {
        let s = Stream::new(33);
        for k in 0..10_000u64 {
            let r = s.derive(k);
            let n = 2 + r.index(0, 5);
            let raw: Vec<f64> = (0..n).map(|i| r.uniform(1 + i as u64)).collect();
            let total: f64 = raw.iter().sum::<f64>() / r.uniform(99).max(1e-3);
            let y: Vec<f64> = raw.iter().map(|v| v / total.max(1.0)).collect();
            let mut merged = vec![y[0] + y[1]];
            merged.extend_from_slice(&y[2..]);
            assert!(y_functional(&y) >= y_functional(&merged) - 1e-12);
        }
    }
}
