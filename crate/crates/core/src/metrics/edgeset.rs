use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::graph::walk::Walk;

/// Edge multiset in canonical form: `(edge id, multiplicity)` sorted by id,
/// every multiplicity at least one.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgeMultiset(Vec<(usize, u32)>);

impl EdgeMultiset {
    pub fn from_set<I: IntoIterator<Item = usize>>(edges: I) -> Self {
        Self::from_iter(edges)
    }

    pub fn from_walk(walk: &Walk) -> Self {
        Self(walk.multiplicities().into_iter().collect())
    }

    /// Build from `(edge, multiplicity)` pairs; zero multiplicities are dropped
    /// and repeated ids are summed.
    pub fn from_counts<I: IntoIterator<Item = (usize, u32)>>(pairs: I) -> Self {
        let mut m = BTreeMap::new();
        for (e, c) in pairs {
            *m.entry(e).or_insert(0) += c;
        }
        Self(m.into_iter().filter(|&(_, c)| c > 0).collect())
    }

    pub fn entries(&self) -> &[(usize, u32)] {
        &self.0
    }

    pub fn multiplicity(&self, e: usize) -> u32 {
        self.0
            .binary_search_by_key(&e, |&(id, _)| id)
            .map_or(0, |i| self.0[i].1)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Total multiplicity.
    pub fn size(&self) -> u32 {
        self.0.iter().map(|&(_, c)| c).sum()
    }

    /// Relabel edge ids; used to move multisets between `G/e` and `G`.
    pub fn map_ids<F: Fn(usize) -> usize>(&self, f: F) -> Self {
        Self::from_counts(self.0.iter().map(|&(e, c)| (f(e), c)))
    }

    fn parse(text: &str) -> Result<Self> {
        let mut pairs = Vec::new();
        for tok in text.split_whitespace() {
            let (e, c) = tok.split_once(':').ok_or_else(|| Error::Parse {
                line: 0,
                msg: format!("expected edge:mult, got `{tok}`"),
            })?;
            let e = e.parse().map_err(|_| Error::Parse {
                line: 0,
                msg: format!("bad edge id `{e}`"),
            })?;
            let c: u32 = c.parse().map_err(|_| Error::Parse {
                line: 0,
                msg: format!("bad multiplicity `{c}`"),
            })?;
            if c == 0 {
                return Err(Error::Parse {
                    line: 0,
                    msg: "multiplicity must be positive".into(),
                });
            }
            pairs.push((e, c));
        }
        Ok(Self::from_counts(pairs))
    }
}

impl FromIterator<usize> for EdgeMultiset {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        Self::from_counts(iter.into_iter().map(|e| (e, 1)))
    }
}

impl fmt::Display for EdgeMultiset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (e, c)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{e}:{c}")?;
        }
        Ok(())
    }
}

/// Empirical distribution over edge multisets, outcomes sorted and unique.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct EdgeSetDistribution {
    outcomes: Vec<(EdgeMultiset, f64)>,
}

impl EdgeSetDistribution {
    /// Empirical law of equally weighted samples.
    pub fn from_samples<I: IntoIterator<Item = EdgeMultiset>>(samples: I) -> Self {
        let mut counts: BTreeMap<EdgeMultiset, usize> = BTreeMap::new();
        let mut n = 0usize;
        for s in samples {
            *counts.entry(s).or_insert(0) += 1;
            n += 1;
        }
        let outcomes = counts
            .into_iter()
            .map(|(k, c)| (k, c as f64 / n as f64))
            .collect();
        Self { outcomes }
    }

    /// From explicit `(outcome, probability)` pairs; duplicates are merged.
    /// Probabilities must be nonnegative and sum to one within `1e-12`.
    pub fn from_weighted<I: IntoIterator<Item = (EdgeMultiset, f64)>>(pairs: I) -> Result<Self> {
        let mut m: BTreeMap<EdgeMultiset, f64> = BTreeMap::new();
        for (k, p) in pairs {
            if !(p >= 0.0 && p.is_finite()) {
                return Err(Error::BadParams(format!("probability {p}")));
            }
            *m.entry(k).or_insert(0.0) += p;
        }
        let total: f64 = m.values().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::BadParams(format!("probabilities sum to {total}")));
        }
        Ok(Self {
            outcomes: m.into_iter().collect(),
        })
    }

    pub fn point_mass(outcome: EdgeMultiset) -> Self {
        Self {
            outcomes: vec![(outcome, 1.0)],
        }
    }

    pub fn outcomes(&self) -> &[(EdgeMultiset, f64)] {
        &self.outcomes
    }

    pub fn support_size(&self) -> usize {
        self.outcomes.len()
    }

    pub fn probability(&self, outcome: &EdgeMultiset) -> f64 {
        self.outcomes
            .binary_search_by(|(k, _)| k.cmp(outcome))
            .map_or(0.0, |i| self.outcomes[i].1)
    }

    /// One line per outcome: `prob<TAB>edge:mult edge:mult ...`.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (k, p) in &self.outcomes {
            s.push_str(&format!("{p:e}\t{k}\n"));
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut pairs = Vec::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let (p, rest) = line.split_once('\t').ok_or_else(|| Error::Parse {
                line: i + 1,
                msg: "missing tab".into(),
            })?;
            let p: f64 = p.trim().parse().map_err(|_| Error::Parse {
                line: i + 1,
                msg: format!("bad probability `{p}`"),
            })?;
            let k = EdgeMultiset::parse(rest).map_err(|e| match e {
                Error::Parse { msg, .. } => Error::Parse { line: i + 1, msg },
                other => other,
            })?;
            pairs.push((k, p));
        }
        Self::from_weighted(pairs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::walk::Step;

    #[test]
    fn canonical_form() {
        let a = EdgeMultiset::from_set([3, 1, 3]);
        assert_eq!(a.entries(), &[(1, 1), (3, 2)]);
        assert_eq!(a.multiplicity(3), 2);
        assert_eq!(a.multiplicity(7), 0);
        assert_eq!(a.size(), 3);
        let w = Walk {
            source: 0,
            target: 0,
            steps: vec![Step::new(2, true), Step::new(2, false)],
        };
        assert_eq!(EdgeMultiset::from_walk(&w).entries(), &[(2, 2)]);
    }

    #[test]
    fn samples_dedupe() {
        let d = EdgeSetDistribution::from_samples(vec![
            EdgeMultiset::from_set([1]),
            EdgeMultiset::from_set([0]),
            EdgeMultiset::from_set([1]),
            EdgeMultiset::from_set([1]),
        ]);
        assert_eq!(d.support_size(), 2);
        assert_eq!(d.probability(&EdgeMultiset::from_set([1])), 0.75);
    }

    #[test]
    fn text_format() {
        let d = EdgeSetDistribution::from_weighted(vec![
            (EdgeMultiset::from_counts([(4, 2), (0, 1)]), 0.25),
            (EdgeMultiset::default(), 0.75),
        ])
        .unwrap();
        let text = d.to_text();
        assert!(text.contains("2.5e-1\t0:1 4:2\n"));
        assert_eq!(EdgeSetDistribution::from_text(&text).unwrap(), d);
        assert!(EdgeSetDistribution::from_text("0.5\t1:1\n").is_err());
        assert!(EdgeSetDistribution::from_text("1\t1:0\n").is_err());
    }
}
