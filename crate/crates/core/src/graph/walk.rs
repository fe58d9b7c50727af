use std::collections::BTreeMap;

use crate::error::{Error, Result};

/// One traversal of an edge. `forward` means from the edge's first endpoint
/// to its second; directed arcs are always traversed forward.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Step {
    pub edge: usize,
    pub forward: bool,
}

impl Step {
    pub fn new(edge: usize, forward: bool) -> Self {
        Self { edge, forward }
    }
}

/// An `s`-`t` walk as an ordered sequence of edge traversals.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Walk {
    pub source: usize,
    pub target: usize,
    pub steps: Vec<Step>,
}

impl Walk {
    pub fn empty(v: usize) -> Self {
        Self {
            source: v,
            target: v,
            steps: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Concatenate `self` (s-v) with `next` (v-t).
    pub fn concat(mut self, next: Walk) -> Result<Walk> {
        if self.target != next.source {
            return Err(Error::MalformedWalk(format!(
                "cannot join walk ending at {} with walk starting at {}",
                self.target, next.source
            )));
        }
        self.steps.extend(next.steps);
        self.target = next.target;
        Ok(self)
    }

    /// Edge id to multiplicity.
    pub fn multiplicities(&self) -> BTreeMap<usize, u32> {
        let mut m = BTreeMap::new();
        for s in &self.steps {
            *m.entry(s.edge).or_insert(0) += 1;
        }
        m
    }

    /// Check that consecutive steps chain from `source` to `target`, where
    /// `ends` maps a step to its (tail, head).
    pub fn validate_with<F>(&self, ends: F) -> Result<()>
    where
        F: Fn(Step) -> Option<(usize, usize)>,
    {
        let mut at = self.source;
        for (i, &s) in self.steps.iter().enumerate() {
            let (tail, head) = ends(s)
                .ok_or_else(|| Error::MalformedWalk(format!("step {i} uses unknown edge {}", s.edge)))?;
            if tail != at {
                return Err(Error::MalformedWalk(format!(
                    "step {i} leaves {tail} but walk is at {at}"
                )));
            }
            at = head;
        }
        if at != self.target {
            return Err(Error::MalformedWalk(format!(
                "walk ends at {at}, expected {}",
                self.target
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn concat_checks_junction() {
        let a = Walk {
            source: 0,
            target: 1,
            steps: vec![Step::new(0, true)],
        };
        let b = Walk {
            source: 1,
            target: 2,
            steps: vec![Step::new(1, true)],
        };
        let c = a.clone().concat(b.clone()).unwrap();
        assert_eq!((c.source, c.target, c.len()), (0, 2, 2));
        assert!(b.concat(a).is_err());
    }

    #[test]
    fn multiplicity_counts_repeats() {
        let w = Walk {
            source: 0,
            target: 0,
            steps: vec![Step::new(3, true), Step::new(3, false)],
        };
        assert_eq!(w.multiplicities().get(&3), Some(&2));
    }
}
