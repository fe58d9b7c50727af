//! Instance generators.

use std::fmt;
use std::str::FromStr;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{BipartiteWeights, WeightVector, WeightedMultigraph};

/// Regeneration attempts before a sparse `random-gnm` request is rejected.
const GNM_ATTEMPTS: usize = 10_000;

#[derive(Clone, Debug, PartialEq)]
pub enum InstanceKind {
    /// Uniform simple graph with `n` vertices and `m` edges, conditioned on
    /// being connected; integer weights in `1..=max_weight`.
    RandomGnm { n: usize, m: usize, max_weight: u32 },
    /// `k` unit edges.
    Path { k: usize },
    /// `k` unit edges around a cycle; `t` is the antipode of `s = 0`.
    Cycle { k: usize },
    Grid { rows: usize, cols: usize },
    /// Two disjoint `s`-`t` paths of `k` edges; one edge of the second is
    /// heavier by `gap`.
    GadgetThm1 { k: usize, gap: f64 },
    /// Two vertices joined by edges of weight `1` and `1 - 10ε`.
    GadgetThm6 { epsilon: f64 },
    /// Two vertices joined by edges of weight `1` and `0`.
    GadgetThm8,
    /// Complete bipartite graph with weights uniform in `[0, 1)`.
    BipartiteRandom { rows: usize, cols: usize },
}

/// A generated or parsed instance.
#[derive(Clone, Debug, PartialEq)]
pub enum Instance {
    Graph {
        graph: WeightedMultigraph,
        weights: WeightVector,
        source: usize,
        target: usize,
    },
    Bipartite(BipartiteWeights),
}

impl Instance {
    fn graph(graph: WeightedMultigraph, weights: Vec<f64>, source: usize, target: usize) -> Result<Self> {
        let weights = WeightVector::for_graph(&graph, weights)?;
        Ok(Instance::Graph {
            graph,
            weights,
            source,
            target,
        })
    }
}

fn bad(msg: impl Into<String>) -> Error {
    Error::BadParams(msg.into())
}

/// Deterministic for `(kind, seed)`.
pub fn gen_instance(kind: &InstanceKind, seed: u64) -> Result<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match *kind {
        InstanceKind::RandomGnm { n, m, max_weight } => {
            if n < 2 || m + 1 < n || m > n * (n - 1) / 2 || max_weight == 0 {
                return Err(bad(format!("random-gnm needs 2 <= n, n-1 <= m <= n(n-1)/2, got n={n} m={m}")));
            }
            let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
            for _ in 0..GNM_ATTEMPTS {
                let mut picked = sample(&mut rng, pairs.len(), m).into_vec();
                picked.sort_unstable();
                let endpoints: Vec<(usize, usize)> = picked.iter().map(|&k| pairs[k]).collect();
                let g = WeightedMultigraph::new(n, &endpoints)?;
                if g.is_connected() {
                    let w = (0..m).map(|_| f64::from(rng.random_range(1..=max_weight))).collect();
                    return Instance::graph(g, w, 0, n - 1);
                }
            }
            Err(bad(format!("no connected random-gnm({n}, {m}) after {GNM_ATTEMPTS} attempts")))
        }
        InstanceKind::Path { k } => {
            if k == 0 {
                return Err(bad("path needs at least one edge"));
            }
            let endpoints: Vec<_> = (0..k).map(|i| (i, i + 1)).collect();
            Instance::graph(WeightedMultigraph::new(k + 1, &endpoints)?, vec![1.0; k], 0, k)
        }
        InstanceKind::Cycle { k } => {
            if k < 3 {
                return Err(bad("cycle needs at least three edges"));
            }
            let endpoints: Vec<_> = (0..k).map(|i| (i, (i + 1) % k)).collect();
            Instance::graph(WeightedMultigraph::new(k, &endpoints)?, vec![1.0; k], 0, k / 2)
        }
        InstanceKind::Grid { rows, cols } => {
            if rows == 0 || cols == 0 || rows * cols < 2 {
                return Err(bad("grid needs at least two vertices"));
            }
            let id = |r: usize, c: usize| r * cols + c;
            let mut endpoints = Vec::new();
            for r in 0..rows {
                for c in 0..cols {
                    if c + 1 < cols {
                        endpoints.push((id(r, c), id(r, c + 1)));
                    }
                    if r + 1 < rows {
                        endpoints.push((id(r, c), id(r + 1, c)));
                    }
                }
            }
            let m = endpoints.len();
            Instance::graph(WeightedMultigraph::new(rows * cols, &endpoints)?, vec![1.0; m], 0, rows * cols - 1)
        }
        InstanceKind::GadgetThm1 { k, gap } => {
            if k == 0 || !(gap >= 0.0 && gap.is_finite()) {
                return Err(bad("gadget-thm1 needs k >= 1 and a finite gap >= 0"));
            }
            // s = 0, t = 1, interior vertices of the first path, then the second
            let mut endpoints = Vec::with_capacity(2 * k);
            for p in 0..2 {
                let interior = |i: usize| 2 + p * (k - 1) + i;
                for i in 0..k {
                    let u = if i == 0 { 0 } else { interior(i - 1) };
                    let v = if i + 1 == k { 1 } else { interior(i) };
                    endpoints.push((u, v));
                }
            }
            let mut w = vec![1.0; 2 * k];
            w[2 * k - 1] += gap;
            Instance::graph(WeightedMultigraph::new(2 * k, &endpoints)?, w, 0, 1)
        }
        InstanceKind::GadgetThm6 { epsilon } => {
            if !(epsilon > 0.0 && epsilon < 0.1) {
                return Err(bad(format!("gadget-thm6 needs epsilon in (0, 0.1), got {epsilon}")));
            }
            Instance::graph(WeightedMultigraph::new(2, &[(0, 1), (0, 1)])?, vec![1.0, 1.0 - 10.0 * epsilon], 0, 1)
        }
        InstanceKind::GadgetThm8 => Instance::graph(WeightedMultigraph::new(2, &[(0, 1), (0, 1)])?, vec![1.0, 0.0], 0, 1),
        InstanceKind::BipartiteRandom { rows, cols } => {
            if rows == 0 || cols == 0 {
                return Err(bad("bipartite-random needs positive dimensions"));
            }
            let data = (0..rows * cols).map(|_| rng.random::<f64>()).collect();
            Ok(Instance::Bipartite(BipartiteWeights::new(rows, cols, data)?))
        }
    }
}

impl fmt::Display for InstanceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InstanceKind::RandomGnm { n, m, max_weight } => write!(f, "random-gnm:{n},{m},{max_weight}"),
            InstanceKind::Path { k } => write!(f, "path:{k}"),
            InstanceKind::Cycle { k } => write!(f, "cycle:{k}"),
            InstanceKind::Grid { rows, cols } => write!(f, "grid:{rows},{cols}"),
            InstanceKind::GadgetThm1 { k, gap } => write!(f, "gadget-thm1:{k},{gap}"),
            InstanceKind::GadgetThm6 { epsilon } => write!(f, "gadget-thm6:{epsilon}"),
            InstanceKind::GadgetThm8 => write!(f, "gadget-thm8"),
            InstanceKind::BipartiteRandom { rows, cols } => write!(f, "bipartite-random:{rows},{cols}"),
        }
    }
}

/// `name[:p1,p2,...]`, e.g. `random-gnm:8,14` or `gadget-thm6:0.02`.
impl FromStr for InstanceKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, rest) = s.split_once(':').unwrap_or((s, ""));
        let args: Vec<&str> = if rest.is_empty() { Vec::new() } else { rest.split(',').map(str::trim).collect() };
        let int = |k: usize| -> Result<usize> {
            args.get(k)
                .ok_or_else(|| bad(format!("{name}: missing parameter {}", k + 1)))?
                .parse()
                .map_err(|_| bad(format!("{name}: parameter {} is not an integer", k + 1)))
        };
        let real = |k: usize| -> Result<f64> {
            args.get(k)
                .ok_or_else(|| bad(format!("{name}: missing parameter {}", k + 1)))?
                .parse()
                .map_err(|_| bad(format!("{name}: parameter {} is not a number", k + 1)))
        };
        let arity = |lo: usize, hi: usize| {
            if args.len() < lo || args.len() > hi {
                Err(bad(format!("{name}: expected {lo}..={hi} parameters, got {}", args.len())))
            } else {
                Ok(())
            }
        };
        match name {
            "random-gnm" => {
                arity(2, 3)?;
                let max_weight = if args.len() == 3 { int(2)? as u32 } else { 9 };
                Ok(InstanceKind::RandomGnm {
                    n: int(0)?,
                    m: int(1)?,
                    max_weight,
                })
            }
            "path" => arity(1, 1).and(Ok(InstanceKind::Path { k: int(0)? })),
            "cycle" => arity(1, 1).and(Ok(InstanceKind::Cycle { k: int(0)? })),
            "grid" => arity(2, 2).and(Ok(InstanceKind::Grid {
                rows: int(0)?,
                cols: int(1)?,
            })),
            "gadget-thm1" => {
                arity(1, 2)?;
                let gap = if args.len() == 2 { real(1)? } else { 0.5 };
                Ok(InstanceKind::GadgetThm1 { k: int(0)?, gap })
            }
            "gadget-thm6" => arity(1, 1).and(Ok(InstanceKind::GadgetThm6 { epsilon: real(0)? })),
            "gadget-thm8" => arity(0, 0).and(Ok(InstanceKind::GadgetThm8)),
            "bipartite-random" => arity(2, 2).and(Ok(InstanceKind::BipartiteRandom {
                rows: int(0)?,
                cols: int(1)?,
            })),
            _ => Err(bad(format!("unknown instance kind {name:?}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gadget_thm6_shape() {
        let Instance::Graph { graph, weights, .. } = gen_instance(&InstanceKind::GadgetThm6 { epsilon: 0.02 }, 0).unwrap()
        else {
            panic!()
        };
        assert_eq!(graph.vertex_count(), 2);
        assert_eq!(graph.edge_count(), 2);
        assert_eq!(weights.as_slice(), &[1.0, 1.0 - 0.2]);
    }

    #[test]
    fn path_shape() {
        let Instance::Graph { graph, weights, target, .. } = gen_instance(&InstanceKind::Path { k: 5 }, 0).unwrap() else {
            panic!()
        };
        assert_eq!((graph.vertex_count(), graph.edge_count(), target), (6, 5, 5));
        assert!(weights.as_slice().iter().all(|&w| w == 1.0));
    }

    #[test]
    fn gnm_is_connected_simple_and_deterministic() {
        let kind = InstanceKind::RandomGnm { n: 8, m: 14, max_weight: 9 };
        for seed in 0..50 {
            let inst = gen_instance(&kind, seed).unwrap();
            assert_eq!(inst, gen_instance(&kind, seed).unwrap());
            let Instance::Graph { graph, weights, .. } = inst else { panic!() };
            assert!(graph.is_connected());
            assert_eq!(graph.edge_count(), 14);
            let mut ends: Vec<_> = graph.edges().iter().map(|e| (e.u.min(e.v), e.u.max(e.v))).collect();
            ends.sort_unstable();
            ends.dedup();
            assert_eq!(ends.len(), 14);
            assert!(weights.as_slice().iter().all(|&w| (1.0..=9.0).contains(&w) && w.fract() == 0.0));
        }
        assert!(gen_instance(&InstanceKind::RandomGnm { n: 8, m: 6, max_weight: 9 }, 0).is_err());
    }

    #[test]
    fn gadget_thm1_has_two_disjoint_paths() {
        let Instance::Graph { graph, weights, .. } = gen_instance(&InstanceKind::GadgetThm1 { k: 3, gap: 0.5 }, 0).unwrap()
        else {
            panic!()
        };
        assert_eq!((graph.vertex_count(), graph.edge_count()), (6, 6));
        assert_eq!(crate::graph::bfs_dist(&graph, 0)[1], Some(3));
        assert_eq!(weights.as_slice().iter().sum::<f64>(), 6.5);
    }

    #[test]
    fn kinds_round_trip_through_text() {
        for text in ["random-gnm:8,14,9", "path:4", "cycle:6", "grid:2,3", "gadget-thm1:3,0.5", "gadget-thm6:0.02", "gadget-thm8", "bipartite-random:3,4"] {
            let kind: InstanceKind = text.parse().unwrap();
            assert_eq!(kind.to_string(), text);
        }
        assert!("triangle".parse::<InstanceKind>().is_err());
        assert!("path".parse::<InstanceKind>().is_err());
    }
}
