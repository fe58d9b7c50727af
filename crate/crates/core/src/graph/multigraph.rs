use crate::error::{Error, Result};
use crate::graph::walk::Step;

/// Undirected edge with a stable id.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Edge {
    pub id: usize,
    pub u: usize,
    pub v: usize,
}

impl Edge {
    pub fn is_self_loop(&self) -> bool {
        self.u == self.v
    }

    /// Endpoint opposite to `x`.
    pub fn other(&self, x: usize) -> usize {
        if x == self.u {
            self.v
        } else {
            self.u
        }
    }

    pub fn touches(&self, x: usize) -> bool {
        self.u == x || self.v == x
    }
}

/// Undirected multigraph; parallel edges and self-loops are allowed.
///
/// Weights live in a separate [`WeightVector`] so one graph can be paired with
/// many weight vectors. Edge ids are dense `0..m`.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedMultigraph {
    n: usize,
    edges: Vec<Edge>,
    // (edge id, neighbour, traversed forward) per vertex; self-loops omitted.
    adj: Vec<Vec<(usize, usize, bool)>>,
}

impl WeightedMultigraph {
    pub fn new(n: usize, endpoints: &[(usize, usize)]) -> Result<Self> {
        let mut edges = Vec::with_capacity(endpoints.len());
        for (id, &(u, v)) in endpoints.iter().enumerate() {
            if u >= n {
                return Err(Error::InvalidVertex(u));
            }
            if v >= n {
                return Err(Error::InvalidVertex(v));
            }
            edges.push(Edge { id, u, v });
        }
        let mut adj = vec![Vec::new(); n];
        for e in &edges {
            if e.is_self_loop() {
                continue;
            }
            adj[e.u].push((e.id, e.v, true));
            adj[e.v].push((e.id, e.u, false));
        }
        Ok(Self { n, edges, adj })
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, id: usize) -> Edge {
        self.edges[id]
    }

    /// Non-loop incidences of `v` as `(edge id, neighbour, forward)`, by edge id.
    pub fn neighbors(&self, v: usize) -> &[(usize, usize, bool)] {
        &self.adj[v]
    }

    pub fn endpoints(&self) -> Vec<(usize, usize)> {
        self.edges.iter().map(|e| (e.u, e.v)).collect()
    }

    /// Tail and head of a step.
    pub fn step_ends(&self, step: Step) -> (usize, usize) {
        let e = self.edges[step.edge];
        if step.forward {
            (e.u, e.v)
        } else {
            (e.v, e.u)
        }
    }

    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        let mut seen = vec![false; self.n];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(x) = stack.pop() {
            for &(_, y, _) in &self.adj[x] {
                if !seen[y] {
                    seen[y] = true;
                    count += 1;
                    stack.push(y);
                }
            }
        }
        count == self.n
    }

    pub fn check_vertex(&self, v: usize) -> Result<()> {
        if v < self.n {
            Ok(())
        } else {
            Err(Error::InvalidVertex(v))
        }
    }

    pub fn check_edge(&self, e: usize) -> Result<()> {
        if e < self.edges.len() {
            Ok(())
        } else {
            Err(Error::InvalidEdge(e))
        }
    }
}

/// Nonnegative finite edge weights indexed by edge id.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightVector(Vec<f64>);

impl WeightVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some((i, w)) = values
            .iter()
            .enumerate()
            .find(|(_, w)| !w.is_finite() || **w < 0.0)
        {
            return Err(Error::InvalidWeights(format!("entry {i} is {w}")));
        }
        Ok(Self(values))
    }

    /// Validates the length against `g` as well.
    pub fn for_graph(g: &WeightedMultigraph, values: Vec<f64>) -> Result<Self> {
        if values.len() != g.edge_count() {
            return Err(Error::InvalidWeights(format!(
                "length {} but graph has {} edges",
                values.len(),
                g.edge_count()
            )));
        }
        Self::new(values)
    }

    pub fn uniform(m: usize, value: f64) -> Self {
        Self(vec![value; m])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn get(&self, e: usize) -> f64 {
        self.0[e]
    }

    /// `w + delta * 1_f`; the result must stay nonnegative.
    pub fn perturbed(&self, f: usize, delta: f64) -> Result<Self> {
        if f >= self.0.len() {
            return Err(Error::InvalidEdge(f));
        }
        let mut v = self.0.clone();
        v[f] += delta;
        Self::new(v)
    }

    pub fn l1_distance(&self, other: &Self) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b).abs())
            .sum()
    }

    /// Total weight of a set of edge ids.
    pub fn total<I: IntoIterator<Item = usize>>(&self, edges: I) -> f64 {
        edges.into_iter().map(|e| self.0[e]).sum()
    }
}

impl std::ops::Index<usize> for WeightVector {
    type Output = f64;
    fn index(&self, e: usize) -> &f64 {
        &self.0[e]
    }
}
