use crate::error::{Error, Result};
use crate::graph::multigraph::{WeightVector, WeightedMultigraph};
use crate::graph::walk::Walk;

/// `G/e` together with the maps needed to translate between `G` and `G/e`.
#[derive(Clone, Debug, PartialEq)]
pub struct Contraction {
    pub graph: WeightedMultigraph,
    /// Old vertex to new vertex. Both endpoints of the contracted edge map to
    /// `merged`; the remaining vertices keep their relative order.
    pub vertex_map: Vec<usize>,
    /// Old edge id to new edge id; the contracted edge maps to `None`.
    pub edge_map: Vec<Option<usize>>,
    /// New edge id to old edge id.
    pub edge_origin: Vec<usize>,
    pub merged: usize,
    pub contracted: usize,
}

/// Contract edge `e`: its endpoints become one fresh vertex (the last index),
/// incident edges are reattached and other `u`-`v` edges become self-loops.
pub fn contract_edge(g: &WeightedMultigraph, e: usize) -> Result<Contraction> {
    g.check_edge(e)?;
    let edge = g.edge(e);
    if edge.is_self_loop() {
        return Err(Error::SelfLoop(e));
    }
    let n = g.vertex_count();
    let merged = n - 2;
    let mut vertex_map = vec![0; n];
    let mut next = 0;
    for (v, slot) in vertex_map.iter_mut().enumerate() {
        if edge.touches(v) {
            *slot = merged;
        } else {
            *slot = next;
            next += 1;
        }
    }
    let mut edge_map = vec![None; g.edge_count()];
    let mut edge_origin = Vec::with_capacity(g.edge_count() - 1);
    let mut endpoints = Vec::with_capacity(g.edge_count() - 1);
    for x in g.edges() {
        if x.id == e {
            continue;
        }
        edge_map[x.id] = Some(edge_origin.len());
        edge_origin.push(x.id);
        endpoints.push((vertex_map[x.u], vertex_map[x.v]));
    }
    Ok(Contraction {
        graph: WeightedMultigraph::new(n - 1, &endpoints)?,
        vertex_map,
        edge_map,
        edge_origin,
        merged,
        contracted: e,
    })
}

impl Contraction {
    /// Weight vector of `G/e` induced by a weight vector of `G`.
    pub fn restrict_weights(&self, w: &WeightVector) -> WeightVector {
        WeightVector::new(self.edge_origin.iter().map(|&o| w[o]).collect())
            .expect("restriction of a valid weight vector")
    }

    /// Express a walk of `G/e` in `G`'s edge ids. Traversal directions are
    /// kept relative to the new edge; only the edge multiset is meaningful.
    pub fn walk_to_original_ids(&self, walk: &Walk) -> Vec<usize> {
        walk.steps.iter().map(|s| self.edge_origin[s.edge]).collect()
    }

    pub fn map_vertex(&self, v: usize) -> usize {
        self.vertex_map[v]
    }
}
