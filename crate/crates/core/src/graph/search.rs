//! Exact baseline solvers: BFS, Dijkstra and Kruskal.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, VecDeque};

use crate::error::{Error, Result};
use crate::graph::directed::DirectedGraph;
use crate::graph::multigraph::{WeightVector, WeightedMultigraph};
use crate::graph::walk::{Step, Walk};

/// Common view of undirected multigraphs and directed graphs as unweighted
/// hop graphs. Undirected edges can be traversed in both directions.
pub trait HopGraph {
    fn vertex_count(&self) -> usize;
    /// Call `f(step, head)` for every traversal leaving `v`.
    fn for_each_out(&self, v: usize, f: &mut dyn FnMut(Step, usize));
    /// Call `f(step, tail)` for every traversal entering `v`.
    fn for_each_in(&self, v: usize, f: &mut dyn FnMut(Step, usize));
    /// (tail, head) of a traversal, or `None` if the step does not exist.
    fn step_ends(&self, step: Step) -> Option<(usize, usize)>;
    /// Traversals of edge `e` that a walk may use.
    fn traversals(&self, e: usize) -> Vec<Step>;
    fn edge_total(&self) -> usize;
}

impl HopGraph for WeightedMultigraph {
    fn vertex_count(&self) -> usize {
        WeightedMultigraph::vertex_count(self)
    }

    fn for_each_out(&self, v: usize, f: &mut dyn FnMut(Step, usize)) {
        for &(e, y, fwd) in self.neighbors(v) {
            f(Step::new(e, fwd), y);
        }
    }

    fn for_each_in(&self, v: usize, f: &mut dyn FnMut(Step, usize)) {
        for &(e, y, fwd) in self.neighbors(v) {
            f(Step::new(e, !fwd), y);
        }
    }

    fn step_ends(&self, step: Step) -> Option<(usize, usize)> {
        (step.edge < self.edge_count()).then(|| WeightedMultigraph::step_ends(self, step))
    }

    fn traversals(&self, e: usize) -> Vec<Step> {
        if self.edge(e).is_self_loop() {
            Vec::new()
        } else {
            vec![Step::new(e, true), Step::new(e, false)]
        }
    }

    fn edge_total(&self) -> usize {
        self.edge_count()
    }
}

impl HopGraph for DirectedGraph {
    fn vertex_count(&self) -> usize {
        DirectedGraph::vertex_count(self)
    }

    fn for_each_out(&self, v: usize, f: &mut dyn FnMut(Step, usize)) {
        for &a in self.out_arcs(v) {
            f(Step::new(a, true), self.arc(a).head);
        }
    }

    fn for_each_in(&self, v: usize, f: &mut dyn FnMut(Step, usize)) {
        for &a in self.in_arcs(v) {
            f(Step::new(a, true), self.arc(a).tail);
        }
    }

    fn step_ends(&self, step: Step) -> Option<(usize, usize)> {
        if !step.forward || step.edge >= self.arc_count() {
            return None;
        }
        let a = self.arc(step.edge);
        Some((a.tail, a.head))
    }

    fn traversals(&self, e: usize) -> Vec<Step> {
        vec![Step::new(e, true)]
    }

    fn edge_total(&self) -> usize {
        self.arc_count()
    }
}

/// Hop distances; `None` marks unreachable vertices.
pub type Distances = Vec<Option<usize>>;

/// Breadth-first hop distances from `s`.
pub fn bfs_dist<G: HopGraph + ?Sized>(g: &G, s: usize) -> Distances {
    let mut dist = vec![None; g.vertex_count()];
    dist[s] = Some(0);
    let mut queue = VecDeque::from([s]);
    while let Some(x) = queue.pop_front() {
        let dx = dist[x].unwrap();
        g.for_each_out(x, &mut |_, y| {
            if dist[y].is_none() {
                dist[y] = Some(dx + 1);
                queue.push_back(y);
            }
        });
    }
    dist
}

/// Hop distances to `t` (BFS on reversed traversals).
pub fn bfs_dist_to<G: HopGraph + ?Sized>(g: &G, t: usize) -> Distances {
    let mut dist = vec![None; g.vertex_count()];
    dist[t] = Some(0);
    let mut queue = VecDeque::from([t]);
    while let Some(x) = queue.pop_front() {
        let dx = dist[x].unwrap();
        g.for_each_in(x, &mut |_, y| {
            if dist[y].is_none() {
                dist[y] = Some(dx + 1);
                queue.push_back(y);
            }
        });
    }
    dist
}

/// Deterministic BFS shortest `s`-`t` path. Ties go to the first traversal
/// discovered, scanning incidences in edge-id order.
pub fn bfs_path<G: HopGraph + ?Sized>(g: &G, s: usize, t: usize) -> Result<Walk> {
    let n = g.vertex_count();
    let mut pred: Vec<Option<(Step, usize)>> = vec![None; n];
    let mut seen = vec![false; n];
    seen[s] = true;
    let mut queue = VecDeque::from([s]);
    while let Some(x) = queue.pop_front() {
        if x == t {
            break;
        }
        g.for_each_out(x, &mut |step, y| {
            if !seen[y] {
                seen[y] = true;
                pred[y] = Some((step, x));
                queue.push_back(y);
            }
        });
    }
    if !seen[t] {
        return Err(Error::Unreachable { from: s, to: t });
    }
    let mut steps = Vec::new();
    let mut at = t;
    while at != s {
        let (step, prev) = pred[at].unwrap();
        steps.push(step);
        at = prev;
    }
    steps.reverse();
    Ok(Walk {
        source: s,
        target: t,
        steps,
    })
}

#[derive(Clone, Copy, PartialEq)]
struct HeapEntry(f64, usize);

impl Eq for HeapEntry {}

impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .0
            .total_cmp(&self.0)
            .then_with(|| other.1.cmp(&self.1))
    }
}

impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Weighted single-source shortest paths.
#[derive(Clone, Debug)]
pub struct ShortestPaths {
    pub source: usize,
    /// `f64::INFINITY` for unreachable vertices.
    pub dist: Vec<f64>,
    /// Step used to enter each vertex on its shortest-path tree.
    pub pred: Vec<Option<Step>>,
}

impl ShortestPaths {
    pub fn path_to(&self, g: &WeightedMultigraph, t: usize) -> Result<Walk> {
        if !self.dist[t].is_finite() {
            return Err(Error::Unreachable {
                from: self.source,
                to: t,
            });
        }
        let mut steps = Vec::new();
        let mut at = t;
        while at != self.source {
            let step = self.pred[at].expect("finite distance has a predecessor");
            steps.push(step);
            at = g.step_ends(step).0;
        }
        steps.reverse();
        Ok(Walk {
            source: self.source,
            target: t,
            steps,
        })
    }
}

/// Dijkstra with a binary heap; self-loops are ignored.
pub fn dijkstra(g: &WeightedMultigraph, w: &WeightVector, s: usize) -> ShortestPaths {
    let n = g.vertex_count();
    let mut dist = vec![f64::INFINITY; n];
    let mut pred = vec![None; n];
    let mut done = vec![false; n];
    dist[s] = 0.0;
    let mut heap = BinaryHeap::from([HeapEntry(0.0, s)]);
    while let Some(HeapEntry(d, x)) = heap.pop() {
        if done[x] {
            continue;
        }
        done[x] = true;
        for &(e, y, fwd) in g.neighbors(x) {
            let nd = d + w[e];
            if nd < dist[y] {
                dist[y] = nd;
                pred[y] = Some(Step::new(e, fwd));
                heap.push(HeapEntry(nd, y));
            }
        }
    }
    ShortestPaths {
        source: s,
        dist,
        pred,
    }
}

/// Weighted length of a walk, counting repeated traversals.
pub fn walk_weight(w: &WeightVector, walk: &Walk) -> f64 {
    walk.steps.iter().map(|s| w[s.edge]).sum()
}

/// Edge set of a spanning tree, sorted by id.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SpanningTree {
    pub edges: Vec<usize>,
}

impl SpanningTree {
    pub fn weight(&self, w: &WeightVector) -> f64 {
        w.total(self.edges.iter().copied())
    }

    /// `n - 1` edges, acyclic and spanning.
    pub fn is_valid_for(&self, g: &WeightedMultigraph) -> bool {
        let n = g.vertex_count();
        if self.edges.len() + 1 != n.max(1) {
            return false;
        }
        let mut dsu = DisjointSets::new(n);
        self.edges.iter().all(|&e| {
            e < g.edge_count() && {
                let edge = g.edge(e);
                dsu.union(edge.u, edge.v)
            }
        })
    }
}

/// Union-find with path halving and union by size.
#[derive(Clone, Debug)]
pub struct DisjointSets {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl DisjointSets {
    pub fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns false if `a` and `b` were already joined.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
        true
    }
}

/// Minimum spanning tree by Kruskal; ties broken by ascending edge id.
pub fn kruskal_mst(g: &WeightedMultigraph, w: &WeightVector) -> Result<SpanningTree> {
    kruskal_by_weights(g, w.as_slice())
}

/// Kruskal on a raw weight slice (sampled weights need not be validated).
pub fn kruskal_by_weights(g: &WeightedMultigraph, w: &[f64]) -> Result<SpanningTree> {
    let n = g.vertex_count();
    let mut order: Vec<usize> = (0..g.edge_count()).collect();
    order.sort_by(|&a, &b| w[a].total_cmp(&w[b]).then(a.cmp(&b)));
    let mut dsu = DisjointSets::new(n);
    let mut edges = Vec::with_capacity(n.saturating_sub(1));
    for e in order {
        let edge = g.edge(e);
        if dsu.union(edge.u, edge.v) {
            edges.push(e);
            if edges.len() + 1 == n {
                break;
            }
        }
    }
    if edges.len() + 1 < n {
        return Err(Error::DisconnectedGraph);
    }
    edges.sort_unstable();
    Ok(SpanningTree { edges })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(k: usize) -> WeightedMultigraph {
        let e: Vec<_> = (0..k).map(|i| (i, i + 1)).collect();
        WeightedMultigraph::new(k + 1, &e).unwrap()
    }

    fn cycle(n: usize) -> WeightedMultigraph {
        let e: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        WeightedMultigraph::new(n, &e).unwrap()
    }

    #[test]
    fn bfs_on_line_and_isolated() {
        assert_eq!(bfs_dist(&path(2), 0), vec![Some(0), Some(1), Some(2)]);
        let g = WeightedMultigraph::new(3, &[(0, 1)]).unwrap();
        assert_eq!(bfs_dist(&g, 0)[2], None);
        assert!(matches!(bfs_path(&g, 0, 2), Err(Error::Unreachable { .. })));
    }

    #[test]
    fn bfs_eight_cycle_antipode() {
        let g = cycle(8);
        assert_eq!(bfs_dist(&g, 0)[4], Some(4));
        let p = bfs_path(&g, 0, 4).unwrap();
        assert_eq!(p.len(), 4);
        p.validate_with(|s| HopGraph::step_ends(&g, s)).unwrap();
    }

    #[test]
    fn directed_distances_respect_orientation() {
        let g = DirectedGraph::new(3, &[(0, 1), (1, 2)]).unwrap();
        assert_eq!(bfs_dist(&g, 2), vec![None, None, Some(0)]);
        assert_eq!(bfs_dist_to(&g, 2), vec![Some(2), Some(1), Some(0)]);
    }

    #[test]
    fn dijkstra_parallel_zero_edge() {
        let g = WeightedMultigraph::new(2, &[(0, 1), (0, 1)]).unwrap();
        let w = WeightVector::new(vec![0.0, 1.0]).unwrap();
        let sp = dijkstra(&g, &w, 0);
        assert_eq!(sp.dist[1], 0.0);
        let p = sp.path_to(&g, 1).unwrap();
        assert_eq!(p.steps, vec![Step::new(0, true)]);
    }

    #[test]
    fn dijkstra_all_zero_weights() {
        let g = cycle(5);
        let sp = dijkstra(&g, &WeightVector::uniform(5, 0.0), 2);
        assert!(sp.dist.iter().all(|&d| d == 0.0));
    }

    #[test]
    fn dijkstra_four_cycle_against_enumeration() {
        // 0-1 (1), 1-2 (2), 2-3 (3), 3-0 (4); simple paths from 0 to 2 are
        // 0-1-2 = 3 and 0-3-2 = 7; to 3 they are 0-3 = 4 and 0-1-2-3 = 6.
        let g = cycle(4);
        let w = WeightVector::new(vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        let sp = dijkstra(&g, &w, 0);
        assert_eq!(sp.dist, vec![0.0, 1.0, 3.0, 4.0]);
    }

    #[test]
    fn kruskal_triangle() {
        // spanning trees: {0,1}=3, {0,2}=4, {1,2}=5
        let g = cycle(3);
        let t = kruskal_by_weights(&g, &[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(t.edges, vec![0, 1]);
        assert_eq!(t.weight(&WeightVector::new(vec![1.0, 2.0, 3.0]).unwrap()), 3.0);
    }

    #[test]
    fn kruskal_ties_take_lowest_ids() {
        let g = WeightedMultigraph::new(4, &[(0, 1), (1, 2), (0, 2), (2, 3), (3, 0)]).unwrap();
        let t = kruskal_by_weights(&g, &[1.0; 5]).unwrap();
        assert_eq!(t.edges, vec![0, 1, 3]);
    }

    #[test]
    fn kruskal_star_and_disconnected() {
        let g = WeightedMultigraph::new(5, &[(0, 1), (0, 2), (0, 3), (0, 4)]).unwrap();
        assert_eq!(kruskal_by_weights(&g, &[4.0, 3.0, 2.0, 1.0]).unwrap().edges, vec![0, 1, 2, 3]);
        let h = WeightedMultigraph::new(3, &[(0, 1)]).unwrap();
        assert_eq!(kruskal_by_weights(&h, &[1.0]).unwrap_err(), Error::DisconnectedGraph);
    }

    #[test]
    fn kruskal_ignores_self_loops() {
        let g = WeightedMultigraph::new(2, &[(0, 0), (0, 1)]).unwrap();
        let t = kruskal_by_weights(&g, &[0.0, 5.0]).unwrap();
        assert_eq!(t.edges, vec![1]);
        assert!(t.is_valid_for(&g));
    }
}
