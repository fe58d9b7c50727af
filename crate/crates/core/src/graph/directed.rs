use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Arc {
    pub id: usize,
    pub tail: usize,
    pub head: usize,
}

/// Arc ids grouped by vertex, in ascending id order within each group.
#[derive(Clone, Debug, PartialEq)]
struct Adjacency {
    start: Vec<usize>,
    ids: Vec<usize>,
}

impl Adjacency {
    fn build(n: usize, arcs: &[Arc], key: impl Fn(&Arc) -> usize) -> Self {
        let mut start = vec![0; n + 1];
        for a in arcs {
            start[key(a) + 1] += 1;
        }
        for v in 0..n {
            start[v + 1] += start[v];
        }
        let mut fill = start.clone();
        let mut ids = vec![0; arcs.len()];
        for a in arcs {
            let v = key(a);
            ids[fill[v]] = a.id;
            fill[v] += 1;
        }
        Self { start, ids }
    }

    fn of(&self, v: usize) -> &[usize] {
        &self.ids[self.start[v]..self.start[v + 1]]
    }
}

/// Unweighted directed graph with in/out adjacency by arc id.
#[derive(Clone, Debug, PartialEq)]
pub struct DirectedGraph {
    n: usize,
    arcs: Vec<Arc>,
    out_adj: Adjacency,
    in_adj: Adjacency,
}

impl DirectedGraph {
    pub fn new(n: usize, arcs: &[(usize, usize)]) -> Result<Self> {
        let mut list = Vec::with_capacity(arcs.len());
        for (id, &(tail, head)) in arcs.iter().enumerate() {
            if tail >= n {
                return Err(Error::InvalidVertex(tail));
            }
            if head >= n {
                return Err(Error::InvalidVertex(head));
            }
            list.push(Arc { id, tail, head });
        }
        Ok(Self {
            n,
            out_adj: Adjacency::build(n, &list, |a| a.tail),
            in_adj: Adjacency::build(n, &list, |a| a.head),
            arcs: list,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn arc_count(&self) -> usize {
        self.arcs.len()
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn arc(&self, id: usize) -> Arc {
        self.arcs[id]
    }

    pub fn out_arcs(&self, v: usize) -> &[usize] {
        self.out_adj.of(v)
    }

    pub fn in_arcs(&self, v: usize) -> &[usize] {
        self.in_adj.of(v)
    }

    pub fn out_degree(&self, v: usize) -> usize {
        self.out_adj.of(v).len()
    }

    pub fn in_degree(&self, v: usize) -> usize {
        self.in_adj.of(v).len()
    }

    /// An arc `(u, v)` is contractible when both endpoints have in- and
    /// out-degree exactly one.
    pub fn is_contractible(&self, a: usize) -> bool {
        let Some(arc) = self.arcs.get(a) else {
            return false;
        };
        if arc.tail == arc.head {
            return false;
        }
        [arc.tail, arc.head]
            .iter()
            .all(|&x| self.in_degree(x) == 1 && self.out_degree(x) == 1)
    }

    /// Reachability matrix by repeated DFS; intended for small graphs.
    pub fn reachability(&self) -> Vec<Vec<bool>> {
        (0..self.n)
            .map(|s| {
                let mut seen = vec![false; self.n];
                seen[s] = true;
                let mut stack = vec![s];
                while let Some(x) = stack.pop() {
                    for &a in self.out_adj.of(x) {
                        let h = self.arcs[a].head;
                        if !seen[h] {
                            seen[h] = true;
                            stack.push(h);
                        }
                    }
                }
                seen
            })
            .collect()
    }
}

/// Result of contracting a contractible arc.
#[derive(Clone, Debug, PartialEq)]
pub struct DirectedContraction {
    pub graph: DirectedGraph,
    /// Old vertex to new vertex; both endpoints of the arc map to `merged`.
    pub vertex_map: Vec<usize>,
    /// Old arc id to new arc id; the contracted arc maps to `None`.
    pub arc_map: Vec<Option<usize>>,
    pub merged: usize,
}

/// Contract arc `a`. Surviving vertices keep their relative order and the
/// merged vertex is appended last; surviving arcs keep their relative order.
pub fn contract_directed(g: &DirectedGraph, a: usize) -> Result<DirectedContraction> {
    if !g.is_contractible(a) {
        return Err(Error::NotContractible(a));
    }
    let arc = g.arc(a);
    let n = g.vertex_count();
    let merged = n - 2;
    let mut vertex_map = vec![0; n];
    let mut next = 0;
    for (v, slot) in vertex_map.iter_mut().enumerate() {
        if v == arc.tail || v == arc.head {
            *slot = merged;
        } else {
            *slot = next;
            next += 1;
        }
    }
    let mut arc_map = vec![None; g.arc_count()];
    let mut arcs = Vec::with_capacity(g.arc_count() - 1);
    for x in g.arcs() {
        if x.id == a {
            continue;
        }
        arc_map[x.id] = Some(arcs.len());
        arcs.push((vertex_map[x.tail], vertex_map[x.head]));
    }
    Ok(DirectedContraction {
        graph: DirectedGraph::new(n - 1, &arcs)?,
        vertex_map,
        arc_map,
        merged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dipath(k: usize) -> DirectedGraph {
        let arcs: Vec<_> = (0..k).map(|i| (i, i + 1)).collect();
        DirectedGraph::new(k + 1, &arcs).unwrap()
    }

    #[test]
    fn degree_tables_match_arcs() {
        let g = DirectedGraph::new(3, &[(0, 1), (0, 2), (2, 1)]).unwrap();
        assert_eq!(g.out_degree(0), 2);
        assert_eq!(g.in_degree(1), 2);
        let total_out: usize = (0..3).map(|v| g.out_degree(v)).sum();
        assert_eq!(total_out, g.arc_count());
    }

    #[test]
    fn contract_middle_of_path() {
        let g = dipath(3);
        let c = contract_directed(&g, 1).unwrap();
        assert_eq!(c.graph.vertex_count(), 3);
        assert_eq!(c.graph.arc_count(), 2);
        // 0 -> merged -> 1 (old 3)
        let r = c.graph.reachability();
        assert!(r[c.vertex_map[0]][c.vertex_map[3]]);
        assert!(!r[c.vertex_map[3]][c.vertex_map[0]]);
    }

    #[test]
    fn branching_tail_is_not_contractible() {
        let g = DirectedGraph::new(4, &[(3, 0), (0, 1), (0, 2), (1, 3)]).unwrap();
        assert_eq!(contract_directed(&g, 1).unwrap_err(), Error::NotContractible(1));
        // end arcs of a path: the source has in-degree 0
        assert!(contract_directed(&dipath(3), 0).is_err());
    }
}
