use crate::error::{Error, Result};
use crate::graph::multigraph::{WeightVector, WeightedMultigraph};

/// Largest instance the brute-force oracle accepts.
pub const BRUTE_FORCE_EDGE_LIMIT: usize = 24;

/// A set of pairwise vertex-disjoint edges, sorted by id.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Matching {
    pub edges: Vec<usize>,
}

impl Matching {
    pub fn new(mut edges: Vec<usize>) -> Self {
        edges.sort_unstable();
        Self { edges }
    }

    pub fn weight(&self, w: &WeightVector) -> f64 {
        w.total(self.edges.iter().copied())
    }

    /// Map from vertex to the matching edge covering it.
    pub fn cover(&self, g: &WeightedMultigraph) -> Vec<Option<usize>> {
        let mut cover = vec![None; g.vertex_count()];
        for &e in &self.edges {
            let edge = g.edge(e);
            cover[edge.u] = Some(e);
            cover[edge.v] = Some(e);
        }
        cover
    }

    pub fn is_valid_for(&self, g: &WeightedMultigraph) -> bool {
        let mut used = vec![false; g.vertex_count()];
        for &e in &self.edges {
            if e >= g.edge_count() {
                return false;
            }
            let edge = g.edge(e);
            if edge.is_self_loop() || used[edge.u] || used[edge.v] {
                return false;
            }
            used[edge.u] = true;
            used[edge.v] = true;
        }
        true
    }
}

/// Maximum weight matching by exhaustive search with a remaining-weight
/// bound. Among optimal matchings the lexicographically smallest edge-id
/// list wins.
pub fn exact_max_weight_matching(g: &WeightedMultigraph, w: &WeightVector) -> Result<Matching> {
    let m = g.edge_count();
    if m > BRUTE_FORCE_EDGE_LIMIT {
        return Err(Error::TooLarge {
            edges: m,
            limit: BRUTE_FORCE_EDGE_LIMIT,
        });
    }
    let mut suffix = vec![0.0; m + 1];
    for e in (0..m).rev() {
        let usable = !g.edge(e).is_self_loop() && w[e] > 0.0;
        suffix[e] = suffix[e + 1] + if usable { w[e] } else { 0.0 };
    }
    let scale = suffix[0].max(1.0);
    let mut search = Search {
        g,
        w,
        suffix: &suffix,
        tol: 1e-12 * scale,
        used: vec![false; g.vertex_count()],
        current: Vec::new(),
        best: Vec::new(),
        best_value: 0.0,
    };
    search.run(0, 0.0);
    Ok(Matching { edges: search.best })
}

struct Search<'a> {
    g: &'a WeightedMultigraph,
    w: &'a WeightVector,
    suffix: &'a [f64],
    tol: f64,
    used: Vec<bool>,
    current: Vec<usize>,
    best: Vec<usize>,
    best_value: f64,
}

impl Search<'_> {
    fn run(&mut self, e: usize, value: f64) {
        if value + self.suffix[e] < self.best_value - self.tol {
            return;
        }
        if e == self.g.edge_count() {
            let better = value > self.best_value + self.tol
                || (value >= self.best_value - self.tol && self.current < self.best);
            if better {
                self.best_value = value;
                self.best = self.current.clone();
            }
            return;
        }
        let edge = self.g.edge(e);
        if !edge.is_self_loop() && self.w[e] > 0.0 && !self.used[edge.u] && !self.used[edge.v] {
            self.used[edge.u] = true;
            self.used[edge.v] = true;
            self.current.push(e);
            self.run(e + 1, value + self.w[e]);
            self.current.pop();
            self.used[edge.u] = false;
            self.used[edge.v] = false;
        }
        self.run(e + 1, value);
    }
}

/// Dense nonnegative weight matrix of a complete bipartite graph, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct BipartiteWeights {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl BipartiteWeights {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::InvalidWeights(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if let Some(x) = data.iter().find(|x| !x.is_finite() || **x < 0.0) {
            return Err(Error::InvalidWeights(format!("entry {x}")));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::InvalidWeights("ragged rows".into()));
        }
        Self::new(rows.len(), cols, rows.concat())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// Copy with cell `(i, j)` shifted by `delta`.
    pub fn perturbed(&self, i: usize, j: usize, delta: f64) -> Result<Self> {
        if i >= self.rows || j >= self.cols {
            return Err(Error::BadParams(format!("cell ({i}, {j}) out of range")));
        }
        let mut data = self.data.clone();
        data[i * self.cols + j] += delta;
        Self::new(self.rows, self.cols, data)
    }

    /// Edge id of cell `(i, j)` in [`Self::to_multigraph`].
    pub fn edge_id(&self, i: usize, j: usize) -> usize {
        i * self.cols + j
    }

    /// Rows are vertices `0..rows`, columns are `rows..rows+cols`.
    pub fn to_multigraph(&self) -> (WeightedMultigraph, WeightVector) {
        let mut endpoints = Vec::with_capacity(self.rows * self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                endpoints.push((i, self.rows + j));
            }
        }
        let g = WeightedMultigraph::new(self.rows + self.cols, &endpoints).expect("valid endpoints");
        let w = WeightVector::new(self.data.clone()).expect("validated on construction");
        (g, w)
    }
}

/// Row-column pairs of a bipartite matching.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct BipartiteMatching {
    pub pairs: Vec<(usize, usize)>,
}

impl BipartiteMatching {
    pub fn weight(&self, w: &BipartiteWeights) -> f64 {
        self.pairs.iter().map(|&(i, j)| w.get(i, j)).sum()
    }

    pub fn is_valid(&self, rows: usize, cols: usize) -> bool {
        let mut r = vec![false; rows];
        let mut c = vec![false; cols];
        self.pairs.iter().all(|&(i, j)| {
            i < rows && j < cols && !std::mem::replace(&mut r[i], true) && !std::mem::replace(&mut c[j], true)
        })
    }
}

/// Exact maximum weight bipartite matching by the shortest augmenting path
/// Hungarian method on the zero-padded square matrix. Returns the matching
/// (zero-weight pairs dropped) and its value.
pub fn hungarian_bipartite(w: &BipartiteWeights) -> (BipartiteMatching, f64) {
    let n = w.rows().max(w.cols());
    if n == 0 {
        return (BipartiteMatching::default(), 0.0);
    }
    let cost = |i: usize, j: usize| -> f64 {
        if i < w.rows() && j < w.cols() {
            -w.get(i, j)
        } else {
            0.0
        }
    };
    // 1-indexed potentials; column 0 is the virtual start.
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut row_of = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        row_of[0] = i;
        let mut j0 = 0;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = row_of[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[row_of[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if row_of[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            row_of[j0] = row_of[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut pairs = Vec::new();
    for j in 1..=n {
        let i = row_of[j];
        if i >= 1 && i - 1 < w.rows() && j - 1 < w.cols() && w.get(i - 1, j - 1) > 0.0 {
            pairs.push((i - 1, j - 1));
        }
    }
    pairs.sort_unstable();
    let m = BipartiteMatching { pairs };
    let value = m.weight(w);
    (m, value)
}
