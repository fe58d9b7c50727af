//! Entropy-regularised bipartite matching LP.
//!
//! Maximise `Σ w_ij x_ij - B Σ x_ij ln x_ij` subject to row and column sums
//! at most one. The optimum has the form
//! `x_ij = exp((w_ij - λ_i - μ_j)/B - 1)` with `λ, μ ≥ 0`; the solver does
//! exact block minimisation of the dual, alternating between all `λ_i` and
//! all `μ_j` in log space, then switches to projected Newton steps on the
//! same dual. Plain block sweeps crawl at small `B`.

use crate::error::{Error, Result};
use crate::graph::BipartiteWeights;

/// Default stopping tolerance for constraint violation and slackness.
pub const DEFAULT_TOL: f64 = 1e-9;
/// Sweep cap.
pub const MAX_SWEEPS: usize = 100_000;
const NEWTON_AFTER: usize = 32;

/// Converged solution with duals and diagnostics.
#[derive(Clone, Debug, PartialEq)]
pub struct EntMatchingLP {
    pub rows: usize,
    pub cols: usize,
    /// Row-major primal solution.
    pub x: Vec<f64>,
    pub lambda: Vec<f64>,
    pub mu: Vec<f64>,
    pub b_reg: f64,
    pub sweeps: usize,
    /// Largest excess of a row or column sum over one.
    pub max_violation: f64,
    /// Largest `|w - B(ln x + 1) - λ - μ|` over the entries.
    pub stationarity: f64,
    /// Largest `λ_i |1 - row_i|` or `μ_j |1 - col_j|`.
    pub slackness: f64,
}

impl EntMatchingLP {
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.x[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.x[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.rows).map(|i| self.row(i).iter().sum()).collect()
    }

    pub fn col_sums(&self) -> Vec<f64> {
        (0..self.cols)
            .map(|j| (0..self.rows).map(|i| self.get(i, j)).sum())
            .collect()
    }

    /// `Σ w x`.
    pub fn fractional_value(&self, w: &BipartiteWeights) -> f64 {
        self.x.iter().zip(w.as_slice()).map(|(x, w)| x * w).sum()
    }

    /// Regularised objective.
    pub fn objective(&self, w: &BipartiteWeights) -> f64 {
        self.fractional_value(w) - self.b_reg * self.x.iter().map(|&x| entropy_term(x)).sum::<f64>()
    }

    /// `x`, `λ` and `μ` as text: a header line, the matrix, then the duals.
    pub fn to_text(&self) -> String {
        let mut out = format!("# B={:e} sweeps={} {}x{}\n", self.b_reg, self.sweeps, self.rows, self.cols);
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|x| format!("{x:.12e}")).collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
        let join = |v: &[f64]| v.iter().map(|x| format!("{x:.12e}")).collect::<Vec<_>>().join(" ");
        out.push_str(&format!("lambda {}\nmu {}\n", join(&self.lambda), join(&self.mu)));
        out
    }
}

fn entropy_term(x: f64) -> f64 {
    if x > 0.0 {
        x * x.ln()
    } else {
        0.0
    }
}

fn log_sum_exp(values: impl Iterator<Item = f64> + Clone) -> f64 {
    let m = values.clone().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + values.map(|v| (v - m).exp()).sum::<f64>().ln()
}

/// Dual function value, minimised by the solver.
pub fn dual_value(w: &BipartiteWeights, b_reg: f64, lambda: &[f64], mu: &[f64]) -> f64 {
    let mut total: f64 = lambda.iter().sum::<f64>() + mu.iter().sum::<f64>();
    for i in 0..w.rows() {
        for j in 0..w.cols() {
            total += b_reg * ((w.get(i, j) - lambda[i] - mu[j]) / b_reg - 1.0).exp();
        }
    }
    total
}

struct Solver<'a> {
    w: &'a BipartiteWeights,
    b: f64,
    lambda: Vec<f64>,
    mu: Vec<f64>,
}

impl Solver<'_> {
    fn exponent(&self, i: usize, j: usize) -> f64 {
        (self.w.get(i, j) - self.lambda[i] - self.mu[j]) / self.b - 1.0
    }

    fn sweep(&mut self) {
        let (r, c, b) = (self.w.rows(), self.w.cols(), self.b);
        for i in 0..r {
            let s = log_sum_exp((0..c).map(|j| (self.w.get(i, j) - self.mu[j]) / b - 1.0));
            self.lambda[i] = (b * s).max(0.0);
        }
        for j in 0..c {
            let s = log_sum_exp((0..r).map(|i| (self.w.get(i, j) - self.lambda[i]) / b - 1.0));
            self.mu[j] = (b * s).max(0.0);
        }
    }

    fn dual(&self) -> f64 {
        dual_value(self.w, self.b, &self.lambda, &self.mu)
    }

    /// One projected Newton step on the dual over the variables not pinned
    /// at zero, with an Armijo backtracking search. Returns false and leaves
    /// the duals alone when no decrease is found.
    fn newton_step(&mut self) -> bool {
        let (r, c, b) = (self.w.rows(), self.w.cols(), self.b);
        let n = r + c;
        let mut x = vec![0.0; r * c];
        let mut sums = vec![0.0; n];
        for i in 0..r {
            for j in 0..c {
                let v = self.exponent(i, j).exp();
                x[i * c + j] = v;
                sums[i] += v;
                sums[r + j] += v;
            }
        }
        let z: Vec<f64> = self.lambda.iter().chain(&self.mu).copied().collect();
        let grad: Vec<f64> = sums.iter().map(|s| 1.0 - s).collect();
        let free: Vec<usize> = (0..n).filter(|&v| z[v] > 0.0 || grad[v] < 0.0).collect();
        if free.is_empty() {
            return false;
        }
        let k = free.len();
        let mut h = vec![0.0; k * k];
        for (a, &u) in free.iter().enumerate() {
            for (bb, &v) in free.iter().enumerate() {
                h[a * k + bb] = if u == v {
                    sums[u] / b
                } else if u < r && v >= r {
                    x[u * c + (v - r)] / b
                } else if v < r && u >= r {
                    x[v * c + (u - r)] / b
                } else {
                    0.0
                };
            }
        }
        let damp = 1e-9 * (0..k).map(|a| h[a * k + a]).fold(0.0, f64::max) + 1e-300;
        for a in 0..k {
            h[a * k + a] += damp;
        }
        let rhs: Vec<f64> = free.iter().map(|&v| -grad[v]).collect();
        let Some(d) = solve_dense(h, rhs, k) else {
            return false;
        };
        let before = self.dual();
        let mut t = 1.0;
        for _ in 0..50 {
            let mut cand = z.clone();
            for (a, &v) in free.iter().enumerate() {
                cand[v] = (z[v] + t * d[a]).max(0.0);
            }
            let decrease: f64 = (0..n).map(|v| grad[v] * (cand[v] - z[v])).sum();
            let trial = dual_value(self.w, b, &cand[..r], &cand[r..]);
            let armijo = trial <= before + 1e-4 * decrease && trial < before;
            // below rounding level of the dual, judge by the KKT residual
            let flat = (trial - before).abs() <= 1e-14 * before.abs().max(1.0)
                && kkt_residual(self.w, b, &cand[..r], &cand[r..]) < kkt_residual(self.w, b, &self.lambda, &self.mu);
            if armijo || flat {
                self.lambda.copy_from_slice(&cand[..r]);
                self.mu.copy_from_slice(&cand[r..]);
                return true;
            }
            t *= 0.5;
        }
        false
    }

    /// (primal, violation, slackness)
    fn measure(&self) -> (Vec<f64>, f64, f64) {
        let (r, c) = (self.w.rows(), self.w.cols());
        let mut x = vec![0.0; r * c];
        let mut rows = vec![0.0; r];
        let mut cols = vec![0.0; c];
        for i in 0..r {
            for j in 0..c {
                let v = self.exponent(i, j).exp();
                x[i * c + j] = v;
                rows[i] += v;
                cols[j] += v;
            }
        }
        let mut violation: f64 = 0.0;
        let mut slack: f64 = 0.0;
        for (s, d) in rows.iter().zip(&self.lambda).chain(cols.iter().zip(&self.mu)) {
            violation = violation.max(s - 1.0);
            slack = slack.max(d * (1.0 - s).abs());
        }
        (x, violation.max(0.0), slack)
    }
}

/// Solve with tolerance `tol` on violation and slackness.
pub fn solve_lp_ent(w: &BipartiteWeights, b_reg: f64, tol: f64) -> Result<EntMatchingLP> {
    solve_lp_ent_traced(w, b_reg, tol, None)
}

/// [`solve_lp_ent`], optionally recording the dual value after every
/// iteration.
pub fn solve_lp_ent_traced(
    w: &BipartiteWeights,
    b_reg: f64,
    tol: f64,
    mut dual_history: Option<&mut Vec<f64>>,
) -> Result<EntMatchingLP> {
    if !(b_reg > 0.0 && b_reg.is_finite()) {
        return Err(Error::BadParams(format!("regularisation must be positive, got {b_reg}")));
    }
    let mut solver = Solver {
        w,
        b: b_reg,
        lambda: vec![0.0; w.rows()],
        mu: vec![0.0; w.cols()],
    };
    let mut last = (f64::INFINITY, f64::INFINITY);
    for sweep in 1..=MAX_SWEEPS {
        // coordinate sweeps find the active set; Newton finishes quickly
        if sweep <= NEWTON_AFTER || !solver.newton_step() {
            solver.sweep();
        }
        if let Some(h) = dual_history.as_deref_mut() {
            h.push(dual_value(w, b_reg, &solver.lambda, &solver.mu));
        }
        // measuring costs as much as a sweep; do it sparsely once warm
        if sweep < 64 || sweep % 8 == 0 || sweep == MAX_SWEEPS {
            let (x, violation, slackness) = solver.measure();
            last = (violation, slackness);
            if violation < tol && slackness < tol {
                return Ok(finish(solver, x, violation, slackness, sweep));
            }
        }
    }
    Err(Error::NoConvergence {
        iterations: MAX_SWEEPS,
        violation: last.0,
        slackness: last.1,
    })
}

/// Largest projected gradient entry of the dual.
fn kkt_residual(w: &BipartiteWeights, b_reg: f64, lambda: &[f64], mu: &[f64]) -> f64 {
    let (r, c) = (w.rows(), w.cols());
    let mut sums = vec![0.0; r + c];
    for i in 0..r {
        for j in 0..c {
            let v = ((w.get(i, j) - lambda[i] - mu[j]) / b_reg - 1.0).exp();
            sums[i] += v;
            sums[r + j] += v;
        }
    }
    lambda
        .iter()
        .chain(mu)
        .zip(&sums)
        .map(|(&z, &s)| if z > 0.0 { (1.0 - s).abs() } else { (s - 1.0).max(0.0) })
        .fold(0.0, f64::max)
}

/// Gaussian elimination with partial pivoting on a dense `n × n` system.
fn solve_dense(mut a: Vec<f64>, mut rhs: Vec<f64>, n: usize) -> Option<Vec<f64>> {
    for col in 0..n {
        let piv = (col..n).max_by(|&p, &q| a[p * n + col].abs().total_cmp(&a[q * n + col].abs()))?;
        if a[piv * n + col] == 0.0 {
            return None;
        }
        if piv != col {
            for k in 0..n {
                a.swap(piv * n + k, col * n + k);
            }
            rhs.swap(piv, col);
        }
        for row in col + 1..n {
            let f = a[row * n + col] / a[col * n + col];
            if f != 0.0 {
                for k in col..n {
                    a[row * n + k] -= f * a[col * n + k];
                }
                rhs[row] -= f * rhs[col];
            }
        }
    }
    let mut out = vec![0.0; n];
    for row in (0..n).rev() {
        let tail: f64 = (row + 1..n).map(|k| a[row * n + k] * out[k]).sum();
        out[row] = (rhs[row] - tail) / a[row * n + row];
    }
    out.iter().all(|v| v.is_finite()).then_some(out)
}

fn finish(solver: Solver<'_>, x: Vec<f64>, violation: f64, slackness: f64, sweeps: usize) -> EntMatchingLP {
    let (r, c, b) = (solver.w.rows(), solver.w.cols(), solver.b);
    let mut stationarity: f64 = 0.0;
    for i in 0..r {
        for j in 0..c {
            let v = x[i * c + j];
            let g = solver.w.get(i, j) - b * (v.ln() + 1.0) - solver.lambda[i] - solver.mu[j];
            stationarity = stationarity.max(g.abs());
        }
    }
    EntMatchingLP {
        rows: r,
        cols: c,
        x,
        lambda: solver.lambda,
        mu: solver.mu,
        b_reg: b,
        sweeps,
        max_violation: violation,
        stationarity,
        slackness,
    }
}
