//! Parameter-grid experiments producing deterministic CSV.

use std::fmt;
use std::str::FromStr;

use crate::bmatch::plip_mwbm;
use crate::error::{Error, Result};
use crate::graph::{bfs_dist, dijkstra, exact_max_weight_matching, kruskal_mst, walk_weight, WeightVector, WeightedMultigraph};
use crate::harness::estimate::{
    estimate_contraction_sensitivity, estimate_lipschitz, Algorithm, LipschitzEstimate, Metric,
};
use crate::harness::gen::{gen_instance, Instance, InstanceKind};
use crate::harness::stats::Summary;
use crate::lipsp::lip_sp;
use crate::mst::{lip_mst, plip_mst};
use crate::mwm::lip_mwm;
use crate::par::map_trials;
use crate::rng::{lane, Stream};
use crate::sp::{length_bound, sp, validate_walk};

/// First line of every CSV this module writes.
pub const CSV_SCHEMA: &str = "# lipgraph-experiment v1";

/// Slack for per-sample floating point comparisons.
const REL_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AlgorithmId {
    Mst,
    PlipMst,
    SpUnweighted,
    Sp,
    Mwm,
    Bmatch,
}

impl fmt::Display for AlgorithmId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AlgorithmId::Mst => "mst",
            AlgorithmId::PlipMst => "plip-mst",
            AlgorithmId::SpUnweighted => "sp-unweighted",
            AlgorithmId::Sp => "sp",
            AlgorithmId::Mwm => "mwm",
            AlgorithmId::Bmatch => "bmatch",
        })
    }
}

impl FromStr for AlgorithmId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "mst" => AlgorithmId::Mst,
            "plip-mst" => AlgorithmId::PlipMst,
            "sp-unweighted" => AlgorithmId::SpUnweighted,
            "sp" => AlgorithmId::Sp,
            "mwm" => AlgorithmId::Mwm,
            "bmatch" => AlgorithmId::Bmatch,
            _ => return Err(Error::BadParams(format!("unknown algorithm {s:?}"))),
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum InstanceSource {
    Generated { kind: InstanceKind, seed: u64 },
    Given { label: String, instance: Instance },
}

impl InstanceSource {
    fn label(&self) -> String {
        match self {
            InstanceSource::Generated { kind, seed } => format!("{kind}@{seed}"),
            InstanceSource::Given { label, .. } => label.clone(),
        }
    }

    fn load(&self) -> Result<Instance> {
        match self {
            InstanceSource::Generated { kind, seed } => gen_instance(kind, *seed),
            InstanceSource::Given { instance, .. } => Ok(instance.clone()),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub algorithm: AlgorithmId,
    pub instance: InstanceSource,
    /// Approximation parameter grid. For `mwm` each value gives `α = 2 + ε`
    /// unless `alphas` is set.
    pub epsilons: Vec<f64>,
    /// Explicit `α` grid for `mwm`.
    pub alphas: Vec<f64>,
    /// Perturbation sizes; each adds a Lipschitz estimate on `perturb`.
    pub deltas: Vec<f64>,
    /// Perturbed edge (for `bmatch`, the cell `i·cols + j`).
    pub perturb: Option<usize>,
    /// Contracted edge for `sp-unweighted` sensitivity estimates.
    pub contract: Option<usize>,
    pub gamma_override: Option<f64>,
    /// Overrides of the instance's own endpoints.
    pub source: Option<usize>,
    pub target: Option<usize>,
    pub trials: usize,
    pub seed: u64,
}

impl ExperimentConfig {
    pub fn new(algorithm: AlgorithmId, instance: InstanceSource) -> Self {
        Self {
            algorithm,
            instance,
            epsilons: Vec::new(),
            alphas: Vec::new(),
            deltas: Vec::new(),
            perturb: None,
            contract: None,
            gamma_override: None,
            source: None,
            target: None,
            trials: 100,
            seed: 0,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::BadParams("trials must be at least 1".into()));
        }
        if let Some(d) = self.deltas.iter().find(|d| !(**d > 0.0 && d.is_finite())) {
            return Err(Error::BadParams(format!("delta must be positive, got {d}")));
        }
        if !self.deltas.is_empty() && self.perturb.is_none() {
            return Err(Error::BadParams("a delta grid needs a perturbed edge".into()));
        }
        Ok(())
    }
}

/// One grid point.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentRow {
    pub algorithm: AlgorithmId,
    pub instance: String,
    pub epsilon: Option<f64>,
    pub alpha: Option<f64>,
    pub delta: Option<f64>,
    pub trials: usize,
    pub opt: f64,
    /// Output value (weight, or hop length) per sample.
    pub value: Summary,
    /// Value over optimum per sample.
    pub ratio: Summary,
    pub lipschitz: Option<LipschitzEstimate>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ExperimentReport {
    pub rows: Vec<ExperimentRow>,
    /// Invariant violations, empty on a clean run.
    pub violations: Vec<String>,
}

const HEADER: [&str; 20] = [
    "algorithm",
    "instance",
    "epsilon",
    "alpha",
    "delta",
    "trials",
    "opt",
    "value_mean",
    "value_stderr",
    "ratio_mean",
    "ratio_stderr",
    "ratio_min",
    "ratio_max",
    "lip_coupled",
    "lip_coupled_stderr",
    "lip_emd",
    "lip_emd_stderr",
    "lip_coupled_ratio",
    "lip_ratio",
    "support",
];

fn opt_cell(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

impl ExperimentReport {
    /// Schema line, header and one record per row. Depends only on the
    /// configuration, so repeated runs are byte-identical.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| Error::BadParams(format!("csv: {e}"));
        w.write_record(HEADER).map_err(io)?;
        for r in &self.rows {
            let l = r.lipschitz.as_ref();
            let rec = [
                r.algorithm.to_string(),
                r.instance.clone(),
                opt_cell(r.epsilon),
                opt_cell(r.alpha),
                opt_cell(r.delta),
                r.trials.to_string(),
                r.opt.to_string(),
                r.value.mean.to_string(),
                r.value.stderr.to_string(),
                r.ratio.mean.to_string(),
                r.ratio.stderr.to_string(),
                r.ratio.min.to_string(),
                r.ratio.max.to_string(),
                opt_cell(l.map(|l| l.coupled)),
                opt_cell(l.map(|l| l.coupled_stderr)),
                opt_cell(l.map(|l| l.emd)),
                opt_cell(l.map(|l| l.emd_stderr)),
                opt_cell(l.map(|l| l.coupled_ratio)),
                opt_cell(l.map(|l| l.ratio)),
                l.map(|l| format!("{}/{}", l.support_base, l.support_perturbed)).unwrap_or_default(),
            ];
            w.write_record(&rec).map_err(io)?;
        }
        let body = w.into_inner().map_err(|e| Error::BadParams(format!("csv: {e}")))?;
        Ok(format!("{CSV_SCHEMA}\n{}", String::from_utf8(body).expect("utf-8 records")))
    }
}

struct GraphCase<'a> {
    g: &'a WeightedMultigraph,
    w: &'a WeightVector,
    s: usize,
    t: usize,
}

/// One sample: (value, ratio, violation).
type Sample = (f64, f64, Option<String>);

fn ratio_of(value: f64, opt: f64) -> f64 {
    if opt > 0.0 {
        value / opt
    } else if value == 0.0 {
        1.0
    } else {
        f64::INFINITY
    }
}

fn graph_sample(id: AlgorithmId, c: &GraphCase<'_>, param: f64, opt: f64, gamma_override: Option<f64>, rng: Stream) -> Result<Sample> {
    let within = |value: f64, bound: f64, what: &str| {
        (value > bound * (1.0 + REL_TOL) + REL_TOL).then(|| format!("{what} {value} exceeds bound {bound}"))
    };
    Ok(match id {
        AlgorithmId::Mst | AlgorithmId::PlipMst => {
            let tree = if id == AlgorithmId::Mst {
                lip_mst(c.g, c.w, param, rng)?.tree
            } else {
                plip_mst(c.g, c.w, param, rng)?.tree
            };
            let v = tree.weight(c.w);
            let bad = if tree.is_valid_for(c.g) {
                within(v, (1.0 + param) * opt, "tree weight")
            } else {
                Some("output is not a spanning tree".into())
            };
            (v, ratio_of(v, opt), bad)
        }
        AlgorithmId::Sp => {
            let walk = lip_sp(c.g, c.w, c.s, c.t, param, rng)?.walk;
            let v = walk_weight(c.w, &walk);
            let bad = match validate_walk(c.g, &walk) {
                Err(e) => Some(e.to_string()),
                Ok(()) if walk.source != c.s || walk.target != c.t => Some("walk has wrong endpoints".into()),
                Ok(()) => within(v, (1.0 + param) * opt, "walk weight"),
            };
            (v, ratio_of(v, opt), bad)
        }
        AlgorithmId::SpUnweighted => {
            let out = sp(c.g, c.s, c.t, param, rng, gamma_override)?;
            let v = out.walk.len() as f64;
            let bound = length_bound(opt as usize, out.gamma);
            let bad = match validate_walk(c.g, &out.walk) {
                Err(e) => Some(e.to_string()),
                Ok(()) if out.walk.source != c.s || out.walk.target != c.t => Some("walk has wrong endpoints".into()),
                Ok(()) => within(v, bound, "walk length"),
            };
            (v, ratio_of(v, opt), bad)
        }
        AlgorithmId::Mwm => {
            let m = lip_mwm(c.g, c.w, param, rng)?.matching;
            let v = m.weight(c.w);
            let bad = (!m.is_valid_for(c.g)).then(|| "output is not a matching".to_string());
            (v, ratio_of(v, opt), bad)
        }
        AlgorithmId::Bmatch => unreachable!("bipartite instances are handled separately"),
    })
}

fn check_mean(report: &mut ExperimentReport, label: &str, ratio: &Summary, floor: f64) {
    if ratio.mean < floor - 3.0 * ratio.stderr {
        report.violations.push(format!(
            "{label}: mean ratio {} below {floor} - 3 stderr ({})",
            ratio.mean, ratio.stderr
        ));
    }
}

fn trial(seed: u64, k: usize) -> Stream {
    Stream::new(seed).derive(lane::TRIAL).derive(k as u64)
}

/// Run every grid point. Invariant violations are collected in the report
/// rather than returned as errors.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    let instance = cfg.instance.load()?;
    let label = cfg.instance.label();
    let mut report = ExperimentReport::default();
    // (epsilon, alpha, algorithm parameter)
    let grid: Vec<(Option<f64>, Option<f64>, f64)> = match cfg.algorithm {
        AlgorithmId::Mwm if !cfg.alphas.is_empty() => cfg.alphas.iter().map(|&a| (None, Some(a), a)).collect(),
        AlgorithmId::Mwm => cfg.epsilons.iter().map(|&e| (Some(e), Some(2.0 + e), 2.0 + e)).collect(),
        _ => cfg.epsilons.iter().map(|&e| (Some(e), None, e)).collect(),
    };
    let deltas: Vec<Option<f64>> = if cfg.deltas.is_empty() {
        vec![None]
    } else {
        cfg.deltas.iter().copied().map(Some).collect()
    };

    match (&instance, cfg.algorithm) {
        (Instance::Bipartite(w), AlgorithmId::Bmatch) => {
            let (g, wv) = w.to_multigraph();
            let opt = crate::graph::hungarian_bipartite(w).1;
            for &(eps, alpha, param) in &grid {
                let samples: Result<Vec<f64>> = map_trials(cfg.trials, |k| Ok(plip_mwbm(w, param, trial(cfg.seed, k))?.matching.weight(w)))
                    .into_iter()
                    .collect();
                let values = samples?;
                let ratios: Vec<f64> = values.iter().map(|&v| ratio_of(v, opt)).collect();
                let (value, ratio) = (Summary::of(&values), Summary::of(&ratios));
                if opt > 0.0 {
                    check_mean(&mut report, &format!("bmatch eps={param}"), &ratio, 0.5 - param);
                }
                for &delta in &deltas {
                    let lipschitz = match (delta, cfg.perturb) {
                        (Some(d), Some(f)) => {
                            let alg = Algorithm::PlipMwbm {
                                epsilon: param,
                                rows: w.rows(),
                                cols: w.cols(),
                            };
                            Some(estimate_lipschitz(alg, &g, &wv, f, d, cfg.trials, cfg.seed, Metric::Weighted)?)
                        }
                        _ => None,
                    };
                    report.rows.push(ExperimentRow {
                        algorithm: cfg.algorithm,
                        instance: label.clone(),
                        epsilon: eps,
                        alpha,
                        delta,
                        trials: cfg.trials,
                        opt,
                        value,
                        ratio,
                        lipschitz,
                    });
                }
            }
        }
        (
            Instance::Graph {
                graph,
                weights,
                source,
                target,
            },
            id,
        ) if id != AlgorithmId::Bmatch => {
            let case = GraphCase {
                g: graph,
                w: weights,
                s: cfg.source.unwrap_or(*source),
                t: cfg.target.unwrap_or(*target),
            };
            graph.check_vertex(case.s)?;
            graph.check_vertex(case.t)?;
            let opt = match id {
                AlgorithmId::Mst | AlgorithmId::PlipMst => kruskal_mst(graph, weights)?.weight(weights),
                AlgorithmId::Sp => dijkstra(graph, weights, case.s).dist[case.t],
                AlgorithmId::SpUnweighted => bfs_dist(graph, case.s)[case.t].map_or(f64::INFINITY, |d| d as f64),
                AlgorithmId::Mwm => exact_max_weight_matching(graph, weights)?.weight(weights),
                AlgorithmId::Bmatch => unreachable!(),
            };
            if !opt.is_finite() {
                return Err(Error::Unreachable {
                    from: case.s,
                    to: case.t,
                });
            }
            for &(eps, alpha, param) in &grid {
                let samples: Result<Vec<Sample>> = map_trials(cfg.trials, |k| graph_sample(id, &case, param, opt, cfg.gamma_override, trial(cfg.seed, k)))
                    .into_iter()
                    .collect();
                let samples = samples?;
                let tag = format!("{id} param={param}");
                let mut bad = samples.iter().filter_map(|s| s.2.as_ref());
                if let Some(first) = bad.next() {
                    let more = bad.count();
                    report.violations.push(format!("{tag}: {first} ({} violating samples)", more + 1));
                }
                let values: Vec<f64> = samples.iter().map(|s| s.0).collect();
                let ratios: Vec<f64> = samples.iter().map(|s| s.1).collect();
                let (value, ratio) = (Summary::of(&values), Summary::of(&ratios));
                if id == AlgorithmId::Mwm && opt > 0.0 {
                    check_mean(&mut report, &tag, &ratio, 1.0 / (4.0 * param));
                }
                for &delta in &deltas {
                    let lipschitz = match id {
                        AlgorithmId::SpUnweighted => match cfg.contract {
                            Some(e) => Some(estimate_contraction_sensitivity(
                                graph,
                                case.s,
                                case.t,
                                param,
                                e,
                                cfg.gamma_override,
                                cfg.trials,
                                cfg.seed,
                            )?),
                            None => None,
                        },
                        _ => match (delta, cfg.perturb) {
                            (Some(d), Some(f)) => {
                                let alg = match id {
                                    AlgorithmId::Mst => Algorithm::LipMst { epsilon: param },
                                    AlgorithmId::PlipMst => Algorithm::PlipMst { epsilon: param },
                                    AlgorithmId::Sp => Algorithm::LipSp {
                                        epsilon: param,
                                        source: case.s,
                                        target: case.t,
                                    },
                                    _ => Algorithm::LipMwm { alpha: param },
                                };
                                Some(estimate_lipschitz(alg, graph, weights, f, d, cfg.trials, cfg.seed, Metric::Weighted)?)
                            }
                            _ => None,
                        },
                    };
                    if let Some(l) = &lipschitz {
                        if !l.is_consistent(3.0) {
                            report.violations.push(format!(
                                "{tag}: coupled estimate {} below EMD estimate {} beyond 3 standard errors",
                                l.coupled, l.emd
                            ));
                        }
                    }
                    report.rows.push(ExperimentRow {
                        algorithm: id,
                        instance: label.clone(),
                        epsilon: eps,
                        alpha,
                        delta,
                        trials: cfg.trials,
                        opt,
                        value,
                        ratio,
                        lipschitz,
                    });
                }
            }
        }
        (_, id) => {
            return Err(Error::BadParams(format!("algorithm {id} does not accept this instance type")));
        }
    }
    Ok(report)
}
