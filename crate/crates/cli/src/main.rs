//! `lipgraph` command line: run the randomized algorithms over parameter
//! grids and report approximation and Lipschitz statistics as CSV.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use lipgraph::bmatch::solve_lp_ent;
use lipgraph::graph::io::{parse_bipartite, parse_edge_list, write_bipartite, write_edge_list};
use lipgraph::harness::experiment::InstanceSource;
use lipgraph::harness::{gen_instance, run_experiment, AlgorithmId, ExperimentConfig, Instance, InstanceKind};
use lipgraph::lipsp::build_gadget;
use lipgraph::rng::Stream;
use lipgraph::Error;

#[derive(Parser, Debug)]
#[command(name = "lipgraph", version, about = "Lipschitz-continuous randomized graph algorithms")]
struct Cli {
    /// Base seed for every random draw.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Monte Carlo trials per grid point.
    #[arg(long, global = true, default_value_t = 100)]
    trials: usize,
    /// Write the CSV here instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    csv: Option<PathBuf>,
    /// Exit with status 1 if any invariant is violated.
    #[arg(long, global = true)]
    check: bool,
    /// No summary on stderr.
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Source {
    /// Instance file (edge list, or bipartite matrix for `bmatch`).
    #[arg(long, value_name = "PATH", conflicts_with = "generate")]
    input: Option<PathBuf>,
    /// Generated instance, e.g. `random-gnm:8,14` or `gadget-thm6:0.02`.
    #[arg(long, value_name = "KIND")]
    generate: Option<String>,
    /// Seed of the instance generator.
    #[arg(long, default_value_t = 0)]
    instance_seed: u64,
}

#[derive(Args, Debug)]
struct Perturbation {
    /// Edge whose weight is raised.
    #[arg(long, value_name = "EDGE")]
    perturb_edge: Option<usize>,
    /// Perturbation sizes (comma separated).
    #[arg(long, value_delimiter = ',')]
    delta: Vec<f64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Approximate minimum spanning tree.
    Mst {
        #[command(flatten)]
        source: Source,
        #[arg(long, value_delimiter = ',', required = true)]
        epsilon: Vec<f64>,
        /// Pointwise variant with a random additive shift.
        #[arg(long)]
        pointwise: bool,
        #[command(flatten)]
        perturb: Perturbation,
    },
    /// Contraction-based unweighted shortest path.
    SpUnweighted {
        #[command(flatten)]
        source: Source,
        /// Source vertex (default: the instance's own).
        #[arg(long = "source")]
        source_vertex: Option<usize>,
        #[arg(long)]
        target: Option<usize>,
        #[arg(long, value_delimiter = ',', required = true)]
        epsilon: Vec<f64>,
        /// Fixed γ in (0, 1/8) instead of the sampled one.
        #[arg(long)]
        gamma_override: Option<f64>,
        /// Estimate the sensitivity to contracting this edge.
        #[arg(long, value_name = "EDGE")]
        contract_edge: Option<usize>,
    },
    /// Weighted shortest path through the rounding gadget.
    Sp {
        #[command(flatten)]
        source: Source,
        /// Source vertex (default: the instance's own).
        #[arg(long = "source")]
        source_vertex: Option<usize>,
        #[arg(long)]
        target: Option<usize>,
        #[arg(long, value_delimiter = ',', required = true)]
        epsilon: Vec<f64>,
        #[command(flatten)]
        perturb: Perturbation,
        /// Write the arc list of one gadget (first ε, `--seed`) here.
        #[arg(long, value_name = "PATH")]
        emit_gadget: Option<PathBuf>,
    },
    /// Randomized greedy maximum weight matching.
    Mwm {
        #[command(flatten)]
        source: Source,
        #[arg(long, value_delimiter = ',', conflicts_with = "epsilon")]
        alpha: Vec<f64>,
        /// Sets α = 2 + ε.
        #[arg(long, value_delimiter = ',')]
        epsilon: Vec<f64>,
        #[command(flatten)]
        perturb: Perturbation,
    },
    /// Maximum weight bipartite matching through the regularised LP.
    Bmatch {
        #[command(flatten)]
        source: Source,
        #[arg(long, value_delimiter = ',', required = true)]
        epsilon: Vec<f64>,
        /// Cell whose weight is raised.
        #[arg(long, num_args = 2, value_names = ["I", "J"])]
        perturb_cell: Option<Vec<usize>>,
        #[arg(long, value_delimiter = ',')]
        delta: Vec<f64>,
        /// Write x, λ and μ of one LP solve (first ε, `--seed`) here.
        #[arg(long, value_name = "PATH")]
        dump_lp: Option<PathBuf>,
    },
    /// Write a generated instance in the text format `--input` reads.
    Gen {
        /// Instance kind, e.g. `grid:4,5`.
        kind: String,
        #[arg(long, default_value_t = 0)]
        instance_seed: u64,
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
}

/// Failure kinds mapped to exit codes.
enum Failure {
    Violation(String),
    BadInput(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::BadInput(e)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::NoConvergence { .. } => Failure::Violation(e.to_string()),
            _ => Failure::BadInput(e.into()),
        }
    }
}

fn load(source: &Source, bipartite: bool) -> anyhow::Result<InstanceSource> {
    match (&source.input, &source.generate) {
        (Some(path), _) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            let instance = if bipartite {
                Instance::Bipartite(parse_bipartite(&text)?)
            } else {
                let (graph, weights) = parse_edge_list(&text)?;
                let target = graph.vertex_count().saturating_sub(1);
                Instance::Graph {
                    graph,
                    weights,
                    source: 0,
                    target,
                }
            };
            Ok(InstanceSource::Given {
                label: path.file_name().map_or_else(|| path.display().to_string(), |n| n.to_string_lossy().into_owned()),
                instance,
            })
        }
        (None, Some(kind)) => Ok(InstanceSource::Generated {
            kind: kind.parse::<InstanceKind>()?,
            seed: source.instance_seed,
        }),
        (None, None) => bail!("one of --input or --generate is required"),
    }
}

fn write_out(path: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn graph_of(src: &InstanceSource) -> anyhow::Result<Instance> {
    Ok(match src {
        InstanceSource::Generated { kind, seed } => gen_instance(kind, *seed)?,
        InstanceSource::Given { instance, .. } => instance.clone(),
    })
}

fn run(cli: &Cli) -> Result<(), Failure> {
    let mut extra: Option<(PathBuf, String)> = None;
    let cfg = match &cli.command {
        Command::Gen { kind, instance_seed, out } => {
            let text = match gen_instance(&kind.parse()?, *instance_seed)? {
                Instance::Graph { graph, weights, .. } => write_edge_list(&graph, &weights),
                Instance::Bipartite(w) => write_bipartite(&w),
            };
            write_out(out.as_deref(), &text)?;
            return Ok(());
        }
        Command::Mst {
            source,
            epsilon,
            pointwise,
            perturb,
        } => {
            let alg = if *pointwise { AlgorithmId::PlipMst } else { AlgorithmId::Mst };
            let mut cfg = ExperimentConfig::new(alg, load(source, false)?);
            cfg.epsilons = epsilon.clone();
            cfg.perturb = perturb.perturb_edge;
            cfg.deltas = perturb.delta.clone();
            cfg
        }
        Command::SpUnweighted {
            source,
            source_vertex,
            target,
            epsilon,
            gamma_override,
            contract_edge,
        } => {
            let mut cfg = ExperimentConfig::new(AlgorithmId::SpUnweighted, load(source, false)?);
            cfg.epsilons = epsilon.clone();
            cfg.source = *source_vertex;
            cfg.target = *target;
            cfg.gamma_override = *gamma_override;
            cfg.contract = *contract_edge;
            cfg
        }
        Command::Sp {
            source,
            source_vertex,
            target,
            epsilon,
            perturb,
            emit_gadget,
        } => {
            let src = load(source, false)?;
            if let Some(path) = emit_gadget {
                let Instance::Graph {
                    graph,
                    weights,
                    source: s0,
                    target: t0,
                } = graph_of(&src)?
                else {
                    unreachable!("edge-list instances are graphs")
                };
                let (s, t) = (source_vertex.unwrap_or(s0), target.unwrap_or(t0));
                let gadget = build_gadget(&graph, &weights, s, t, epsilon[0], Stream::new(cli.seed))?;
                extra = Some((path.clone(), gadget.to_arc_list()));
            }
            let mut cfg = ExperimentConfig::new(AlgorithmId::Sp, src);
            cfg.epsilons = epsilon.clone();
            cfg.source = *source_vertex;
            cfg.target = *target;
            cfg.perturb = perturb.perturb_edge;
            cfg.deltas = perturb.delta.clone();
            cfg
        }
        Command::Mwm {
            source,
            alpha,
            epsilon,
            perturb,
        } => {
            if alpha.is_empty() && epsilon.is_empty() {
                return Err(Failure::BadInput(anyhow::anyhow!("one of --alpha or --epsilon is required")));
            }
            let mut cfg = ExperimentConfig::new(AlgorithmId::Mwm, load(source, false)?);
            cfg.alphas = alpha.clone();
            cfg.epsilons = epsilon.clone();
            cfg.perturb = perturb.perturb_edge;
            cfg.deltas = perturb.delta.clone();
            cfg
        }
        Command::Bmatch {
            source,
            epsilon,
            perturb_cell,
            delta,
            dump_lp,
        } => {
            let src = load(source, true)?;
            let w = match graph_of(&src)? {
                Instance::Bipartite(w) => w,
                Instance::Graph { .. } => {
                    return Err(Failure::BadInput(anyhow::anyhow!("bmatch needs a bipartite instance")));
                }
            };
            if let Some(path) = dump_lp {
                let out = lipgraph::bmatch::plip_mwbm(&w, epsilon[0], Stream::new(cli.seed))?;
                let text = match out.b_reg {
                    Some(b) => solve_lp_ent(&w, b, lipgraph::bmatch::lp::DEFAULT_TOL)?.to_text(),
                    None => "# zero optimum: no LP solved\n".to_string(),
                };
                extra = Some((path.clone(), text));
            }
            let mut cfg = ExperimentConfig::new(AlgorithmId::Bmatch, src);
            cfg.epsilons = epsilon.clone();
            if let Some(cell) = perturb_cell {
                if cell[0] >= w.rows() || cell[1] >= w.cols() {
                    return Err(Failure::BadInput(anyhow::anyhow!("cell ({}, {}) out of range", cell[0], cell[1])));
                }
                cfg.perturb = Some(w.edge_id(cell[0], cell[1]));
            }
            cfg.deltas = delta.clone();
            cfg
        }
    };
    let cfg = ExperimentConfig {
        trials: cli.trials,
        seed: cli.seed,
        ..cfg
    };
    let report = run_experiment(&cfg)?;
    write_out(cli.csv.as_deref(), &report.to_csv()?)?;
    if let Some((path, text)) = extra {
        write_out(Some(&path), &text)?;
    }
    if !cli.quiet {
        eprintln!("{} rows, {} invariant violations", report.rows.len(), report.violations.len());
        for v in &report.violations {
            eprintln!("violation: {v}");
        }
    }
    if cli.check && !report.violations.is_empty() {
        return Err(Failure::Violation(format!("{} invariant violations", report.violations.len())));
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Violation(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::BadInput(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
