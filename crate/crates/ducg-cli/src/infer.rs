//! The `infer` subcommand: run one backend over every hypothesis, print a
//! ranked posterior table, optionally write a report and convergence traces.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::mpsc;
use std::time::Instant;

use clap::{Args, ValueEnum};
use ducg::algebra;
use ducg::exact::{self, enumerate_likelihood_capped, ExactError, Hypothesis};
use ducg::format::{load_evidence, load_graph};
use ducg::graph::{Evidence, Graph, GraphError, VarKind};
use ducg::recursive::{self, RecursiveError};
use ducg::sampling::{self, EstimatorChoice, SamplerConfig, SamplerTrace};

use crate::report::{ConfigEcho, HypothesisRow, RunReport};
use crate::{CliError, EXIT_NOT_CONVERGED};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Backend {
    /// Enumeration over unknown-state assignments
    Exact,
    /// Full symbolic expansion evaluated under the hypothesis
    Symbolic,
    /// Layered factor expansion (general form)
    Recursive,
    /// Closed-form layered product (needs fully observed parents)
    Layered,
    /// Conditional stochastic simulation
    Sampling,
}

impl Backend {
    fn label(self) -> &'static str {
        match self {
            Backend::Exact => "exact",
            Backend::Symbolic => "symbolic",
            Backend::Recursive => "recursive",
            Backend::Layered => "layered",
            Backend::Sampling => "sampling",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EstimatorArg {
    Auto,
    Simple,
    Cutoff,
}

fn parse_assignment(s: &str) -> Result<(u32, usize), String> {
    let (var, state) = s
        .split_once('=')
        .ok_or_else(|| format!("expected VAR=STATE, got {s:?}"))?;
    Ok((
        var.trim()
            .parse()
            .map_err(|e| format!("bad variable id: {e}"))?,
        state
            .trim()
            .parse()
            .map_err(|e| format!("bad state: {e}"))?,
    ))
}

#[derive(Args)]
pub struct InferArgs {
    /// Graph document to load
    #[arg(long)]
    pub graph: PathBuf,

    /// Observed state, repeatable: --evidence VAR=STATE
    #[arg(long = "evidence", value_parser = parse_assignment)]
    pub evidence: Vec<(u32, usize)>,

    /// Evidence document (JSON map from variable id to state)
    #[arg(long)]
    pub evidence_file: Option<PathBuf>,

    /// Restrict to specific hypotheses, repeatable: --hypothesis VAR=STATE.
    /// Default: every state of every root variable that can explain the
    /// evidence.
    #[arg(long = "hypothesis", value_parser = parse_assignment)]
    pub hypothesis: Vec<(u32, usize)>,

    #[arg(long, value_enum, default_value_t = Backend::Exact)]
    pub backend: Backend,

    #[arg(long, default_value_t = 300)]
    pub burn_in: usize,
    #[arg(long, default_value_t = 200)]
    pub window: usize,
    #[arg(long, default_value_t = 1e-3)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 0.05)]
    pub delta: f64,
    /// Normal tail quantile; derived from --delta when omitted
    #[arg(long)]
    pub c: Option<f64>,
    #[arg(long, default_value_t = 2)]
    pub ig_layer: usize,
    #[arg(long, default_value_t = 6)]
    pub ig_x: usize,
    #[arg(long, default_value_t = 100_000)]
    pub cycle_max: usize,
    /// Base seed; hypothesis i (in table order) samples with seed + i
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = EstimatorArg::Auto)]
    pub estimator: EstimatorArg,

    /// Cap on the enumeration state space
    #[arg(long, default_value_t = 1e8)]
    pub enumeration_cap: f64,
    /// Cap on intermediate symbolic term counts
    #[arg(long, default_value_t = 1_000_000)]
    pub term_cap: usize,

    /// Write a JSON run report
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Write convergence traces (sampling backend only). With several
    /// hypotheses the path gains a -vVAR-sSTATE suffix per hypothesis.
    #[arg(long)]
    pub trace: Option<PathBuf>,
}

struct HypothesisOutcome {
    hypothesis: Hypothesis,
    likelihood: f64,
    cycles: Option<usize>,
    converged: Option<bool>,
    wall_ms: f64,
    trace: Option<SamplerTrace>,
}

pub fn run(args: InferArgs) -> Result<(), CliError> {
    let text = std::fs::read_to_string(&args.graph)
        .map_err(|e| CliError::validation(format!("{}: {e}", args.graph.display())))?;
    let graph = load_graph(&text).map_err(|e| CliError::validation(e.to_string()))?;

    let mut evidence = Evidence::from_pairs(
        graph
            .variables()
            .filter(|v| v.kind == VarKind::X)
            .filter_map(|v| v.observed_state.map(|s| (v.id, s))),
    );
    if let Some(path) = &args.evidence_file {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::validation(format!("{}: {e}", path.display())))?;
        let file_evidence =
            load_evidence(&text).map_err(|e| CliError::validation(e.to_string()))?;
        for (v, s) in file_evidence.iter() {
            evidence.set(v, s);
        }
    }
    for &(v, s) in &args.evidence {
        evidence.set(v, s);
    }
    evidence
        .check(&graph)
        .map_err(|e| CliError::validation(e.to_string()))?;
    if evidence.is_empty() {
        return Err(CliError::validation(
            "no evidence supplied (flags, file, or observed states in the graph)",
        ));
    }

    let hypotheses = hypothesis_set(&graph, &evidence, &args.hypothesis)?;
    let cfg_base = SamplerConfig {
        burn_in: args.burn_in,
        window: args.window,
        epsilon: args.epsilon,
        delta: args.delta,
        c: args.c,
        ig_layer: args.ig_layer,
        ig_x: args.ig_x,
        cycle_max: args.cycle_max,
        seed: args.seed,
        estimator: match args.estimator {
            EstimatorArg::Auto => EstimatorChoice::Auto,
            EstimatorArg::Simple => EstimatorChoice::Simple,
            EstimatorArg::Cutoff => EstimatorChoice::Cutoff,
        },
    };

    let outcomes = run_hypotheses(
        &graph,
        &evidence,
        &hypotheses,
        args.backend,
        &cfg_base,
        &args,
    )?;

    let likelihoods: Vec<(Hypothesis, f64)> = outcomes
        .iter()
        .map(|o| (o.hypothesis, o.likelihood))
        .collect();
    let results =
        exact::posterior(&graph, &likelihoods).map_err(|e| CliError::validation(e.to_string()))?;

    let mut rows: Vec<(HypothesisRow, &HypothesisOutcome)> = results
        .iter()
        .zip(&outcomes)
        .map(|(r, o)| {
            (
                HypothesisRow {
                    var: r.hypothesis.var,
                    state: r.hypothesis.state,
                    likelihood: r.likelihood,
                    joint: r.joint,
                    posterior: r.posterior,
                    cycles: o.cycles,
                    converged: o.converged,
                    wall_ms: o.wall_ms,
                },
                o,
            )
        })
        .collect();
    rows.sort_by(|a, b| b.0.posterior.total_cmp(&a.0.posterior));

    print_table(args.backend, &rows);

    if let Some(path) = &args.out {
        let report = RunReport {
            backend: args.backend.label().to_string(),
            config: ConfigEcho {
                burn_in: cfg_base.burn_in,
                window: cfg_base.window,
                epsilon: cfg_base.epsilon,
                delta: cfg_base.delta,
                c: cfg_base.tail_quantile(),
                ig_layer: cfg_base.ig_layer,
                ig_x: cfg_base.ig_x,
                cycle_max: cfg_base.cycle_max,
                seed: cfg_base.seed,
                enumeration_cap: args.enumeration_cap,
                term_cap: args.term_cap,
            },
            results: rows.iter().map(|(r, _)| clone_row(r)).collect(),
        };
        let json = serde_json::to_string_pretty(&report).expect("report serializes");
        std::fs::write(path, json)
            .map_err(|e| CliError::validation(format!("{}: {e}", path.display())))?;
    }

    if let Some(path) = &args.trace {
        write_traces(path, &outcomes)?;
    }

    if args.backend == Backend::Sampling && outcomes.iter().any(|o| o.converged == Some(false)) {
        return Err(CliError {
            code: EXIT_NOT_CONVERGED,
            message: "one or more hypotheses did not converge within the cycle cap".into(),
        });
    }
    Ok(())
}

fn clone_row(r: &HypothesisRow) -> HypothesisRow {
    HypothesisRow {
        var: r.var,
        state: r.state,
        likelihood: r.likelihood,
        joint: r.joint,
        posterior: r.posterior,
        cycles: r.cycles,
        converged: r.converged,
        wall_ms: r.wall_ms,
    }
}

/// The hypothesis set: explicit flags, or every state of every root that
/// survives restriction to the evidence.
fn hypothesis_set(
    graph: &Graph,
    evidence: &Evidence,
    flags: &[(u32, usize)],
) -> Result<Vec<Hypothesis>, CliError> {
    if !flags.is_empty() {
        let mut out = Vec::new();
        for &(var, state) in flags {
            let v = graph
                .variable(var)
                .ok_or_else(|| CliError::validation(format!("unknown variable {var}")))?;
            if v.kind != VarKind::B {
                return Err(CliError::validation(format!(
                    "hypothesis variable {var} is not B-kind"
                )));
            }
            if state >= v.state_count {
                return Err(CliError::validation(format!(
                    "hypothesis state {state} out of range for variable {var}"
                )));
            }
            out.push(Hypothesis::new(var, state));
        }
        return Ok(out);
    }
    let mut out = Vec::new();
    for v in graph.variables().filter(|v| v.kind == VarKind::B) {
        if graph.restrict_to_hypothesis(evidence, v.id).is_ok() {
            for state in 0..v.state_count {
                out.push(Hypothesis::new(v.id, state));
            }
        }
    }
    if out.is_empty() {
        return Err(CliError::validation(
            "no root-cause hypothesis can explain the evidence",
        ));
    }
    Ok(out)
}

fn run_hypotheses(
    graph: &Graph,
    evidence: &Evidence,
    hypotheses: &[Hypothesis],
    backend: Backend,
    cfg_base: &SamplerConfig,
    args: &InferArgs,
) -> Result<Vec<HypothesisOutcome>, CliError> {
    let workers = std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1)
        .min(hypotheses.len().max(1));
    let (tx, rx) = mpsc::channel();
    std::thread::scope(|scope| {
        for chunk_start in 0..workers {
            let tx = tx.clone();
            scope.spawn(move || {
                for (i, &h) in hypotheses
                    .iter()
                    .enumerate()
                    .skip(chunk_start)
                    .step_by(workers)
                {
                    let r = run_one(graph, evidence, h, i, backend, cfg_base, args);
                    let _ = tx.send((i, r));
                }
            });
        }
    });
    drop(tx);
    let mut slots: Vec<Option<Result<HypothesisOutcome, CliError>>> =
        (0..hypotheses.len()).map(|_| None).collect();
    for (i, r) in rx {
        slots[i] = Some(r);
    }
    slots
        .into_iter()
        .map(|s| s.expect("every hypothesis reports"))
        .collect()
}

fn run_one(
    graph: &Graph,
    evidence: &Evidence,
    hypothesis: Hypothesis,
    index: usize,
    backend: Backend,
    cfg_base: &SamplerConfig,
    args: &InferArgs,
) -> Result<HypothesisOutcome, CliError> {
    let sub = graph
        .restrict_to_hypothesis(evidence, hypothesis.var)
        .map_err(|e| match e {
            GraphError::DisconnectedHypothesis { .. } | GraphError::UnreachableEvidence { .. } => {
                CliError::validation(e.to_string())
            }
            other => CliError::validation(other.to_string()),
        })?;
    let started = Instant::now();
    let (likelihood, cycles, converged, trace) = match backend {
        Backend::Exact => {
            let lik = enumerate_likelihood_capped(&sub, evidence, hypothesis, args.enumeration_cap)
                .map_err(|e| match e {
                    ExactError::Infeasible { .. } => CliError::infeasible(e.to_string()),
                    other => CliError::validation(other.to_string()),
                })?;
            (lik, None, None, None)
        }
        Backend::Symbolic => {
            let ground = algebra::expand_to_ground(&sub, evidence);
            let lik = algebra::evaluate_with(&ground, &sub, &BTreeMap::new(), |var, state| {
                conditioned_b(&sub, hypothesis, var, state)
            })
            .map_err(|e| CliError::validation(e.to_string()))?;
            (lik, None, None, None)
        }
        Backend::Recursive => {
            let plan = recursive::plan(&sub, evidence, hypothesis);
            let outcome = recursive::recursive_general_capped(
                &sub,
                evidence,
                hypothesis,
                &plan,
                args.term_cap,
            )
            .map_err(|e| CliError::infeasible(e.to_string()))?;
            (outcome.likelihood, None, None, None)
        }
        Backend::Layered => {
            let plan = recursive::plan(&sub, evidence, hypothesis);
            let lik =
                recursive::likelihood_layered(&sub, evidence, hypothesis, &plan).map_err(|e| {
                    match e {
                        RecursiveError::AssumptionsNotSatisfied => {
                            CliError::infeasible(e.to_string())
                        }
                        other => CliError::infeasible(other.to_string()),
                    }
                })?;
            (lik, None, None, None)
        }
        Backend::Sampling => {
            let cfg = SamplerConfig {
                seed: cfg_base.seed.wrapping_add(index as u64),
                ..cfg_base.clone()
            };
            let run = sampling::run(&sub, evidence, hypothesis, &cfg)
                .map_err(|e| CliError::validation(e.to_string()))?;
            (
                run.likelihood,
                Some(run.cycles),
                Some(run.converged()),
                Some(run.trace),
            )
        }
    };
    Ok(HypothesisOutcome {
        hypothesis,
        likelihood,
        cycles,
        converged,
        wall_ms: started.elapsed().as_secs_f64() * 1e3,
        trace,
    })
}

fn conditioned_b(graph: &Graph, hypothesis: Hypothesis, var: u32, state: usize) -> f64 {
    if var == hypothesis.var {
        (state == hypothesis.state) as u8 as f64
    } else {
        graph
            .variable(var)
            .and_then(|v| v.prior.as_ref())
            .map(|p| p[state])
            .unwrap_or(0.0)
    }
}

fn print_table(backend: Backend, rows: &[(HypothesisRow, &HypothesisOutcome)]) {
    println!("backend: {}", backend.label());
    println!(
        "{:<12} {:<14} {:<14} {:<12} {:>8} {:>10} {:>10}",
        "hypothesis", "likelihood", "joint", "posterior", "cycles", "converged", "wall_ms"
    );
    for (r, _) in rows {
        let cycles = r.cycles.map_or("-".to_string(), |c| c.to_string());
        let converged =
            r.converged.map_or(
                "-".to_string(),
                |c| if c { "yes".into() } else { "NO".into() },
            );
        println!(
            "B({},{})      {:<14.6e} {:<14.6e} {:<12.6e} {:>8} {:>10} {:>10.2}",
            r.var, r.state, r.likelihood, r.joint, r.posterior, cycles, converged, r.wall_ms
        );
    }
}

fn write_traces(path: &Path, outcomes: &[HypothesisOutcome]) -> Result<(), CliError> {
    let with_trace: Vec<&HypothesisOutcome> =
        outcomes.iter().filter(|o| o.trace.is_some()).collect();
    for o in &with_trace {
        let target = if with_trace.len() == 1 {
            path.to_path_buf()
        } else {
            let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("trace");
            let ext = path.extension().and_then(|s| s.to_str()).unwrap_or("csv");
            path.with_file_name(format!(
                "{stem}-v{}-s{}.{ext}",
                o.hypothesis.var, o.hypothesis.state
            ))
        };
        let mut file = std::fs::File::create(&target)
            .map_err(|e| CliError::validation(format!("{}: {e}", target.display())))?;
        o.trace
            .as_ref()
            .unwrap()
            .write_csv(&mut file)
            .map_err(|e| CliError::validation(e.to_string()))?;
    }
    Ok(())
}
