//! The `bench` subcommand: sweep the full-joined family over n, timing the
//! exact and sampling backends against the propagation reference.

use std::path::PathBuf;
use std::time::Instant;

use clap::Args;
use ducg::exact::{enumerate_likelihood_capped, marginal_propagation, ExactError};
use ducg::generators::full_joined;
use ducg::sampling::{run as sample, SamplerConfig};

use crate::CliError;

#[derive(Args)]
pub struct BenchArgs {
    #[arg(long, default_value_t = 2)]
    pub n_min: usize,
    #[arg(long, default_value_t = 5)]
    pub n_max: usize,
    #[arg(long, default_value_t = 3)]
    pub k: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Cap on the enumeration state space; larger n are marked infeasible
    #[arg(long, default_value_t = 1e8)]
    pub enumeration_cap: f64,
    #[arg(long, default_value_t = 100_000)]
    pub cycle_max: usize,
    /// Output file; stdout when omitted
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn run(args: BenchArgs) -> Result<(), CliError> {
    if args.n_min < 1 || args.n_max < args.n_min {
        return Err(CliError::validation("need 1 <= n-min <= n-max"));
    }
    let mut rows = String::from("n,backend,feasible,time_ms,cycles,value,error_pct\n");
    for n in args.n_min..=args.n_max {
        let model = full_joined(n, args.k, args.seed.wrapping_add(n as u64));
        let (evidence_var, evidence_state) = model.evidence.iter().next().unwrap();
        // single bottom evidence: the propagated marginal is the exact value
        let reference =
            marginal_propagation(&model.graph, model.hypothesis)[&evidence_var][evidence_state];

        match timed_exact(&model, args.enumeration_cap) {
            Ok((value, ms)) => {
                let err = (value - reference) / reference * 100.0;
                rows.push_str(&format!("{n},exact,yes,{ms:.3},,{value:.9e},{err:.4}\n"));
            }
            Err(ExactError::Infeasible { .. }) => {
                rows.push_str(&format!("{n},exact,no,,,,\n"));
            }
            Err(e) => return Err(CliError::validation(e.to_string())),
        }

        let cfg = SamplerConfig {
            seed: args.seed.wrapping_add(n as u64),
            cycle_max: args.cycle_max,
            ..SamplerConfig::default()
        };
        let started = Instant::now();
        let run = sample(&model.graph, &model.evidence, model.hypothesis, &cfg)
            .map_err(|e| CliError::validation(e.to_string()))?;
        let ms = started.elapsed().as_secs_f64() * 1e3;
        let err = (run.likelihood - reference) / reference * 100.0;
        rows.push_str(&format!(
            "{n},sampling,yes,{ms:.3},{},{:.9e},{err:.4}\n",
            run.cycles, run.likelihood
        ));
    }
    match &args.out {
        Some(path) => std::fs::write(path, rows)
            .map_err(|e| CliError::validation(format!("{}: {e}", path.display())))?,
        None => print!("{rows}"),
    }
    Ok(())
}

/// Enumeration wall time, repeated until at least 20 ms accumulate so the
/// sub-millisecond cases report stable numbers.
fn timed_exact(
    model: &ducg::generators::GeneratedModel,
    cap: f64,
) -> Result<(f64, f64), ExactError> {
    let started = Instant::now();
    let value = enumerate_likelihood_capped(&model.graph, &model.evidence, model.hypothesis, cap)?;
    let first = started.elapsed().as_secs_f64();
    if first >= 0.02 {
        return Ok((value, first * 1e3));
    }
    let reps = ((0.02 / first.max(1e-7)) as usize).clamp(1, 1000);
    let started = Instant::now();
    for _ in 0..reps {
        let v = enumerate_likelihood_capped(&model.graph, &model.evidence, model.hypothesis, cap)?;
        assert_eq!(v.to_bits(), value.to_bits());
    }
    Ok((value, started.elapsed().as_secs_f64() * 1e3 / reps as f64))
}
