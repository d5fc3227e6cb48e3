//! Conditional stochastic simulation.
//!
//! Instead of counting how often the evidence occurs, every cycle redraws
//! the state-unknown variables from their parent-conditional distributions
//! in topological order and records `P_t = Pr{E | sampled states}`; the
//! running mean of `P_t` estimates `Pr{E | B_kj}`. Because a full
//! topological pass given fixed parents is a fresh ancestral draw, the
//! estimator is unbiased, and it works at likelihoods far too small to ever
//! observe the evidence in a forward sample.
//!
//! With several evidence nodes sharing state-unknown ancestors, the naive
//! per-evidence product is systematically wrong; the cut-off estimator
//! expands the evidence product symbolically for a bounded number of layers,
//! freezes single-unknown terms as per-cycle numeric leaves, grounds what
//! reaches the roots, and drops only the terms past the cut-off thresholds.
//!
//! Sampling stops under an ε–Δ rule: over a trailing window of the running
//! mean, halt once `c·δ < ε·μ` with `c` the two-sided normal quantile of
//! the confidence target.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{self, Literal, SymbolicExpr, Term};
use crate::exact::{conditional_distribution, known_state, Hypothesis};
use crate::graph::{Evidence, Graph, StateIdx, VarId, VarKind};

#[derive(Debug, Clone, thiserror::Error, PartialEq)]
pub enum SamplingError {
    #[error("invalid sampler config: {0}")]
    Config(String),
    #[error("cut-off leaf variable {var} missing from the sample assignment")]
    LeafMissing { var: VarId },
    #[error(transparent)]
    Exact(#[from] crate::exact::ExactError),
}

/// Which per-cycle likelihood estimator a run uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EstimatorChoice {
    /// Pick per the evidence structure: simple unless two evidence nodes
    /// share a state-unknown ancestor.
    Auto,
    Simple,
    Cutoff,
}

/// Sampler knobs. `c` is derived from `delta` unless supplied.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplerConfig {
    /// Burn-in cycles `b`: halting is not considered before `b + window`.
    pub burn_in: usize,
    /// Window width `ω` for the halting statistics.
    pub window: usize,
    /// Relative error target `ε`.
    pub epsilon: f64,
    /// One minus the confidence target, `Δ`.
    pub delta: f64,
    /// Normal tail quantile; `None` derives `c = Q⁻¹(Δ/2)`.
    pub c: Option<f64>,
    /// Maximum expansion depth for the cut-off estimator.
    pub ig_layer: usize,
    /// Maximum distinct state-unknown variables per retained term.
    pub ig_x: usize,
    /// Hard cap on sampling cycles.
    pub cycle_max: usize,
    pub seed: u64,
    pub estimator: EstimatorChoice,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        SamplerConfig {
            burn_in: 300,
            window: 200,
            epsilon: 1e-3,
            delta: 0.05,
            c: None,
            ig_layer: 2,
            ig_x: 6,
            cycle_max: 100_000,
            seed: 0,
            estimator: EstimatorChoice::Auto,
        }
    }
}

impl SamplerConfig {
    pub fn validate(&self) -> Result<(), SamplingError> {
        let fail = |m: &str| Err(SamplingError::Config(m.to_string()));
        if self.burn_in < 1 || self.window < 1 {
            return fail("burn_in and window must be at least 1");
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return fail("epsilon must lie in (0, 1)");
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return fail("delta must lie in (0, 1)");
        }
        if let Some(c) = self.c {
            // negated form so NaN fails too
            #[allow(clippy::neg_cmp_op_on_partial_ord)]
            if !(c > 0.0) {
                return fail("c must be positive");
            }
        }
        if self.ig_layer < 1 || self.ig_x < 1 {
            return fail("ig_layer and ig_x must be at least 1");
        }
        if self.cycle_max <= self.burn_in + self.window {
            return fail("cycle_max must exceed burn_in + window");
        }
        Ok(())
    }

    /// The tail quantile actually used for halting.
    pub fn tail_quantile(&self) -> f64 {
        self.c.unwrap_or_else(|| normal_tail_quantile(self.delta))
    }
}

/// `c = Q⁻¹(Δ/2)`: the two-sided normal quantile of a tail mass `Δ`.
pub fn normal_tail_quantile(delta: f64) -> f64 {
    inverse_normal_cdf(1.0 - delta / 2.0)
}

/// Inverse standard-normal CDF (Wichura's PPND16 rational approximations,
/// accurate to ~1e-15 over the open unit interval).
#[allow(clippy::excessive_precision)] // constants as published
pub fn inverse_normal_cdf(p: f64) -> f64 {
    assert!(p > 0.0 && p < 1.0, "quantile argument must lie in (0, 1)");
    let q = p - 0.5;
    if q.abs() <= 0.425 {
        let r = 0.180625 - q * q;
        let num = poly(
            &[
                3.387_132_872_796_366_608e0,
                1.331_416_678_917_843_774_5e2,
                1.971_590_950_306_551_442_7e3,
                1.373_169_376_550_946_112_5e4,
                4.592_195_393_154_987_145_7e4,
                6.726_577_092_700_870_085_3e4,
                3.343_057_558_358_812_810_5e4,
                2.509_080_928_730_122_672_7e3,
            ],
            r,
        );
        let den = poly(
            &[
                1.0,
                4.231_333_070_160_091_125_2e1,
                6.871_870_074_920_579_083e2,
                5.394_196_021_424_751_107_7e3,
                2.121_379_430_158_659_586_7e4,
                3.930_789_580_009_271_061e4,
                2.872_908_573_572_194_267_4e4,
                5.226_495_278_852_854_561e3,
            ],
            r,
        );
        return q * num / den;
    }
    let r = if q < 0.0 { p } else { 1.0 - p };
    let mut r = (-r.ln()).sqrt();
    let value = if r <= 5.0 {
        r -= 1.6;
        let num = poly(
            &[
                1.423_437_110_749_683_577_3e0,
                4.630_337_846_156_545_295_9e0,
                5.769_497_221_460_691_405_5e0,
                3.647_848_324_763_204_605e0,
                1.270_458_252_452_368_382_6e0,
                2.417_807_251_774_506_117_7e-1,
                2.272_384_498_926_918_458_3e-2,
                7.745_450_142_783_414_076_4e-4,
            ],
            r,
        );
        let den = poly(
            &[
                1.0,
                2.053_191_626_637_758_821_9e0,
                1.676_384_830_183_803_849_4e0,
                6.897_673_349_851_000_045_5e-1,
                1.481_039_764_274_800_745_9e-1,
                1.519_866_656_361_645_719_7e-2,
                5.475_938_084_995_344_946e-4,
                1.050_750_071_644_416_843_2e-9,
            ],
            r,
        );
        num / den
    } else {
        r -= 5.0;
        let num = poly(
            &[
                6.657_904_643_501_103_777_2e0,
                5.463_784_911_164_114_369_9e0,
                1.784_826_539_917_291_335_8e0,
                2.965_605_718_285_048_912_3e-1,
                2.653_218_952_657_612_309_3e-2,
                1.242_660_947_388_078_438_6e-3,
                2.711_555_568_743_487_578_2e-5,
                2.010_334_399_292_288_132_6e-7,
            ],
            r,
        );
        let den = poly(
            &[
                1.0,
                5.998_322_065_558_879_376_9e-1,
                1.369_298_809_227_358_053_1e-1,
                1.487_536_129_085_061_485_2e-2,
                7.868_691_311_456_132_591e-4,
                1.846_318_317_510_054_681_8e-5,
                1.421_511_758_316_445_888_7e-7,
                2.044_263_103_389_939_785_6e-15,
            ],
            r,
        );
        num / den
    };
    if q < 0.0 {
        -value
    } else {
        value
    }
}

fn poly(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

/// Per-cycle states of the state-unknown variables (`W_u`). Evidence
/// variables never appear here.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SampleAssignment {
    states: BTreeMap<VarId, StateIdx>,
}

impl SampleAssignment {
    pub fn get(&self, var: VarId) -> Option<StateIdx> {
        self.states.get(&var).copied()
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (VarId, StateIdx)> + '_ {
        self.states.iter().map(|(&v, &s)| (v, s))
    }
}

/// The state-unknown X variables of a graph under some evidence, in
/// topological order.
pub fn unknown_variables(g: &Graph, evidence: &Evidence) -> Vec<VarId> {
    g.topological_order()
        .expect("graph is acyclic")
        .into_iter()
        .filter(|&v| {
            g.variable(v).unwrap().kind == VarKind::X && known_state(g, evidence, v).is_none()
        })
        .collect()
}

/// Draw a uniformly random initial state for every unknown variable.
pub fn init_assignment(g: &Graph, evidence: &Evidence, rng: &mut ChaCha8Rng) -> SampleAssignment {
    let states = unknown_variables(g, evidence)
        .into_iter()
        .map(|v| {
            let n = g.variable(v).unwrap().state_count;
            (v, rng.random_range(0..n))
        })
        .collect();
    SampleAssignment { states }
}

fn draw(dist: &[f64], rng: &mut ChaCha8Rng) -> StateIdx {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (s, &p) in dist.iter().enumerate() {
        acc += p;
        if u < acc {
            return s;
        }
    }
    dist.len() - 1
}

/// One sampling cycle: visit the unknown variables in topological order and
/// redraw each from its parent-conditional distribution, parents updated
/// earlier in the pass contributing their new states. Evidence variables are
/// never resampled.
pub fn resample_cycle(
    g: &Graph,
    hypothesis: Hypothesis,
    evidence: &Evidence,
    assignment: &mut SampleAssignment,
    rng: &mut ChaCha8Rng,
) -> Result<(), SamplingError> {
    let mut full: BTreeMap<VarId, StateIdx> = assignment.states.clone();
    full.insert(hypothesis.var, hypothesis.state);
    for v in g.variables() {
        if let Some(s) = known_state(g, evidence, v.id) {
            full.insert(v.id, s);
        }
    }
    let order: Vec<VarId> = assignment.states.keys().copied().collect();
    let topo = g.topological_order().expect("graph is acyclic");
    for v in topo {
        if !order.contains(&v) {
            continue;
        }
        let dist = conditional_distribution(g, v, &full)?;
        let s = draw(&dist, rng);
        full.insert(v, s);
        assignment.states.insert(v, s);
    }
    Ok(())
}

/// The simple per-cycle likelihood: the product over evidence nodes of their
/// conditional probability at the observed state given the sampled/observed
/// parent states. Exact in expectation when no two evidence nodes share a
/// state-unknown ancestor.
pub fn cycle_likelihood_simple(
    g: &Graph,
    evidence: &Evidence,
    hypothesis: Hypothesis,
    assignment: &SampleAssignment,
) -> Result<f64, SamplingError> {
    let mut full: BTreeMap<VarId, StateIdx> = assignment.states.clone();
    full.insert(hypothesis.var, hypothesis.state);
    for v in g.variables() {
        if let Some(s) = known_state(g, evidence, v.id) {
            full.insert(v.id, s);
        }
    }
    let mut p = 1.0;
    for (e, obs) in evidence.iter() {
        let dist = conditional_distribution(g, e, &full)?;
        p *= dist[obs];
    }
    Ok(p)
}

/// One frozen single-unknown leaf of the cut-off expression: per sampled
/// state of `var`, the term's numeric value.
#[derive(Debug, Clone)]
pub struct CutoffLeaf {
    pub var: VarId,
    table: Vec<f64>,
}

impl CutoffLeaf {
    /// The term's numeric value when `var` is sampled in `state`.
    pub fn value_at(&self, state: StateIdx) -> f64 {
        self.table[state]
    }
}

/// The cut-off expansion of an evidence product: a constant from the terms
/// grounded to the roots, one numeric table per frozen single-unknown term,
/// and a count of the terms dropped past the thresholds.
#[derive(Debug, Clone)]
pub struct CutoffExpression {
    pub leaves: Vec<CutoffLeaf>,
    pub grounded_constant: f64,
    pub dropped_terms: usize,
    /// The frozen symbolic form (grounded terms plus leaf terms).
    pub expression: SymbolicExpr,
}

impl CutoffExpression {
    /// Distinct leaf variables, each of which must be sampled per cycle.
    pub fn leaf_vars(&self) -> BTreeSet<VarId> {
        self.leaves.iter().map(|l| l.var).collect()
    }
}

/// Expand the evidence product for at most `ig_layer` steps, freezing terms
/// with exactly one state-unknown variable as numeric leaves at every step
/// and dropping terms with more than `ig_x` unknowns. After the last step,
/// terms whose remaining unknowns all have root-only parents are grounded
/// numerically; anything still unresolved is dropped.
pub fn build_cutoff_expression(
    g: &Graph,
    evidence: &Evidence,
    hypothesis: Hypothesis,
    ig_layer: usize,
    ig_x: usize,
) -> CutoffExpression {
    let b_value = |var: VarId, state: StateIdx| {
        if var == hypothesis.var {
            (state == hypothesis.state) as u8 as f64
        } else {
            g.variable(var)
                .and_then(|v| v.prior.as_ref())
                .map(|p| p[state])
                .unwrap_or(0.0)
        }
    };
    let is_unknown = |v: VarId| {
        g.variable(v).map(|x| x.kind) == Some(VarKind::X) && known_state(g, evidence, v).is_none()
    };

    let evidence_product = Term::new(
        1.0,
        evidence
            .iter()
            .map(|(v, s)| Literal::X {
                var: v,
                state: Some(s),
            })
            .collect(),
    )
    .expect("evidence is consistent");
    let mut working = SymbolicExpr::from_terms([evidence_product]);

    let mut grounded: Vec<Term> = Vec::new();
    let mut frozen: Vec<Term> = Vec::new();
    let mut dropped = 0usize;

    let sift = |expr: SymbolicExpr,
                grounded: &mut Vec<Term>,
                frozen: &mut Vec<Term>,
                dropped: &mut usize|
     -> SymbolicExpr {
        let mut keep = Vec::new();
        for t in expr.terms() {
            let unknowns: Vec<VarId> = t
                .x_vars()
                .filter(|(v, _)| is_unknown(*v))
                .map(|(v, _)| v)
                .collect();
            if t.x_vars().count() == 0 {
                grounded.push(t.clone());
            } else if unknowns.len() == 1 && t.x_vars().count() == 1 {
                frozen.push(t.clone());
            } else if unknowns.len() > ig_x {
                *dropped += 1;
            } else {
                keep.push(t.clone());
            }
        }
        SymbolicExpr::from_terms(keep)
    };

    for _ in 0..ig_layer {
        if working.is_empty() {
            break;
        }
        working = algebra::expand_layer(g, &working);
        working = sift(working, &mut grounded, &mut frozen, &mut dropped);
    }

    // Grounding pass: unknowns whose ancestry is root-only resolve to
    // numbers without growing the expression.
    loop {
        if working.is_empty() {
            break;
        }
        let groundable = working.terms().iter().all(|t| {
            t.x_vars().all(|(v, _)| {
                g.parents(v)
                    .all(|l| g.variable(l.parent_id).unwrap().kind != VarKind::X)
            })
        });
        if !groundable {
            break;
        }
        working = algebra::expand_layer(g, &working);
        working = sift(working, &mut grounded, &mut frozen, &mut dropped);
    }
    dropped += working.len();

    let empty = BTreeMap::new();
    let grounded_constant = grounded
        .iter()
        .map(|t| {
            algebra::evaluate_with(&SymbolicExpr::from_terms([t.clone()]), g, &empty, b_value)
                .expect("grounded terms have no X literals")
        })
        .sum();

    let leaves = frozen
        .iter()
        .map(|t| {
            let (var, _) = t.x_vars().next().expect("frozen terms hold one X literal");
            let states = g.variable(var).unwrap().state_count;
            let table = (0..states)
                .map(|j| {
                    let mut x_values = BTreeMap::new();
                    for s in 0..states {
                        x_values.insert((var, s), (s == j) as u8 as f64);
                    }
                    algebra::evaluate_with(
                        &SymbolicExpr::from_terms([t.clone()]),
                        g,
                        &x_values,
                        b_value,
                    )
                    .expect("leaf terms bind only their own variable")
                })
                .collect();
            CutoffLeaf { var, table }
        })
        .collect();

    let expression = SymbolicExpr::from_terms(grounded.into_iter().chain(frozen));
    CutoffExpression {
        leaves,
        grounded_constant,
        dropped_terms: dropped,
        expression,
    }
}

/// The cut-off per-cycle likelihood: grounded constant plus each leaf's
/// value at its variable's sampled state.
pub fn cycle_likelihood_cutoff(
    cutoff: &CutoffExpression,
    assignment: &SampleAssignment,
) -> Result<f64, SamplingError> {
    let mut p = cutoff.grounded_constant;
    for leaf in &cutoff.leaves {
        let s = assignment
            .get(leaf.var)
            .ok_or(SamplingError::LeafMissing { var: leaf.var })?;
        p += leaf.table[s];
    }
    Ok(p)
}

/// Halting verdict for one cycle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Continue,
    Converged,
    /// Window mean and deviation both zero: the evidence has no support
    /// under this hypothesis.
    ConvergedAtZero,
    CapReached,
}

impl Verdict {
    pub fn is_converged(self) -> bool {
        matches!(self, Verdict::Converged | Verdict::ConvergedAtZero)
    }

    fn label(self) -> &'static str {
        match self {
            Verdict::Continue => "continue",
            Verdict::Converged | Verdict::ConvergedAtZero => "converged",
            Verdict::CapReached => "cap_reached",
        }
    }
}

/// One row of the convergence trace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow {
    pub t: usize,
    pub p_t: f64,
    pub running_mean: f64,
    pub window_mean: f64,
    pub window_std: f64,
    pub verdict: Verdict,
}

/// Full per-cycle diagnostics of one sampling run.
#[derive(Debug, Clone, Default)]
pub struct SamplerTrace {
    pub rows: Vec<TraceRow>,
}

impl SamplerTrace {
    /// Export as delimiter-separated rows, nine significant digits.
    pub fn write_csv(&self, out: &mut impl Write) -> std::io::Result<()> {
        writeln!(out, "t,p_t,running_mean,window_mean,window_std,verdict")?;
        for r in &self.rows {
            writeln!(
                out,
                "{},{:.8e},{:.8e},{:.8e},{:.8e},{}",
                r.t,
                r.p_t,
                r.running_mean,
                r.window_mean,
                r.window_std,
                r.verdict.label()
            )?;
        }
        Ok(())
    }
}

/// Window statistics over the trailing `window` entries of the running-mean
/// sequence, and the resulting verdict. Callable once `t >= burn_in +
/// window`.
pub fn halting_check(running_means: &[f64], cfg: &SamplerConfig, c: f64) -> (f64, f64, Verdict) {
    let t = running_means.len();
    debug_assert!(t >= cfg.burn_in + cfg.window);
    let window = &running_means[t - cfg.window..];
    let mu = window.iter().sum::<f64>() / cfg.window as f64;
    let var = window.iter().map(|x| (x - mu) * (x - mu)).sum::<f64>() / cfg.window as f64;
    let delta = var.sqrt();
    let verdict = if mu == 0.0 && delta == 0.0 {
        Verdict::ConvergedAtZero
    } else if c * delta < cfg.epsilon * mu {
        Verdict::Converged
    } else if t >= cfg.cycle_max {
        Verdict::CapReached
    } else {
        Verdict::Continue
    };
    (mu, delta, verdict)
}

/// Which estimator a run settled on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EstimatorKind {
    Simple,
    Cutoff,
}

/// Outcome of one sampling run.
#[derive(Debug, Clone)]
pub struct SamplerRun {
    pub hypothesis: Hypothesis,
    /// Final running mean `P(N)`: the likelihood estimate.
    pub likelihood: f64,
    /// Total cycles `N`.
    pub cycles: usize,
    pub verdict: Verdict,
    pub estimator: EstimatorKind,
    pub trace: SamplerTrace,
    /// Post-burn-in state occupancy per unknown variable.
    pub frequencies: BTreeMap<VarId, Vec<u64>>,
    /// Cycles counted into `frequencies`.
    pub frequency_cycles: usize,
    /// Terms dropped by the cut-off thresholds (zero for the simple
    /// estimator).
    pub dropped_terms: usize,
}

impl SamplerRun {
    pub fn converged(&self) -> bool {
        self.verdict.is_converged()
    }
}

/// Do any two evidence nodes share a state-unknown ancestor?
fn evidence_shares_unknown_ancestor(g: &Graph, evidence: &Evidence) -> bool {
    let nodes: Vec<VarId> = evidence.iter().map(|(v, _)| v).collect();
    let ancestor_sets: Vec<BTreeSet<VarId>> = nodes
        .iter()
        .map(|&e| {
            g.ancestors(e)
                .into_iter()
                .filter(|&a| {
                    g.variable(a).unwrap().kind == VarKind::X
                        && known_state(g, evidence, a).is_none()
                })
                .collect()
        })
        .collect();
    for i in 0..ancestor_sets.len() {
        for j in i + 1..ancestor_sets.len() {
            if !ancestor_sets[i].is_disjoint(&ancestor_sets[j]) {
                return true;
            }
        }
    }
    false
}

/// Run the sampler to convergence or the cycle cap. Fully deterministic
/// given the seed.
pub fn run(
    g: &Graph,
    evidence: &Evidence,
    hypothesis: Hypothesis,
    cfg: &SamplerConfig,
) -> Result<SamplerRun, SamplingError> {
    cfg.validate()?;
    let c = cfg.tail_quantile();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    let estimator = match cfg.estimator {
        EstimatorChoice::Simple => EstimatorKind::Simple,
        EstimatorChoice::Cutoff => EstimatorKind::Cutoff,
        EstimatorChoice::Auto => {
            if evidence.len() > 1 && evidence_shares_unknown_ancestor(g, evidence) {
                EstimatorKind::Cutoff
            } else {
                EstimatorKind::Simple
            }
        }
    };
    let cutoff = match estimator {
        EstimatorKind::Cutoff => Some(build_cutoff_expression(
            g,
            evidence,
            hypothesis,
            cfg.ig_layer,
            cfg.ig_x,
        )),
        EstimatorKind::Simple => None,
    };

    let mut assignment = init_assignment(g, evidence, &mut rng);
    let mut frequencies: BTreeMap<VarId, Vec<u64>> = assignment
        .iter()
        .map(|(v, _)| (v, vec![0; g.variable(v).unwrap().state_count]))
        .collect();
    let mut frequency_cycles = 0usize;

    let mut trace = SamplerTrace::default();
    let mut running_means: Vec<f64> = Vec::new();
    let mut running_sum = 0.0;

    let mut t = 0usize;
    let verdict = loop {
        t += 1;
        resample_cycle(g, hypothesis, evidence, &mut assignment, &mut rng)?;
        let p_t = match &cutoff {
            Some(cut) => cycle_likelihood_cutoff(cut, &assignment)?,
            None => cycle_likelihood_simple(g, evidence, hypothesis, &assignment)?,
        };
        running_sum += p_t;
        let running_mean = running_sum / t as f64;
        running_means.push(running_mean);

        if t > cfg.burn_in {
            frequency_cycles += 1;
            for (v, s) in assignment.iter() {
                frequencies.get_mut(&v).unwrap()[s] += 1;
            }
        }

        let (window_mean, window_std, verdict) = if t >= cfg.burn_in + cfg.window {
            halting_check(&running_means, cfg, c)
        } else {
            (0.0, 0.0, Verdict::Continue)
        };
        trace.rows.push(TraceRow {
            t,
            p_t,
            running_mean,
            window_mean,
            window_std,
            verdict,
        });
        if verdict != Verdict::Continue {
            break verdict;
        }
    };

    Ok(SamplerRun {
        hypothesis,
        likelihood: *running_means.last().unwrap(),
        cycles: t,
        verdict,
        estimator,
        trace,
        frequencies,
        frequency_cycles,
        dropped_terms: cutoff.map_or(0, |c| c.dropped_terms),
    })
}
