//! Layer-by-layer exact inference.
//!
//! Every evidence node contributes one factor: its expansion down through
//! state-unknown intermediates, stopping at other evidence nodes (whose
//! observed states substitute numerically) and at root causes. Factors are
//! built as nested sum-of-product trees, so their size is the size the
//! expansion actually has before distribution; multiplying the flattened
//! factors under the absorption rules recovers the exact joint expansion,
//! because shared unknown ancestors couple through their tied sums and
//! conflicting mechanism selections annihilate.
//!
//! The single-shot variant expands straight through observed parents
//! instead of stopping at them, which re-embeds every downstream expansion
//! and is what the layered algorithm avoids; both evaluate to the same
//! likelihood, the single-shot intermediates are just bigger.

use std::collections::{BTreeMap, BTreeSet};

use crate::algebra::{evaluate_with, Literal, StateRef, SymbolicExpr, Term};
use crate::exact::{known_state, Hypothesis};
use crate::graph::{Evidence, Graph, VarId, VarKind};

/// Default cap on intermediate term counts; exceeding it signals the caller
/// to fall back to the sampling engine.
pub const DEFAULT_TERM_CAP: usize = 1_000_000;

#[derive(Debug, Clone, thiserror::Error, PartialEq)]
pub enum RecursiveError {
    #[error("assumptions not satisfied; use recursive_general or sampling")]
    AssumptionsNotSatisfied,
    #[error("recursion infeasible: intermediate expression has {terms} terms (cap {cap})")]
    RecursionInfeasible { terms: usize, cap: usize },
}

/// Evidence partitioned by layer, with the directly linked ancestor
/// evidence/B nodes of each layer and the applicability flags for the
/// closed-form layered products.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerPlan {
    /// `E(l)`: evidence variables grouped by layer index.
    pub evidence_layers: BTreeMap<usize, Vec<VarId>>,
    /// `AEB(l)`: parents of layer-l evidence that are evidence or B/D nodes.
    pub aeb: BTreeMap<usize, BTreeSet<VarId>>,
    /// Every parent of every `E(l)` member is evidence in layer `l-1` or the
    /// hypothesis root.
    pub chain_form_applicable: bool,
    /// Every parent of every evidence node is itself evidence or B/D.
    pub closed_form_applicable: bool,
}

/// Partition the evidence by layer and test the layered-product assumptions.
pub fn plan(g: &Graph, evidence: &Evidence, hypothesis: Hypothesis) -> LayerPlan {
    let layers = g.layer_assignment();
    let mut evidence_layers: BTreeMap<usize, Vec<VarId>> = BTreeMap::new();
    for (v, _) in evidence.iter() {
        evidence_layers.entry(layers[&v]).or_default().push(v);
    }

    let is_known = |v: VarId| known_state(g, evidence, v).is_some();
    let mut aeb: BTreeMap<usize, BTreeSet<VarId>> = BTreeMap::new();
    let mut chain_form = true;
    let mut closed_form = true;
    for (&layer, members) in &evidence_layers {
        let entry = aeb.entry(layer).or_default();
        for &v in members {
            for link in g.parents(v) {
                let p = link.parent_id;
                let kind = g.variable(p).unwrap().kind;
                let parent_ok = match kind {
                    VarKind::B | VarKind::D => true,
                    VarKind::X => is_known(p),
                };
                if parent_ok {
                    entry.insert(p);
                } else {
                    closed_form = false;
                }
                let in_previous = kind == VarKind::X
                    && is_known(p)
                    && layers[&p] + 1 == layer
                    && evidence_layers
                        .get(&layers[&p])
                        .is_some_and(|m| m.contains(&p));
                if !(in_previous || p == hypothesis.var) {
                    chain_form = false;
                }
            }
        }
    }
    LayerPlan {
        evidence_layers,
        aeb,
        chain_form_applicable: chain_form,
        closed_form_applicable: closed_form,
    }
}

/// The closed-form layered product: for every evidence node, sum the
/// link factors `f = (r/r_n)·a` over its directly linked ancestor
/// evidence/B/D parents at their known states. Requires `closed_form_applicable`.
pub fn likelihood_layered(
    g: &Graph,
    evidence: &Evidence,
    hypothesis: Hypothesis,
    plan: &LayerPlan,
) -> Result<f64, RecursiveError> {
    if !plan.closed_form_applicable {
        return Err(RecursiveError::AssumptionsNotSatisfied);
    }
    let mut product = 1.0;
    for members in plan.evidence_layers.values() {
        for &n in members {
            let k = known_state(g, evidence, n).expect("evidence member");
            let mut factor = 0.0;
            for link in g.parents(n) {
                let p = link.parent_id;
                let w = g.link_weight(n, p).unwrap();
                let parent = g.variable(p).unwrap();
                factor += match parent.kind {
                    VarKind::D => w * link.matrix[k][0],
                    VarKind::B => {
                        if p == hypothesis.var {
                            w * link.matrix[k][hypothesis.state]
                        } else {
                            // other roots stay prior-weighted
                            let prior = parent.prior.as_ref().unwrap();
                            w * link.column_weighted(prior).nth(k).unwrap()
                        }
                    }
                    VarKind::X => {
                        let s = known_state(g, evidence, p).expect("closed_form guarantees known");
                        w * link.matrix[k][s]
                    }
                };
            }
            product *= factor;
        }
    }
    Ok(product)
}

/// How a factor treats observed parents during expansion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Mode {
    /// Stop at evidence: its state substitutes numerically.
    Layered,
    /// Expand straight through evidence down to the roots.
    SingleShot,
}

/// Nested expansion of one evidence node; kept as a tree so its size can be
/// measured before distribution.
#[derive(Debug, Clone)]
enum FactorTree {
    Atom(Literal),
    Product(Vec<FactorTree>),
    Sum(Vec<FactorTree>),
}

impl FactorTree {
    fn a_literal_count(&self) -> usize {
        match self {
            FactorTree::Atom(l) => matches!(l, Literal::A { .. }) as usize,
            FactorTree::Product(v) | FactorTree::Sum(v) => {
                v.iter().map(FactorTree::a_literal_count).sum()
            }
        }
    }

    fn flatten(&self) -> SymbolicExpr {
        match self {
            FactorTree::Atom(l) => SymbolicExpr::from_terms([Term::from_literal(*l)]),
            FactorTree::Product(v) => v
                .iter()
                .map(FactorTree::flatten)
                .fold(SymbolicExpr::unit(), |acc, e| acc.multiply(&e)),
            FactorTree::Sum(v) => v
                .iter()
                .map(FactorTree::flatten)
                .fold(SymbolicExpr::zero(), |acc, e| acc.add(&e)),
        }
    }
}

fn build_factor(
    g: &Graph,
    evidence: &Evidence,
    hypothesis: Hypothesis,
    var: VarId,
    child_state: StateRef,
    mode: Mode,
) -> FactorTree {
    let mut branches = Vec::new();
    for link in g.parents(var) {
        let p = link.parent_id;
        let parent = g.variable(p).unwrap();
        let atom = |parent_state| {
            FactorTree::Atom(Literal::A {
                child: var,
                child_state,
                parent: p,
                parent_state,
            })
        };
        match parent.kind {
            VarKind::D => branches.push(FactorTree::Product(vec![
                atom(StateRef::Fixed(0)),
                FactorTree::Atom(Literal::D { var: p }),
            ])),
            VarKind::B => {
                if p == hypothesis.var {
                    branches.push(FactorTree::Product(vec![
                        atom(StateRef::Fixed(hypothesis.state)),
                        FactorTree::Atom(Literal::B {
                            var: p,
                            state: hypothesis.state,
                        }),
                    ]));
                } else {
                    for j in 0..parent.state_count {
                        branches.push(FactorTree::Product(vec![
                            atom(StateRef::Fixed(j)),
                            FactorTree::Atom(Literal::B { var: p, state: j }),
                        ]));
                    }
                }
            }
            VarKind::X => match known_state(g, evidence, p) {
                Some(obs) => match mode {
                    Mode::Layered => branches.push(atom(StateRef::Fixed(obs))),
                    Mode::SingleShot => branches.push(FactorTree::Product(vec![
                        atom(StateRef::Fixed(obs)),
                        build_factor(g, evidence, hypothesis, p, StateRef::Fixed(obs), mode),
                    ])),
                },
                None => branches.push(FactorTree::Product(vec![
                    atom(StateRef::Tied),
                    build_factor(g, evidence, hypothesis, p, StateRef::Tied, mode),
                ])),
            },
        }
    }
    FactorTree::Sum(branches)
}

/// Size and shape of one engine run's symbolic work.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExpansionMetrics {
    /// Total functional literals across the per-evidence factor expansions.
    pub a_literal_count: usize,
    /// Per evidence node, deepest layer first.
    pub per_factor: Vec<(VarId, usize)>,
    /// Terms in the final expression after absorption.
    pub final_terms: usize,
}

#[derive(Debug, Clone)]
pub struct RecursiveOutcome {
    pub likelihood: f64,
    pub expression: SymbolicExpr,
    pub metrics: ExpansionMetrics,
}

/// Exact likelihood through layered factor expansion; see the module docs.
/// Uses [`DEFAULT_TERM_CAP`].
pub fn recursive_general(
    g: &Graph,
    evidence: &Evidence,
    hypothesis: Hypothesis,
    plan: &LayerPlan,
) -> Result<RecursiveOutcome, RecursiveError> {
    expand_product(
        g,
        evidence,
        hypothesis,
        plan,
        Mode::Layered,
        DEFAULT_TERM_CAP,
    )
}

/// [`recursive_general`] with an explicit intermediate term cap.
pub fn recursive_general_capped(
    g: &Graph,
    evidence: &Evidence,
    hypothesis: Hypothesis,
    plan: &LayerPlan,
    term_cap: usize,
) -> Result<RecursiveOutcome, RecursiveError> {
    expand_product(g, evidence, hypothesis, plan, Mode::Layered, term_cap)
}

/// The single-shot full expansion: every evidence node expanded through its
/// observed parents down to the roots, then multiplied. Same likelihood as
/// [`recursive_general`], measurably larger intermediates.
pub fn single_shot_expansion(
    g: &Graph,
    evidence: &Evidence,
    hypothesis: Hypothesis,
    plan: &LayerPlan,
) -> Result<RecursiveOutcome, RecursiveError> {
    expand_product(
        g,
        evidence,
        hypothesis,
        plan,
        Mode::SingleShot,
        DEFAULT_TERM_CAP,
    )
}

fn expand_product(
    g: &Graph,
    evidence: &Evidence,
    hypothesis: Hypothesis,
    plan: &LayerPlan,
    mode: Mode,
    term_cap: usize,
) -> Result<RecursiveOutcome, RecursiveError> {
    // Deepest layer first, mirroring the per-layer recursion.
    let mut factors: Vec<(VarId, FactorTree)> = Vec::new();
    for (_, members) in plan.evidence_layers.iter().rev() {
        for &v in members {
            let obs = known_state(g, evidence, v).expect("evidence member");
            factors.push((
                v,
                build_factor(g, evidence, hypothesis, v, StateRef::Fixed(obs), mode),
            ));
        }
    }

    let per_factor: Vec<(VarId, usize)> = factors
        .iter()
        .map(|(v, t)| (*v, t.a_literal_count()))
        .collect();
    let a_literal_count = per_factor.iter().map(|(_, c)| c).sum();

    let mut expression = SymbolicExpr::unit();
    for (_, tree) in &factors {
        let flat = tree.flatten();
        if flat.len() > term_cap {
            return Err(RecursiveError::RecursionInfeasible {
                terms: flat.len(),
                cap: term_cap,
            });
        }
        expression = expression.multiply(&flat);
        if expression.len() > term_cap {
            return Err(RecursiveError::RecursionInfeasible {
                terms: expression.len(),
                cap: term_cap,
            });
        }
    }

    let likelihood = evaluate_with(&expression, g, &BTreeMap::new(), |var, state| {
        if var == hypothesis.var {
            (state == hypothesis.state) as u8 as f64
        } else {
            g.variable(var)
                .and_then(|v| v.prior.as_ref())
                .map(|p| p[state])
                .unwrap_or(0.0)
        }
    })
    .expect("factor expansion leaves no unbound X literals");

    let final_terms = expression.len();
    Ok(RecursiveOutcome {
        likelihood,
        expression,
        metrics: ExpansionMetrics {
            a_literal_count,
            per_factor,
            final_terms,
        },
    })
}

impl crate::graph::CausalLink {
    /// Child distribution under a parent-state distribution: the matrix
    /// applied to `weights`.
    fn column_weighted<'a>(&'a self, weights: &'a [f64]) -> impl Iterator<Item = f64> + 'a {
        self.matrix
            .iter()
            .map(move |row| row.iter().zip(weights).map(|(a, w)| a * w).sum())
    }
}
