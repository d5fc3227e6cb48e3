//! Ground-truth inference by enumeration over unknown-state assignments,
//! plus the linear marginal propagation that is exact for ancestral
//! marginals, and posterior computation over a hypothesis set.

use std::collections::BTreeMap;

use crate::graph::{Evidence, Graph, StateIdx, VarId, VarKind};

/// One candidate root cause: a `(variable, state)` pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Hypothesis {
    pub var: VarId,
    pub state: StateIdx,
}

impl Hypothesis {
    pub fn new(var: VarId, state: StateIdx) -> Self {
        Hypothesis { var, state }
    }
}

impl std::fmt::Display for Hypothesis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "B({},{})", self.var, self.state)
    }
}

/// Likelihood, joint and posterior for one hypothesis.
#[derive(Debug, Clone, PartialEq)]
pub struct HypothesisResult {
    pub hypothesis: Hypothesis,
    /// `Pr{E | B_kj}`.
    pub likelihood: f64,
    /// `Pr{B_kj, E} = likelihood * b_kj`.
    pub joint: f64,
    /// `Pr{B_kj | E}` after normalization over the hypothesis set.
    pub posterior: f64,
}

#[derive(Debug, Clone, thiserror::Error, PartialEq)]
pub enum ExactError {
    #[error("enumeration infeasible: joint state space {states:.3e} exceeds cap {cap:.3e}")]
    Infeasible { states: f64, cap: f64 },
    #[error("missing state for parent {parent} of variable {child}")]
    MissingParentState { child: VarId, parent: VarId },
    #[error("variable {id} is not X-kind")]
    NotEffect { id: VarId },
    #[error("evidence impossible under all hypotheses")]
    EvidenceImpossible,
}

/// Default cap on the joint state space of unknown variables.
pub const DEFAULT_ENUMERATION_CAP: f64 = 1e8;

/// The state a variable carries into inference: evidence first, then any
/// observation recorded on the variable itself.
pub fn known_state(g: &Graph, evidence: &Evidence, var: VarId) -> Option<StateIdx> {
    evidence
        .get(var)
        .or_else(|| g.variable(var).and_then(|v| v.observed_state))
}

/// The weighted-OR conditional distribution of an effect variable given the
/// states of all its parents: the r-weighted mixture of per-parent matrix
/// columns. Always sums to 1 for a valid graph.
pub fn conditional_distribution(
    g: &Graph,
    var: VarId,
    parent_states: &BTreeMap<VarId, StateIdx>,
) -> Result<Vec<f64>, ExactError> {
    let v = g.variable(var).ok_or(ExactError::NotEffect { id: var })?;
    if v.kind != VarKind::X {
        return Err(ExactError::NotEffect { id: var });
    }
    let mut dist = vec![0.0; v.state_count];
    let r_total = g.r_total(var);
    for link in g.parents(var) {
        let parent = g.variable(link.parent_id).expect("validated link");
        let j = match parent.kind {
            VarKind::D => 0,
            _ => parent_states.get(&link.parent_id).copied().ok_or(
                ExactError::MissingParentState {
                    child: var,
                    parent: link.parent_id,
                },
            )?,
        };
        let w = link.r_weight / r_total;
        for (k, a) in link.column(j).enumerate() {
            dist[k] += w * a;
        }
    }
    Ok(dist)
}

/// Exact `Pr{E | B_kj}` by summing over every joint assignment of the
/// unknown X variables, with the cap of [`DEFAULT_ENUMERATION_CAP`] on the
/// assignment space.
pub fn enumerate_likelihood(
    g: &Graph,
    evidence: &Evidence,
    hypothesis: Hypothesis,
) -> Result<f64, ExactError> {
    enumerate_likelihood_capped(g, evidence, hypothesis, DEFAULT_ENUMERATION_CAP)
}

/// [`enumerate_likelihood`] with an explicit feasibility cap, so benchmarks
/// can deliberately exceed the default.
pub fn enumerate_likelihood_capped(
    g: &Graph,
    evidence: &Evidence,
    hypothesis: Hypothesis,
    cap: f64,
) -> Result<f64, ExactError> {
    let order = g.topological_order().expect("graph is acyclic");
    let unknowns: Vec<VarId> = order
        .iter()
        .copied()
        .filter(|&v| {
            g.variable(v).unwrap().kind == VarKind::X && known_state(g, evidence, v).is_none()
        })
        .collect();

    let states: f64 = unknowns
        .iter()
        .map(|&v| g.variable(v).unwrap().state_count as f64)
        .product();
    if states > cap {
        return Err(ExactError::Infeasible { states, cap });
    }

    // Factor schedule: a known variable's conditional probability enters the
    // running product as soon as its last unknown parent is assigned.
    let unknown_pos: BTreeMap<VarId, usize> = unknowns
        .iter()
        .enumerate()
        .map(|(i, &v)| (v, i + 1))
        .collect();
    let known_vars: Vec<VarId> = order
        .iter()
        .copied()
        .filter(|&v| {
            g.variable(v).unwrap().kind == VarKind::X && known_state(g, evidence, v).is_some()
        })
        .collect();
    let mut ready_at: Vec<Vec<VarId>> = vec![Vec::new(); unknowns.len() + 1];
    for &v in &known_vars {
        let depth = g
            .parents(v)
            .filter_map(|l| unknown_pos.get(&l.parent_id))
            .copied()
            .max()
            .unwrap_or(0);
        ready_at[depth].push(v);
    }

    let mut assignment: BTreeMap<VarId, StateIdx> = BTreeMap::new();
    assignment.insert(hypothesis.var, hypothesis.state);
    for (v, s) in evidence.iter() {
        assignment.insert(v, s);
    }
    for v in g.variables() {
        if v.kind == VarKind::X {
            if let Some(s) = v.observed_state {
                assignment.entry(v.id).or_insert(s);
            }
        }
    }

    fn recurse(
        g: &Graph,
        unknowns: &[VarId],
        ready_at: &[Vec<VarId>],
        assignment: &mut BTreeMap<VarId, StateIdx>,
        depth: usize,
        acc: f64,
    ) -> Result<f64, ExactError> {
        let mut acc = acc;
        for &v in &ready_at[depth] {
            let dist = conditional_distribution(g, v, assignment)?;
            acc *= dist[assignment[&v]];
        }
        if acc == 0.0 && depth < unknowns.len() {
            // no support below this branch
            return Ok(0.0);
        }
        if depth == unknowns.len() {
            return Ok(acc);
        }
        let v = unknowns[depth];
        let dist = conditional_distribution(g, v, assignment)?;
        let mut total = 0.0;
        for (s, &p) in dist.iter().enumerate() {
            if p == 0.0 {
                continue;
            }
            assignment.insert(v, s);
            total += recurse(g, unknowns, ready_at, assignment, depth + 1, acc * p)?;
        }
        assignment.remove(&v);
        Ok(total)
    }

    recurse(g, &unknowns, &ready_at, &mut assignment, 0, 1.0)
}

/// Per-variable marginals `Pr{X_n = s | B_kj}` by propagating the weighted-OR
/// map in topological order. Exact because the conditional distribution is
/// linear in the parent state indicators. Evidence is not conditioned on:
/// these are ancestral marginals given the hypothesis alone.
pub fn marginal_propagation(g: &Graph, hypothesis: Hypothesis) -> BTreeMap<VarId, Vec<f64>> {
    let order = g.topological_order().expect("graph is acyclic");
    let mut marginals: BTreeMap<VarId, Vec<f64>> = BTreeMap::new();
    for v in order {
        let var = g.variable(v).unwrap();
        let marg = match var.kind {
            VarKind::B => {
                if v == hypothesis.var {
                    let mut m = vec![0.0; var.state_count];
                    m[hypothesis.state] = 1.0;
                    m
                } else {
                    var.prior.clone().unwrap()
                }
            }
            VarKind::D => vec![1.0],
            VarKind::X => {
                let mut m = vec![0.0; var.state_count];
                let r_total = g.r_total(v);
                for link in g.parents(v) {
                    let w = link.r_weight / r_total;
                    let pm = &marginals[&link.parent_id];
                    for (k, row) in link.matrix.iter().enumerate() {
                        m[k] += w * row.iter().zip(pm).map(|(a, p)| a * p).sum::<f64>();
                    }
                }
                m
            }
        };
        marginals.insert(v, marg);
    }
    marginals
}

/// Normalize `(hypothesis, likelihood)` pairs into posteriors using the
/// hypothesis priors recorded in the graph.
pub fn posterior(
    g: &Graph,
    likelihoods: &[(Hypothesis, f64)],
) -> Result<Vec<HypothesisResult>, ExactError> {
    let joints: Vec<f64> = likelihoods
        .iter()
        .map(|&(h, lik)| {
            let b = g
                .variable(h.var)
                .and_then(|v| v.prior.as_ref())
                .map(|p| p[h.state])
                .unwrap_or(0.0);
            lik * b
        })
        .collect();
    let total: f64 = joints.iter().sum();
    if total <= 0.0 {
        return Err(ExactError::EvidenceImpossible);
    }
    Ok(likelihoods
        .iter()
        .zip(joints)
        .map(|(&(hypothesis, likelihood), joint)| HypothesisResult {
            hypothesis,
            likelihood,
            joint,
            posterior: joint / total,
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{CausalLink, Variable};

    fn link(child: VarId, parent: VarId, r: f64, matrix: Vec<Vec<f64>>) -> CausalLink {
        CausalLink {
            child_id: child,
            parent_id: parent,
            r_weight: r,
            matrix,
        }
    }

    #[test]
    fn mixture_of_one_hot_columns() {
        // Two parents, r = 1 each, selected columns (1,0) and (0,1).
        let g = Graph::new(
            vec![
                Variable::root(0, vec![1.0, 0.0]),
                Variable::effect(1, 2),
                Variable::effect(2, 2),
                Variable::effect(3, 2),
            ],
            vec![
                link(1, 0, 1.0, vec![vec![0.5, 0.5], vec![0.5, 0.5]]),
                link(2, 0, 1.0, vec![vec![0.5, 0.5], vec![0.5, 0.5]]),
                link(3, 1, 1.0, vec![vec![1.0, 0.0], vec![0.0, 1.0]]),
                link(3, 2, 1.0, vec![vec![0.0, 1.0], vec![1.0, 0.0]]),
            ],
        )
        .unwrap();
        let states = BTreeMap::from([(1, 0), (2, 0)]);
        let dist = conditional_distribution(&g, 3, &states).unwrap();
        assert!((dist[0] - 0.5).abs() < 1e-12);
        assert!((dist[1] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn single_parent_column_passthrough() {
        let g = Graph::new(
            vec![Variable::root(0, vec![1.0, 0.0]), Variable::effect(1, 2)],
            vec![link(1, 0, 1.0, vec![vec![0.3, 0.6], vec![0.7, 0.4]])],
        )
        .unwrap();
        let dist = conditional_distribution(&g, 1, &BTreeMap::from([(0, 0)])).unwrap();
        assert_eq!(dist, vec![0.3, 0.7]);
    }

    #[test]
    fn fixture_mixture_with_all_parents_low() {
        // X7 given X4 = X5 = X6 = 0: the mean of the three first columns
        let m = crate::generators::compact_fixture();
        let states = BTreeMap::from([(4, 0), (5, 0), (6, 0)]);
        let dist = conditional_distribution(&m.graph, 7, &states).unwrap();
        assert!((dist[0] - (0.0100 + 0.4660 + 0.4990) / 3.0).abs() < 1e-12);
        assert!((dist[1] - 0.675).abs() < 1e-12);
    }

    #[test]
    fn fixture_first_hop_marginal_is_a_column() {
        let m = crate::generators::compact_fixture();
        let marg = marginal_propagation(&m.graph, Hypothesis::new(1, 1));
        assert_eq!(marg[&2], vec![0.2490, 0.4200, 0.3310]);
    }

    #[test]
    fn missing_parent_state_errors() {
        let g = Graph::new(
            vec![Variable::root(0, vec![1.0, 0.0]), Variable::effect(1, 2)],
            vec![link(1, 0, 1.0, vec![vec![0.3, 0.6], vec![0.7, 0.4]])],
        )
        .unwrap();
        assert!(matches!(
            conditional_distribution(&g, 1, &BTreeMap::new()),
            Err(ExactError::MissingParentState {
                child: 1,
                parent: 0
            })
        ));
    }

    #[test]
    fn chain_likelihood_is_column_entry() {
        let g = Graph::new(
            vec![Variable::root(0, vec![0.5, 0.5]), Variable::effect(1, 2)],
            vec![link(1, 0, 1.0, vec![vec![0.3, 0.6], vec![0.7, 0.4]])],
        )
        .unwrap();
        let e = Evidence::from_pairs([(1, 1)]);
        let lik = enumerate_likelihood(&g, &e, Hypothesis::new(0, 0)).unwrap();
        assert!((lik - 0.7).abs() < 1e-12);
    }

    #[test]
    fn cap_is_enforced() {
        let mut vars = vec![Variable::root(0, vec![0.5, 0.5])];
        let mut links = Vec::new();
        for v in 1..=4 {
            vars.push(Variable::effect(v, 2));
            links.push(link(v, 0, 1.0, vec![vec![0.5, 0.5], vec![0.5, 0.5]]));
        }
        vars.push(Variable::effect(9, 2));
        for v in 1..=4 {
            links.push(link(9, v, 1.0, vec![vec![0.5, 0.5], vec![0.5, 0.5]]));
        }
        let g = Graph::new(vars, links).unwrap();
        let e = Evidence::from_pairs([(9, 1)]);
        let err = enumerate_likelihood_capped(&g, &e, Hypothesis::new(0, 0), 8.0).unwrap_err();
        assert!(matches!(err, ExactError::Infeasible { .. }));
    }

    #[test]
    fn marginal_chain_propagates_columns() {
        let g = Graph::new(
            vec![
                Variable::root(0, vec![0.5, 0.5]),
                Variable::effect(1, 2),
                Variable::effect(2, 2),
            ],
            vec![
                link(1, 0, 1.0, vec![vec![0.3, 0.6], vec![0.7, 0.4]]),
                link(2, 1, 1.0, vec![vec![1.0, 0.0], vec![0.0, 1.0]]),
            ],
        )
        .unwrap();
        let m = marginal_propagation(&g, Hypothesis::new(0, 0));
        assert!((m[&2][0] - 0.3).abs() < 1e-12);
        assert!((m[&2][1] - 0.7).abs() < 1e-12);
    }

    #[test]
    fn single_evidence_marginal_equals_enumeration() {
        let g = Graph::new(
            vec![
                Variable::root(0, vec![0.5, 0.5]),
                Variable::effect(1, 2),
                Variable::effect(2, 2),
            ],
            vec![
                link(1, 0, 1.0, vec![vec![0.3, 0.6], vec![0.7, 0.4]]),
                link(2, 1, 1.0, vec![vec![0.8, 0.1], vec![0.2, 0.9]]),
            ],
        )
        .unwrap();
        let e = Evidence::from_pairs([(2, 1)]);
        let h = Hypothesis::new(0, 1);
        let lik = enumerate_likelihood(&g, &e, h).unwrap();
        let m = marginal_propagation(&g, h);
        assert!((lik - m[&2][1]).abs() < 1e-12);
    }

    #[test]
    fn posterior_cases() {
        let g = Graph::new(
            vec![Variable::root(0, vec![0.5, 0.5]), Variable::effect(1, 2)],
            vec![link(1, 0, 1.0, vec![vec![0.3, 0.6], vec![0.7, 0.4]])],
        )
        .unwrap();
        // single hypothesis
        let r = posterior(&g, &[(Hypothesis::new(0, 0), 0.2)]).unwrap();
        assert_eq!(r[0].posterior, 1.0);
        // symmetric joints
        let r = posterior(
            &g,
            &[(Hypothesis::new(0, 0), 0.04), (Hypothesis::new(0, 1), 0.04)],
        )
        .unwrap();
        assert_eq!(r[0].posterior, 0.5);
        // 3:1 joints
        let r = posterior(
            &g,
            &[(Hypothesis::new(0, 0), 0.06), (Hypothesis::new(0, 1), 0.02)],
        )
        .unwrap();
        assert!((r[0].posterior - 0.75).abs() < 1e-12);
        assert!((r[1].posterior - 0.25).abs() < 1e-12);
        // joint = likelihood * prior
        assert!((r[0].joint - 0.03).abs() < 1e-15);
    }

    #[test]
    fn all_zero_joints_error() {
        let g = Graph::new(
            vec![Variable::root(0, vec![0.5, 0.5]), Variable::effect(1, 2)],
            vec![link(1, 0, 1.0, vec![vec![0.3, 0.6], vec![0.7, 0.4]])],
        )
        .unwrap();
        assert!(matches!(
            posterior(&g, &[(Hypothesis::new(0, 0), 0.0)]),
            Err(ExactError::EvidenceImpossible)
        ));
    }
}
