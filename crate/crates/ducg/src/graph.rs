//! The DUCG data model: variables, weighted causal links, evidence, and the
//! structural operations every engine builds on (validation, hypothesis
//! restriction, layer assignment).
//!
//! A graph is a DAG over three kinds of variables. `B` variables are root
//! causes carrying a prior over their states; `X` variables are effects whose
//! conditional distribution is the r-weighted mixture of per-parent matrix
//! columns; `D` variables are default causes with a single state of
//! probability one. Each directed link `parent -> child` carries an intensity
//! `r > 0` and a column-stochastic matrix `A` with one column per parent
//! state and one row per child state.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

/// Variable identifier. Ids are preserved verbatim from graph documents.
pub type VarId = u32;

/// A state index of a variable.
pub type StateIdx = usize;

/// Tolerance for column-stochasticity and prior-sum checks.
pub const PROB_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum VarKind {
    /// Root cause with a prior over states.
    B,
    /// Effect variable; observed members form the evidence.
    X,
    /// Default/unknown cause with one state of probability 1.
    D,
}

impl fmt::Display for VarKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VarKind::B => write!(f, "B"),
            VarKind::X => write!(f, "X"),
            VarKind::D => write!(f, "D"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Variable {
    pub id: VarId,
    pub kind: VarKind,
    pub state_count: usize,
    /// Prior probabilities `b_kj`, present iff `kind == B`.
    pub prior: Option<Vec<f64>>,
    /// Observed state, if any. Only meaningful for X variables.
    pub observed_state: Option<StateIdx>,
}

impl Variable {
    pub fn root(id: VarId, prior: Vec<f64>) -> Self {
        Variable {
            id,
            kind: VarKind::B,
            state_count: prior.len(),
            prior: Some(prior),
            observed_state: None,
        }
    }

    pub fn effect(id: VarId, state_count: usize) -> Self {
        Variable {
            id,
            kind: VarKind::X,
            state_count,
            prior: None,
            observed_state: None,
        }
    }

    pub fn default_cause(id: VarId) -> Self {
        Variable {
            id,
            kind: VarKind::D,
            state_count: 1,
            prior: None,
            observed_state: None,
        }
    }
}

/// A weighted functional link `parent -> child`.
///
/// `matrix[k][j]` is the probability that the link drives the child into
/// state `k` when the parent is in state `j`; every column sums to 1. The
/// mixture weight of the link is `r / r_child` where `r_child` sums the
/// intensities of all links into the child.
#[derive(Debug, Clone, PartialEq)]
pub struct CausalLink {
    pub child_id: VarId,
    pub parent_id: VarId,
    pub r_weight: f64,
    pub matrix: Vec<Vec<f64>>,
}

impl CausalLink {
    /// Column `j` of the matrix: the child distribution caused by parent state `j`.
    pub fn column(&self, j: StateIdx) -> impl Iterator<Item = f64> + '_ {
        self.matrix.iter().map(move |row| row[j])
    }
}

/// Observed evidence: a map from X-variable id to its observed state.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Evidence {
    assignments: BTreeMap<VarId, StateIdx>,
}

impl Evidence {
    pub fn new() -> Self {
        Evidence::default()
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (VarId, StateIdx)>) -> Self {
        Evidence {
            assignments: pairs.into_iter().collect(),
        }
    }

    pub fn set(&mut self, var: VarId, state: StateIdx) {
        self.assignments.insert(var, state);
    }

    pub fn get(&self, var: VarId) -> Option<StateIdx> {
        self.assignments.get(&var).copied()
    }

    pub fn contains(&self, var: VarId) -> bool {
        self.assignments.contains_key(&var)
    }

    pub fn is_empty(&self) -> bool {
        self.assignments.is_empty()
    }

    pub fn len(&self) -> usize {
        self.assignments.len()
    }

    /// Iterate `(var, state)` pairs in ascending variable order.
    pub fn iter(&self) -> impl Iterator<Item = (VarId, StateIdx)> + '_ {
        self.assignments.iter().map(|(&v, &s)| (v, s))
    }

    /// Check evidence against a graph: X-kind referents, valid states,
    /// consistency with `Variable::observed_state` where both are set.
    pub fn check(&self, g: &Graph) -> Result<(), GraphError> {
        for (var, state) in self.iter() {
            let v = g
                .variable(var)
                .ok_or(GraphError::UnknownVariable { id: var })?;
            if v.kind != VarKind::X {
                return Err(GraphError::EvidenceNotEffect { id: var });
            }
            if state >= v.state_count {
                return Err(GraphError::StateOutOfRange {
                    id: var,
                    state,
                    state_count: v.state_count,
                });
            }
            if let Some(obs) = v.observed_state {
                if obs != state {
                    return Err(GraphError::EvidenceConflict {
                        id: var,
                        graph_state: obs,
                        evidence_state: state,
                    });
                }
            }
        }
        Ok(())
    }
}

impl FromIterator<(VarId, StateIdx)> for Evidence {
    fn from_iter<T: IntoIterator<Item = (VarId, StateIdx)>>(iter: T) -> Self {
        Evidence::from_pairs(iter)
    }
}

#[derive(Debug, Clone, thiserror::Error, PartialEq)]
pub enum GraphError {
    #[error("unknown variable {id}")]
    UnknownVariable { id: VarId },
    #[error("variable {id} is not X-kind and cannot carry evidence")]
    EvidenceNotEffect { id: VarId },
    #[error("state {state} out of range for variable {id} ({state_count} states)")]
    StateOutOfRange {
        id: VarId,
        state: StateIdx,
        state_count: usize,
    },
    #[error("evidence for variable {id} ({evidence_state}) conflicts with its recorded observation ({graph_state})")]
    EvidenceConflict {
        id: VarId,
        graph_state: StateIdx,
        evidence_state: StateIdx,
    },
    #[error("hypothesis variable {id} is not B-kind")]
    HypothesisNotRoot { id: VarId },
    #[error("hypothesis {id} has no directed path to any evidence node: disconnected hypothesis")]
    DisconnectedHypothesis { id: VarId },
    #[error("evidence node {id} is unreachable from the hypothesis and from every D node")]
    UnreachableEvidence { id: VarId },
    #[error("graph failed validation:\n{0}")]
    Invalid(ValidationReport),
}

/// One violated invariant, with enough context to locate it.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

/// The outcome of `validate`: empty iff every invariant holds.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    fn push(&mut self, message: String) {
        self.violations.push(Violation { message });
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in &self.violations {
            writeln!(f, "- {v}")?;
        }
        Ok(())
    }
}

/// An immutable DUCG. Construct with [`Graph::new`], which validates.
///
/// The graph is safe to share across concurrent engine runs; every operation
/// here is a pure function.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    variables: BTreeMap<VarId, Variable>,
    links: Vec<CausalLink>,
    /// Indices into `links`, grouped by child, ascending parent id.
    incoming: BTreeMap<VarId, Vec<usize>>,
    /// Sum of r-weights into each X variable (`r_n`).
    r_total: BTreeMap<VarId, f64>,
}

impl Graph {
    /// Build and validate a graph. Returns the full violation list on failure.
    pub fn new(
        variables: impl IntoIterator<Item = Variable>,
        links: Vec<CausalLink>,
    ) -> Result<Graph, GraphError> {
        let variables: BTreeMap<VarId, Variable> =
            variables.into_iter().map(|v| (v.id, v)).collect();
        let mut incoming: BTreeMap<VarId, Vec<usize>> = BTreeMap::new();
        for (i, link) in links.iter().enumerate() {
            incoming.entry(link.child_id).or_default().push(i);
        }
        for idx in incoming.values_mut() {
            idx.sort_by_key(|&i| links[i].parent_id);
        }
        let r_total = incoming
            .iter()
            .map(|(&child, idx)| (child, idx.iter().map(|&i| links[i].r_weight).sum()))
            .collect();
        let g = Graph {
            variables,
            links,
            incoming,
            r_total,
        };
        let report = g.validate();
        if report.is_ok() {
            Ok(g)
        } else {
            Err(GraphError::Invalid(report))
        }
    }

    pub fn variable(&self, id: VarId) -> Option<&Variable> {
        self.variables.get(&id)
    }

    /// Variables in ascending id order.
    pub fn variables(&self) -> impl Iterator<Item = &Variable> {
        self.variables.values()
    }

    pub fn links(&self) -> &[CausalLink] {
        &self.links
    }

    /// Incoming links of `child`, ascending parent id.
    pub fn parents(&self, child: VarId) -> impl Iterator<Item = &CausalLink> {
        self.incoming
            .get(&child)
            .into_iter()
            .flatten()
            .map(|&i| &self.links[i])
    }

    pub fn link(&self, child: VarId, parent: VarId) -> Option<&CausalLink> {
        self.parents(child).find(|l| l.parent_id == parent)
    }

    /// `r_n`: the total intensity into `child`.
    pub fn r_total(&self, child: VarId) -> f64 {
        self.r_total.get(&child).copied().unwrap_or(0.0)
    }

    /// The mixture weight `r_{n;i} / r_n` of the `(child, parent)` link.
    pub fn link_weight(&self, child: VarId, parent: VarId) -> Option<f64> {
        self.link(child, parent)
            .map(|l| l.r_weight / self.r_total(child))
    }

    /// Check every structural and numeric invariant; one entry per violation.
    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        for v in self.variables.values() {
            match v.kind {
                VarKind::B => match &v.prior {
                    None => report.push(format!("B variable {} has no prior", v.id)),
                    Some(p) => {
                        if p.len() != v.state_count {
                            report.push(format!(
                                "B variable {}: prior length {} != state count {}",
                                v.id,
                                p.len(),
                                v.state_count
                            ));
                        }
                        if p.iter().any(|&x| !(0.0..=1.0).contains(&x)) {
                            report.push(format!("B variable {}: prior entry outside [0, 1]", v.id));
                        }
                        let sum: f64 = p.iter().sum();
                        if sum > 1.0 + PROB_TOL {
                            report.push(format!("B variable {}: prior sums to {sum} > 1", v.id));
                        }
                    }
                },
                VarKind::X | VarKind::D => {
                    if v.prior.is_some() {
                        report.push(format!(
                            "{} variable {} must not carry a prior",
                            v.kind, v.id
                        ));
                    }
                }
            }
            if v.kind == VarKind::D && v.state_count != 1 {
                report.push(format!(
                    "D variable {} must have exactly 1 state, has {}",
                    v.id, v.state_count
                ));
            }
            if v.kind != VarKind::D && v.state_count < 2 {
                report.push(format!(
                    "variable {} must have at least 2 states, has {}",
                    v.id, v.state_count
                ));
            }
            if let Some(obs) = v.observed_state {
                if obs >= v.state_count {
                    report.push(format!(
                        "variable {}: observed state {} out of range ({} states)",
                        v.id, obs, v.state_count
                    ));
                }
            }
        }

        let mut seen_pairs = BTreeSet::new();
        for link in &self.links {
            let key = format!("link {}<-{}", link.child_id, link.parent_id);
            if !seen_pairs.insert((link.child_id, link.parent_id)) {
                report.push(format!("{key}: duplicate (child, parent) pair"));
            }
            let child = self.variables.get(&link.child_id);
            let parent = self.variables.get(&link.parent_id);
            if child.is_none() {
                report.push(format!("{key}: child {} does not exist", link.child_id));
            }
            if parent.is_none() {
                report.push(format!("{key}: parent {} does not exist", link.parent_id));
            }
            if let Some(c) = child {
                if c.kind != VarKind::X {
                    report.push(format!("{key}: child must be X-kind, is {}", c.kind));
                }
            }
            // negated form so NaN fails too
            #[allow(clippy::neg_cmp_op_on_partial_ord)]
            if !(link.r_weight > 0.0) {
                report.push(format!("{key}: r weight {} is not positive", link.r_weight));
            }
            let (rows, cols) = (child.map(|c| c.state_count), parent.map(|p| p.state_count));
            if let Some(rows) = rows {
                if link.matrix.len() != rows {
                    report.push(format!(
                        "{key}: matrix has {} rows, child has {} states",
                        link.matrix.len(),
                        rows
                    ));
                }
            }
            let width = link.matrix.first().map_or(0, |r| r.len());
            if link.matrix.iter().any(|r| r.len() != width) {
                report.push(format!("{key}: matrix rows have unequal lengths"));
            } else if let Some(cols) = cols {
                if width != cols {
                    report.push(format!(
                        "{key}: matrix has {width} columns, parent has {cols} states"
                    ));
                }
            }
            if link
                .matrix
                .iter()
                .flatten()
                .any(|&x| !(0.0..=1.0).contains(&x))
            {
                report.push(format!("{key}: matrix entry outside [0, 1]"));
            }
            for j in 0..width {
                let col_sum: f64 = link.matrix.iter().map(|r| r[j]).sum();
                if (col_sum - 1.0).abs() > PROB_TOL {
                    report.push(format!(
                        "{key}: column {j} sums to {col_sum:.9}, expected 1"
                    ));
                }
            }
        }

        for v in self.variables.values() {
            if v.kind == VarKind::X && self.parents(v.id).next().is_none() {
                report.push(format!("X variable {} has no incoming link", v.id));
            }
        }

        if self.topological_order().is_none() {
            report.push("cycle detected in parent->child links".to_string());
        }

        report
    }

    /// Variables in a topological order (parents before children), or `None`
    /// if the link relation is cyclic. Ties broken by ascending id.
    pub fn topological_order(&self) -> Option<Vec<VarId>> {
        let mut indegree: BTreeMap<VarId, usize> = self.variables.keys().map(|&v| (v, 0)).collect();
        for link in &self.links {
            if let Some(d) = indegree.get_mut(&link.child_id) {
                *d += 1;
            }
        }
        let mut ready: BTreeSet<VarId> = indegree
            .iter()
            .filter(|(_, &d)| d == 0)
            .map(|(&v, _)| v)
            .collect();
        let mut order = Vec::with_capacity(self.variables.len());
        while let Some(&next) = ready.iter().next() {
            ready.remove(&next);
            order.push(next);
            for link in &self.links {
                if link.parent_id == next {
                    let d = indegree.get_mut(&link.child_id).unwrap();
                    *d -= 1;
                    if *d == 0 {
                        ready.insert(link.child_id);
                    }
                }
            }
        }
        (order.len() == self.variables.len()).then_some(order)
    }

    /// Layer of every variable: the length of the longest directed path from
    /// any B/D source. Roots sit at layer 0.
    ///
    /// This is a topological grading: `layer(child) >= layer(parent) + 1` for
    /// every link, with equality when the parent lies on a longest path.
    pub fn layer_assignment(&self) -> BTreeMap<VarId, usize> {
        let order = self
            .topological_order()
            .expect("layer_assignment requires an acyclic graph");
        let mut layers: BTreeMap<VarId, usize> = BTreeMap::new();
        for v in order {
            let layer = self
                .parents(v)
                .map(|l| layers.get(&l.parent_id).copied().unwrap_or(0) + 1)
                .max()
                .unwrap_or(0);
            layers.insert(v, layer);
        }
        layers
    }

    /// All ancestors of `of` (excluding `of` itself).
    pub fn ancestors(&self, of: VarId) -> BTreeSet<VarId> {
        let mut out = BTreeSet::new();
        let mut stack: Vec<VarId> = self.parents(of).map(|l| l.parent_id).collect();
        while let Some(v) = stack.pop() {
            if out.insert(v) {
                stack.extend(self.parents(v).map(|l| l.parent_id));
            }
        }
        out
    }

    /// All descendants of `of` (excluding `of` itself).
    pub fn descendants(&self, of: VarId) -> BTreeSet<VarId> {
        let mut out = BTreeSet::new();
        let mut stack = vec![of];
        while let Some(v) = stack.pop() {
            for link in self.links.iter().filter(|l| l.parent_id == v) {
                if out.insert(link.child_id) {
                    stack.push(link.child_id);
                }
            }
        }
        out
    }

    /// The sub-DUCG used by every engine for one hypothesis: the induced
    /// subgraph on the hypothesis B node, the evidence nodes, and every node
    /// lying on a directed path from the hypothesis or a D node to an
    /// evidence node.
    ///
    /// Mixture weights renormalize over the links that survive, which is the
    /// minimal stand-in for the full DUCG simplification rules.
    pub fn restrict_to_hypothesis(
        &self,
        evidence: &Evidence,
        hypothesis: VarId,
    ) -> Result<Graph, GraphError> {
        let hyp = self
            .variable(hypothesis)
            .ok_or(GraphError::UnknownVariable { id: hypothesis })?;
        if hyp.kind != VarKind::B {
            return Err(GraphError::HypothesisNotRoot { id: hypothesis });
        }
        evidence.check(self)?;

        // Nodes on a source->evidence path: descendants of a source that are
        // also evidence ancestors (or evidence themselves).
        let mut evidence_side: BTreeSet<VarId> = BTreeSet::new();
        for (e, _) in evidence.iter() {
            evidence_side.insert(e);
            evidence_side.extend(self.ancestors(e));
        }

        let mut keep: BTreeSet<VarId> = BTreeSet::new();
        keep.insert(hypothesis);
        keep.extend(evidence.iter().map(|(e, _)| e));

        let mut sources = vec![hypothesis];
        sources.extend(
            self.variables
                .values()
                .filter(|v| v.kind == VarKind::D)
                .map(|v| v.id),
        );
        let mut hypothesis_reaches_evidence = false;
        for source in sources {
            let mut reach: BTreeSet<VarId> = BTreeSet::new();
            reach.insert(source);
            reach.extend(self.descendants(source));
            let on_path: Vec<VarId> = reach
                .iter()
                .copied()
                .filter(|v| evidence_side.contains(v) || evidence.contains(*v))
                .collect();
            if source == hypothesis && on_path.iter().any(|v| evidence.contains(*v)) {
                hypothesis_reaches_evidence = true;
            }
            if !on_path.is_empty() {
                keep.insert(source);
            }
            keep.extend(on_path);
        }
        if !evidence.is_empty() && !hypothesis_reaches_evidence {
            return Err(GraphError::DisconnectedHypothesis { id: hypothesis });
        }
        for (e, _) in evidence.iter() {
            let mut anc = self.ancestors(e);
            anc.insert(e);
            let grounded = anc
                .iter()
                .any(|v| *v == hypothesis || self.variable(*v).map(|x| x.kind) == Some(VarKind::D));
            if !grounded {
                return Err(GraphError::UnreachableEvidence { id: e });
            }
        }

        let variables: Vec<Variable> = self
            .variables
            .values()
            .filter(|v| keep.contains(&v.id))
            .cloned()
            .collect();
        let links: Vec<CausalLink> = self
            .links
            .iter()
            .filter(|l| keep.contains(&l.child_id) && keep.contains(&l.parent_id))
            .cloned()
            .collect();
        Graph::new(variables, links)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain() -> Graph {
        // B(2) -> X1(2) -> X2(2)
        Graph::new(
            vec![
                Variable::root(0, vec![0.5, 0.5]),
                Variable::effect(1, 2),
                Variable::effect(2, 2),
            ],
            vec![
                CausalLink {
                    child_id: 1,
                    parent_id: 0,
                    r_weight: 1.0,
                    matrix: vec![vec![0.3, 0.6], vec![0.7, 0.4]],
                },
                CausalLink {
                    child_id: 2,
                    parent_id: 1,
                    r_weight: 1.0,
                    matrix: vec![vec![1.0, 0.0], vec![0.0, 1.0]],
                },
            ],
        )
        .unwrap()
    }

    #[test]
    fn minimal_chain_is_valid() {
        let g = chain();
        assert!(g.validate().is_ok());
        assert_eq!(g.variables().count(), 3);
    }

    #[test]
    fn bad_column_sum_names_the_link() {
        let err = Graph::new(
            vec![Variable::root(0, vec![1.0, 0.0]), Variable::effect(1, 2)],
            vec![CausalLink {
                child_id: 1,
                parent_id: 0,
                r_weight: 1.0,
                matrix: vec![vec![0.3, 0.5], vec![0.6, 0.5]],
            }],
        )
        .unwrap_err();
        let GraphError::Invalid(report) = err else {
            panic!("expected validation failure")
        };
        assert!(report.to_string().contains("link 1<-0"));
        assert!(report.to_string().contains("column 0 sums to 0.9"));
    }

    #[test]
    fn cycle_is_reported() {
        let mk = |child, parent| CausalLink {
            child_id: child,
            parent_id: parent,
            r_weight: 1.0,
            matrix: vec![vec![0.5, 0.5], vec![0.5, 0.5]],
        };
        let err = Graph::new(
            vec![
                Variable::root(0, vec![1.0, 0.0]),
                Variable::effect(1, 2),
                Variable::effect(2, 2),
            ],
            vec![mk(1, 0), mk(1, 2), mk(2, 1)],
        )
        .unwrap_err();
        let GraphError::Invalid(report) = err else {
            panic!("expected validation failure")
        };
        assert!(report.to_string().contains("cycle detected"));
    }

    #[test]
    fn identity_matrix_passes() {
        let g = chain();
        assert!(g.validate().is_ok());
        assert_eq!(g.link(2, 1).unwrap().matrix[0][0], 1.0);
    }

    #[test]
    fn layers_on_chain() {
        let g = chain();
        let layers = g.layer_assignment();
        assert_eq!(layers[&0], 0);
        assert_eq!(layers[&1], 1);
        assert_eq!(layers[&2], 2);
    }

    #[test]
    fn layers_take_longest_path() {
        // B -> X1, B -> X2 -> X3 -> X1: layer(X1) = 3 under longest-path.
        let uniform2 = || vec![vec![0.5, 0.5], vec![0.5, 0.5]];
        let g = Graph::new(
            vec![
                Variable::root(0, vec![0.5, 0.5]),
                Variable::effect(1, 2),
                Variable::effect(2, 2),
                Variable::effect(3, 2),
            ],
            vec![
                CausalLink {
                    child_id: 1,
                    parent_id: 0,
                    r_weight: 1.0,
                    matrix: uniform2(),
                },
                CausalLink {
                    child_id: 2,
                    parent_id: 0,
                    r_weight: 1.0,
                    matrix: uniform2(),
                },
                CausalLink {
                    child_id: 3,
                    parent_id: 2,
                    r_weight: 1.0,
                    matrix: uniform2(),
                },
                CausalLink {
                    child_id: 1,
                    parent_id: 3,
                    r_weight: 1.0,
                    matrix: uniform2(),
                },
            ],
        )
        .unwrap();
        let layers = g.layer_assignment();
        assert_eq!(layers[&1], 3);
        assert_eq!(layers[&3], 2);
    }

    #[test]
    fn layers_on_a_five_layer_lattice() {
        // two roots feeding four chains of fully connected rows of four,
        // topped by a row of three: the top row sits at layer 5
        let uniform2 = || vec![vec![0.5, 0.5], vec![0.5, 0.5]];
        let mut vars = vec![
            Variable::root(100, vec![0.5, 0.5]),
            Variable::root(101, vec![0.5, 0.5]),
        ];
        let mut links = Vec::new();
        let id = |layer: usize, slot: usize| (layer * 4 + slot + 1) as VarId;
        for layer in 0..4 {
            for slot in 0..4 {
                vars.push(Variable::effect(id(layer, slot), 2));
                if layer == 0 {
                    for root in [100, 101] {
                        links.push(CausalLink {
                            child_id: id(layer, slot),
                            parent_id: root,
                            r_weight: 1.0,
                            matrix: uniform2(),
                        });
                    }
                } else {
                    for prev in 0..4 {
                        links.push(CausalLink {
                            child_id: id(layer, slot),
                            parent_id: id(layer - 1, prev),
                            r_weight: 1.0,
                            matrix: uniform2(),
                        });
                    }
                }
            }
        }
        for slot in 0..3 {
            let top = (17 + slot) as VarId;
            vars.push(Variable::effect(top, 2));
            for prev in 0..4 {
                links.push(CausalLink {
                    child_id: top,
                    parent_id: id(3, prev),
                    r_weight: 1.0,
                    matrix: uniform2(),
                });
            }
        }
        let g = Graph::new(vars, links).unwrap();
        let layers = g.layer_assignment();
        for slot in 0..4 {
            assert_eq!(layers[&id(0, slot)], 1);
        }
        for top in 17..=19 {
            assert_eq!(layers[&top], 5);
        }
    }

    #[test]
    fn restriction_drops_non_ancestors() {
        let g = chain();
        let e = Evidence::from_pairs([(1, 0)]);
        let sub = g.restrict_to_hypothesis(&e, 0).unwrap();
        assert!(sub.variable(2).is_none());
        assert!(sub.variable(1).is_some());
        assert!(sub.variable(0).is_some());
    }

    #[test]
    fn restriction_is_idempotent() {
        let g = chain();
        let e = Evidence::from_pairs([(1, 0)]);
        let sub = g.restrict_to_hypothesis(&e, 0).unwrap();
        let sub2 = sub.restrict_to_hypothesis(&e, 0).unwrap();
        assert_eq!(sub, sub2);
    }

    #[test]
    fn unreachable_evidence_errors() {
        // Two parallel chains: B0 -> X1, B10 -> X11. Evidence on X11 cannot
        // be grounded when B0 is the hypothesis.
        let col = vec![vec![0.3, 0.6], vec![0.7, 0.4]];
        let g = Graph::new(
            vec![
                Variable::root(0, vec![0.5, 0.5]),
                Variable::effect(1, 2),
                Variable::root(10, vec![0.5, 0.5]),
                Variable::effect(11, 2),
            ],
            vec![
                CausalLink {
                    child_id: 1,
                    parent_id: 0,
                    r_weight: 1.0,
                    matrix: col.clone(),
                },
                CausalLink {
                    child_id: 11,
                    parent_id: 10,
                    r_weight: 1.0,
                    matrix: col,
                },
            ],
        )
        .unwrap();
        let e = Evidence::from_pairs([(1, 0), (11, 0)]);
        let err = g.restrict_to_hypothesis(&e, 0).unwrap_err();
        assert!(matches!(err, GraphError::UnreachableEvidence { id: 11 }));
    }

    #[test]
    fn disconnected_hypothesis_errors() {
        let g = chain();
        // Evidence exists but none of it is downstream of the hypothesis.
        let col = vec![vec![0.3, 0.6], vec![0.7, 0.4]];
        let g2 = Graph::new(
            vec![
                Variable::root(0, vec![0.5, 0.5]),
                Variable::effect(1, 2),
                Variable::root(10, vec![0.5, 0.5]),
                Variable::effect(11, 2),
            ],
            g.links()
                .iter()
                .take(1)
                .cloned()
                .chain([CausalLink {
                    child_id: 11,
                    parent_id: 10,
                    r_weight: 1.0,
                    matrix: col,
                }])
                .collect(),
        )
        .unwrap();
        let e = Evidence::from_pairs([(11, 0)]);
        let err = g2.restrict_to_hypothesis(&e, 0).unwrap_err();
        assert!(matches!(err, GraphError::DisconnectedHypothesis { id: 0 }));
    }

    #[test]
    fn layer_grading_property() {
        let g = chain();
        let layers = g.layer_assignment();
        for link in g.links() {
            assert!(layers[&link.child_id] > layers[&link.parent_id]);
        }
    }
}
