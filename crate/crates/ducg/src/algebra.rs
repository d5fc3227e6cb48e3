//! Symbolic sum-of-products over `{B, D, A, X}` event literals.
//!
//! Evidence expansion rewrites each observed effect as a weighted sum over
//! its parents and multiplies the per-evidence sums together. A [`Term`] is a
//! product of literals with a numeric coefficient; a [`SymbolicExpr`] is a
//! canonical sum of terms. Multiplication applies the absorption rules that
//! make the algebra agree with brute-force enumeration:
//!
//! 1. duplicate literals are idempotent (`L·L = L`);
//! 2. literals asserting different states of one variable annihilate the
//!    term;
//! 3. two distinct functional literals with the same child variable
//!    annihilate the term (exactly one parent mechanism drives a child in
//!    the weighted-OR semantics);
//! 4. like terms merge by adding coefficients;
//! 5. D literals are absorbing units with value 1.
//!
//! State-unknown variables stay summed rather than enumerated: a literal
//! slot holding [`StateRef::Tied`] refers to the shared, implicit sum over
//! that variable's states inside its term. An `X(v)` literal with no state
//! keeps the sum open for further expansion; once `v` is expanded away the
//! tied slots on surviving `A` literals still couple through the same sum.
//! This keeps expressions at the granularity the expansion process works in:
//! one term per parent group, not one per parent state.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::graph::{Graph, StateIdx, VarId, VarKind};

/// A state slot in a functional literal: a concrete state, or the shared
/// implicit sum over the variable's states within the enclosing term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum StateRef {
    Fixed(StateIdx),
    Tied,
}

impl StateRef {
    fn resolve(self, assigned: Option<StateIdx>) -> StateIdx {
        match self {
            StateRef::Fixed(s) => s,
            StateRef::Tied => assigned.expect("tied state without an assignment"),
        }
    }
}

/// One event literal. Ordering is the canonical term ordering.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Literal {
    /// Root-cause event `B_{var,state}`.
    B { var: VarId, state: StateIdx },
    /// Default-cause event with probability 1.
    D { var: VarId },
    /// Functional event `A_{child,child_state; parent,parent_state}`; its
    /// numeric value carries the link's mixture weight `r/r_child`.
    A {
        child: VarId,
        child_state: StateRef,
        parent: VarId,
        parent_state: StateRef,
    },
    /// Effect variable event; `state: None` is a state-unknown literal whose
    /// states stay summed until expanded.
    X { var: VarId, state: Option<StateIdx> },
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let slot = |s: &StateRef| match s {
            StateRef::Fixed(j) => j.to_string(),
            StateRef::Tied => "?".to_string(),
        };
        match self {
            Literal::B { var, state } => write!(f, "B({var},{state})"),
            Literal::D { var } => write!(f, "D({var})"),
            Literal::A {
                child,
                child_state,
                parent,
                parent_state,
            } => write!(
                f,
                "A({child},{};{parent},{})",
                slot(child_state),
                slot(parent_state)
            ),
            Literal::X {
                var,
                state: Some(s),
            } => write!(f, "X({var},{s})"),
            Literal::X { var, state: None } => write!(f, "X({var},?)"),
        }
    }
}

#[derive(Debug, Clone, thiserror::Error, PartialEq)]
pub enum AlgebraError {
    #[error("variable {id} is {kind}-kind and not expandable")]
    NotExpandable { id: VarId, kind: VarKind },
    #[error("unbound X-literal: no probability supplied for X({var},{state})")]
    UnboundX { var: VarId, state: StateIdx },
}

/// A product of literals with a numeric coefficient.
///
/// Terms are canonical: literals sorted, duplicates removed, and no two
/// literals asserting different states of one variable (such a product is
/// the zero term and is dropped at construction).
#[derive(Debug, Clone, PartialEq)]
pub struct Term {
    coefficient: f64,
    literals: Vec<Literal>,
}

impl Term {
    /// The unit term: empty product, coefficient 1.
    pub fn unit() -> Term {
        Term {
            coefficient: 1.0,
            literals: Vec::new(),
        }
    }

    /// Canonicalize a literal product. Returns `None` when an exclusion rule
    /// annihilates the term.
    pub fn new(coefficient: f64, literals: Vec<Literal>) -> Option<Term> {
        let literals = canonicalize(literals)?;
        Some(Term {
            coefficient,
            literals,
        })
    }

    pub fn from_literal(lit: Literal) -> Term {
        Term::new(1.0, vec![lit]).expect("single literal cannot be excluded")
    }

    pub fn coefficient(&self) -> f64 {
        self.coefficient
    }

    pub fn literals(&self) -> &[Literal] {
        &self.literals
    }

    /// Number of functional (`A`) literals: the term's F-order.
    pub fn f_order(&self) -> usize {
        self.literals
            .iter()
            .filter(|l| matches!(l, Literal::A { .. }))
            .count()
    }

    /// Distinct effect variables still present as `X` literals.
    pub fn x_vars(&self) -> impl Iterator<Item = (VarId, Option<StateIdx>)> + '_ {
        self.literals.iter().filter_map(|l| match l {
            Literal::X { var, state } => Some((*var, *state)),
            _ => None,
        })
    }

    pub fn x_count(&self) -> usize {
        self.x_vars().count()
    }

    /// The numeric multiplier in front of the term's event product: the
    /// coefficient times the mixture weight `r/r_n` of every functional
    /// literal.
    pub fn weight(&self, g: &Graph) -> f64 {
        self.coefficient
            * self
                .literals
                .iter()
                .filter_map(|l| match l {
                    Literal::A { child, parent, .. } => g.link_weight(*child, *parent),
                    _ => None,
                })
                .product::<f64>()
    }

    /// Variables whose states are summed inside this term (tied slots),
    /// whether or not the `X` literal is still present.
    fn tied_vars(&self) -> BTreeSet<VarId> {
        let mut out = BTreeSet::new();
        for l in &self.literals {
            match l {
                Literal::X { var, state: None } => {
                    out.insert(*var);
                }
                Literal::A {
                    child,
                    child_state,
                    parent,
                    parent_state,
                } => {
                    if *child_state == StateRef::Tied {
                        out.insert(*child);
                    }
                    if *parent_state == StateRef::Tied {
                        out.insert(*parent);
                    }
                }
                _ => {}
            }
        }
        out
    }

    /// Product of two terms under the absorption rules.
    pub fn multiply(&self, other: &Term) -> Option<Term> {
        let mut literals = Vec::with_capacity(self.literals.len() + other.literals.len());
        literals.extend_from_slice(&self.literals);
        literals.extend_from_slice(&other.literals);
        Term::new(self.coefficient * other.coefficient, literals)
    }

    /// Evaluate the term. `x_value(var, state)` supplies probabilities for
    /// `X` literals; `b_value(var, state)` for `B` literals. Tied sums are
    /// carried out over the joint states of all tied variables.
    fn evaluate(
        &self,
        g: &Graph,
        x_value: &impl Fn(VarId, StateIdx) -> Result<f64, AlgebraError>,
        b_value: &impl Fn(VarId, StateIdx) -> f64,
    ) -> Result<f64, AlgebraError> {
        let mut fixed = self.coefficient;
        for l in &self.literals {
            match l {
                Literal::B { var, state } => fixed *= b_value(*var, *state),
                Literal::D { .. } => {}
                Literal::X {
                    var,
                    state: Some(s),
                } => fixed *= x_value(*var, *s)?,
                Literal::X {
                    var: _,
                    state: None,
                } => {}
                Literal::A {
                    child,
                    child_state,
                    parent,
                    parent_state,
                } => {
                    if let (StateRef::Fixed(cs), StateRef::Fixed(ps)) = (child_state, parent_state)
                    {
                        let link = g
                            .link(*child, *parent)
                            .expect("A literal references a missing link");
                        fixed *= g.link_weight(*child, *parent).unwrap() * link.matrix[*cs][*ps];
                    }
                }
            }
        }

        let tied: Vec<VarId> = self.tied_vars().into_iter().collect();
        if tied.is_empty() {
            return Ok(fixed);
        }
        let counts: Vec<usize> = tied
            .iter()
            .map(|v| {
                g.variable(*v)
                    .expect("tied literal references a missing variable")
                    .state_count
            })
            .collect();
        let mut odometer = vec![0usize; tied.len()];
        let mut sum = 0.0;
        loop {
            let assigned = |v: VarId| -> Option<StateIdx> {
                tied.iter().position(|&t| t == v).map(|i| odometer[i])
            };
            let mut prod = 1.0;
            for l in &self.literals {
                match l {
                    Literal::A {
                        child,
                        child_state,
                        parent,
                        parent_state,
                    } => {
                        if *child_state == StateRef::Tied || *parent_state == StateRef::Tied {
                            let cs = child_state.resolve(assigned(*child));
                            let ps = parent_state.resolve(assigned(*parent));
                            let link = g
                                .link(*child, *parent)
                                .expect("A literal references a missing link");
                            prod *= g.link_weight(*child, *parent).unwrap() * link.matrix[cs][ps];
                        }
                    }
                    Literal::X { var, state: None } => {
                        prod *= x_value(*var, assigned(*var).unwrap())?;
                    }
                    _ => {}
                }
                if prod == 0.0 {
                    break;
                }
            }
            sum += prod;
            // advance odometer
            let mut i = 0;
            loop {
                if i == tied.len() {
                    return Ok(fixed * sum);
                }
                odometer[i] += 1;
                if odometer[i] < counts[i] {
                    break;
                }
                odometer[i] = 0;
                i += 1;
            }
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.8e}", self.coefficient)?;
        for l in &self.literals {
            write!(f, "·{l}")?;
        }
        Ok(())
    }
}

/// Canonical literal form shared by `Term::new` and `Term::multiply`:
/// collapse tied slots against fixed state claims, deduplicate, and apply
/// the exclusion rules. `None` means the product is the zero term.
fn canonicalize(mut literals: Vec<Literal>) -> Option<Vec<Literal>> {
    // Fixed state claims from X and B literals; conflicting claims
    // annihilate.
    let mut fixed_state: BTreeMap<VarId, StateIdx> = BTreeMap::new();
    for l in &literals {
        let claim = match l {
            Literal::X {
                var,
                state: Some(s),
            } => Some((*var, *s)),
            Literal::B { var, state } => Some((*var, *state)),
            _ => None,
        };
        if let Some((v, s)) = claim {
            match fixed_state.get(&v) {
                Some(&prev) if prev != s => return None,
                _ => {
                    fixed_state.insert(v, s);
                }
            }
        }
    }

    // Collapse tied slots of variables with a fixed state, and drop
    // state-unknown X literals subsumed by a fixed one.
    for l in literals.iter_mut() {
        if let Literal::A {
            child,
            child_state,
            parent,
            parent_state,
        } = l
        {
            if *child_state == StateRef::Tied {
                if let Some(&s) = fixed_state.get(child) {
                    *child_state = StateRef::Fixed(s);
                }
            }
            if *parent_state == StateRef::Tied {
                if let Some(&s) = fixed_state.get(parent) {
                    *parent_state = StateRef::Fixed(s);
                }
            }
        }
    }
    literals
        .retain(|l| !matches!(l, Literal::X { var, state: None } if fixed_state.contains_key(var)));

    literals.sort();
    literals.dedup();

    // A fixed A-literal slot asserts that variable's state: conflicts with a
    // fixed claim annihilate.
    for l in &literals {
        if let Literal::A {
            child,
            child_state,
            parent,
            parent_state,
        } = l
        {
            if let StateRef::Fixed(cs) = child_state {
                if fixed_state.get(child).is_some_and(|&s| s != *cs) {
                    return None;
                }
            }
            if let StateRef::Fixed(ps) = parent_state {
                if fixed_state.get(parent).is_some_and(|&s| s != *ps) {
                    return None;
                }
            }
        }
    }

    // Exactly one mechanism drives each child: two distinct A literals with
    // the same child variable annihilate the term. The vector is sorted and
    // deduplicated, so a repeated child implies distinct literals.
    let mut seen_child: BTreeSet<VarId> = BTreeSet::new();
    for l in &literals {
        if let Literal::A { child, .. } = l {
            if !seen_child.insert(*child) {
                return None;
            }
        }
    }

    Some(literals)
}

/// A canonical sum of terms: sorted by literal product, like terms merged.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SymbolicExpr {
    terms: Vec<Term>,
}

impl SymbolicExpr {
    /// The empty sum (numeric value 0).
    pub fn zero() -> SymbolicExpr {
        SymbolicExpr::default()
    }

    /// The unit expression: a single empty term with coefficient 1.
    pub fn unit() -> SymbolicExpr {
        SymbolicExpr {
            terms: vec![Term::unit()],
        }
    }

    pub fn from_terms(terms: impl IntoIterator<Item = Term>) -> SymbolicExpr {
        let mut e = SymbolicExpr::zero();
        e.extend(terms);
        e
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    fn extend(&mut self, terms: impl IntoIterator<Item = Term>) {
        self.terms.extend(terms);
        self.terms.sort_by(|a, b| a.literals.cmp(&b.literals));
        let mut merged: Vec<Term> = Vec::with_capacity(self.terms.len());
        for t in self.terms.drain(..) {
            match merged.last_mut() {
                Some(last) if last.literals == t.literals => {
                    last.coefficient += t.coefficient;
                }
                _ => merged.push(t),
            }
        }
        merged.retain(|t| t.coefficient != 0.0);
        self.terms = merged;
    }

    /// Distributive product with absorption; zero terms dropped, like terms
    /// merged. Commutative and associative up to term order.
    pub fn multiply(&self, other: &SymbolicExpr) -> SymbolicExpr {
        let products = self
            .terms
            .iter()
            .flat_map(|a| other.terms.iter().filter_map(move |b| a.multiply(b)));
        SymbolicExpr::from_terms(products)
    }

    pub fn add(&self, other: &SymbolicExpr) -> SymbolicExpr {
        SymbolicExpr::from_terms(self.terms.iter().chain(other.terms.iter()).cloned())
    }

    /// Largest layer (per [`Graph::layer_assignment`]) among the X literals
    /// still present, if any.
    pub fn frontier_layer(&self, layers: &BTreeMap<VarId, usize>) -> Option<usize> {
        self.terms
            .iter()
            .flat_map(|t| t.x_vars().map(|(v, _)| layers[&v]))
            .max()
    }
}

impl fmt::Display for SymbolicExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{t}")?;
        }
        Ok(())
    }
}

/// Expand one observed effect event over its parents: for an X parent one
/// term per parent group with the parent's states kept summed, for a B
/// parent one term per parent state, for a D parent a single term.
pub fn expand_event(g: &Graph, var: VarId, state: StateIdx) -> Result<SymbolicExpr, AlgebraError> {
    expand_state_ref(g, var, StateRef::Fixed(state))
}

/// Expansion of a state-unknown effect: all child states stay summed through
/// a tied slot.
pub fn expand_event_unknown(g: &Graph, var: VarId) -> Result<SymbolicExpr, AlgebraError> {
    expand_state_ref(g, var, StateRef::Tied)
}

fn expand_state_ref(
    g: &Graph,
    var: VarId,
    child_state: StateRef,
) -> Result<SymbolicExpr, AlgebraError> {
    let v = g.variable(var).expect("expansion of a foreign variable");
    if v.kind != VarKind::X {
        return Err(AlgebraError::NotExpandable {
            id: var,
            kind: v.kind,
        });
    }
    let mut terms = Vec::new();
    for link in g.parents(var) {
        let parent = g
            .variable(link.parent_id)
            .expect("link references a missing parent");
        match parent.kind {
            VarKind::X => {
                terms.push(
                    Term::new(
                        1.0,
                        vec![
                            Literal::A {
                                child: var,
                                child_state,
                                parent: link.parent_id,
                                parent_state: StateRef::Tied,
                            },
                            Literal::X {
                                var: link.parent_id,
                                state: None,
                            },
                        ],
                    )
                    .expect("fresh expansion term cannot be excluded"),
                );
            }
            VarKind::B => {
                for j in 0..parent.state_count {
                    terms.push(
                        Term::new(
                            1.0,
                            vec![
                                Literal::A {
                                    child: var,
                                    child_state,
                                    parent: link.parent_id,
                                    parent_state: StateRef::Fixed(j),
                                },
                                Literal::B {
                                    var: link.parent_id,
                                    state: j,
                                },
                            ],
                        )
                        .expect("fresh expansion term cannot be excluded"),
                    );
                }
            }
            VarKind::D => {
                terms.push(
                    Term::new(
                        1.0,
                        vec![
                            Literal::A {
                                child: var,
                                child_state,
                                parent: link.parent_id,
                                parent_state: StateRef::Fixed(0),
                            },
                            Literal::D {
                                var: link.parent_id,
                            },
                        ],
                    )
                    .expect("fresh expansion term cannot be excluded"),
                );
            }
        }
    }
    Ok(SymbolicExpr::from_terms(terms))
}

/// One step of layered expansion: replace every X literal sitting on the
/// expression's deepest layer by its expansion, re-normalizing products
/// through the multiply rules. Literals on shallower layers wait for their
/// own step, which keeps each variable expanded exactly once per term.
/// Expressions without X literals are a fixed point.
pub fn expand_layer(g: &Graph, e: &SymbolicExpr) -> SymbolicExpr {
    let layers = g.layer_assignment();
    let Some(frontier) = e.frontier_layer(&layers) else {
        return e.clone();
    };
    let mut out = SymbolicExpr::zero();
    for term in e.terms() {
        let targets: Vec<(VarId, Option<StateIdx>)> = term
            .x_vars()
            .filter(|(v, _)| layers[v] == frontier)
            .collect();
        if targets.is_empty() {
            out.extend([term.clone()]);
            continue;
        }
        let remaining: Vec<Literal> = term
            .literals()
            .iter()
            .filter(
                |l| !matches!(l, Literal::X { var, .. } if targets.iter().any(|(t, _)| t == var)),
            )
            .cloned()
            .collect();
        let base = Term::new(term.coefficient(), remaining)
            .expect("removing literals cannot create an exclusion");
        let mut acc = SymbolicExpr::from_terms([base]);
        for (var, state) in targets {
            let exp = match state {
                Some(s) => expand_event(g, var, s),
                None => expand_event_unknown(g, var),
            }
            .expect("X literal referents are expandable");
            acc = acc.multiply(&exp);
        }
        out = out.add(&acc);
    }
    out
}

/// Expand an evidence product all the way to the roots: multiply the
/// evidence literals into one term and apply [`expand_layer`] until no X
/// literal remains. The result contains only `A`, `B` and `D` literals and
/// evaluates to the joint evidence probability under whatever B weighting
/// [`evaluate_with`] supplies.
pub fn expand_to_ground(g: &Graph, evidence: &crate::graph::Evidence) -> SymbolicExpr {
    let product = Term::new(
        1.0,
        evidence
            .iter()
            .map(|(var, state)| Literal::X {
                var,
                state: Some(state),
            })
            .collect(),
    )
    .expect("evidence maps each variable to one state");
    let mut expr = SymbolicExpr::from_terms([product]);
    loop {
        let next = expand_layer(g, &expr);
        if next == expr {
            return expr;
        }
        expr = next;
    }
}

/// Number of functional literals in a term; see [`Term::f_order`].
pub fn f_order(t: &Term) -> usize {
    t.f_order()
}

/// Histogram of terms by distinct X-literal count.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TermCensus {
    pub by_x_count: BTreeMap<usize, usize>,
    pub max_f_order: usize,
}

impl TermCensus {
    pub fn total(&self) -> usize {
        self.by_x_count.values().sum()
    }

    fn count(&self, x: usize) -> usize {
        self.by_x_count.get(&x).copied().unwrap_or(0)
    }

    /// `a_i`: terms containing exactly one X variable.
    pub fn one_x(&self) -> usize {
        self.count(1)
    }

    /// `b_i`: two-X terms.
    pub fn two_x(&self) -> usize {
        self.count(2)
    }

    /// `c_i`: three-X terms.
    pub fn three_x(&self) -> usize {
        self.count(3)
    }
}

pub fn census(e: &SymbolicExpr) -> TermCensus {
    let mut out = TermCensus::default();
    for t in e.terms() {
        *out.by_x_count.entry(t.x_count()).or_insert(0) += 1;
        out.max_f_order = out.max_f_order.max(t.f_order());
    }
    out
}

/// Weighted-OR numeric evaluation: every functional literal contributes its
/// mixture weight times the matrix entry, B literals their prior, D literals
/// one, X literals the supplied probability. Tied sums run over the joint
/// states of the tied variables in each term.
pub fn evaluate(
    e: &SymbolicExpr,
    g: &Graph,
    x_values: &BTreeMap<(VarId, StateIdx), f64>,
) -> Result<f64, AlgebraError> {
    evaluate_with(e, g, x_values, |var, state| {
        g.variable(var)
            .and_then(|v| v.prior.as_ref())
            .map(|p| p[state])
            .unwrap_or(0.0)
    })
}

/// [`evaluate`] with B-literal values supplied by the caller; engines use
/// this to condition on a hypothesis state instead of weighting by priors.
pub fn evaluate_with(
    e: &SymbolicExpr,
    g: &Graph,
    x_values: &BTreeMap<(VarId, StateIdx), f64>,
    b_value: impl Fn(VarId, StateIdx) -> f64,
) -> Result<f64, AlgebraError> {
    let x_fn = |var: VarId, state: StateIdx| {
        x_values
            .get(&(var, state))
            .copied()
            .ok_or(AlgebraError::UnboundX { var, state })
    };
    let mut sum = 0.0;
    for t in e.terms() {
        sum += t.evaluate(g, &x_fn, &b_value)?;
    }
    Ok(sum)
}
