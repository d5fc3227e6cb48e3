//! The graph document format.
//!
//! A graph file is a JSON object with two keys. `variables` lists
//! `{id, kind, states, prior?, observed?}` records where `kind` is `"B"`,
//! `"X"` or `"D"` and `prior` is present only for B variables. `links` lists
//! `{child, parent, r, matrix}` records where `matrix` is row-major with one
//! row per child state and one column per parent state. Unknown keys are
//! rejected. Floats round-trip bit-exactly through serialization.

use serde::{Deserialize, Serialize};

use crate::graph::{CausalLink, Evidence, Graph, GraphError, StateIdx, VarId, VarKind, Variable};

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphDoc {
    variables: Vec<VariableDoc>,
    links: Vec<LinkDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct VariableDoc {
    id: VarId,
    kind: String,
    states: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    prior: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    observed: Option<StateIdx>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LinkDoc {
    child: VarId,
    parent: VarId,
    r: f64,
    matrix: Vec<Vec<f64>>,
}

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    /// Malformed document; the message carries serde's line/column location.
    #[error("graph document parse error: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("variable {id}: unknown kind {kind:?} (expected \"B\", \"X\" or \"D\")")]
    UnknownKind { id: VarId, kind: String },
    /// The document parsed but the graph violates invariants.
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Parse a graph document and validate the result. Ids are preserved
/// verbatim; a validation failure lists every violated invariant.
pub fn load_graph(text: &str) -> Result<Graph, FormatError> {
    let doc: GraphDoc = serde_json::from_str(text)?;
    let mut variables = Vec::with_capacity(doc.variables.len());
    for v in doc.variables {
        let kind = match v.kind.as_str() {
            "B" => VarKind::B,
            "X" => VarKind::X,
            "D" => VarKind::D,
            other => {
                return Err(FormatError::UnknownKind {
                    id: v.id,
                    kind: other.to_string(),
                })
            }
        };
        variables.push(Variable {
            id: v.id,
            kind,
            state_count: v.states,
            prior: v.prior,
            observed_state: v.observed,
        });
    }
    let links = doc
        .links
        .into_iter()
        .map(|l| CausalLink {
            child_id: l.child,
            parent_id: l.parent,
            r_weight: l.r,
            matrix: l.matrix,
        })
        .collect();
    Ok(Graph::new(variables, links)?)
}

/// Serialize a graph as a document accepted by [`load_graph`].
pub fn serialize_graph(g: &Graph) -> String {
    let doc = GraphDoc {
        variables: g
            .variables()
            .map(|v| VariableDoc {
                id: v.id,
                kind: v.kind.to_string(),
                states: v.state_count,
                prior: v.prior.clone(),
                observed: v.observed_state,
            })
            .collect(),
        links: g
            .links()
            .iter()
            .map(|l| LinkDoc {
                child: l.child_id,
                parent: l.parent_id,
                r: l.r_weight,
                matrix: l.matrix.clone(),
            })
            .collect(),
    };
    serde_json::to_string_pretty(&doc).expect("graph document serialization cannot fail")
}

/// Parse an evidence document: a JSON map from variable id to observed state.
pub fn load_evidence(text: &str) -> Result<Evidence, FormatError> {
    let map: std::collections::BTreeMap<VarId, StateIdx> = serde_json::from_str(text)?;
    Ok(Evidence::from_pairs(map))
}

/// Serialize evidence as a document accepted by [`load_evidence`].
pub fn serialize_evidence(e: &Evidence) -> String {
    let map: std::collections::BTreeMap<VarId, StateIdx> = e.iter().collect();
    serde_json::to_string_pretty(&map).expect("evidence serialization cannot fail")
}
