//! Inference engines for Dynamic Uncertain Causality Graphs.
//!
//! A DUCG is a causal probabilistic graphical model whose child
//! conditionals are r-weighted mixtures of per-parent functional-event
//! matrices. Diagnosis asks for `Pr{B_kj | E}`: the posterior over root
//! causes given the observed effects. This crate computes it by three
//! interchangeable backends:
//!
//! - [`exact`]: brute-force enumeration over unknown-state assignments,
//!   plus linear ancestral marginal propagation;
//! - [`algebra`] / [`recursive`]: symbolic sum-of-products expansion with
//!   absorption, either single shot or layer by layer;
//! - [`sampling`]: conditional stochastic simulation that averages
//!   per-cycle conditional likelihoods instead of counting frequencies,
//!   with cut-off estimation for multi-evidence absorption and an ε–Δ
//!   halting rule.
//!
//! [`generators`] builds the benchmark families and worked fixtures, and
//! [`format`] defines the graph document format shared with the CLI.
//!
//! ```
//! use ducg::exact::{enumerate_likelihood, Hypothesis};
//! use ducg::generators::compact_fixture;
//!
//! let model = compact_fixture();
//! let lik = enumerate_likelihood(&model.graph, &model.evidence, model.hypothesis).unwrap();
//! assert!((lik - 7.939915e-2).abs() < 1e-6);
//! ```

pub mod algebra;
pub mod book;
pub mod exact;
pub mod format;
pub mod generators;
pub mod graph;
pub mod recursive;
pub mod sampling;

pub use exact::{Hypothesis, HypothesisResult};
pub use graph::{CausalLink, Evidence, Graph, VarId, VarKind, Variable};
