//! The user guide, chapter by chapter.
//!
//! Each module's documentation *is* one chapter of the book under `book/`,
//! pulled in verbatim so every code sample runs as a doc-test of this
//! crate: `cargo test --doc` keeps the book and the library in lockstep,
//! and `mdbook build book` renders the same files as HTML.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/model.md")]
pub mod model {}

#[doc = include_str!("../../../book/src/event-algebra.md")]
pub mod event_algebra {}

#[doc = include_str!("../../../book/src/exact-inference.md")]
pub mod exact_inference {}

#[doc = include_str!("../../../book/src/sampling.md")]
pub mod sampling_guide {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}

#[doc = include_str!("../../../book/src/benchmarks.md")]
pub mod benchmarks {}
