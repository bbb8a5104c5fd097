//! Existential coverability for timed-arc Petri nets with one clock per token.
//!
//! Given a net, an initial place `p` and a transition `t`, decide whether
//! some number of age-zero tokens on `p` can eventually enable `t`. The
//! decision procedure computes the cover set of `N·{(p,0)}` as a finite list
//! of simple regular expressions over region symbols (see [`coverset`]).
//! Independent explicit-state engines live in [`oracle`]; [`circuit`] builds
//! instances with known answers from iterated monotone Boolean circuits.

pub mod accelerate;
pub mod circuit;
pub mod coverset;
pub mod document;
pub mod error;
pub mod fixtures;
pub mod model;
pub mod oracle;
pub mod random;
pub mod reduce;
pub mod regions;
pub mod saturation;

pub use error::{Error, Result};
