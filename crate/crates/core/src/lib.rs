//! Construction and verification toolkit for CSS, triorthogonal and mirrored
//! quantum codes, with exact and Monte Carlo analysis of layered
//! Toffoli-state distillation and its qubit cost.

pub mod circuits;
pub mod codes;
pub mod cost;
pub mod distill;
pub mod error;
pub mod gf2;
pub mod transversality;

pub use error::{Error, Result};
