//! Free-group Δ-decompositions, the quasimorphisms they induce, aligned
//! bounded cochains, and exact verification of explicit primitives
//! `β = φ∪ω + δη` with `δβ = δφ∪ω`.

pub mod cli;
pub mod cochain;
pub mod decomp;
pub mod error;
pub mod primitive;
pub mod qm;
pub mod rational;
pub mod report;
pub mod words;

pub use error::{Error, Result};
pub use rational::Rational;
