//! Prediction-game laboratory.
//!
//! A non-probabilistic model of predictability relative to a set of
//! extractors, three worked experiments (the dyadic map, a black-box Mealy
//! automaton, and a two-dimensional projective measurement), and sequence
//! diagnostics for the outputs they produce.

pub mod analysis;
pub mod bitstreams;
pub mod dyadic;
pub mod error;
pub mod mealy;
pub mod model;
pub mod quantum;
pub mod scenario;

pub use error::{Error, Result};
