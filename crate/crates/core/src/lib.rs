//! Alignment-based conformance checking over probabilistic event logs.
//!
//! A process model ([`petri::PetriNet`]) is combined with a weighted trace
//! model built from a probabilistic trace ([`problog::ProbTrace`]) into a
//! synchronous product ([`builders::SyncProductNet`]). An optimal alignment
//! under a log-probability cost with trust threshold ε is then found by
//! shortest-path search ([`align::align`]).

pub mod align;
pub mod builders;
pub mod error;
pub mod eval;
pub mod experiment;
pub mod io;
pub mod noise;
pub mod petri;
pub mod problog;
mod search;
pub mod synth;

#[cfg(test)]
mod testutil;

pub use error::{Error, Result};
