//! Monitoring of universally quantified temporal hyperproperties over sets of
//! finite traces.

pub mod automaton;
pub mod engine;
pub mod formula;
pub mod semantics;
pub mod spec_analysis;
pub mod trace_analysis;
pub mod trace_io;
