//! Generalized Ramsey numbers over indexed graph families.
//!
//! A Ramsey problem is described by a base (graph family, per-index alphabets
//! and admissible colourings) and a symbol (coloured targets per index). The
//! crate decides the arrows relation `G_i -> (X, ψ)` either by direct search
//! or through subgraph-colouring indicator polynomials over finite fields, and
//! drives the search for the least index at which it holds.

pub mod engine;
pub mod family;
pub mod field;
pub mod graph;
pub mod indicator;
pub mod primes;
mod search;
pub mod selftest;
pub mod spec;
