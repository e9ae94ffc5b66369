//! Tree-path hypergraphs and the Maker/Breaker constructions built on them.
//!
//! * [`tree`]: the hypergraph model with exact degree, neighborhood and
//!   branch-coverage verifiers.
//! * [`constructions`]: the extremal tree and the neighborhood counterexample.
//! * [`unit_calculus`]: units, node splitting and the degree-bounded
//!   pipelines, with explicit and symbolic backends.
//! * [`game`]: the referee, Maker's tree walk, Breaker strategies and an exact
//!   minimax oracle.
//! * [`coloring`]: pairings, the signed hypergraph, the local lemma check and
//!   a resampling search for proper halving colorings.

pub mod budget;
pub mod coloring;
pub mod constructions;
pub mod game;
pub mod io;
pub mod tree;
pub mod unit_calculus;

pub use tree::{EdgeId, PathEdge, TreeHypergraph, VertexId};
