//! Graphs, graph states, Pauli strings with exact phases, stabilizer groups
//! and proper colorings.

mod coloring;
mod graph;
mod pauli;

pub use coloring::{greedy_coloring, Coloring};
pub use graph::{generators, graph_state, Graph};
pub use pauli::{pauli_projector, stabilizer_group, Pauli, PauliString};
