//! Verification strategies: weighted binary tests `(p_ℓ, Ω_ℓ)` for a target
//! state, with closed-form gap predictions for the built-in families.
//!
//! Adaptive LOCC protocols are stored at operator level: each test keeps its
//! pass effect, optionally with a product decomposition `Σ A_k ⊗ B_k`. The
//! message order of the protocol is recorded in the test's `setting` tag
//! only.

pub mod gaps;
mod local;
mod locc;
mod multipartite;
mod strategy;

pub use local::{
    bell_strategy, build_local_test, check_povm, coloring_strategy, ghz_optimal, ghz_two_setting,
    ghz_xy_stabilizers, local_test, pauli_basis, stabilizer_strategy, two_qubit_local_optimal,
};
pub use locc::{
    bob_semi_optimal, check_one_way_constraints, many_round_qubit, mes_strategy, one_way_qubit,
    one_way_qudit, two_way_qubit, two_way_qudit, OneWayReport, MAX_TWIRL_DIM,
};
pub use multipartite::{dicke_locc, w_local, w_locc};
pub use strategy::{Effect, LocalTerm, Strategy, Test, ValidationReport};
