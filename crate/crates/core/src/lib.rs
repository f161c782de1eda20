//! Special sign-permutation orthogonal matrices for deterministic remote
//! state preparation.
//!
//! Column orthogonality of a matrix whose columns are signed permutations of
//! `a_0..a_{N-1}` reduces to an XOR linear system over couple signs. The
//! crate builds that system, solves it, reduces any semi-orthogonal layout to
//! the canonical `r XOR c` layout, and checks the result by brute force and
//! by simulating the state-preparation protocol.

pub mod canonical;
pub mod drsp;
pub mod error;
pub mod gf2;
pub mod io;
pub mod matrix;
pub mod operator;
pub mod oracle;
pub mod solver;

pub use canonical::{
    feasibility, generate_ordered_type, order_mapping_table, simplify_to_ordered, Feasibility,
    GeneratorSet, MappingTable, Simplification,
};
pub use drsp::{phase_equivalence_check, simulate_drsp, DrspReport};
pub use error::{Error, Result};
pub use gf2::{Gf2Solution, Gf2System};
pub use matrix::{
    validate_semi_orthogonal, validate_special_orthogonal, Mode, ParameterVector, Sign,
    SignedEntry, SymbolicMatrix,
};
pub use operator::{Couple, Division, MatchingOperator, SignedPermutation};
pub use oracle::{brute_force_gf2, brute_force_signs};
pub use solver::{assign_signs, build_equations, compute_divisions, find_solution, DivisionTable};
