//! Lie algebras by structure constants, reductive decompositions `g = h ⊕ m`
//! and the builtin examples.

mod algebra;
mod builtin;
mod decomposition;

pub use algebra::{basis_vector, LieAlgebra, Report, Vector, Violation};
pub use builtin::{builtin, builtin_by_name, Builtin, BuiltinName};
pub use decomposition::{Decomposition, ReductiveReport, ReductiveViolation};
