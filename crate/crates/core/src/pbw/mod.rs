//! Enveloping algebras: normal ordering in `U g` and `U h_ℏ`, the symmetrization
//! map, the PBW star product with its bidifferential operators, the dynamical
//! shift `f(λ + ℏh)`, and the coproduct and counit.

mod enveloping;
mod shift;
mod star;

pub use enveloping::{coproduct, coproduct_word, counit, Enveloping, GradedUElem, Tensor2, UElem, Word};
pub use shift::{shift, shift_by_sequences, ShiftImage};
pub use star::{multi_factorial, multi_indices, poisson, BTable, PbwStar};
