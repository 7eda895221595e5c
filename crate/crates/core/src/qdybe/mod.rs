//! Quantum dynamical twists and R-matrices in `C(h*) ⊗ (Ug)^{⊗n}[[ℏ]]`.

mod solver;
mod tensor;
mod twist;

pub use solver::{solve_twist_order, AnsatzTerm, TwistSolutions};
pub use tensor::{DynTensor, Legs, TensorAlgebra, DEFAULT_DEGREE_BUDGET};
