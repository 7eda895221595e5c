use std::sync::Arc;

use num_traits::Zero;
use serde::Serialize;

use super::algebra::LieAlgebra;
use crate::error::{Error, Result};
use crate::exact::{Poly, RatFn};

/// `g = h ⊕ m` along basis elements: `base` spans h, `complement` spans m.
///
/// The base coordinate `λ^{j+1}` is dual to `e_{base[j]}`.
#[derive(Clone, Debug, PartialEq)]
pub struct Decomposition {
    alg: Arc<LieAlgebra>,
    base: Vec<usize>,
    complement: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ReductiveViolation {
    /// `[h_i, h_j]` has a component along `e_k ∈ m`.
    BaseNotClosed { i: usize, j: usize, k: usize },
    /// `[h_i, e_j]` (`e_j ∈ m`) has a component along `e_k ∈ h`.
    ComplementNotStable { i: usize, j: usize, k: usize },
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct ReductiveReport {
    pub violations: Vec<ReductiveViolation>,
}

impl ReductiveReport {
    pub fn is_reductive(&self) -> bool {
        self.violations.is_empty()
    }
}

impl Decomposition {
    pub fn new(alg: Arc<LieAlgebra>, base: Vec<usize>, complement: Vec<usize>) -> Result<Self> {
        let n = alg.dim();
        let mut seen = vec![false; n];
        for &i in base.iter().chain(&complement) {
            if i >= n {
                return Err(Error::InvalidArgument(format!("basis index {i} out of range")));
            }
            if seen[i] {
                return Err(Error::InvalidArgument(format!("basis index {i} listed twice")));
            }
            seen[i] = true;
        }
        if let Some(missing) = seen.iter().position(|s| !s) {
            return Err(Error::InvalidArgument(format!("basis index {missing} in neither base nor complement")));
        }
        Ok(Decomposition { alg, base, complement })
    }

    pub fn algebra(&self) -> &LieAlgebra {
        &self.alg
    }

    pub fn algebra_arc(&self) -> Arc<LieAlgebra> {
        self.alg.clone()
    }

    pub fn base(&self) -> &[usize] {
        &self.base
    }

    pub fn complement(&self) -> &[usize] {
        &self.complement
    }

    /// Number of base coordinates `l = dim h`.
    pub fn rank(&self) -> usize {
        self.base.len()
    }

    /// Position of `e_k` among base elements.
    pub fn base_position(&self, k: usize) -> Option<usize> {
        self.base.iter().position(|&b| b == k)
    }

    pub fn check_reductive(&self) -> ReductiveReport {
        let mut violations = Vec::new();
        let in_base = |k: usize| self.base.contains(&k);
        for &i in &self.base {
            for &j in &self.base {
                for (k, c) in self.alg.bracket_basis(i, j) {
                    if !c.is_zero() && !in_base(*k) {
                        violations.push(ReductiveViolation::BaseNotClosed { i, j, k: *k });
                    }
                }
            }
            for &j in &self.complement {
                for (k, c) in self.alg.bracket_basis(i, j) {
                    if !c.is_zero() && in_base(*k) {
                        violations.push(ReductiveViolation::ComplementNotStable { i, j, k: *k });
                    }
                }
            }
        }
        ReductiveReport { violations }
    }

    /// `<λ, X>` for `X = Σ_k x_k e_k`: the pairing only sees the h-component.
    pub fn pair_linear(&self, terms: &[(usize, crate::exact::Rational)]) -> Poly {
        let mut p = Poly::zero();
        for (k, c) in terms {
            if let Some(pos) = self.base_position(*k) {
                p = &p + &Poly::var(pos).scale(c);
            }
        }
        p
    }

    /// `<λ, [e_i, e_j]_h>` as a linear polynomial in the base coordinates.
    pub fn pairing(&self, i: usize, j: usize) -> Poly {
        self.pair_linear(self.alg.bracket_basis(i, j))
    }

    /// The base subalgebra h with its own basis `0..l` (`h_j = e_{base[j]}`).
    pub fn base_algebra(&self) -> LieAlgebra {
        self.alg.restrict(&self.base)
    }

    pub fn base_is_abelian(&self) -> bool {
        self.base_algebra().is_abelian()
    }

    /// Linear coordinate functions `λ^j` as rational functions.
    pub fn coordinate(&self, j: usize) -> RatFn {
        RatFn::var(j)
    }
}
