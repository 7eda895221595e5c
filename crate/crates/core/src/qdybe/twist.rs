//! Dynamical twists: the cocycle and counit conditions, the induced R-matrix,
//! the quantum dynamical Yang–Baxter residual, the associator-type element Φ
//! and the identities relating them.

use crate::dynr::BaseStructure;
use crate::error::{Error, Result};
use crate::exact::{RatFn, Rational};
use crate::exterior::Multivector;

use super::tensor::{DynTensor, TensorAlgebra};

/// All permutations of `0..n` with their signs.
fn permutations(n: usize) -> Vec<(Vec<usize>, i64)> {
    if n == 0 {
        return vec![(Vec::new(), 1)];
    }
    let mut out = Vec::new();
    for (p, s) in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            let sign = if (p.len() - pos) % 2 == 0 { s } else { -s };
            out.push((q, sign));
        }
    }
    out
}

impl TensorAlgebra {
    /// `ι(x_1 ∧ … ∧ x_k) = Σ_σ sgn σ x_σ(1) ⊗ … ⊗ x_σ(k)` placed at `ℏ^order`, for a homogeneous multivector.
    pub fn iota(&self, m: &Multivector, hbar: usize) -> Result<DynTensor> {
        let grade = m.homogeneous_grade().ok_or_else(|| Error::InvalidArgument("multivector is not homogeneous".into()))?;
        let mut out = self.zero(grade);
        let perms = permutations(grade);
        for (word, c) in m.terms() {
            for (p, s) in &perms {
                let legs = p.iter().map(|&i| vec![word[i]]).collect();
                out.add_term(hbar, legs, c.scale(&Rational::from_integer((*s).into())));
            }
        }
        Ok(out)
    }

    /// Projects terms whose legs are all single generators onto `Λ g`, `x_1 ⊗ … ⊗ x_k ↦ x_1 ∧ … ∧ x_k`,
    /// at order `hbar`. Fails if some term has a leg that is not a single generator.
    pub fn wedge_projection(&self, t: &DynTensor, hbar: usize) -> Result<Multivector> {
        let mut out = Multivector::zero();
        for (legs, c) in t.coeff(hbar) {
            if legs.iter().any(|w| w.len() != 1) {
                return Err(Error::InvalidArgument("tensor has legs that are not single generators".into()));
            }
            out.add_term(legs.iter().map(|w| w[0]).collect(), c.clone());
        }
        Ok(out)
    }

    /// `exp(X) = Σ X^k / k!` for `X = O(ℏ)`.
    pub fn exp(&self, x: &DynTensor) -> Result<DynTensor> {
        if !x.coeff(0).is_empty() {
            return Err(Error::InvalidArgument("exponent must vanish at order 0".into()));
        }
        let mut power = self.one(x.arity()).truncate(x.order());
        let mut out = power.clone();
        for k in 1..=self.order().min(x.order()) {
            power = self.mul(&power, x)?.scale(&Rational::new(1.into(), (k as i64).into()));
            out = out.add(&power);
        }
        Ok(out)
    }

    /// `exp(ℏ Σ_a t_a x_a ⊗ y_a)` for generator pairs `(t_a, x_a, y_a)`.
    pub fn exponential_twist(&self, pairs: &[(Rational, usize, usize)]) -> Result<DynTensor> {
        let mut x = self.zero(2);
        for (t, a, b) in pairs {
            x = x.add(&self.term(1, RatFn::constant(t.clone()), &[vec![*a], vec![*b]]));
        }
        self.exp(&x)
    }

    /// `1 ⊗ 1 + ℏ ι(r)`.
    pub fn r_from_classical(&self, r: &Multivector) -> Result<DynTensor> {
        Ok(self.one(2).add(&self.iota(r, 1)?))
    }

    /// `(Δ⊗id)F ★ F12(λ + ℏh^{(3)}) − (id⊗Δ)F ★ F23`.
    pub fn cocycle_residual(&self, f: &DynTensor) -> Result<DynTensor> {
        let lhs = self.mul(&self.coproduct_slot(f, 1)?, &self.shift_insert(&self.place(f, &[1, 2], 3)?, 3)?)?;
        let rhs = self.mul(&self.coproduct_slot(f, 2)?, &self.place(f, &[2, 3], 3)?)?;
        Ok(lhs.sub(&rhs))
    }

    /// `((ε⊗id)F − 1, (id⊗ε)F − 1)`.
    pub fn counit_check(&self, f: &DynTensor) -> Result<(DynTensor, DynTensor)> {
        let one = self.one(1).truncate(f.order());
        Ok((self.counit_slot(f, 1)?.sub(&one), self.counit_slot(f, 2)?.sub(&one)))
    }

    /// `R = F21^{-1} ★ F12`.
    pub fn r_from_twist(&self, f: &DynTensor) -> Result<DynTensor> {
        let f21 = self.permute(f, &[2, 1])?;
        self.mul(&self.invert(&f21)?, f)
    }

    /// `R12 ★ R13(λ+ℏh^{(2)}) ★ R23 − R23(λ+ℏh^{(1)}) ★ R13 ★ R12(λ+ℏh^{(3)})`.
    pub fn qdybe_residual(&self, r: &DynTensor) -> Result<DynTensor> {
        let r12 = self.place(r, &[1, 2], 3)?;
        let r13 = self.place(r, &[1, 3], 3)?;
        let r23 = self.place(r, &[2, 3], 3)?;
        let lhs = self.mul_all(&[&r12, &self.shift_insert(&r13, 2)?, &r23])?;
        let rhs = self.mul_all(&[&self.shift_insert(&r23, 1)?, &r13, &self.shift_insert(&r12, 3)?])?;
        Ok(lhs.sub(&rhs))
    }

    /// `Φ = F23^{-1} ★ (id⊗Δ)F^{-1} ★ (Δ⊗id)F ★ F12`.
    pub fn phi(&self, f: &DynTensor) -> Result<DynTensor> {
        let f23 = self.place(f, &[2, 3], 3)?;
        let f12 = self.place(f, &[1, 2], 3)?;
        let id_delta = self.coproduct_slot(f, 2)?;
        let delta_id = self.coproduct_slot(f, 1)?;
        self.mul_all(&[&self.invert(&f23)?, &self.invert(&id_delta)?, &delta_id, &f12])
    }

    /// `F12(λ+ℏh^{(3)})^{-1} ★ F12`, equal to Φ when F satisfies the cocycle condition.
    pub fn phi_from_shift(&self, f: &DynTensor) -> Result<DynTensor> {
        let f12 = self.place(f, &[1, 2], 3)?;
        self.mul(&self.invert(&self.shift_insert(&f12, 3)?)?, &f12)
    }

    /// `Δ̃(a) = F^{-1} ★ Δ(a) ★ F` for a one-leg tensor `a`.
    pub fn twisted_coproduct(&self, f: &DynTensor, a: &DynTensor) -> Result<DynTensor> {
        if a.arity() != 1 {
            return Err(Error::ArityMismatch(a.arity(), 1));
        }
        self.mul_all(&[&self.invert(f)?, &self.coproduct_slot(a, 1)?, f])
    }

    /// `Δ̃^{op}(a) ★ R − R ★ Δ̃(a)`.
    pub fn braiding_residual(&self, f: &DynTensor, a: &DynTensor) -> Result<DynTensor> {
        let r = self.r_from_twist(f)?;
        let d = self.twisted_coproduct(f, a)?;
        let op = self.permute(&d, &[2, 1])?;
        Ok(self.mul(&op, &r)?.sub(&self.mul(&r, &d)?))
    }

    /// The two hexagon-type identities for `R = F21^{-1}F`:
    /// `(Δ̃⊗id)R = F12^{-1}(Δ⊗id)R F12 = Φ231 R13 Φ132^{-1} R23 Φ123` and
    /// `(id⊗Δ̃)R = F23^{-1}(id⊗Δ)R F23 = Φ312^{-1} R13 Φ213 R12 Φ123^{-1}`; returns both differences.
    pub fn lemma_check(&self, f: &DynTensor) -> Result<(DynTensor, DynTensor)> {
        let r = self.r_from_twist(f)?;
        let phi = self.phi(f)?;
        let f12 = self.place(f, &[1, 2], 3)?;
        let f23 = self.place(f, &[2, 3], 3)?;
        let r12 = self.place(&r, &[1, 2], 3)?;
        let r13 = self.place(&r, &[1, 3], 3)?;
        let r23 = self.place(&r, &[2, 3], 3)?;
        let p = |idx: [usize; 3]| self.permute(&phi, &idx);
        let first_lhs = self.mul_all(&[&self.invert(&f12)?, &self.coproduct_slot(&r, 1)?, &f12])?;
        let first_rhs = self.mul_all(&[&p([2, 3, 1])?, &r13, &self.invert(&p([1, 3, 2])?)?, &r23, &phi])?;
        let second_lhs = self.mul_all(&[&self.invert(&f23)?, &self.coproduct_slot(&r, 2)?, &f23])?;
        let second_rhs = self.mul_all(&[&self.invert(&p([3, 1, 2])?)?, &r13, &p([2, 1, 3])?, &r12, &self.invert(&phi)?])?;
        Ok((first_lhs.sub(&first_rhs), second_lhs.sub(&second_rhs)))
    }

    /// `Φ213 ★ R12 ★ Φ123^{-1} − R12(λ+ℏh^{(3)})`, which vanishes when F is a dynamical twist.
    pub fn shifted_r_residual(&self, f: &DynTensor) -> Result<DynTensor> {
        let r = self.r_from_twist(f)?;
        let phi = self.phi(f)?;
        let r12 = self.place(&r, &[1, 2], 3)?;
        let lhs = self.mul_all(&[&self.permute(&phi, &[2, 1, 3])?, &r12, &self.invert(&phi)?])?;
        Ok(lhs.sub(&self.shift_insert(&r12, 3)?))
    }

    /// `Σ_legs ad(h_i) F + Σ_j f_ij(λ) ∂F/∂λ^j` for base direction `i` (0-based).
    pub fn twist_equivariance_residual(&self, f: &DynTensor, base: &BaseStructure, i: usize) -> Result<DynTensor> {
        let dec = self.decomposition();
        if i >= dec.rank() || base.rank() != dec.rank() {
            return Err(Error::InvalidArgument(format!("base direction {i} out of range")));
        }
        let mut out = self.ad_base(f, i);
        for j in 0..dec.rank() {
            let c = base.f(i, j);
            if !c.is_zero() {
                let c = RatFn::from_poly(c.clone());
                out = out.add(&f.diff(j).map(|x| x * &c));
            }
        }
        Ok(out)
    }
}
