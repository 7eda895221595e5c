//! Order-by-order search for dynamical twists inside a finite ansatz.
//!
//! At order `k` the cocycle and counit residuals are affine in the unknown
//! order-`k` coefficients (all other factors contribute their order-0 part,
//! which is the identity). Each residual coefficient is cleared of
//! denominators and split by λ-monomial, giving a rational linear system.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::exact::linalg::{solve_affine, AffineSolution};
use crate::exact::{Poly, RatFn, Rational};
use crate::pbw::Word;

use super::tensor::{DynTensor, Legs, TensorAlgebra};

/// One basis element `f(λ) · w_1 ⊗ w_2` of the order-`k` ansatz.
#[derive(Clone, Debug, PartialEq)]
pub struct AnsatzTerm {
    pub coefficient: RatFn,
    pub legs: [Word; 2],
}

/// Affine family of order-`k` corrections `Σ_a t_a · ansatz_a` solving the conditions.
#[derive(Clone, Debug, PartialEq)]
pub struct TwistSolutions {
    pub order: usize,
    pub coefficients: AffineSolution,
    /// The lower-order twist plus the particular correction.
    pub particular: DynTensor,
    /// Order-`k` directions that may be added freely.
    pub kernel: Vec<DynTensor>,
}

/// Residual keys: which condition, and the leg key.
type Key = (u8, Legs);

fn residual_at(ctx: &TensorAlgebra, f: &DynTensor, k: usize, classical: Option<&DynTensor>) -> Result<BTreeMap<Key, RatFn>> {
    let mut out = BTreeMap::new();
    for (legs, c) in ctx.cocycle_residual(f)?.coeff(k) {
        out.insert((0, legs.clone()), c.clone());
    }
    let (left, right) = ctx.counit_check(f)?;
    for (tag, t) in [(1u8, left), (2, right)] {
        for (legs, c) in t.coeff(k) {
            out.insert((tag, legs.clone()), c.clone());
        }
    }
    if let (1, Some(r)) = (k, classical) {
        let antisym = f.sub(&ctx.permute(f, &[2, 1])?).sub(r);
        for (legs, c) in antisym.coeff(1) {
            out.insert((3, legs.clone()), c.clone());
        }
    }
    Ok(out)
}

/// Least common multiple of the factored denominators, as a polynomial.
fn common_denominator<'a>(fs: impl Iterator<Item = &'a RatFn>) -> Poly {
    let mut atoms: Vec<(Poly, u32)> = Vec::new();
    for f in fs {
        for (p, e) in f.denominator_atoms() {
            match atoms.iter_mut().find(|(q, _)| q == p) {
                Some((_, old)) => *old = (*old).max(*e),
                None => atoms.push((p.clone(), *e)),
            }
        }
    }
    atoms.iter().fold(Poly::one(), |acc, (p, e)| &acc * &p.pow(*e))
}

/// Finds all order-`k` corrections in the span of `ansatz` that make `lower + ℏ^k Σ t_a ansatz_a`
/// satisfy the cocycle and counit conditions at order `k`. With `classical = Some(r)` and `k = 1`
/// the correction is also required to satisfy `F1 − F1_21 = r` (`r` as a two-leg tensor at order 1).
pub fn solve_twist_order(
    ctx: &TensorAlgebra,
    lower: &DynTensor,
    ansatz: &[AnsatzTerm],
    k: usize,
    classical: Option<&DynTensor>,
) -> Result<TwistSolutions> {
    if k == 0 {
        return Err(Error::InvalidArgument("order 0 is fixed to the identity".into()));
    }
    let ctx = ctx.with_order(k);
    if lower.arity() != 2 {
        return Err(Error::ArityMismatch(lower.arity(), 2));
    }
    let lower = lower.truncate(k - 1).truncate(k);
    let lifted: Vec<DynTensor> = ansatz.iter().map(|a| ctx.term(k, a.coefficient.clone(), &a.legs)).collect();

    let base = residual_at(&ctx, &lower, k, classical)?;
    let columns: Vec<BTreeMap<Key, RatFn>> = lifted
        .iter()
        .map(|a| {
            let with = residual_at(&ctx, &lower.add(a), k, classical)?;
            let keys: BTreeSet<&Key> = with.keys().chain(base.keys()).collect();
            Ok(keys
                .into_iter()
                .filter_map(|key| {
                    let d = &with.get(key).cloned().unwrap_or_default() - &base.get(key).cloned().unwrap_or_default();
                    (!d.is_zero()).then(|| (key.clone(), d))
                })
                .collect())
        })
        .collect::<Result<_>>()?;

    let keys: BTreeSet<&Key> = base.keys().chain(columns.iter().flat_map(BTreeMap::keys)).collect();
    let m = lifted.len();
    let mut rows: Vec<Vec<Rational>> = Vec::new();
    let mut rhs: Vec<Rational> = Vec::new();
    for key in keys {
        let entries: Vec<RatFn> = std::iter::once(base.get(key)).chain(columns.iter().map(|c| c.get(key))).map(|x| x.cloned().unwrap_or_default()).collect();
        let den = RatFn::from_poly(common_denominator(entries.iter()));
        let nums: Vec<Poly> = entries
            .iter()
            .map(|e| (e * &den).as_poly().cloned().ok_or_else(|| Error::InvalidArgument("denominator clearing failed".into())))
            .collect::<Result<_>>()?;
        let monos: BTreeSet<&Vec<u32>> = nums.iter().flat_map(|p| p.terms().map(|(mono, _)| mono)).collect();
        for mono in monos {
            let coeff = |p: &Poly| p.terms().find(|(q, _)| *q == mono).map(|(_, c)| c.clone()).unwrap_or_default();
            rows.push(nums[1..].iter().map(coeff).collect());
            rhs.push(-coeff(&nums[0]));
        }
    }
    let solution = solve_affine(&rows, &rhs, m).ok_or(Error::Infeasible { order: k })?;
    let combine = |t: &[Rational]| lifted.iter().zip(t).fold(DynTensor::zero(2, k), |acc, (a, c)| acc.add(&a.scale(c)));
    let particular = lower.add(&combine(&solution.particular));
    let kernel = solution.kernel.iter().map(|v| combine(v)).collect();
    Ok(TwistSolutions { order: k, coefficients: solution, particular, kernel })
}
