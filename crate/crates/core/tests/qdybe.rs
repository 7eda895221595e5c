use std::sync::Arc;

use dynrmat::dynr::{cdybe_residual, closed_form, BaseStructure, ClosedForm, DynamicalR};
use dynrmat::exact::{int, rat, Poly, RatFn, Rational};
use dynrmat::exterior::Multivector;
use dynrmat::liealg::{builtin, BuiltinName, Decomposition, LieAlgebra};
use dynrmat::qdybe::{solve_twist_order, AnsatzTerm, DynTensor, TensorAlgebra};
use dynrmat::Error;
use proptest::prelude::*;

fn abelian_xy(order: usize) -> TensorAlgebra {
    let alg = Arc::new(LieAlgebra::abelian_with_labels(vec!["h".into(), "x".into(), "y".into()]));
    TensorAlgebra::new(Decomposition::new(alg, vec![0], vec![1, 2]).unwrap(), order)
}

fn ctx_for(name: BuiltinName, order: usize) -> TensorAlgebra {
    TensorAlgebra::new(builtin(name).decomposition, order)
}

fn exp_xy(ctx: &TensorAlgebra) -> DynTensor {
    ctx.exponential_twist(&[(int(1), 1, 2)]).unwrap()
}

fn perturbed(ctx: &TensorAlgebra) -> DynTensor {
    let mut f = ctx.one(2);
    f.add_term(1, vec![vec![1], vec![2]], RatFn::var(0));
    f
}

#[test]
fn invert_geometric_series() {
    let ctx = abelian_xy(4);
    let mut a = ctx.one(2);
    a.add_term(1, vec![vec![1], vec![2]], RatFn::one());
    let inv = ctx.invert(&a).unwrap();
    for k in 0..=4usize {
        let sign = if k % 2 == 0 { int(1) } else { int(-1) };
        assert_eq!(inv.get(k, &[vec![1; k], vec![2; k]]), RatFn::constant(sign));
        assert_eq!(inv.coeff(k).len(), 1);
    }
    assert_eq!(ctx.invert(&ctx.one(2)).unwrap(), ctx.one(2));
}

#[test]
fn mul_examples() {
    let ctx = abelian_xy(2);
    let mut x = ctx.zero(1);
    x.add_term(0, vec![vec![1]], RatFn::one());
    let mut y = ctx.zero(1);
    y.add_term(0, vec![vec![2]], RatFn::one());
    assert_eq!(ctx.mul(&x, &y).unwrap().get(0, &[vec![1, 2]]), RatFn::one());
    assert_eq!(ctx.mul(&ctx.one(1), &x).unwrap(), x);

    // Heisenberg(0,1)-style base check through heisenberg(1,1): base {p2, q2, c}.
    let h = ctx_for(BuiltinName::Heisenberg(1, 1), 2);
    let lp = DynTensor::scalar(1, 2, RatFn::var(0));
    let lq = DynTensor::scalar(1, 2, RatFn::var(1));
    let prod = h.mul(&lp, &lq).unwrap();
    assert_eq!(prod.get(0, &[vec![]]), &RatFn::var(0) * &RatFn::var(1));
    assert_eq!(prod.get(1, &[vec![]]), RatFn::var(2).scale(&rat(1, 2)));
    assert!(prod.coeff(2).is_empty());
}

#[test]
fn shift_insert_examples() {
    let ctx = ctx_for(BuiltinName::Heisenberg(1, 1), 3);
    let base = ctx.decomposition().base().to_vec();
    let mut a = ctx.zero(3);
    a.add_term(0, vec![vec![], vec![0], vec![1]], RatFn::var(1));
    let s = ctx.shift_insert(&a, 1).unwrap();
    assert_eq!(s.get(0, &[vec![], vec![0], vec![1]]), RatFn::var(1));
    assert_eq!(s.get(1, &[vec![base[1]], vec![0], vec![1]]), RatFn::one());
    assert_eq!(s.len(), 2);
    let mut c = ctx.zero(3);
    c.add_term(1, vec![vec![], vec![0], vec![1]], RatFn::constant(int(3)));
    assert_eq!(ctx.shift_insert(&c, 1).unwrap(), c);
}

#[test]
fn cocycle_examples() {
    let ctx = abelian_xy(4);
    assert!(ctx.cocycle_residual(&ctx.one(2)).unwrap().is_zero());
    assert!(ctx.cocycle_residual(&exp_xy(&ctx)).unwrap().is_zero());
    let res = ctx.cocycle_residual(&perturbed(&ctx)).unwrap();
    assert_eq!(res.nonzero_orders().first(), Some(&2));
    // The shifted factor contributes (∂λ1/∂λ1) x ⊗ y ⊗ h.
    assert_eq!(res.get(2, &[vec![1], vec![2], vec![0]]), RatFn::one());
}

#[test]
fn counit_examples() {
    let ctx = abelian_xy(4);
    let (a, b) = ctx.counit_check(&exp_xy(&ctx)).unwrap();
    assert!(a.is_zero() && b.is_zero());
    let mut f = ctx.one(2);
    f.add_term(1, vec![vec![], vec![2]], RatFn::one());
    let (a, b) = ctx.counit_check(&f).unwrap();
    assert_eq!(a.get(1, &[vec![2]]), RatFn::one());
    assert!(b.is_zero());
}

#[test]
fn r_from_exponential_twist() {
    let ctx = abelian_xy(4);
    let r = ctx.r_from_twist(&exp_xy(&ctx)).unwrap();
    let mut x = ctx.zero(2);
    x.add_term(1, vec![vec![1], vec![2]], RatFn::one());
    x.add_term(1, vec![vec![2], vec![1]], RatFn::constant(int(-1)));
    assert_eq!(r, ctx.exp(&x).unwrap());
    assert!(ctx.qdybe_residual(&r).unwrap().is_zero());
}

#[test]
fn phi_agrees_with_shifted_form_iff_cocycle() {
    let ctx = abelian_xy(3);
    let f = exp_xy(&ctx);
    assert_eq!(ctx.phi(&f).unwrap(), ctx.one(3));
    assert_eq!(ctx.phi_from_shift(&f).unwrap(), ctx.one(3));
    let p = perturbed(&ctx);
    assert!(!ctx.cocycle_residual(&p).unwrap().is_zero());
    assert_ne!(ctx.phi(&p).unwrap(), ctx.phi_from_shift(&p).unwrap());
    assert_eq!(ctx.phi(&ctx.one(2)).unwrap(), ctx.one(3));
}

#[test]
fn twisted_coproduct_and_braiding() {
    let ctx = abelian_xy(4);
    let f = exp_xy(&ctx);
    let mut a = ctx.zero(1);
    a.add_term(0, vec![vec![1]], RatFn::one());
    assert!(ctx.braiding_residual(&f, &a).unwrap().is_zero());
    assert_eq!(ctx.twisted_coproduct(&ctx.one(2), &a).unwrap(), ctx.coproduct_slot(&a, 1).unwrap());
    let (l, r) = ctx.lemma_check(&f).unwrap();
    assert!(l.is_zero() && r.is_zero());
}

#[test]
fn twist_equivariance_examples() {
    let ctx = ctx_for(BuiltinName::Sl2, 1);
    let base = BaseStructure::new(ctx.decomposition());
    let mut f = ctx.one(2);
    f.add_term(1, vec![vec![1], vec![]], RatFn::var(0));
    let res = ctx.twist_equivariance_residual(&f, &base, 0).unwrap();
    assert_eq!(res.get(1, &[vec![1], vec![]]), RatFn::var(0).scale(&int(2)));

    let ab = abelian_xy(2);
    let ab_base = BaseStructure::new(ab.decomposition());
    assert!(ab.twist_equivariance_residual(&exp_xy(&ab), &ab_base, 0).unwrap().is_zero());
}

#[test]
fn classical_ladder_on_heisenberg() {
    let ctx = ctx_for(BuiltinName::Heisenberg(1, 1), 2);
    let r = closed_form(&ClosedForm::Heisenberg(1, 1)).unwrap();
    let res = ctx.qdybe_residual(&ctx.r_from_classical(r.bivector()).unwrap()).unwrap();
    assert!(res.coeff(0).is_empty() && res.coeff(1).is_empty());
    assert!(ctx.wedge_projection(&res, 2).unwrap().is_zero());

    let bad = Multivector::monomial(&[0, 2], RatFn::one());
    let bad_r = DynamicalR::new(ctx.decomposition().clone(), bad.clone()).unwrap();
    let res = ctx.qdybe_residual(&ctx.r_from_classical(&bad).unwrap()).unwrap();
    let projected = ctx.wedge_projection(&res, 2).unwrap();
    assert!(!projected.is_zero());
    assert_eq!(projected, cdybe_residual(&bad_r).scale(&int(-6)));
}

#[test]
fn solver_on_abelian_algebra_accepts_the_whole_ansatz() {
    let ctx = abelian_xy(1);
    let ansatz: Vec<AnsatzTerm> =
        [(1, 1), (1, 2), (2, 1), (2, 2)].iter().map(|&(a, b)| AnsatzTerm { coefficient: RatFn::one(), legs: [vec![a], vec![b]] }).collect();
    let sol = solve_twist_order(&ctx, &ctx.one(2), &ansatz, 1, None).unwrap();
    assert_eq!(sol.kernel.len(), 4);
    assert!(sol.coefficients.particular.iter().all(|c| *c == Rational::from_integer(0.into())));
}

#[test]
fn solver_is_deterministic_and_small_second_order_ansatz_is_infeasible() {
    let ctx = ctx_for(BuiltinName::Sl2, 2);
    let r = closed_form(&ClosedForm::SimpleCartan(BuiltinName::Sl2)).unwrap();
    let r_tensor = ctx.with_order(1).iota(r.bivector(), 1).unwrap();
    let inv = RatFn::var(0).inv().unwrap();
    let ansatz = [
        AnsatzTerm { coefficient: inv.clone(), legs: [vec![1], vec![2]] },
        AnsatzTerm { coefficient: inv.clone(), legs: [vec![2], vec![1]] },
    ];
    let a = solve_twist_order(&ctx, &ctx.one(2), &ansatz, 1, Some(&r_tensor)).unwrap();
    let b = solve_twist_order(&ctx, &ctx.one(2), &ansatz, 1, Some(&r_tensor)).unwrap();
    assert_eq!(a, b);
    assert!(ctx.with_order(1).cocycle_residual(&a.particular).unwrap().is_zero());

    // Order 2 over words of length ≤ 2 in each leg with coefficient λ1^{-2}, on top of
    // the particular first-order solution: this ansatz is too small.
    let words: Vec<Vec<usize>> = vec![vec![], vec![0], vec![1], vec![2], vec![0, 0], vec![0, 1], vec![0, 2], vec![1, 1], vec![1, 2], vec![2, 2]];
    let inv2 = inv.pow(2);
    let mut ansatz2 = Vec::new();
    for u in &words {
        for v in &words {
            if u.len() + v.len() <= 2 {
                ansatz2.push(AnsatzTerm { coefficient: inv2.clone(), legs: [u.clone(), v.clone()] });
            }
        }
    }
    assert_eq!(solve_twist_order(&ctx, &a.particular, &ansatz2, 2, None).unwrap_err(), Error::Infeasible { order: 2 });
}

fn arb_tensor(ctx: &TensorAlgebra, arity: usize, free: usize) -> impl Strategy<Value = DynTensor> {
    let ctx = ctx.clone();
    let n = ctx.decomposition().algebra().dim();
    let rank = ctx.decomposition().rank();
    let term = (1usize..=2, prop::collection::vec(0..n, arity), -3i64..=3, 0..rank, 0u32..=1, 1i64..=3);
    prop::collection::vec(term, 1..4).prop_map(move |ts| {
        let mut f = ctx.one(arity);
        for (k, gens, c, var, p, shift) in ts {
            let den = &Poly::var(var) + &Poly::constant(int(shift));
            let coef = RatFn::from_parts(Poly::var(var).pow(p).scale(&int(c)), &den).unwrap();
            let words: Vec<Vec<usize>> = gens.iter().enumerate().map(|(s, &g)| if s + 1 == free { vec![] } else { vec![g] }).collect();
            f = f.add(&ctx.term(k, coef, &words));
        }
        f
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(5))]

    #[test]
    fn place_respects_mul(a in arb_tensor(&ctx_for(BuiltinName::Sl2, 2), 2, 0), b in arb_tensor(&ctx_for(BuiltinName::Sl2, 2), 2, 0)) {
        let ctx = ctx_for(BuiltinName::Sl2, 2);
        let lhs = ctx.place(&ctx.mul(&a, &b).unwrap(), &[3, 1], 3).unwrap();
        let rhs = ctx.mul(&ctx.place(&a, &[3, 1], 3).unwrap(), &ctx.place(&b, &[3, 1], 3).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn r_first_order_is_antisymmetric_part(f in arb_tensor(&ctx_for(BuiltinName::Sl2, 2), 2, 0)) {
        let ctx = ctx_for(BuiltinName::Sl2, 2);
        let r = ctx.r_from_twist(&f).unwrap();
        let expected = f.sub(&ctx.permute(&f, &[2, 1]).unwrap()).order_part(1);
        prop_assert_eq!(r.order_part(1), expected);
    }

    #[test]
    fn qdybe_residual_vanishes_below_second_order(f in arb_tensor(&ctx_for(BuiltinName::Sl2, 2), 2, 0)) {
        let ctx = ctx_for(BuiltinName::Sl2, 2);
        let r = ctx.r_from_twist(&f).unwrap();
        let res = ctx.qdybe_residual(&r).unwrap();
        prop_assert!(res.coeff(0).is_empty() && res.coeff(1).is_empty());
    }

    #[test]
    fn shift_insert_commutes_with_mul_and_invert(
        a in arb_tensor(&ctx_for(BuiltinName::Heisenberg(1, 1), 3), 3, 1),
        b in arb_tensor(&ctx_for(BuiltinName::Heisenberg(1, 1), 3), 3, 1),
    ) {
        let ctx = ctx_for(BuiltinName::Heisenberg(1, 1), 3);
        let lhs = ctx.shift_insert(&ctx.mul(&a, &b).unwrap(), 1).unwrap();
        let rhs = ctx.mul(&ctx.shift_insert(&a, 1).unwrap(), &ctx.shift_insert(&b, 1).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
        let inv_then_shift = ctx.shift_insert(&ctx.invert(&a).unwrap(), 1).unwrap();
        let shift_then_inv = ctx.invert(&ctx.shift_insert(&a, 1).unwrap()).unwrap();
        prop_assert_eq!(inv_then_shift, shift_then_inv);
    }

    #[test]
    fn exponential_twists_satisfy_the_pipeline(t in prop::collection::vec((-4i64..=4, 1i64..=3, 1usize..3, 1usize..3), 1..3)) {
        let ctx = abelian_xy(4);
        let pairs: Vec<_> = t.iter().map(|&(p, q, a, b)| (rat(p, q), a, b)).collect();
        let f = ctx.exponential_twist(&pairs).unwrap();
        prop_assert!(ctx.cocycle_residual(&f).unwrap().is_zero());
        let (l, r) = ctx.counit_check(&f).unwrap();
        prop_assert!(l.is_zero() && r.is_zero());
        let big_r = ctx.r_from_twist(&f).unwrap();
        prop_assert!(ctx.qdybe_residual(&big_r).unwrap().is_zero());
        prop_assert!(ctx.shifted_r_residual(&f).unwrap().is_zero());
    }
}
