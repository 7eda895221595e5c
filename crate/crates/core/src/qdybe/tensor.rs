//! ℏ-series tensors in `C(h*) ⊗ (Ug)^{⊗n}[[ℏ]]` and their algebra operations.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exact::{ratfn_is_zero, RatFn, Rational, Verdict, ZeroTest};
use crate::liealg::Decomposition;
use crate::pbw::{coproduct_word, shift, Enveloping, PbwStar, UElem, Word};

/// One leg word per slot.
pub type Legs = Vec<Word>;

/// `Σ_k ℏ^k Σ f_{k,legs}(λ) · w_1 ⊗ … ⊗ w_n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DynTensor {
    arity: usize,
    coeffs: Vec<BTreeMap<Legs, RatFn>>,
}

fn accumulate(map: &mut BTreeMap<Legs, RatFn>, legs: Legs, c: RatFn) {
    if c.is_zero() {
        return;
    }
    let sum = match map.remove(&legs) {
        Some(old) => &old + &c,
        None => c,
    };
    if !sum.is_zero() {
        map.insert(legs, sum);
    }
}

fn merge_into(target: &mut BTreeMap<Legs, RatFn>, other: BTreeMap<Legs, RatFn>) {
    for (legs, c) in other {
        accumulate(target, legs, c);
    }
}

impl DynTensor {
    pub fn zero(arity: usize, order: usize) -> Self {
        DynTensor { arity, coeffs: vec![BTreeMap::new(); order + 1] }
    }

    /// `1^{⊗n}`.
    pub fn one(arity: usize, order: usize) -> Self {
        DynTensor::scalar(arity, order, RatFn::one())
    }

    /// `f(λ) · 1^{⊗n}`.
    pub fn scalar(arity: usize, order: usize, f: RatFn) -> Self {
        let mut t = DynTensor::zero(arity, order);
        t.add_term(0, vec![Vec::new(); arity], f);
        t
    }

    /// Adds `ℏ^k f · legs`; legs must be normal-ordered words (orders beyond the truncation are dropped).
    pub fn add_term(&mut self, k: usize, legs: Legs, f: RatFn) {
        assert_eq!(legs.len(), self.arity, "leg count must equal arity");
        if k < self.coeffs.len() {
            accumulate(&mut self.coeffs[k], legs, f);
        }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, k: usize) -> &BTreeMap<Legs, RatFn> {
        &self.coeffs[k]
    }

    pub fn get(&self, k: usize, legs: &[Word]) -> RatFn {
        self.coeffs.get(k).and_then(|m| m.get(legs)).cloned().unwrap_or_else(RatFn::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (usize, &Legs, &RatFn)> {
        self.coeffs.iter().enumerate().flat_map(|(k, m)| m.iter().map(move |(l, c)| (k, l, c)))
    }

    pub fn len(&self) -> usize {
        self.coeffs.iter().map(BTreeMap::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Coefficients are canonical rational functions, so this is exact.
    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(BTreeMap::is_empty)
    }

    /// Orders `k` with a nonzero coefficient.
    pub fn nonzero_orders(&self) -> Vec<usize> {
        (0..self.coeffs.len()).filter(|&k| !self.coeffs[k].is_empty()).collect()
    }

    /// Drops orders above `order`, padding with zeros when `order` exceeds the current one.
    pub fn truncate(&self, order: usize) -> DynTensor {
        DynTensor { arity: self.arity, coeffs: self.coeffs.iter().take(order + 1).cloned().chain(std::iter::repeat_with(BTreeMap::new)).take(order + 1).collect() }
    }

    /// Only the `ℏ^k` part.
    pub fn order_part(&self, k: usize) -> DynTensor {
        let mut t = DynTensor::zero(self.arity, self.order());
        if k <= self.order() {
            t.coeffs[k] = self.coeffs[k].clone();
        }
        t
    }

    pub fn add(&self, rhs: &DynTensor) -> DynTensor {
        assert_eq!(self.arity, rhs.arity, "arity mismatch");
        let order = self.order().min(rhs.order());
        let mut out = self.truncate(order);
        for k in 0..=order {
            merge_into(&mut out.coeffs[k], rhs.coeffs[k].clone());
        }
        out
    }

    pub fn neg(&self) -> DynTensor {
        self.map(|c| -c)
    }

    pub fn sub(&self, rhs: &DynTensor) -> DynTensor {
        self.add(&rhs.neg())
    }

    pub fn scale(&self, c: &Rational) -> DynTensor {
        self.map(|x| x.scale(c))
    }

    /// Multiplies every coefficient by `ℏ` (dropping the top order).
    pub fn times_hbar(&self) -> DynTensor {
        let mut out = DynTensor::zero(self.arity, self.order());
        for k in 0..self.order() {
            out.coeffs[k + 1] = self.coeffs[k].clone();
        }
        out
    }

    pub fn map(&self, f: impl Fn(&RatFn) -> RatFn) -> DynTensor {
        let coeffs = self.coeffs.iter().map(|m| m.iter().map(|(l, c)| (l.clone(), f(c))).filter(|(_, c)| !c.is_zero()).collect()).collect();
        DynTensor { arity: self.arity, coeffs }
    }

    /// `∂/∂λ^j` coefficientwise.
    pub fn diff(&self, j: usize) -> DynTensor {
        self.map(|c| c.diff(j))
    }

    pub fn max_leg_degree(&self) -> usize {
        self.terms().flat_map(|(_, legs, _)| legs.iter().map(Vec::len)).max().unwrap_or(0)
    }

    fn is_unital(&self) -> bool {
        let empty: Legs = vec![Vec::new(); self.arity];
        self.coeffs[0].len() == 1 && self.coeffs[0].get(&empty).is_some_and(RatFn::is_one)
    }

    /// Per-coefficient zero verdicts in a deterministic order.
    pub fn verdicts(&self, strategy: ZeroTest) -> Vec<(usize, Legs, Verdict)> {
        let terms: Vec<_> = self.terms().collect();
        terms.par_iter().map(|(k, legs, c)| (*k, (*legs).clone(), ratfn_is_zero(c, strategy))).collect()
    }

    pub fn fmt_with(&self, f: &mut fmt::Formatter<'_>, labels: &[String]) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, legs, c) in self.terms() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let legs: Vec<String> = legs
                .iter()
                .map(|w| if w.is_empty() { "1".to_string() } else { w.iter().map(|&i| labels[i].as_str()).collect::<Vec<_>>().join("*") })
                .collect();
            write!(f, "hbar^{k}*({c})*[{}]", legs.join(" (x) "))?;
        }
        Ok(())
    }

    pub fn display<'a>(&'a self, labels: &'a [String]) -> impl fmt::Display + 'a {
        struct D<'a>(&'a DynTensor, &'a [String]);
        impl fmt::Display for D<'_> {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                self.0.fmt_with(f, self.1)
            }
        }
        D(self, labels)
    }
}

/// Default bound on the word length of any leg.
pub const DEFAULT_DEGREE_BUDGET: usize = 48;

/// Everything the tensor operations need: the decomposition, the enveloping
/// engine of g, the star product of the base, and the truncation order.
#[derive(Clone, Debug)]
pub struct TensorAlgebra {
    dec: Decomposition,
    env: Arc<Enveloping>,
    star: Arc<PbwStar>,
    order: usize,
    degree_budget: usize,
}

impl TensorAlgebra {
    pub fn new(dec: Decomposition, order: usize) -> Self {
        let env = Arc::new(Enveloping::new(dec.algebra_arc()));
        let star = PbwStar::for_decomposition(&dec);
        TensorAlgebra { dec, env, star, order, degree_budget: DEFAULT_DEGREE_BUDGET }
    }

    pub fn with_degree_budget(mut self, budget: usize) -> Self {
        self.degree_budget = budget;
        self
    }

    /// Same engines, different truncation order.
    pub fn with_order(&self, order: usize) -> Self {
        TensorAlgebra { order, ..self.clone() }
    }

    pub fn decomposition(&self) -> &Decomposition {
        &self.dec
    }

    pub fn enveloping(&self) -> &Enveloping {
        &self.env
    }

    pub fn star(&self) -> &PbwStar {
        &self.star
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn labels(&self) -> &[String] {
        self.dec.algebra().labels()
    }

    pub fn one(&self, arity: usize) -> DynTensor {
        DynTensor::one(arity, self.order)
    }

    pub fn zero(&self, arity: usize) -> DynTensor {
        DynTensor::zero(arity, self.order)
    }

    /// Normal-orders arbitrary leg words into a tensor `ℏ^k f · w_1 ⊗ … ⊗ w_n`.
    pub fn term(&self, k: usize, f: RatFn, words: &[Word]) -> DynTensor {
        let mut slots: Vec<UElem> = words.iter().map(|w| self.env.normal_order(w)).collect();
        let mut out = self.zero(words.len());
        let mut partial: Vec<(Legs, Rational)> = vec![(Vec::new(), Rational::from_integer(1.into()))];
        for u in slots.drain(..) {
            partial = partial
                .into_iter()
                .flat_map(|(legs, c)| u.terms().map(move |(w, v)| ([legs.clone(), vec![w.clone()]].concat(), &c * v)).collect::<Vec<_>>())
                .collect();
        }
        for (legs, c) in partial {
            out.add_term(k, legs, f.scale(&c));
        }
        out
    }

    fn check_budget(&self, legs: &[Word]) -> Result<()> {
        match legs.iter().map(Vec::len).max() {
            Some(d) if d > self.degree_budget => Err(Error::DegreeBudgetExceeded { degree: d, budget: self.degree_budget }),
            _ => Ok(()),
        }
    }

    fn check_arity(&self, a: &DynTensor, b: &DynTensor) -> Result<()> {
        if a.arity != b.arity {
            return Err(Error::ArityMismatch(a.arity, b.arity));
        }
        Ok(())
    }

    /// Slotwise product of leg words, expanded over the normal-ordered results.
    fn mul_legs(&self, a: &[Word], b: &[Word]) -> Result<Vec<(Legs, Rational)>> {
        let mut partial: Vec<(Legs, Rational)> = vec![(Vec::with_capacity(a.len()), Rational::from_integer(1.into()))];
        for (x, y) in a.iter().zip(b) {
            let u = if x.is_empty() {
                UElem::monomial(y.clone(), Rational::from_integer(1.into()))
            } else {
                self.env.mul_words(x, y)
            };
            let mut next = Vec::with_capacity(partial.len() * u.len());
            for (legs, c) in &partial {
                for (w, v) in u.terms() {
                    let mut l = legs.clone();
                    l.push(w.clone());
                    next.push((l, c * v));
                }
            }
            partial = next;
        }
        for (legs, _) in &partial {
            self.check_budget(legs)?;
        }
        Ok(partial)
    }

    /// Star product of coefficients times slotwise products of legs, truncated at the context order.
    pub fn mul(&self, a: &DynTensor, b: &DynTensor) -> Result<DynTensor> {
        self.check_arity(a, b)?;
        let order = self.order.min(a.order()).min(b.order());
        let a_terms: Vec<_> = a.terms().filter(|(k, _, _)| *k <= order).collect();
        let partials: Vec<Result<Vec<BTreeMap<Legs, RatFn>>>> = a_terms
            .par_iter()
            .map(|(i, la, f)| {
                let mut local = vec![BTreeMap::new(); order + 1];
                for (j, lb, g) in b.terms() {
                    if i + j > order {
                        continue;
                    }
                    let scalars = self.star.star_ratfn(f, g, order - i - j)?;
                    let legs = self.mul_legs(la, lb)?;
                    for (s, coef) in scalars.coeffs().iter().enumerate() {
                        if coef.is_zero() {
                            continue;
                        }
                        for (l, c) in &legs {
                            accumulate(&mut local[i + j + s], l.clone(), coef.scale(c));
                        }
                    }
                }
                Ok(local)
            })
            .collect();
        let mut out = DynTensor::zero(a.arity, order);
        for p in partials {
            for (k, m) in p?.into_iter().enumerate() {
                merge_into(&mut out.coeffs[k], m);
            }
        }
        Ok(out)
    }

    /// Product of several tensors, left to right.
    pub fn mul_all(&self, factors: &[&DynTensor]) -> Result<DynTensor> {
        let (first, rest) = factors.split_first().ok_or_else(|| Error::InvalidArgument("empty product".into()))?;
        let mut acc = (*first).clone();
        for f in rest {
            acc = self.mul(&acc, f)?;
        }
        Ok(acc)
    }

    /// `Σ_k (1 − A)^k`, valid for `A = 1 + O(ℏ)`.
    pub fn invert(&self, a: &DynTensor) -> Result<DynTensor> {
        if !a.is_unital() {
            return Err(Error::NotUnital);
        }
        let order = self.order.min(a.order());
        let x = self.one(a.arity).truncate(order).sub(a);
        let mut power = self.one(a.arity).truncate(order);
        let mut inv = power.clone();
        for _ in 0..order {
            power = self.mul(&power, &x)?;
            if power.is_zero() {
                break;
            }
            inv = inv.add(&power);
        }
        Ok(inv)
    }

    /// Moves leg `k` of `a` to slot `slots[k]` (1-based) of an `n`-leg tensor; other slots get 1.
    pub fn place(&self, a: &DynTensor, slots: &[usize], n: usize) -> Result<DynTensor> {
        if slots.len() != a.arity {
            return Err(Error::ArityMismatch(slots.len(), a.arity));
        }
        for (p, &s) in slots.iter().enumerate() {
            if s == 0 || s > n {
                return Err(Error::SlotOutOfRange { slot: s, arity: n });
            }
            if slots[..p].contains(&s) {
                return Err(Error::InvalidArgument(format!("slot {s} used twice")));
            }
        }
        let mut out = DynTensor::zero(n, a.order());
        for (k, legs, c) in a.terms() {
            let mut new = vec![Vec::new(); n];
            for (leg, &s) in legs.iter().zip(slots) {
                new[s - 1] = leg.clone();
            }
            out.add_term(k, new, c.clone());
        }
        Ok(out)
    }

    /// `A_{ijk}`: slot `s` receives leg `idx[s]` of `a` (1-based), e.g. `(2,1,3)` swaps the first two legs.
    pub fn permute(&self, a: &DynTensor, idx: &[usize]) -> Result<DynTensor> {
        let n = a.arity;
        if idx.len() != n {
            return Err(Error::ArityMismatch(idx.len(), n));
        }
        let mut slots = vec![0; n];
        for (s, &leg) in idx.iter().enumerate() {
            if leg == 0 || leg > n {
                return Err(Error::SlotOutOfRange { slot: leg, arity: n });
            }
            slots[leg - 1] = s + 1;
        }
        if slots.contains(&0) {
            return Err(Error::InvalidArgument(format!("{idx:?} is not a permutation")));
        }
        self.place(a, &slots, n)
    }

    /// Replaces every coefficient `f(λ)` by `f(λ + ℏh)` with the Uh part placed in `slot` (1-based).
    pub fn shift_insert(&self, a: &DynTensor, slot: usize) -> Result<DynTensor> {
        if slot == 0 || slot > a.arity {
            return Err(Error::SlotOutOfRange { slot, arity: a.arity });
        }
        if a.terms().any(|(_, legs, _)| !legs[slot - 1].is_empty()) {
            return Err(Error::SlotNotFree(slot));
        }
        let order = self.order.min(a.order());
        let base = self.dec.base();
        let mut out = DynTensor::zero(a.arity, order);
        for (k, legs, c) in a.terms() {
            if k > order {
                continue;
            }
            if c.as_constant().is_some() {
                out.add_term(k, legs.clone(), c.clone());
                continue;
            }
            let image = shift(c, order - k, &self.env, base);
            for (j, part) in image.coeffs.into_iter().enumerate() {
                for (w, f) in part {
                    let mut new = legs.clone();
                    new[slot - 1] = w;
                    out.add_term(k + j, new, f);
                }
            }
        }
        Ok(out)
    }

    /// Applies `Δ` to the leg in `slot` (1-based), producing one more leg.
    pub fn coproduct_slot(&self, a: &DynTensor, slot: usize) -> Result<DynTensor> {
        if slot == 0 || slot > a.arity {
            return Err(Error::SlotOutOfRange { slot, arity: a.arity });
        }
        let mut out = DynTensor::zero(a.arity + 1, a.order());
        for (k, legs, c) in a.terms() {
            for (x, y) in coproduct_word(&legs[slot - 1]) {
                let mut new = legs[..slot - 1].to_vec();
                new.push(x);
                new.push(y);
                new.extend_from_slice(&legs[slot..]);
                out.add_term(k, new, c.clone());
            }
        }
        Ok(out)
    }

    /// Applies `ε` to the leg in `slot`, removing it.
    pub fn counit_slot(&self, a: &DynTensor, slot: usize) -> Result<DynTensor> {
        if slot == 0 || slot > a.arity {
            return Err(Error::SlotOutOfRange { slot, arity: a.arity });
        }
        let mut out = DynTensor::zero(a.arity - 1, a.order());
        for (k, legs, c) in a.terms() {
            if legs[slot - 1].is_empty() {
                let mut new = legs.clone();
                new.remove(slot - 1);
                out.add_term(k, new, c.clone());
            }
        }
        Ok(out)
    }

    /// `Σ_legs (ad_{h_i} on that leg)` with `h_i = e_{base[i]}`, as a derivation on each Ug factor.
    pub fn ad_base(&self, a: &DynTensor, i: usize) -> DynTensor {
        let h = self.dec.base()[i];
        let mut out = DynTensor::zero(a.arity, a.order());
        for (k, legs, c) in a.terms() {
            for s in 0..a.arity {
                let image = self.env.ad(h, &UElem::monomial(legs[s].clone(), Rational::from_integer(1.into())));
                for (w, v) in image.terms() {
                    let mut new = legs.clone();
                    new[s] = w.clone();
                    out.add_term(k, new, c.scale(v));
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::int;
    use crate::liealg::{builtin, BuiltinName};

    fn sl2(order: usize) -> TensorAlgebra {
        TensorAlgebra::new(builtin(BuiltinName::Sl2).decomposition, order)
    }

    #[test]
    fn term_normal_orders_its_legs() {
        let ctx = sl2(2);
        // f·e = e·f − h, one leg
        let t = ctx.term(0, RatFn::one(), &[vec![2, 1]]);
        assert_eq!(t.get(0, &[vec![1, 2]]), RatFn::one());
        assert_eq!(t.get(0, &[vec![0]]), RatFn::constant(int(-1)));
        assert_eq!(t.len(), 2);
    }

    #[test]
    fn truncate_and_order_part() {
        let ctx = sl2(3);
        let mut t = ctx.one(2);
        t.add_term(2, vec![vec![1], vec![2]], RatFn::var(0));
        assert_eq!(t.nonzero_orders(), vec![0, 2]);
        assert_eq!(t.truncate(1).order(), 1);
        assert_eq!(t.truncate(1).nonzero_orders(), vec![0]);
        assert_eq!(t.truncate(5).order(), 5);
        assert_eq!(t.order_part(2).len(), 1);
        assert_eq!(t.times_hbar().nonzero_orders(), vec![1, 3]);
    }

    #[test]
    fn hopf_structure_on_legs() {
        let ctx = sl2(1);
        let mut t = ctx.zero(1);
        t.add_term(0, vec![vec![1, 2]], RatFn::one());
        let d = ctx.coproduct_slot(&t, 1).unwrap();
        // Δ(ef) = ef⊗1 + e⊗f + f⊗e + 1⊗ef
        assert_eq!(d.len(), 4);
        assert_eq!(d.get(0, &[vec![2], vec![1]]), RatFn::one());
        assert!(ctx.counit_slot(&d, 1).unwrap().sub(&t).is_zero());
        assert!(ctx.counit_slot(&d, 2).unwrap().sub(&t).is_zero());
        assert_eq!(ctx.coproduct_slot(&t, 2).unwrap_err(), Error::SlotOutOfRange { slot: 2, arity: 1 });
    }

    #[test]
    fn ad_base_acts_by_weights() {
        let ctx = sl2(1);
        let mut t = ctx.zero(2);
        t.add_term(0, vec![vec![1], vec![2]], RatFn::one());
        // ad_h(e⊗f) = 2e⊗f − 2e⊗f
        assert!(ctx.ad_base(&t, 0).is_zero());
        let mut u = ctx.zero(2);
        u.add_term(0, vec![vec![1], vec![1]], RatFn::one());
        assert_eq!(ctx.ad_base(&u, 0).get(0, &[vec![1], vec![1]]), RatFn::constant(int(4)));
    }

    #[test]
    fn degree_budget_is_enforced() {
        let ctx = sl2(2).with_degree_budget(2);
        let mut t = ctx.zero(1);
        t.add_term(0, vec![vec![1, 1]], RatFn::one());
        assert!(matches!(ctx.mul(&t, &t), Err(Error::DegreeBudgetExceeded { degree: 4, budget: 2 })));
    }

    #[test]
    fn display_uses_labels() {
        let ctx = sl2(1);
        let mut t = ctx.zero(2);
        t.add_term(1, vec![vec![1], vec![]], RatFn::var(0).inv().unwrap());
        let s = t.display(ctx.labels()).to_string();
        assert!(s.contains("e") && s.contains("1/l1"), "{s}");
    }
}
