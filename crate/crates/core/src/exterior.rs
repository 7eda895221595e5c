//! The exterior algebra Λg with rational-function coefficients, the Schouten
//! bracket extending the Lie bracket, and the adjoint action.

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;

use crate::exact::{ratfn_is_zero, RatFn, Rational, Verdict, ZeroTest};
use crate::liealg::LieAlgebra;

/// Sparse multivector: strictly increasing index tuples to coefficients.
/// Tuples of different lengths coexist, so grades are mixed freely.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct Multivector {
    terms: BTreeMap<Vec<usize>, RatFn>,
}

/// Sorts `word` in place, returning the permutation sign, or `None` on a repeat.
fn sort_with_sign(word: &mut [usize]) -> Option<i32> {
    let mut sign = 1;
    for i in 1..word.len() {
        let mut j = i;
        while j > 0 && word[j - 1] > word[j] {
            word.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
        if j > 0 && word[j - 1] == word[j] {
            return None;
        }
    }
    Some(sign)
}

impl Multivector {
    pub fn zero() -> Self {
        Multivector::default()
    }

    /// The scalar `c` in grade 0.
    pub fn scalar(c: RatFn) -> Self {
        let mut m = Multivector::zero();
        m.add_term(Vec::new(), c);
        m
    }

    /// Basis vector `e_i`.
    pub fn basis(i: usize) -> Self {
        Multivector::monomial(&[i], RatFn::one())
    }

    /// `c · e_{w1} ∧ … ∧ e_{wk}` for an arbitrary word; sorted with sign.
    pub fn monomial(word: &[usize], c: RatFn) -> Self {
        let mut m = Multivector::zero();
        m.add_term(word.to_vec(), c);
        m
    }

    /// Accumulates `c · e_{word}`, canonicalizing the word.
    pub fn add_term(&mut self, mut word: Vec<usize>, c: RatFn) {
        if c.is_zero() {
            return;
        }
        let Some(sign) = sort_with_sign(&mut word) else { return };
        let c = if sign < 0 { -c } else { c };
        let sum = match self.terms.remove(&word) {
            Some(old) => &old + &c,
            None => c,
        };
        if !sum.is_zero() {
            self.terms.insert(word, sum);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<usize>, &RatFn)> {
        self.terms.iter()
    }

    pub fn coeff(&self, word: &[usize]) -> RatFn {
        self.terms.get(word).cloned().unwrap_or_else(RatFn::zero)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Coefficients are canonical rational functions, so this is exact.
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Grade-`k` component.
    pub fn grade(&self, k: usize) -> Multivector {
        Multivector { terms: self.terms.iter().filter(|(w, _)| w.len() == k).map(|(w, c)| (w.clone(), c.clone())).collect() }
    }

    /// Grade if homogeneous (`None` for zero or mixed).
    pub fn homogeneous_grade(&self) -> Option<usize> {
        let mut grades = self.terms.keys().map(Vec::len);
        let first = grades.next()?;
        grades.all(|g| g == first).then_some(first)
    }

    pub fn nvars(&self) -> usize {
        self.terms.values().map(RatFn::nvars).max().unwrap_or(0)
    }

    pub fn add(&self, rhs: &Multivector) -> Multivector {
        let mut out = self.clone();
        for (w, c) in &rhs.terms {
            out.add_term(w.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, rhs: &Multivector) -> Multivector {
        self.add(&rhs.neg())
    }

    pub fn neg(&self) -> Multivector {
        self.map_coeffs(|c| -c)
    }

    pub fn scale(&self, c: &Rational) -> Multivector {
        self.map_coeffs(|x| x.scale(c))
    }

    pub fn mul_fn(&self, f: &RatFn) -> Multivector {
        self.map_coeffs(|x| x * f)
    }

    fn map_coeffs(&self, f: impl Fn(&RatFn) -> RatFn) -> Multivector {
        let mut out = Multivector::zero();
        for (w, c) in &self.terms {
            out.add_term(w.clone(), f(c));
        }
        out
    }

    /// `∂/∂λ^{var}` applied coefficientwise (0-based coordinate).
    pub fn diff(&self, var: usize) -> Multivector {
        self.map_coeffs(|c| c.diff(var))
    }

    /// Substitutes the base coordinates coefficientwise.
    pub fn compose(&self, subs: &[crate::exact::Poly]) -> crate::Result<Multivector> {
        let mut out = Multivector::zero();
        for (w, c) in &self.terms {
            out.add_term(w.clone(), c.compose(subs)?);
        }
        Ok(out)
    }

    pub fn wedge(&self, rhs: &Multivector) -> Multivector {
        let mut out = Multivector::zero();
        for (a, ca) in &self.terms {
            for (b, cb) in &rhs.terms {
                let mut w = a.clone();
                w.extend_from_slice(b);
                out.add_term(w, ca * cb);
            }
        }
        out
    }

    /// Schouten bracket; on decomposables
    /// `[x1∧…∧xk, y1∧…∧ym] = Σ (−1)^{i+j} [x_i, y_j] ∧ x1..x̂_i..xk ∧ y1..ŷ_j..ym`.
    pub fn schouten(&self, rhs: &Multivector, alg: &LieAlgebra) -> Multivector {
        let mut out = Multivector::zero();
        for (a, ca) in &self.terms {
            for (b, cb) in &rhs.terms {
                let coeff = ca * cb;
                for (i, &x) in a.iter().enumerate() {
                    for (j, &y) in b.iter().enumerate() {
                        let bracket = alg.bracket_basis(x, y);
                        if bracket.is_empty() {
                            continue;
                        }
                        let sign = if (i + j) % 2 == 0 { 1 } else { -1 };
                        for (k, c) in bracket {
                            let mut w = Vec::with_capacity(a.len() + b.len() - 1);
                            w.push(*k);
                            w.extend(a.iter().enumerate().filter(|(p, _)| *p != i).map(|(_, v)| *v));
                            w.extend(b.iter().enumerate().filter(|(p, _)| *p != j).map(|(_, v)| *v));
                            let c = if sign < 0 { -c.clone() } else { c.clone() };
                            out.add_term(w, coeff.scale(&c));
                        }
                    }
                }
            }
        }
        out
    }

    /// Derivation extension of `x ↦ [e_h, x]`.
    pub fn ad_action(&self, h: usize, alg: &LieAlgebra) -> Multivector {
        let mut out = Multivector::zero();
        for (w, c) in &self.terms {
            for (p, &x) in w.iter().enumerate() {
                for (k, s) in alg.bracket_basis(h, x) {
                    let mut v = w.clone();
                    v[p] = *k;
                    out.add_term(v, c.scale(s));
                }
            }
        }
        out
    }

    /// Per-coefficient zero verdicts (all zero when the multivector is empty).
    pub fn verdicts(&self, strategy: ZeroTest) -> Vec<(Vec<usize>, Verdict)> {
        let terms: Vec<_> = self.terms.iter().collect();
        terms.par_iter().map(|(w, c)| ((*w).clone(), ratfn_is_zero(c, strategy))).collect()
    }

    pub fn fmt_with(&self, f: &mut fmt::Formatter<'_>, labels: &[String]) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (n, (w, c)) in self.terms.iter().enumerate() {
            if n > 0 {
                write!(f, " + ")?;
            }
            let word: Vec<&str> = w.iter().map(|&i| labels.get(i).map(String::as_str).unwrap_or("?")).collect();
            write!(f, "({c})")?;
            if !word.is_empty() {
                write!(f, "*{}", word.join("^"))?;
            }
        }
        Ok(())
    }

    /// Renders with basis labels, e.g. `(-1/l1)*e^f`.
    pub fn display<'a>(&'a self, labels: &'a [String]) -> impl fmt::Display + 'a {
        struct D<'a>(&'a Multivector, &'a [String]);
        impl fmt::Display for D<'_> {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                self.0.fmt_with(f, self.1)
            }
        }
        D(self, labels)
    }
}
