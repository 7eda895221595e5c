use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, RwLock};

use num_traits::{One, Zero};

use crate::exact::{factorial, format_rational, Rational};
use crate::liealg::LieAlgebra;

/// A word in the basis; normal-ordered words are non-decreasing.
pub type Word = Vec<usize>;

/// Element of Ug in the normal-ordered PBW basis.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct UElem {
    terms: BTreeMap<Word, Rational>,
}

impl UElem {
    pub fn zero() -> Self {
        UElem::default()
    }

    pub fn one() -> Self {
        UElem::monomial(Vec::new(), Rational::one())
    }

    /// `c · w` for a word that is already normal-ordered.
    pub fn monomial(word: Word, c: Rational) -> Self {
        debug_assert!(word.windows(2).all(|p| p[0] <= p[1]), "word not normal-ordered");
        let mut u = UElem::zero();
        u.add_term(word, c);
        u
    }

    pub fn add_term(&mut self, word: Word, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&word) {
            Some(v) => {
                *v += c;
                if v.is_zero() {
                    self.terms.remove(&word);
                }
            }
            None => {
                self.terms.insert(word, c);
            }
        }
    }

    pub fn add_scaled(&mut self, other: &UElem, c: &Rational) {
        if c.is_zero() {
            return;
        }
        for (w, v) in &other.terms {
            self.add_term(w.clone(), v * c);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &Rational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, word: &[usize]) -> Rational {
        self.terms.get(word).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Length of the longest word (filtration degree).
    pub fn degree(&self) -> usize {
        self.terms.keys().map(Vec::len).max().unwrap_or(0)
    }

    pub fn add(&self, rhs: &UElem) -> UElem {
        let mut out = self.clone();
        out.add_scaled(rhs, &Rational::one());
        out
    }

    pub fn sub(&self, rhs: &UElem) -> UElem {
        let mut out = self.clone();
        out.add_scaled(rhs, &-Rational::one());
        out
    }

    pub fn scale(&self, c: &Rational) -> UElem {
        let mut out = UElem::zero();
        out.add_scaled(self, c);
        out
    }

    pub fn fmt_with(&self, f: &mut fmt::Formatter<'_>, labels: &[String]) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (n, (w, c)) in self.terms.iter().enumerate() {
            if n > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{}", format_rational(c))?;
            for &i in w {
                write!(f, "*{}", labels.get(i).map(String::as_str).unwrap_or("?"))?;
            }
        }
        Ok(())
    }
}

/// Element of `U h_ℏ`: normal-ordered words with their power of ℏ.
/// Each rewrite `x_j x_i → x_i x_j + ℏ[x_j, x_i]` carries one ℏ.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct GradedUElem {
    pub terms: BTreeMap<(usize, Word), Rational>,
}

impl GradedUElem {
    /// Grades a plain element that came from words of length `len`.
    pub fn from_plain(u: &UElem, len: usize) -> Self {
        let terms = u.terms().map(|(w, c)| ((len - w.len(), w.clone()), c.clone())).collect();
        GradedUElem { terms }
    }

    pub fn coeff(&self, hbar: usize, word: &[usize]) -> Rational {
        self.terms.get(&(hbar, word.to_vec())).cloned().unwrap_or_else(Rational::zero)
    }
}

/// Two-leg tensors `Σ c · w1 ⊗ w2` with rational coefficients.
pub type Tensor2 = BTreeMap<(Word, Word), Rational>;

/// Normal-ordering engine for Ug with memoized products.
pub struct Enveloping {
    alg: Arc<LieAlgebra>,
    left: RwLock<HashMap<(usize, Word), Arc<UElem>>>,
    arrangements: RwLock<HashMap<Word, Arc<UElem>>>,
}

impl fmt::Debug for Enveloping {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Enveloping").field("dim", &self.alg.dim()).finish()
    }
}

fn counts(word: &[usize]) -> Vec<usize> {
    let mut out: Vec<usize> = Vec::new();
    let mut run = 0;
    for (i, &x) in word.iter().enumerate() {
        run += 1;
        if i + 1 == word.len() || word[i + 1] != x {
            out.push(run);
            run = 0;
        }
    }
    out
}

impl Enveloping {
    pub fn new(alg: Arc<LieAlgebra>) -> Self {
        Enveloping { alg, left: RwLock::new(HashMap::new()), arrangements: RwLock::new(HashMap::new()) }
    }

    pub fn algebra(&self) -> &LieAlgebra {
        &self.alg
    }

    pub fn algebra_arc(&self) -> Arc<LieAlgebra> {
        self.alg.clone()
    }

    /// Normal form of `x_i · w` for a normal-ordered `w`.
    pub fn left_mul(&self, i: usize, w: &[usize]) -> Arc<UElem> {
        if w.first().is_none_or(|&w0| i <= w0) {
            let mut word = Vec::with_capacity(w.len() + 1);
            word.push(i);
            word.extend_from_slice(w);
            return Arc::new(UElem::monomial(word, Rational::one()));
        }
        let key = (i, w.to_vec());
        if let Some(hit) = self.left.read().expect("cache lock").get(&key) {
            return hit.clone();
        }
        // x_i w0 rest = w0 (x_i rest) + [x_i, w0] rest
        let (w0, rest) = (w[0], &w[1..]);
        let mut out = UElem::zero();
        for (u, c) in self.left_mul(i, rest).terms() {
            out.add_scaled(&self.left_mul(w0, u), c);
        }
        for (k, c) in self.alg.bracket_basis(i, w0) {
            out.add_scaled(&self.left_mul(*k, rest), c);
        }
        let out = Arc::new(out);
        self.left.write().expect("cache lock").insert(key, out.clone());
        out
    }

    /// Normal form of `a · b` for normal-ordered words.
    pub fn mul_words(&self, a: &[usize], b: &[usize]) -> UElem {
        let mut acc = UElem::monomial(b.to_vec(), Rational::one());
        for &x in a.iter().rev() {
            let mut next = UElem::zero();
            for (w, c) in acc.terms() {
                next.add_scaled(&self.left_mul(x, w), c);
            }
            acc = next;
        }
        acc
    }

    pub fn mul(&self, u: &UElem, v: &UElem) -> UElem {
        let mut out = UElem::zero();
        for (a, ca) in u.terms() {
            for (b, cb) in v.terms() {
                out.add_scaled(&self.mul_words(a, b), &(ca * cb));
            }
        }
        out
    }

    /// Normal form of an arbitrary word (plain Ug, no ℏ).
    pub fn normal_order(&self, word: &[usize]) -> UElem {
        self.mul_words(word, &[])
    }

    /// Normal form in `U h_ℏ`, each rewrite contributing one ℏ.
    pub fn normal_order_hbar(&self, word: &[usize]) -> GradedUElem {
        GradedUElem::from_plain(&self.normal_order(word), word.len())
    }

    /// Sum over distinct arrangements of the multiset `word` (sorted), normal-ordered.
    fn arrangement_sum(&self, word: &[usize]) -> Arc<UElem> {
        if word.is_empty() {
            return Arc::new(UElem::one());
        }
        if let Some(hit) = self.arrangements.read().expect("cache lock").get(word) {
            return hit.clone();
        }
        let mut out = UElem::zero();
        for (p, &x) in word.iter().enumerate() {
            if p > 0 && word[p - 1] == x {
                continue;
            }
            let mut rest = word.to_vec();
            rest.remove(p);
            for (w, c) in self.arrangement_sum(&rest).terms() {
                out.add_scaled(&self.left_mul(x, w), c);
            }
        }
        let out = Arc::new(out);
        self.arrangements.write().expect("cache lock").insert(word.to_vec(), out.clone());
        out
    }

    /// Average over all orderings of the multiset `word`, normal-ordered.
    pub fn symmetrize(&self, word: &[usize]) -> UElem {
        let mut sorted = word.to_vec();
        sorted.sort_unstable();
        let mut arrangements = factorial(sorted.len());
        for k in counts(&sorted) {
            arrangements /= factorial(k);
        }
        self.arrangement_sum(&sorted).scale(&arrangements.recip())
    }

    /// `ad(x_i)` extended to Ug as a derivation.
    pub fn ad(&self, i: usize, u: &UElem) -> UElem {
        let mut out = UElem::zero();
        for (w, c) in u.terms() {
            for p in 0..w.len() {
                for (k, s) in self.alg.bracket_basis(i, w[p]) {
                    let mut word = w.clone();
                    word[p] = *k;
                    out.add_scaled(&self.normal_order(&word), &(c * s));
                }
            }
        }
        out
    }
}

/// `Δ(w) = Σ_{S ⊆ positions} w_S ⊗ w_{S^c}`; subsequences of normal-ordered words stay ordered.
pub fn coproduct_word(w: &[usize]) -> Vec<(Word, Word)> {
    assert!(w.len() < 64, "word too long for coproduct");
    let n = w.len();
    (0u64..(1 << n))
        .map(|mask| {
            let (mut a, mut b) = (Vec::new(), Vec::new());
            for (p, &x) in w.iter().enumerate() {
                if mask & (1 << p) != 0 {
                    a.push(x);
                } else {
                    b.push(x);
                }
            }
            (a, b)
        })
        .collect()
}

pub fn coproduct(u: &UElem) -> Tensor2 {
    let mut out = Tensor2::new();
    for (w, c) in u.terms() {
        for key in coproduct_word(w) {
            let v = out.entry(key).or_insert_with(Rational::zero);
            *v += c;
        }
    }
    out.retain(|_, v| !v.is_zero());
    out
}

/// `ε(w) = 1` for the empty word and 0 otherwise.
pub fn counit(u: &UElem) -> Rational {
    u.coeff(&[])
}
