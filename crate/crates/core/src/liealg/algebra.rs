use std::fmt;

use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{format_rational, RatFn, Rational};

/// `[e_i, e_j] = Σ_k c[i][j][k] e_k` with exact rational structure constants.
#[derive(Clone, Debug, PartialEq)]
pub struct LieAlgebra {
    labels: Vec<String>,
    table: Vec<Vec<Vec<(usize, Rational)>>>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    /// `c[i][j][k] ≠ -c[j][i][k]` (includes `c[i][i][k] ≠ 0`).
    Antisymmetry { i: usize, j: usize, k: usize },
    /// Jacobi sum nonzero for `(i, j, k)` in output component `p`.
    Jacobi { i: usize, j: usize, k: usize, p: usize, value: String },
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Report {
    pub violations: Vec<Violation>,
}

impl Report {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl LieAlgebra {
    /// Abelian algebra on the given labels.
    pub fn abelian_with_labels(labels: Vec<String>) -> Self {
        let n = labels.len();
        LieAlgebra { labels, table: vec![vec![Vec::new(); n]; n] }
    }

    /// Builds from brackets listed once per unordered pair; the mirrored entry is filled in.
    pub fn from_brackets(labels: Vec<String>, brackets: &[(usize, usize, Vec<(usize, Rational)>)]) -> Result<Self> {
        let mut alg = LieAlgebra::abelian_with_labels(labels);
        let n = alg.dim();
        let mut explicit = vec![vec![false; n]; n];
        for (i, j, terms) in brackets {
            if *i >= n || *j >= n || terms.iter().any(|(k, _)| *k >= n) {
                return Err(Error::InvalidArgument(format!("bracket index out of range in [{i},{j}]")));
            }
            alg.set_bracket(*i, *j, terms.clone());
            explicit[*i][*j] = true;
        }
        for i in 0..n {
            for j in 0..n {
                if explicit[i][j] && !explicit[j][i] && i != j {
                    let mirrored = alg.table[i][j].iter().map(|(k, c)| (*k, -c.clone())).collect();
                    alg.table[j][i] = mirrored;
                }
            }
        }
        Ok(alg)
    }

    /// Overwrites a single raw table entry `[e_i, e_j]` (no antisymmetric mirroring).
    pub fn set_bracket(&mut self, i: usize, j: usize, terms: Vec<(usize, Rational)>) {
        let mut merged: Vec<(usize, Rational)> = Vec::new();
        for (k, c) in terms {
            match merged.iter_mut().find(|(x, _)| *x == k) {
                Some((_, v)) => *v += c,
                None => merged.push((k, c)),
            }
        }
        merged.retain(|(_, c)| !c.is_zero());
        merged.sort_by_key(|(k, _)| *k);
        self.table[i][j] = merged;
    }

    /// Overwrites one structure constant `c[i][j][k]`.
    pub fn set_constant(&mut self, i: usize, j: usize, k: usize, value: Rational) {
        let mut terms: Vec<(usize, Rational)> = self.table[i][j].iter().filter(|(x, _)| *x != k).cloned().collect();
        terms.push((k, value));
        self.set_bracket(i, j, terms);
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Sparse `[e_i, e_j]`.
    pub fn bracket_basis(&self, i: usize, j: usize) -> &[(usize, Rational)] {
        &self.table[i][j]
    }

    pub fn constant(&self, i: usize, j: usize, k: usize) -> Rational {
        self.table[i][j].iter().find(|(x, _)| *x == k).map(|(_, c)| c.clone()).unwrap_or_else(Rational::zero)
    }

    pub fn is_abelian(&self) -> bool {
        self.table.iter().all(|row| row.iter().all(Vec::is_empty))
    }

    /// Every nonzero `(i, j, k, c)`.
    pub fn nonzero_constants(&self) -> Vec<(usize, usize, usize, Rational)> {
        let mut out = Vec::new();
        for (i, row) in self.table.iter().enumerate() {
            for (j, terms) in row.iter().enumerate() {
                for (k, c) in terms {
                    out.push((i, j, *k, c.clone()));
                }
            }
        }
        out
    }

    pub fn validate(&self) -> Report {
        let n = self.dim();
        let mut violations = Vec::new();
        for i in 0..n {
            for j in i..n {
                for k in 0..n {
                    if self.constant(i, j, k) != -self.constant(j, i, k) {
                        violations.push(Violation::Antisymmetry { i, j, k });
                    }
                }
            }
        }
        let antisymmetric = violations.is_empty();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    // Under antisymmetry the Jacobi sum is alternating, so sorted triples suffice.
                    if antisymmetric && !(i < j && j < k) {
                        continue;
                    }
                    let mut acc = vec![Rational::zero(); n];
                    for (a, b, c) in [(i, j, k), (j, k, i), (k, i, j)] {
                        for (m, cm) in self.bracket_basis(a, b) {
                            for (p, cp) in self.bracket_basis(*m, c) {
                                acc[*p] += cm * cp;
                            }
                        }
                    }
                    for (p, v) in acc.into_iter().enumerate() {
                        if !v.is_zero() {
                            violations.push(Violation::Jacobi { i, j, k, p, value: format_rational(&v) });
                        }
                    }
                }
            }
        }
        Report { violations }
    }

    /// Bilinear extension of the bracket to coefficient vectors.
    pub fn bracket(&self, x: &[RatFn], y: &[RatFn]) -> Vec<RatFn> {
        let n = self.dim();
        let mut out = vec![RatFn::zero(); n];
        for (i, xi) in x.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            for (j, yj) in y.iter().enumerate() {
                if yj.is_zero() || self.table[i][j].is_empty() {
                    continue;
                }
                let coeff = xi * yj;
                for (k, c) in &self.table[i][j] {
                    out[*k] = &out[*k] + &coeff.scale(c);
                }
            }
        }
        out
    }

    /// Subalgebra spanned by `indices`, relabelled `0..indices.len()`.
    /// Components outside the span are dropped.
    pub fn restrict(&self, indices: &[usize]) -> LieAlgebra {
        let labels = indices.iter().map(|&i| self.labels[i].clone()).collect();
        let mut sub = LieAlgebra::abelian_with_labels(labels);
        for (a, &i) in indices.iter().enumerate() {
            for (b, &j) in indices.iter().enumerate() {
                let terms = self.table[i][j]
                    .iter()
                    .filter_map(|(k, c)| indices.iter().position(|x| x == k).map(|pos| (pos, c.clone())))
                    .collect();
                sub.set_bracket(a, b, terms);
            }
        }
        sub
    }
}

/// Dense coefficient vector over the algebra basis.
pub type Vector = Vec<RatFn>;

pub fn basis_vector(dim: usize, i: usize) -> Vector {
    let mut v = vec![RatFn::zero(); dim];
    v[i] = RatFn::one();
    v
}

impl fmt::Display for LieAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Lie algebra of dimension {}", self.dim())?;
        for i in 0..self.dim() {
            for j in (i + 1)..self.dim() {
                let terms = self.bracket_basis(i, j);
                if terms.is_empty() {
                    continue;
                }
                let rhs: Vec<String> =
                    terms.iter().map(|(k, c)| format!("{}*{}", format_rational(c), self.labels[*k])).collect();
                writeln!(f, "  [{}, {}] = {}", self.labels[i], self.labels[j], rhs.join(" + "))?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::int;
    use crate::liealg::{builtin, BuiltinName};
    use proptest::prelude::*;

    fn sl2() -> LieAlgebra {
        builtin(BuiltinName::Sl2).algebra().clone()
    }

    #[test]
    fn sl2_brackets_and_validation() {
        let g = sl2();
        assert_eq!(g.bracket_basis(1, 2), &[(0, int(1))]);
        assert_eq!(g.bracket_basis(0, 1), &[(1, int(2))]);
        assert!(g.validate().is_valid());
        assert!(LieAlgebra::abelian_with_labels(vec!["a".into(), "b".into()]).validate().is_valid());
    }

    #[test]
    fn raw_entry_perturbation_is_reported() {
        let mut g = sl2();
        g.set_constant(1, 2, 0, int(2));
        let report = g.validate();
        assert!(report.violations.contains(&Violation::Antisymmetry { i: 1, j: 2, k: 0 }));
        let on_hef = |v: &Violation| matches!(v, Violation::Jacobi { i, j, k, .. } if { let mut t = [*i, *j, *k]; t.sort(); t == [0, 1, 2] });
        assert!(report.violations.iter().any(on_hef), "{report:?}");
    }

    #[test]
    fn every_single_entry_perturbation_fails() {
        let g = sl2();
        let n = g.dim();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let mut p = g.clone();
                    p.set_constant(i, j, k, g.constant(i, j, k) + int(1));
                    assert!(!p.validate().is_valid(), "c[{i}][{j}][{k}] + 1 validated");
                }
            }
        }
    }

    #[test]
    fn restriction_keeps_the_span() {
        let he = sl2().restrict(&[0, 1]);
        assert_eq!(he.labels(), ["h", "e"]);
        assert_eq!(he.bracket_basis(0, 1), &[(1, int(2))]);
        assert!(he.validate().is_valid());
        // [e, f] = h is dropped when h is left out.
        assert!(sl2().restrict(&[1, 2]).is_abelian());
    }

    fn arb_vector(n: usize) -> impl Strategy<Value = Vector> {
        prop::collection::vec(-5i64..=5, n).prop_map(|v| v.into_iter().map(|c| RatFn::constant(int(c))).collect())
    }

    fn add(a: &[RatFn], b: &[RatFn]) -> Vector {
        a.iter().zip(b).map(|(x, y)| x + y).collect()
    }

    proptest! {
        #[test]
        fn bracket_is_alternating_and_jacobi(x in arb_vector(8), y in arb_vector(8), z in arb_vector(8)) {
            let g = builtin(BuiltinName::Sl3).algebra().clone();
            prop_assert!(g.bracket(&x, &x).iter().all(RatFn::is_zero));
            let j = add(&add(&g.bracket(&x, &g.bracket(&y, &z)), &g.bracket(&y, &g.bracket(&z, &x))), &g.bracket(&z, &g.bracket(&x, &y)));
            prop_assert!(j.iter().all(RatFn::is_zero));
        }
    }
}
