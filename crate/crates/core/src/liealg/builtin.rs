//! Built-in algebras with their canonical decompositions.
//!
//! `sl(n)` uses the Chevalley basis realized by elementary matrices: Cartan
//! elements `h_i = E_ii - E_{i+1,i+1}`, root vectors `e = E_ij` (i < j) and
//! `f = E_ji`, so `[e_α, e_{-α}] = h_α` is the coroot. The pairing `(λ, α)` is
//! then `<λ, [e_α, e_{-α}]_h>`.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_traits::Zero;

use super::algebra::LieAlgebra;
use super::decomposition::Decomposition;
use crate::error::{Error, Result};
use crate::exact::{int, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BuiltinName {
    Sl2,
    Sl3,
    Heisenberg(usize, usize),
    Abelian(usize),
}

impl FromStr for BuiltinName {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let args = |prefix: &str| -> Option<Vec<usize>> {
            let inner = s.strip_prefix(prefix)?.strip_prefix('(')?.strip_suffix(')')?;
            inner.split(',').map(|t| t.trim().parse().ok()).collect()
        };
        match s {
            "sl2" => return Ok(BuiltinName::Sl2),
            "sl3" => return Ok(BuiltinName::Sl3),
            _ => {}
        }
        if let Some(v) = args("heisenberg") {
            if let [m, n] = v[..] {
                if m > 0 {
                    return Ok(BuiltinName::Heisenberg(m, n));
                }
            }
        }
        if let Some(v) = args("abelian") {
            if let [n] = v[..] {
                if n > 0 {
                    return Ok(BuiltinName::Abelian(n));
                }
            }
        }
        Err(Error::UnknownName(s.to_string()))
    }
}

impl fmt::Display for BuiltinName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BuiltinName::Sl2 => write!(f, "sl2"),
            BuiltinName::Sl3 => write!(f, "sl3"),
            BuiltinName::Heisenberg(m, n) => write!(f, "heisenberg({m},{n})"),
            BuiltinName::Abelian(n) => write!(f, "abelian({n})"),
        }
    }
}

/// A builtin algebra, its canonical decomposition and (for sl(n)) the positive
/// roots as `(e_α, e_{-α})` index pairs.
#[derive(Clone, Debug)]
pub struct Builtin {
    pub name: BuiltinName,
    pub decomposition: Decomposition,
    pub root_pairs: Vec<(usize, usize)>,
    /// Simple roots (by Cartan index) whose sum is the matching positive root.
    pub root_support: Vec<Vec<usize>>,
}

impl Builtin {
    pub fn algebra(&self) -> &LieAlgebra {
        self.decomposition.algebra()
    }

    pub fn algebra_arc(&self) -> Arc<LieAlgebra> {
        self.decomposition.algebra_arc()
    }
}

pub fn builtin(name: BuiltinName) -> Builtin {
    match name {
        BuiltinName::Sl2 => sl(2, name),
        BuiltinName::Sl3 => sl(3, name),
        BuiltinName::Heisenberg(m, n) => heisenberg(m, n),
        BuiltinName::Abelian(n) => abelian(n),
    }
}

pub fn builtin_by_name(name: &str) -> Result<Builtin> {
    Ok(builtin(name.parse()?))
}

type Matrix = Vec<Vec<Rational>>;

fn elementary(n: usize, i: usize, j: usize) -> Matrix {
    let mut m = vec![vec![Rational::zero(); n]; n];
    m[i][j] = int(1);
    m
}

fn commutator(a: &Matrix, b: &Matrix) -> Matrix {
    let n = a.len();
    let mut out = vec![vec![Rational::zero(); n]; n];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                out[i][j] += &a[i][k] * &b[k][j] - &b[i][k] * &a[k][j];
            }
        }
    }
    out
}

fn sl(n: usize, name: BuiltinName) -> Builtin {
    let rank = n - 1;
    // Positive roots E_ij (i<j) ordered by height, then by i.
    let mut positive: Vec<(usize, usize)> = Vec::new();
    for height in 1..n {
        for i in 0..n - height {
            positive.push((i, i + height));
        }
    }
    let simple_labels = n == 2;
    let root_label = |prefix: char, i: usize, j: usize| {
        if simple_labels {
            prefix.to_string()
        } else {
            let digits: String = (i + 1..=j).map(|k| k.to_string()).collect();
            format!("{prefix}{digits}")
        }
    };
    let mut labels = Vec::new();
    let mut matrices: Vec<Matrix> = Vec::new();
    for i in 0..rank {
        labels.push(if simple_labels { "h".to_string() } else { format!("h{}", i + 1) });
        let mut m = vec![vec![Rational::zero(); n]; n];
        m[i][i] = int(1);
        m[i + 1][i + 1] = int(-1);
        matrices.push(m);
    }
    for &(i, j) in &positive {
        labels.push(root_label('e', i, j));
        matrices.push(elementary(n, i, j));
    }
    for &(i, j) in &positive {
        labels.push(root_label('f', i, j));
        matrices.push(elementary(n, j, i));
    }
    let offdiag_index = |r: usize, c: usize| -> usize {
        if r < c {
            rank + positive.iter().position(|&p| p == (r, c)).unwrap()
        } else {
            rank + positive.len() + positive.iter().position(|&p| p == (c, r)).unwrap()
        }
    };
    let decompose = |m: &Matrix| -> Vec<(usize, Rational)> {
        let mut terms = Vec::new();
        let mut running = Rational::zero();
        for i in 0..rank {
            running += &m[i][i];
            terms.push((i, running.clone()));
        }
        for r in 0..n {
            for c in 0..n {
                if r != c {
                    terms.push((offdiag_index(r, c), m[r][c].clone()));
                }
            }
        }
        terms.retain(|(_, c)| !c.is_zero());
        terms
    };
    let dim = matrices.len();
    let mut brackets = Vec::new();
    for a in 0..dim {
        for b in (a + 1)..dim {
            let terms = decompose(&commutator(&matrices[a], &matrices[b]));
            if !terms.is_empty() {
                brackets.push((a, b, terms));
            }
        }
    }
    let alg = Arc::new(LieAlgebra::from_brackets(labels, &brackets).expect("sl(n) table"));
    let base: Vec<usize> = (0..rank).collect();
    let complement: Vec<usize> = (rank..dim).collect();
    let root_pairs = (0..positive.len()).map(|k| (rank + k, rank + positive.len() + k)).collect();
    let root_support = positive.iter().map(|&(i, j)| (i..j).collect()).collect();
    Builtin {
        name,
        decomposition: Decomposition::new(alg, base, complement).expect("partition"),
        root_pairs,
        root_support,
    }
}

/// Generators `p_1..p_{m+n}, q_1..q_{m+n}, c` with `[p_i, q_i] = c`.
/// Base h = span{p_{m+i}, q_{m+i}, c}, complement m = span{p_i, q_i : i ≤ m}.
fn heisenberg(m: usize, n: usize) -> Builtin {
    let k = m + n;
    let mut labels: Vec<String> = (1..=k).map(|i| format!("p{i}")).collect();
    labels.extend((1..=k).map(|i| format!("q{i}")));
    labels.push("c".to_string());
    let c = 2 * k;
    let brackets: Vec<_> = (0..k).map(|i| (i, k + i, vec![(c, int(1))])).collect();
    let alg = Arc::new(LieAlgebra::from_brackets(labels, &brackets).expect("heisenberg table"));
    let mut base: Vec<usize> = (m..k).collect();
    base.extend(k + m..2 * k);
    base.push(c);
    let mut complement: Vec<usize> = (0..m).collect();
    complement.extend(k..k + m);
    Builtin {
        name: BuiltinName::Heisenberg(m, n),
        decomposition: Decomposition::new(alg, base, complement).expect("partition"),
        root_pairs: Vec::new(),
        root_support: Vec::new(),
    }
}

/// `x1..xn` with zero bracket; base `{x1}`.
fn abelian(n: usize) -> Builtin {
    let labels = (1..=n).map(|i| format!("x{i}")).collect();
    let alg = Arc::new(LieAlgebra::abelian_with_labels(labels));
    Builtin {
        name: BuiltinName::Abelian(n),
        decomposition: Decomposition::new(alg, vec![0], (1..n).collect()).expect("partition"),
        root_pairs: Vec::new(),
        root_support: Vec::new(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for s in ["sl2", "sl3", "heisenberg(2,1)", "abelian(4)"] {
            assert_eq!(s.parse::<BuiltinName>().unwrap().to_string(), s);
        }
        assert!(matches!("so5".parse::<BuiltinName>(), Err(Error::UnknownName(_))));
        assert!("heisenberg(0,1)".parse::<BuiltinName>().is_err());
    }

    #[test]
    fn sl2_table() {
        let b = builtin(BuiltinName::Sl2);
        let g = b.algebra();
        assert_eq!(g.labels(), ["h", "e", "f"]);
        assert_eq!(g.bracket_basis(0, 1), [(1, int(2))]);
        assert_eq!(g.bracket_basis(0, 2), [(2, int(-2))]);
        assert_eq!(g.bracket_basis(1, 2), [(0, int(1))]);
        assert_eq!(b.decomposition.base(), [0]);
        assert_eq!(b.decomposition.complement(), [1, 2]);
    }

    #[test]
    fn sl3_has_chevalley_coroots() {
        let b = builtin(BuiltinName::Sl3);
        let g = b.algebra();
        assert_eq!(g.dim(), 8);
        assert!(g.validate().is_valid());
        // [e12, f12] = h1 + h2
        let e = g.index_of("e12").unwrap();
        let f = g.index_of("f12").unwrap();
        assert_eq!(g.bracket_basis(e, f), [(0, int(1)), (1, int(1))]);
        assert_eq!(b.root_pairs.len(), 3);
    }

    #[test]
    fn heisenberg_shape() {
        let b = builtin(BuiltinName::Heisenberg(1, 1));
        assert_eq!(b.algebra().dim(), 5);
        assert_eq!(b.decomposition.base().len(), 3);
        assert_eq!(b.decomposition.complement().len(), 2);
        let g = b.algebra();
        assert_eq!(g.bracket_basis(g.index_of("p1").unwrap(), g.index_of("q1").unwrap()), [(4, int(1))]);
    }

    #[test]
    fn abelian_is_zero() {
        let b = builtin(BuiltinName::Abelian(2));
        assert!(b.algebra().nonzero_constants().is_empty());
    }
}
