//! JSON file formats: algebras, r-matrices, twists and ansätze.
//!
//! Rationals travel as `"p/q"` strings and coefficients as expression strings
//! over `l1..l<rank>`, so nothing passes through floating point.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::parse::parse_expr;
use crate::error::{Error, Result};
use crate::exact::{format_rational, parse_rational, RatFn, DEFAULT_TERM_BUDGET};
use crate::exterior::Multivector;
use crate::liealg::{builtin_by_name, Decomposition, LieAlgebra};
use crate::pbw::Word;
use crate::qdybe::{AnsatzTerm, DynTensor, TensorAlgebra};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermEntry {
    pub k: usize,
    pub c: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BracketEntry {
    pub i: usize,
    pub j: usize,
    pub terms: Vec<TermEntry>,
}

/// A Lie algebra with a chosen base/complement split; indices are 0-based.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraFile {
    pub dim: usize,
    pub labels: Vec<String>,
    pub brackets: Vec<BracketEntry>,
    pub base: Vec<usize>,
    pub complement: Vec<usize>,
}

impl AlgebraFile {
    pub fn from_decomposition(dec: &Decomposition) -> Self {
        let alg = dec.algebra();
        let n = alg.dim();
        let mut brackets = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                let terms = alg.bracket_basis(i, j);
                if !terms.is_empty() {
                    let terms = terms.iter().map(|(k, c)| TermEntry { k: *k, c: format_rational(c) }).collect();
                    brackets.push(BracketEntry { i, j, terms });
                }
            }
        }
        AlgebraFile { dim: n, labels: alg.labels().to_vec(), brackets, base: dec.base().to_vec(), complement: dec.complement().to_vec() }
    }

    /// Builds the bracket table without checking the Lie axioms.
    pub fn lie_algebra(&self) -> Result<LieAlgebra> {
        if self.labels.len() != self.dim {
            return Err(Error::Format(format!("labels: {} entries for dim {}", self.labels.len(), self.dim)));
        }
        for (p, l) in self.labels.iter().enumerate() {
            if self.labels[..p].contains(l) {
                return Err(Error::Format(format!("labels[{p}]: duplicate label `{l}`")));
            }
        }
        let mut brackets = Vec::new();
        for (b, entry) in self.brackets.iter().enumerate() {
            let mut terms = Vec::new();
            for (t, term) in entry.terms.iter().enumerate() {
                let c = parse_rational(&term.c).map_err(|e| Error::Format(format!("brackets[{b}].terms[{t}].c: {e}")))?;
                terms.push((term.k, c));
            }
            brackets.push((entry.i, entry.j, terms));
        }
        LieAlgebra::from_brackets(self.labels.clone(), &brackets)
    }

    /// Builds and checks the algebra: Jacobi, antisymmetry and reductivity must hold.
    pub fn to_decomposition(&self) -> Result<Decomposition> {
        let alg = self.lie_algebra()?;
        let report = alg.validate();
        if !report.is_valid() {
            return Err(Error::InvalidArgument(format!("not a Lie algebra: {}", serde_json::to_string(&report.violations).unwrap_or_default())));
        }
        let dec = Decomposition::new(Arc::new(alg), self.base.clone(), self.complement.clone())?;
        let red = dec.check_reductive();
        if !red.is_reductive() {
            return Err(Error::InvalidArgument(format!("decomposition is not reductive: {}", serde_json::to_string(&red.violations).unwrap_or_default())));
        }
        Ok(dec)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BivectorTerm {
    pub i: String,
    pub j: String,
    pub coeff: String,
}

/// `r = Σ coeff · e_i ∧ e_j`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RMatrixFile {
    pub terms: Vec<BivectorTerm>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TwistTerm {
    pub hbar: usize,
    pub coeff: String,
    /// One word of basis labels per leg; `[]` is the unit.
    pub legs: Vec<Vec<String>>,
}

/// `Σ ℏ^hbar · coeff · legs`, truncated at `truncation`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TwistFile {
    /// Algebra source (`builtin:NAME` or a path relative to this file); `--algebra` takes precedence.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub algebra: Option<String>,
    pub arity: usize,
    pub truncation: usize,
    pub terms: Vec<TwistTerm>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnsatzEntry {
    pub coeff: String,
    pub legs: Vec<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnsatzFile {
    pub terms: Vec<AnsatzEntry>,
}

/// Where an input came from and the SHA-256 of its bytes.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InputRecord {
    pub source: String,
    pub sha256: String,
}

impl InputRecord {
    pub fn new(source: &str, bytes: &[u8]) -> Self {
        let digest = Sha256::digest(bytes);
        InputRecord { source: source.to_string(), sha256: digest.iter().map(|b| format!("{b:02x}")).collect() }
    }
}

/// Reads a file and hashes it.
pub fn read_input(path: &Path) -> Result<(String, InputRecord)> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Format(format!("{}: {e}", path.display())))?;
    let record = InputRecord::new(&path.display().to_string(), text.as_bytes());
    Ok((text, record))
}

/// Deserializes JSON with `path:line:column` diagnostics.
pub fn from_json<T: for<'de> Deserialize<'de>>(text: &str, origin: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Format(format!("{origin}:{}:{}: {e}", e.line(), e.column())))
}

/// `builtin:NAME` or a path to an [`AlgebraFile`].
pub fn load_algebra(source: &str) -> Result<(Decomposition, InputRecord)> {
    if let Some(name) = source.strip_prefix("builtin:") {
        let b = builtin_by_name(name)?;
        return Ok((b.decomposition, InputRecord::new(source, name.as_bytes())));
    }
    let (text, record) = read_input(Path::new(source))?;
    let file: AlgebraFile = from_json(&text, source)?;
    let dec = file.to_decomposition().map_err(|e| Error::Format(format!("{source}: {e}")))?;
    Ok((dec, record))
}

/// Resolves an algebra reference found inside another file, relative to that file.
pub fn resolve_relative(reference: &str, within: &Path) -> String {
    if reference.starts_with("builtin:") || Path::new(reference).is_absolute() {
        return reference.to_string();
    }
    let dir: PathBuf = within.parent().map(Path::to_path_buf).unwrap_or_default();
    dir.join(reference).display().to_string()
}

fn parse_coeff(text: &str, rank: usize, origin: &str) -> Result<RatFn> {
    let locate = |e: Error| Error::Format(format!("{origin}: {e}"));
    parse_expr(text, Some(rank)).map_err(locate)?.to_ratfn(DEFAULT_TERM_BUDGET).map_err(locate)
}

fn label_index(alg: &LieAlgebra, label: &str, origin: &str) -> Result<usize> {
    alg.index_of(label).ok_or_else(|| Error::Format(format!("{origin}: unknown basis label `{label}`")))
}

fn parse_legs(alg: &LieAlgebra, legs: &[Vec<String>], origin: &str) -> Result<Vec<Word>> {
    legs.iter().enumerate().map(|(s, w)| w.iter().map(|l| label_index(alg, l, &format!("{origin}.legs[{s}]"))).collect()).collect()
}

impl RMatrixFile {
    pub fn to_multivector(&self, dec: &Decomposition) -> Result<Multivector> {
        let mut r = Multivector::zero();
        for (t, term) in self.terms.iter().enumerate() {
            let origin = format!("terms[{t}]");
            let i = label_index(dec.algebra(), &term.i, &origin)?;
            let j = label_index(dec.algebra(), &term.j, &origin)?;
            let c = parse_coeff(&term.coeff, dec.rank(), &format!("{origin}.coeff"))?;
            r = r.add(&Multivector::monomial(&[i, j], c));
        }
        Ok(r)
    }

    pub fn from_multivector(r: &Multivector, labels: &[String]) -> Self {
        let terms = r.terms().map(|(w, c)| BivectorTerm { i: labels[w[0]].clone(), j: labels[w[1]].clone(), coeff: c.to_expr_string() }).collect();
        RMatrixFile { terms }
    }
}

impl TwistFile {
    /// Normal-orders the legs; the result is truncated at `min(truncation, ctx order)`.
    pub fn to_tensor(&self, ctx: &TensorAlgebra) -> Result<DynTensor> {
        let order = self.truncation.min(ctx.order());
        let mut out = DynTensor::zero(self.arity, order);
        let ctx = ctx.with_order(order);
        for (t, term) in self.terms.iter().enumerate() {
            let origin = format!("terms[{t}]");
            if term.legs.len() != self.arity {
                return Err(Error::Format(format!("{origin}.legs: {} legs for arity {}", term.legs.len(), self.arity)));
            }
            if term.hbar > order {
                continue;
            }
            let legs = parse_legs(ctx.decomposition().algebra(), &term.legs, &origin)?;
            let c = parse_coeff(&term.coeff, ctx.decomposition().rank(), &format!("{origin}.coeff"))?;
            out = out.add(&ctx.term(term.hbar, c, &legs));
        }
        Ok(out)
    }

    pub fn from_tensor(t: &DynTensor, labels: &[String], algebra: Option<String>) -> Self {
        let terms = t
            .terms()
            .map(|(k, legs, c)| TwistTerm {
                hbar: k,
                coeff: c.to_expr_string(),
                legs: legs.iter().map(|w| w.iter().map(|&i| labels[i].clone()).collect()).collect(),
            })
            .collect();
        TwistFile { algebra, arity: t.arity(), truncation: t.order(), terms }
    }
}

impl AnsatzFile {
    pub fn to_terms(&self, dec: &Decomposition) -> Result<Vec<AnsatzTerm>> {
        self.terms
            .iter()
            .enumerate()
            .map(|(t, entry)| {
                let origin = format!("terms[{t}]");
                let legs = parse_legs(dec.algebra(), &entry.legs, &origin)?;
                let [a, b]: [Word; 2] = legs.try_into().map_err(|_| Error::Format(format!("{origin}.legs: ansatz terms have two legs")))?;
                Ok(AnsatzTerm { coefficient: parse_coeff(&entry.coeff, dec.rank(), &format!("{origin}.coeff"))?, legs: [a, b] })
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liealg::{builtin, BuiltinName};

    #[test]
    fn algebra_file_round_trip() {
        for name in ["sl2", "sl3", "heisenberg(1,1)", "abelian(3)"] {
            let dec = builtin_by_name(name).unwrap().decomposition;
            let file = AlgebraFile::from_decomposition(&dec);
            let json = serde_json::to_string(&file).unwrap();
            let back: AlgebraFile = from_json(&json, name).unwrap();
            assert_eq!(back.to_decomposition().unwrap(), dec);
        }
    }

    #[test]
    fn invalid_algebras_are_rejected() {
        let mut file = AlgebraFile::from_decomposition(&builtin(BuiltinName::Sl2).decomposition);
        file.brackets[0].terms[0].c = "3".into();
        assert!(matches!(file.to_decomposition(), Err(Error::InvalidArgument(_))));
        let mut file = AlgebraFile::from_decomposition(&builtin(BuiltinName::Sl2).decomposition);
        file.base = vec![1];
        file.complement = vec![0, 2];
        assert!(matches!(file.to_decomposition(), Err(Error::InvalidArgument(_))));
        let err = from_json::<AlgebraFile>("{\"dim\": 2,\n \"labels\": 3}", "x.json").unwrap_err();
        assert!(matches!(err, Error::Format(m) if m.starts_with("x.json:2:")));
    }

    #[test]
    fn twist_file_round_trip() {
        let ctx = TensorAlgebra::new(builtin(BuiltinName::Sl2).decomposition, 3);
        let mut f = ctx.one(2);
        f.add_term(1, vec![vec![1], vec![2]], RatFn::var(0).inv().unwrap());
        f.add_term(2, vec![vec![0, 1], vec![]], RatFn::constant(crate::exact::rat(3, 7)));
        let file = TwistFile::from_tensor(&f, ctx.labels(), Some("builtin:sl2".into()));
        let json = serde_json::to_string(&file).unwrap();
        let back: TwistFile = from_json(&json, "t").unwrap();
        assert_eq!(back.to_tensor(&ctx).unwrap(), f);
    }

    #[test]
    fn coefficient_errors_carry_location() {
        let file = RMatrixFile { terms: vec![BivectorTerm { i: "e".into(), j: "f".into(), coeff: "1//l1".into() }] };
        let dec = builtin(BuiltinName::Sl2).decomposition;
        let err = file.to_multivector(&dec).unwrap_err();
        assert!(matches!(err, Error::Format(m) if m.contains("terms[0].coeff") && m.contains("column 3")));
    }
}
