use num_traits::Zero;
use serde::Serialize;

use super::DynamicalR;
use crate::error::{Error, Result};
use crate::exact::linalg::{inverse, matmul, poly_adjugate, poly_det, Matrix};
use crate::exact::{format_rational, Poly, RatFn, Rational};
use crate::exterior::Multivector;
use crate::liealg::Decomposition;

/// Largest complement handled by the symbolic adjugate; larger ones use [`construct_at_point`].
pub const MAX_SYMBOLIC_COMPLEMENT: usize = 8;

/// The matrices behind a constructed r: `a_ij = <λ, [e_i, e_j]_h>` on the complement,
/// `c = a^{-1}`, and `det a` (its zero set is the singular locus).
#[derive(Clone, Debug, PartialEq)]
pub struct Construction {
    pub complement: Vec<usize>,
    pub a: Vec<Vec<Poly>>,
    pub c: Vec<Vec<RatFn>>,
    pub det: Poly,
}

fn a_matrix(dec: &Decomposition) -> Vec<Vec<Poly>> {
    let m = dec.complement();
    m.iter().map(|&i| m.iter().map(|&j| dec.pairing(i, j)).collect()).collect()
}

/// Splits `det` into powers of the (linear) entries of `a` where they divide it,
/// so that coefficients come out over small denominators.
fn factor_det(det: &Poly, a: &[Vec<Poly>]) -> Vec<(Poly, u32)> {
    let mut candidates: Vec<Poly> = Vec::new();
    for p in a.iter().flatten() {
        if p.is_zero() || p.as_constant().is_some() {
            continue;
        }
        let (_, monic) = p.make_monic();
        if !candidates.contains(&monic) {
            candidates.push(monic);
        }
    }
    let mut rest = det.clone();
    let mut factors = Vec::new();
    for cand in candidates {
        let mut e = 0;
        while let Some(q) = rest.div_exact(&cand) {
            rest = q;
            e += 1;
        }
        if e > 0 {
            factors.push((cand, e));
        }
    }
    if !rest.is_one() {
        factors.push((rest, 1));
    }
    factors
}

fn require_reductive(dec: &Decomposition) -> Result<()> {
    let report = dec.check_reductive();
    if report.is_reductive() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("decomposition is not reductive ({} violations)", report.violations.len())))
    }
}

/// `r(λ) = ½ Σ_ij c_ij(λ) e_i ∧ e_j` with `c = a(λ)^{-1}` computed as adjugate over determinant.
pub fn construct_r(dec: &Decomposition) -> Result<DynamicalR> {
    require_reductive(dec)?;
    let m = dec.complement();
    if m.len() > MAX_SYMBOLIC_COMPLEMENT {
        return Err(Error::ComplementTooLarge(m.len()));
    }
    let a = a_matrix(dec);
    let det = poly_det(&a);
    if det.is_zero() {
        return Err(Error::DegenerateEverywhere);
    }
    let factors = factor_det(&det, &a);
    let adj = poly_adjugate(&a);
    let c: Vec<Vec<RatFn>> = adj
        .into_iter()
        .map(|row| row.into_iter().map(|p| RatFn::from_factored(p, &factors)).collect::<Result<_>>())
        .collect::<Result<_>>()?;
    let mut r = Multivector::zero();
    for i in 0..m.len() {
        for j in (i + 1)..m.len() {
            r.add_term(vec![m[i], m[j]], c[i][j].clone());
        }
    }
    let mut out = DynamicalR::new(dec.clone(), r)?;
    out.construction = Some(Construction { complement: m.to_vec(), a, c, det });
    Ok(out)
}

fn check_point(dec: &Decomposition, point: &[Rational]) -> Result<()> {
    if point.len() != dec.rank() {
        return Err(Error::PointDimension { expected: dec.rank(), got: point.len() });
    }
    Ok(())
}

/// `c`, its derivatives and `r` at a single point, without symbolic inversion.
#[derive(Clone, Debug, PartialEq)]
pub struct PointR {
    pub complement: Vec<usize>,
    pub c: Matrix,
    /// `∂c/∂λ^i = −c (∂a/∂λ^i) c`.
    pub dc: Vec<Matrix>,
}

impl PointR {
    fn bivector(&self, c: &Matrix) -> Multivector {
        let m = &self.complement;
        let mut r = Multivector::zero();
        for i in 0..m.len() {
            for j in (i + 1)..m.len() {
                r.add_term(vec![m[i], m[j]], RatFn::constant(c[i][j].clone()));
            }
        }
        r
    }

    /// `r` at the point.
    pub fn r(&self) -> Multivector {
        self.bivector(&self.c)
    }

    /// `∂r/∂λ^i` at the point.
    pub fn dr(&self, i: usize) -> Multivector {
        self.bivector(&self.dc[i])
    }

    /// The CDYBE residual evaluated at the point (the bracket is pointwise).
    pub fn cdybe_residual(&self, dec: &Decomposition) -> Multivector {
        let r = self.r();
        let mut out = r.schouten(&r, dec.algebra()).scale(&crate::exact::rat(-1, 2));
        for (j, &h) in dec.base().iter().enumerate() {
            out = out.add(&Multivector::basis(h).wedge(&self.dr(j)));
        }
        out
    }
}

pub fn construct_at_point(dec: &Decomposition, point: &[Rational]) -> Result<PointR> {
    require_reductive(dec)?;
    check_point(dec, point)?;
    let a = a_matrix(dec);
    let eval = |f: &dyn Fn(&Poly) -> Rational| -> Matrix { a.iter().map(|row| row.iter().map(f).collect()).collect() };
    let a0 = eval(&|p| p.eval(point));
    let c = inverse(&a0).ok_or_else(|| Error::DivisionByZero("det a(λ) vanishes at the point".into()))?;
    let dc = (0..dec.rank())
        .map(|i| {
            let da = eval(&|p| p.diff(i).eval(point));
            matmul(&matmul(&c, &da), &c).into_iter().map(|row| row.into_iter().map(|x| -x).collect()).collect()
        })
        .collect();
    Ok(PointR { complement: dec.complement().to_vec(), c, dc })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Fatness {
    pub fat: bool,
    pub det_value: String,
    /// Symbolic `det a(λ)`, the global singular-locus certificate.
    pub det: String,
}

pub fn fatness(dec: &Decomposition, point: &[Rational]) -> Result<Fatness> {
    check_point(dec, point)?;
    let det = poly_det(&a_matrix(dec));
    let value = det.eval(point);
    Ok(Fatness { fat: !value.is_zero(), det_value: format_rational(&value), det: det.to_string() })
}

/// Symbolic `det a(λ)`.
pub fn det_a(dec: &Decomposition) -> Poly {
    poly_det(&a_matrix(dec))
}
