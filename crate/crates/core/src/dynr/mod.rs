//! Triangular dynamical r-matrices: construction from fat reductive
//! decompositions, printed closed forms, and the CDYBE and equivariance residuals.

mod construct;

pub use construct::{construct_at_point, construct_r, det_a, fatness, Construction, Fatness, PointR, MAX_SYMBOLIC_COMPLEMENT};


use crate::error::{Error, Result};
use crate::exact::{Poly, RatFn, Rational};
use crate::exterior::Multivector;
use crate::liealg::{builtin, Builtin, BuiltinName, Decomposition};

/// `r(λ) ∈ Λ²g` over a decomposition, with the construction data when built by [`construct_r`].
#[derive(Clone, Debug, PartialEq)]
pub struct DynamicalR {
    dec: Decomposition,
    r: Multivector,
    construction: Option<Construction>,
}

impl DynamicalR {
    /// Wraps a bivector; it must be grade 2 and depend only on the base coordinates.
    pub fn new(dec: Decomposition, r: Multivector) -> Result<Self> {
        if r.terms().any(|(w, _)| w.len() != 2) {
            return Err(Error::InvalidArgument("r must be a bivector".into()));
        }
        if let Some((w, _)) = r.terms().find(|(w, _)| w.iter().any(|&i| i >= dec.algebra().dim())) {
            return Err(Error::InvalidArgument(format!("basis index out of range in {w:?}")));
        }
        if r.nvars() > dec.rank() {
            return Err(Error::PointDimension { expected: dec.rank(), got: r.nvars() });
        }
        Ok(DynamicalR { dec, r, construction: None })
    }

    /// From `(i, j, c)` entries meaning `c · e_i ∧ e_j`.
    pub fn from_entries(dec: Decomposition, entries: &[(usize, usize, RatFn)]) -> Result<Self> {
        let mut r = Multivector::zero();
        for (i, j, c) in entries {
            r.add_term(vec![*i, *j], c.clone());
        }
        DynamicalR::new(dec, r)
    }

    pub fn decomposition(&self) -> &Decomposition {
        &self.dec
    }

    pub fn bivector(&self) -> &Multivector {
        &self.r
    }

    pub fn construction(&self) -> Option<&Construction> {
        self.construction.as_ref()
    }

    /// Sparse `(i, j, c)` with `i < j`.
    pub fn entries(&self) -> Vec<(usize, usize, RatFn)> {
        self.r.terms().map(|(w, c)| (w[0], w[1], c.clone())).collect()
    }

    /// Coefficient of `e_i ∧ e_j` (antisymmetric in `i, j`).
    pub fn coefficient(&self, i: usize, j: usize) -> RatFn {
        match i.cmp(&j) {
            std::cmp::Ordering::Less => self.r.coeff(&[i, j]),
            std::cmp::Ordering::Greater => -self.r.coeff(&[j, i]),
            std::cmp::Ordering::Equal => RatFn::zero(),
        }
    }

    /// Non-degeneracy is defined here only for constructor output: `det a ≢ 0`.
    pub fn is_nondegenerate(&self) -> Result<bool> {
        self.construction.as_ref().map(|c| !c.det.is_zero()).ok_or(Error::NondegeneracyUndefined)
    }

    /// Reparameterizes `λ → λ − μ`.
    pub fn shift_parameter(&self, mu: &[Rational]) -> Result<DynamicalR> {
        if mu.len() != self.dec.rank() {
            return Err(Error::PointDimension { expected: self.dec.rank(), got: mu.len() });
        }
        let subs: Vec<Poly> = mu.iter().enumerate().map(|(j, m)| &Poly::var(j) - &Poly::constant(m.clone())).collect();
        Ok(DynamicalR { dec: self.dec.clone(), r: self.r.compose(&subs)?, construction: None })
    }

    /// Substitutes the coordinates with polynomials (e.g. to restrict to a slice).
    pub fn compose(&self, dec: Decomposition, subs: &[Poly]) -> Result<DynamicalR> {
        DynamicalR::new(dec, self.r.compose(subs)?)
    }
}

/// `f_ij(λ) = <λ, [h_i, h_j]>`, the linear Poisson structure on h*.
#[derive(Clone, Debug, PartialEq)]
pub struct BaseStructure {
    f: Vec<Vec<Poly>>,
}

impl BaseStructure {
    pub fn new(dec: &Decomposition) -> Self {
        let base = dec.base();
        let f = base.iter().map(|&i| base.iter().map(|&j| dec.pairing(i, j)).collect()).collect();
        BaseStructure { f }
    }

    pub fn rank(&self) -> usize {
        self.f.len()
    }

    pub fn f(&self, i: usize, j: usize) -> &Poly {
        &self.f[i][j]
    }
}

/// `Σ_i h_i ∧ ∂r/∂λ^i − ½ [r, r]`.
pub fn cdybe_residual(r: &DynamicalR) -> Multivector {
    let dec = &r.dec;
    let mut out = r.r.schouten(&r.r, dec.algebra()).scale(&crate::exact::rat(-1, 2));
    for (j, &h) in dec.base().iter().enumerate() {
        out = out.add(&Multivector::basis(h).wedge(&r.r.diff(j)));
    }
    out
}

/// `ad(h_i) r + Σ_j f_ij(λ) ∂r/∂λ^j` for the base direction `i` (0-based position in the base).
pub fn equivariance_residual(r: &DynamicalR, base: &BaseStructure, i: usize) -> Result<Multivector> {
    let dec = &r.dec;
    if i >= dec.rank() || base.rank() != dec.rank() {
        return Err(Error::InvalidArgument(format!("base direction {i} out of range")));
    }
    let mut out = r.r.ad_action(dec.base()[i], dec.algebra());
    for j in 0..dec.rank() {
        let f = base.f(i, j);
        if !f.is_zero() {
            out = out.add(&r.r.diff(j).mul_fn(&RatFn::from_poly(f.clone())));
        }
    }
    Ok(out)
}

/// Named closed-form r-matrices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ClosedForm {
    /// `−Σ_{α>0} (λ,α)^{-1} e_α ∧ e_{−α}` over the Cartan base.
    SimpleCartan(BuiltinName),
    /// The same sum over positive roots outside the span of the given simple roots,
    /// placed on the decomposition from [`levi_decomposition`].
    SimpleReductiveRestricted(BuiltinName, Vec<usize>),
    /// `−(1/x) Σ_{i≤m} p_i ∧ q_i`.
    Heisenberg(usize, usize),
}

fn simple_builtin(name: BuiltinName) -> Result<Builtin> {
    let b = builtin(name);
    if b.root_pairs.is_empty() {
        return Err(Error::UnknownName(format!("{name} has no root data")));
    }
    Ok(b)
}

/// Base `h ⊕ ⊕_{α ∈ span(subset)} g_α` with the remaining root spaces as complement.
pub fn levi_decomposition(name: BuiltinName, subset: &[usize]) -> Result<Decomposition> {
    let b = simple_builtin(name)?;
    let rank = b.decomposition.base().len();
    if let Some(&bad) = subset.iter().find(|&&s| s >= rank) {
        return Err(Error::InvalidArgument(format!("simple root {bad} out of range")));
    }
    let mut base: Vec<usize> = b.decomposition.base().to_vec();
    let mut complement = Vec::new();
    for (k, &(e, f)) in b.root_pairs.iter().enumerate() {
        if b.root_support[k].iter().all(|s| subset.contains(s)) {
            base.extend([e, f]);
        } else {
            complement.extend([e, f]);
        }
    }
    complement.sort_unstable();
    Decomposition::new(b.algebra_arc(), base, complement)
}

pub fn closed_form(form: &ClosedForm) -> Result<DynamicalR> {
    match form {
        ClosedForm::SimpleCartan(name) => {
            let b = simple_builtin(*name)?;
            root_sum(&b, b.decomposition.clone(), &[])
        }
        ClosedForm::SimpleReductiveRestricted(name, subset) => {
            let b = simple_builtin(*name)?;
            let dec = levi_decomposition(*name, subset)?;
            root_sum(&b, dec, subset)
        }
        ClosedForm::Heisenberg(m, n) => {
            if *m == 0 {
                return Err(Error::UnknownName(format!("heisenberg({m},{n})")));
            }
            let b = builtin(BuiltinName::Heisenberg(*m, *n));
            let dec = b.decomposition.clone();
            let x = RatFn::var(dec.rank() - 1);
            let coeff = -x.inv()?;
            let k = m + n;
            let entries: Vec<_> = (0..*m).map(|i| (i, k + i, coeff.clone())).collect();
            DynamicalR::from_entries(dec, &entries)
        }
    }
}

fn root_sum(b: &Builtin, dec: Decomposition, excluded: &[usize]) -> Result<DynamicalR> {
    let mut entries = Vec::new();
    for (k, &(e, f)) in b.root_pairs.iter().enumerate() {
        if b.root_support[k].iter().all(|s| excluded.contains(s)) {
            continue;
        }
        let pairing = RatFn::from_poly(dec.pair_linear(b.algebra().bracket_basis(e, f)));
        entries.push((e, f, -pairing.inv()?));
    }
    DynamicalR::from_entries(dec, &entries)
}
