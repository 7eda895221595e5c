//! The PBW star product on functions of h*, transported from `U h_ℏ` through
//! symmetrization, and its bidifferential operators `B_k`.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::enveloping::{Enveloping, GradedUElem, UElem, Word};
use crate::error::{Error, Result};
use crate::exact::{factorial, Expr, HSeries, Monomial, Poly, RatFn, Rational, DEFAULT_SEED};
use crate::liealg::{Decomposition, LieAlgebra};

/// `B_k(f, g) = Σ coeff_ab(λ) ∂^a f ∂^b g`.
#[derive(Clone, Debug, PartialEq)]
pub struct BTable {
    pub k: usize,
    pub terms: Vec<(Monomial, Monomial, Poly)>,
}

impl BTable {
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn apply_poly(&self, f: &Poly, g: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (a, b, c) in &self.terms {
            let (df, dg) = (f.diff_multi(a), g.diff_multi(b));
            if !df.is_zero() && !dg.is_zero() {
                out = &out + &(&(c * &df) * &dg);
            }
        }
        out
    }
}

/// Star-product engine for one base algebra h (basis `0..l`).
pub struct PbwStar {
    env: Enveloping,
    rank: usize,
    abelian: bool,
    monomials: RwLock<HashMap<(Monomial, Monomial), Arc<Vec<Poly>>>>,
    tables: RwLock<Vec<Arc<BTable>>>,
}

impl std::fmt::Debug for PbwStar {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PbwStar").field("rank", &self.rank).finish()
    }
}

/// Exponent vectors of length `l` and total degree `≤ k`.
pub fn multi_indices(l: usize, k: usize) -> Vec<Vec<u32>> {
    fn go(l: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if cur.len() == l {
            out.push(cur.clone());
            return;
        }
        for e in 0..=left {
            cur.push(e);
            go(l, left - e, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(l, k as u32, &mut Vec::new(), &mut out);
    out.sort_by_key(|m| m.iter().sum::<u32>());
    out
}

fn trim(mut m: Vec<u32>) -> Monomial {
    while m.last() == Some(&0) {
        m.pop();
    }
    m
}

fn word_of(m: &[u32]) -> Word {
    m.iter().enumerate().flat_map(|(j, &e)| std::iter::repeat_n(j, e as usize)).collect()
}

fn exponents_of(w: &[usize]) -> Monomial {
    let mut m = vec![0u32; w.iter().max().map_or(0, |x| x + 1)];
    for &x in w {
        m[x] += 1;
    }
    m
}

pub fn multi_factorial(a: &[u32]) -> Rational {
    a.iter().fold(Rational::one(), |acc, &e| acc * factorial(e as usize))
}

fn binomial(n: u32, k: u32) -> Rational {
    factorial(n as usize) / (factorial(k as usize) * factorial((n - k) as usize))
}

/// All `α ≤ a` componentwise.
fn below(a: &[u32]) -> Vec<Vec<u32>> {
    let mut out = vec![Vec::new()];
    for &e in a {
        out = out.into_iter().flat_map(|p| (0..=e).map(move |x| [p.clone(), vec![x]].concat())).collect();
    }
    out
}

fn homogeneous_part(p: &Poly, d: u32) -> Poly {
    Poly::from_terms(p.terms().filter(|(m, _)| m.iter().sum::<u32>() == d).map(|(m, c)| (m.clone(), c.clone())))
}

fn shared_engines() -> &'static RwLock<HashMap<String, Arc<PbwStar>>> {
    static ENGINES: OnceLock<RwLock<HashMap<String, Arc<PbwStar>>>> = OnceLock::new();
    ENGINES.get_or_init(|| RwLock::new(HashMap::new()))
}

impl PbwStar {
    pub fn new(base: Arc<LieAlgebra>) -> Self {
        let rank = base.dim();
        let abelian = base.is_abelian();
        PbwStar {
            env: Enveloping::new(base),
            rank,
            abelian,
            monomials: RwLock::new(HashMap::new()),
            tables: RwLock::new(Vec::new()),
        }
    }

    /// Process-wide engine for a base algebra, so extracted `B_k` tables are reused.
    pub fn shared(base: &LieAlgebra) -> Arc<PbwStar> {
        let key = format!("{base:?}");
        if let Some(hit) = shared_engines().read().expect("engine lock").get(&key) {
            return hit.clone();
        }
        let mut engines = shared_engines().write().expect("engine lock");
        engines.entry(key).or_insert_with(|| Arc::new(PbwStar::new(Arc::new(base.clone())))).clone()
    }

    pub fn for_decomposition(dec: &Decomposition) -> Arc<PbwStar> {
        PbwStar::shared(&dec.base_algebra())
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn is_abelian(&self) -> bool {
        self.abelian
    }

    pub fn enveloping(&self) -> &Enveloping {
        &self.env
    }

    /// Symmetrization map on polynomials (plain Ug of h).
    pub fn sigma_plain(&self, f: &Poly) -> UElem {
        let mut out = UElem::zero();
        for (m, c) in f.terms() {
            out.add_scaled(&self.env.symmetrize(&word_of(m)), c);
        }
        out
    }

    /// `σ(f)` in `U h_ℏ`: a word shorter than its source monomial carries the ℏ-power of the difference.
    pub fn sigma(&self, f: &Poly) -> GradedUElem {
        let mut out = GradedUElem::default();
        for (m, c) in f.terms() {
            let d = m.iter().sum::<u32>() as usize;
            for (k, v) in GradedUElem::from_plain(&self.env.symmetrize(&word_of(m)), d).terms {
                let e = out.terms.entry(k).or_insert_with(Rational::zero);
                *e += v * c;
            }
        }
        out.terms.retain(|_, v| !v.is_zero());
        out
    }

    /// Inverse of [`Self::sigma_plain`], peeling the longest words first.
    pub fn sigma_inv_plain(&self, u: &UElem) -> Result<Poly> {
        if let Some(&bad) = u.terms().flat_map(|(w, _)| w.iter()).find(|&&x| x >= self.rank) {
            return Err(Error::NotInBaseSubalgebra(bad));
        }
        let mut rest = u.clone();
        let mut out = Poly::zero();
        while let Some((w, c)) = rest.terms().max_by_key(|(w, _)| w.len()).map(|(w, c)| (w.clone(), c.clone())) {
            let m = trim(exponents_of(&w));
            out.add_term(m.clone(), c.clone());
            rest.add_scaled(&self.env.symmetrize(&w), &-c);
        }
        Ok(out)
    }

    /// Inverse of [`Self::sigma`], truncated at ℏ^N.
    pub fn sigma_inv(&self, u: &GradedUElem, order: usize) -> Result<HSeries<Poly>> {
        let mut out: HSeries<Poly> = HSeries::zero(order);
        for ((k, w), c) in &u.terms {
            let p = self.sigma_inv_plain(&UElem::monomial(w.clone(), c.clone()))?;
            for (m, v) in p.terms() {
                let drop = w.len() - m.iter().sum::<u32>() as usize;
                if k + drop <= order {
                    out.coeff_mut(k + drop).add_term(m.clone(), v.clone());
                }
            }
        }
        Ok(out)
    }

    /// All ℏ-coefficients of `λ^a ★ λ^b` (index = power of ℏ).
    pub fn star_monomials(&self, a: &[u32], b: &[u32]) -> Result<Arc<Vec<Poly>>> {
        let key = (trim(a.to_vec()), trim(b.to_vec()));
        if let Some(hit) = self.monomials.read().expect("cache lock").get(&key) {
            return Ok(hit.clone());
        }
        let total = (a.iter().sum::<u32>() + b.iter().sum::<u32>()) as usize;
        let coeffs = if self.abelian {
            let mut v = vec![Poly::zero(); total + 1];
            v[0] = Poly::monomial(a.to_vec(), Rational::one()).mul_monomial(b, &Rational::one());
            v
        } else {
            let prod = self.env.mul(&self.env.symmetrize(&word_of(a)), &self.env.symmetrize(&word_of(b)));
            let p = self.sigma_inv_plain(&prod)?;
            (0..=total).map(|k| homogeneous_part(&p, (total - k) as u32)).collect()
        };
        let coeffs = Arc::new(coeffs);
        self.monomials.write().expect("cache lock").insert(key, coeffs.clone());
        Ok(coeffs)
    }

    /// `f ★ g = σ^{-1}(σ(f) σ(g))` truncated at ℏ^N.
    pub fn star(&self, f: &Poly, g: &Poly, order: usize) -> Result<HSeries<Poly>> {
        let mut out = HSeries::zero(order);
        for (a, ca) in f.terms() {
            for (b, cb) in g.terms() {
                let c = ca * cb;
                for (k, p) in self.star_monomials(a, b)?.iter().enumerate().take(order + 1) {
                    *out.coeff_mut(k) = out.coeff(k) + &p.scale(&c);
                }
            }
        }
        Ok(out)
    }

    /// The ℏ^k coefficient of the star product on polynomials.
    fn star_coeff(&self, f: &Poly, g: &Poly, k: usize) -> Result<Poly> {
        let mut out = Poly::zero();
        for (a, ca) in f.terms() {
            for (b, cb) in g.terms() {
                if let Some(p) = self.star_monomials(a, b)?.get(k) {
                    out = &out + &p.scale(&(ca * cb));
                }
            }
        }
        Ok(out)
    }

    /// Degree parameter `D = 2N + 2`: extraction reads monomial pairs of total degree
    /// at most `2N`, and verification probes have total degree `D + 1`.
    pub fn interpolation_degree(order: usize) -> usize {
        2 * order + 2
    }

    fn extract(&self, k: usize) -> Result<BTable> {
        let l = self.rank;
        let idx = multi_indices(l, k);
        let mut terms = Vec::new();
        if !self.abelian {
            for a in &idx {
                for b in &idx {
                    // c_ab(λ) = (1/(a!b!)) B_k((λ'−λ)^a, (λ'−λ)^b)|_{λ'=λ}
                    let mut acc = Poly::zero();
                    for alpha in below(a) {
                        for beta in below(b) {
                            let s = self.star_monomials(&alpha, &beta)?;
                            let Some(sk) = s.get(k) else { continue };
                            if sk.is_zero() {
                                continue;
                            }
                            let mut coef = Rational::one();
                            let mut shift = vec![0u32; l];
                            let mut parity = 0;
                            for j in 0..l {
                                coef *= binomial(a[j], alpha[j]) * binomial(b[j], beta[j]);
                                shift[j] = (a[j] - alpha[j]) + (b[j] - beta[j]);
                                parity += shift[j];
                            }
                            if parity % 2 == 1 {
                                coef = -coef;
                            }
                            acc = &acc + &sk.mul_monomial(&shift, &coef);
                        }
                    }
                    if !acc.is_zero() {
                        let norm = (multi_factorial(a) * multi_factorial(b)).recip();
                        terms.push((trim(a.clone()), trim(b.clone()), acc.scale(&norm)));
                    }
                }
            }
        }
        let table = BTable { k, terms };
        self.verify(&table)?;
        Ok(table)
    }

    /// Checks the table on 50 random pairs whose total degree is `D + 1`.
    fn verify(&self, table: &BTable) -> Result<()> {
        if self.abelian {
            return Ok(());
        }
        let k = table.k;
        let total = Self::interpolation_degree(k) + 1;
        let mut rng = ChaCha8Rng::seed_from_u64(DEFAULT_SEED ^ ((k as u64) << 8));
        let l = self.rank;
        let random_poly = |deg: usize, rng: &mut ChaCha8Rng| {
            let mut p = Poly::zero();
            for d in [deg, rng.gen_range(0..=deg)] {
                let mut m = vec![0u32; l];
                for _ in 0..d {
                    m[rng.gen_range(0..l)] += 1;
                }
                let c = loop {
                    let c: i64 = rng.gen_range(-5..=5);
                    if c != 0 {
                        break c;
                    }
                };
                p.add_term(trim(m), Rational::from_integer(c.into()));
            }
            p
        };
        for _ in 0..50 {
            let df = rng.gen_range(1..total);
            let f = random_poly(df, &mut rng);
            let g = random_poly(total - df, &mut rng);
            if table.apply_poly(&f, &g) != self.star_coeff(&f, &g, k)? {
                return Err(Error::InterpolationInconsistent { order: k });
            }
        }
        Ok(())
    }

    /// `B_1 .. B_N`, extracted on first use and cached.
    pub fn b_tables(&self, order: usize) -> Result<Vec<Arc<BTable>>> {
        {
            let tables = self.tables.read().expect("table lock");
            if tables.len() >= order {
                return Ok(tables[..order].to_vec());
            }
        }
        let mut tables = self.tables.write().expect("table lock");
        while tables.len() < order {
            let k = tables.len() + 1;
            tables.push(Arc::new(self.extract(k)?));
        }
        Ok(tables[..order].to_vec())
    }

    /// `Σ_k ℏ^k B_k(f, g)` on rational functions.
    pub fn star_ratfn(&self, f: &RatFn, g: &RatFn, order: usize) -> Result<HSeries<RatFn>> {
        let mut out = HSeries::zero(order);
        *out.coeff_mut(0) = f * g;
        if self.abelian || order == 0 || f.as_constant().is_some() || g.as_constant().is_some() {
            return Ok(out);
        }
        let mut df: HashMap<Monomial, RatFn> = HashMap::new();
        let mut dg: HashMap<Monomial, RatFn> = HashMap::new();
        for table in self.b_tables(order)? {
            let mut acc = RatFn::zero();
            for (a, b, c) in &table.terms {
                let fa = df.entry(a.clone()).or_insert_with(|| f.diff_multi(a));
                if fa.is_zero() {
                    continue;
                }
                let gb = dg.entry(b.clone()).or_insert_with(|| g.diff_multi(b));
                if gb.is_zero() {
                    continue;
                }
                acc = &acc + &(&(&RatFn::from_poly(c.clone()) * fa) * gb);
            }
            *out.coeff_mut(table.k) = acc;
        }
        Ok(out)
    }

    /// `Σ_k ℏ^k B_k(f, g)` on expression trees (coefficient `k` at index `k`).
    pub fn star_expr(&self, f: &Expr, g: &Expr, order: usize) -> Result<Vec<Expr>> {
        let mut out = vec![Expr::mul(f.clone(), g.clone())];
        if order == 0 {
            return Ok(out);
        }
        let tables = if self.abelian { Vec::new() } else { self.b_tables(order)? };
        let deriv = |e: &Expr, a: &[u32]| {
            let mut d = e.clone();
            for (v, &n) in a.iter().enumerate() {
                for _ in 0..n {
                    d = d.diff(v);
                }
            }
            d
        };
        for k in 1..=order {
            let mut acc = Expr::int(0);
            if let Some(table) = tables.get(k - 1) {
                for (a, b, c) in &table.terms {
                    let term = Expr::mul(Expr::mul(Expr::from(&RatFn::from_poly(c.clone())), deriv(f, a)), deriv(g, b));
                    acc = Expr::add(acc, term);
                }
            }
            out.push(acc);
        }
        Ok(out)
    }
}

/// Lie–Poisson bracket `{f, g} = Σ c_ij^k λ_k ∂_i f ∂_j g` of the base algebra.
pub fn poisson(base: &LieAlgebra, f: &Poly, g: &Poly) -> Poly {
    let mut out = Poly::zero();
    for (i, j, k, c) in base.nonzero_constants() {
        let term = &(&f.diff(i) * &g.diff(j)) * &Poly::var(k);
        out = &out + &term.scale(&c);
    }
    out
}
