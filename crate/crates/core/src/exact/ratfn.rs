//! Rational functions kept as a polynomial numerator over a factored denominator.
//!
//! Denominator atoms are monic polynomials with exponents. Common denominators are
//! formed by taking the maximum exponent per atom, so no multivariate gcd is needed;
//! atoms are cancelled against the numerator whenever an exact division succeeds.

use std::fmt;

use num_traits::{One, Zero};

use super::poly::{default_var_name, Poly};
use super::rational::Rational;
use crate::error::{Error, Result};

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RatFn {
    num: Poly,
    den: Vec<(Poly, u32)>,
}

fn merge_max(a: &[(Poly, u32)], b: &[(Poly, u32)]) -> Vec<(Poly, u32)> {
    let mut out = a.to_vec();
    for (atom, e) in b {
        match out.iter_mut().find(|(x, _)| x == atom) {
            Some((_, f)) => *f = (*f).max(*e),
            None => out.push((atom.clone(), *e)),
        }
    }
    out.sort();
    out
}

fn power_product(atoms: &[(Poly, u32)]) -> Poly {
    let mut acc = Poly::one();
    for (a, e) in atoms {
        acc = &acc * &a.pow(*e);
    }
    acc
}

/// Numerator multiplier lifting `from` to the denominator `to` (which must dominate it).
fn lift_factor(from: &[(Poly, u32)], to: &[(Poly, u32)]) -> Poly {
    let mut acc = Poly::one();
    for (atom, e) in to {
        let have = from.iter().find(|(x, _)| x == atom).map(|(_, f)| *f).unwrap_or(0);
        if *e > have {
            acc = &acc * &atom.pow(*e - have);
        }
    }
    acc
}

/// Splits a nonzero polynomial into `scale * prod(atoms)`, pulling out variable powers.
fn atomize(p: &Poly) -> (Rational, Vec<(Poly, u32)>) {
    let content = p.monomial_content();
    let rest = p.div_monomial(&content);
    let mut atoms = Vec::new();
    for (i, &e) in content.iter().enumerate() {
        if e > 0 {
            atoms.push((Poly::var(i), e));
        }
    }
    let (scale, monic) = rest.make_monic();
    if !monic.is_one() {
        atoms.push((monic, 1));
    }
    atoms.sort();
    (scale, atoms)
}

impl RatFn {
    pub fn zero() -> Self {
        RatFn::default()
    }

    pub fn one() -> Self {
        RatFn::from_poly(Poly::one())
    }

    pub fn constant(c: Rational) -> Self {
        RatFn::from_poly(Poly::constant(c))
    }

    pub fn var(i: usize) -> Self {
        RatFn::from_poly(Poly::var(i))
    }

    pub fn from_poly(num: Poly) -> Self {
        RatFn { num, den: Vec::new() }
    }

    /// `num / den` for polynomial numerator and denominator.
    pub fn from_parts(num: Poly, den: &Poly) -> Result<Self> {
        Ok(&RatFn::from_poly(num) * &RatFn::from_poly(den.clone()).inv()?)
    }

    /// `num / Π f^e` with the denominator supplied already factored (factors need not be monic).
    pub fn from_factored(num: Poly, factors: &[(Poly, u32)]) -> Result<Self> {
        let mut num = num;
        let mut den: Vec<(Poly, u32)> = Vec::new();
        for (f, e) in factors {
            if f.is_zero() {
                return Err(Error::DivisionByZero(f.to_string()));
            }
            let (scale, atoms) = atomize(f);
            num = num.scale(&num_traits::pow(scale.recip(), *e as usize));
            for (atom, ae) in atoms {
                match den.iter_mut().find(|(x, _)| *x == atom) {
                    Some((_, g)) => *g += ae * e,
                    None => den.push((atom, ae * e)),
                }
            }
        }
        den.sort();
        Ok(RatFn { num, den }.cancel())
    }

    pub fn numerator(&self) -> &Poly {
        &self.num
    }

    pub fn denominator_atoms(&self) -> &[(Poly, u32)] {
        &self.den
    }

    pub fn denominator(&self) -> Poly {
        power_product(&self.den)
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.den.is_empty() && self.num.is_one()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_empty()
    }

    pub fn as_constant(&self) -> Option<Rational> {
        if self.den.is_empty() {
            self.num.as_constant()
        } else if self.num.is_zero() {
            Some(Rational::zero())
        } else {
            None
        }
    }

    pub fn as_poly(&self) -> Option<&Poly> {
        self.den.is_empty().then_some(&self.num)
    }

    pub fn nvars(&self) -> usize {
        self.den.iter().map(|(a, _)| a.nvars()).fold(self.num.nvars(), usize::max)
    }

    fn cancel(mut self) -> Self {
        if self.num.is_zero() {
            self.den.clear();
            return self;
        }
        let mut den = Vec::with_capacity(self.den.len());
        for (atom, mut e) in std::mem::take(&mut self.den) {
            while e > 0 {
                match self.num.div_exact(&atom) {
                    Some(q) => {
                        self.num = q;
                        e -= 1;
                    }
                    None => break,
                }
            }
            if e > 0 {
                den.push((atom, e));
            }
        }
        self.den = den;
        self
    }

    pub fn scale(&self, c: &Rational) -> RatFn {
        if c.is_zero() {
            return RatFn::zero();
        }
        RatFn { num: self.num.scale(c), den: self.den.clone() }
    }

    pub fn inv(&self) -> Result<RatFn> {
        if self.num.is_zero() {
            return Err(Error::DivisionByZero(self.to_string()));
        }
        let (scale, atoms) = atomize(&self.num);
        let num = power_product(&self.den).scale(&scale.recip());
        Ok(RatFn { num, den: atoms }.cancel())
    }

    pub fn pow(&self, e: u32) -> RatFn {
        let mut acc = RatFn::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    pub fn diff(&self, var: usize) -> RatFn {
        if self.num.is_zero() {
            return RatFn::zero();
        }
        let moving: Vec<(Poly, u32, Poly)> = self
            .den
            .iter()
            .filter_map(|(a, e)| {
                let d = a.diff(var);
                (!d.is_zero()).then(|| (a.clone(), *e, d))
            })
            .collect();
        if moving.is_empty() {
            return RatFn { num: self.num.diff(var), den: self.den.clone() }.cancel();
        }
        // d(N/D) = (N' * prod a - N * sum_i e_i a_i' prod_{j != i} a_j) / (D * prod a)
        let prod_all: Poly = moving.iter().fold(Poly::one(), |acc, (a, _, _)| &acc * a);
        let mut num = &self.num.diff(var) * &prod_all;
        for (i, (_, e, d)) in moving.iter().enumerate() {
            let mut others = Poly::one();
            for (j, (b, _, _)) in moving.iter().enumerate() {
                if i != j {
                    others = &others * b;
                }
            }
            let term = &(&self.num * d) * &others;
            num = &num - &term.scale(&Rational::from_integer((*e).into()));
        }
        let mut den = self.den.clone();
        for (atom, f) in den.iter_mut() {
            if moving.iter().any(|(a, _, _)| a == atom) {
                *f += 1;
            }
        }
        RatFn { num, den }.cancel()
    }

    pub fn diff_multi(&self, alpha: &[u32]) -> RatFn {
        let mut out = self.clone();
        for (v, &k) in alpha.iter().enumerate() {
            for _ in 0..k {
                out = out.diff(v);
            }
        }
        out
    }

    pub fn eval(&self, point: &[Rational]) -> Result<Rational> {
        let mut den = Rational::one();
        for (a, e) in &self.den {
            let v = a.eval(point);
            if v.is_zero() {
                return Err(Error::DivisionByZero(a.to_string()));
            }
            den *= num_traits::pow(v, *e as usize);
        }
        Ok(self.num.eval(point) / den)
    }

    /// Substitutes each variable by a polynomial (e.g. an affine shift).
    pub fn compose(&self, subs: &[Poly]) -> Result<RatFn> {
        let num = RatFn::from_poly(self.num.compose(subs));
        let den = RatFn::from_poly(power_product(&self.den).compose(subs));
        Ok(&num * &den.inv()?)
    }

    pub fn to_expr_string(&self) -> String {
        self.to_string()
    }

    /// Writes `num/den` in the coefficient grammar, parenthesizing only where needed.
    pub fn fmt_with(&self, f: &mut fmt::Formatter<'_>, var: &dyn Fn(usize) -> String) -> fmt::Result {
        struct P<'a>(&'a Poly, &'a dyn Fn(usize) -> String);
        impl fmt::Display for P<'_> {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                self.0.fmt_with(f, self.1)
            }
        }
        if self.den.is_empty() {
            return self.num.fmt_with(f, var);
        }
        if self.num.len() > 1 {
            write!(f, "({})", P(&self.num, var))?;
        } else {
            write!(f, "{}", P(&self.num, var))?;
        }
        let factors: Vec<String> = self
            .den
            .iter()
            .flat_map(|(a, e)| {
                let s = if a.len() > 1 { format!("({})", P(a, var)) } else { P(a, var).to_string() };
                std::iter::repeat_n(s, *e as usize)
            })
            .collect();
        let den = factors.join("*");
        if factors.len() == 1 && !den.contains('*') {
            write!(f, "/{den}")
        } else {
            write!(f, "/({den})")
        }
    }
}

impl fmt::Display for RatFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_with(f, &default_var_name)
    }
}

impl std::ops::Add for &RatFn {
    type Output = RatFn;
    fn add(self, rhs: &RatFn) -> RatFn {
        if rhs.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return rhs.clone();
        }
        if self.den == rhs.den {
            return RatFn { num: &self.num + &rhs.num, den: self.den.clone() }.cancel();
        }
        let den = merge_max(&self.den, &rhs.den);
        let a = &self.num * &lift_factor(&self.den, &den);
        let b = &rhs.num * &lift_factor(&rhs.den, &den);
        RatFn { num: &a + &b, den }.cancel()
    }
}

impl std::ops::Neg for &RatFn {
    type Output = RatFn;
    fn neg(self) -> RatFn {
        RatFn { num: -&self.num, den: self.den.clone() }
    }
}

impl std::ops::Sub for &RatFn {
    type Output = RatFn;
    fn sub(self, rhs: &RatFn) -> RatFn {
        self + &(-rhs)
    }
}

impl std::ops::Mul for &RatFn {
    type Output = RatFn;
    fn mul(self, rhs: &RatFn) -> RatFn {
        if self.is_zero() || rhs.is_zero() {
            return RatFn::zero();
        }
        let mut den = self.den.clone();
        for (atom, e) in &rhs.den {
            match den.iter_mut().find(|(x, _)| x == atom) {
                Some((_, f)) => *f += e,
                None => den.push((atom.clone(), *e)),
            }
        }
        den.sort();
        let out = RatFn { num: &self.num * &rhs.num, den };
        if self.den.is_empty() && rhs.den.is_empty() {
            out
        } else {
            out.cancel()
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $f:ident) => {
        impl std::ops::$tr for RatFn {
            type Output = RatFn;
            fn $f(self, rhs: RatFn) -> RatFn {
                (&self).$f(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl std::ops::Neg for RatFn {
    type Output = RatFn;
    fn neg(self) -> RatFn {
        -&self
    }
}

impl From<Poly> for RatFn {
    fn from(p: Poly) -> Self {
        RatFn::from_poly(p)
    }
}

impl From<Rational> for RatFn {
    fn from(c: Rational) -> Self {
        RatFn::constant(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rational::{int, rat};

    fn l(i: usize) -> RatFn {
        RatFn::var(i)
    }

    #[test]
    fn cancellation() {
        let q = &l(0) * &l(0).inv().unwrap();
        assert!(q.is_one());
        let s = &(&l(0) + &l(1)).pow(2) * &(&l(0) + &l(1)).inv().unwrap();
        assert_eq!(s, &l(0) + &l(1));
    }

    #[test]
    fn quotient_rule() {
        let f = l(0).inv().unwrap();
        let df = f.diff(0);
        let expect = -&l(0).pow(2).inv().unwrap();
        assert!((&df - &expect).is_zero());
        assert!(f.diff(1).is_zero());
    }

    #[test]
    fn sum_of_fractions() {
        // 1/x + 1/y - (x+y)/(xy) = 0
        let a = l(0).inv().unwrap();
        let b = l(1).inv().unwrap();
        let c = &(&l(0) + &l(1)) * &(&l(0) * &l(1)).inv().unwrap();
        assert!((&(&a + &b) - &c).is_zero());
    }

    #[test]
    fn evaluation_and_poles() {
        let f = &l(1) * &(&l(0) - &RatFn::constant(int(1))).inv().unwrap();
        assert_eq!(f.eval(&[int(3), int(4)]).unwrap(), int(2));
        assert!(matches!(f.eval(&[int(1), int(4)]), Err(Error::DivisionByZero(_))));
    }

    #[test]
    fn scaled_atoms_share_identity() {
        // 1/(2x) + 1/(-x) = -1/(2x)
        let a = l(0).scale(&int(2)).inv().unwrap();
        let b = (-&l(0)).inv().unwrap();
        let s = &a + &b;
        assert_eq!(s.denominator_atoms().len(), 1);
        assert_eq!(s.eval(&[int(1)]).unwrap(), rat(-1, 2));
    }

    #[test]
    fn display_is_parseable_shape() {
        let f = l(0).inv().unwrap().scale(&int(-1));
        assert_eq!(f.to_string(), "-1/l1");
        let g = RatFn::from_parts(&Poly::var(0) + &Poly::one(), &(&(&Poly::var(0) * &Poly::var(1)) * &(&Poly::var(1) + &Poly::one()))).unwrap();
        assert_eq!(g.to_string(), "(l1 + 1)/((l2 + 1)*l2*l1)");
    }
}
