//! Rational-function expression trees over the base coordinates.

use std::fmt;
use std::sync::Arc;

use num_traits::{One, Signed, Zero};

use super::poly::default_var_name;
use super::ratfn::RatFn;
use super::rational::{format_rational, Rational};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Const(Rational),
    /// Coordinate `λ^{i+1}` (0-based index).
    Var(usize),
    Add(Arc<Expr>, Arc<Expr>),
    Sub(Arc<Expr>, Arc<Expr>),
    Mul(Arc<Expr>, Arc<Expr>),
    Div(Arc<Expr>, Arc<Expr>),
}

// Smart constructors; the operator traits would hide the constant folding.
#[allow(clippy::should_implement_trait)]
impl Expr {
    pub fn constant(c: Rational) -> Expr {
        Expr::Const(c)
    }

    pub fn int(n: i64) -> Expr {
        Expr::Const(Rational::from_integer(n.into()))
    }

    pub fn var(i: usize) -> Expr {
        Expr::Var(i)
    }

    fn as_const(&self) -> Option<&Rational> {
        match self {
            Expr::Const(c) => Some(c),
            _ => None,
        }
    }

    // Smart constructors fold constants and trivial identities only; no reassociation.
    pub fn add(a: Expr, b: Expr) -> Expr {
        match (a.as_const(), b.as_const()) {
            (Some(x), Some(y)) => Expr::Const(x + y),
            (Some(x), _) if x.is_zero() => b,
            (_, Some(y)) if y.is_zero() => a,
            _ => Expr::Add(Arc::new(a), Arc::new(b)),
        }
    }

    pub fn sub(a: Expr, b: Expr) -> Expr {
        match (a.as_const(), b.as_const()) {
            (Some(x), Some(y)) => Expr::Const(x - y),
            (_, Some(y)) if y.is_zero() => a,
            _ => Expr::Sub(Arc::new(a), Arc::new(b)),
        }
    }

    pub fn mul(a: Expr, b: Expr) -> Expr {
        match (a.as_const(), b.as_const()) {
            (Some(x), Some(y)) => Expr::Const(x * y),
            (Some(x), _) | (_, Some(x)) if x.is_zero() => Expr::Const(Rational::zero()),
            (Some(x), _) if x.is_one() => b,
            (_, Some(y)) if y.is_one() => a,
            _ => Expr::Mul(Arc::new(a), Arc::new(b)),
        }
    }

    pub fn div(a: Expr, b: Expr) -> Expr {
        match (a.as_const(), b.as_const()) {
            (Some(x), Some(y)) if !y.is_zero() => Expr::Const(x / y),
            (Some(x), _) if x.is_zero() => a,
            (_, Some(y)) if y.is_one() => a,
            _ => Expr::Div(Arc::new(a), Arc::new(b)),
        }
    }

    pub fn neg(a: Expr) -> Expr {
        match a {
            Expr::Const(c) => Expr::Const(-c),
            other => Expr::mul(Expr::int(-1), other),
        }
    }

    /// Exact value at `point`; fails on the first vanishing divisor.
    pub fn eval(&self, point: &[Rational]) -> Result<Rational> {
        Ok(match self {
            Expr::Const(c) => c.clone(),
            Expr::Var(i) => point
                .get(*i)
                .cloned()
                .ok_or(Error::PointDimension { expected: i + 1, got: point.len() })?,
            Expr::Add(a, b) => a.eval(point)? + b.eval(point)?,
            Expr::Sub(a, b) => a.eval(point)? - b.eval(point)?,
            Expr::Mul(a, b) => a.eval(point)? * b.eval(point)?,
            Expr::Div(a, b) => {
                let d = b.eval(point)?;
                if d.is_zero() {
                    return Err(Error::DivisionByZero(b.to_string()));
                }
                a.eval(point)? / d
            }
        })
    }

    pub fn diff(&self, var: usize) -> Expr {
        match self {
            Expr::Const(_) => Expr::int(0),
            Expr::Var(i) => Expr::int(if *i == var { 1 } else { 0 }),
            Expr::Add(a, b) => Expr::add(a.diff(var), b.diff(var)),
            Expr::Sub(a, b) => Expr::sub(a.diff(var), b.diff(var)),
            Expr::Mul(a, b) => Expr::add(
                Expr::mul(a.diff(var), (**b).clone()),
                Expr::mul((**a).clone(), b.diff(var)),
            ),
            Expr::Div(a, b) => {
                let da = a.diff(var);
                let db = b.diff(var);
                if matches!(db, Expr::Const(ref c) if c.is_zero()) {
                    return Expr::div(da, (**b).clone());
                }
                Expr::div(
                    Expr::sub(Expr::mul(da, (**b).clone()), Expr::mul((**a).clone(), db)),
                    Expr::mul((**b).clone(), (**b).clone()),
                )
            }
        }
    }

    /// Number of coordinates referenced (one past the largest variable index).
    pub fn nvars(&self) -> usize {
        match self {
            Expr::Const(_) => 0,
            Expr::Var(i) => i + 1,
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => a.nvars().max(b.nvars()),
        }
    }

    pub fn node_count(&self) -> usize {
        match self {
            Expr::Const(_) | Expr::Var(_) => 1,
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => 1 + a.node_count() + b.node_count(),
        }
    }

    /// Upper bounds on (numerator degree, denominator degree) after clearing denominators.
    pub fn degree_bound(&self) -> (u32, u32) {
        match self {
            Expr::Const(_) => (0, 0),
            Expr::Var(_) => (1, 0),
            Expr::Add(a, b) | Expr::Sub(a, b) => {
                let (na, da) = a.degree_bound();
                let (nb, db) = b.degree_bound();
                ((na + db).max(nb + da), da + db)
            }
            Expr::Mul(a, b) => {
                let (na, da) = a.degree_bound();
                let (nb, db) = b.degree_bound();
                (na + nb, da + db)
            }
            Expr::Div(a, b) => {
                let (na, da) = a.degree_bound();
                let (nb, db) = b.degree_bound();
                (na + db, da + nb)
            }
        }
    }

    /// Cross-multiplied normal form; fails when a numerator outgrows `budget` terms.
    pub fn to_ratfn(&self, budget: usize) -> Result<RatFn> {
        let out = match self {
            Expr::Const(c) => RatFn::constant(c.clone()),
            Expr::Var(i) => RatFn::var(*i),
            Expr::Add(a, b) => &a.to_ratfn(budget)? + &b.to_ratfn(budget)?,
            Expr::Sub(a, b) => &a.to_ratfn(budget)? - &b.to_ratfn(budget)?,
            Expr::Mul(a, b) => &a.to_ratfn(budget)? * &b.to_ratfn(budget)?,
            Expr::Div(a, b) => {
                let d = b.to_ratfn(budget)?;
                if d.is_zero() {
                    return Err(Error::DivisionByZero(b.to_string()));
                }
                &a.to_ratfn(budget)? * &d.inv()?
            }
        };
        let terms = out.numerator().len();
        if terms > budget {
            return Err(Error::ExpansionTooLarge { terms, budget });
        }
        Ok(out)
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) | Expr::Div(..) => 2,
            Expr::Const(c) if c.is_negative() || !c.denom().is_one() => 1,
            Expr::Const(_) | Expr::Var(_) => 3,
        }
    }

    fn fmt_child(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        if self.precedence() < min {
            write!(f, "({self})")
        } else {
            write!(f, "{self}")
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) => write!(f, "{}", format_rational(c)),
            Expr::Var(i) => write!(f, "{}", default_var_name(*i)),
            Expr::Add(a, b) => {
                a.fmt_child(f, 1)?;
                write!(f, " + ")?;
                b.fmt_child(f, 2)
            }
            Expr::Sub(a, b) => {
                a.fmt_child(f, 1)?;
                write!(f, " - ")?;
                b.fmt_child(f, 2)
            }
            Expr::Mul(a, b) => {
                a.fmt_child(f, 2)?;
                write!(f, "*")?;
                b.fmt_child(f, 3)
            }
            Expr::Div(a, b) => {
                a.fmt_child(f, 2)?;
                write!(f, "/")?;
                b.fmt_child(f, 3)
            }
        }
    }
}

impl From<&RatFn> for Expr {
    fn from(r: &RatFn) -> Expr {
        let poly = |p: &super::poly::Poly| {
            let mut acc = Expr::int(0);
            for (m, c) in p.terms() {
                let mut t = Expr::Const(c.clone());
                for (i, &e) in m.iter().enumerate() {
                    for _ in 0..e {
                        t = Expr::mul(t, Expr::Var(i));
                    }
                }
                acc = Expr::add(acc, t);
            }
            acc
        };
        let num = poly(r.numerator());
        if r.is_polynomial() {
            return num;
        }
        Expr::div(num, poly(&r.denominator()))
    }
}
