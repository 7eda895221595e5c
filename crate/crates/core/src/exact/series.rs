//! Power series in ℏ truncated at a fixed order.

use num_traits::{One, Zero};

use super::poly::Poly;
use super::ratfn::RatFn;
use super::rational::Rational;

/// Minimal ring interface shared by the coefficient types of [`HSeries`].
pub trait Ring: Clone + PartialEq {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, rhs: &Self) -> Self;
    fn sub(&self, rhs: &Self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    fn neg(&self) -> Self;
}

impl Ring for Rational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn neg(&self) -> Self {
        -self
    }
}

macro_rules! ring_by_ref {
    ($t:ty) => {
        impl Ring for $t {
            fn zero() -> Self {
                <$t>::zero()
            }
            fn one() -> Self {
                <$t>::one()
            }
            fn is_zero(&self) -> bool {
                <$t>::is_zero(self)
            }
            fn add(&self, rhs: &Self) -> Self {
                self + rhs
            }
            fn sub(&self, rhs: &Self) -> Self {
                self - rhs
            }
            fn mul(&self, rhs: &Self) -> Self {
                self * rhs
            }
            fn neg(&self) -> Self {
                -self
            }
        }
    };
}
ring_by_ref!(Poly);
ring_by_ref!(RatFn);

/// `Σ_{k=0}^{N} ℏ^k c_k`; every operation discards orders above `N`.
#[derive(Clone, Debug, PartialEq)]
pub struct HSeries<T> {
    order: usize,
    coeffs: Vec<T>,
}

impl<T: Clone> HSeries<T> {
    pub fn from_coeffs(order: usize, fill: T, mut coeffs: Vec<T>) -> Self {
        coeffs.truncate(order + 1);
        while coeffs.len() < order + 1 {
            coeffs.push(fill.clone());
        }
        HSeries { order, coeffs }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn coeff(&self, k: usize) -> &T {
        &self.coeffs[k]
    }

    pub fn coeff_mut(&mut self, k: usize) -> &mut T {
        &mut self.coeffs[k]
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn map<U: Clone>(&self, f: impl Fn(&T) -> U) -> HSeries<U> {
        HSeries { order: self.order, coeffs: self.coeffs.iter().map(f).collect() }
    }
}

impl<T: Ring> HSeries<T> {
    pub fn zero(order: usize) -> Self {
        HSeries { order, coeffs: vec![T::zero(); order + 1] }
    }

    pub fn constant(order: usize, c: T) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = c;
        s
    }

    pub fn one(order: usize) -> Self {
        Self::constant(order, T::one())
    }

    /// `c ℏ^k` (zero when `k` exceeds the order).
    pub fn monomial(order: usize, k: usize, c: T) -> Self {
        let mut s = Self::zero(order);
        if k <= order {
            s.coeffs[k] = c;
        }
        s
    }

    pub fn new(order: usize, coeffs: Vec<T>) -> Self {
        Self::from_coeffs(order, T::zero(), coeffs)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(T::is_zero)
    }

    /// Lowest order with a nonzero coefficient.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn truncate(&self, order: usize) -> Self {
        Self::new(order, self.coeffs.clone())
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let order = self.order.min(rhs.order);
        HSeries { order, coeffs: (0..=order).map(|k| self.coeffs[k].add(&rhs.coeffs[k])).collect() }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        let order = self.order.min(rhs.order);
        HSeries { order, coeffs: (0..=order).map(|k| self.coeffs[k].sub(&rhs.coeffs[k])).collect() }
    }

    pub fn neg(&self) -> Self {
        self.map(T::neg)
    }

    pub fn scale(&self, c: &T) -> Self {
        self.map(|x| x.mul(c))
    }

    /// Cauchy product with commuting ℏ.
    pub fn mul(&self, rhs: &Self) -> Self {
        let order = self.order.min(rhs.order);
        let mut out = Self::zero(order);
        for i in 0..=order {
            if self.coeffs[i].is_zero() {
                continue;
            }
            for j in 0..=order - i {
                if rhs.coeffs[j].is_zero() {
                    continue;
                }
                out.coeffs[i + j] = out.coeffs[i + j].add(&self.coeffs[i].mul(&rhs.coeffs[j]));
            }
        }
        out
    }

    /// Inverse of a series with invertible leading coefficient `one`.
    pub fn inverse_unital(&self) -> Option<Self> {
        if self.coeffs[0] != T::one() {
            return None;
        }
        let x = Self::one(self.order).sub(self);
        let mut acc = Self::one(self.order);
        let mut pow = Self::one(self.order);
        for _ in 0..self.order {
            pow = pow.mul(&x);
            acc = acc.add(&pow);
        }
        Some(acc)
    }
}
