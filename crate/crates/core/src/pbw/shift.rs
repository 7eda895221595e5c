//! The shift `f(λ + ℏh) = Σ_k ℏ^k/k! Σ ∂^k f/∂λ^{i1}..∂λ^{ik} ⊗ h_{i1}..h_{ik}`.

use std::collections::BTreeMap;

use super::enveloping::{Enveloping, Word};
use super::star::{multi_factorial, multi_indices, PbwStar};
use crate::error::Result;
use crate::exact::{factorial, RatFn};

/// `Σ_k ℏ^k Σ f_{k,w} ⊗ w` with `w` a normal-ordered word of Ug.
#[derive(Clone, Debug, PartialEq)]
pub struct ShiftImage {
    pub order: usize,
    pub coeffs: Vec<BTreeMap<Word, RatFn>>,
}

fn accumulate(map: &mut BTreeMap<Word, RatFn>, w: Word, c: RatFn) {
    if c.is_zero() {
        return;
    }
    let sum = match map.remove(&w) {
        Some(old) => &old + &c,
        None => c,
    };
    if !sum.is_zero() {
        map.insert(w, sum);
    }
}

impl ShiftImage {
    /// `f ⊗ 1`.
    pub fn scalar(f: RatFn, order: usize) -> Self {
        let mut coeffs = vec![BTreeMap::new(); order + 1];
        accumulate(&mut coeffs[0], Vec::new(), f);
        ShiftImage { order, coeffs }
    }

    /// Product in `(C(h*), ★) ⊗ Ug`: scalars starred, words multiplied, ℏ-orders convolved.
    pub fn mul(&self, rhs: &ShiftImage, star: &PbwStar, env: &Enveloping) -> Result<ShiftImage> {
        let order = self.order.min(rhs.order);
        let mut coeffs = vec![BTreeMap::new(); order + 1];
        for i in 0..=order {
            for j in 0..=(order - i) {
                for (u, f) in &self.coeffs[i] {
                    for (v, g) in &rhs.coeffs[j] {
                        let fg = star.star_ratfn(f, g, order - i - j)?;
                        let uv = env.mul_words(u, v);
                        for (k, s) in fg.coeffs().iter().enumerate() {
                            if s.is_zero() {
                                continue;
                            }
                            for (w, c) in uv.terms() {
                                accumulate(&mut coeffs[i + j + k], w.clone(), s.scale(c));
                            }
                        }
                    }
                }
            }
        }
        Ok(ShiftImage { order, coeffs })
    }
}

/// `f(λ + ℏh)` with `h_j = e_{base[j]}`, computed as `Σ_{|a|=k} (1/a!) ∂^a f ⊗ sym(h^a)`.
pub fn shift(f: &RatFn, order: usize, env: &Enveloping, base: &[usize]) -> ShiftImage {
    let l = base.len();
    let mut coeffs = vec![BTreeMap::new(); order + 1];
    for a in multi_indices(l, order) {
        let k = a.iter().sum::<u32>() as usize;
        let d = f.diff_multi(&a);
        if d.is_zero() {
            continue;
        }
        let letters: Word = a.iter().enumerate().flat_map(|(j, &e)| std::iter::repeat_n(base[j], e as usize)).collect();
        let d = d.scale(&multi_factorial(&a).recip());
        for (w, c) in env.symmetrize(&letters).terms() {
            accumulate(&mut coeffs[k], w.clone(), d.scale(c));
        }
    }
    ShiftImage { order, coeffs }
}

/// The same series summed over ordered index sequences, each product normal-ordered.
pub fn shift_by_sequences(f: &RatFn, order: usize, env: &Enveloping, base: &[usize]) -> ShiftImage {
    let l = base.len();
    let mut coeffs = vec![BTreeMap::new(); order + 1];
    let mut seqs: Vec<Vec<usize>> = vec![Vec::new()];
    for k in 0..=order {
        let norm = factorial(k).recip();
        for s in &seqs {
            let mut alpha = vec![0u32; l];
            for &i in s {
                alpha[i] += 1;
            }
            let d = f.diff_multi(&alpha);
            if d.is_zero() {
                continue;
            }
            let letters: Word = s.iter().map(|&i| base[i]).collect();
            for (w, c) in env.normal_order(&letters).terms() {
                accumulate(&mut coeffs[k], w.clone(), d.scale(&(c * &norm)));
            }
        }
        seqs = seqs.iter().flat_map(|s| (0..l).map(move |i| [s.as_slice(), &[i]].concat())).collect();
    }
    ShiftImage { order, coeffs }
}
