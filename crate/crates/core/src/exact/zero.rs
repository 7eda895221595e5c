//! Zero-testing of rational expressions: exact cross-multiplication or sampling.

use num_bigint::BigInt;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::expr::Expr;
use super::ratfn::RatFn;
use super::rational::{format_rational, Rational};
use crate::error::{Error, Result};

pub const DEFAULT_TERM_BUDGET: usize = 200_000;
pub const DEFAULT_TRIALS: usize = 32;
pub const DEFAULT_SEED: u64 = 0x5eed_2026;
const NUMERATOR_RANGE: i64 = 10_000;
const DENOMINATOR_RANGE: i64 = 1_000;
/// Distinct integer numerators available to each coordinate (the q = 1 slice alone).
const SAMPLE_SET_SIZE: u64 = 2 * NUMERATOR_RANGE as u64;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ZeroTest {
    /// Cross-multiply and expand; `ExpansionTooLarge` past `budget` terms.
    Exact { budget: usize },
    /// Evaluate at `trials` pseudorandom points.
    Sampled { seed: u64, trials: usize },
    /// Exact, falling back to sampling past the budget.
    Auto { budget: usize, seed: u64, trials: usize },
}

impl Default for ZeroTest {
    fn default() -> Self {
        ZeroTest::Auto { budget: DEFAULT_TERM_BUDGET, seed: DEFAULT_SEED, trials: DEFAULT_TRIALS }
    }
}

impl ZeroTest {
    pub fn exact() -> Self {
        ZeroTest::Exact { budget: DEFAULT_TERM_BUDGET }
    }

    pub fn sampled(seed: u64) -> Self {
        ZeroTest::Sampled { seed, trials: DEFAULT_TRIALS }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Method {
    Exact,
    Sampled {
        seed: u64,
        trials: usize,
        /// Per-trial Schwartz–Zippel bound `degree / |sample set|`, as `p/q`.
        per_trial_bound: String,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Verdict {
    pub zero: bool,
    pub method: Method,
    /// A point where the value is provably nonzero, when one was found.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<String>>,
}

impl Verdict {
    fn exact(zero: bool, witness: Option<Vec<Rational>>) -> Self {
        Verdict { zero, method: Method::Exact, witness: witness.map(|w| w.iter().map(format_rational).collect()) }
    }
}

/// Deterministic stream of sample points with coordinates in `{±1..±10^4}/{1..10^3}`.
pub struct SamplePoints {
    rng: ChaCha8Rng,
    nvars: usize,
}

impl SamplePoints {
    pub fn new(seed: u64, nvars: usize) -> Self {
        SamplePoints { rng: ChaCha8Rng::seed_from_u64(seed), nvars }
    }
}

impl Iterator for SamplePoints {
    type Item = Vec<Rational>;
    fn next(&mut self) -> Option<Vec<Rational>> {
        let point = (0..self.nvars)
            .map(|_| {
                let mut p = self.rng.gen_range(1..=NUMERATOR_RANGE);
                if self.rng.gen_bool(0.5) {
                    p = -p;
                }
                let q = self.rng.gen_range(1..=DENOMINATOR_RANGE);
                Rational::new(BigInt::from(p), BigInt::from(q))
            })
            .collect();
        Some(point)
    }
}

fn sampled_verdict<F>(eval: F, nvars: usize, degree: u32, seed: u64, trials: usize) -> Verdict
where
    F: Fn(&[Rational]) -> Result<Rational> + Sync,
{
    // Draw twice as many candidates as needed so that poles can be skipped deterministically.
    let candidates: Vec<Vec<Rational>> = SamplePoints::new(seed, nvars).take(trials * 4).collect();
    let values: Vec<Option<Rational>> = candidates.par_iter().map(|p| eval(p).ok()).collect();
    let mut used = 0;
    let mut witness = None;
    for (p, v) in candidates.iter().zip(values) {
        let Some(v) = v else { continue };
        used += 1;
        if !v.is_zero() {
            witness = Some(p.clone());
            break;
        }
        if used == trials {
            break;
        }
    }
    let bound = Rational::new(BigInt::from(degree.max(1)), BigInt::from(SAMPLE_SET_SIZE));
    Verdict {
        zero: witness.is_none(),
        method: Method::Sampled { seed, trials: used, per_trial_bound: format_rational(&bound) },
        witness: witness.map(|w| w.iter().map(format_rational).collect()),
    }
}

/// Finds a point where a nonzero function is nonzero (and defined).
pub fn find_witness(f: &RatFn, seed: u64) -> Option<Vec<Rational>> {
    if f.is_zero() {
        return None;
    }
    let nvars = f.nvars().max(1);
    // Small integer points first so witnesses stay readable.
    for s in 1..=4i64 {
        for t in 0..4i64 {
            let point: Vec<Rational> = (0..nvars)
                .map(|i| Rational::from_integer(BigInt::from(s + ((i as i64 + t) % 3))))
                .collect();
            if matches!(f.eval(&point), Ok(v) if !v.is_zero()) {
                return Some(point);
            }
        }
    }
    SamplePoints::new(seed, nvars).take(256).find(|p| matches!(f.eval(p), Ok(v) if !v.is_zero()))
}

/// Zero test of an expression tree.
pub fn is_zero(expr: &Expr, strategy: ZeroTest) -> Result<Verdict> {
    let nvars = expr.nvars().max(1);
    let sample = |seed, trials| {
        let (num_deg, _) = expr.degree_bound();
        sampled_verdict(|p| expr.eval(p), nvars, num_deg, seed, trials)
    };
    match strategy {
        ZeroTest::Exact { budget } => {
            let f = expr.to_ratfn(budget)?;
            let witness = find_witness(&f, DEFAULT_SEED);
            Ok(Verdict::exact(f.is_zero(), witness))
        }
        ZeroTest::Sampled { seed, trials } => Ok(sample(seed, trials)),
        ZeroTest::Auto { budget, seed, trials } => match expr.to_ratfn(budget) {
            Ok(f) => {
                let witness = find_witness(&f, seed);
                Ok(Verdict::exact(f.is_zero(), witness))
            }
            Err(Error::ExpansionTooLarge { .. }) => Ok(sample(seed, trials)),
            Err(e) => Err(e),
        },
    }
}

/// Zero test of an already-expanded rational function.
pub fn ratfn_is_zero(f: &RatFn, strategy: ZeroTest) -> Verdict {
    let exact = |budget: usize| (f.numerator().len() <= budget).then(|| Verdict::exact(f.is_zero(), find_witness(f, DEFAULT_SEED)));
    let sample = |seed, trials| {
        let degree = f.numerator().degree();
        sampled_verdict(|p| f.eval(p), f.nvars().max(1), degree, seed, trials)
    };
    match strategy {
        // Already expanded: the exact answer is free regardless of budget.
        ZeroTest::Exact { .. } => Verdict::exact(f.is_zero(), find_witness(f, DEFAULT_SEED)),
        ZeroTest::Sampled { seed, trials } => sample(seed, trials),
        ZeroTest::Auto { budget, seed, trials } => exact(budget).unwrap_or_else(|| sample(seed, trials)),
    }
}
