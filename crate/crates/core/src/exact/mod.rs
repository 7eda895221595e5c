//! Exact arithmetic: rationals, sparse polynomials, rational expressions,
//! truncated ℏ-series and zero testing.

mod expr;
pub mod linalg;
mod poly;
mod ratfn;
mod rational;
mod series;
mod zero;

pub use expr::Expr;
pub use poly::{default_var_name, Monomial, Poly};
pub use ratfn::RatFn;
pub use rational::{factorial, format_rational, height, int, one, parse_rational, rat, zero, Rational};
pub use series::{HSeries, Ring};
pub use zero::{find_witness, is_zero, ratfn_is_zero, Method, SamplePoints, Verdict, ZeroTest, DEFAULT_SEED, DEFAULT_TERM_BUDGET, DEFAULT_TRIALS};

/// Evaluates an expression at a point (`eval` in the operation list).
pub fn eval(expr: &Expr, point: &[Rational]) -> crate::Result<Rational> {
    expr.eval(point)
}

/// Exact partial derivative with respect to the 1-based coordinate `var_index`.
pub fn diff(expr: &Expr, var_index: usize) -> crate::Result<Expr> {
    if var_index == 0 {
        return Err(crate::Error::InvalidArgument("coordinate indices start at 1".into()));
    }
    Ok(expr.diff(var_index - 1))
}
