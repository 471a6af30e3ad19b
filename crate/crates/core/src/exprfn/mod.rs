//! Infection-rate expressions: parsing, dual-number evaluation and the
//! sampled positivity check.

mod ast;
mod dual;
mod eval;
mod parser;

pub use ast::{BinOp, Expr, Func};
pub use dual::Dual;
pub use eval::EvalError;
pub use parser::{parse_expr, ParseError};

use crate::error::{invalid, Result};
use crate::scalar::Scalar;

/// Default number of samples used by [`check_positive`].
pub const POSITIVITY_GRID: usize = 10_001;

/// Anything that can produce `f(R)` and `df/dR` at a point.
pub trait RateFunction<T: Scalar>: Send + Sync {
    fn eval_dual(&self, r: T, k: T) -> Result<Dual<T>, EvalError>;
}

impl<T: Scalar> RateFunction<T> for Expr {
    fn eval_dual(&self, r: T, k: T) -> Result<Dual<T>, EvalError> {
        Expr::eval_dual(self, r, k)
    }
}

/// Free-function form of [`Expr::eval_dual`].
pub fn eval_dual<T: Scalar>(ast: &Expr, r: T, k: T) -> Result<Dual<T>, EvalError> {
    ast.eval_dual(r, k)
}

/// Outcome of the sampled positivity check on `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Positivity<T> {
    pub positive: bool,
    /// Grid point with the smallest value (first one on ties).
    pub argmin: T,
    pub min_value: T,
    pub grid_points: usize,
}

/// Samples `f` on a uniform grid over `[0, 1]`. Sound only up to sampling.
pub fn check_positive<T, F>(f: &F, k: T, grid_points: usize) -> Result<Positivity<T>>
where
    T: Scalar,
    F: RateFunction<T> + ?Sized,
{
    if grid_points < 2 {
        return Err(invalid("grid_points", "need at least 2 samples"));
    }
    let last = T::from_count(grid_points - 1);
    let mut argmin = T::zero();
    let mut min_value = T::infinity();
    for j in 0..grid_points {
        let r = T::from_count(j) / last;
        let v = f.eval_dual(r, k)?.value;
        if v < min_value {
            min_value = v;
            argmin = r;
        }
    }
    Ok(Positivity {
        positive: min_value > T::zero(),
        argmin,
        min_value,
        grid_points,
    })
}
