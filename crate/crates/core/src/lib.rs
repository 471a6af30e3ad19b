//! Recovery-dependent SIR models: rate expressions, equilibria, certificates
//! and trajectory simulation.
//!
//! Everything numeric is generic over [`Scalar`] (`f32` or `f64`); the `*64`
//! aliases below fix the scalar to `f64`, which is what the tolerances in the
//! analysis defaults are tuned for.

// `!(x > 0)` is used on purpose so NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod equilibria;
pub mod error;
pub mod exprfn;
pub mod model;
pub mod report;
pub mod scalar;
pub mod scenarios;
pub mod simulate;

pub use error::{Error, Result};
pub use exprfn::{check_positive, eval_dual, parse_expr, Dual, EvalError, Expr, ParseError, RateFunction};
pub use model::{InfectionRate, Model, State2, State3};
pub use report::{analyze, AnalysisReport, AnalysisSettings, ModelSpecFile};
pub use scalar::Scalar;

pub type Model64 = Model<f64>;
pub type State2_64 = State2<f64>;
pub type State3_64 = State3<f64>;
pub type Dual64 = Dual<f64>;
pub type Equilibrium64 = equilibria::Equilibrium<f64>;
pub type Certificates64 = equilibria::Certificates<f64>;
pub type Trajectory2_64 = simulate::Trajectory<f64, 2>;
pub type Trajectory3_64 = simulate::Trajectory<f64, 3>;
pub type BasinMap64 = simulate::BasinMap<f64>;
pub type IntegrateOptions64 = simulate::IntegrateOptions<f64>;
