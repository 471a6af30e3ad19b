//! Built-in models: the multistable sinusoidal construction, the increasing
//! quadratic rate with a unique endemic state, and the classical constant rate.
//!
//! The multistable rate is defined piecewise on `[0, 1]`:
//!
//! * `[0, R₁)`: cubic Hermite from `f(0) = f0`, `f'(0) = 0` to the value and
//!   slope of the sinusoidal piece at `R₁`;
//! * `[R₁, R₂ₙ₋₁]`: `g(R) - sin(ω R)` with `ω = 2nπ k/(k-1)`;
//! * `(R₂ₙ₋₁, 1]`: the tangent line of the sinusoidal piece at `R₂ₙ₋₁`.
//!
//! where `Rᵢ = i (k-1)/(2nk)`. The line is finite at the pole of `g`, so it
//! adds exactly one more crossing in `(R₂ₙ₋₁, (k-1)/k)`.

use crate::error::{invalid, Error, Result};
use crate::exprfn::{check_positive, parse_expr, Dual, EvalError, Expr, POSITIVITY_GRID};
use crate::model::{g_threshold_dual, InfectionRate, Model};
use crate::scalar::Scalar;

/// Samples used to confirm the cubic stays below `g` on `(0, R₁)`.
const BELOW_G_GRID: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Example1Spec<T> {
    pub n: u32,
    pub k: T,
    /// `f(0)`; defaults to `k/2`.
    pub f0: Option<T>,
}

impl<T: Scalar> Example1Spec<T> {
    pub fn new(n: u32, k: T) -> Self {
        Self { n, k, f0: None }
    }

    pub fn with_f0(mut self, f0: T) -> Self {
        self.f0 = Some(f0);
        self
    }

    pub fn f0_or_default(&self) -> T {
        self.f0.unwrap_or(self.k / T::lit(2.0))
    }

    /// `Rᵢ = i (k-1)/(2nk)` for `i = 1 ..= 2n-1`.
    pub fn knots(&self) -> Vec<T> {
        let spacing = self.spacing();
        (1..2 * self.n).map(|i| T::from_count(i as usize) * spacing).collect()
    }

    fn spacing(&self) -> T {
        (self.k - T::one()) / self.k / T::from_count(2 * self.n as usize)
    }
}

/// Evaluator for the multistable piecewise rate.
#[derive(Debug, Clone, PartialEq)]
pub struct Example1Rate<T> {
    n: u32,
    k: T,
    f0: T,
    omega: T,
    r_first: T,
    r_last: T,
    /// Cubic on `[0, R₁)` in powers of R.
    cubic: [T; 4],
    line_value: T,
    line_slope: T,
}

impl<T: Scalar> Example1Rate<T> {
    fn new(spec: &Example1Spec<T>) -> Result<Self> {
        let k = spec.k;
        let f0 = spec.f0_or_default();
        let knots = spec.knots();
        let r_first = knots[0];
        let r_last = knots[knots.len() - 1];
        let omega = T::lit(2.0) * T::from_count(spec.n as usize) * T::PI() * k / (k - T::one());

        let g1 = g_threshold_dual(Dual::variable(r_first), k)?;
        let gl = g_threshold_dual(Dual::variable(r_last), k)?;
        // at odd knots cos(iπ) = -1, so f' = g' + ω
        let (p1, m1) = (g1.value, g1.deriv + omega);
        let h = r_first;
        let secant = (p1 - f0) / h;
        let three = T::lit(3.0);
        let two = T::lit(2.0);
        let cubic = [f0, T::zero(), (three * secant - m1) / h, (m1 - two * secant) / (h * h)];

        Ok(Self {
            n: spec.n,
            k,
            f0,
            omega,
            r_first,
            r_last,
            cubic,
            line_value: gl.value,
            line_slope: gl.deriv + omega,
        })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn k(&self) -> T {
        self.k
    }

    pub fn f0(&self) -> T {
        self.f0
    }

    pub fn omega(&self) -> T {
        self.omega
    }

    /// Junctions between the pieces: `R₁` and `R₂ₙ₋₁`.
    pub fn junctions(&self) -> (T, T) {
        (self.r_first, self.r_last)
    }

    pub fn eval_dual(&self, r: T) -> Result<Dual<T>, EvalError> {
        if !r.is_finite() {
            return Err(EvalError::NonFiniteInput(r.to_f64_lossy()));
        }
        let x = Dual::variable(r);
        Ok(if r < self.r_first {
            self.cubic_piece(x)
        } else if r <= self.r_last {
            self.sine_piece(x)
        } else {
            self.line_piece(x)
        })
    }

    fn cubic_piece(&self, x: Dual<T>) -> Dual<T> {
        let [c0, c1, c2, c3] = self.cubic;
        ((x * c3 + c2) * x + c1) * x + c0
    }

    fn sine_piece(&self, x: Dual<T>) -> Dual<T> {
        let km1 = self.k - T::one();
        // r <= r_last keeps this away from the pole of g
        let g = Dual::constant(km1) / (Dual::constant(km1 / self.k) - x);
        g - (x * self.omega).sin()
    }

    fn line_piece(&self, x: Dual<T>) -> Dual<T> {
        (x - self.r_last) * self.line_slope + self.line_value
    }

    /// One-sided evaluations `(left, right)` at a junction, for C¹ checks.
    pub fn one_sided(&self, at: T) -> (Dual<T>, Dual<T>) {
        let x = Dual::variable(at);
        if at == self.r_first && at == self.r_last {
            (self.cubic_piece(x), self.line_piece(x))
        } else if at == self.r_first {
            (self.cubic_piece(x), self.sine_piece(x))
        } else {
            (self.sine_piece(x), self.line_piece(x))
        }
    }
}

/// Multistable model with `n` saddles and `n - 1` stable states on the
/// sinusoidal piece plus one stable state from the linear extension.
pub fn build_example1<T: Scalar>(spec: Example1Spec<T>) -> Result<Model<T>> {
    if spec.n == 0 {
        return Err(invalid("n", "must be a positive integer"));
    }
    if !(spec.k > T::one() && spec.k.is_finite()) {
        return Err(invalid("k", "must be a finite number > 1"));
    }
    let f0 = spec.f0_or_default();
    if !(f0 > T::zero() && f0 < spec.k) {
        return Err(invalid("f0", format!("must lie in (0, k), got {f0}")));
    }
    let rate = Example1Rate::new(&spec)?;
    validate_example1(&rate)?;
    Model::new(spec.k, InfectionRate::Example1(rate))
}

fn validate_example1<T: Scalar>(rate: &Example1Rate<T>) -> Result<()> {
    let k = rate.k;
    let positivity = check_positive(&InfectionRate::Example1(rate.clone()), k, POSITIVITY_GRID)?;
    if !positivity.positive {
        return Err(Error::Construction(format!(
            "f is not positive on [0,1] (f({}) = {}); adjust f0",
            positivity.argmin, positivity.min_value
        )));
    }
    let (r1, _) = rate.junctions();
    for j in 1..BELOW_G_GRID {
        let r = r1 * T::from_count(j) / T::from_count(BELOW_G_GRID);
        let f = rate.cubic_piece(Dual::constant(r)).value;
        let g = g_threshold_dual(Dual::constant(r), k)?.value;
        if !(f < g) {
            return Err(Error::Construction(format!(
                "the cubic on [0, {r1}) reaches g at R = {r}, which would add equilibria; adjust f0"
            )));
        }
    }
    Ok(())
}

/// `f(R) = kR² + 2k`.
pub fn build_example2<T: Scalar>(k: T) -> Result<Model<T>> {
    let expr = parse_expr("k*R^2 + 2*k")?;
    Model::from_expr(k, expr)
}

/// Classical SIR: `f ≡ β̃`, so `R₀ = β̃/k`.
pub fn build_constant<T: Scalar>(beta_tilde: T, k: T) -> Result<Model<T>> {
    if !(beta_tilde > T::zero() && beta_tilde.is_finite()) {
        return Err(invalid("beta_tilde", "must be a finite number > 0"));
    }
    Model::from_expr(k, Expr::num(beta_tilde.to_f64_lossy()))
}
