//! The dimensionless SIR model with infection rate `f(R)`.
//!
//! With `S = 1 - I - R` the dynamics reduce to
//!
//! ```text
//! dI/dτ = I (f(R)(1 - I - R) - k)
//! dR/dτ = (k - 1) I - R
//! ```
//!
//! and endemic equilibria are the crossings of `f` with the threshold
//! `g(R) = (k-1) / ((k-1)/k - R)` on `(0, (k-1)/k)`.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::exprfn::{Dual, EvalError, Expr, RateFunction};
use crate::scalar::Scalar;
use crate::scenarios::Example1Rate;

/// Values of R closer than this to the pole of `g` are rejected.
pub const POLE_GUARD: f64 = 1e-14;

/// Infection rate `f(R)` backing a [`Model`].
#[derive(Debug, Clone, PartialEq)]
pub enum InfectionRate<T> {
    Expr(Expr),
    /// Piecewise C¹ construction of the multistable example.
    Example1(Example1Rate<T>),
}

impl<T: Scalar> RateFunction<T> for InfectionRate<T> {
    fn eval_dual(&self, r: T, k: T) -> Result<Dual<T>, EvalError> {
        match self {
            InfectionRate::Expr(e) => e.eval_dual(r, k),
            InfectionRate::Example1(p) => p.eval_dual(r),
        }
    }
}

impl<T: Scalar> InfectionRate<T> {
    /// `Some(β̃)` when `f` does not depend on R.
    pub fn constant_value(&self, k: T) -> Option<T> {
        match self {
            InfectionRate::Expr(e) if !e.depends_on_r() => e.eval(T::zero(), k).ok(),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct State2<T> {
    pub i: T,
    pub r: T,
}

impl<T: Scalar> State2<T> {
    pub fn new(i: T, r: T) -> Self {
        Self { i, r }
    }

    pub fn susceptible(&self) -> T {
        T::one() - self.i - self.r
    }

    /// `I ≥ -tol`, `R ≥ -tol`, `I + R ≤ 1 + tol`.
    pub fn in_region(&self, tol: T) -> bool {
        self.i >= -tol && self.r >= -tol && self.i + self.r <= T::one() + tol
    }

    pub fn to_array(self) -> [T; 2] {
        [self.i, self.r]
    }

    pub fn from_array(a: [T; 2]) -> Self {
        Self { i: a[0], r: a[1] }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct State3<T> {
    pub s: T,
    pub i: T,
    pub r: T,
}

impl<T: Scalar> State3<T> {
    pub fn new(s: T, i: T, r: T) -> Self {
        Self { s, i, r }
    }

    /// Nonnegative compartments summing to one, both within `tol`.
    pub fn in_region(&self, tol: T) -> bool {
        self.s >= -tol && self.i >= -tol && self.r >= -tol && (self.s + self.i + self.r - T::one()).abs() <= tol
    }

    pub fn project(&self) -> State2<T> {
        State2::new(self.i, self.r)
    }

    pub fn to_array(self) -> [T; 3] {
        [self.s, self.i, self.r]
    }

    pub fn from_array(a: [T; 3]) -> Self {
        Self {
            s: a[0],
            i: a[1],
            r: a[2],
        }
    }
}

impl<T: Scalar> From<State2<T>> for State3<T> {
    fn from(s: State2<T>) -> Self {
        State3::new(s.susceptible(), s.i, s.r)
    }
}

/// Eigenvalues of a real 2×2 matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Eigenvalues<T> {
    /// `lo ≤ hi`.
    Real { lo: T, hi: T },
    /// The pair `re ± i·im`, `im > 0`.
    Complex { re: T, im: T },
}

impl<T: Scalar> Eigenvalues<T> {
    pub fn max_real_part(&self) -> T {
        match *self {
            Eigenvalues::Real { hi, .. } => hi,
            Eigenvalues::Complex { re, .. } => re,
        }
    }

    pub fn is_stable(&self) -> bool {
        self.max_real_part() < T::zero()
    }

    /// One strictly positive and one strictly negative real eigenvalue.
    pub fn is_saddle(&self) -> bool {
        matches!(*self, Eigenvalues::Real { lo, hi } if lo < T::zero() && hi > T::zero())
    }
}

/// Row-major 2×2 Jacobian of the reduced system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jacobian2<T>(pub [[T; 2]; 2]);

impl<T: Scalar> Jacobian2<T> {
    pub fn trace(&self) -> T {
        self.0[0][0] + self.0[1][1]
    }

    pub fn det(&self) -> T {
        self.0[0][0] * self.0[1][1] - self.0[0][1] * self.0[1][0]
    }

    /// Closed form from trace and determinant.
    pub fn eigenvalues(&self) -> Eigenvalues<T> {
        let half = self.trace() / T::lit(2.0);
        let det = self.det();
        let disc = half * half - det;
        if disc < T::zero() {
            return Eigenvalues::Complex {
                re: half,
                im: (-disc).sqrt(),
            };
        }
        let s = disc.sqrt();
        // larger-magnitude root first, the other from the product to avoid cancellation
        let big = if half >= T::zero() { half + s } else { half - s };
        let small = if big == T::zero() { T::zero() } else { det / big };
        Eigenvalues::Real {
            lo: big.min(small),
            hi: big.max(small),
        }
    }
}

/// `g(R) = (k-1) / ((k-1)/k - R)`.
pub fn g_threshold<T: Scalar>(r: T, k: T) -> Result<T> {
    g_threshold_dual(Dual::constant(r), k).map(|d| d.value)
}

/// `g` propagated through a dual number, so `deriv` carries `dg/dR · dr`.
pub fn g_threshold_dual<T: Scalar>(r: Dual<T>, k: T) -> Result<Dual<T>> {
    let km1 = k - T::one();
    let pole = km1 / k;
    if (r.value - pole).abs() < T::lit(POLE_GUARD) {
        return Err(Error::Pole {
            r: r.value.to_f64_lossy(),
            pole: pole.to_f64_lossy(),
        });
    }
    Ok(Dual::constant(km1) / (Dual::constant(pole) - r))
}

/// Per-unit-time rates of the original model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RawRates<T> {
    /// Birth/mortality rate.
    pub mu: T,
    /// Recovery rate.
    pub gamma: T,
}

impl<T: Scalar> RawRates<T> {
    pub fn new(mu: T, gamma: T) -> Result<Self> {
        if !(mu > T::zero() && mu.is_finite()) {
            return Err(invalid("mu", "must be > 0"));
        }
        if !(gamma > T::zero() && gamma.is_finite()) {
            return Err(invalid("gamma", "must be > 0"));
        }
        Ok(Self { mu, gamma })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Redimensionalized<T> {
    pub k: T,
    /// `β/μ`, only for a constant infection rate β.
    pub beta_tilde: Option<T>,
    /// Basic reproduction number `β̃/k`.
    pub r0: Option<T>,
}

/// `k = 1 + γ/μ`; with a constant β also `β̃ = β/μ` and `R₀ = β̃/k`.
pub fn redimensionalize<T: Scalar>(raw: RawRates<T>, beta: Option<T>) -> Result<Redimensionalized<T>> {
    let raw = RawRates::new(raw.mu, raw.gamma)?;
    let k = T::one() + raw.gamma / raw.mu;
    let beta_tilde = match beta {
        Some(b) if !(b > T::zero() && b.is_finite()) => return Err(invalid("beta", "must be > 0")),
        Some(b) => Some(b / raw.mu),
        None => None,
    };
    Ok(Redimensionalized {
        k,
        beta_tilde,
        r0: beta_tilde.map(|bt| bt / k),
    })
}

/// Dimensionless model: `k > 1` and an infection rate `f`.
#[derive(Debug, Clone, PartialEq)]
pub struct Model<T> {
    k: T,
    rate: InfectionRate<T>,
}

impl<T: Scalar> Model<T> {
    pub fn new(k: T, rate: InfectionRate<T>) -> Result<Self> {
        if !(k > T::one() && k.is_finite()) {
            return Err(invalid("k", format!("must be a finite number > 1, got {k}")));
        }
        Ok(Self { k, rate })
    }

    pub fn from_expr(k: T, expr: Expr) -> Result<Self> {
        Self::new(k, InfectionRate::Expr(expr))
    }

    pub fn k(&self) -> T {
        self.k
    }

    pub fn rate(&self) -> &InfectionRate<T> {
        &self.rate
    }

    /// Right end `(k-1)/k` of the interval holding endemic R*.
    pub fn pole(&self) -> T {
        (self.k - T::one()) / self.k
    }

    /// `f(R)` and `df/dR`.
    pub fn f(&self, r: T) -> Result<Dual<T>> {
        Ok(self.rate.eval_dual(r, self.k)?)
    }

    pub fn g(&self, r: T) -> Result<T> {
        g_threshold(r, self.k)
    }

    /// `g(R)` and `dg/dR`.
    pub fn g_dual(&self, r: T) -> Result<Dual<T>> {
        g_threshold_dual(Dual::variable(r), self.k)
    }

    /// `h = f - g`, whose zeros on `(0, (k-1)/k)` are the endemic R*.
    pub fn h(&self, r: T) -> Result<T> {
        Ok(self.f(r)?.value - self.g(r)?)
    }

    pub fn vector_field_2d(&self, s: &State2<T>) -> Result<[T; 2]> {
        let f = self.f(s.r)?.value;
        let di = s.i * (f * (T::one() - s.i - s.r) - self.k);
        let dr = (self.k - T::one()) * s.i - s.r;
        Ok([di, dr])
    }

    pub fn vector_field_3d(&self, s: &State3<T>) -> Result<[T; 3]> {
        let f = self.f(s.r)?.value;
        let infection = f * s.s * s.i;
        Ok([
            T::one() - infection - s.s,
            infection - self.k * s.i,
            (self.k - T::one()) * s.i - s.r,
        ])
    }

    pub fn jacobian_2d(&self, s: &State2<T>) -> Result<Jacobian2<T>> {
        let fd = self.f(s.r)?;
        let susceptible = T::one() - s.i - s.r;
        Ok(Jacobian2([
            [
                fd.value * susceptible - self.k - s.i * fd.value,
                s.i * (fd.deriv * susceptible - fd.value),
            ],
            [self.k - T::one(), -T::one()],
        ]))
    }

    /// Divergence of the field weighted by `1/I`: `-f(R) - 1/I`.
    pub fn dulac_divergence(&self, s: &State2<T>) -> Result<T> {
        if !(s.i > T::zero()) {
            return Err(Error::Precondition(format!(
                "Dulac divergence needs I > 0, got {}",
                s.i
            )));
        }
        Ok(-self.f(s.r)?.value - T::one() / s.i)
    }
}
