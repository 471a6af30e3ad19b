//! Fixed-step RK4 and adaptive Runge-Kutta-Fehlberg 4(5) over `[T; D]` states.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::scalar::Scalar;

/// Autonomous ODE `y' = F(y)` on a closed region.
pub trait System<T: Scalar, const D: usize>: Sync {
    fn rhs(&self, y: &[T; D]) -> Result<[T; D]>;
    /// Whether `y` lies in the invariant region, up to `tol`.
    fn in_region(&self, y: &[T; D], tol: T) -> bool;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Rk4,
    Rkf45,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Rk4 => "rk4",
            Method::Rkf45 => "rkf45",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegrateOptions<T> {
    pub method: Method,
    /// Fixed step for RK4, initial step for RKF45.
    pub step: T,
    pub abs_tol: T,
    pub rel_tol: T,
    /// Keep every `stride`-th step (the final state is always kept).
    pub stride: usize,
    /// Smallest step RKF45 may take before giving up.
    pub min_step: T,
    pub max_step: T,
    /// Allowed excursion outside the region before the run fails.
    pub region_tol: T,
}

impl<T: Scalar> Default for IntegrateOptions<T> {
    fn default() -> Self {
        let eps = T::epsilon();
        Self {
            method: Method::Rk4,
            step: T::lit(1e-3),
            abs_tol: T::lit(1e-9).max(eps * T::lit(16.0)),
            rel_tol: T::lit(1e-9).max(eps * T::lit(16.0)),
            stride: 1,
            min_step: T::lit(1e-12),
            max_step: T::lit(1.0),
            region_tol: T::lit(1e-9).max(eps * T::lit(64.0)),
        }
    }
}

impl<T: Scalar> IntegrateOptions<T> {
    pub fn rk4(step: T) -> Self {
        Self {
            step,
            ..Self::default()
        }
    }

    pub fn rkf45(abs_tol: T, rel_tol: T) -> Self {
        Self {
            method: Method::Rkf45,
            abs_tol,
            rel_tol,
            ..Self::default()
        }
    }

    pub fn with_stride(mut self, stride: usize) -> Self {
        self.stride = stride;
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.step > T::zero() && self.step.is_finite()) {
            return Err(invalid("step", "must be a finite number > 0"));
        }
        if self.stride == 0 {
            return Err(invalid("stride", "must be at least 1"));
        }
        if self.method == Method::Rkf45 {
            if !(self.abs_tol > T::zero() && self.rel_tol >= T::zero()) {
                return Err(invalid("tolerance", "need abs_tol > 0 and rel_tol >= 0"));
            }
            if !(self.min_step > T::zero() && self.max_step >= self.min_step) {
                return Err(invalid("min_step", "need 0 < min_step <= max_step"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Status {
    ReachedEnd,
    /// Stopped early once the trajectory settled on this equilibrium id.
    Converged {
        id: usize,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<T, const D: usize> {
    pub times: Vec<T>,
    pub states: Vec<[T; D]>,
    pub method: Method,
    pub step: T,
    /// `(abs, rel)` for RKF45.
    pub tolerance: Option<(T, T)>,
    pub status: Status,
}

impl<T: Scalar, const D: usize> Trajectory<T, D> {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last(&self) -> Option<(T, [T; D])> {
        Some((*self.times.last()?, *self.states.last()?))
    }
}

fn axpy<T: Scalar, const D: usize>(y: &[T; D], a: T, x: &[T; D]) -> [T; D] {
    std::array::from_fn(|i| y[i] + a * x[i])
}

fn rk4_step<T: Scalar, const D: usize, S: System<T, D> + ?Sized>(sys: &S, y: &[T; D], h: T) -> Result<[T; D]> {
    let two = T::lit(2.0);
    let half = h / two;
    let k1 = sys.rhs(y)?;
    let k2 = sys.rhs(&axpy(y, half, &k1))?;
    let k3 = sys.rhs(&axpy(y, half, &k2))?;
    let k4 = sys.rhs(&axpy(y, h, &k3))?;
    let six = T::lit(6.0);
    Ok(std::array::from_fn(|i| {
        y[i] + h / six * (k1[i] + two * k2[i] + two * k3[i] + k4[i])
    }))
}

// Fehlberg coefficients
const A: [[f64; 5]; 5] = [
    [1.0 / 4.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 32.0, 9.0 / 32.0, 0.0, 0.0, 0.0],
    [1932.0 / 2197.0, -7200.0 / 2197.0, 7296.0 / 2197.0, 0.0, 0.0],
    [439.0 / 216.0, -8.0, 3680.0 / 513.0, -845.0 / 4104.0, 0.0],
    [-8.0 / 27.0, 2.0, -3544.0 / 2565.0, 1859.0 / 4104.0, -11.0 / 40.0],
];
const B4: [f64; 6] = [25.0 / 216.0, 0.0, 1408.0 / 2565.0, 2197.0 / 4104.0, -1.0 / 5.0, 0.0];
const B5: [f64; 6] = [
    16.0 / 135.0,
    0.0,
    6656.0 / 12825.0,
    28561.0 / 56430.0,
    -9.0 / 50.0,
    2.0 / 55.0,
];

/// One Fehlberg step: the fifth-order solution and the error estimate.
fn rkf45_step<T: Scalar, const D: usize, S: System<T, D> + ?Sized>(
    sys: &S,
    y: &[T; D],
    h: T,
) -> Result<([T; D], [T; D])> {
    let mut k = [[T::zero(); D]; 6];
    k[0] = sys.rhs(y)?;
    for s in 1..6 {
        let stage: [T; D] = std::array::from_fn(|i| {
            let mut acc = T::zero();
            for (j, kj) in k.iter().enumerate().take(s) {
                acc = acc + T::lit(A[s - 1][j]) * kj[i];
            }
            y[i] + h * acc
        });
        k[s] = sys.rhs(&stage)?;
    }
    let combine = |b: &[f64; 6]| -> [T; D] {
        std::array::from_fn(|i| {
            let mut acc = T::zero();
            for (bj, kj) in b.iter().zip(k.iter()) {
                acc = acc + T::lit(*bj) * kj[i];
            }
            y[i] + h * acc
        })
    };
    let y5 = combine(&B5);
    let y4 = combine(&B4);
    Ok((y5, std::array::from_fn(|i| y5[i] - y4[i])))
}

fn region_check<T: Scalar, const D: usize, S: System<T, D> + ?Sized>(sys: &S, t: T, y: &[T; D], tol: T) -> Result<()> {
    if y.iter().all(|v| v.is_finite()) && sys.in_region(y, tol) {
        Ok(())
    } else {
        Err(Error::LeftDomain {
            t: t.to_f64_lossy(),
            state: y.iter().map(|v| v.to_f64_lossy()).collect(),
        })
    }
}

/// Early-stop hook: called with the current time and state every
/// `every` steps; returning `Some(id)` ends the run as converged.
pub struct StopCheck<'a, T, const D: usize> {
    pub every: usize,
    pub check: &'a (dyn Fn(T, &[T; D]) -> Option<usize> + Sync),
}

/// Integrates from `y0` at `τ = 0` to `t_end`.
pub fn integrate_system<T, const D: usize, S>(
    sys: &S,
    y0: [T; D],
    t_end: T,
    opts: &IntegrateOptions<T>,
    stop: Option<StopCheck<'_, T, D>>,
) -> Result<Trajectory<T, D>>
where
    T: Scalar,
    S: System<T, D> + ?Sized,
{
    opts.validate()?;
    if !(t_end > T::zero() && t_end.is_finite()) {
        return Err(invalid("t_end", "must be a finite number > 0"));
    }
    region_check(sys, T::zero(), &y0, opts.region_tol)?;
    match opts.method {
        Method::Rk4 => run_rk4(sys, y0, t_end, opts, stop),
        Method::Rkf45 => run_rkf45(sys, y0, t_end, opts, stop),
    }
}

fn run_rk4<T, const D: usize, S>(
    sys: &S,
    y0: [T; D],
    t_end: T,
    opts: &IntegrateOptions<T>,
    stop: Option<StopCheck<'_, T, D>>,
) -> Result<Trajectory<T, D>>
where
    T: Scalar,
    S: System<T, D> + ?Sized,
{
    let h = opts.step;
    // snap to a whole number of steps when t_end is a multiple of h up to rounding
    let ratio = t_end / h;
    let rounded = ratio.round();
    let steps = if (ratio - rounded).abs() <= T::lit(1e-9) * rounded.max(T::one()) {
        rounded
    } else {
        ratio.ceil()
    };
    let steps = steps.to_usize().unwrap_or(usize::MAX).max(1);

    let mut times = vec![T::zero()];
    let mut states = vec![y0];
    let mut y = y0;
    let mut status = Status::ReachedEnd;
    for n in 1..=steps {
        let t_prev = T::from_count(n - 1) * h;
        let t = if n == steps { t_end } else { T::from_count(n) * h };
        y = rk4_step(sys, &y, t - t_prev)?;
        region_check(sys, t, &y, opts.region_tol)?;
        let converged = match &stop {
            Some(s) if n.is_multiple_of(s.every) => (s.check)(t, &y),
            _ => None,
        };
        if n.is_multiple_of(opts.stride) || n == steps || converged.is_some() {
            times.push(t);
            states.push(y);
        }
        if let Some(id) = converged {
            status = Status::Converged { id };
            break;
        }
    }
    Ok(Trajectory {
        times,
        states,
        method: Method::Rk4,
        step: h,
        tolerance: None,
        status,
    })
}

fn run_rkf45<T, const D: usize, S>(
    sys: &S,
    y0: [T; D],
    t_end: T,
    opts: &IntegrateOptions<T>,
    stop: Option<StopCheck<'_, T, D>>,
) -> Result<Trajectory<T, D>>
where
    T: Scalar,
    S: System<T, D> + ?Sized,
{
    let mut times = vec![T::zero()];
    let mut states = vec![y0];
    let mut y = y0;
    let mut t = T::zero();
    let mut h = opts.step.min(opts.max_step);
    let mut accepted = 0usize;
    let mut status = Status::ReachedEnd;
    let fifth = T::lit(0.2);

    while t < t_end {
        let last = t + h >= t_end;
        let h_try = if last { t_end - t } else { h };
        let (y_new, err) = rkf45_step(sys, &y, h_try)?;
        let mut ratio = T::zero();
        for i in 0..D {
            let scale = opts.abs_tol + opts.rel_tol * y[i].abs().max(y_new[i].abs());
            ratio = ratio.max(err[i].abs() / scale);
        }
        if !ratio.is_finite() {
            ratio = T::infinity();
        }
        if ratio <= T::one() {
            t = if last { t_end } else { t + h_try };
            y = y_new;
            accepted += 1;
            region_check(sys, t, &y, opts.region_tol)?;
            let converged = match &stop {
                Some(s) if accepted.is_multiple_of(s.every) => (s.check)(t, &y),
                _ => None,
            };
            if accepted.is_multiple_of(opts.stride) || t >= t_end || converged.is_some() {
                times.push(t);
                states.push(y);
            }
            if let Some(id) = converged {
                status = Status::Converged { id };
                break;
            }
        }
        let factor = if ratio == T::zero() {
            T::lit(5.0)
        } else {
            (T::lit(0.9) * ratio.powf(-fifth)).max(T::lit(0.2)).min(T::lit(5.0))
        };
        // a truncated final step says nothing about the natural step size
        if !(last && ratio <= T::one()) {
            h = (h_try * factor).min(opts.max_step);
        }
        if h < opts.min_step && t < t_end {
            return Err(Error::StepUnderflow {
                t: t.to_f64_lossy(),
                h: h.to_f64_lossy(),
            });
        }
    }
    Ok(Trajectory {
        times,
        states,
        method: Method::Rkf45,
        step: opts.step,
        tolerance: Some((opts.abs_tol, opts.rel_tol)),
        status,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// y' = -y on the half line.
    struct Decay;

    impl System<f64, 1> for Decay {
        fn rhs(&self, y: &[f64; 1]) -> Result<[f64; 1]> {
            Ok([-y[0]])
        }
        fn in_region(&self, y: &[f64; 1], tol: f64) -> bool {
            y[0] >= -tol
        }
    }

    /// Harmonic oscillator, unrestricted.
    struct Spring;

    impl System<f64, 2> for Spring {
        fn rhs(&self, y: &[f64; 2]) -> Result<[f64; 2]> {
            Ok([y[1], -y[0]])
        }
        fn in_region(&self, _: &[f64; 2], _: f64) -> bool {
            true
        }
    }

    /// Leaves the region at τ = 1.
    struct Drift;

    impl System<f64, 1> for Drift {
        fn rhs(&self, _: &[f64; 1]) -> Result<[f64; 1]> {
            Ok([-1.0])
        }
        fn in_region(&self, y: &[f64; 1], tol: f64) -> bool {
            y[0] >= -tol
        }
    }

    /// Blows up at τ = 1 (y' = y², y(0) = 1).
    struct Blowup;

    impl System<f64, 1> for Blowup {
        fn rhs(&self, y: &[f64; 1]) -> Result<[f64; 1]> {
            Ok([y[0] * y[0]])
        }
        fn in_region(&self, _: &[f64; 1], _: f64) -> bool {
            true
        }
    }

    #[test]
    fn rk4_decay() {
        let tr = integrate_system(&Decay, [1.0], 2.0, &IntegrateOptions::rk4(1e-2), None).unwrap();
        assert_eq!(tr.len(), 201);
        assert_eq!(*tr.times.last().unwrap(), 2.0);
        assert!((tr.states.last().unwrap()[0] - (-2.0f64).exp()).abs() < 1e-10);
        assert!(tr.times.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn rk4_truncates_final_step() {
        let tr = integrate_system(&Decay, [1.0], 0.25, &IntegrateOptions::rk4(0.1), None).unwrap();
        assert_eq!(tr.times, vec![0.0, 0.1, 0.2, 0.25]);
        assert!((tr.states[3][0] - (-0.25f64).exp()).abs() < 1e-6);
    }

    #[test]
    fn stride_keeps_final_state() {
        let opts = IntegrateOptions::rk4(0.1).with_stride(3);
        let tr = integrate_system(&Decay, [1.0], 1.0, &opts, None).unwrap();
        assert_eq!(tr.len(), 5);
        assert_eq!(*tr.times.last().unwrap(), 1.0);
    }

    #[test]
    fn rkf45_matches_exact_solution() {
        let tr = integrate_system(&Spring, [1.0, 0.0], 10.0, &IntegrateOptions::rkf45(1e-10, 1e-10), None).unwrap();
        let (t, y) = tr.last().unwrap();
        assert_eq!(t, 10.0);
        assert!((y[0] - 10f64.cos()).abs() < 1e-8);
        assert!((y[1] + 10f64.sin()).abs() < 1e-8);
        assert!(tr.times.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(tr.tolerance, Some((1e-10, 1e-10)));
    }

    #[test]
    fn leaving_the_region_fails_loudly() {
        let err = integrate_system(&Drift, [0.5], 2.0, &IntegrateOptions::rk4(1e-2), None).unwrap_err();
        match err {
            Error::LeftDomain { t, .. } => assert!((t - 0.51).abs() < 1e-9),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn step_underflow_is_reported() {
        let err = integrate_system(&Blowup, [1.0], 2.0, &IntegrateOptions::rkf45(1e-9, 1e-9), None).unwrap_err();
        match err {
            Error::StepUnderflow { t, .. } => assert!(t < 1.0 && t > 0.9),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn early_stop() {
        let check = |_t: f64, y: &[f64; 1]| if y[0] < 0.5 { Some(7) } else { None };
        let stop = StopCheck {
            every: 10,
            check: &check,
        };
        let tr = integrate_system(&Decay, [1.0], 5.0, &IntegrateOptions::rk4(1e-2), Some(stop)).unwrap();
        assert_eq!(tr.status, Status::Converged { id: 7 });
        let (t, _) = tr.last().unwrap();
        assert!((t - 0.7).abs() < 1e-9, "{t}");
    }

    #[test]
    fn bad_options() {
        assert!(integrate_system(&Decay, [1.0], 0.0, &IntegrateOptions::default(), None).is_err());
        assert!(integrate_system(&Decay, [1.0], 1.0, &IntegrateOptions::rk4(0.0), None).is_err());
        assert!(integrate_system(&Decay, [1.0], 1.0, &IntegrateOptions::rk4(0.1).with_stride(0), None).is_err());
        assert!(integrate_system(&Decay, [-1.0], 1.0, &IntegrateOptions::default(), None).is_err());
    }
}
