//! Trajectories of the reduced `(I, R)` and full `(S, I, R)` systems,
//! convergence detection, basin maps and a periodic-orbit probe.

mod basin;
mod integrator;
mod probe;

pub use basin::{basin_map, BasinCell, BasinMap};
pub use integrator::{integrate_system, IntegrateOptions, Method, Status, StopCheck, System, Trajectory};
pub use probe::{periodicity_probe, PeriodicFinding, EXCURSION_MIN, RETURN_RADIUS};

use crate::equilibria::Equilibrium;
use crate::error::Result;
use crate::model::{Model, State2, State3};
use crate::scalar::Scalar;

/// Distance to an equilibrium below which a trajectory counts as arrived.
pub const CONVERGENCE_RADIUS: f64 = 1e-6;
/// Vector-field norm below which a trajectory counts as at rest.
pub const FIELD_TOL: f64 = 1e-8;

/// The `(I, R)` system.
pub struct Reduced<'a, T>(pub &'a Model<T>);

/// The `(S, I, R)` system.
pub struct Full<'a, T>(pub &'a Model<T>);

impl<T: Scalar> System<T, 2> for Reduced<'_, T> {
    fn rhs(&self, y: &[T; 2]) -> Result<[T; 2]> {
        self.0.vector_field_2d(&State2::from_array(*y))
    }

    fn in_region(&self, y: &[T; 2], tol: T) -> bool {
        State2::from_array(*y).in_region(tol)
    }
}

impl<T: Scalar> System<T, 3> for Full<'_, T> {
    fn rhs(&self, y: &[T; 3]) -> Result<[T; 3]> {
        self.0.vector_field_3d(&State3::from_array(*y))
    }

    fn in_region(&self, y: &[T; 3], tol: T) -> bool {
        State3::from_array(*y).in_region(tol)
    }
}

pub fn integrate_2d<T: Scalar>(
    m: &Model<T>,
    init: State2<T>,
    t_end: T,
    opts: &IntegrateOptions<T>,
) -> Result<Trajectory<T, 2>> {
    integrate_system(&Reduced(m), init.to_array(), t_end, opts, None)
}

pub fn integrate_3d<T: Scalar>(
    m: &Model<T>,
    init: State3<T>,
    t_end: T,
    opts: &IntegrateOptions<T>,
) -> Result<Trajectory<T, 3>> {
    integrate_system(&Full(m), init.to_array(), t_end, opts, None)
}

/// Like [`integrate_2d`], but stops as soon as the state settles on one of
/// `equilibria` (checked every `check_every` steps).
pub fn integrate_until_settled<T: Scalar>(
    m: &Model<T>,
    init: State2<T>,
    t_end: T,
    opts: &IntegrateOptions<T>,
    equilibria: &[Equilibrium<T>],
    check_every: usize,
) -> Result<Trajectory<T, 2>> {
    let check = |_t: T, y: &[T; 2]| settled_on(m, &State2::from_array(*y), equilibria);
    let stop = StopCheck {
        every: check_every.max(1),
        check: &check,
    };
    integrate_system(&Reduced(m), init.to_array(), t_end, opts, Some(stop))
}

/// `(I, R)` projection of a full trajectory.
pub fn project<T: Scalar>(traj: &Trajectory<T, 3>) -> Trajectory<T, 2> {
    Trajectory {
        times: traj.times.clone(),
        states: traj.states.iter().map(|y| [y[1], y[2]]).collect(),
        method: traj.method,
        step: traj.step,
        tolerance: traj.tolerance,
        status: traj.status,
    }
}

/// Id of the equilibrium the trajectory ends on, if any.
pub fn detect_limit<T: Scalar>(m: &Model<T>, traj: &Trajectory<T, 2>, equilibria: &[Equilibrium<T>]) -> Option<usize> {
    let (_, y) = traj.last()?;
    settled_on(m, &State2::from_array(y), equilibria)
}

/// Nearest equilibrium within [`CONVERGENCE_RADIUS`], provided the field
/// at `s` is below [`FIELD_TOL`].
pub fn settled_on<T: Scalar>(m: &Model<T>, s: &State2<T>, equilibria: &[Equilibrium<T>]) -> Option<usize> {
    let field = m.vector_field_2d(s).ok()?;
    if field[0].hypot(field[1]) >= T::lit(FIELD_TOL) {
        return None;
    }
    let radius = T::lit(CONVERGENCE_RADIUS);
    equilibria
        .iter()
        .map(|e| (e.id, (s.i - e.i).hypot(s.r - e.r)))
        .filter(|&(_, d)| d < radius)
        .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
        .map(|(id, _)| id)
}
