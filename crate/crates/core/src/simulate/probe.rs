use serde::{Deserialize, Serialize};

use super::Trajectory;
use crate::scalar::Scalar;

/// A later state within this distance of an earlier one counts as a return.
pub const RETURN_RADIUS: f64 = 1e-6;
/// The trajectory must have moved at least this far away in between.
pub const EXCURSION_MIN: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PeriodicFinding<T> {
    pub first: usize,
    pub second: usize,
    /// Time between the two visits.
    pub period: T,
    pub distance: T,
    pub excursion: T,
}

fn dist<T: Scalar, const D: usize>(a: &[T; D], b: &[T; D]) -> T {
    a.iter()
        .zip(b)
        .fold(T::zero(), |acc, (x, y)| acc + (*x - *y) * (*x - *y))
        .sqrt()
}

/// First pair of output states that are within [`RETURN_RADIUS`] of each
/// other after an excursion of at least [`EXCURSION_MIN`] from the first.
/// Quadratic in the number of stored states; subsample long runs with a stride.
pub fn periodicity_probe<T: Scalar, const D: usize>(traj: &Trajectory<T, D>) -> Option<PeriodicFinding<T>> {
    let radius = T::lit(RETURN_RADIUS);
    let away = T::lit(EXCURSION_MIN);
    let states = &traj.states;
    for i in 0..states.len() {
        let mut excursion = T::zero();
        for j in i + 1..states.len() {
            let d = dist(&states[i], &states[j]);
            excursion = excursion.max(d);
            if d < radius && excursion >= away {
                return Some(PeriodicFinding {
                    first: i,
                    second: j,
                    period: traj.times[j] - traj.times[i],
                    distance: d,
                    excursion,
                });
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simulate::{Method, Status};

    fn fixture(states: Vec<[f64; 2]>, dt: f64) -> Trajectory<f64, 2> {
        Trajectory {
            times: (0..states.len()).map(|i| i as f64 * dt).collect(),
            states,
            method: Method::Rk4,
            step: dt,
            tolerance: None,
            status: Status::ReachedEnd,
        }
    }

    #[test]
    fn harmonic_oscillator_is_periodic() {
        // 100 samples per revolution, three revolutions
        let dt = std::f64::consts::TAU / 100.0;
        let states = (0..=300)
            .map(|i| [(i as f64 * dt).cos(), (i as f64 * dt).sin()])
            .collect();
        let found = periodicity_probe(&fixture(states, dt)).expect("periodic");
        assert_eq!((found.first, found.second), (0, 100));
        assert!((found.period - std::f64::consts::TAU).abs() < 1e-9);
        assert!(found.excursion > 1.9);
    }

    #[test]
    fn converging_spiral_is_not() {
        let dt = 0.05;
        let states = (0..2000)
            .map(|i| {
                let t = i as f64 * dt;
                let r = (-0.3 * t).exp();
                [r * (3.0 * t).cos(), r * (3.0 * t).sin()]
            })
            .collect();
        assert!(periodicity_probe(&fixture(states, dt)).is_none());
    }

    #[test]
    fn resting_state_is_not() {
        assert!(periodicity_probe(&fixture(vec![[0.2, 0.3]; 50], 1.0)).is_none());
    }
}
