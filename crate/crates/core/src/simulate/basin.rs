use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{integrate_until_settled, IntegrateOptions, Status};
use crate::equilibria::Equilibrium;
use crate::error::{invalid, Result};
use crate::model::{Model, State2};
use crate::scalar::Scalar;

/// Steps between convergence checks (τ = 1 at the default step).
const CHECK_EVERY: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BasinCell<T> {
    pub i0: T,
    pub r0: T,
    /// Equilibrium id, or `None` when the run did not settle or failed.
    pub outcome: Option<usize>,
}

/// Limits of trajectories started on the lattice `I0 = a/(n-1)`,
/// `R0 = b/(n-1)` with `a + b ≤ n - 1`, row-major in `a`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasinMap<T> {
    pub n: usize,
    pub t_end: T,
    pub cells: Vec<BasinCell<T>>,
}

impl<T: Scalar> BasinMap<T> {
    pub fn unresolved(&self) -> usize {
        self.cells.iter().filter(|c| c.outcome.is_none()).count()
    }

    pub fn resolved_fraction(&self) -> f64 {
        if self.cells.is_empty() {
            return 0.0;
        }
        1.0 - self.unresolved() as f64 / self.cells.len() as f64
    }

    /// Number of cells per outcome id.
    pub fn counts(&self) -> std::collections::BTreeMap<usize, usize> {
        let mut out = std::collections::BTreeMap::new();
        for c in &self.cells {
            if let Some(id) = c.outcome {
                *out.entry(id).or_insert(0) += 1;
            }
        }
        out
    }
}

/// Integrates from every lattice node of `Ω` in parallel and records where
/// each run settles. Integration errors leave the cell unresolved.
pub fn basin_map<T: Scalar>(
    m: &Model<T>,
    equilibria: &[Equilibrium<T>],
    n: usize,
    t_end: T,
    opts: &IntegrateOptions<T>,
) -> Result<BasinMap<T>> {
    if n < 2 {
        return Err(invalid("grid", "need at least 2 nodes per side"));
    }
    if !(t_end > T::zero() && t_end.is_finite()) {
        return Err(invalid("t_end", "must be a finite number > 0"));
    }
    let last = T::from_count(n - 1);
    let nodes: Vec<(T, T)> = (0..n)
        .flat_map(|a| (0..n - a).map(move |b| (a, b)))
        .map(|(a, b)| (T::from_count(a) / last, T::from_count(b) / last))
        .collect();
    let cells = nodes
        .par_iter()
        .map(|&(i0, r0)| {
            let outcome = integrate_until_settled(m, State2::new(i0, r0), t_end, opts, equilibria, CHECK_EVERY)
                .ok()
                .and_then(|tr| match tr.status {
                    Status::Converged { id } => Some(id),
                    Status::ReachedEnd => super::detect_limit(m, &tr, equilibria),
                });
            BasinCell { i0, r0, outcome }
        })
        .collect();
    Ok(BasinMap { n, t_end, cells })
}
