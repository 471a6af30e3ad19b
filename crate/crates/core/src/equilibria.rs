//! Equilibria of the reduced model, their local classification and the
//! existence / uniqueness / global-stability certificates.
//!
//! Endemic equilibria are isolated by sampling `h = f - g` on a uniform grid
//! over `[0, (k-1)/k - ε]` and bisecting every sign change. Roots that share
//! a grid cell are missed; the grid density is recorded so callers can rerun
//! finer.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::exprfn::{check_positive, POSITIVITY_GRID};
use crate::model::{Eigenvalues, Model, State2};
use crate::scalar::Scalar;

pub const DEFAULT_GRID_INTERVALS: usize = 4096;
pub const DEFAULT_BISECTION_TOL: f64 = 1e-12;
pub const DEFAULT_TIE_TOL: f64 = 1e-8;
/// Relative distance kept from the pole of `g` at the right end of the scan
/// (widened to a few ulps for `f32`).
pub const POLE_MARGIN: f64 = 1e-9;
/// Grid values of `|h|` below this without a sign change are flagged as tangencies.
pub const TANGENCY_BAND: f64 = 1e-8;
/// Bisection keeps going past the width target until `|h|` is this small.
pub const RESIDUAL_TARGET: f64 = 1e-10;
/// Samples used for the sampled monotonicity check on `[0, 1]`.
pub const MONOTONE_GRID: usize = 10_001;

/// Local stability as decided by the derivative test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stability {
    Stable,
    Saddle,
    /// Endemic equilibrium with `f'(R*) = g'(R*)` within tolerance.
    Degenerate,
    /// Disease-free equilibrium with `f(0) = k` within tolerance.
    Marginal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EquilibriumKind {
    DiseaseFree,
    Endemic,
}

/// Results a verdict can rest on, with the hypotheses they need.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Criterion {
    /// `(I*, R*)` is endemic iff `f(R*) = g(R*)`, `I* = R*/(k-1)`, `R* ∈ (0, (k-1)/k)`.
    EndemicCharacterization,
    /// `f(R) > g(R)` somewhere in `[0, (k-1)/k)` forces a crossing to its right.
    EndemicExistence,
    /// `f'(R*) < g'(R*)` gives a stable node/focus, `>` a saddle.
    EndemicLocalStability,
    /// `(0,0)` is stable when `f(0) < k` and a saddle when `f(0) > k`.
    DiseaseFreeLocalStability,
    /// `f(0) < k` with no endemic equilibrium makes `(0,0)` globally stable.
    DiseaseFreeGlobalStability,
    /// Constant or non-increasing `f`: none if `f(0) < k`, exactly one stable if `f(0) > k`.
    MonotoneUniqueness,
    /// `f(0) > k`, one endemic equilibrium, transversal crossing: it attracts all `I(0) > 0`.
    EndemicGlobalStability,
    /// A saddle is always followed by another crossing further right.
    SaddleSuccessor,
    /// Weighted divergence `-f(R) - 1/I < 0` rules out periodic orbits with `I > 0`.
    NoPeriodicOrbits,
}

impl Criterion {
    /// Smoothness the result assumes of `f`. Only C¹ at construction knots is
    /// ever verified; the rest is recorded, not checked.
    pub fn required_smoothness(self) -> &'static str {
        match self {
            Criterion::EndemicCharacterization
            | Criterion::EndemicExistence
            | Criterion::EndemicLocalStability
            | Criterion::MonotoneUniqueness
            | Criterion::SaddleSuccessor => "positive and differentiable on [0,1]",
            Criterion::DiseaseFreeLocalStability
            | Criterion::DiseaseFreeGlobalStability
            | Criterion::EndemicGlobalStability
            | Criterion::NoPeriodicOrbits => "positive and continuously differentiable on the real line",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics<T> {
    /// `f` at the equilibrium's R.
    pub f: T,
    pub df: T,
    pub dg: T,
    /// Signed quantity the classification thresholds: `f'(R*) - f(R*)²/(k-1)`
    /// for endemic points, `f(0) - k` for the disease-free point.
    pub margin: T,
    /// `|f(R*) - g(R*)|`; absent for the disease-free point.
    pub residual: Option<T>,
    pub trace: T,
    pub det: T,
    pub eigenvalues: Eigenvalues<T>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Equilibrium<T> {
    /// 0 for the disease-free point, then 1.. for endemic points by increasing R*.
    pub id: usize,
    pub kind: EquilibriumKind,
    pub i: T,
    pub r: T,
    pub stability: Stability,
    pub diagnostics: Diagnostics<T>,
}

impl<T: Scalar> Equilibrium<T> {
    pub fn state(&self) -> State2<T> {
        State2::new(self.i, self.r)
    }
}

/// Raw output of the grid scan.
#[derive(Debug, Clone, PartialEq)]
pub struct RootScan<T> {
    /// Endemic R*, ascending.
    pub roots: Vec<T>,
    /// Grid points with `|h| < TANGENCY_BAND` and no sign change nearby.
    pub possible_tangencies: Vec<T>,
    pub grid_intervals: usize,
    /// Right end of the scanned interval.
    pub right_end: T,
}

fn scan_grid<T: Scalar>(m: &Model<T>, grid_intervals: usize) -> (T, impl Fn(usize) -> T) {
    let pole = m.pole();
    let margin = T::lit(POLE_MARGIN).max(T::epsilon() * T::lit(64.0));
    let right_end = pole - margin * pole;
    let n = T::from_count(grid_intervals);
    (right_end, move |j: usize| right_end * T::from_count(j) / n)
}

/// Isolates the zeros of `h = f - g` on `(0, (k-1)/k)`.
pub fn locate_endemic_roots<T: Scalar>(m: &Model<T>, grid_intervals: usize, tol: T) -> Result<RootScan<T>> {
    if grid_intervals < 100 {
        return Err(invalid(
            "grid",
            format!("need at least 100 intervals, got {grid_intervals}"),
        ));
    }
    if !(tol > T::zero()) {
        return Err(invalid("tol", "must be > 0"));
    }
    let (right_end, x) = scan_grid(m, grid_intervals);
    let h: Vec<T> = (0..=grid_intervals).map(|j| m.h(x(j))).collect::<Result<_>>()?;

    let mut roots = Vec::new();
    let mut crossing = vec![false; grid_intervals + 1];
    for j in 1..=grid_intervals {
        if h[j] == T::zero() {
            roots.push(x(j));
            crossing[j] = true;
        }
    }
    for j in 0..grid_intervals {
        let (a, b) = (h[j], h[j + 1]);
        if a != T::zero() && b != T::zero() && (a < T::zero()) != (b < T::zero()) {
            roots.push(bisect(m, x(j), x(j + 1), a, tol)?);
            crossing[j] = true;
            crossing[j + 1] = true;
        }
    }
    roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
    roots.dedup_by(|b, a| (*b - *a).abs() <= tol + tol);

    let band = T::lit(TANGENCY_BAND);
    let possible_tangencies = (1..=grid_intervals)
        .filter(|&j| !crossing[j] && h[j].abs() < band)
        .map(&x)
        .collect();

    Ok(RootScan {
        roots,
        possible_tangencies,
        grid_intervals,
        right_end,
    })
}

/// Bisection on a bracket with `h(a)` and `h(b)` of opposite signs. Stops once
/// the bracket is narrower than `tol` and the better endpoint has
/// `|h| ≤ RESIDUAL_TARGET`, or when the bracket cannot shrink any further.
fn bisect<T: Scalar>(m: &Model<T>, mut a: T, mut b: T, mut ha: T, tol: T) -> Result<T> {
    let mut hb = m.h(b)?;
    let target = T::lit(RESIDUAL_TARGET);
    loop {
        let best_residual = ha.abs().min(hb.abs());
        if b - a <= tol && best_residual <= target {
            break;
        }
        let mid = a + (b - a) / T::lit(2.0);
        if mid <= a || mid >= b {
            break;
        }
        let hm = m.h(mid)?;
        if hm == T::zero() {
            return Ok(mid);
        }
        if (hm < T::zero()) == (ha < T::zero()) {
            a = mid;
            ha = hm;
        } else {
            b = mid;
            hb = hm;
        }
    }
    Ok(if ha.abs() <= hb.abs() { a } else { b })
}

/// `D = f'(R*) - f(R*)²/(k-1)`: negative is stable, positive a saddle.
pub fn classify_equilibrium<T: Scalar>(r_star: T, m: &Model<T>, tie_tol: T) -> Result<Stability> {
    let fd = m.f(r_star)?;
    Ok(classify_margin(stability_margin(fd.value, fd.deriv, m.k()), tie_tol))
}

fn stability_margin<T: Scalar>(f: T, df: T, k: T) -> T {
    df - f * f / (k - T::one())
}

fn classify_margin<T: Scalar>(d: T, tie_tol: T) -> Stability {
    if d < -tie_tol {
        Stability::Stable
    } else if d > tie_tol {
        Stability::Saddle
    } else {
        Stability::Degenerate
    }
}

/// Builds a classified endemic equilibrium at `r_star` (id left at 0).
pub fn endemic_equilibrium<T: Scalar>(m: &Model<T>, r_star: T, tie_tol: T) -> Result<Equilibrium<T>> {
    let k = m.k();
    let fd = m.f(r_star)?;
    let gd = m.g_dual(r_star)?;
    let i_star = r_star / (k - T::one());
    let jac = m.jacobian_2d(&State2::new(i_star, r_star))?;
    let margin = stability_margin(fd.value, fd.deriv, k);
    Ok(Equilibrium {
        id: 0,
        kind: EquilibriumKind::Endemic,
        i: i_star,
        r: r_star,
        stability: classify_margin(margin, tie_tol),
        diagnostics: Diagnostics {
            f: fd.value,
            df: fd.deriv,
            dg: gd.deriv,
            margin,
            residual: Some((fd.value - gd.value).abs()),
            trace: jac.trace(),
            det: jac.det(),
            eigenvalues: jac.eigenvalues(),
        },
    })
}

/// Endemic equilibria sorted by R*, ids `1..`, classified with [`DEFAULT_TIE_TOL`].
pub fn find_endemic_equilibria<T: Scalar>(m: &Model<T>, grid_intervals: usize, tol: T) -> Result<Vec<Equilibrium<T>>> {
    let scan = locate_endemic_roots(m, grid_intervals, tol)?;
    build_endemic(m, &scan.roots, T::lit(DEFAULT_TIE_TOL))
}

pub(crate) fn build_endemic<T: Scalar>(m: &Model<T>, roots: &[T], tie_tol: T) -> Result<Vec<Equilibrium<T>>> {
    roots
        .iter()
        .enumerate()
        .map(|(idx, &r)| {
            let mut e = endemic_equilibrium(m, r, tie_tol)?;
            e.id = idx + 1;
            Ok(e)
        })
        .collect()
}

/// `f(0) < k` stable, `f(0) > k` saddle, otherwise marginal.
pub fn disease_free_classification<T: Scalar>(m: &Model<T>, tie_tol: T) -> Result<Stability> {
    Ok(disease_free(m, tie_tol)?.stability)
}

/// The disease-free equilibrium `(0, 0)` with id 0.
pub fn disease_free<T: Scalar>(m: &Model<T>, tie_tol: T) -> Result<Equilibrium<T>> {
    let fd = m.f(T::zero())?;
    let gd = m.g_dual(T::zero())?;
    let jac = m.jacobian_2d(&State2::new(T::zero(), T::zero()))?;
    let margin = fd.value - m.k();
    let stability = if margin < -tie_tol {
        Stability::Stable
    } else if margin > tie_tol {
        Stability::Saddle
    } else {
        Stability::Marginal
    };
    Ok(Equilibrium {
        id: 0,
        kind: EquilibriumKind::DiseaseFree,
        i: T::zero(),
        r: T::zero(),
        stability,
        diagnostics: Diagnostics {
            f: fd.value,
            df: fd.deriv,
            dg: gd.deriv,
            margin,
            residual: None,
            trace: jac.trace(),
            det: jac.det(),
            eigenvalues: jac.eigenvalues(),
        },
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExistenceBasis {
    /// `f(0) > k = g(0)`.
    RateAtZeroExceedsK,
    /// A grid point with `f > g`.
    SampledCrossing,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExistenceCertificate<T> {
    /// At least one endemic equilibrium with R* in `(witness, (k-1)/k)`.
    pub guaranteed: bool,
    pub witness: Option<T>,
    pub basis: Option<ExistenceBasis>,
    pub criterion: Criterion,
}

/// Looks for a point where `f > g`, trying `R = 0` first.
pub fn existence_certificate<T: Scalar>(m: &Model<T>, grid_intervals: usize) -> Result<ExistenceCertificate<T>> {
    if grid_intervals < 1 {
        return Err(invalid("grid", "need at least 1 interval"));
    }
    let found = |witness, basis| ExistenceCertificate {
        guaranteed: true,
        witness: Some(witness),
        basis: Some(basis),
        criterion: Criterion::EndemicExistence,
    };
    if m.f(T::zero())?.value > m.k() {
        return Ok(found(T::zero(), ExistenceBasis::RateAtZeroExceedsK));
    }
    let (_, x) = scan_grid(m, grid_intervals);
    for j in 0..=grid_intervals {
        let r = x(j);
        if m.h(r)? > T::zero() {
            return Ok(found(r, ExistenceBasis::SampledCrossing));
        }
    }
    Ok(ExistenceCertificate {
        guaranteed: false,
        witness: None,
        basis: None,
        criterion: Criterion::EndemicExistence,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UniquenessVerdict {
    NoEndemic,
    UniqueStable,
    NotCertified,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UniquenessCertificate {
    pub verdict: UniquenessVerdict,
    pub criterion: Criterion,
    pub reason: String,
    /// Whether `f' ≤ 0` held at every sample of `[0, 1]`.
    pub non_increasing_sampled: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GlobalVerdict {
    GloballyStableDiseaseFree,
    GloballyStableEndemic,
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GlobalCertificate {
    pub verdict: GlobalVerdict,
    /// The result invoked, or the one whose hypotheses failed.
    pub criterion: Criterion,
    pub equilibrium_id: Option<usize>,
    pub reason: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SuccessorCheck<T> {
    pub saddle_id: usize,
    pub saddle_r: T,
    pub successor_id: Option<usize>,
    pub successor_r: Option<T>,
    pub satisfied: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificates<T> {
    pub existence: ExistenceCertificate<T>,
    pub uniqueness: UniquenessCertificate,
    pub global: GlobalCertificate,
    pub successors: Vec<SuccessorCheck<T>>,
}

/// Every saddle must be followed by a strictly larger root.
pub fn successor_prediction<T: Scalar>(roots: &[Equilibrium<T>]) -> Vec<SuccessorCheck<T>> {
    roots
        .iter()
        .filter(|e| e.kind == EquilibriumKind::Endemic && e.stability == Stability::Saddle)
        .map(|s| {
            let next = roots
                .iter()
                .filter(|e| e.kind == EquilibriumKind::Endemic && e.r > s.r)
                .min_by(|a, b| a.r.partial_cmp(&b.r).unwrap());
            SuccessorCheck {
                saddle_id: s.id,
                saddle_r: s.r,
                successor_id: next.map(|e| e.id),
                successor_r: next.map(|e| e.r),
                satisfied: next.is_some(),
            }
        })
        .collect()
}

/// Derives uniqueness and global-stability verdicts from the scanned roots.
pub fn global_certificates<T: Scalar>(
    m: &Model<T>,
    roots: &[Equilibrium<T>],
    grid_intervals: usize,
    tie_tol: T,
) -> Result<Certificates<T>> {
    let k = m.k();
    let f0 = m.f(T::zero())?.value;
    let positive = check_positive(m.rate(), k, POSITIVITY_GRID)?.positive;
    let below = f0 < k - tie_tol;
    let above = f0 > k + tie_tol;

    let mut non_increasing = true;
    let last = T::from_count(MONOTONE_GRID - 1);
    for j in 0..MONOTONE_GRID {
        if m.f(T::from_count(j) / last)?.deriv > T::zero() {
            non_increasing = false;
            break;
        }
    }

    let not_certified = |reason: String| UniquenessCertificate {
        verdict: UniquenessVerdict::NotCertified,
        criterion: Criterion::MonotoneUniqueness,
        reason,
        non_increasing_sampled: non_increasing,
    };
    let uniqueness = if !positive {
        not_certified("f is not positive on [0,1] (sampled)".into())
    } else if !non_increasing {
        not_certified("f is not non-increasing on [0,1] (sampled)".into())
    } else if below {
        UniquenessCertificate {
            verdict: UniquenessVerdict::NoEndemic,
            criterion: Criterion::MonotoneUniqueness,
            reason: "f is non-increasing (sampled) and f(0) < k".into(),
            non_increasing_sampled: true,
        }
    } else if above {
        UniquenessCertificate {
            verdict: UniquenessVerdict::UniqueStable,
            criterion: Criterion::MonotoneUniqueness,
            reason: "f is non-increasing (sampled) and f(0) > k".into(),
            non_increasing_sampled: true,
        }
    } else {
        not_certified("f(0) = k within tolerance".into())
    };

    let endemic: Vec<&Equilibrium<T>> = roots.iter().filter(|e| e.kind == EquilibriumKind::Endemic).collect();
    let unknown = |criterion, reason: String| GlobalCertificate {
        verdict: GlobalVerdict::Unknown,
        criterion,
        equilibrium_id: None,
        reason,
    };
    let global = if !positive {
        unknown(
            Criterion::EndemicGlobalStability,
            "f is not positive on [0,1] (sampled)".into(),
        )
    } else if below {
        if endemic.is_empty() {
            GlobalCertificate {
                verdict: GlobalVerdict::GloballyStableDiseaseFree,
                criterion: Criterion::DiseaseFreeGlobalStability,
                equilibrium_id: Some(0),
                reason: "f(0) < k and the scan found no endemic equilibrium".into(),
            }
        } else {
            unknown(
                Criterion::DiseaseFreeGlobalStability,
                format!("(0,0) is not the only equilibrium: {} endemic found", endemic.len()),
            )
        }
    } else if !above {
        unknown(
            Criterion::DiseaseFreeGlobalStability,
            "f(0) = k within tolerance; neither global result applies".into(),
        )
    } else if endemic.len() != 1 {
        unknown(
            Criterion::EndemicGlobalStability,
            format!("needs exactly one endemic equilibrium, found {}", endemic.len()),
        )
    } else {
        let e = endemic[0];
        if (e.diagnostics.df - e.diagnostics.dg).abs() > tie_tol {
            GlobalCertificate {
                verdict: GlobalVerdict::GloballyStableEndemic,
                criterion: Criterion::EndemicGlobalStability,
                equilibrium_id: Some(e.id),
                reason: "f(0) > k, unique endemic equilibrium, f'(R*) != g'(R*)".into(),
            }
        } else {
            unknown(
                Criterion::EndemicGlobalStability,
                "f'(R*) = g'(R*) within tolerance at the unique endemic equilibrium".into(),
            )
        }
    };

    Ok(Certificates {
        existence: existence_certificate(m, grid_intervals)?,
        uniqueness,
        global,
        successors: successor_prediction(roots),
    })
}
