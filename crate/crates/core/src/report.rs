//! Model specification files and the JSON analysis report.
//!
//! A spec is either a wrapper object
//!
//! ```json
//! {"k": 5.0, "f": {"kind": "expr", "text": "k*R^2 + 2*k"}}
//! {"raw": {"mu": 0.02, "gamma": 0.08}, "f": {"kind": "constant", "beta": 0.2}}
//! ```
//!
//! or a bare scenario such as `{"kind": "example1", "n": 5, "k": 5.0}`.
//! `k` must come from exactly one place: the wrapper, `raw`, or the scenario.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::equilibria::{
    build_endemic, disease_free, global_certificates, locate_endemic_roots, Certificates, Equilibrium, Stability,
    DEFAULT_BISECTION_TOL, DEFAULT_GRID_INTERVALS, DEFAULT_TIE_TOL,
};
use crate::error::{invalid, Error, Result};
use crate::exprfn::{check_positive, parse_expr, POSITIVITY_GRID};
use crate::model::{redimensionalize, Model, RawRates, Redimensionalized};
use crate::scalar::Scalar;
use crate::scenarios::{build_constant, build_example1, build_example2, Example1Spec};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawSpec {
    pub mu: f64,
    pub gamma: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum RateSpec {
    Expr {
        text: String,
    },
    Example1 {
        n: u32,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        k: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        f0: Option<f64>,
    },
    Example2 {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        k: Option<f64>,
    },
    Constant {
        /// Dimensionless rate `β/μ`.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        beta_tilde: Option<f64>,
        /// Dimensional rate; needs `raw`.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        beta: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        k: Option<f64>,
    },
}

impl RateSpec {
    fn own_k(&self) -> Option<f64> {
        match self {
            RateSpec::Expr { .. } => None,
            RateSpec::Example1 { k, .. } | RateSpec::Example2 { k } | RateSpec::Constant { k, .. } => *k,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpecFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub raw: Option<RawSpec>,
    pub f: RateSpec,
}

/// A spec with `k` resolved and every field checked.
#[derive(Debug, Clone, PartialEq)]
pub struct ResolvedSpec {
    pub file: ModelSpecFile,
    pub k: f64,
    pub redimensionalized: Option<Redimensionalized<f64>>,
}

impl ModelSpecFile {
    /// Parses either form of spec from JSON text.
    pub fn from_json(text: &str) -> Result<Self> {
        let value: Value = serde_json::from_str(text).map_err(|e| invalid("model spec", e.to_string()))?;
        let wrapped = value.as_object().is_some_and(|o| o.contains_key("f"));
        let parsed = if wrapped {
            serde_json::from_value(value)
        } else {
            serde_json::from_value(value).map(|f| ModelSpecFile { k: None, raw: None, f })
        };
        parsed.map_err(|e| invalid("model spec", e.to_string()))
    }

    pub fn resolve(&self) -> Result<ResolvedSpec> {
        let sources = [self.k.is_some(), self.raw.is_some(), self.f.own_k().is_some()];
        match sources.iter().filter(|&&s| s).count() {
            0 => return Err(invalid("k", "give k, raw rates, or a scenario k")),
            1 => {}
            _ => return Err(invalid("k", "k is given more than once (top level, raw, scenario)")),
        }
        let beta = match &self.f {
            RateSpec::Constant { beta, beta_tilde, .. } => {
                if beta.is_some() == beta_tilde.is_some() {
                    return Err(invalid("beta_tilde", "give exactly one of beta_tilde or beta"));
                }
                if beta.is_some() && self.raw.is_none() {
                    return Err(invalid("beta", "a dimensional beta needs raw rates"));
                }
                *beta
            }
            _ => None,
        };
        let redimensionalized = match self.raw {
            Some(raw) => Some(redimensionalize(RawRates::new(raw.mu, raw.gamma)?, beta)?),
            None => None,
        };
        let k = self
            .k
            .or(redimensionalized.map(|r| r.k))
            .or(self.f.own_k())
            .unwrap_or(f64::NAN);
        if !(k > 1.0 && k.is_finite()) {
            return Err(invalid("k", format!("must be a finite number > 1, got {k}")));
        }
        Ok(ResolvedSpec {
            file: self.clone(),
            k,
            redimensionalized,
        })
    }
}

impl ResolvedSpec {
    pub fn build<T: Scalar>(&self) -> Result<Model<T>> {
        let k = T::lit(self.k);
        match &self.file.f {
            RateSpec::Expr { text } => Model::from_expr(k, parse_expr(text)?),
            RateSpec::Example1 { n, f0, .. } => {
                let mut spec = Example1Spec::new(*n, k);
                if let Some(f0) = f0 {
                    spec = spec.with_f0(T::lit(*f0));
                }
                build_example1(spec)
            }
            RateSpec::Example2 { .. } => build_example2(k),
            RateSpec::Constant { beta_tilde, .. } => {
                let bt = beta_tilde
                    .or(self.redimensionalized.and_then(|r| r.beta_tilde))
                    .unwrap_or(f64::NAN);
                build_constant(T::lit(bt), k)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnalysisSettings {
    pub grid_intervals: usize,
    pub bisection_tol: f64,
    pub tie_tol: f64,
    pub positivity_grid: usize,
}

impl Default for AnalysisSettings {
    fn default() -> Self {
        Self {
            grid_intervals: DEFAULT_GRID_INTERVALS,
            bisection_tol: DEFAULT_BISECTION_TOL,
            tie_tol: DEFAULT_TIE_TOL,
            positivity_grid: POSITIVITY_GRID,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelEcho {
    pub spec: ModelSpecFile,
    pub k: f64,
    /// `(k-1)/k`, the pole of the threshold function.
    pub pole: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub redimensionalized: Option<Redimensionalized<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PositivityReport {
    pub positive: bool,
    /// Always true: only grid points of `[0, 1]` are checked.
    pub heuristic: bool,
    pub grid_points: usize,
    pub argmin: f64,
    pub min_value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EndemicSummary {
    pub count: usize,
    pub stable: usize,
    pub saddle: usize,
    pub degenerate: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub schema_version: u32,
    pub model: ModelEcho,
    pub settings: AnalysisSettings,
    pub positivity: PositivityReport,
    pub disease_free: Equilibrium<f64>,
    pub endemic: Vec<Equilibrium<f64>>,
    pub summary: EndemicSummary,
    /// Grid points where `|f - g|` is tiny without a sign change.
    pub possible_tangencies: Vec<f64>,
    pub certificates: Certificates<f64>,
}

impl AnalysisReport {
    /// Disease-free point followed by the endemic ones, i.e. indexed by id.
    pub fn equilibria(&self) -> Vec<Equilibrium<f64>> {
        std::iter::once(self.disease_free)
            .chain(self.endemic.iter().copied())
            .collect()
    }

    pub fn to_json(&self) -> String {
        // only finite floats and string keys: serialization cannot fail
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| invalid("report", e.to_string()))
    }
}

/// Runs the positivity check, root finding, classification and certificates.
pub fn analyze(spec: &ResolvedSpec, settings: &AnalysisSettings) -> Result<(Model<f64>, AnalysisReport)> {
    let m: Model<f64> = spec.build()?;
    let report = analyze_model(&m, spec, settings)?;
    Ok((m, report))
}

pub fn analyze_model(m: &Model<f64>, spec: &ResolvedSpec, settings: &AnalysisSettings) -> Result<AnalysisReport> {
    let positivity = check_positive(m.rate(), m.k(), settings.positivity_grid)?;
    let scan = locate_endemic_roots(m, settings.grid_intervals, settings.bisection_tol)?;
    let endemic = build_endemic(m, &scan.roots, settings.tie_tol)?;
    let df = disease_free(m, settings.tie_tol)?;
    let certificates = global_certificates(m, &endemic, settings.grid_intervals, settings.tie_tol)?;
    let count = |s| endemic.iter().filter(|e| e.stability == s).count();
    let summary = EndemicSummary {
        count: endemic.len(),
        stable: count(Stability::Stable),
        saddle: count(Stability::Saddle),
        degenerate: count(Stability::Degenerate),
    };
    let report = AnalysisReport {
        schema_version: SCHEMA_VERSION,
        model: ModelEcho {
            spec: spec.file.clone(),
            k: m.k(),
            pole: m.pole(),
            redimensionalized: spec.redimensionalized,
        },
        settings: *settings,
        positivity: PositivityReport {
            positive: positivity.positive,
            heuristic: true,
            grid_points: positivity.grid_points,
            argmin: positivity.argmin,
            min_value: positivity.min_value,
        },
        disease_free: df,
        endemic,
        summary,
        possible_tangencies: scan.possible_tangencies,
        certificates,
    };
    check_finite(&report)?;
    Ok(report)
}

fn check_finite(report: &AnalysisReport) -> Result<()> {
    let bad = report.equilibria().iter().any(|e| {
        let d = &e.diagnostics;
        ![e.i, e.r, d.f, d.df, d.dg, d.margin, d.trace, d.det]
            .iter()
            .all(|v| v.is_finite())
    });
    if bad {
        return Err(Error::Precondition(
            "non-finite value in equilibrium diagnostics".into(),
        ));
    }
    Ok(())
}
