//! Error norms, mesh-quality certification and convergence-rate fits.
//!
//! Errors are measured on the mesh against `u∘Φ`, where `Φ` is the
//! closest-point map of the reference surface.

mod norms;
mod quadrature;
mod quality;
pub mod report;
pub mod study;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::biharmonic::SolveError;
use crate::fem::FemError;
use crate::surfaces::SurfaceError;

pub use norms::{h1_error, l2_error, l2_error_against, l2_error_laplacian};
pub use quadrature::{rule as quadrature_rule, QuadOrder};
pub use quality::{certify_quality, shape_regularity, QualityRecord};

/// Slopes at or below this are flagged as non-convergent.
pub const NON_CONVERGENT_SLOPE: f64 = 0.25;
/// Lower bound on `σ = min(γ, 2ε)` required of a mesh family.
pub const SIGMA_REQUIRED: f64 = 1.5;

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("rate fit needs at least 3 levels, got {0}")]
    InsufficientLevels(usize),
    #[error("rate fit needs distinct mesh sizes")]
    DuplicateH,
    #[error("cannot fit a rate through non-positive value {0}")]
    NonPositive(f64),
    #[error(transparent)]
    Surface(#[from] SurfaceError),
    #[error(transparent)]
    Fem(#[from] FemError),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("csv: {0}")]
    Format(String),
}

/// Errors and mesh quality of one refinement level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorRecord {
    pub level: usize,
    pub h: f64,
    /// Number of vertices (degrees of freedom of `u2`).
    pub dofs: usize,
    pub l2_u1: f64,
    pub h1_u1: f64,
    pub l2_u2: f64,
    pub quality: QualityRecord,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Norm {
    #[serde(rename = "l2_u1")]
    L2U1,
    #[serde(rename = "h1_u1")]
    H1U1,
    #[serde(rename = "l2_u2")]
    L2U2,
}

impl Norm {
    pub const ALL: [Norm; 3] = [Norm::L2U1, Norm::H1U1, Norm::L2U2];

    pub fn name(self) -> &'static str {
        match self {
            Norm::L2U1 => "l2_u1",
            Norm::H1U1 => "h1_u1",
            Norm::L2U2 => "l2_u2",
        }
    }

    pub fn of(self, record: &ErrorRecord) -> f64 {
        match self {
            Norm::L2U1 => record.l2_u1,
            Norm::H1U1 => record.h1_u1,
            Norm::L2U2 => record.l2_u2,
        }
    }
}

impl fmt::Display for Norm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Least-squares slope of `log value` against `log h`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateFit {
    pub slope: f64,
    /// Root-mean-square residual of the log-log fit.
    pub residual: f64,
    /// Number of (finest) levels used.
    pub points: usize,
}

/// Fits `log y = slope·log h + c` through all given points.
pub fn fit_slope(h: &[f64], y: &[f64]) -> Result<RateFit, AnalysisError> {
    if h.len() < 2 || h.len() != y.len() {
        return Err(AnalysisError::InsufficientLevels(h.len().min(y.len())));
    }
    if let Some(&bad) = h.iter().chain(y).find(|v| !(**v > 0.0)) {
        return Err(AnalysisError::NonPositive(bad));
    }
    let x: Vec<f64> = h.iter().map(|v| v.ln()).collect();
    let z: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let mz = z.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    if sxx == 0.0 {
        return Err(AnalysisError::DuplicateH);
    }
    let sxz: f64 = x.iter().zip(&z).map(|(a, b)| (a - mx) * (b - mz)).sum();
    let slope = sxz / sxx;
    let intercept = mz - slope * mx;
    let residual = (x.iter().zip(&z).map(|(a, b)| (b - slope * a - intercept).powi(2)).sum::<f64>() / n).sqrt();
    Ok(RateFit { slope, residual, points: x.len() })
}

/// How many of the finest levels enter a fit: `⌈levels/2⌉ + 1`.
pub fn fit_window(levels: usize) -> usize {
    (levels.div_ceil(2) + 1).min(levels)
}

/// Per-level records plus fitted rates.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub case: String,
    pub records: Vec<ErrorRecord>,
    pub rates: Vec<(Norm, RateFit)>,
    /// Slope of the maximal distance to the surface against `h`.
    pub gamma: Option<RateFit>,
    /// Slope of the maximal normal angle against `h`.
    pub epsilon: Option<RateFit>,
    /// `min(γ, 2ε)`
    pub sigma_estimate: Option<f64>,
}

impl ConvergenceReport {
    pub fn rate(&self, norm: Norm) -> f64 {
        self.rates.iter().find(|(n, _)| *n == norm).map_or(f64::NAN, |(_, r)| r.slope)
    }
}

/// Fits every norm (and the quality exponents) over the finest
/// `⌈levels/2⌉ + 1` levels. Records are sorted by decreasing `h` first.
pub fn fit_rates(case: &str, records: &[ErrorRecord]) -> Result<ConvergenceReport, AnalysisError> {
    if records.len() < 3 {
        return Err(AnalysisError::InsufficientLevels(records.len()));
    }
    let mut sorted = records.to_vec();
    sorted.sort_by(|a, b| b.h.total_cmp(&a.h));
    if sorted.windows(2).any(|w| w[0].h == w[1].h) {
        return Err(AnalysisError::DuplicateH);
    }
    let finest = &sorted[sorted.len() - fit_window(sorted.len())..];
    let h: Vec<f64> = finest.iter().map(|r| r.h).collect();
    let fit_of = |value: &dyn Fn(&ErrorRecord) -> f64| {
        let y: Vec<f64> = finest.iter().map(value).collect();
        fit_slope(&h, &y)
    };

    let rates = Norm::ALL
        .iter()
        .map(|&norm| Ok((norm, fit_of(&|r| norm.of(r))?)))
        .collect::<Result<Vec<_>, AnalysisError>>()?;
    let gamma = fit_of(&|r| r.quality.max_distance).ok();
    let epsilon = fit_of(&|r| r.quality.max_normal_angle).ok();
    let sigma_estimate = match (gamma, epsilon) {
        (Some(g), Some(e)) => Some(g.slope.min(2.0 * e.slope)),
        _ => None,
    };
    Ok(ConvergenceReport { case: case.to_owned(), records: sorted, rates, gamma, epsilon, sigma_estimate })
}
