//! Convergence and quality studies over a refinement family.

use rayon::prelude::*;

use super::{
    certify_quality, fit_rates, fit_slope, fit_window, h1_error, l2_error, l2_error_laplacian, AnalysisError,
    ConvergenceReport, ErrorRecord, QuadOrder, QualityRecord, RateFit,
};
use crate::biharmonic::{solve_mixed, MixedSolution};
use crate::fem::{interpolate, MassMode};
use crate::mesh::TriMesh;
use crate::surfaces::{ExactSolution, MeshSpec, RefinementFamily, SurfaceCase};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StudyOptions {
    pub mass_mode: MassMode,
    pub tol: f64,
    pub quad_order: QuadOrder,
}

impl Default for StudyOptions {
    fn default() -> Self {
        Self { mass_mode: MassMode::Consistent, tol: 1e-10, quad_order: QuadOrder::Four }
    }
}

/// Solves `Δ²u = f` with `f` interpolated from the case's exact load.
pub fn solve_case(mesh: &TriMesh, case: &SurfaceCase, options: &StudyOptions) -> Result<MixedSolution, AnalysisError> {
    let f = interpolate(mesh, |p| case.exact_f(p));
    Ok(solve_mixed(mesh, &f, options.mass_mode, options.tol)?)
}

/// Error record of a computed solution on one level.
pub fn evaluate_solution(
    level: usize,
    mesh: &TriMesh,
    case: &SurfaceCase,
    solution: &MixedSolution,
    order: QuadOrder,
) -> Result<ErrorRecord, AnalysisError> {
    Ok(ErrorRecord {
        level,
        h: mesh.max_edge_length(),
        dofs: mesh.vertex_count(),
        l2_u1: l2_error(mesh, &solution.u1, case, order)?,
        h1_u1: h1_error(mesh, &solution.u1, case, order)?,
        l2_u2: l2_error_laplacian(mesh, &solution.u2, case, order)?,
        quality: certify_quality(mesh, case)?,
    })
}

/// Generates, solves and measures one level.
pub fn run_level(
    level: usize,
    spec: &MeshSpec,
    case: &SurfaceCase,
    options: &StudyOptions,
) -> Result<ErrorRecord, AnalysisError> {
    let mesh = spec.generate()?;
    let solution = solve_case(&mesh, case, options)?;
    evaluate_solution(level, &mesh, case, &solution, options.quad_order)
}

/// Runs every level of `family` (concurrently) and fits the rates.
///
/// The result does not depend on the number of worker threads.
pub fn run_convergence(
    label: &str,
    family: &RefinementFamily,
    options: &StudyOptions,
) -> Result<ConvergenceReport, AnalysisError> {
    let records = family
        .levels
        .par_iter()
        .enumerate()
        .map(|(level, spec)| run_level(level, spec, &family.case, options))
        .collect::<Result<Vec<_>, _>>()?;
    fit_rates(label, &records)
}

/// Quality constants of one level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QualityLevel {
    pub level: usize,
    pub h: f64,
    pub quality: QualityRecord,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QualityReport {
    pub case: String,
    pub levels: Vec<QualityLevel>,
    pub gamma: Option<RateFit>,
    pub epsilon: Option<RateFit>,
    pub sigma_estimate: Option<f64>,
}

impl QualityReport {
    /// Fits `γ` and `ε` over the finest `⌈levels/2⌉ + 1` levels when at
    /// least three levels with positive deviations are present.
    pub fn new(case: &str, mut levels: Vec<QualityLevel>) -> Self {
        levels.sort_by(|a, b| b.h.total_cmp(&a.h));
        let fit = |value: fn(&QualityRecord) -> f64| {
            if levels.len() < 3 {
                return None;
            }
            let finest = &levels[levels.len() - fit_window(levels.len())..];
            let h: Vec<f64> = finest.iter().map(|l| l.h).collect();
            let y: Vec<f64> = finest.iter().map(|l| value(&l.quality)).collect();
            fit_slope(&h, &y).ok()
        };
        let gamma = fit(|q| q.max_distance);
        let epsilon = fit(|q| q.max_normal_angle);
        let sigma_estimate = gamma.zip(epsilon).map(|(g, e)| g.slope.min(2.0 * e.slope));
        Self { case: case.to_owned(), levels, gamma, epsilon, sigma_estimate }
    }
}

/// Certifies every level of `family` without solving.
pub fn run_quality(label: &str, family: &RefinementFamily) -> Result<QualityReport, AnalysisError> {
    let levels = family
        .levels
        .par_iter()
        .enumerate()
        .map(|(level, spec)| {
            let mesh = spec.generate()?;
            Ok(QualityLevel { level, h: mesh.max_edge_length(), quality: certify_quality(&mesh, &family.case)? })
        })
        .collect::<Result<Vec<_>, AnalysisError>>()?;
    Ok(QualityReport::new(label, levels))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::Norm;
    use std::f64::consts::PI;

    #[test]
    fn small_cap_study_converges() {
        let family = RefinementFamily::cap(1.0, PI / 3.0, &[4, 8, 16]).unwrap();
        let report = run_convergence("cap", &family, &StudyOptions::default()).unwrap();
        assert_eq!(report.records.len(), 3);
        assert!(report.records.windows(2).all(|w| w[0].h > w[1].h));
        assert!(report.rate(Norm::L2U1) > 0.8, "{report:?}");
    }

    #[test]
    fn icosphere_quality_exponents() {
        let family = RefinementFamily::sphere(1.0, 2, 0, &[0, 1, 2, 3, 4]).unwrap();
        let report = run_quality("sphere", &family).unwrap();
        assert!(report.gamma.unwrap().slope >= 1.9);
        assert!(report.epsilon.unwrap().slope >= 0.9);
        assert!(report.sigma_estimate.unwrap() >= 1.5);
    }
}
