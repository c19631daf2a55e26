//! Discrete mixed biharmonic problem.
//!
//! The unknowns are `u1 ≈ u` (zero on the boundary) and `u2 ≈ Δu` (all
//! vertices). With `S` the cotangent stiffness, `M` the mass matrix and
//! `B = S[interior, :]`, the discrete problem reads
//!
//! ```text
//! ⟨∇u2, ∇ξ⟩ = ⟨f, ξ⟩    for interior hats ξ      (B u2 = M[interior, :] f)
//! ⟨∇u1, ∇η⟩ = ⟨u2, η⟩   for all hats η           (Bᵀ u1 = M u2)
//! ```
//!
//! Only the clamped value `u1 = 0` is imposed explicitly. The normal
//! derivative condition is not: it comes from testing the second equation
//! against every hat function, including those on the boundary.
//!
//! On closed meshes the two equations decouple into Poisson problems whose
//! solutions are fixed by requiring zero M-weighted mean.

use thiserror::Error;

use crate::fem::{self, DofPartition, FemError, MassMode, NodalField};
use crate::linalg::{self, dot, norm, LinalgError, SolveReport, SparseMatrix};
use crate::mesh::TriMesh;

/// Above this many unknowns the saddle solve accepts a residual floor of 1e-9.
pub const LARGE_SYSTEM_DOFS: usize = 100_000;
pub const LARGE_SYSTEM_TOL_FLOOR: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolveError {
    #[error("mesh has no boundary; use the closed-surface solver")]
    NoBoundary,
    #[error("mesh has a boundary; use the Dirichlet solver")]
    HasBoundary,
    #[error("mesh has no interior vertices")]
    NoInteriorDofs,
    #[error("post-solve check failed: {what} residual {residual:.3e} exceeds {limit:.3e}")]
    Verification { what: &'static str, residual: f64, limit: f64 },
    #[error(transparent)]
    Fem(#[from] FemError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Discrete solution pair.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedSolution {
    /// Approximates `u`; exactly zero on boundary vertices.
    pub u1: NodalField,
    /// Approximates `Δu` on every vertex.
    pub u2: NodalField,
    pub solve_report: SolveReport,
    pub mass_mode: MassMode,
    /// M-weighted mean removed from `f` (closed meshes only, otherwise 0).
    pub removed_mean: f64,
}

/// Assembled saddle-point system `[0 B; Bᵀ −M] [u1_I; u2] = [M_I f; 0]`.
#[derive(Debug, Clone)]
pub struct SaddleSystem {
    pub matrix: SparseMatrix,
    pub rhs: Vec<f64>,
    pub partition: DofPartition,
}

impl SaddleSystem {
    pub fn new(mesh: &TriMesh, f: &NodalField, mass_mode: MassMode) -> Result<Self, SolveError> {
        f.check_mesh(mesh)?;
        let partition = fem::partition_dofs(mesh);
        let stiffness = fem::assemble_stiffness(mesh);
        let mass = fem::assemble_mass(mesh, mass_mode);
        let ni = partition.interior.len();
        let nv = mesh.vertex_count();

        let b = stiffness.select_rows(&partition.interior);
        let mut triplets = Vec::with_capacity(2 * b.nnz() + mass.nnz());
        for (i, j, v) in b.triplets() {
            triplets.push((i, ni + j, v));
            triplets.push((ni + j, i, v));
        }
        for (i, j, v) in mass.triplets() {
            triplets.push((ni + i, ni + j, -v));
        }
        let matrix = SparseMatrix::from_triplets(ni + nv, ni + nv, &triplets)?;
        let mf = mass.spmv(f.values())?;
        let mut rhs = partition.restrict(&mf);
        rhs.resize(ni + nv, 0.0);
        Ok(Self { matrix, rhs, partition })
    }

    /// Splits a solution vector into full-length `(u1, u2)` values.
    pub fn split(&self, x: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let ni = self.partition.interior.len();
        (self.partition.extend_by_zero(&x[..ni]), x[ni..].to_vec())
    }
}

fn effective_tol(tol: f64, unknowns: usize) -> f64 {
    if unknowns > LARGE_SYSTEM_DOFS {
        tol.max(LARGE_SYSTEM_TOL_FLOOR)
    } else {
        tol
    }
}

/// Mixed solve on a mesh with boundary, using the coupled saddle system.
pub fn solve_mixed_dirichlet(mesh: &TriMesh, f: &NodalField, tol: f64) -> Result<MixedSolution, SolveError> {
    if mesh.is_closed() {
        return Err(SolveError::NoBoundary);
    }
    let system = SaddleSystem::new(mesh, f, MassMode::Consistent)?;
    if system.partition.interior.is_empty() {
        return Err(SolveError::NoInteriorDofs);
    }
    let tol = effective_tol(tol, system.rhs.len());
    let (x, report) = linalg::solve_symmetric_indefinite(&system.matrix, &system.rhs, tol)?;
    let (u1, u2) = system.split(&x);
    let solution = MixedSolution {
        u1: NodalField::new(mesh, u1)?,
        u2: NodalField::new(mesh, u2)?,
        solve_report: report,
        mass_mode: MassMode::Consistent,
        removed_mean: 0.0,
    };
    verify_mixed(mesh, f, &solution, tol)?;
    Ok(solution)
}

/// Mixed solve with lumped mass, eliminating `u2 = M_L⁻¹ Bᵀ u1` so that `u1`
/// solves the SPD system `B M_L⁻¹ Bᵀ u1 = M_L[interior, :] f`.
pub fn solve_mixed_lumped_schur(mesh: &TriMesh, f: &NodalField, tol: f64) -> Result<MixedSolution, SolveError> {
    if mesh.is_closed() {
        return Err(SolveError::NoBoundary);
    }
    f.check_mesh(mesh)?;
    let system = LumpedSchurSystem::new(mesh, f)?;
    let tol = effective_tol(tol, system.rhs.len());
    let (u1_interior, report) = linalg::solve_spd(&system.matrix, &system.rhs, tol)?;
    let (u1, u2) = system.recover(&u1_interior);
    let solution = MixedSolution {
        u1: NodalField::new(mesh, u1)?,
        u2: NodalField::new(mesh, u2)?,
        solve_report: report,
        mass_mode: MassMode::Lumped,
        removed_mean: 0.0,
    };
    verify_mixed(mesh, f, &solution, tol)?;
    Ok(solution)
}

/// Eliminated system of the lumped-mass path.
#[derive(Debug, Clone)]
pub struct LumpedSchurSystem {
    pub matrix: SparseMatrix,
    pub rhs: Vec<f64>,
    pub partition: DofPartition,
    b_transpose: SparseMatrix,
    inverse_lumped: Vec<f64>,
}

impl LumpedSchurSystem {
    pub fn new(mesh: &TriMesh, f: &NodalField) -> Result<Self, SolveError> {
        f.check_mesh(mesh)?;
        let partition = fem::partition_dofs(mesh);
        if partition.interior.is_empty() {
            return Err(SolveError::NoInteriorDofs);
        }
        let stiffness = fem::assemble_stiffness(mesh);
        let lumped = fem::assemble_mass(mesh, MassMode::Lumped);
        let inverse_lumped: Vec<f64> = lumped.diagonal().iter().map(|d| 1.0 / d).collect();
        let b = stiffness.select_rows(&partition.interior);
        let b_transpose = b.transpose();
        let matrix = b.matmul(&b_transpose.scale_rows(&inverse_lumped))?;
        let rhs = partition.restrict(&lumped.spmv(f.values())?);
        Ok(Self { matrix, rhs, partition, b_transpose, inverse_lumped })
    }

    /// Full-length `(u1, u2)` from the interior values of `u1`.
    pub fn recover(&self, u1_interior: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let u2 = self
            .b_transpose
            .mul_vec(u1_interior)
            .iter()
            .zip(&self.inverse_lumped)
            .map(|(v, d)| v * d)
            .collect();
        (self.partition.extend_by_zero(u1_interior), u2)
    }
}

/// Bordered Poisson system `[S c; cᵀ 0] [x; λ] = [rhs; 0]` with `c = M·1`.
#[derive(Debug, Clone)]
pub struct BorderedSystem {
    pub matrix: SparseMatrix,
    pub constraint: Vec<f64>,
}

impl BorderedSystem {
    pub fn new(stiffness: &SparseMatrix, mass: &SparseMatrix) -> Result<Self, SolveError> {
        let n = stiffness.rows();
        let constraint = mass.spmv(&vec![1.0; n])?;
        let mut triplets: Vec<_> = stiffness.triplets().collect();
        for (i, &c) in constraint.iter().enumerate() {
            triplets.push((i, n, c));
            triplets.push((n, i, c));
        }
        Ok(Self { matrix: SparseMatrix::from_triplets(n + 1, n + 1, &triplets)?, constraint })
    }

    pub fn rhs(&self, load: &[f64]) -> Vec<f64> {
        let mut rhs = load.to_vec();
        rhs.push(0.0);
        rhs
    }
}

/// Zero-mean Poisson solver: with the last vertex fixed at zero the
/// stiffness block is nonsingular and stays sparse, unlike the bordered
/// matrix whose constraint row is dense. Any consistent solution is then
/// shifted to zero `c`-weighted mean.
struct GroundedPoisson {
    block: SparseMatrix,
    constraint: Vec<f64>,
}

impl GroundedPoisson {
    fn new(stiffness: &SparseMatrix, constraint: Vec<f64>) -> Result<Self, SolveError> {
        let m = stiffness.rows() - 1;
        let triplets: Vec<_> = stiffness.triplets().filter(|&(i, j, _)| i < m && j < m).collect();
        Ok(Self { block: SparseMatrix::from_triplets(m, m, &triplets)?, constraint })
    }

    /// Solves `S x = rhs`, `cᵀx = 0` for a right-hand side summing to zero.
    fn solve(&self, rhs: &[f64], tol: f64) -> Result<(Vec<f64>, SolveReport), SolveError> {
        let m = self.block.rows();
        let (mut x, report) = if m == 0 {
            (Vec::new(), SolveReport { iterations: 0, relative_residual: 0.0, method: linalg::SolveMethod::SparseLu })
        } else {
            linalg::solve_symmetric_indefinite(&self.block, &rhs[..m], tol)?
        };
        x.push(0.0);
        let shift = dot(&self.constraint, &x) / self.constraint.iter().sum::<f64>();
        x.iter_mut().for_each(|v| *v -= shift);
        Ok((x, report))
    }
}

/// Mixed solve on a closed mesh: two zero-mean Poisson problems
/// `S u2 = M f` and `S u1 = M u2`, i.e. the solutions of the
/// [`BorderedSystem`]s with vanishing multiplier.
///
/// `f` is first projected to zero M-weighted mean; the removed mean is
/// reported in [`MixedSolution::removed_mean`].
pub fn solve_mixed_closed(mesh: &TriMesh, f: &NodalField, tol: f64) -> Result<MixedSolution, SolveError> {
    if !mesh.is_closed() {
        return Err(SolveError::HasBoundary);
    }
    f.check_mesh(mesh)?;
    let stiffness = fem::assemble_stiffness(mesh);
    let mass = fem::assemble_mass(mesh, MassMode::Consistent);
    let n = mesh.vertex_count();
    let constraint = mass.spmv(&vec![1.0; n])?;
    let grounded = GroundedPoisson::new(&stiffness, constraint)?;
    let tol = effective_tol(tol, n);

    let total: f64 = grounded.constraint.iter().sum();
    let removed_mean = dot(&grounded.constraint, f.values()) / total;
    let mut projected: Vec<f64> = f.values().iter().map(|v| v - removed_mean).collect();
    // a (numerically) constant load leaves only rounding noise
    if norm(&projected) <= 64.0 * f64::EPSILON * norm(f.values()) {
        projected.iter_mut().for_each(|v| *v = 0.0);
    }

    let (u2, r2) = grounded.solve(&mass.spmv(&projected)?, tol)?;
    let (u1, r1) = grounded.solve(&mass.spmv(&u2)?, tol)?;

    let report = SolveReport {
        iterations: r1.iterations + r2.iterations,
        relative_residual: r1.relative_residual.max(r2.relative_residual),
        method: r1.method,
    };
    let solution = MixedSolution {
        u1: NodalField::new(mesh, u1)?,
        u2: NodalField::new(mesh, u2)?,
        solve_report: report,
        mass_mode: MassMode::Consistent,
        removed_mean,
    };
    let projected = NodalField::new(mesh, projected)?;
    verify_mixed(mesh, &projected, &solution, tol)?;
    Ok(solution)
}

/// Picks the closed-surface or Dirichlet solver from the mesh topology.
///
/// Closed meshes are always solved with the consistent mass matrix.
pub fn solve_mixed(mesh: &TriMesh, f: &NodalField, mass_mode: MassMode, tol: f64) -> Result<MixedSolution, SolveError> {
    match (mesh.is_closed(), mass_mode) {
        (true, _) => solve_mixed_closed(mesh, f, tol),
        (false, MassMode::Consistent) => solve_mixed_dirichlet(mesh, f, tol),
        (false, MassMode::Lumped) => solve_mixed_lumped_schur(mesh, f, tol),
    }
}

/// Residuals of both variational identities, relative to their right-hand sides.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VariationalResiduals {
    /// `|B u2 − M_I f| / |M_I f|`, tested against interior hats.
    pub first: f64,
    /// `|Bᵀ u1 − M u2| / |M u2|`, tested against all hats (interior rows only
    /// for `u1` on closed meshes too, where every vertex is interior).
    pub second: f64,
}

pub fn variational_residuals(
    mesh: &TriMesh,
    f: &NodalField,
    solution: &MixedSolution,
) -> Result<VariationalResiduals, SolveError> {
    f.check_mesh(mesh)?;
    let partition = fem::partition_dofs(mesh);
    let stiffness = fem::assemble_stiffness(mesh);
    let mass = fem::assemble_mass(mesh, solution.mass_mode);

    let su2 = partition.restrict(&stiffness.spmv(solution.u2.values())?);
    let mf = partition.restrict(&mass.spmv(f.values())?);
    let su1 = stiffness.spmv(solution.u1.values())?;
    let mu2 = mass.spmv(solution.u2.values())?;
    let rel = |a: &[f64], b: &[f64]| {
        let diff: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
        norm(&diff) / norm(b).max(f64::MIN_POSITIVE)
    };
    Ok(VariationalResiduals { first: rel(&su2, &mf), second: rel(&su1, &mu2) })
}

// Slack between the solver's residual and the per-equation check: the block
// residuals are normalized by their own right-hand sides rather than the
// joint one, and the bordered multiplier absorbs a tiny constant component.
const VERIFICATION_SLACK: f64 = 1e4;

fn verify_mixed(mesh: &TriMesh, f: &NodalField, solution: &MixedSolution, tol: f64) -> Result<(), SolveError> {
    if norm(f.values()) == 0.0 {
        return Ok(());
    }
    let residuals = variational_residuals(mesh, f, solution)?;
    let limit = tol * VERIFICATION_SLACK;
    for (what, residual) in [("first equation", residuals.first), ("second equation", residuals.second)] {
        if !(residual <= limit) {
            return Err(SolveError::Verification { what, residual, limit });
        }
    }
    Ok(())
}
