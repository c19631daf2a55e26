//! Error norms measured on the mesh against the exact solution pulled back
//! through the closest-point map.

use nalgebra::Vector3;

use super::quadrature::{rule, QuadOrder};
use super::AnalysisError;
use crate::fem::{face_gradient, NodalField};
use crate::mesh::{Point3, TriMesh};
use crate::surfaces::{ExactSolution, ReferenceSurface};

/// `‖u_h − u∘Φ‖_{L²}` on the mesh.
pub fn l2_error<C: ExactSolution + ?Sized>(
    mesh: &TriMesh,
    u_h: &NodalField,
    case: &C,
    order: QuadOrder,
) -> Result<f64, AnalysisError> {
    l2_error_against(mesh, u_h, case, |p| case.exact_u(p), order)
}

/// `‖u_h − (Δu)∘Φ‖_{L²}`, for the `u2` component.
pub fn l2_error_laplacian<C: ExactSolution + ?Sized>(
    mesh: &TriMesh,
    u_h: &NodalField,
    case: &C,
    order: QuadOrder,
) -> Result<f64, AnalysisError> {
    l2_error_against(mesh, u_h, case, |p| case.exact_lap_u(p), order)
}

/// L² distance between `u_h` and `exact ∘ Φ`, with `Φ` the closest-point map of `surface`.
pub fn l2_error_against<S: ReferenceSurface + ?Sized>(
    mesh: &TriMesh,
    u_h: &NodalField,
    surface: &S,
    exact: impl Fn(&Point3) -> f64,
    order: QuadOrder,
) -> Result<f64, AnalysisError> {
    u_h.check_mesh(mesh)?;
    let values = u_h.values();
    let mut total = 0.0;
    for (f, face) in mesh.faces().iter().enumerate() {
        let p = mesh.face_points(f);
        let area = mesh.face_area(f);
        let nodal = face.map(|i| values[i]);
        let mut local = 0.0;
        for (bary, w) in rule(order) {
            let x = p[0] * bary[0] + p[1] * bary[1] + p[2] * bary[2];
            let uh = nodal[0] * bary[0] + nodal[1] * bary[1] + nodal[2] * bary[2];
            let diff = uh - exact(&surface.closest_point(&x)?);
            local += w * diff * diff;
        }
        total += area * local;
    }
    Ok(total.sqrt())
}

/// `‖∇u_h − P_T ∇u∘Φ‖_{L²}`: the per-face gradient against the exact
/// surface gradient projected onto the face plane.
pub fn h1_error<C: ExactSolution + ?Sized>(
    mesh: &TriMesh,
    u_h: &NodalField,
    case: &C,
    order: QuadOrder,
) -> Result<f64, AnalysisError> {
    u_h.check_mesh(mesh)?;
    let values = u_h.values();
    let mut total = 0.0;
    for (f, face) in mesh.faces().iter().enumerate() {
        let p = mesh.face_points(f);
        let geo = mesh.triangle_geometry(f);
        let grad_h = face_gradient(&p, face.map(|i| values[i]));
        let n = geo.unit_normal;
        let mut local = 0.0;
        for (bary, w) in rule(order) {
            let x = p[0] * bary[0] + p[1] * bary[1] + p[2] * bary[2];
            let g: Vector3<f64> = case.exact_grad_u(&case.closest_point(&x)?);
            let tangential = g - n * g.dot(&n);
            local += w * (grad_h - tangential).norm_squared();
        }
        total += geo.area * local;
    }
    Ok(total.sqrt())
}
