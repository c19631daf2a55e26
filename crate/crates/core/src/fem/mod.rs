//! Piecewise-linear Lagrange finite elements on a [`TriMesh`].
//!
//! Assembly visits faces in mesh order and emits triplets in a fixed order,
//! so assembled matrices are bit-reproducible.

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{self, LinalgError, SolveReport, SparseMatrix};
use crate::mesh::{MeshId, Point3, TriMesh};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FemError {
    #[error("field has {found} values but the mesh has {expected} vertices")]
    LengthMismatch { expected: usize, found: usize },
    #[error("field belongs to a different mesh")]
    MeshMismatch,
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MassMode {
    /// Exact P1 Gram matrix.
    #[default]
    Consistent,
    /// Row-sum diagonalization of the consistent matrix.
    Lumped,
}

/// One value per mesh vertex, tagged with the mesh it was built for.
#[derive(Debug, Clone, PartialEq)]
pub struct NodalField {
    values: Vec<f64>,
    mesh: MeshId,
}

impl NodalField {
    pub fn new(mesh: &TriMesh, values: Vec<f64>) -> Result<Self, FemError> {
        if values.len() != mesh.vertex_count() {
            return Err(FemError::LengthMismatch { expected: mesh.vertex_count(), found: values.len() });
        }
        Ok(Self { values, mesh: mesh.id() })
    }

    pub fn zeros(mesh: &TriMesh) -> Self {
        Self { values: vec![0.0; mesh.vertex_count()], mesh: mesh.id() }
    }

    pub fn constant(mesh: &TriMesh, value: f64) -> Self {
        Self { values: vec![value; mesh.vertex_count()], mesh: mesh.id() }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn mesh_id(&self) -> MeshId {
        self.mesh
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Errors unless this field was built for `mesh`.
    pub fn check_mesh(&self, mesh: &TriMesh) -> Result<(), FemError> {
        if self.mesh != mesh.id() {
            return Err(FemError::MeshMismatch);
        }
        Ok(())
    }
}

/// Split of the vertices into interior and boundary degrees of freedom.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DofPartition {
    pub interior: Vec<usize>,
    pub boundary: Vec<usize>,
    /// `Some(k)` if vertex `i` is the `k`-th interior dof.
    pub full_to_interior: Vec<Option<usize>>,
}

impl DofPartition {
    /// Scatters interior values back to a full-length vector, zero on the boundary.
    pub fn extend_by_zero(&self, interior_values: &[f64]) -> Vec<f64> {
        let mut full = vec![0.0; self.full_to_interior.len()];
        for (&v, &x) in self.interior.iter().zip(interior_values) {
            full[v] = x;
        }
        full
    }

    pub fn restrict(&self, full: &[f64]) -> Vec<f64> {
        self.interior.iter().map(|&v| full[v]).collect()
    }
}

pub fn partition_dofs(mesh: &TriMesh) -> DofPartition {
    let mut interior = Vec::new();
    let mut boundary = Vec::new();
    let mut full_to_interior = vec![None; mesh.vertex_count()];
    for (v, slot) in full_to_interior.iter_mut().enumerate() {
        if mesh.is_boundary_vertex(v) {
            boundary.push(v);
        } else {
            *slot = Some(interior.len());
            interior.push(v);
        }
    }
    DofPartition { interior, boundary, full_to_interior }
}

/// Cotangent stiffness matrix `S_ij = ∫ ∇φ_i·∇φ_j`.
pub fn assemble_stiffness(mesh: &TriMesh) -> SparseMatrix {
    let mut triplets = Vec::with_capacity(12 * mesh.face_count());
    for (f, face) in mesh.faces().iter().enumerate() {
        let geo = mesh.triangle_geometry(f);
        for corner in 0..3 {
            // the cotangent at a corner weights the opposite edge
            let w = 0.5 * geo.corner_cotangents[corner];
            let a = face[(corner + 1) % 3];
            let b = face[(corner + 2) % 3];
            triplets.extend([(a, a, w), (b, b, w), (a, b, -w), (b, a, -w)]);
        }
    }
    let n = mesh.vertex_count();
    SparseMatrix::from_triplets(n, n, &triplets).expect("face indices are validated")
}

pub fn assemble_mass(mesh: &TriMesh, mode: MassMode) -> SparseMatrix {
    let n = mesh.vertex_count();
    let mut triplets = Vec::with_capacity(9 * mesh.face_count());
    for (f, face) in mesh.faces().iter().enumerate() {
        let area = mesh.face_area(f);
        match mode {
            MassMode::Consistent => {
                for i in 0..3 {
                    for j in 0..3 {
                        let w = if i == j { area / 6.0 } else { area / 12.0 };
                        triplets.push((face[i], face[j], w));
                    }
                }
            }
            MassMode::Lumped => {
                // row sum of the consistent block: area/6 + 2·area/12
                for &v in face {
                    triplets.push((v, v, area / 3.0));
                }
            }
        }
    }
    SparseMatrix::from_triplets(n, n, &triplets).expect("face indices are validated")
}

pub fn interpolate(mesh: &TriMesh, f: impl Fn(&Point3) -> f64) -> NodalField {
    NodalField { values: mesh.vertices().iter().map(f).collect(), mesh: mesh.id() }
}

/// Constant surface gradient of the linear interpolant of `u` on one face.
pub fn p1_gradient(mesh: &TriMesh, u: &NodalField, face: usize) -> Result<Vector3<f64>, FemError> {
    u.check_mesh(mesh)?;
    Ok(face_gradient(&mesh.face_points(face), mesh.faces()[face].map(|i| u.values[i])))
}

/// Gradient of the linear function on the triangle `p` taking values `u` at its corners.
pub(crate) fn face_gradient(p: &[Point3; 3], u: [f64; 3]) -> Vector3<f64> {
    let cross = (p[1] - p[0]).cross(&(p[2] - p[0]));
    let double_area_sq = cross.norm_squared();
    // ∇φ_i = n × (p_k - p_j) / 2A with (i, j, k) cyclic
    (0..3)
        .map(|i| cross.cross(&(p[(i + 2) % 3] - p[(i + 1) % 3])) * (u[i] / double_area_sq))
        .sum()
}

/// Discrete Laplacian `v2 = M⁻¹ S u1` with the consistent mass matrix.
///
/// `u1` is extended by zero: its values on boundary vertices are ignored. On
/// closed meshes every vertex is a degree of freedom.
pub fn discrete_laplacian(mesh: &TriMesh, u1: &NodalField) -> Result<(NodalField, SolveReport), FemError> {
    discrete_laplacian_with(mesh, u1, linalg::DEFAULT_TOL)
}

pub fn discrete_laplacian_with(
    mesh: &TriMesh,
    u1: &NodalField,
    tol: f64,
) -> Result<(NodalField, SolveReport), FemError> {
    u1.check_mesh(mesh)?;
    let stiffness = assemble_stiffness(mesh);
    let mass = assemble_mass(mesh, MassMode::Consistent);
    let mut restricted = u1.values.clone();
    for &b in mesh.boundary_vertices() {
        restricted[b] = 0.0;
    }
    let rhs = stiffness.spmv(&restricted)?;
    let (v2, report) = linalg::solve_spd(&mass, &rhs, tol)?;
    Ok((NodalField { values: v2, mesh: mesh.id() }, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surfaces;
    use approx::assert_abs_diff_eq;
    use nalgebra::DMatrix;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn right_triangle() -> TriMesh {
        TriMesh::new(
            vec![Point3::new(0.0, 0.0, 0.0), Point3::new(1.0, 0.0, 0.0), Point3::new(0.0, 1.0, 0.0)],
            vec![[0, 1, 2]],
        )
        .unwrap()
    }

    /// Flat `k × k` grid on the unit square, each cell split along its diagonal.
    pub(crate) fn unit_square(k: usize) -> TriMesh {
        let mut vertices = Vec::new();
        for j in 0..=k {
            for i in 0..=k {
                vertices.push(Point3::new(i as f64 / k as f64, j as f64 / k as f64, 0.0));
            }
        }
        let idx = |i: usize, j: usize| j * (k + 1) + i;
        let mut faces = Vec::new();
        for j in 0..k {
            for i in 0..k {
                faces.push([idx(i, j), idx(i + 1, j), idx(i + 1, j + 1)]);
                faces.push([idx(i, j), idx(i + 1, j + 1), idx(i, j + 1)]);
            }
        }
        TriMesh::new(vertices, faces).unwrap()
    }

    #[test]
    fn right_triangle_stiffness() {
        let s = assemble_stiffness(&right_triangle()).to_dense();
        let want = nalgebra::dmatrix![1.0, -0.5, -0.5; -0.5, 0.5, 0.0; -0.5, 0.0, 0.5];
        assert!((s - want).amax() < 1e-15);
    }

    #[test]
    fn right_triangle_mass() {
        let mesh = right_triangle();
        let m = assemble_mass(&mesh, MassMode::Consistent).to_dense();
        let want = nalgebra::dmatrix![2.0, 1.0, 1.0; 1.0, 2.0, 1.0; 1.0, 1.0, 2.0] / 24.0;
        assert!((m - want).amax() < 1e-16);
        let lumped = assemble_mass(&mesh, MassMode::Lumped).to_dense();
        assert!((lumped - DMatrix::identity(3, 3) / 6.0).amax() < 1e-16);
    }

    #[test]
    fn consistent_and_lumped_row_sums_agree() {
        let mesh = surfaces::gen_icosphere(2, 1.0).unwrap();
        let c = assemble_mass(&mesh, MassMode::Consistent);
        let l = assemble_mass(&mesh, MassMode::Lumped);
        let ones = vec![1.0; mesh.vertex_count()];
        for (a, b) in c.spmv(&ones).unwrap().iter().zip(l.spmv(&ones).unwrap()) {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-16);
        }
        assert_abs_diff_eq!(c.total(), mesh.total_area(), epsilon = 1e-12 * mesh.total_area());
    }

    #[test]
    fn linear_field_energy_on_flat_square() {
        let mesh = unit_square(7);
        let u = interpolate(&mesh, |p| p.x);
        let energy = assemble_stiffness(&mesh).bilinear(u.values(), u.values()).unwrap();
        assert_abs_diff_eq!(energy, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn partitions() {
        let tri = partition_dofs(&right_triangle());
        assert!(tri.interior.is_empty());
        assert_eq!(tri.boundary, vec![0, 1, 2]);
        let sphere = partition_dofs(&surfaces::gen_icosphere(1, 1.0).unwrap());
        assert!(sphere.boundary.is_empty());
        assert_eq!(sphere.interior.len(), 42);
        let sq = partition_dofs(&unit_square(4));
        assert_eq!(sq.interior.len(), 9);
        assert_eq!(sq.full_to_interior[6], Some(0));
        assert_eq!(sq.extend_by_zero(&sq.restrict(&[1.0; 25])).iter().sum::<f64>(), 9.0);
    }

    #[test]
    fn interpolation_examples() {
        let mesh = right_triangle();
        assert_eq!(interpolate(&mesh, |_| 1.0).values(), &[1.0, 1.0, 1.0]);
        assert_eq!(interpolate(&mesh, |p| p.x).values(), &[0.0, 1.0, 0.0]);
        let sphere = surfaces::gen_icosphere(2, 1.0).unwrap();
        let y20 = interpolate(&sphere, |p| (3.0 * p.z * p.z - 1.0) / 2.0);
        assert!(y20.values().iter().all(|&v| (-0.5 - 1e-12..=1.0 + 1e-12).contains(&v)));
    }

    #[test]
    fn gradient_examples() {
        let mesh = right_triangle();
        let c = NodalField::constant(&mesh, 3.0);
        assert_eq!(p1_gradient(&mesh, &c, 0).unwrap(), Vector3::zeros());
        let x = interpolate(&mesh, |p| p.x);
        assert_abs_diff_eq!(p1_gradient(&mesh, &x, 0).unwrap(), Vector3::x(), epsilon = 1e-15);
        let other = NodalField::zeros(&unit_square(1));
        assert_eq!(p1_gradient(&mesh, &other, 0), Err(FemError::MeshMismatch));
    }

    #[test]
    fn gradient_reproduces_edge_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let p = [0, 1, 2].map(|_| Point3::new(rng.random(), rng.random(), rng.random()));
            let u = [rng.random(), rng.random(), rng.random()];
            let geo = crate::mesh::TriangleGeometry::from_points(&p);
            if geo.area < 1e-3 {
                continue;
            }
            let g = face_gradient(&p, u);
            assert!(g.dot(&geo.unit_normal).abs() < 1e-12);
            for (i, j) in [(0, 1), (1, 2), (2, 0)] {
                assert!((g.dot(&(p[j] - p[i])) - (u[j] - u[i])).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn zero_field_has_zero_laplacian() {
        let mesh = surfaces::gen_icosphere(1, 1.0).unwrap();
        let (v2, _) = discrete_laplacian(&mesh, &NodalField::zeros(&mesh)).unwrap();
        assert!(v2.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn discrete_laplacian_defining_relation() {
        let mesh = unit_square(6);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let u1 = interpolate(&mesh, |p| (3.0 * p.x).sin() * p.y * (1.0 - p.y) * p.x * (1.0 - p.x));
        let (v2, _) = discrete_laplacian(&mesh, &u1).unwrap();
        let s = assemble_stiffness(&mesh);
        let m = assemble_mass(&mesh, MassMode::Consistent);
        for _ in 0..10 {
            let eta: Vec<f64> = (0..mesh.vertex_count()).map(|_| rng.random_range(-1.0..1.0)).collect();
            let lhs = m.bilinear(v2.values(), &eta).unwrap();
            let rhs = s.bilinear(u1.values(), &eta).unwrap();
            assert!((lhs - rhs).abs() <= 1e-9 * rhs.abs().max(1.0));
        }
    }

    #[test]
    fn flat_eigenfunction_away_from_the_boundary() {
        // v2 = M⁻¹ S u1 carries a boundary layer (the normal derivative of u1
        // does not vanish on the square), so compare on the inner quarter only.
        let mut errors = Vec::new();
        for k in [8, 16, 32] {
            let mesh = unit_square(k);
            let exact = |p: &Point3| (std::f64::consts::PI * p.x).sin() * (std::f64::consts::PI * p.y).sin();
            let u1 = interpolate(&mesh, exact);
            let (v2, _) = discrete_laplacian(&mesh, &u1).unwrap();
            let pi2 = 2.0 * std::f64::consts::PI.powi(2);
            let (mut num, mut den) = (0.0, 0.0);
            for (i, p) in mesh.vertices().iter().enumerate() {
                if (p.x - 0.5).abs() <= 0.25 && (p.y - 0.5).abs() <= 0.25 {
                    num += (v2.values()[i] - pi2 * u1.values()[i]).powi(2);
                    den += (pi2 * u1.values()[i]).powi(2);
                }
            }
            errors.push((num / den).sqrt());
        }
        assert!(errors[1] < 0.5 * errors[0] && errors[2] < 0.5 * errors[1], "{errors:?}");
    }
}
