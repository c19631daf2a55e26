use serde::{Deserialize, Serialize};

use super::quadrature::{rule, QuadOrder};
use super::AnalysisError;
use crate::mesh::TriMesh;
use crate::surfaces::ReferenceSurface;

/// Mesh-quality constants of one mesh relative to its reference surface.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QualityRecord {
    /// `min_T inradius(T) / diam(T)`
    pub kappa_min: f64,
    /// `max_T circumradius(T) / diam(T)`
    pub k_max: f64,
    /// Largest distance to the surface over quadrature points.
    pub max_distance: f64,
    /// Largest angle (radians, in `[0, π/2]`) between a face normal and the
    /// surface normal at the closest point of one of its quadrature points.
    pub max_normal_angle: f64,
}

/// Shape-regularity extrema `(kappa_min, k_max)`.
pub fn shape_regularity(mesh: &TriMesh) -> (f64, f64) {
    (0..mesh.face_count()).fold((f64::INFINITY, 0.0f64), |(kappa, big_k), f| {
        let g = mesh.triangle_geometry(f);
        let diam = g.diameter();
        (kappa.min(g.inradius / diam), big_k.max(g.circumradius / diam))
    })
}

pub fn certify_quality<S: ReferenceSurface + ?Sized>(mesh: &TriMesh, surface: &S) -> Result<QualityRecord, AnalysisError> {
    let (kappa_min, k_max) = shape_regularity(mesh);
    let mut max_distance = 0.0f64;
    let mut max_normal_angle = 0.0f64;
    for f in 0..mesh.face_count() {
        let p = mesh.face_points(f);
        let n = mesh.triangle_geometry(f).unit_normal;
        for (bary, _) in rule(QuadOrder::Four) {
            let x = p[0] * bary[0] + p[1] * bary[1] + p[2] * bary[2];
            let q = surface.closest_point(&x)?;
            max_distance = max_distance.max((x - q).norm());
            let ns = surface.normal_at(&q)?;
            let angle = n.cross(&ns).norm().atan2(n.dot(&ns).abs());
            max_normal_angle = max_normal_angle.max(angle);
        }
    }
    Ok(QualityRecord { kappa_min, k_max, max_distance, max_normal_angle })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::Point3;
    use crate::surfaces::{cylinder_case, gen_icosphere, gen_schwarz_lantern, sphere_case};
    use nalgebra::{Isometry3, Translation3, UnitQuaternion};

    #[test]
    fn equilateral_kappa() {
        let s = 3f64.sqrt() / 2.0;
        let mesh = TriMesh::new(
            vec![
                Point3::new(0.0, 0.0, 0.0),
                Point3::new(1.0, 0.0, 0.0),
                Point3::new(0.5, s, 0.0),
                Point3::new(1.5, s, 0.0),
            ],
            vec![[0, 1, 2], [1, 3, 2]],
        )
        .unwrap();
        let (kappa, big_k) = shape_regularity(&mesh);
        assert!((kappa - 1.0 / (2.0 * 3f64.sqrt())).abs() < 1e-12);
        assert!((big_k - 1.0 / 3f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn icosphere_distance_and_normals_converge() {
        let case = sphere_case(1.0, 2, 0).unwrap();
        let records: Vec<_> = (1..=4)
            .map(|k| {
                let mesh = gen_icosphere(k, 1.0).unwrap();
                (mesh.max_edge_length(), certify_quality(&mesh, &case).unwrap())
            })
            .collect();
        for w in records.windows(2) {
            let (h0, q0) = w[0];
            let (h1, q1) = w[1];
            let gamma = (q1.max_distance / q0.max_distance).ln() / (h1 / h0).ln();
            let eps = (q1.max_normal_angle / q0.max_normal_angle).ln() / (h1 / h0).ln();
            assert!(gamma > 1.8 && eps > 0.9, "gamma {gamma}, eps {eps}");
            assert!(q1.kappa_min > 0.2);
        }
    }

    #[test]
    fn invariant_under_rigid_motion() {
        let case = cylinder_case(1.0, 2.0).unwrap();
        let mesh = gen_schwarz_lantern(12, 6, 1.0, 2.0).unwrap();
        let motion = Isometry3::from_parts(
            Translation3::new(0.5, -2.0, 1.0),
            UnitQuaternion::from_euler_angles(0.2, 0.9, -0.4),
        );
        let moved_mesh = mesh.map_vertices(|p| motion.transform_point(&(*p).into()).coords).unwrap();
        let a = certify_quality(&mesh, &case).unwrap();
        let b = certify_quality(&moved_mesh, &case.transformed(&motion)).unwrap();
        assert!((a.kappa_min - b.kappa_min).abs() < 1e-10);
        assert!((a.k_max - b.k_max).abs() < 1e-10);
        assert!((a.max_distance - b.max_distance).abs() < 1e-10);
        assert!((a.max_normal_angle - b.max_normal_angle).abs() < 1e-10);
    }
}
