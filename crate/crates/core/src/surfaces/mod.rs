//! Smooth reference surfaces, manufactured solutions and mesh generators.
//!
//! Laplacians follow the geometers' convention `Δ = −div grad ≥ 0`.
//!
//! New reference geometries plug in by implementing [`ReferenceSurface`] and
//! [`ExactSolution`]; the error norms and quality checks in
//! [`crate::analysis`] only use those traits.

mod generators;
pub mod harmonics;

use std::f64::consts::PI;

use nalgebra::{Isometry3, Vector3};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::mesh::Point3;

pub use generators::{gen_cap_mesh, gen_icosphere, gen_schwarz_lantern, LanternCoupling, MeshSpec, RefinementFamily};

/// Points closer than this (relative to the radius) to a center or axis have no
/// well-defined closest point.
const REACH_EPS: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SurfaceError {
    #[error("point {0:?} is outside the reach of the surface")]
    OutsideReach([f64; 3]),
    #[error("opening angle must lie in (0, π), got {0}")]
    InvalidAngle(f64),
    #[error("radius and height must be positive, got R = {radius}, H = {height}")]
    InvalidDimension { radius: f64, height: f64 },
    #[error("harmonic degree/order (l = {l}, m = {m}) is invalid; need l ≥ 1 and |m| ≤ l")]
    InvalidDegree { l: u32, m: i32 },
    #[error("cap mesh needs at least 2 rings, got {0}")]
    TooFewRings(usize),
    #[error("lantern needs m ≥ 3 and n ≥ 2, got m = {m}, n = {n}")]
    InvalidCounts { m: usize, n: usize },
    #[error(transparent)]
    Mesh(#[from] crate::mesh::MeshError),
}

/// A smooth surface with a closest-point map.
pub trait ReferenceSurface {
    /// Closest point on the (untrimmed) surface.
    fn closest_point(&self, p: &Point3) -> Result<Point3, SurfaceError>;
    /// Unit outward normal at the closest point of `p`.
    fn normal_at(&self, p: &Point3) -> Result<Vector3<f64>, SurfaceError>;
    fn has_boundary(&self) -> bool;
}

/// A known solution `u` of `Δ²u = f` on a reference surface.
///
/// All methods take points on the surface; off-surface points are evaluated
/// at their closest point.
pub trait ExactSolution: ReferenceSurface {
    fn exact_u(&self, p: &Point3) -> f64;
    /// Tangential surface gradient of `u`.
    fn exact_grad_u(&self, p: &Point3) -> Vector3<f64>;
    fn exact_lap_u(&self, p: &Point3) -> f64;
    fn exact_f(&self, p: &Point3) -> f64;
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum SurfaceKind {
    Sphere { radius: f64 },
    /// The part of the sphere with polar angle `θ ≤ theta0`.
    Cap { radius: f64, theta0: f64 },
    /// Cylinder around the z axis with `|z| ≤ height/2`.
    Cylinder { radius: f64, height: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Solution {
    /// `u = (cos θ − cos θ0)²`
    CapPolynomial { c: f64 },
    /// `u = (z² − a²)²`
    CylinderQuartic { a: f64 },
    /// `Δ²u = Y_l^m`
    Harmonic { l: u32, m: i32 },
}

/// Reference surface together with a manufactured exact solution.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceCase {
    kind: SurfaceKind,
    solution: Solution,
    placement: Isometry3<f64>,
}

/// Spherical cap of radius `radius` and polar opening angle `theta0`, with
/// `u = (cos θ − cos θ0)²`.
///
/// On the unit sphere, with `x = cos θ` and `c = cos θ0`, the Legendre form
/// `Δu = −d/dx[(1 − x²) du/dx]` gives `Δu = 6x² − 4cx − 2` and
/// `Δ²u = 36x² − 8cx − 12`. Both `u` and `∂u/∂θ` vanish at `θ = θ0`.
pub fn cap_case(radius: f64, theta0: f64) -> Result<SurfaceCase, SurfaceError> {
    if !(theta0 > 0.0 && theta0 < PI) {
        return Err(SurfaceError::InvalidAngle(theta0));
    }
    if !(radius > 0.0) {
        return Err(SurfaceError::InvalidDimension { radius, height: f64::NAN });
    }
    Ok(SurfaceCase::new(SurfaceKind::Cap { radius, theta0 }, Solution::CapPolynomial { c: theta0.cos() }))
}

/// Cylinder of radius `radius` and height `height`, with `u = (z² − a²)²`,
/// `a = height/2`. The solution depends on the axial coordinate only, so
/// `Δu = −(12z² − 4a²)` and `Δ²u = 24`.
pub fn cylinder_case(radius: f64, height: f64) -> Result<SurfaceCase, SurfaceError> {
    if !(radius > 0.0 && height > 0.0) {
        return Err(SurfaceError::InvalidDimension { radius, height });
    }
    Ok(SurfaceCase::new(SurfaceKind::Cylinder { radius, height }, Solution::CylinderQuartic { a: height / 2.0 }))
}

/// Closed sphere with `f = Y_l^m`, hence `u = R⁴/(l(l+1))² Y_l^m` and
/// `Δu = R²/(l(l+1)) Y_l^m`. Both have zero mean for `l ≥ 1`.
pub fn sphere_case(radius: f64, l: u32, m: i32) -> Result<SurfaceCase, SurfaceError> {
    if l < 1 || m.unsigned_abs() > l {
        return Err(SurfaceError::InvalidDegree { l, m });
    }
    if !(radius > 0.0) {
        return Err(SurfaceError::InvalidDimension { radius, height: f64::NAN });
    }
    Ok(SurfaceCase::new(SurfaceKind::Sphere { radius }, Solution::Harmonic { l, m }))
}

impl SurfaceCase {
    fn new(kind: SurfaceKind, solution: Solution) -> Self {
        Self { kind, solution, placement: Isometry3::identity() }
    }

    pub fn kind(&self) -> SurfaceKind {
        self.kind
    }

    /// The same case moved rigidly by `motion`.
    pub fn transformed(&self, motion: &Isometry3<f64>) -> Self {
        Self { placement: motion * self.placement, ..self.clone() }
    }

    /// Short human-readable description, e.g. `cap(R=1, theta0=1.0472)`.
    pub fn describe(&self) -> String {
        match self.kind {
            SurfaceKind::Sphere { radius } => match self.solution {
                Solution::Harmonic { l, m } => format!("sphere(R={radius}, l={l}, m={m})"),
                _ => format!("sphere(R={radius})"),
            },
            SurfaceKind::Cap { radius, theta0 } => format!("cap(R={radius}, theta0={theta0:.6})"),
            SurfaceKind::Cylinder { radius, height } => format!("cylinder(R={radius}, H={height})"),
        }
    }

    fn radius(&self) -> f64 {
        match self.kind {
            SurfaceKind::Sphere { radius } | SurfaceKind::Cap { radius, .. } | SurfaceKind::Cylinder { radius, .. } => {
                radius
            }
        }
    }

    fn to_local(&self, p: &Point3) -> Point3 {
        self.placement.inverse_transform_point(&(*p).into()).coords
    }

    fn to_world(&self, p: &Point3) -> Point3 {
        self.placement.transform_point(&(*p).into()).coords
    }

    fn vector_to_world(&self, v: &Vector3<f64>) -> Vector3<f64> {
        self.placement.transform_vector(v)
    }

    fn local_closest(&self, q: &Point3) -> Result<Point3, SurfaceError> {
        let radius = self.radius();
        match self.kind {
            SurfaceKind::Sphere { .. } | SurfaceKind::Cap { .. } => {
                let r = q.norm();
                if r <= REACH_EPS * radius {
                    return Err(SurfaceError::OutsideReach([q.x, q.y, q.z]));
                }
                Ok(q * (radius / r))
            }
            SurfaceKind::Cylinder { height, .. } => {
                let r = q.x.hypot(q.y);
                if r <= REACH_EPS * radius {
                    return Err(SurfaceError::OutsideReach([q.x, q.y, q.z]));
                }
                let half = height / 2.0;
                Ok(Point3::new(q.x * radius / r, q.y * radius / r, q.z.clamp(-half, half)))
            }
        }
    }

    /// Surface point in local coordinates; off-surface points are projected and
    /// points without a closest point fall back to themselves.
    fn local_surface_point(&self, p: &Point3) -> Point3 {
        let q = self.to_local(p);
        self.local_closest(&q).unwrap_or(q)
    }
}

impl ReferenceSurface for SurfaceCase {
    fn closest_point(&self, p: &Point3) -> Result<Point3, SurfaceError> {
        let q = self.local_closest(&self.to_local(p))?;
        Ok(self.to_world(&q))
    }

    fn normal_at(&self, p: &Point3) -> Result<Vector3<f64>, SurfaceError> {
        let q = self.local_closest(&self.to_local(p))?;
        let n = match self.kind {
            SurfaceKind::Sphere { .. } | SurfaceKind::Cap { .. } => q.normalize(),
            SurfaceKind::Cylinder { .. } => Vector3::new(q.x, q.y, 0.0).normalize(),
        };
        Ok(self.vector_to_world(&n))
    }

    fn has_boundary(&self) -> bool {
        !matches!(self.kind, SurfaceKind::Sphere { .. })
    }
}

impl ExactSolution for SurfaceCase {
    fn exact_u(&self, p: &Point3) -> f64 {
        let q = self.local_surface_point(p);
        let radius = self.radius();
        match self.solution {
            Solution::CapPolynomial { c } => {
                let x = q.z / q.norm();
                (x - c).powi(2)
            }
            Solution::CylinderQuartic { a } => (q.z * q.z - a * a).powi(2),
            Solution::Harmonic { l, m } => {
                let ev = (l * (l + 1)) as f64;
                radius.powi(4) / (ev * ev) * harmonics::real_harmonic(l, m, &q)
            }
        }
    }

    fn exact_grad_u(&self, p: &Point3) -> Vector3<f64> {
        let q = self.local_surface_point(p);
        let radius = self.radius();
        let g = match self.solution {
            Solution::CapPolynomial { c } => {
                let unit = q.normalize();
                let x = unit.z;
                // ∇_S (q_z/|q|) = (e_z − x q̂)/R
                (Vector3::z() - unit * x) * (2.0 * (x - c) / radius)
            }
            Solution::CylinderQuartic { a } => Vector3::new(0.0, 0.0, 4.0 * q.z * (q.z * q.z - a * a)),
            Solution::Harmonic { l, m } => {
                let ev = (l * (l + 1)) as f64;
                harmonics::real_harmonic_with_gradient(l, m, &q).1 * (radius.powi(4) / (ev * ev))
            }
        };
        self.vector_to_world(&g)
    }

    fn exact_lap_u(&self, p: &Point3) -> f64 {
        let q = self.local_surface_point(p);
        let radius = self.radius();
        match self.solution {
            Solution::CapPolynomial { c } => {
                let x = q.z / q.norm();
                (6.0 * x * x - 4.0 * c * x - 2.0) / (radius * radius)
            }
            Solution::CylinderQuartic { a } => -(12.0 * q.z * q.z - 4.0 * a * a),
            Solution::Harmonic { l, m } => {
                let ev = (l * (l + 1)) as f64;
                radius * radius / ev * harmonics::real_harmonic(l, m, &q)
            }
        }
    }

    fn exact_f(&self, p: &Point3) -> f64 {
        let q = self.local_surface_point(p);
        let radius = self.radius();
        match self.solution {
            Solution::CapPolynomial { c } => {
                let x = q.z / q.norm();
                (36.0 * x * x - 8.0 * c * x - 12.0) / radius.powi(4)
            }
            Solution::CylinderQuartic { .. } => 24.0,
            Solution::Harmonic { l, m } => harmonics::real_harmonic(l, m, &q),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use nalgebra::{Translation3, UnitQuaternion};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn sph(radius: f64, theta: f64, phi: f64) -> Point3 {
        Point3::new(radius * theta.sin() * phi.cos(), radius * theta.sin() * phi.sin(), radius * theta.cos())
    }

    fn cyl(radius: f64, phi: f64, z: f64) -> Point3 {
        Point3::new(radius * phi.cos(), radius * phi.sin(), z)
    }

    // Sixth-order central differences.
    fn d1(g: &dyn Fn(f64) -> f64, t: f64, h: f64) -> f64 {
        (-g(t - 3.0 * h) + 9.0 * g(t - 2.0 * h) - 45.0 * g(t - h) + 45.0 * g(t + h) - 9.0 * g(t + 2.0 * h)
            + g(t + 3.0 * h))
            / (60.0 * h)
    }

    fn d2(g: &dyn Fn(f64) -> f64, t: f64, h: f64) -> f64 {
        (2.0 * g(t - 3.0 * h) - 27.0 * g(t - 2.0 * h) + 270.0 * g(t - h) - 490.0 * g(t) + 270.0 * g(t + h)
            - 27.0 * g(t + 2.0 * h)
            + 2.0 * g(t + 3.0 * h))
            / (180.0 * h * h)
    }

    /// Finite-difference Laplace–Beltrami in spherical coordinates (θ, φ).
    fn fd_lap_sphere(u: &dyn Fn(f64, f64) -> f64, radius: f64, theta: f64, phi: f64, h: f64) -> f64 {
        let along_theta = |t: f64| u(t, phi);
        let along_phi = |p: f64| u(theta, p);
        let ut = d1(&along_theta, theta, h);
        let utt = d2(&along_theta, theta, h);
        let upp = d2(&along_phi, phi, h);
        -(utt + ut / theta.tan() + upp / theta.sin().powi(2)) / (radius * radius)
    }

    /// Finite-difference Laplacian in the flat (φ, z) chart of a cylinder.
    fn fd_lap_cylinder(u: &dyn Fn(f64, f64) -> f64, radius: f64, phi: f64, z: f64, h: f64) -> f64 {
        let along_z = |t: f64| u(phi, t);
        let along_phi = |p: f64| u(p, z);
        -(d2(&along_z, z, h) + d2(&along_phi, phi, h) / (radius * radius))
    }

    fn check_sphere_family(case: &SurfaceCase, radius: f64, theta_max: f64) {
        let u = |t: f64, p: f64| case.exact_u(&sph(radius, t, p));
        let h = 2e-3;
        for &theta in &[0.3, 0.6, 0.9 * theta_max] {
            for &phi in &[0.1, 1.3, 2.9] {
                let x = sph(radius, theta, phi);
                let lap = fd_lap_sphere(&u, radius, theta, phi, h);
                assert_abs_diff_eq!(lap, case.exact_lap_u(&x), epsilon = 1e-6);
                let lap_u = |t: f64, p: f64| fd_lap_sphere(&u, radius, t, p, h);
                let bilap = fd_lap_sphere(&lap_u, radius, theta, phi, 1e-2);
                assert_abs_diff_eq!(bilap, case.exact_f(&x), epsilon = 1e-4 * case.exact_f(&x).abs().max(1.0));
            }
        }
    }

    #[test]
    fn cap_formulas_match_finite_differences() {
        check_sphere_family(&cap_case(1.0, PI / 3.0).unwrap(), 1.0, PI / 3.0);
        check_sphere_family(&cap_case(1.5, 2.0).unwrap(), 1.5, 2.0);
    }

    #[test]
    fn harmonic_formulas_match_finite_differences() {
        for (l, m) in [(1, 0), (2, 0), (2, 1), (3, -2)] {
            check_sphere_family(&sphere_case(1.3, l, m).unwrap(), 1.3, 2.5);
        }
    }

    #[test]
    fn cylinder_formulas_match_finite_differences() {
        let (radius, height) = (0.8, 2.0);
        let case = cylinder_case(radius, height).unwrap();
        let u = |p: f64, z: f64| case.exact_u(&cyl(radius, p, z));
        for &z in &[-0.7, 0.0, 0.4] {
            let x = cyl(radius, 1.1, z);
            let lap = fd_lap_cylinder(&u, radius, 1.1, z, 1e-3);
            assert_abs_diff_eq!(lap, case.exact_lap_u(&x), epsilon = 1e-6);
            let lap_u = |p: f64, t: f64| fd_lap_cylinder(&u, radius, p, t, 1e-3);
            assert_abs_diff_eq!(fd_lap_cylinder(&lap_u, radius, 1.1, z, 1e-2), 24.0, epsilon = 1e-4);
        }
    }

    #[test]
    fn cap_point_values() {
        let case = cap_case(1.0, PI / 3.0).unwrap();
        let pole = Point3::new(0.0, 0.0, 1.0);
        assert_abs_diff_eq!(case.exact_u(&pole), 0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(case.exact_f(&pole), 20.0, epsilon = 1e-13);
        let rim = sph(1.0, PI / 3.0, 0.4);
        assert_abs_diff_eq!(case.exact_u(&rim), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(case.exact_f(&rim), -5.0, epsilon = 1e-13);
        assert_abs_diff_eq!(case.exact_grad_u(&rim).norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn cylinder_point_values() {
        let case = cylinder_case(1.0, 2.0).unwrap();
        let mid = Point3::new(1.0, 0.0, 0.0);
        assert_eq!(case.exact_u(&mid), 1.0);
        assert_eq!(case.exact_lap_u(&mid), 4.0);
        assert_eq!(case.exact_f(&Point3::new(0.0, -1.0, 0.77)), 24.0);
        for z in [-1.0, 1.0] {
            let p = Point3::new(0.0, 1.0, z);
            assert_eq!(case.exact_u(&p), 0.0);
            assert_eq!(case.exact_grad_u(&p).norm(), 0.0);
        }
    }

    #[test]
    fn sphere_point_values() {
        let case = sphere_case(1.0, 2, 0).unwrap();
        let p = sph(1.0, 0.7, 0.2);
        let y = (3.0 * p.z * p.z - 1.0) / 2.0;
        assert_abs_diff_eq!(case.exact_u(&p), y / 36.0, epsilon = 1e-15);
        assert_abs_diff_eq!(case.exact_lap_u(&p), y / 6.0, epsilon = 1e-15);
        let l1 = sphere_case(1.0, 1, 0).unwrap();
        assert_abs_diff_eq!(l1.exact_u(&p), p.z / 4.0, epsilon = 1e-15);
        assert_abs_diff_eq!(4.0 * l1.exact_u(&p), l1.exact_f(&p), epsilon = 1e-15);
    }

    #[test]
    fn y20_has_zero_mean() {
        // ∫ P2(cos θ) sin θ dθ over [0, π] by composite Simpson
        let n = 2000;
        let h = PI / n as f64;
        let g = |t: f64| (3.0 * t.cos().powi(2) - 1.0) / 2.0 * t.sin();
        let s: f64 = (0..=n)
            .map(|i| {
                let w = if i == 0 || i == n { 1.0 } else if i % 2 == 1 { 4.0 } else { 2.0 };
                w * g(i as f64 * h)
            })
            .sum::<f64>()
            * h
            / 3.0;
        assert!(s.abs() < 1e-12);
    }

    #[test]
    fn boundary_conditions_hold_at_samples() {
        let cap = cap_case(1.2, 1.1).unwrap();
        let lantern = cylinder_case(0.9, 3.0).unwrap();
        for k in 0..100 {
            let phi = 2.0 * PI * k as f64 / 100.0;
            let p = sph(1.2, 1.1, phi);
            assert!(cap.exact_u(&p).abs() <= 1e-10);
            assert!(cap.exact_grad_u(&p).norm() <= 1e-10);
            for z in [-1.5, 1.5] {
                let q = cyl(0.9, phi, z);
                assert!(lantern.exact_u(&q).abs() <= 1e-10);
                assert!(lantern.exact_grad_u(&q).norm() <= 1e-10);
            }
        }
    }

    #[test]
    fn closest_point_examples() {
        let sphere = sphere_case(1.0, 2, 0).unwrap();
        assert_eq!(sphere.closest_point(&Point3::new(0.0, 0.0, 2.0)).unwrap(), Point3::new(0.0, 0.0, 1.0));
        let on = sph(1.0, 0.4, 2.0);
        assert_abs_diff_eq!(sphere.closest_point(&on).unwrap(), on, epsilon = 1e-15);
        assert!(matches!(sphere.closest_point(&Point3::zeros()), Err(SurfaceError::OutsideReach(_))));
        let cylinder = cylinder_case(1.0, 2.0).unwrap();
        assert_eq!(cylinder.closest_point(&Point3::new(2.0, 0.0, 0.3)).unwrap(), Point3::new(1.0, 0.0, 0.3));
        assert_eq!(cylinder.closest_point(&Point3::new(0.5, 0.0, 3.0)).unwrap(), Point3::new(1.0, 0.0, 1.0));
        assert!(cylinder.closest_point(&Point3::new(0.0, 0.0, 0.5)).is_err());
    }

    #[test]
    fn closest_point_is_idempotent() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let motion = Isometry3::from_parts(
            Translation3::new(0.3, -1.0, 2.0),
            UnitQuaternion::from_euler_angles(0.3, -0.2, 1.1),
        );
        let cases = [
            sphere_case(2.0, 3, 1).unwrap(),
            cap_case(1.0, 1.0).unwrap(),
            cylinder_case(1.0, 2.0).unwrap(),
            cylinder_case(0.5, 1.0).unwrap().transformed(&motion),
        ];
        for case in &cases {
            for _ in 0..1000 {
                let p = Point3::new(rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0));
                let Ok(q) = case.closest_point(&p) else { continue };
                let q2 = case.closest_point(&q).unwrap();
                assert!((q - q2).norm() <= 1e-12 * q.norm().max(1.0));
            }
        }
    }

    #[test]
    fn transformed_case_is_equivariant() {
        let motion = Isometry3::from_parts(
            Translation3::new(1.0, 2.0, -0.5),
            UnitQuaternion::from_euler_angles(0.4, 1.0, -0.7),
        );
        let case = sphere_case(1.0, 2, 1).unwrap();
        let moved = case.transformed(&motion);
        let p = sph(1.0, 0.8, 0.3);
        let mp = motion.transform_point(&p.into()).coords;
        assert_abs_diff_eq!(moved.exact_u(&mp), case.exact_u(&p), epsilon = 1e-14);
        assert_abs_diff_eq!(moved.exact_grad_u(&mp), motion.transform_vector(&case.exact_grad_u(&p)), epsilon = 1e-14);
        assert_abs_diff_eq!(moved.normal_at(&mp).unwrap(), motion.transform_vector(&case.normal_at(&p).unwrap()), epsilon = 1e-14);
    }

    #[test]
    fn constructors_validate() {
        assert!(matches!(cap_case(1.0, 0.0), Err(SurfaceError::InvalidAngle(_))));
        assert!(matches!(cap_case(1.0, PI), Err(SurfaceError::InvalidAngle(_))));
        assert!(matches!(cylinder_case(1.0, -1.0), Err(SurfaceError::InvalidDimension { .. })));
        assert!(matches!(sphere_case(1.0, 0, 0), Err(SurfaceError::InvalidDegree { .. })));
        assert!(matches!(sphere_case(1.0, 2, 3), Err(SurfaceError::InvalidDegree { .. })));
    }
}
