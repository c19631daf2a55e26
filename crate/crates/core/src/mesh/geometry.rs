use super::Point3;
use nalgebra::Vector3;

/// Per-triangle quantities used by assembly and shape-regularity checks.
///
/// Edge `i` is the edge opposite corner `i`; the cotangent at corner `i` is
/// taken between the two edges incident to that corner.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TriangleGeometry {
    pub area: f64,
    pub edge_lengths: [f64; 3],
    pub corner_cotangents: [f64; 3],
    pub inradius: f64,
    pub circumradius: f64,
    pub unit_normal: Vector3<f64>,
}

impl TriangleGeometry {
    pub fn from_points(p: &[Point3; 3]) -> Self {
        let cross = (p[1] - p[0]).cross(&(p[2] - p[0]));
        let double_area = cross.norm();
        let area = 0.5 * double_area;
        let edge_lengths = [
            (p[2] - p[1]).norm(),
            (p[0] - p[2]).norm(),
            (p[1] - p[0]).norm(),
        ];
        let corner_cotangents = [0, 1, 2].map(|i| {
            let e1 = p[(i + 1) % 3] - p[i];
            let e2 = p[(i + 2) % 3] - p[i];
            e1.dot(&e2) / double_area
        });
        let perimeter: f64 = edge_lengths.iter().sum();
        let [a, b, c] = edge_lengths;
        Self {
            area,
            edge_lengths,
            corner_cotangents,
            inradius: double_area / perimeter,
            circumradius: a * b * c / (4.0 * area),
            unit_normal: cross / double_area,
        }
    }

    /// Longest edge of this triangle.
    pub fn diameter(&self) -> f64 {
        self.edge_lengths.iter().copied().fold(0.0, f64::max)
    }

    /// Circumradius over inradius, halved; equals 1 for an equilateral triangle.
    pub fn aspect_ratio(&self) -> f64 {
        self.circumradius / (2.0 * self.inradius)
    }
}
