use std::collections::HashMap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{cap_case, cylinder_case, sphere_case, SurfaceCase, SurfaceError};
use crate::mesh::{Point3, TriMesh};

fn spherical(radius: f64, theta: f64, phi: f64) -> Point3 {
    Point3::new(radius * theta.sin() * phi.cos(), radius * theta.sin() * phi.sin(), radius * theta.cos())
}

/// Concentric-ring triangulation of the spherical cap `θ ≤ theta0`.
///
/// Ring `j` (`1 ≤ j ≤ rings`) sits at `θ = theta0·j/rings` and carries `6j`
/// vertices; the pole is vertex 0. Neighbouring rings are stitched by walking
/// both in angle order. The outermost ring lies exactly on the boundary
/// circle, so boundary edges are chords of it.
pub fn gen_cap_mesh(radius: f64, theta0: f64, rings: usize) -> Result<TriMesh, SurfaceError> {
    if rings < 2 {
        return Err(SurfaceError::TooFewRings(rings));
    }
    if !(theta0 > 0.0 && theta0 < PI) {
        return Err(SurfaceError::InvalidAngle(theta0));
    }
    let mut vertices = vec![Point3::new(0.0, 0.0, radius)];
    let mut ring_start = vec![0usize];
    for j in 1..=rings {
        ring_start.push(vertices.len());
        let theta = theta0 * j as f64 / rings as f64;
        let count = 6 * j;
        for k in 0..count {
            vertices.push(spherical(radius, theta, 2.0 * PI * k as f64 / count as f64));
        }
    }

    let mut faces = Vec::new();
    for k in 0..6 {
        faces.push([0, ring_start[1] + k, ring_start[1] + (k + 1) % 6]);
    }
    for j in 2..=rings {
        let (inner, outer) = (ring_start[j - 1], ring_start[j]);
        let (ni, no) = (6 * (j - 1), 6 * j);
        let (mut a, mut b) = (0usize, 0usize);
        while a < ni || b < no {
            // advance on whichever ring has the next vertex at the smaller angle
            let next_inner = (a + 1) as f64 / ni as f64;
            let next_outer = (b + 1) as f64 / no as f64;
            if b == no || (a < ni && next_inner < next_outer) {
                faces.push([inner + a, outer + b % no, inner + (a + 1) % ni]);
                a += 1;
            } else {
                faces.push([outer + b, outer + (b + 1) % no, inner + a % ni]);
                b += 1;
            }
        }
    }
    Ok(TriMesh::new(vertices, faces)?)
}

const ICOSAHEDRON_FACES: [[usize; 3]; 20] = [
    [0, 11, 5],
    [0, 5, 1],
    [0, 1, 7],
    [0, 7, 10],
    [0, 10, 11],
    [1, 5, 9],
    [5, 11, 4],
    [11, 10, 2],
    [10, 7, 6],
    [7, 1, 8],
    [3, 9, 4],
    [3, 4, 2],
    [3, 2, 6],
    [3, 6, 8],
    [3, 8, 9],
    [4, 9, 5],
    [2, 4, 11],
    [6, 2, 10],
    [8, 6, 7],
    [9, 8, 1],
];

/// Icosahedron refined by `subdivisions` rounds of edge-midpoint quadrisection,
/// every new vertex pushed back onto the sphere of radius `radius`.
pub fn gen_icosphere(subdivisions: usize, radius: f64) -> Result<TriMesh, SurfaceError> {
    if !(radius > 0.0) {
        return Err(SurfaceError::InvalidDimension { radius, height: f64::NAN });
    }
    let t = (1.0 + 5f64.sqrt()) / 2.0;
    let mut vertices: Vec<Point3> = [
        (-1.0, t, 0.0),
        (1.0, t, 0.0),
        (-1.0, -t, 0.0),
        (1.0, -t, 0.0),
        (0.0, -1.0, t),
        (0.0, 1.0, t),
        (0.0, -1.0, -t),
        (0.0, 1.0, -t),
        (t, 0.0, -1.0),
        (t, 0.0, 1.0),
        (-t, 0.0, -1.0),
        (-t, 0.0, 1.0),
    ]
    .iter()
    .map(|&(x, y, z)| Point3::new(x, y, z).normalize() * radius)
    .collect();
    let mut faces = ICOSAHEDRON_FACES.to_vec();

    for _ in 0..subdivisions {
        let mut midpoints: HashMap<(usize, usize), usize> = HashMap::new();
        let mut midpoint = |a: usize, b: usize, vertices: &mut Vec<Point3>| {
            *midpoints.entry((a.min(b), a.max(b))).or_insert_with(|| {
                vertices.push((vertices[a] + vertices[b]).normalize() * radius);
                vertices.len() - 1
            })
        };
        let mut refined = Vec::with_capacity(4 * faces.len());
        for &[a, b, c] in &faces {
            let ab = midpoint(a, b, &mut vertices);
            let bc = midpoint(b, c, &mut vertices);
            let ca = midpoint(c, a, &mut vertices);
            refined.extend([[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]);
        }
        faces = refined;
    }
    Ok(TriMesh::new(vertices, faces)?)
}

/// Classical Schwarz lantern inscribed in the cylinder `x² + y² = R²`,
/// `|z| ≤ H/2`.
///
/// `n + 1` rings of `m` vertices, odd rings rotated by `π/m`; each band between
/// two rings is split into `2m` triangles.
pub fn gen_schwarz_lantern(m: usize, n: usize, radius: f64, height: f64) -> Result<TriMesh, SurfaceError> {
    if m < 3 || n < 2 {
        return Err(SurfaceError::InvalidCounts { m, n });
    }
    if !(radius > 0.0 && height > 0.0) {
        return Err(SurfaceError::InvalidDimension { radius, height });
    }
    let mut vertices = Vec::with_capacity(m * (n + 1));
    for j in 0..=n {
        let z = -height / 2.0 + height * j as f64 / n as f64;
        let offset = if j % 2 == 1 { PI / m as f64 } else { 0.0 };
        for k in 0..m {
            let phi = 2.0 * PI * k as f64 / m as f64 + offset;
            vertices.push(Point3::new(radius * phi.cos(), radius * phi.sin(), z));
        }
    }
    let mut faces = Vec::with_capacity(2 * m * n);
    for j in 0..n {
        let (lo, hi) = (j * m, (j + 1) * m);
        for k in 0..m {
            let k1 = (k + 1) % m;
            if j % 2 == 0 {
                // upper vertex k sits between lower k and k+1
                faces.push([lo + k, lo + k1, hi + k]);
                faces.push([lo + k1, hi + k1, hi + k]);
            } else {
                faces.push([lo + k, lo + k1, hi + k1]);
                faces.push([lo + k, hi + k1, hi + k]);
            }
        }
    }
    Ok(TriMesh::new(vertices, faces)?)
}

/// How the equatorial count `m` follows the axial count `n` in a lantern family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LanternCoupling {
    /// `m = 2n`
    Linear,
    /// `m = n²`
    Quadratic,
}

impl LanternCoupling {
    pub fn equatorial_count(self, n: usize) -> usize {
        match self {
            LanternCoupling::Linear => 2 * n,
            LanternCoupling::Quadratic => n * n,
        }
    }
}

/// Parameters of one generated mesh.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum MeshSpec {
    Cap { radius: f64, theta0: f64, rings: usize },
    Icosphere { radius: f64, subdivisions: usize },
    Lantern { m: usize, n: usize, radius: f64, height: f64 },
}

impl MeshSpec {
    pub fn generate(&self) -> Result<TriMesh, SurfaceError> {
        match *self {
            MeshSpec::Cap { radius, theta0, rings } => gen_cap_mesh(radius, theta0, rings),
            MeshSpec::Icosphere { radius, subdivisions } => gen_icosphere(subdivisions, radius),
            MeshSpec::Lantern { m, n, radius, height } => gen_schwarz_lantern(m, n, radius, height),
        }
    }

    /// The resolution parameter of this level (rings, subdivisions or `n`).
    pub fn resolution(&self) -> usize {
        match *self {
            MeshSpec::Cap { rings, .. } => rings,
            MeshSpec::Icosphere { subdivisions, .. } => subdivisions,
            MeshSpec::Lantern { n, .. } => n,
        }
    }
}

/// A reference case plus the sequence of meshes used to refine towards it.
#[derive(Debug, Clone)]
pub struct RefinementFamily {
    pub case: SurfaceCase,
    pub levels: Vec<MeshSpec>,
    pub coupling: Option<LanternCoupling>,
}

impl RefinementFamily {
    pub fn cap(radius: f64, theta0: f64, ring_levels: &[usize]) -> Result<Self, SurfaceError> {
        Ok(Self {
            case: cap_case(radius, theta0)?,
            levels: ring_levels.iter().map(|&rings| MeshSpec::Cap { radius, theta0, rings }).collect(),
            coupling: None,
        })
    }

    pub fn sphere(radius: f64, l: u32, m: i32, subdivision_levels: &[usize]) -> Result<Self, SurfaceError> {
        Ok(Self {
            case: sphere_case(radius, l, m)?,
            levels: subdivision_levels.iter().map(|&subdivisions| MeshSpec::Icosphere { radius, subdivisions }).collect(),
            coupling: None,
        })
    }

    pub fn lantern(coupling: LanternCoupling, n_levels: &[usize], radius: f64, height: f64) -> Result<Self, SurfaceError> {
        Ok(Self {
            case: cylinder_case(radius, height)?,
            levels: n_levels
                .iter()
                .map(|&n| MeshSpec::Lantern { m: coupling.equatorial_count(n), n, radius, height })
                .collect(),
            coupling: Some(coupling),
        })
    }
}
