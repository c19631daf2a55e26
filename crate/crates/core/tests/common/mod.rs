//! Mesh corpus shared by the integration tests.
#![allow(dead_code)]

use std::f64::consts::PI;

use biharm::mesh::{Point3, TriMesh};
use biharm::surfaces::{gen_cap_mesh, gen_icosphere, gen_schwarz_lantern};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn tetrahedron() -> TriMesh {
    TriMesh::new(
        vec![
            Point3::new(1.0, 1.0, 1.0),
            Point3::new(1.0, -1.0, -1.0),
            Point3::new(-1.0, 1.0, -1.0),
            Point3::new(-1.0, -1.0, 1.0),
        ],
        vec![[0, 1, 2], [0, 3, 1], [0, 2, 3], [1, 3, 2]],
    )
    .unwrap()
}

/// Flat fan around an off-center hub; several corners are obtuse.
pub fn obtuse_fan() -> TriMesh {
    let k = 7;
    let mut vertices = vec![Point3::new(0.3, 0.1, 0.0)];
    for i in 0..k {
        let t = 2.0 * PI * i as f64 / k as f64;
        vertices.push(Point3::new(t.cos(), 0.6 * t.sin(), 0.0));
    }
    TriMesh::new(vertices, (0..k).map(|i| [0, 1 + i, 1 + (i + 1) % k]).collect()).unwrap()
}

/// `k × k` grid mapped by `map`, two triangles per cell.
pub fn grid(k: usize, mut map: impl FnMut(f64, f64) -> Point3) -> TriMesh {
    let mut vertices = Vec::new();
    for j in 0..=k {
        for i in 0..=k {
            vertices.push(map(i as f64 / k as f64, j as f64 / k as f64));
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

/// Strongly sheared grid: every cell has an obtuse triangle.
pub fn sheared_grid(k: usize) -> TriMesh {
    grid(k, |x, y| Point3::new(x + 1.5 * y, 0.4 * y, 0.0))
}

/// Unit-square grid with jittered interior vertices, lifted onto a bump.
pub fn jittered_bump(k: usize, seed: u64) -> TriMesh {
    let mut r = rng(seed);
    let h = 1.0 / k as f64;
    let mut jitter = Vec::new();
    for _ in 0..(k + 1) * (k + 1) {
        jitter.push((r.random_range(-0.3..0.3) * h, r.random_range(-0.3..0.3) * h));
    }
    let mut n = 0;
    grid(k, move |x, y| {
        let (dx, dy) = jitter[n];
        n += 1;
        let interior = x > 0.0 && x < 1.0 && y > 0.0 && y < 1.0;
        let (x, y) = if interior { (x + dx, y + dy) } else { (x, y) };
        Point3::new(x, y, 0.2 * (PI * x).sin() * (PI * y).sin())
    })
}

pub fn has_obtuse_corner(mesh: &TriMesh) -> bool {
    (0..mesh.face_count()).any(|f| mesh.triangle_geometry(f).corner_cotangents.iter().any(|&c| c < -1e-12))
}

/// Named meshes: open and closed, curved and flat, with and without obtuse corners.
pub fn corpus() -> Vec<(&'static str, TriMesh)> {
    vec![
        ("cap-3", gen_cap_mesh(1.0, PI / 3.0, 3).unwrap()),
        ("cap-5", gen_cap_mesh(1.0, PI / 3.0, 5).unwrap()),
        ("icosphere-1", gen_icosphere(1, 1.0).unwrap()),
        ("icosphere-2", gen_icosphere(2, 1.0).unwrap()),
        ("lantern-8x4", gen_schwarz_lantern(8, 4, 1.0, 2.0).unwrap()),
        ("lantern-16x4", gen_schwarz_lantern(16, 4, 1.0, 2.0).unwrap()),
        ("tetrahedron", tetrahedron()),
        ("obtuse-fan", obtuse_fan()),
        ("sheared-grid", sheared_grid(6)),
        ("jittered-bump", jittered_bump(8, 7)),
    ]
}
