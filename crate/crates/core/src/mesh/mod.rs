//! Indexed triangle surface meshes.
//!
//! A [`TriMesh`] is validated once at construction (index range, degeneracy,
//! edge-manifoldness, consistent orientation) and is immutable afterwards.
//! Boundary vertices and edges are extracted during validation.

mod geometry;
pub mod obj;

use std::collections::HashMap;

use nalgebra::Vector3;
use thiserror::Error;

pub use geometry::TriangleGeometry;

/// A point (or vector) in three-dimensional space.
pub type Point3 = Vector3<f64>;

/// Faces whose area falls below this multiple of (longest edge)² are degenerate.
pub const DEGENERACY_RATIO: f64 = 1e-14;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MeshError {
    #[error("mesh has no vertices or no faces")]
    Empty,
    #[error("face {face} references vertex {index}, but the mesh has {count} vertices")]
    IndexOutOfRange { face: usize, index: usize, count: usize },
    #[error("face {face} is degenerate")]
    DegenerateFace { face: usize },
    #[error("edge ({0}, {1}) is shared by more than two faces")]
    NonManifoldEdge(usize, usize),
    #[error("edge ({0}, {1}) appears twice with the same direction")]
    InconsistentOrientation(usize, usize),
    #[error("vertex {0} has a non-finite coordinate")]
    NonFiniteVertex(usize),
}

/// Validated, immutable triangle mesh.
#[derive(Debug, Clone)]
pub struct TriMesh {
    vertices: Vec<Point3>,
    faces: Vec<[usize; 3]>,
    boundary_vertices: Vec<usize>,
    boundary_edges: Vec<(usize, usize)>,
    is_boundary: Vec<bool>,
    edges: Vec<(usize, usize)>,
    id: u64,
}

/// Content fingerprint of a mesh, used to tie nodal fields to the mesh they live on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct MeshId(pub u64);

impl TriMesh {
    /// Validates `vertices` and `faces` and builds the mesh.
    ///
    /// Faces are expected counterclockwise with respect to the outward normal;
    /// the orientation check only enforces that neighbouring faces agree.
    pub fn new(vertices: Vec<Point3>, faces: Vec<[usize; 3]>) -> Result<Self, MeshError> {
        if vertices.is_empty() || faces.is_empty() {
            return Err(MeshError::Empty);
        }
        if let Some(i) = vertices.iter().position(|p| !p.iter().all(|c| c.is_finite())) {
            return Err(MeshError::NonFiniteVertex(i));
        }
        let count = vertices.len();
        for (fi, face) in faces.iter().enumerate() {
            if let Some(&index) = face.iter().find(|&&i| i >= count) {
                return Err(MeshError::IndexOutOfRange { face: fi, index, count });
            }
            if face[0] == face[1] || face[1] == face[2] || face[0] == face[2] {
                return Err(MeshError::DegenerateFace { face: fi });
            }
            let [a, b, c] = face.map(|i| vertices[i]);
            let longest = (b - a)
                .norm_squared()
                .max((c - b).norm_squared())
                .max((a - c).norm_squared());
            let area = 0.5 * (b - a).cross(&(c - a)).norm();
            if !(area > DEGENERACY_RATIO * longest) {
                return Err(MeshError::DegenerateFace { face: fi });
            }
        }

        // undirected edge -> (number of incident faces, directions seen)
        let mut incidence: HashMap<(usize, usize), (u8, [bool; 2])> = HashMap::new();
        let mut edges = Vec::new();
        for face in &faces {
            for k in 0..3 {
                let (a, b) = (face[k], face[(k + 1) % 3]);
                let key = (a.min(b), a.max(b));
                let forward = a < b;
                let entry = incidence.entry(key).or_insert_with(|| {
                    edges.push(key);
                    (0, [false; 2])
                });
                entry.0 += 1;
                if entry.0 > 2 {
                    return Err(MeshError::NonManifoldEdge(key.0, key.1));
                }
                let slot = &mut entry.1[forward as usize];
                if *slot {
                    return Err(MeshError::InconsistentOrientation(a, b));
                }
                *slot = true;
            }
        }

        let mut boundary_edges = Vec::new();
        let mut is_boundary = vec![false; count];
        for face in &faces {
            for k in 0..3 {
                let (a, b) = (face[k], face[(k + 1) % 3]);
                if incidence[&(a.min(b), a.max(b))].0 == 1 {
                    boundary_edges.push((a, b));
                    is_boundary[a] = true;
                    is_boundary[b] = true;
                }
            }
        }
        let boundary_vertices = (0..count).filter(|&i| is_boundary[i]).collect();
        let id = fingerprint(&vertices, &faces);

        Ok(Self { vertices, faces, boundary_vertices, boundary_edges, is_boundary, edges, id })
    }

    pub fn vertices(&self) -> &[Point3] {
        &self.vertices
    }

    pub fn faces(&self) -> &[[usize; 3]] {
        &self.faces
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    /// Sorted indices of vertices lying on at least one boundary edge.
    pub fn boundary_vertices(&self) -> &[usize] {
        &self.boundary_vertices
    }

    /// Boundary edges, each oriented as in its unique incident face.
    pub fn boundary_edges(&self) -> &[(usize, usize)] {
        &self.boundary_edges
    }

    pub fn is_boundary_vertex(&self, i: usize) -> bool {
        self.is_boundary[i]
    }

    pub fn is_closed(&self) -> bool {
        self.boundary_edges.is_empty()
    }

    /// Undirected edges `(min, max)` in order of first appearance.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn id(&self) -> MeshId {
        MeshId(self.id)
    }

    /// Corner positions of face `face`.
    pub fn face_points(&self, face: usize) -> [Point3; 3] {
        self.faces[face].map(|i| self.vertices[i])
    }

    pub fn triangle_geometry(&self, face: usize) -> TriangleGeometry {
        TriangleGeometry::from_points(&self.face_points(face))
    }

    pub fn face_area(&self, face: usize) -> f64 {
        let [a, b, c] = self.face_points(face);
        0.5 * (b - a).cross(&(c - a)).norm()
    }

    pub fn total_area(&self) -> f64 {
        (0..self.faces.len()).map(|f| self.face_area(f)).sum()
    }

    /// The mesh parameter h: the longest edge of the mesh.
    pub fn max_edge_length(&self) -> f64 {
        self.edges
            .iter()
            .map(|&(a, b)| (self.vertices[a] - self.vertices[b]).norm())
            .fold(0.0, f64::max)
    }

    /// Applies `map` to every vertex, keeping the connectivity.
    pub fn map_vertices(&self, map: impl Fn(&Point3) -> Point3) -> Result<Self, MeshError> {
        Self::new(self.vertices.iter().map(map).collect(), self.faces.clone())
    }
}

fn fingerprint(vertices: &[Point3], faces: &[[usize; 3]]) -> u64 {
    // FNV-1a over the raw coordinate bits and indices.
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    let mut eat = |word: u64| {
        for byte in word.to_le_bytes() {
            hash ^= byte as u64;
            hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
        }
    };
    eat(vertices.len() as u64);
    for p in vertices {
        p.iter().for_each(|c| eat(c.to_bits()));
    }
    for f in faces {
        f.iter().for_each(|&i| eat(i as u64));
    }
    hash
}
