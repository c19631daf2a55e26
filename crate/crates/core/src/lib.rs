//! Mixed piecewise-linear finite elements for the biharmonic equation
//! `Δ²u = f` on triangle meshes approximating curved surfaces.
//!
//! The crate is organized bottom-up:
//!
//! * [`mesh`]: validated indexed triangle meshes and OBJ I/O.
//! * [`linalg`]: CSR matrices, conjugate gradients, a sparse direct solver
//!   for indefinite systems and a dense oracle.
//! * [`fem`]: P1 stiffness/mass assembly and the discrete Laplacian.
//! * [`surfaces`]: reference surfaces, manufactured solutions and mesh
//!   generators (spherical cap, icosphere, Schwarz lantern).
//! * [`biharmonic`]: the mixed solvers.
//! * [`analysis`]: error norms, mesh-quality certification, rate fitting.
//! * [`cli`]: study configuration and the `solve`/`converge`/`quality`
//!   commands behind the `biharm` binary.
//!
//! Laplacians are positive semidefinite throughout (`Δ = −div grad`).

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod biharmonic;
pub mod cli;
pub mod fem;
pub mod linalg;
pub mod mesh;
pub mod surfaces;
