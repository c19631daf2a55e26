// Cross-checks the sparse saddle-point solve against a dense LU oracle on a
// small cap mesh.

use std::f64::consts::PI;

use biharm::biharmonic::{solve_mixed_dirichlet, SaddleSystem};
use biharm::fem::{interpolate, MassMode};
use biharm::linalg::dense_solve_oracle;
use biharm::surfaces::{cap_case, gen_cap_mesh, ExactSolution};

fn main() {
    let case = cap_case(1.0, PI / 3.0).expect("valid cap");
    let mesh = gen_cap_mesh(1.0, PI / 3.0, 4).expect("valid mesh");
    let f = interpolate(&mesh, |p| case.exact_f(p));

    let system = SaddleSystem::new(&mesh, &f, MassMode::Consistent).expect("assembles");
    let dense = dense_solve_oracle(&system.matrix.to_dense(), &system.rhs).expect("nonsingular");
    let (u1_dense, u2_dense) = system.split(&dense);
    let sparse = solve_mixed_dirichlet(&mesh, &f, 1e-12).expect("solve succeeds");

    let diff = |a: &[f64], b: &[f64]| {
        let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
        num / b.iter().map(|y| y * y).sum::<f64>().sqrt()
    };
    println!("saddle system of size {}", system.rhs.len());
    println!("relative difference u1: {:.2e}", diff(sparse.u1.values(), &u1_dense));
    println!("relative difference u2: {:.2e}", diff(sparse.u2.values(), &u2_dense));
}
