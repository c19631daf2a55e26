// One clamped-plate solve on a cap, compared pointwise with the exact solution.

use std::f64::consts::PI;

use biharm::biharmonic::solve_mixed_dirichlet;
use biharm::fem::interpolate;
use biharm::surfaces::{cap_case, gen_cap_mesh, ExactSolution};

fn main() {
    let case = cap_case(1.0, PI / 3.0).expect("valid cap");
    let mesh = gen_cap_mesh(1.0, PI / 3.0, 16).expect("valid mesh");
    let f = interpolate(&mesh, |p| case.exact_f(p));
    let solution = solve_mixed_dirichlet(&mesh, &f, 1e-10).expect("solve succeeds");

    // vertex 0 is the pole
    let pole = mesh.vertices()[0];
    println!("u1 at the pole {:.6} (exact {:.6})", solution.u1.values()[0], case.exact_u(&pole));
    println!("u2 at the pole {:.6} (exact {:.6})", solution.u2.values()[0], case.exact_lap_u(&pole));
    println!(
        "{} vertices, {} boundary, solved by {} with relative residual {:.2e}",
        mesh.vertex_count(),
        mesh.boundary_vertices().len(),
        solution.solve_report.method,
        solution.solve_report.relative_residual
    );
}
