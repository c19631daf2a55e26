// Cotangent stiffness and mass matrices of a mesh with obtuse triangles.
//
// Prints the properties the mixed method relies on: symmetry, constants in
// the kernel of S, and mass totals equal to the surface area.

use biharm::fem::{assemble_mass, assemble_stiffness, MassMode};
use biharm::mesh::{Point3, TriMesh};

fn main() {
    // a flat fan around an off-center hub: several corners exceed 90°
    let mut vertices = vec![Point3::new(0.3, 0.1, 0.0)];
    let k = 7;
    for i in 0..k {
        let t = 2.0 * std::f64::consts::PI * i as f64 / k as f64;
        vertices.push(Point3::new(t.cos(), 0.6 * t.sin(), 0.0));
    }
    let faces = (0..k).map(|i| [0, 1 + i, 1 + (i + 1) % k]).collect();
    let mesh = TriMesh::new(vertices, faces).expect("valid fan");

    let s = assemble_stiffness(&mesh);
    let ones = vec![1.0; mesh.vertex_count()];
    let kernel: f64 = s.spmv(&ones).expect("sizes match").iter().map(|v| v * v).sum::<f64>().sqrt();
    println!("nnz(S) = {}, |S 1| = {kernel:.1e}, symmetry defect {:.1e}", s.nnz(), s.symmetry_defect());
    for mode in [MassMode::Consistent, MassMode::Lumped] {
        let m = assemble_mass(&mesh, mode);
        println!("{mode:?} mass total {:.15} vs area {:.15}", m.total(), mesh.total_area());
    }
    let positive = s.triplets().filter(|&(i, j, v)| i != j && v > 0.0).count();
    println!("positive off-diagonal entries (from obtuse angles): {positive}");
}
