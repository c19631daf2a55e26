// Solving on a user-supplied OBJ mesh.
//
// Writes a tetrahedron to a temporary OBJ file, reads it back and solves with
// a constant load. On a closed surface only the zero-mean part of the load
// enters, so the constant is projected away and u1 vanishes.

use biharm::biharmonic::solve_mixed_closed;
use biharm::fem::NodalField;
use biharm::mesh::obj::{read_obj, write_obj_file};
use biharm::mesh::{Point3, TriMesh};

fn main() {
    let tetrahedron = TriMesh::new(
        vec![
            Point3::new(1.0, 1.0, 1.0),
            Point3::new(1.0, -1.0, -1.0),
            Point3::new(-1.0, 1.0, -1.0),
            Point3::new(-1.0, -1.0, 1.0),
        ],
        vec![[0, 1, 2], [0, 3, 1], [0, 2, 3], [1, 3, 2]],
    )
    .expect("valid tetrahedron");
    let path = std::env::temp_dir().join(format!("biharm-example-{}.obj", std::process::id()));
    write_obj_file(&tetrahedron, &path).expect("writable temp dir");
    let mesh = read_obj(&path).expect("readable OBJ");
    let _ = std::fs::remove_file(&path);

    let f = NodalField::constant(&mesh, 1.0);
    let solution = solve_mixed_closed(&mesh, &f, 1e-10).expect("solve succeeds");
    let mean = solution.u1.values().iter().sum::<f64>() / mesh.vertex_count() as f64;
    println!("closed: {}, removed load mean {:.3}, mean of u1 {mean:.1e}", mesh.is_closed(), solution.removed_mean);
}
