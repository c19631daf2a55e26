// The discrete Laplacian M⁻¹S of an interpolated spherical harmonic.
//
// Y₂ is an eigenfunction of the Laplace–Beltrami operator on the unit
// sphere with eigenvalue l(l+1) = 6; the discrete result approaches 6·Y₂.

use biharm::analysis::{l2_error_against, QuadOrder};
use biharm::fem::{discrete_laplacian, interpolate};
use biharm::surfaces::harmonics::real_harmonic;
use biharm::surfaces::{gen_icosphere, sphere_case};

fn main() {
    let sphere = sphere_case(1.0, 2, 0).expect("valid case");
    let y2 = |p: &nalgebra::Vector3<f64>| real_harmonic(2, 0, &p.normalize());
    for level in 1..=4 {
        let mesh = gen_icosphere(level, 1.0).expect("valid icosphere");
        let u = interpolate(&mesh, y2);
        let (lap, report) = discrete_laplacian(&mesh, &u).expect("mass solve converges");
        let err = l2_error_against(&mesh, &lap, &sphere, |p| 6.0 * y2(p), QuadOrder::Four).expect("inside reach");
        println!("level {level}: |Δ_h Y2 − 6 Y2| = {err:.3e}  ({} CG iterations)", report.iterations);
    }
}
