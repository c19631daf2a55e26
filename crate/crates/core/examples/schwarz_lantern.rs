// Schwarz lantern meshes of a cylinder: how the equatorial count m is tied to
// the axial count n decides whether the face normals approach the cylinder's.
//
// Prints the mesh-quality exponents and the solver's rates for m = 2n and
// m = n², and the normal angle of the family with n = m² for contrast.

use biharm::analysis::certify_quality;
use biharm::analysis::study::{run_convergence, run_quality, StudyOptions};
use biharm::analysis::Norm;
use biharm::surfaces::{cylinder_case, gen_schwarz_lantern, LanternCoupling, RefinementFamily};

fn main() {
    for (coupling, levels) in [(LanternCoupling::Linear, [4, 8, 16, 32]), (LanternCoupling::Quadratic, [4, 6, 8, 11])] {
        let family = RefinementFamily::lantern(coupling, &levels, 1.0, 2.0).expect("valid lantern family");
        let quality = run_quality("lantern", &family).expect("quality runs");
        let report = run_convergence("lantern", &family, &StudyOptions::default()).expect("study runs");
        println!(
            "{coupling:?}: gamma {:.2}, epsilon {:.2}, L2(u1) slope {:.2}, L2(u2) slope {:.2}",
            quality.gamma.map_or(f64::NAN, |g| g.slope),
            quality.epsilon.map_or(f64::NAN, |e| e.slope),
            report.rate(Norm::L2U1),
            report.rate(Norm::L2U2),
        );
    }

    let case = cylinder_case(1.0, 2.0).expect("valid cylinder");
    for m in [6, 8, 11, 16] {
        let mesh = gen_schwarz_lantern(m, m * m, 1.0, 2.0).expect("valid lantern");
        let q = certify_quality(&mesh, &case).expect("inside reach");
        println!("m = {m:>2}, n = m² = {:>3}: max normal angle {:.3} rad", m * m, q.max_normal_angle);
    }
}
