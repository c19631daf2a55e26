// Closed-sphere study: Δ²u = Y₂⁰ on icosphere refinements.
//
// Without a boundary the method converges at second order in L² for both
// u1 and u2.

use biharm::analysis::study::{run_convergence, StudyOptions};
use biharm::analysis::Norm;
use biharm::surfaces::RefinementFamily;

fn main() {
    let family = RefinementFamily::sphere(1.0, 2, 0, &[1, 2, 3, 4]).expect("valid sphere family");
    let report = run_convergence("sphere", &family, &StudyOptions::default()).expect("study runs");
    for r in &report.records {
        println!("h {:.3e}  dofs {:>6}  L2(u1) {:.3e}  L2(u2) {:.3e}", r.h, r.dofs, r.l2_u1, r.l2_u2);
    }
    println!("L2(u1) slope {:.3}", report.rate(Norm::L2U1));
    println!("L2(u2) slope {:.3}", report.rate(Norm::L2U2));
    println!("H1(u1) slope {:.3}", report.rate(Norm::H1U1));
}
