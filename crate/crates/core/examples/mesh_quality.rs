// Mesh-quality certification of an icosphere family: shape regularity,
// distance to the sphere and normal deviation, with fitted exponents γ, ε.

use biharm::analysis::study::run_quality;
use biharm::surfaces::RefinementFamily;

fn main() {
    let family = RefinementFamily::sphere(1.0, 2, 0, &[0, 1, 2, 3, 4]).expect("valid family");
    let report = run_quality("icosphere", &family).expect("quality runs");
    for l in &report.levels {
        let q = l.quality;
        println!(
            "level {}  h {:.3e}  kappa_min {:.3}  K_max {:.3}  max_dist {:.3e}  max_normal_angle {:.3e}",
            l.level, l.h, q.kappa_min, q.k_max, q.max_distance, q.max_normal_angle
        );
    }
    let gamma = report.gamma.expect("enough levels").slope;
    let epsilon = report.epsilon.expect("enough levels").slope;
    println!("gamma {gamma:.3}, epsilon {epsilon:.3}, sigma {:.3}", report.sigma_estimate.unwrap_or(f64::NAN));
}
