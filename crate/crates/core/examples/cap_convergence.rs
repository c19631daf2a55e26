// Convergence study on a spherical cap with clamped boundary.
//
// Solves Δ²u = f for the manufactured solution u = (cos θ − cos θ0)² on the
// cap θ ≤ π/3 and prints per-level errors plus fitted rates.
//
//     cargo run --release --example cap_convergence -- 8 16 32 64

use std::f64::consts::PI;

use biharm::analysis::study::{run_convergence, StudyOptions};
use biharm::surfaces::RefinementFamily;

fn main() {
    let mut rings: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    if rings.len() < 3 {
        rings = vec![4, 8, 16];
    }
    let family = RefinementFamily::cap(1.0, PI / 3.0, &rings).expect("valid cap family");
    let report = run_convergence("cap", &family, &StudyOptions::default()).expect("study runs");

    println!("{:>6} {:>10} {:>7} {:>10} {:>10} {:>10}", "rings", "h", "dofs", "L2(u1)", "H1(u1)", "L2(u2)");
    for (r, rings) in report.records.iter().zip(&rings) {
        println!("{rings:>6} {:>10.3e} {:>7} {:>10.3e} {:>10.3e} {:>10.3e}", r.h, r.dofs, r.l2_u1, r.h1_u1, r.l2_u2);
    }
    for (norm, fit) in &report.rates {
        println!("{norm}: slope {:.3} over {} levels", fit.slope, fit.points);
    }
}
