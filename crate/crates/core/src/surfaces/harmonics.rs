//! Real (unnormalized) spherical harmonics with forward-mode gradients.
//!
//! `Y_l^m(p̂) = Π_l^{|m|}(z) · Re/Im (x + iy)^{|m|}`, where `p̂ = p/|p|` and
//! `Π` is the associated Legendre polynomial divided by `sin^{|m|} θ`,
//! without the Condon–Shortley phase. For `m = 0` this is the plain Legendre
//! polynomial in `z`, e.g. `Y_2^0 = (3z² − 1)/2`.

use std::ops::{Add, Mul, Sub};

use nalgebra::Vector3;

#[derive(Debug, Clone, Copy)]
struct Dual {
    v: f64,
    d: Vector3<f64>,
}

impl Dual {
    fn constant(v: f64) -> Self {
        Self { v, d: Vector3::zeros() }
    }

    fn scale(self, s: f64) -> Self {
        Self { v: self.v * s, d: self.d * s }
    }
}

impl Add for Dual {
    type Output = Dual;
    fn add(self, o: Dual) -> Dual {
        Dual { v: self.v + o.v, d: self.d + o.d }
    }
}

impl Sub for Dual {
    type Output = Dual;
    fn sub(self, o: Dual) -> Dual {
        Dual { v: self.v - o.v, d: self.d - o.d }
    }
}

impl Mul for Dual {
    type Output = Dual;
    fn mul(self, o: Dual) -> Dual {
        Dual { v: self.v * o.v, d: o.d * self.v + self.d * o.v }
    }
}

/// Value and ambient gradient of `p ↦ Y_l^m(p/|p|)`.
///
/// The function is homogeneous of degree zero, so the gradient is tangent to
/// the sphere through `p` and equals the surface gradient there.
pub fn real_harmonic_with_gradient(l: u32, m: i32, p: &Vector3<f64>) -> (f64, Vector3<f64>) {
    let r = p.norm();
    // p̂_k = p_k / r, ∂p̂_k/∂p = (e_k − p̂_k p̂) / r
    let unit = p / r;
    let component = |k: usize| {
        let mut d = -unit * unit[k];
        d[k] += 1.0;
        Dual { v: unit[k], d: d / r }
    };
    let (x, y, z) = (component(0), component(1), component(2));

    let order = m.unsigned_abs();
    let (mut re, mut im) = (Dual::constant(1.0), Dual::constant(0.0));
    for _ in 0..order {
        (re, im) = (re * x - im * y, re * y + im * x);
    }
    let double_factorial: f64 = (1..=order).map(|k| (2 * k - 1) as f64).product();
    let mut prev = Dual::constant(double_factorial);
    let legendre = if l == order {
        prev
    } else {
        let mut cur = (z * prev).scale((2 * order + 1) as f64);
        for degree in order + 2..=l {
            let next = ((z * cur).scale((2 * degree - 1) as f64) - prev.scale((degree + order - 1) as f64))
                .scale(1.0 / (degree - order) as f64);
            prev = cur;
            cur = next;
        }
        cur
    };
    let y = legendre * if m >= 0 { re } else { im };
    (y.v, y.d)
}

pub fn real_harmonic(l: u32, m: i32, p: &Vector3<f64>) -> f64 {
    real_harmonic_with_gradient(l, m, p).0
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn low_degree_closed_forms() {
        let p = Vector3::new(0.3, -0.4, 0.5).normalize();
        let (x, y, z) = (p.x, p.y, p.z);
        assert_abs_diff_eq!(real_harmonic(1, 0, &p), z, epsilon = 1e-15);
        assert_abs_diff_eq!(real_harmonic(1, 1, &p), x, epsilon = 1e-15);
        assert_abs_diff_eq!(real_harmonic(1, -1, &p), y, epsilon = 1e-15);
        assert_abs_diff_eq!(real_harmonic(2, 0, &p), (3.0 * z * z - 1.0) / 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(real_harmonic(2, 1, &p), 3.0 * z * x, epsilon = 1e-15);
        assert_abs_diff_eq!(real_harmonic(2, -2, &p), 3.0 * 2.0 * x * y, epsilon = 1e-14);
        assert_abs_diff_eq!(real_harmonic(3, 0, &p), (5.0 * z.powi(3) - 3.0 * z) / 2.0, epsilon = 1e-15);
    }

    #[test]
    fn gradient_matches_central_differences_and_is_tangent() {
        let p = Vector3::new(0.2, 0.7, -0.4) * 1.7;
        for (l, m) in [(1, 0), (2, 0), (2, 1), (3, -2), (4, 3)] {
            let (_, g) = real_harmonic_with_gradient(l, m, &p);
            assert!(g.dot(&p).abs() < 1e-12);
            for k in 0..3 {
                let mut e = Vector3::zeros();
                e[k] = 1e-6;
                let fd = (real_harmonic(l, m, &(p + e)) - real_harmonic(l, m, &(p - e))) / 2e-6;
                assert_abs_diff_eq!(g[k], fd, epsilon = 1e-8);
            }
        }
    }
}
