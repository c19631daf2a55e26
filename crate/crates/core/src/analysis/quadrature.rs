use serde::{Deserialize, Serialize};

/// Polynomial degree integrated exactly by a symmetric triangle rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum QuadOrder {
    Two,
    #[default]
    Four,
}

impl TryFrom<u8> for QuadOrder {
    type Error = String;
    fn try_from(v: u8) -> Result<Self, String> {
        match v {
            2 => Ok(QuadOrder::Two),
            4 => Ok(QuadOrder::Four),
            other => Err(format!("quadrature order must be 2 or 4, got {other}")),
        }
    }
}

impl From<QuadOrder> for u8 {
    fn from(q: QuadOrder) -> u8 {
        match q {
            QuadOrder::Two => 2,
            QuadOrder::Four => 4,
        }
    }
}

/// Barycentric points and weights; weights sum to 1 (multiply by the area).
pub fn rule(order: QuadOrder) -> &'static [([f64; 3], f64)] {
    match order {
        QuadOrder::Two => &ORDER_TWO,
        QuadOrder::Four => &ORDER_FOUR,
    }
}

const ORDER_TWO: [([f64; 3], f64); 3] = [
    ([2.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0], 1.0 / 3.0),
    ([1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0], 1.0 / 3.0),
    ([1.0 / 6.0, 1.0 / 6.0, 2.0 / 3.0], 1.0 / 3.0),
];

// Dunavant, degree 4, six points.
const A1: f64 = 0.445_948_490_915_965;
const B1: f64 = 1.0 - 2.0 * A1;
const W1: f64 = 0.223_381_589_678_011;
const A2: f64 = 0.091_576_213_509_771;
const B2: f64 = 1.0 - 2.0 * A2;
const W2: f64 = 0.109_951_743_655_322;

const ORDER_FOUR: [([f64; 3], f64); 6] = [
    ([B1, A1, A1], W1),
    ([A1, B1, A1], W1),
    ([A1, A1, B1], W1),
    ([B2, A2, A2], W2),
    ([A2, B2, A2], W2),
    ([A2, A2, B2], W2),
];

#[cfg(test)]
mod tests {
    use super::*;

    fn factorial(n: u32) -> f64 {
        (1..=n).map(f64::from).product()
    }

    /// ∫ x^a y^b over the reference triangle (area 1/2) = a! b! / (a + b + 2)!
    fn exact_monomial(a: u32, b: u32) -> f64 {
        factorial(a) * factorial(b) / factorial(a + b + 2)
    }

    fn integrate(order: QuadOrder, a: u32, b: u32) -> f64 {
        // reference corners (0,0), (1,0), (0,1): x = λ1, y = λ2
        rule(order).iter().map(|(l, w)| 0.5 * w * l[1].powi(a as i32) * l[2].powi(b as i32)).sum()
    }

    #[test]
    fn weights_sum_to_one() {
        for order in [QuadOrder::Two, QuadOrder::Four] {
            let s: f64 = rule(order).iter().map(|r| r.1).sum();
            assert!((s - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn exact_up_to_stated_degree() {
        for (order, degree) in [(QuadOrder::Two, 2), (QuadOrder::Four, 4)] {
            for a in 0..=degree {
                for b in 0..=degree - a {
                    let err = (integrate(order, a, b) - exact_monomial(a, b)).abs();
                    assert!(err < 1e-14, "order {order:?} x^{a} y^{b}: {err}");
                }
            }
        }
        // and not beyond
        assert!((integrate(QuadOrder::Two, 3, 0) - exact_monomial(3, 0)).abs() > 1e-6);
    }

    #[test]
    fn order_parses_from_integer() {
        assert_eq!(QuadOrder::try_from(2).unwrap(), QuadOrder::Two);
        assert!(QuadOrder::try_from(3).is_err());
        assert_eq!(serde_json::from_str::<QuadOrder>("4").unwrap(), QuadOrder::Four);
    }
}
