//! The prey-axis restriction `f(x) = x(a-1-bx)`, its affine conjugacy to the
//! logistic family `F(x) = mu x(1-x)`, its 2-cycle and the regime table of
//! the period-doubling cascade.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{ModelError, Result};
use crate::scalar::Scalar;

/// Upper end of the numerically observed period-4 window.
pub const PERIOD4_UPPER: f64 = 4.543;
/// Period-8 window `(PERIOD8_LOWER, PERIOD8_UPPER)`.
pub const PERIOD8_LOWER: f64 = 4.544;
pub const PERIOD8_UPPER: f64 = 4.564;

/// Axis map `x(a-1-bx)`.
#[inline]
pub fn f1d<T: Scalar>(a: T, b: T, x: T) -> T {
    x * (a - T::one() - b * x)
}

#[inline]
pub fn f1d_derivative<T: Scalar>(a: T, b: T, x: T) -> T {
    a - T::one() - T::lit(2.0) * b * x
}

/// Affine homeomorphism `h(x) = p x + q` with `h(F_mu(x)) = f(h(x))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Scalar", serialize = "T: Scalar"))]
pub struct ConjugacyMap<T> {
    pub p: T,
    pub q: T,
    pub mu: T,
}

impl<T: Scalar> ConjugacyMap<T> {
    #[inline]
    pub fn h(&self, x: T) -> T {
        self.p * x + self.q
    }

    #[inline]
    pub fn h_inverse(&self, x: T) -> T {
        (x - self.q) / self.p
    }

    /// The logistic map `mu x (1 - x)`.
    #[inline]
    pub fn logistic(&self, x: T) -> T {
        self.mu * x * (T::one() - x)
    }
}

/// Builds the conjugacy for `mu = 3 - a`. Rejects `a = 3`, where `h` is
/// constant.
pub fn conjugacy<T: Scalar>(a: T, b: T) -> Result<ConjugacyMap<T>> {
    check_axis_params(a, b)?;
    let mu = T::lit(3.0) - a;
    if mu == T::zero() {
        return Err(ModelError::DegenerateConjugacy);
    }
    Ok(ConjugacyMap {
        p: mu / b,
        q: (a - T::lit(2.0)) / b,
        mu,
    })
}

fn check_axis_params<T: Scalar>(a: T, b: T) -> Result<()> {
    if !a.is_finite() {
        return Err(ModelError::InvalidParams {
            name: "a",
            value: a.to_f64().unwrap_or(f64::NAN),
            requirement: "finite",
        });
    }
    if !(b.is_finite() && b > T::zero()) {
        return Err(ModelError::InvalidParams {
            name: "b",
            value: b.to_f64().unwrap_or(f64::NAN),
            requirement: "b > 0",
        });
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Scalar", serialize = "T: Scalar"))]
pub struct Cycle2Report<T> {
    pub p1: T,
    pub p2: T,
    /// `f'(p1) * f'(p2)`, evaluated numerically.
    pub multiplier: T,
    pub attracting: bool,
}

/// The 2-cycle `{p1, p2}` of the axis map, present for `a > 4`.
pub fn cycle2<T: Scalar>(a: T, b: T) -> Option<Cycle2Report<T>> {
    if a <= T::lit(4.0) || b.is_nan() || b <= T::zero() {
        return None;
    }
    let two = T::lit(2.0);
    let root = (a * (a - T::lit(4.0))).sqrt();
    let p1 = (a - root) / (two * b);
    let p2 = (a + root) / (two * b);
    let multiplier = f1d_derivative(a, b, p1) * f1d_derivative(a, b, p2);
    Some(Cycle2Report {
        p1,
        p2,
        multiplier,
        attracting: multiplier.abs() < T::one(),
    })
}

/// The fixed point `p0 = (a-2)/b` of the axis map.
#[inline]
pub fn p0<T: Scalar>(a: T, b: T) -> T {
    (a - T::lit(2.0)) / b
}

/// The smaller root of `x(a-1-bx) = p0`, i.e. the point left of the hump
/// that maps onto `p0`.
pub fn p0_preimage<T: Scalar>(a: T, b: T) -> Result<T> {
    check_axis_params(a, b)?;
    let one = T::one();
    let target = p0(a, b);
    // b x^2 - (a-1) x + p0 = 0
    let disc = (a - one) * (a - one) - T::lit(4.0) * b * target;
    if disc < T::zero() || target <= T::zero() {
        return Err(ModelError::NoPreimage {
            a: a.to_f64().unwrap_or(f64::NAN),
            b: b.to_f64().unwrap_or(f64::NAN),
        });
    }
    // larger root from the sum, smaller from the product; avoids cancellation near a = 2
    let half_sum = ((a - one) + disc.sqrt()) / T::lit(2.0);
    Ok(target / half_sum)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RegimeLabel {
    Extinction,
    FixedPoint,
    #[serde(rename = "period-2")]
    Period2,
    #[serde(rename = "period-4")]
    Period4,
    #[serde(rename = "period-8")]
    Period8,
    UndeterminedGap,
    Chaotic,
}

impl RegimeLabel {
    /// Period of the attracting cycle the label asserts, if any.
    pub fn period(self) -> Option<usize> {
        match self {
            RegimeLabel::FixedPoint => Some(1),
            RegimeLabel::Period2 => Some(2),
            RegimeLabel::Period4 => Some(4),
            RegimeLabel::Period8 => Some(8),
            _ => None,
        }
    }
}

impl fmt::Display for RegimeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RegimeLabel::Extinction => "extinction",
            RegimeLabel::FixedPoint => "fixed-point",
            RegimeLabel::Period2 => "period-2",
            RegimeLabel::Period4 => "period-4",
            RegimeLabel::Period8 => "period-8",
            RegimeLabel::UndeterminedGap => "undetermined-gap",
            RegimeLabel::Chaotic => "chaotic",
        })
    }
}

/// Static regime table of the axis map as a function of `a` alone.
///
/// Intervals without an established attractor, and the boundary points
/// `a = 4` and `a = 2 + sqrt(6)`, map to [`RegimeLabel::UndeterminedGap`];
/// so does `a <= 1`, which lies outside the model.
pub fn regime_1d<T: Scalar>(a: T) -> RegimeLabel {
    let a = a.to_f64().unwrap_or(f64::NAN);
    let period2_upper = 2.0 + 6f64.sqrt();
    let chaos_lower = 3.0 + 5f64.sqrt();
    if a.is_nan() || a <= 1.0 {
        RegimeLabel::UndeterminedGap
    } else if a <= 2.0 {
        RegimeLabel::Extinction
    } else if a < 4.0 {
        RegimeLabel::FixedPoint
    } else if a > 4.0 && a < period2_upper {
        RegimeLabel::Period2
    } else if a > period2_upper && a < PERIOD4_UPPER {
        RegimeLabel::Period4
    } else if a > PERIOD8_LOWER && a < PERIOD8_UPPER {
        RegimeLabel::Period8
    } else if a > chaos_lower {
        RegimeLabel::Chaotic
    } else {
        RegimeLabel::UndeterminedGap
    }
}

/// Orbit of the axis map, truncated when it leaves `x > 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Scalar", serialize = "T: Scalar"))]
pub struct AxisOrbit<T> {
    pub points: Vec<T>,
    /// Step at which the image left the domain, with the raw image.
    pub escaped_at: Option<(usize, T)>,
}

pub fn axis_orbit<T: Scalar>(a: T, b: T, x0: T, n: usize) -> AxisOrbit<T> {
    let mut points = Vec::with_capacity(n + 1);
    points.push(x0);
    let mut x = x0;
    for k in 1..=n {
        let next = f1d(a, b, x);
        if !next.is_finite() || next <= T::EXTINCTION_FLOOR {
            return AxisOrbit {
                points,
                escaped_at: Some((k, next)),
            };
        }
        points.push(next);
        x = next;
    }
    AxisOrbit {
        points,
        escaped_at: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn f1d_examples() {
        assert_eq!(f1d(3.0, 1.0, 1.0), 1.0);
        assert_eq!(f1d(2.0, 1.0, 0.5), 0.25);
        assert!((f1d(4.3f64, 1.0, 1.58211) - 2.71789).abs() < 1e-4);
    }

    #[test]
    fn regime_labels_serialize_like_display() {
        use RegimeLabel::*;
        for label in [
            Extinction,
            FixedPoint,
            Period2,
            Period4,
            Period8,
            UndeterminedGap,
            Chaotic,
        ] {
            assert_eq!(
                serde_json::to_string(&label).unwrap(),
                format!("\"{label}\"")
            );
        }
    }

    #[test]
    fn conjugacy_coefficients() {
        let h = conjugacy(2.5f64, 1.0).unwrap();
        assert_eq!((h.p, h.q, h.mu), (0.5, 0.5, 0.5));
        for &(a, b) in &[(2.5, 1.0), (3.5, 2.0), (1.5, 0.5), (4.5, 1.0)] {
            let h = conjugacy::<f64>(a, b).unwrap();
            assert!((h.h(0.0) - p0(a, b)).abs() < 1e-15);
            assert!(h.h((h.mu - 1.0) / h.mu).abs() < 1e-14);
            assert!((h.h_inverse(h.h(0.37)) - 0.37).abs() < 1e-14);
        }
    }

    #[test]
    fn conjugacy_rejects_a_equal_three() {
        assert!(matches!(
            conjugacy(3.0, 1.0),
            Err(ModelError::DegenerateConjugacy)
        ));
        assert!(conjugacy(2.0, 0.0).is_err());
    }

    #[test]
    fn conjugacy_identity_on_grid() {
        let mut worst = 0.0f64;
        for &a in &[1.5, 2.5, 3.5, 4.5] {
            for &b in &[0.5, 1.0, 2.0] {
                let h = conjugacy::<f64>(a, b).unwrap();
                for i in 0..200 {
                    let x = -1.0 + 3.0 * i as f64 / 199.0;
                    let lhs = h.h(h.logistic(x));
                    let rhs = f1d(a, b, h.h(x));
                    worst = worst.max((lhs - rhs).abs());
                }
            }
        }
        assert!(worst < 1e-12, "worst residual {worst}");
    }

    #[test]
    fn cycle2_examples() {
        let c = cycle2(4.3f64, 1.0).unwrap();
        assert!((c.p1 - 1.58211).abs() < 1e-5);
        assert!((c.p2 - 2.71789).abs() < 1e-5);
        assert!(c.attracting);
        assert!(cycle2(4.0, 1.0).is_none());
        assert!(cycle2(3.5, 1.0).is_none());
        let c = cycle2(4.6f64, 1.0).unwrap();
        assert!((c.multiplier - (-1.76)).abs() < 1e-9);
        assert!(!c.attracting);
    }

    #[test]
    fn cycle2_attracting_window_ends_at_two_plus_root_six() {
        let edge = 2.0 + 6f64.sqrt();
        assert!(cycle2(edge - 1e-6, 1.0).unwrap().attracting);
        assert!(!cycle2(edge + 1e-6, 1.0).unwrap().attracting);
    }

    #[test]
    fn preimage_of_p0() {
        // smaller root of x(2.5 - x) = 1.5 is 1
        let x = p0_preimage(3.5f64, 1.0).unwrap();
        assert!((x - 1.0).abs() < 1e-15);
        assert!((f1d(3.5, 1.0, x) - 1.5).abs() < 1e-15);
        // vertex case: double root at p0 itself
        assert!((p0_preimage(3.0f64, 1.0).unwrap() - 1.0).abs() < 1e-12);
        let (a, b) = (3.9f64, 2.0);
        let x = p0_preimage(a, b).unwrap();
        assert!((f1d(a, b, x) - p0(a, b)).abs() < 1e-12);
        assert!(x > 0.0 && x < (a - 1.0) / (2.0 * b));
    }

    #[test]
    fn preimage_missing_when_p0_not_positive() {
        assert!(matches!(
            p0_preimage(1.5, 1.0),
            Err(ModelError::NoPreimage { .. })
        ));
        assert!(matches!(
            p0_preimage(2.0, 1.0),
            Err(ModelError::NoPreimage { .. })
        ));
    }

    #[test]
    fn regime_table() {
        assert_eq!(regime_1d(1.5), RegimeLabel::Extinction);
        assert_eq!(regime_1d(2.0), RegimeLabel::Extinction);
        assert_eq!(regime_1d(3.0), RegimeLabel::FixedPoint);
        assert_eq!(regime_1d(4.0), RegimeLabel::UndeterminedGap);
        assert_eq!(regime_1d(4.3), RegimeLabel::Period2);
        assert_eq!(regime_1d(2.0 + 6f64.sqrt()), RegimeLabel::UndeterminedGap);
        assert_eq!(regime_1d(4.5), RegimeLabel::Period4);
        assert_eq!(regime_1d(4.5435), RegimeLabel::UndeterminedGap);
        assert_eq!(regime_1d(4.55), RegimeLabel::Period8);
        assert_eq!(regime_1d(4.564), RegimeLabel::UndeterminedGap);
        assert_eq!(regime_1d(5.0), RegimeLabel::UndeterminedGap);
        assert_eq!(regime_1d(5.5), RegimeLabel::Chaotic);
        assert_eq!(regime_1d(0.5), RegimeLabel::UndeterminedGap);
    }

    #[test]
    fn axis_orbit_escapes_above_five() {
        let orbit = axis_orbit(5.5, 1.0, 0.3, 10_000);
        assert!(orbit.escaped_at.is_some());
        let orbit = axis_orbit(4.3, 1.0, 0.3, 1_000);
        assert!(orbit.escaped_at.is_none());
        assert_eq!(orbit.points.len(), 1_001);
    }

    proptest! {
        #[test]
        fn cycle_points_swap_and_multiplier_is_b_independent(
            a in 4.0001f64..5.0, b in prop::sample::select(vec![0.5, 1.0, 2.0]),
        ) {
            let c = cycle2(a, b).unwrap();
            prop_assert!((f1d(a, b, c.p1) - c.p2).abs() < 1e-12);
            prop_assert!((f1d(a, b, c.p2) - c.p1).abs() < 1e-12);
            prop_assert!(c.p1 < c.p2);
            prop_assert!((c.multiplier - (-a * a + 4.0 * a + 1.0)).abs() < 1e-9);
        }

        #[test]
        fn conjugacy_identity_holds_for_any_real_x(
            a in 1.01f64..6.0, b in 0.1f64..4.0, x in -3.0f64..3.0,
        ) {
            prop_assume!((a - 3.0).abs() > 1e-3);
            let h = conjugacy::<f64>(a, b).unwrap();
            let lhs = h.h(h.logistic(x));
            let rhs = f1d(a, b, h.h(x));
            prop_assert!((lhs - rhs).abs() <= 1e-12 * lhs.abs().max(1.0) * 100.0);
        }
    }
}
