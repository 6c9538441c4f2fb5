//! Closed-form fixed points of the map and their spectral classification.

use std::fmt;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{ModelError, Result};
use crate::model::{spectrum, ModelParams, State};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FixedPointId {
    /// Prey-only point `((a-2)/b, 0)`.
    Lambda1,
    /// Coexistence point.
    Lambda2,
}

impl fmt::Display for FixedPointId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FixedPointId::Lambda1 => "lambda1",
            FixedPointId::Lambda2 => "lambda2",
        })
    }
}

/// Whether a fixed point lies in the phase domain, and why not otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Existence {
    Exists,
    /// `a <= 2`: the prey coordinate is not positive.
    PreyNotPositive,
    /// `K = b*alpha + c*(d-2) <= 0`.
    DenominatorNotPositive,
    /// `d < 2`: the predator coordinate is negative.
    PredatorNegative,
    /// `d = 2`: the coexistence point coincides with the prey-only point.
    CollapsedOntoLambda1,
}

impl Existence {
    pub fn exists(self) -> bool {
        self == Existence::Exists
    }

    fn reason(self) -> &'static str {
        match self {
            Existence::Exists => "exists",
            Existence::PreyNotPositive => "a <= 2 gives a non-positive prey coordinate",
            Existence::DenominatorNotPositive => "b*alpha + c*(d-2) <= 0",
            Existence::PredatorNegative => "d < 2 gives a negative predator coordinate",
            Existence::CollapsedOntoLambda1 => "d = 2 collapses lambda2 onto lambda1",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Classification {
    Nonhyperbolic,
    Attractive,
    Repeller,
    Saddle,
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Classification::Nonhyperbolic => "nonhyperbolic",
            Classification::Attractive => "attractive",
            Classification::Repeller => "repeller",
            Classification::Saddle => "saddle",
        })
    }
}

/// Classifies from the two eigenvalue moduli; symmetric in its arguments.
pub fn classify_moduli<T: Scalar>(m1: T, m2: T) -> Classification {
    let one = T::one();
    let near_one = |m: T| (m - one).abs() < T::HYPERBOLIC_TOL;
    if near_one(m1) || near_one(m2) {
        Classification::Nonhyperbolic
    } else if m1 < one && m2 < one {
        Classification::Attractive
    } else if m1 > one && m2 > one {
        Classification::Repeller
    } else {
        Classification::Saddle
    }
}

/// Closed-form eigenvalue expressions at the coexistence point:
/// `mu1,2 = -(B +/- sqrt(D)) / (2K)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Scalar", serialize = "T: Scalar"))]
pub struct Lambda2ClosedForm<T> {
    /// `4 - d - (a-2) b alpha / K`.
    pub trace: T,
    /// `(3-d)(1 - (a-2) b alpha / K) + c (a-2)(d-2)^2 / K`.
    pub det: T,
    pub k: T,
    pub b_coef: T,
    /// The expanded discriminant polynomial `D`.
    pub d_poly: T,
}

impl<T: Scalar> Lambda2ClosedForm<T> {
    pub fn new(p: &ModelParams<T>) -> Self {
        let (a, b, c, d, al) = (p.a(), p.b(), p.c(), p.d(), p.alpha());
        let l = T::lit;
        let k = p.k();
        let shrink = (a - l(2.0)) * b * al / k;
        let trace = l(4.0) - d - shrink;
        let det = (l(3.0) - d) * (T::one() - shrink) + c * (a - l(2.0)) * (d - l(2.0)).powi(2) / k;
        let b_coef =
            a * b * al + b * d * al + c * d * d - l(6.0) * b * al - l(6.0) * c * d + l(8.0) * c;
        let (a2, b2, c2, d2, al2) = (a * a, b * b, c * c, d * d, al * al);
        let d3 = d2 * d;
        let d4 = d3 * d;
        let d_poly = a2 * b2 * al2
            - l(2.0) * a * b2 * d * al2
            - l(6.0) * a * b * c * d2 * al
            - l(4.0) * a * c2 * d3
            + b2 * d2 * al2
            + l(2.0) * b * c * d3 * al
            + c2 * d4
            + l(24.0) * a * b * c * d * al
            + l(24.0) * a * c2 * d2
            - l(24.0) * a * b * c * al
            - l(48.0) * a * c2 * d
            - l(24.0) * b * c * d * al
            - l(24.0) * c2 * d2
            + l(32.0) * a * c2
            + l(32.0) * b * c * al
            + l(64.0) * c2 * d
            - l(48.0) * c2;
        Self {
            trace,
            det,
            k,
            b_coef,
            d_poly,
        }
    }

    /// `[-(B + sqrt D)/(2K), -(B - sqrt D)/(2K)]`, defined for `D >= 0`.
    pub fn eigenvalues(&self) -> Option<[T; 2]> {
        if self.d_poly < T::zero() {
            return None;
        }
        let sq = self.d_poly.sqrt();
        let denom = T::lit(2.0) * self.k;
        Some([-(self.b_coef + sq) / denom, -(self.b_coef - sq) / denom])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Scalar", serialize = "T: Scalar"))]
pub struct FixedPointReport<T> {
    pub id: FixedPointId,
    pub location: State<T>,
    pub existence: Existence,
    pub eigenvalues: [Complex<T>; 2],
    pub trace: T,
    pub det: T,
    /// Discriminant polynomial `D` (coexistence point only).
    pub discriminant_d: Option<T>,
    /// Closed-form roots, when `D >= 0`.
    pub closed_form_eigenvalues: Option<[T; 2]>,
    /// Largest relative gap between closed-form and quadratic roots.
    pub closed_form_gap: Option<T>,
    pub classification: Classification,
}

impl<T: Scalar> FixedPointReport<T> {
    pub fn moduli(&self) -> [T; 2] {
        [self.eigenvalues[0].norm(), self.eigenvalues[1].norm()]
    }
}

pub fn lambda1_status<T: Scalar>(p: &ModelParams<T>) -> Existence {
    if p.a() > T::lit(2.0) {
        Existence::Exists
    } else {
        Existence::PreyNotPositive
    }
}

pub fn lambda2_status<T: Scalar>(p: &ModelParams<T>) -> Existence {
    let two = T::lit(2.0);
    if p.a() <= two {
        Existence::PreyNotPositive
    } else if p.k() <= T::zero() {
        Existence::DenominatorNotPositive
    } else if p.d() < two {
        Existence::PredatorNegative
    } else if p.d() == two {
        Existence::CollapsedOntoLambda1
    } else {
        Existence::Exists
    }
}

pub fn lambda1_location<T: Scalar>(p: &ModelParams<T>) -> Option<State<T>> {
    lambda1_status(p)
        .exists()
        .then(|| State::on_axis((p.a() - T::lit(2.0)) / p.b()).ok())
        .flatten()
}

pub fn lambda2_location<T: Scalar>(p: &ModelParams<T>) -> Option<State<T>> {
    if !lambda2_status(p).exists() {
        return None;
    }
    let two = T::lit(2.0);
    let k = p.k();
    State::new(
        (p.a() - two) * p.alpha() / k,
        (p.a() - two) * (p.d() - two) / k,
    )
    .ok()
}

/// Prey-only fixed point with eigenvalues `3-a` and `d-1`.
pub fn classify_lambda1<T: Scalar>(p: &ModelParams<T>) -> Result<FixedPointReport<T>> {
    let location = lambda1_location(p).ok_or(ModelError::NotAFixedPoint {
        which: "lambda1",
        reason: Existence::PreyNotPositive.reason(),
    })?;
    let nu1 = T::lit(3.0) - p.a();
    let nu2 = p.d() - T::one();
    Ok(FixedPointReport {
        id: FixedPointId::Lambda1,
        location,
        existence: Existence::Exists,
        eigenvalues: [Complex::new(nu1, T::zero()), Complex::new(nu2, T::zero())],
        trace: nu1 + nu2,
        det: nu1 * nu2,
        discriminant_d: None,
        closed_form_eigenvalues: None,
        closed_form_gap: None,
        classification: classify_moduli(nu1.abs(), nu2.abs()),
    })
}

/// Coexistence fixed point, classified from the roots of its characteristic
/// quadratic and cross-checked against the closed-form expressions.
pub fn classify_lambda2<T: Scalar>(p: &ModelParams<T>) -> Result<FixedPointReport<T>> {
    let status = lambda2_status(p);
    let location = lambda2_location(p).ok_or(ModelError::NotAFixedPoint {
        which: "lambda2",
        reason: status.reason(),
    })?;
    let cf = Lambda2ClosedForm::new(p);
    let eigenvalues = spectrum(cf.trace, cf.det);
    let closed = cf.eigenvalues();
    let gap = closed.map(|roots| closed_form_gap(&roots, &eigenvalues));
    Ok(FixedPointReport {
        id: FixedPointId::Lambda2,
        location,
        existence: Existence::Exists,
        eigenvalues,
        trace: cf.trace,
        det: cf.det,
        discriminant_d: Some(cf.d_poly),
        closed_form_eigenvalues: closed,
        closed_form_gap: gap,
        classification: classify_moduli(eigenvalues[0].norm(), eigenvalues[1].norm()),
    })
}

/// Relative distance between two root sets, matched without regard to order.
fn closed_form_gap<T: Scalar>(closed: &[T; 2], roots: &[Complex<T>; 2]) -> T {
    let rel =
        |u: T, v: Complex<T>| (Complex::new(u, T::zero()) - v).norm() / v.norm().max(T::one());
    let straight = rel(closed[0], roots[0]).max(rel(closed[1], roots[1]));
    let swapped = rel(closed[0], roots[1]).max(rel(closed[1], roots[0]));
    straight.min(swapped)
}

/// Every fixed point that lies in the domain. Empty for `a <= 2`.
pub fn fixed_points<T: Scalar>(p: &ModelParams<T>) -> Vec<FixedPointReport<T>> {
    [classify_lambda1(p).ok(), classify_lambda2(p).ok()]
        .into_iter()
        .flatten()
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(a: f64, b: f64, c: f64, d: f64, alpha: f64) -> ModelParams<f64> {
        ModelParams::new(a, b, c, d, alpha).unwrap()
    }

    #[test]
    fn coexistence_points_of_numerical_cases() {
        let l2 = lambda2_location(&params(3.0, 2.0, 5.0, 4.0, 1.0)).unwrap();
        assert!((l2.x() - 1.0 / 12.0).abs() < 1e-15);
        assert!((l2.y() - 1.0 / 6.0).abs() < 1e-15);
        let l2 = lambda2_location(&params(3.0, 1.0, 2.0, 4.5, 2.0)).unwrap();
        assert!((l2.x() - 2.0 / 7.0).abs() < 1e-15);
        assert!((l2.y() - 5.0 / 14.0).abs() < 1e-15);
    }

    #[test]
    fn no_fixed_points_at_a_equal_two() {
        assert!(fixed_points(&params(2.0, 1.0, 1.0, 3.0, 1.0)).is_empty());
        assert!(matches!(
            classify_lambda1(&params(2.0, 1.0, 1.0, 3.0, 1.0)),
            Err(ModelError::NotAFixedPoint { .. })
        ));
    }

    #[test]
    fn existence_flags() {
        assert_eq!(
            lambda2_status(&params(3.0, 1.0, 1.0, 2.0, 1.0)),
            Existence::CollapsedOntoLambda1
        );
        assert_eq!(
            lambda2_status(&params(3.0, 1.0, 1.0, 1.5, 1.0)),
            Existence::PredatorNegative
        );
        // K = 0.1 + 10 * (1.5 - 2) < 0
        assert_eq!(
            lambda2_status(&params(3.0, 1.0, 10.0, 1.5, 0.1)),
            Existence::DenominatorNotPositive
        );
        assert_eq!(fixed_points(&params(3.0, 1.0, 1.0, 2.0, 1.0)).len(), 1);
        assert_eq!(fixed_points(&params(3.0, 1.0, 1.0, 3.0, 1.0)).len(), 2);
    }

    #[test]
    fn lambda1_classification_table() {
        let cases = [
            ((3.0, 1.5), Classification::Attractive),
            ((5.0, 3.0), Classification::Repeller),
            ((3.0, 3.0), Classification::Saddle),
            ((5.0, 1.5), Classification::Saddle),
            ((4.0, 1.5), Classification::Nonhyperbolic),
            ((3.0, 2.0), Classification::Nonhyperbolic),
        ];
        for ((a, d), want) in cases {
            let r = classify_lambda1(&params(a, 1.0, 2.0, d, 1.0)).unwrap();
            assert_eq!(r.classification, want, "a={a} d={d}");
        }
    }

    #[test]
    fn lambda2_attractive_complex_pair() {
        let r = classify_lambda2(&params(3.0, 1.0, 2.0, 4.5, 0.5)).unwrap();
        // T = -13/22, det = 10/11 by direct substitution
        assert!((r.trace - (-13.0 / 22.0)).abs() < 1e-14);
        assert!((r.det - 10.0 / 11.0).abs() < 1e-14);
        assert!(r.eigenvalues[0].im != 0.0);
        let m = r.moduli();
        assert!((m[0] - (10.0f64 / 11.0).sqrt()).abs() < 1e-12);
        assert_eq!(r.classification, Classification::Attractive);
        assert!(r.discriminant_d.unwrap() < 0.0);
        assert!(r.closed_form_eigenvalues.is_none());
    }

    #[test]
    fn lambda2_convergence_case() {
        let r = classify_lambda2(&params(3.0, 1.0, 2.0, 4.5, 2.0)).unwrap();
        // T = -11/14, det = 5/7
        assert!((r.trace - (-11.0 / 14.0)).abs() < 1e-14);
        assert!((r.det - 5.0 / 7.0).abs() < 1e-14);
        assert_eq!(r.classification, Classification::Attractive);
    }

    #[test]
    fn lambda2_spectrum_approaches_lambda1_at_collapse() {
        let (a, b, c, alpha) = (3.3, 1.0, 2.0, 1.5);
        let near = params(a, b, c, 2.0 + 1e-6, alpha);
        let l2 = classify_lambda2(&near).unwrap();
        let l1 = classify_lambda1(&near).unwrap();
        let mut e2: Vec<f64> = l2.eigenvalues.iter().map(|z| z.re).collect();
        let mut e1: Vec<f64> = l1.eigenvalues.iter().map(|z| z.re).collect();
        e2.sort_by(f64::total_cmp);
        e1.sort_by(f64::total_cmp);
        for (u, v) in e1.iter().zip(&e2) {
            assert!((u - v).abs() < 1e-3);
        }
    }

    #[test]
    fn jacobian_at_lambda2_matches_closed_trace_and_det() {
        let p = params(3.4, 1.2, 0.7, 3.3, 1.8);
        let r = classify_lambda2(&p).unwrap();
        let j = p.jacobian(r.location);
        assert!((j.trace() - r.trace).abs() < 1e-12);
        assert!((j.det() - r.det).abs() < 1e-12);
        let (a, b, c, d, alpha) = (3.4, 1.2, 0.7, 3.3, 1.8);
        let k = b * alpha + c * (d - 2.0);
        assert!((j.j11 - (1.0 - (a - 2.0) * b * alpha / k)).abs() < 1e-12);
        assert!((j.j12 + (a - 2.0) * c * alpha / k).abs() < 1e-12);
        assert!((j.j21 - (d - 2.0) * (d - 2.0) / alpha).abs() < 1e-12);
        assert!((j.j22 - (3.0 - d)).abs() < 1e-12);
    }

    #[test]
    fn classification_ignores_eigenvalue_order() {
        for &(m1, m2) in &[(0.5, 1.5), (0.2, 0.9), (1.2, 3.0), (1.0, 0.3)] {
            assert_eq!(classify_moduli(m1, m2), classify_moduli(m2, m1));
        }
    }

    #[test]
    fn single_precision_fixed_points() {
        let p = ModelParams::<f32>::new(3.0, 1.0, 2.0, 4.5, 2.0).unwrap();
        let r = classify_lambda2(&p).unwrap();
        assert!((r.location.x() - 2.0 / 7.0).abs() < 1e-6);
        assert_eq!(r.classification, Classification::Attractive);
    }
}
