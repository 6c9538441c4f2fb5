//! Parameters, phase states, the one-step operator and its Jacobian.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{ModelError, Result};
use crate::scalar::Scalar;

/// The five positive parameters of the map.
///
/// `a` and `d` are prey and predator growth, `b` is prey self-limitation,
/// `c` the predation coefficient and `alpha` predator crowding.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams<T>", bound(deserialize = "T: Scalar"))]
pub struct ModelParams<T> {
    a: T,
    b: T,
    c: T,
    d: T,
    alpha: T,
}

#[derive(Deserialize)]
#[serde(bound(deserialize = "T: Scalar"))]
struct RawParams<T> {
    a: T,
    b: T,
    c: T,
    d: T,
    alpha: T,
}

impl<T: Scalar> TryFrom<RawParams<T>> for ModelParams<T> {
    type Error = ModelError;

    fn try_from(raw: RawParams<T>) -> Result<Self> {
        ModelParams::new(raw.a, raw.b, raw.c, raw.d, raw.alpha)
    }
}

fn check<T: Scalar>(
    name: &'static str,
    value: T,
    ok: bool,
    requirement: &'static str,
) -> Result<()> {
    if ok && value.is_finite() {
        Ok(())
    } else {
        Err(ModelError::InvalidParams {
            name,
            value: value.to_f64().unwrap_or(f64::NAN),
            requirement,
        })
    }
}

impl<T: Scalar> ModelParams<T> {
    /// Validates `a > 1`, `d > 1` and `b, c, alpha > 0`.
    pub fn new(a: T, b: T, c: T, d: T, alpha: T) -> Result<Self> {
        let one = T::one();
        let zero = T::zero();
        check("a", a, a > one, "a > 1")?;
        check("b", b, b > zero, "b > 0")?;
        check("c", c, c > zero, "c > 0")?;
        check("d", d, d > one, "d > 1")?;
        check("alpha", alpha, alpha > zero, "alpha > 0")?;
        Ok(Self { a, b, c, d, alpha })
    }

    #[inline]
    pub fn a(&self) -> T {
        self.a
    }
    #[inline]
    pub fn b(&self) -> T {
        self.b
    }
    #[inline]
    pub fn c(&self) -> T {
        self.c
    }
    #[inline]
    pub fn d(&self) -> T {
        self.d
    }
    #[inline]
    pub fn alpha(&self) -> T {
        self.alpha
    }

    pub fn get(&self, which: Parameter) -> T {
        match which {
            Parameter::A => self.a,
            Parameter::B => self.b,
            Parameter::C => self.c,
            Parameter::D => self.d,
            Parameter::Alpha => self.alpha,
        }
    }

    /// Copy with one parameter replaced, revalidated.
    pub fn with(&self, which: Parameter, value: T) -> Result<Self> {
        let mut p = *self;
        match which {
            Parameter::A => p.a = value,
            Parameter::B => p.b = value,
            Parameter::C => p.c = value,
            Parameter::D => p.d = value,
            Parameter::Alpha => p.alpha = value,
        }
        Self::new(p.a, p.b, p.c, p.d, p.alpha)
    }

    /// `K = b*alpha + c*(d - 2)`, the denominator of the coexistence point.
    #[inline]
    pub fn k(&self) -> T {
        self.b * self.alpha + self.c * (self.d - T::lit(2.0))
    }

    /// One application of the evolution operator.
    pub fn step(&self, s: State<T>) -> StepResult<T> {
        let one = T::one();
        let (x, y) = (s.x, s.y);
        let nx = x * (self.a - one - self.b * x - self.c * y);
        let mut ny = y * (self.d - one - self.alpha * y / x);
        // y * (negative factor) at y = 0 yields -0.0; keep the axis exactly at +0.
        if ny == T::zero() {
            ny = T::zero();
        }
        let violation = if !nx.is_finite() || !ny.is_finite() {
            Some(DomainViolation::NonFinite)
        } else if nx <= T::zero() {
            Some(DomainViolation::PreyNonPositive)
        } else if nx <= T::EXTINCTION_FLOOR {
            Some(DomainViolation::PreyUnderflow)
        } else if ny < T::zero() {
            Some(DomainViolation::PredatorNegative)
        } else {
            None
        };
        match violation {
            None => StepResult::Next(State { x: nx, y: ny }),
            Some(violation) => StepResult::DomainExit(DomainExit {
                raw: (nx, ny),
                violation,
            }),
        }
    }

    /// Partial derivatives of the operator at `s`.
    pub fn jacobian(&self, s: State<T>) -> JacobianMatrix<T> {
        let one = T::one();
        let two = T::lit(2.0);
        let (x, y) = (s.x, s.y);
        let ratio = y / x;
        JacobianMatrix {
            j11: self.a - one - two * self.b * x - self.c * y,
            j12: -self.c * x,
            j21: self.alpha * ratio * ratio,
            j22: self.d - one - two * self.alpha * ratio,
        }
    }
}

/// Selector for one of the five model parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parameter {
    A,
    B,
    C,
    D,
    Alpha,
}

impl Parameter {
    pub fn name(self) -> &'static str {
        match self {
            Parameter::A => "a",
            Parameter::B => "b",
            Parameter::C => "c",
            Parameter::D => "d",
            Parameter::Alpha => "alpha",
        }
    }
}

impl fmt::Display for Parameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Parameter {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "a" => Ok(Parameter::A),
            "b" => Ok(Parameter::B),
            "c" => Ok(Parameter::C),
            "d" => Ok(Parameter::D),
            "alpha" => Ok(Parameter::Alpha),
            other => Err(ModelError::InvalidArgument(format!(
                "unknown parameter '{other}' (expected a, b, c, d or alpha)"
            ))),
        }
    }
}

/// A point of the phase domain: prey `x > 0`, predator `y >= 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(
    try_from = "(T, T)",
    into = "(T, T)",
    bound(deserialize = "T: Scalar", serialize = "T: Scalar")
)]
pub struct State<T> {
    x: T,
    y: T,
}

impl<T: Scalar> State<T> {
    pub fn new(x: T, y: T) -> Result<Self> {
        if x.is_finite() && y.is_finite() && x > T::zero() && y >= T::zero() {
            Ok(Self { x, y })
        } else {
            Err(ModelError::InvalidState {
                x: x.to_f64().unwrap_or(f64::NAN),
                y: y.to_f64().unwrap_or(f64::NAN),
            })
        }
    }

    /// Point on the prey axis.
    pub fn on_axis(x: T) -> Result<Self> {
        Self::new(x, T::zero())
    }

    #[inline]
    pub fn x(&self) -> T {
        self.x
    }
    #[inline]
    pub fn y(&self) -> T {
        self.y
    }

    #[inline]
    pub fn inf_norm(&self) -> T {
        self.x.abs().max(self.y.abs())
    }

    #[inline]
    pub fn distance_inf(&self, other: &Self) -> T {
        (self.x - other.x).abs().max((self.y - other.y).abs())
    }

    pub fn distance(&self, other: &Self) -> T {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

impl<T: Scalar> TryFrom<(T, T)> for State<T> {
    type Error = ModelError;

    fn try_from((x, y): (T, T)) -> Result<Self> {
        State::new(x, y)
    }
}

impl<T: Scalar> From<State<T>> for (T, T) {
    fn from(s: State<T>) -> Self {
        (s.x, s.y)
    }
}

/// Which domain constraint an image violated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DomainViolation {
    /// `x' <= 0`.
    PreyNonPositive,
    /// `0 < x' <= 1e-300`, treated as extinction.
    PreyUnderflow,
    /// `y' < 0`.
    PredatorNegative,
    /// Overflow or NaN.
    NonFinite,
}

impl fmt::Display for DomainViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DomainViolation::PreyNonPositive => "prey-non-positive",
            DomainViolation::PreyUnderflow => "prey-underflow",
            DomainViolation::PredatorNegative => "predator-negative",
            DomainViolation::NonFinite => "non-finite",
        })
    }
}

/// The raw image of a step that left the domain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Scalar", serialize = "T: Scalar"))]
pub struct DomainExit<T> {
    pub raw: (T, T),
    pub violation: DomainViolation,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepResult<T> {
    Next(State<T>),
    DomainExit(DomainExit<T>),
}

impl<T: Scalar> StepResult<T> {
    pub fn state(self) -> Option<State<T>> {
        match self {
            StepResult::Next(s) => Some(s),
            StepResult::DomainExit(_) => None,
        }
    }
}

/// 2x2 Jacobian, row-major.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Scalar", serialize = "T: Scalar"))]
pub struct JacobianMatrix<T> {
    pub j11: T,
    pub j12: T,
    pub j21: T,
    pub j22: T,
}

impl<T: Scalar> JacobianMatrix<T> {
    pub fn identity() -> Self {
        Self {
            j11: T::one(),
            j12: T::zero(),
            j21: T::zero(),
            j22: T::one(),
        }
    }

    #[inline]
    pub fn trace(&self) -> T {
        self.j11 + self.j22
    }

    #[inline]
    pub fn det(&self) -> T {
        self.j11 * self.j22 - self.j12 * self.j21
    }

    #[inline]
    pub fn apply(&self, v: (T, T)) -> (T, T) {
        (
            self.j11 * v.0 + self.j12 * v.1,
            self.j21 * v.0 + self.j22 * v.1,
        )
    }

    /// Matrix product `self * rhs`.
    pub fn mul(&self, rhs: &Self) -> Self {
        Self {
            j11: self.j11 * rhs.j11 + self.j12 * rhs.j21,
            j12: self.j11 * rhs.j12 + self.j12 * rhs.j22,
            j21: self.j21 * rhs.j11 + self.j22 * rhs.j21,
            j22: self.j21 * rhs.j12 + self.j22 * rhs.j22,
        }
    }

    pub fn eigenvalues(&self) -> [Complex<T>; 2] {
        spectrum(self.trace(), self.det())
    }

    pub fn spectral_radius(&self) -> T {
        let [m1, m2] = self.eigenvalues();
        m1.norm().max(m2.norm())
    }
}

/// Roots of `mu^2 - trace*mu + det = 0`.
///
/// Real roots use the cancellation-free pairing `r2 = det / r1`; complex
/// roots are returned as a conjugate pair with positive imaginary part first.
pub fn spectrum<T: Scalar>(trace: T, det: T) -> [Complex<T>; 2] {
    let two = T::lit(2.0);
    let four = T::lit(4.0);
    let disc = trace * trace - four * det;
    if disc >= T::zero() {
        let sq = disc.sqrt();
        let r1 = if trace >= T::zero() {
            (trace + sq) / two
        } else {
            (trace - sq) / two
        };
        let r2 = if r1 != T::zero() { det / r1 } else { T::zero() };
        [Complex::new(r1, T::zero()), Complex::new(r2, T::zero())]
    } else {
        let re = trace / two;
        let im = (-disc).sqrt() / two;
        [Complex::new(re, im), Complex::new(re, -im)]
    }
}
