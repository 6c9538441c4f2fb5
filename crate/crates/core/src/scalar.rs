//! Floating-point abstraction shared by every module.
//!
//! All model arithmetic is written against [`Scalar`], so the same code runs
//! in `f64` (the reference precision) and `f32`. Thresholds that only make
//! sense relative to the precision of the type live here as associated
//! constants rather than being scattered through the numerics.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Real scalar the dynamics are evaluated in.
pub trait Scalar:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + Serialize
    + DeserializeOwned
    + 'static
{
    /// Prey densities at or below this value count as extinction.
    const EXTINCTION_FLOOR: Self;
    /// Band around modulus one inside which an eigenvalue is nonhyperbolic.
    const HYPERBOLIC_TOL: Self;
    /// Absolute floor applied to relative convergence tolerances.
    const ABS_TOL_FLOOR: Self;

    /// Converts an `f64` literal. Every literal used by the crate is
    /// representable (possibly rounded) in both supported types.
    #[inline]
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("literal representable in scalar type")
    }

    /// Natural log with the per-step floor used by the Lyapunov estimators.
    #[inline]
    fn floored_ln(self) -> Self {
        self.abs().max(Self::EXTINCTION_FLOOR).ln()
    }
}

impl Scalar for f64 {
    const EXTINCTION_FLOOR: Self = 1e-300;
    const HYPERBOLIC_TOL: Self = 1e-9;
    const ABS_TOL_FLOOR: Self = 1e-9;
}

impl Scalar for f32 {
    // 1e-300 is not representable; the smallest normal f32 plays the same role.
    const EXTINCTION_FLOOR: Self = f32::MIN_POSITIVE;
    const HYPERBOLIC_TOL: Self = 1e-5;
    const ABS_TOL_FLOOR: Self = 1e-6;
}
