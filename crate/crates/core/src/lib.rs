//! Discrete-time Leslie prey-predator map
//!
//! ```text
//! x' = x (a - 1 - b x - c y)
//! y' = y (d - 1 - alpha y / x)
//! ```
//!
//! on the domain `x > 0, y >= 0`, with closed-form fixed points and their
//! stability, the invariant sets M1 and M2, the logistic conjugacy of the
//! prey-axis map, limit-cycle detection, parameter sweeps and Lyapunov
//! exponents.
//!
//! Everything is generic over [`Scalar`] (`f64` or `f32`). The `*64` aliases
//! below fix the reference precision, which the CLI uses throughout.

pub mod conjugacy;
pub mod error;
pub mod fixed_points;
pub mod invariant;
pub mod io;
pub mod lyapunov;
pub mod model;
pub mod scalar;
pub mod trajectory;

pub use conjugacy::{
    axis_orbit, conjugacy, cycle2, f1d, p0, p0_preimage, regime_1d, AxisOrbit, ConjugacyMap,
    Cycle2Report, RegimeLabel,
};
pub use error::{ModelError, Result};
pub use fixed_points::{
    classify_lambda1, classify_lambda2, fixed_points, Classification, Existence, FixedPointId,
    FixedPointReport,
};
pub use invariant::{
    in_m1, in_m2, m2_condition2_xbound, verify_invariance, ConditionBranch, InvarianceVerdict,
    SetId,
};
pub use lyapunov::{
    lyapunov_1d, lyapunov_max, lyapunov_max_with, LyapunovEstimate, LyapunovOptions,
};
pub use model::{
    DomainExit, DomainViolation, JacobianMatrix, ModelParams, Parameter, State, StepResult,
};
pub use scalar::Scalar;
pub use trajectory::{
    bifurcation_sweep, cycle_multipliers, detect_cycle, detect_limit, iterate, iterate_until_limit,
    CycleDetection, DetectOptions, SweepRow, SweepSpec, Termination, Trajectory,
};

pub type ModelParams64 = ModelParams<f64>;
pub type State64 = State<f64>;
pub type JacobianMatrix64 = JacobianMatrix<f64>;
pub type FixedPointReport64 = FixedPointReport<f64>;
pub type Trajectory64 = Trajectory<f64>;
pub type CycleDetection64 = CycleDetection<f64>;
pub type SweepRow64 = SweepRow<f64>;
pub type LyapunovEstimate64 = LyapunovEstimate<f64>;
pub type InvarianceVerdict64 = InvarianceVerdict<f64>;
pub type ConjugacyMap64 = ConjugacyMap<f64>;
pub type Cycle2Report64 = Cycle2Report<f64>;

pub type ModelParams32 = ModelParams<f32>;
pub type State32 = State<f32>;
pub type Trajectory32 = Trajectory<f32>;
