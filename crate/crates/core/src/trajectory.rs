//! Orbit iteration, limit-cycle detection and one-parameter sweeps.

use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{ModelError, Result};
use crate::model::{DomainExit, JacobianMatrix, ModelParams, Parameter, State, StepResult};
use crate::scalar::Scalar;

/// Why iteration stopped.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(
    tag = "kind",
    rename_all = "kebab-case",
    bound(deserialize = "T: Scalar", serialize = "T: Scalar")
)]
pub enum Termination<T> {
    MaxSteps,
    /// A period-1 limit was detected after `step` steps.
    Converged {
        step: usize,
    },
    /// A cycle of the given minimal period was detected after `step` steps.
    Cycle {
        period: usize,
        step: usize,
    },
    /// Step number `step` produced an image outside the domain.
    DomainExit {
        step: usize,
        exit: DomainExit<T>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Scalar", serialize = "T: Scalar"))]
pub struct Trajectory<T> {
    pub params: ModelParams<T>,
    pub initial: State<T>,
    /// `states[0] == initial`; consecutive entries are related by one step.
    pub states: Vec<State<T>>,
    pub termination: Termination<T>,
}

impl<T: Scalar> Trajectory<T> {
    pub fn last(&self) -> State<T> {
        *self
            .states
            .last()
            .expect("trajectory holds its initial state")
    }

    /// Number of steps applied.
    pub fn steps(&self) -> usize {
        self.states.len() - 1
    }
}

/// Tolerances for limit detection.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Scalar", serialize = "T: Scalar"))]
pub struct DetectOptions<T> {
    /// Relative tolerance on `||s_{k+p} - s_k||_inf`, scaled by `||s_k||_inf`
    /// and floored at [`Scalar::ABS_TOL_FLOOR`].
    pub tol: T,
    pub transient: usize,
    pub max_period: usize,
}

impl<T: Scalar> Default for DetectOptions<T> {
    fn default() -> Self {
        Self {
            tol: T::lit(1e-6),
            transient: 1000,
            max_period: 64,
        }
    }
}

impl<T: Scalar> DetectOptions<T> {
    #[inline]
    fn threshold(&self, s: &State<T>) -> T {
        (self.tol * s.inf_norm()).max(T::ABS_TOL_FLOOR)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Scalar", serialize = "T: Scalar"))]
pub struct CycleDetection<T> {
    /// Minimal period; 1 is a fixed point.
    pub period: usize,
    /// The last `period` states of the trajectory, in orbit order.
    pub points: Vec<State<T>>,
    /// Largest `||s_{k+period} - s_k||_inf` over the verification window.
    pub residual: T,
}

/// Applies the operator up to `n` times, stopping early at a domain exit.
pub fn iterate<T: Scalar>(p: &ModelParams<T>, s0: State<T>, n: usize) -> Trajectory<T> {
    let mut states = Vec::with_capacity(n + 1);
    states.push(s0);
    let mut s = s0;
    for k in 1..=n {
        match p.step(s) {
            StepResult::Next(next) => {
                states.push(next);
                s = next;
            }
            StepResult::DomainExit(exit) => {
                return Trajectory {
                    params: *p,
                    initial: s0,
                    states,
                    termination: Termination::DomainExit { step: k, exit },
                };
            }
        }
    }
    Trajectory {
        params: *p,
        initial: s0,
        states,
        termination: Termination::MaxSteps,
    }
}

/// Finds the minimal period of the tail of `states`.
///
/// The verification window is the final `2 * max_period` states, which lie
/// past the transient when `states.len() > transient + 2 * max_period`. A
/// period `p` qualifies when every pair `(s_k, s_{k+p})` inside the window is
/// within tolerance. Periods are tried in increasing order, so no divisor of
/// the reported period qualifies.
pub fn detect_cycle<T: Scalar>(
    states: &[State<T>],
    opts: &DetectOptions<T>,
) -> Result<Option<CycleDetection<T>>> {
    let max_period = opts.max_period.max(1);
    let needed = opts.transient + 2 * max_period;
    let len = states.len();
    if len <= needed {
        return Err(ModelError::InsufficientData { len, needed });
    }
    let window = &states[len - 2 * max_period..];
    'period: for period in 1..=max_period {
        let mut residual = T::zero();
        for k in 0..window.len() - period {
            let dev = window[k + period].distance_inf(&window[k]);
            if dev.is_nan() || dev >= opts.threshold(&window[k]) {
                continue 'period;
            }
            residual = residual.max(dev);
        }
        return Ok(Some(CycleDetection {
            period,
            points: states[len - period..].to_vec(),
            residual,
        }));
    }
    Ok(None)
}

pub fn detect_limit<T: Scalar>(
    t: &Trajectory<T>,
    opts: &DetectOptions<T>,
) -> Result<Option<CycleDetection<T>>> {
    detect_cycle(&t.states, opts)
}

/// Iterates until a limit cycle of period at most `opts.max_period` is
/// detected, the orbit leaves the domain, or `max_steps` is reached.
pub fn iterate_until_limit<T: Scalar>(
    p: &ModelParams<T>,
    s0: State<T>,
    max_steps: usize,
    opts: &DetectOptions<T>,
) -> Trajectory<T> {
    let check_every = 2 * opts.max_period.max(1);
    let mut states = Vec::with_capacity(max_steps.min(1 << 20) + 1);
    states.push(s0);
    let mut s = s0;
    for k in 1..=max_steps {
        match p.step(s) {
            StepResult::Next(next) => {
                states.push(next);
                s = next;
            }
            StepResult::DomainExit(exit) => {
                return Trajectory {
                    params: *p,
                    initial: s0,
                    states,
                    termination: Termination::DomainExit { step: k, exit },
                };
            }
        }
        if k % check_every == 0 {
            if let Ok(Some(found)) = detect_cycle(&states, opts) {
                let termination = if found.period == 1 {
                    Termination::Converged { step: k }
                } else {
                    Termination::Cycle {
                        period: found.period,
                        step: k,
                    }
                };
                return Trajectory {
                    params: *p,
                    initial: s0,
                    states,
                    termination,
                };
            }
        }
    }
    Trajectory {
        params: *p,
        initial: s0,
        states,
        termination: Termination::MaxSteps,
    }
}

/// Eigenvalues of `J(s_{p-1}) ... J(s_0)` for cycle points in orbit order.
pub fn cycle_multipliers<T: Scalar>(p: &ModelParams<T>, points: &[State<T>]) -> [Complex<T>; 2] {
    points
        .iter()
        .fold(JacobianMatrix::identity(), |acc, &s| {
            p.jacobian(s).mul(&acc)
        })
        .eigenvalues()
}

/// One-parameter grid with the remaining parameters and the initial state fixed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Scalar", serialize = "T: Scalar"))]
pub struct SweepSpec<T> {
    pub base: ModelParams<T>,
    pub parameter: Parameter,
    pub start: T,
    pub end: T,
    /// Number of grid values, endpoints included.
    pub points: usize,
    pub initial: State<T>,
}

impl<T: Scalar> SweepSpec<T> {
    pub fn grid(&self) -> Vec<T> {
        if self.points <= 1 {
            return vec![self.start];
        }
        let last = T::from_usize(self.points - 1).expect("grid size fits the scalar");
        (0..self.points)
            .map(|i| {
                let i = T::from_usize(i).expect("grid index fits the scalar");
                self.start + (self.end - self.start) * i / last
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Scalar", serialize = "T: Scalar"))]
pub struct SweepRow<T> {
    pub value: T,
    /// States after the transient; shorter than requested on domain exit.
    pub samples: Vec<State<T>>,
    pub exit: Option<(usize, DomainExit<T>)>,
}

/// For every grid value: iterate from the spec's initial state, drop
/// `transient` states, keep the next `samples`. Rows may run on any number
/// of threads; the result is always in grid order.
pub fn bifurcation_sweep<T: Scalar>(
    spec: &SweepSpec<T>,
    transient: usize,
    samples: usize,
) -> Result<Vec<SweepRow<T>>> {
    if transient == 0 || samples == 0 {
        return Err(ModelError::InvalidArgument(
            "transient and samples must both be at least 1".into(),
        ));
    }
    if spec.points == 0 {
        return Err(ModelError::InvalidArgument(
            "sweep needs at least one point".into(),
        ));
    }
    let rows: Vec<(T, ModelParams<T>)> = spec
        .grid()
        .into_iter()
        .map(|v| spec.base.with(spec.parameter, v).map(|p| (v, p)))
        .collect::<Result<_>>()?;

    Ok(rows
        .into_par_iter()
        .map(|(value, p)| sweep_row(&p, value, spec.initial, transient, samples))
        .collect())
}

fn sweep_row<T: Scalar>(
    p: &ModelParams<T>,
    value: T,
    s0: State<T>,
    transient: usize,
    samples: usize,
) -> SweepRow<T> {
    let mut kept = Vec::with_capacity(samples);
    let mut s = s0;
    for k in 1..=transient + samples {
        match p.step(s) {
            StepResult::Next(next) => s = next,
            StepResult::DomainExit(exit) => {
                return SweepRow {
                    value,
                    samples: kept,
                    exit: Some((k, exit)),
                }
            }
        }
        if k > transient {
            kept.push(s);
        }
    }
    SweepRow {
        value,
        samples: kept,
        exit: None,
    }
}
