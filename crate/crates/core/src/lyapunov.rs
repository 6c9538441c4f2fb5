//! Largest Lyapunov exponent by tangent-vector propagation.
//!
//! A unit tangent vector is pushed through the Jacobian along the orbit and
//! renormalised every `renorm_interval` steps; the exponent is the mean of
//! the accumulated log growth. This has the same limit as the eigenvalues of
//! `(J_0 J_1 ... J_n)^(1/n)` without forming the product, whose entries
//! overflow long before the average settles.

use serde::{Deserialize, Serialize};

use crate::conjugacy::{f1d, f1d_derivative};
use crate::error::{ModelError, Result};
use crate::model::{ModelParams, State, StepResult};
use crate::scalar::Scalar;

/// Steps that must survive past the transient for an estimate to be usable.
pub const MIN_AVERAGED_STEPS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Scalar", serialize = "T: Scalar"))]
pub struct LyapunovEstimate<T> {
    /// Mean natural-log growth per step.
    pub lambda_max: T,
    /// Steps iterated, transient included.
    pub n_steps: usize,
    pub transient: usize,
    pub renorm_interval: usize,
    /// Steps that contributed to the average.
    pub averaged_steps: usize,
    /// The orbit left the domain before `n_steps` planned steps.
    pub terminated_early: bool,
    /// Mean of `ln|det J|`, the sum of both exponents (2D only).
    pub exponent_sum: Option<T>,
    /// `exponent_sum - lambda_max` (2D only).
    pub lambda_second: Option<T>,
    /// Gap between the averages over the first and second half of the window.
    pub drift: T,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LyapunovOptions {
    pub n: usize,
    pub transient: usize,
    pub renorm_interval: usize,
}

impl LyapunovOptions {
    pub fn new(n: usize, transient: usize) -> Self {
        Self {
            n,
            transient,
            renorm_interval: 1,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.n < self.transient + MIN_AVERAGED_STEPS {
            return Err(ModelError::InvalidArgument(format!(
                "n = {} must be at least transient + {MIN_AVERAGED_STEPS} = {}",
                self.n,
                self.transient + MIN_AVERAGED_STEPS
            )));
        }
        if self.renorm_interval == 0 {
            return Err(ModelError::InvalidArgument(
                "renorm_interval must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// Running sums for the averaged window, split in two halves for the drift.
struct Accumulator<T> {
    planned: usize,
    count: usize,
    first: T,
    second: T,
    first_count: usize,
}

impl<T: Scalar> Accumulator<T> {
    fn new(planned: usize) -> Self {
        Self {
            planned,
            count: 0,
            first: T::zero(),
            second: T::zero(),
            first_count: 0,
        }
    }

    /// Adds the log growth of a block of `steps` steps.
    fn add(&mut self, log_growth: T, steps: usize) {
        if self.count < self.planned / 2 {
            self.first = self.first + log_growth;
            self.first_count += steps;
        } else {
            self.second = self.second + log_growth;
        }
        self.count += steps;
    }

    fn mean(&self) -> T {
        (self.first + self.second) / count_as(self.count)
    }

    fn drift(&self) -> T {
        let second_count = self.count - self.first_count;
        if self.first_count == 0 || second_count == 0 {
            return T::zero();
        }
        (self.first / count_as(self.first_count) - self.second / count_as(second_count)).abs()
    }
}

fn count_as<T: Scalar>(n: usize) -> T {
    T::from_usize(n).expect("step count fits the scalar")
}

fn unit_diagonal<T: Scalar>() -> (T, T) {
    let c = T::FRAC_1_SQRT_2();
    (c, c)
}

/// Largest exponent of the 2D map from `s0`, renormalising every step.
pub fn lyapunov_max<T: Scalar>(
    p: &ModelParams<T>,
    s0: State<T>,
    n: usize,
    transient: usize,
) -> Result<LyapunovEstimate<T>> {
    lyapunov_max_with(p, s0, &LyapunovOptions::new(n, transient))
}

pub fn lyapunov_max_with<T: Scalar>(
    p: &ModelParams<T>,
    s0: State<T>,
    opts: &LyapunovOptions,
) -> Result<LyapunovEstimate<T>> {
    opts.validate()?;
    let mut acc = Accumulator::new(opts.n - opts.transient);
    let mut det_sum = T::zero();
    let mut v = unit_diagonal::<T>();
    let mut block_steps = 0usize;
    let mut s = s0;
    let mut terminated_early = false;
    let mut survived = 0usize;

    for k in 0..opts.n {
        let j = p.jacobian(s);
        v = j.apply(v);
        let averaging = k >= opts.transient;
        if averaging {
            det_sum = det_sum + j.det().floored_ln();
            block_steps += 1;
        }
        if !averaging || block_steps == opts.renorm_interval || k + 1 == opts.n {
            let norm = v.0.hypot(v.1);
            if averaging {
                acc.add(norm.floored_ln(), block_steps);
                block_steps = 0;
            }
            v = if norm > T::zero() && norm.is_finite() {
                (v.0 / norm, v.1 / norm)
            } else {
                unit_diagonal()
            };
        }
        match p.step(s) {
            StepResult::Next(next) => {
                s = next;
                survived = k + 1;
            }
            StepResult::DomainExit(_) => {
                terminated_early = true;
                survived = k + 1;
                if block_steps > 0 {
                    acc.add(v.0.hypot(v.1).floored_ln(), block_steps);
                }
                break;
            }
        }
    }

    if terminated_early && survived < opts.transient + MIN_AVERAGED_STEPS {
        return Err(ModelError::OrbitEscaped {
            step: survived,
            required: opts.transient + MIN_AVERAGED_STEPS,
        });
    }
    let lambda_max = acc.mean();
    let exponent_sum = det_sum / count_as(acc.count);
    Ok(LyapunovEstimate {
        lambda_max,
        n_steps: survived,
        transient: opts.transient,
        renorm_interval: opts.renorm_interval,
        averaged_steps: acc.count,
        terminated_early,
        exponent_sum: Some(exponent_sum),
        lambda_second: Some(exponent_sum - lambda_max),
        drift: acc.drift(),
    })
}

/// Exponent of the prey-axis map: the mean of `ln|a-1-2bx|` along the orbit.
pub fn lyapunov_1d<T: Scalar>(
    a: T,
    b: T,
    x0: T,
    n: usize,
    transient: usize,
) -> Result<LyapunovEstimate<T>> {
    let opts = LyapunovOptions::new(n, transient);
    opts.validate()?;
    let upper = (a - T::one()) / b;
    if !(x0 > T::zero() && x0 < upper) {
        return Err(ModelError::InvalidArgument(format!(
            "x0 = {x0} must lie in (0, (a-1)/b) = (0, {upper})"
        )));
    }
    let mut acc = Accumulator::new(n - transient);
    let mut x = x0;
    let mut terminated_early = false;
    let mut survived = 0usize;
    for k in 0..n {
        if k >= transient {
            acc.add(f1d_derivative(a, b, x).floored_ln(), 1);
        }
        let next = f1d(a, b, x);
        survived = k + 1;
        if !next.is_finite() || next <= T::EXTINCTION_FLOOR {
            terminated_early = true;
            break;
        }
        x = next;
    }
    if terminated_early && survived < transient + MIN_AVERAGED_STEPS {
        return Err(ModelError::OrbitEscaped {
            step: survived,
            required: transient + MIN_AVERAGED_STEPS,
        });
    }
    Ok(LyapunovEstimate {
        lambda_max: acc.mean(),
        n_steps: survived,
        transient,
        renorm_interval: 1,
        averaged_steps: acc.count,
        terminated_early,
        exponent_sum: None,
        lambda_second: None,
        drift: acc.drift(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conjugacy::cycle2;
    use crate::fixed_points::{classify_lambda1, classify_lambda2};
    use crate::model::JacobianMatrix;
    use crate::trajectory::{detect_limit, iterate, DetectOptions};

    fn params(a: f64, b: f64, c: f64, d: f64, alpha: f64) -> ModelParams<f64> {
        ModelParams::new(a, b, c, d, alpha).unwrap()
    }

    fn st(x: f64, y: f64) -> State<f64> {
        State::new(x, y).unwrap()
    }

    #[test]
    fn rejects_short_horizons() {
        let p = params(3.0, 1.0, 2.0, 4.5, 2.0);
        assert!(lyapunov_max(&p, st(0.25, 0.3), 1099, 1000).is_err());
        assert!(lyapunov_max(&p, st(0.25, 0.3), 1100, 1000).is_ok());
        assert!(lyapunov_1d(4.3, 1.0, 5.0, 2000, 100).is_err());
    }

    #[test]
    fn fixed_orbit_at_lambda1() {
        // nu = (3 - a, d - 1) = (-0.3, 0.8)
        let p = params(3.3, 1.0, 2.0, 1.8, 1.0);
        let l1 = classify_lambda1(&p).unwrap();
        let est = lyapunov_max(&p, l1.location, 100_000, 1000).unwrap();
        let want = 0.8f64.ln();
        assert!(
            (est.lambda_max - want).abs() < 1e-9,
            "{}",
            est.lambda_max - want
        );
        // both exponents are available from the determinant
        assert!((est.lambda_second.unwrap() - 0.3f64.ln()).abs() < 1e-9);
    }

    #[test]
    fn fixed_orbit_at_real_lambda2() {
        let p = params(2.5, 1.0, 0.5, 3.0, 4.0);
        let r = classify_lambda2(&p).unwrap();
        assert_eq!(r.eigenvalues[0].im, 0.0);
        let rho = r.moduli()[0].max(r.moduli()[1]);
        let est = lyapunov_max(&p, r.location, 100_000, 1000).unwrap();
        assert!((est.lambda_max - rho.ln()).abs() < 1e-9);
    }

    #[test]
    fn renormalisation_interval_does_not_matter() {
        for (p, s0) in [
            (params(3.0, 1.0, 2.0, 4.5, 2.0), st(0.25, 0.3)),
            (params(3.9, 2.0, 2.0, 3.6, 3.0), st(0.5, 0.4)),
            (params(3.7, 2.0, 2.0, 3.6, 3.0), st(0.5, 0.3)),
        ] {
            let one = lyapunov_max_with(&p, s0, &LyapunovOptions::new(50_000, 1000)).unwrap();
            let ten = lyapunov_max_with(
                &p,
                s0,
                &LyapunovOptions {
                    renorm_interval: 10,
                    ..LyapunovOptions::new(50_000, 1000)
                },
            )
            .unwrap();
            assert!((one.lambda_max - ten.lambda_max).abs() < 1e-6);
        }
    }

    #[test]
    fn convergent_case_matches_spectral_radius() {
        let p = params(3.0, 1.0, 2.0, 4.5, 2.0);
        let est = lyapunov_max(&p, st(0.25, 0.3), 100_000, 1000).unwrap();
        // complex pair at lambda2, modulus sqrt(5/7)
        let want = (5.0f64 / 7.0).sqrt().ln();
        assert!(est.lambda_max < 0.0);
        assert!((est.lambda_max - want).abs() < 1e-3);
    }

    #[test]
    fn orbit_from_section_five_settles_on_a_23_cycle() {
        // chaotic transient first, then an attracting cycle
        let p = params(3.9, 2.0, 2.0, 3.6, 3.0);
        let early = lyapunov_max(&p, st(0.5, 0.4), 5_000, 0).unwrap();
        assert!(early.lambda_max > 0.05);

        let t = iterate(&p, st(0.5, 0.4), 100_000);
        let cycle = detect_limit(&t, &DetectOptions::default())
            .unwrap()
            .unwrap();
        assert_eq!(cycle.period, 23);
        // independent route: spectral radius of the cycle's Jacobian product
        let prod = cycle
            .points
            .iter()
            .fold(JacobianMatrix::identity(), |m, s| p.jacobian(*s).mul(&m));
        let cycle_exponent = prod.spectral_radius().ln() / 23.0;
        assert!((cycle_exponent - (-0.053296)).abs() < 1e-5);

        let late = lyapunov_max(&p, st(0.5, 0.4), 100_000, 20_000).unwrap();
        assert!((late.lambda_max - cycle_exponent).abs() < 1e-3);
    }

    #[test]
    fn two_cycle_exponent_on_axis() {
        for a in [4.1, 4.3, 4.44] {
            let c = cycle2(a, 1.0).unwrap();
            let want = 0.5 * (-a * a + 4.0 * a + 1.0f64).abs().ln();
            let est = lyapunov_1d(a, 1.0, c.p1, 10_100, 100).unwrap();
            assert!((est.lambda_max - want).abs() < 1e-9, "a = {a}");
        }
        // from a generic start the orbit is attracted to the same cycle
        let est = lyapunov_1d(4.3, 1.0, 1.2, 100_000, 1000).unwrap();
        assert!((est.lambda_max - 0.5 * 0.29f64.ln()).abs() < 1e-4);
    }

    #[test]
    fn superstable_point_stays_finite() {
        let est = lyapunov_1d(3.0f64, 1.0, 0.5, 2_000, 100).unwrap();
        assert!(est.lambda_max.is_finite());
        assert!(est.lambda_max < -5.0);
    }

    #[test]
    fn chaotic_axis_map_agrees_with_logistic_map() {
        let est = lyapunov_1d(4.8, 1.0, 0.3, 200_000, 1000).unwrap();
        assert!(est.lambda_max > 0.0);
        // conjugate logistic map r x(1-x) with r = a - 1, averaged independently
        let r = 3.8f64;
        let mut x = 0.37;
        let mut sum = 0.0;
        for _ in 0..1000 {
            x = r * x * (1.0 - x);
        }
        for _ in 0..200_000 {
            sum += (r * (1.0 - 2.0 * x)).abs().ln();
            x = r * x * (1.0 - x);
        }
        assert!((est.lambda_max - sum / 200_000.0).abs() < 0.02);
    }

    #[test]
    fn escaping_axis_orbit_is_flagged() {
        // a > 5: orbits leave the interval
        match lyapunov_1d(5.5, 1.0, 0.3, 10_000, 1000) {
            Err(ModelError::OrbitEscaped { .. }) => {}
            Ok(est) => assert!(est.terminated_early),
            Err(other) => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn escaping_planar_orbit_is_an_error() {
        let p = params(3.0, 1.0, 2.0, 4.5, 2.0);
        let err = lyapunov_max(&p, st(0.05, 0.3), 2000, 1000).unwrap_err();
        assert!(matches!(err, ModelError::OrbitEscaped { .. }));
    }
}
