//! Membership in the invariant sets M1 (the prey-axis segment) and M2 (the
//! wedge under the prey nullcline), plus a seeded Monte-Carlo check of
//! one-step invariance.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{ModelError, Result};
use crate::model::{ModelParams, State, StepResult};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SetId {
    M1,
    M2,
}

impl fmt::Display for SetId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SetId::M1 => "m1",
            SetId::M2 => "m2",
        })
    }
}

/// Which sufficient condition for M2 invariance the parameters fall under.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConditionBranch {
    /// `1 < d <= 2`.
    #[serde(rename = "case-1")]
    Case1,
    /// `d < 4a - 3`, with the prey restricted below [`m2_condition2_xbound`].
    #[serde(rename = "case-2")]
    Case2,
    None,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Scalar", serialize = "T: Scalar"))]
pub struct InvarianceVerdict<T> {
    pub set_id: SetId,
    pub condition_branch: ConditionBranch,
    pub holds: bool,
    /// First sample (in index order) whose image left the set.
    pub witness: Option<State<T>>,
    pub samples: usize,
    pub violations: usize,
}

/// `0 < x < (a-1)/b` and `y = 0`.
pub fn in_m1<T: Scalar>(p: &ModelParams<T>, s: &State<T>) -> bool {
    s.y() == T::zero() && s.x() > T::zero() && s.x() < (p.a() - T::one()) / p.b()
}

/// `alpha*y/(d-1) <= x < (a-1-c*y)/b`.
pub fn in_m2<T: Scalar>(p: &ModelParams<T>, s: &State<T>) -> bool {
    let one = T::one();
    let (x, y) = (s.x(), s.y());
    p.alpha() * y / (p.d() - one) <= x && x < (p.a() - one - p.c() * y) / p.b()
}

/// Upper prey bound of the second sufficient condition for M2 invariance,
/// defined only when `d < 4a - 3`. It is the positive root of
/// `c^2 x^2 + (2c*alpha + 4b*alpha^2/(d-1)) x + alpha^2 (d-4a+3)/(d-1)`.
pub fn m2_condition2_xbound<T: Scalar>(p: &ModelParams<T>) -> Option<T> {
    let one = T::one();
    let two = T::lit(2.0);
    let (a, b, c, d, al) = (p.a(), p.b(), p.c(), p.d(), p.alpha());
    if d >= T::lit(4.0) * a - T::lit(3.0) {
        return None;
    }
    let dm1 = d - one;
    let root = (b * c * al * dm1 + b * b * al * al + c * c * (a - one) * dm1).sqrt();
    Some((two * al * root - al * (c * dm1 + two * b * al)) / (c * c * dm1))
}

/// Resolves the branch of the M2 invariance hypotheses, or explains why
/// neither applies.
pub fn m2_branch<T: Scalar>(p: &ModelParams<T>) -> Result<ConditionBranch> {
    if p.a() > T::lit(2.0) {
        return Err(ModelError::HypothesisViolation(format!(
            "M2 invariance requires 1 < a <= 2, got a = {}",
            p.a()
        )));
    }
    if p.d() <= T::lit(2.0) {
        Ok(ConditionBranch::Case1)
    } else if p.d() < T::lit(4.0) * p.a() - T::lit(3.0) {
        Ok(ConditionBranch::Case2)
    } else {
        Err(ModelError::HypothesisViolation(format!(
            "M2 invariance requires 1 < d <= 2 or d < 4a - 3, got a = {}, d = {}",
            p.a(),
            p.d()
        )))
    }
}

/// Draws one member of the set. `x` is uniform over the set's prey interval,
/// then `y` uniform over the admissible predator interval at that `x`.
fn sample_member<T: Scalar>(
    p: &ModelParams<T>,
    set_id: SetId,
    x_hi: T,
    rng: &mut ChaCha8Rng,
) -> State<T> {
    let one = T::one();
    loop {
        let x = T::lit(rng.gen::<f64>()) * x_hi;
        if x <= T::zero() {
            continue;
        }
        let y = match set_id {
            SetId::M1 => T::zero(),
            SetId::M2 => {
                let by_wedge = (p.d() - one) * x / p.alpha();
                let by_nullcline = (p.a() - one - p.b() * x) / p.c();
                T::lit(rng.gen::<f64>()) * by_wedge.min(by_nullcline)
            }
        };
        let Ok(s) = State::new(x, y) else { continue };
        let member = match set_id {
            SetId::M1 => in_m1(p, &s),
            SetId::M2 => in_m2(p, &s),
        };
        if member {
            return s;
        }
    }
}

/// Generator for sample `index`; depends only on `(seed, index)`.
pub fn sample_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

/// Samples `n_samples` members of the set and checks that every image under
/// one step is again a member. Deterministic for a fixed seed regardless of
/// how the samples are scheduled across threads.
pub fn verify_invariance<T: Scalar>(
    p: &ModelParams<T>,
    set_id: SetId,
    n_samples: usize,
    seed: u64,
) -> Result<InvarianceVerdict<T>> {
    if n_samples == 0 {
        return Err(ModelError::InvalidArgument(
            "n_samples must be at least 1".into(),
        ));
    }
    let axis_hi = (p.a() - T::one()) / p.b();
    let (branch, x_hi) = match set_id {
        SetId::M1 => (ConditionBranch::None, axis_hi),
        SetId::M2 => match m2_branch(p)? {
            ConditionBranch::Case2 => {
                let bound = m2_condition2_xbound(p).expect("case 2 implies d < 4a - 3");
                (ConditionBranch::Case2, bound.min(axis_hi))
            }
            other => (other, axis_hi),
        },
    };
    if x_hi <= T::zero() {
        return Err(ModelError::HypothesisViolation(
            "the admissible prey interval is empty".into(),
        ));
    }

    let failures: Vec<(usize, State<T>)> = (0..n_samples)
        .into_par_iter()
        .filter_map(|i| {
            let mut rng = sample_rng(seed, i);
            let s = sample_member(p, set_id, x_hi, &mut rng);
            let stays = match p.step(s) {
                StepResult::Next(img) => match set_id {
                    SetId::M1 => in_m1(p, &img),
                    SetId::M2 => in_m2(p, &img),
                },
                StepResult::DomainExit(_) => false,
            };
            (!stays).then_some((i, s))
        })
        .collect();

    Ok(InvarianceVerdict {
        set_id,
        condition_branch: branch,
        holds: failures.is_empty(),
        witness: failures.first().map(|&(_, s)| s),
        samples: n_samples,
        violations: failures.len(),
    })
}
