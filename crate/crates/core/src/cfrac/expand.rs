//! Iterating a step rule: classification, records and convergents.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Pow, Zero};
use serde::{Deserialize, Serialize};

use super::{Algorithm, CMapStep, CfracError, Stepper};
use crate::field::{Field, FieldElementJson, FieldError, MinPoly, MinPolyJson, VectorElement};
use crate::hensel::EmbeddingContext;

pub const DEFAULT_MAX_STEPS: usize = 100_000;
pub const DEFAULT_HEIGHT_CAP_EXPONENT: u32 = 60;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Limits {
    pub max_steps: usize,
    /// Stop once `Height_z` of a remainder exceeds `10^height_cap_exponent`.
    pub height_cap_exponent: u32,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_steps: DEFAULT_MAX_STEPS,
            height_cap_exponent: DEFAULT_HEIGHT_CAP_EXPONENT,
        }
    }
}

impl Limits {
    pub fn height_cap(&self) -> BigInt {
        BigInt::from(10u32).pow(self.height_cap_exponent)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Status {
    /// `ᾱ^{(preperiod)} = ᾱ^{(preperiod + period)}`, first repeat.
    Periodic { preperiod: usize, period: usize },
    /// `ᾱ^{(at)} = 0̄`.
    Finite { at: usize },
    /// `Height_z(ᾱ^{(at)})` exceeded the cap.
    HeightExceeded { at: usize },
    /// Gave up after `at` steps.
    StepLimit { at: usize },
}

impl Status {
    pub fn is_periodic(&self) -> bool {
        matches!(self, Status::Periodic { .. })
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Status::Finite { .. })
    }

    pub fn is_height_exceeded(&self) -> bool {
        matches!(self, Status::HeightExceeded { .. })
    }

    pub fn is_step_limit(&self) -> bool {
        matches!(self, Status::StepLimit { .. })
    }
}

/// The full trace of an expansion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExpansionRecord {
    pub algorithm: Algorithm,
    pub field: Field,
    pub steps: Vec<CMapStep>,
    /// `ᾱ^{(0)}, ᾱ^{(1)}, …`; one more entry than `steps`.
    pub remainders: Vec<VectorElement>,
    pub status: Status,
}

struct Trace<'r> {
    steps: &'r mut Vec<CMapStep>,
    remainders: &'r mut Vec<VectorElement>,
}

fn drive(
    ctx: &EmbeddingContext,
    alpha: &VectorElement,
    algorithm: Algorithm,
    limits: &Limits,
    mut trace: Option<Trace<'_>>,
) -> Status {
    let cap = limits.height_cap();
    if alpha.is_zero() {
        return Status::Finite { at: 0 };
    }
    if alpha.height_exceeds(&cap) {
        return Status::HeightExceeded { at: 0 };
    }
    if limits.max_steps == 0 {
        return Status::StepLimit { at: 0 };
    }
    let mut stepper = Stepper::new(ctx, algorithm);
    let mut seen: HashMap<VectorElement, usize> = HashMap::new();
    seen.insert(alpha.clone(), 0);
    let mut current = alpha.clone();
    for n in 1..=limits.max_steps {
        let (step, next) = stepper.step(&current);
        if let Some(t) = trace.as_mut() {
            t.steps.push(step);
            t.remainders.push(next.clone());
        }
        if next.is_zero() {
            return Status::Finite { at: n };
        }
        if let Some(&m) = seen.get(&next) {
            return Status::Periodic {
                preperiod: m,
                period: n - m,
            };
        }
        if next.height_exceeds(&cap) {
            return Status::HeightExceeded { at: n };
        }
        seen.insert(next.clone(), n);
        current = next;
    }
    Status::StepLimit {
        at: limits.max_steps,
    }
}

/// Expands `alpha`, keeping every step and remainder.
pub fn expand(
    ctx: &EmbeddingContext,
    alpha: &VectorElement,
    algorithm: Algorithm,
    limits: &Limits,
) -> ExpansionRecord {
    let mut steps = Vec::new();
    let mut remainders = vec![alpha.clone()];
    let status = drive(
        ctx,
        alpha,
        algorithm,
        limits,
        Some(Trace {
            steps: &mut steps,
            remainders: &mut remainders,
        }),
    );
    ExpansionRecord {
        algorithm,
        field: ctx.field().clone(),
        steps,
        remainders,
        status,
    }
}

/// Same classification as [`expand`] without retaining the steps.
pub fn classify(
    ctx: &EmbeddingContext,
    alpha: &VectorElement,
    algorithm: Algorithm,
    limits: &Limits,
) -> Status {
    drive(ctx, alpha, algorithm, limits, None)
}

impl ExpansionRecord {
    pub fn initial(&self) -> &VectorElement {
        &self.remainders[0]
    }

    pub fn identity_steps(&self) -> usize {
        self.steps.iter().filter(|s| s.identity).count()
    }

    /// More than half of the recorded steps had `F = id`; the convergence
    /// theorem needs infinitely many non-identity steps.
    pub fn identity_dominated(&self) -> bool {
        2 * self.identity_steps() > self.steps.len()
    }

    /// The step applied to `ᾱ^{(k)}`, continuing periodically past the record.
    pub fn step_at(&self, k: usize) -> Option<&CMapStep> {
        if k < self.steps.len() {
            return Some(&self.steps[k]);
        }
        match self.status {
            Status::Periodic { preperiod, period } if k >= preperiod => {
                self.steps.get(preperiod + (k - preperiod) % period)
            }
            _ => None,
        }
    }

    pub fn to_json(&self) -> RecordJson {
        RecordJson {
            format: 1,
            algorithm: self.algorithm,
            minpoly: self.field.to_json(),
            initial: self.initial().to_json(),
            steps: self.steps.clone(),
            remainders: self.remainders.iter().map(VectorElement::to_json).collect(),
            status: self.status,
            identity_steps: self.identity_steps(),
        }
    }

    pub fn from_json(json: &RecordJson) -> Result<Self, FieldError> {
        let field = MinPoly::from_json(&json.minpoly)?.into_field();
        let remainders = json
            .remainders
            .iter()
            .map(|r| VectorElement::from_json(&field, r))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(ExpansionRecord {
            algorithm: json.algorithm,
            field,
            steps: json.steps.clone(),
            remainders,
            status: json.status,
        })
    }
}

impl Serialize for ExpansionRecord {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

/// Serialized form of an [`ExpansionRecord`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecordJson {
    pub format: u32,
    pub algorithm: Algorithm,
    pub minpoly: MinPolyJson,
    pub initial: Vec<FieldElementJson>,
    pub steps: Vec<CMapStep>,
    pub remainders: Vec<Vec<FieldElementJson>>,
    pub status: Status,
    pub identity_steps: usize,
}

/// The convergent `π(ᾱ; n) = T_0^{-1} ⋯ T_{n-1}^{-1}(0̄)`.
///
/// Periodic records are continued past their last step; for finite records
/// every `n` beyond the terminating step gives `ᾱ` itself.
pub fn convergent(record: &ExpansionRecord, n: usize) -> Result<Vec<BigRational>, CfracError> {
    let n = match record.status {
        Status::Finite { at } => n.min(at),
        _ => n,
    };
    let s = record.initial().len();
    let mut x = vec![BigRational::zero(); s];
    for k in (0..n).rev() {
        let step = record.step_at(k).ok_or(CfracError::ConvergentOutOfRange {
            n,
            available: record.steps.len(),
        })?;
        x = step.inverse(&x)?;
    }
    Ok(x)
}
