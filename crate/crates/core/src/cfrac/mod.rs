//! Multidimensional p-adic continued fractions generated by c-maps.
//!
//! A step `T(x) = A·F(x) + γ` is recorded as a [`CMapStep`]; `F` is a
//! linear fractional map whose components all have the shape
//! `f_j = C_j/x_j - W_j` and `f_i = C_i·x_i/x_j - W_i` (or `F = id`).

mod expand;
mod maps;

use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use expand::{
    classify, convergent, expand, ExpansionRecord, Limits, RecordJson, Status,
    DEFAULT_HEIGHT_CAP_EXPONENT, DEFAULT_MAX_STEPS,
};
pub use maps::{
    g_map, h_map, lookahead_index, step, step_phi0, step_phi1, step_phi2, step_phi3, Lookahead,
    MapImage, Stepper,
};

use crate::field::{FieldElement, FieldError};
use crate::matrix::RationalMatrix;
use crate::rational::serde_q;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CfracError {
    #[error("pole: component {index} of the argument cancels the step's denominator")]
    PoleHit { index: usize },
    #[error("expected {expected} components, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("convergent {n} needs {n} steps but only {available} are known")]
    ConvergentOutOfRange { n: usize, available: usize },
    #[error("step matrix is singular")]
    SingularMatrix,
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// The sign `ε ∈ {1, -1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "i8", into = "i8")]
pub enum Epsilon {
    Plus,
    Minus,
}

impl Epsilon {
    pub fn value(self) -> i64 {
        match self {
            Epsilon::Plus => 1,
            Epsilon::Minus => -1,
        }
    }

    pub fn to_rational(self) -> BigRational {
        BigRational::from_integer(self.value().into())
    }
}

impl TryFrom<i8> for Epsilon {
    type Error = String;
    fn try_from(v: i8) -> Result<Self, String> {
        match v {
            1 => Ok(Epsilon::Plus),
            -1 => Ok(Epsilon::Minus),
            _ => Err(format!("epsilon must be 1 or -1, got {v}")),
        }
    }
}

impl From<Epsilon> for i8 {
    fn from(e: Epsilon) -> i8 {
        e.value() as i8
    }
}

impl fmt::Display for Epsilon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value())
    }
}

/// Which map supplies `β` (and hence `A`) in the `Φ3` step.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize, Default,
)]
#[serde(rename_all = "snake_case")]
pub enum Phi3Variant {
    #[default]
    H,
    G,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "id", rename_all = "snake_case")]
pub enum Algorithm {
    Phi0 {
        epsilon: Epsilon,
    },
    Phi1 {
        epsilon: Epsilon,
    },
    Phi2 {
        epsilon: Epsilon,
        lookahead: u32,
    },
    Phi3 {
        #[serde(default)]
        variant: Phi3Variant,
    },
}

impl Algorithm {
    pub fn phi3() -> Self {
        Algorithm::Phi3 {
            variant: Phi3Variant::H,
        }
    }

    /// Short label such as `phi2[-1](1)`.
    pub fn label(&self) -> String {
        match self {
            Algorithm::Phi0 { epsilon } => format!("phi0[{epsilon}]"),
            Algorithm::Phi1 { epsilon } => format!("phi1[{epsilon}]"),
            Algorithm::Phi2 { epsilon, lookahead } => format!("phi2[{epsilon}]({lookahead})"),
            Algorithm::Phi3 {
                variant: Phi3Variant::H,
            } => "phi3".to_string(),
            Algorithm::Phi3 {
                variant: Phi3Variant::G,
            } => "phi3g".to_string(),
        }
    }
}

impl std::str::FromStr for Algorithm {
    type Err = String;

    /// Parses [`Algorithm::label`] output; a bare `phiN` means `ε = 1` and
    /// lookahead 1.
    fn from_str(text: &str) -> Result<Self, String> {
        let bad = || format!("unknown algorithm label {text:?}");
        let (head, rest) = text.split_at(text.find(['[', '(']).unwrap_or(text.len()));
        let mut epsilon = Epsilon::Plus;
        let mut lookahead = 1;
        let mut rest = rest;
        if let Some(r) = rest.strip_prefix('[') {
            let (e, r) = r.split_once(']').ok_or_else(bad)?;
            let e: i8 = e.trim().parse().map_err(|_| bad())?;
            epsilon = Epsilon::try_from(e)?;
            rest = r;
        }
        if let Some(r) = rest.strip_prefix('(') {
            let n = r.strip_suffix(')').ok_or_else(bad)?;
            lookahead = n.trim().parse().map_err(|_| bad())?;
            rest = "";
        }
        if !rest.is_empty() {
            return Err(bad());
        }
        match head {
            "phi0" => Ok(Algorithm::Phi0 { epsilon }),
            "phi1" => Ok(Algorithm::Phi1 { epsilon }),
            "phi2" => Ok(Algorithm::Phi2 { epsilon, lookahead }),
            "phi3" => Ok(Algorithm::phi3()),
            "phi3g" => Ok(Algorithm::Phi3 {
                variant: Phi3Variant::G,
            }),
            _ => Err(bad()),
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// One recorded step `T(x) = A·F(x) + γ`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CMapStep {
    /// The chosen index `j`, 1-based.
    pub index: usize,
    /// `F = id` because the chosen component of the argument vanished.
    pub identity: bool,
    /// `C_i`; empty for identity steps.
    #[serde(with = "serde_q::vec")]
    pub factors: Vec<BigRational>,
    /// `W_i`; empty for identity steps.
    #[serde(with = "serde_q::vec")]
    pub shifts: Vec<BigRational>,
    pub matrix: RationalMatrix,
    #[serde(with = "serde_q::vec")]
    pub gamma: Vec<BigRational>,
}

/// Values the step maps can act on: rationals (convergents) and field
/// elements (remainders).
pub trait Scalar: Clone + PartialEq {
    fn add(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn add_rational(&self, q: &BigRational) -> Self;
    fn scale(&self, q: &BigRational) -> Self;
    fn recip(&self) -> Option<Self>;
}

impl Scalar for BigRational {
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn add_rational(&self, q: &BigRational) -> Self {
        self + q
    }
    fn scale(&self, q: &BigRational) -> Self {
        self * q
    }
    fn recip(&self) -> Option<Self> {
        (!Zero::is_zero(self)).then(|| BigRational::recip(self))
    }
}

impl Scalar for FieldElement {
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn add_rational(&self, q: &BigRational) -> Self {
        FieldElement::add_rational(self, q)
    }
    fn scale(&self, q: &BigRational) -> Self {
        FieldElement::scale(self, q)
    }
    fn recip(&self) -> Option<Self> {
        self.invert().ok()
    }
}

fn apply_matrix<T: Scalar>(m: &RationalMatrix, x: &[T]) -> Vec<T> {
    let zero = x[0].scale(&BigRational::zero());
    (0..m.rows())
        .map(|r| {
            m.row(r).iter().zip(x).filter(|(a, _)| !a.is_zero()).fold(
                zero.clone(),
                |acc, (a, xi)| {
                    if a.is_one() {
                        acc.add(xi)
                    } else {
                        acc.add(&xi.scale(a))
                    }
                },
            )
        })
        .collect()
}

impl CMapStep {
    pub fn dimension(&self) -> usize {
        self.matrix.rows()
    }

    fn check_len(&self, len: usize) -> Result<(), CfracError> {
        if len != self.dimension() {
            return Err(CfracError::Dimension {
                expected: self.dimension(),
                got: len,
            });
        }
        Ok(())
    }

    /// `F(x)`.
    pub fn apply_map<T: Scalar>(&self, x: &[T]) -> Result<Vec<T>, CfracError> {
        self.check_len(x.len())?;
        if self.identity {
            return Ok(x.to_vec());
        }
        let j = self.index - 1;
        let inv = x[j]
            .recip()
            .ok_or(CfracError::PoleHit { index: self.index })?;
        Ok((0..x.len())
            .map(|i| {
                let base = if i == j { inv.clone() } else { x[i].mul(&inv) };
                base.scale(&self.factors[i]).add_rational(&-&self.shifts[i])
            })
            .collect())
    }

    /// `T(x) = A·F(x) + γ`.
    pub fn forward<T: Scalar>(&self, x: &[T]) -> Result<Vec<T>, CfracError> {
        let f = self.apply_map(x)?;
        Ok(apply_matrix(&self.matrix, &f)
            .into_iter()
            .zip(&self.gamma)
            .map(|(y, g)| if g.is_zero() { y } else { y.add_rational(g) })
            .collect())
    }

    /// `T^{-1}(y) = F^{-1}(A^{-1}(y - γ))`.
    pub fn inverse<T: Scalar>(&self, y: &[T]) -> Result<Vec<T>, CfracError> {
        self.check_len(y.len())?;
        let a_inv = self.matrix.inverse().ok_or(CfracError::SingularMatrix)?;
        let shifted: Vec<T> = y
            .iter()
            .zip(&self.gamma)
            .map(|(v, g)| {
                if g.is_zero() {
                    v.clone()
                } else {
                    v.add_rational(&-g)
                }
            })
            .collect();
        let u = apply_matrix(&a_inv, &shifted);
        if self.identity {
            return Ok(u);
        }
        let j = self.index - 1;
        let t = u[j].add_rational(&self.shifts[j]);
        let t_inv = t.recip().ok_or(CfracError::PoleHit { index: self.index })?;
        let xj = t_inv.scale(&self.factors[j]);
        Ok((0..u.len())
            .map(|i| {
                if i == j {
                    xj.clone()
                } else {
                    u[i].add_rational(&self.shifts[i])
                        .mul(&xj)
                        .scale(&self.factors[i].recip())
                }
            })
            .collect())
    }
}

/// The cyclic shift `(x_1, …, x_s) ↦ (x_2, …, x_s, x_1)` as a matrix.
pub fn shift_matrix(s: usize) -> RationalMatrix {
    let mut m = RationalMatrix::zeros(s, s);
    for i in 0..s {
        m[(i, (i + 1) % s)] = BigRational::one();
    }
    m
}
