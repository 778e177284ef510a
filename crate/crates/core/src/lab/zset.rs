//! Enumerating the generators `x^d + a x + b p`.

use std::ops::RangeInclusive;

use num_rational::BigRational;

use super::LabError;
use crate::field::{validate_minpoly, FieldError, MinPoly};
use crate::rational::Prime;

pub const DEFAULT_A_RANGE: RangeInclusive<i64> = 1..=10;
pub const DEFAULT_B_RANGE: RangeInclusive<i64> = -10..=10;

/// `x^degree + a x + c` as `a_1, …, a_n`.
pub fn trinomial(degree: usize, a: i64, c: i64) -> Vec<BigRational> {
    let mut coeffs = vec![BigRational::from_integer(0.into()); degree];
    coeffs[degree - 2] = BigRational::from_integer(a.into());
    coeffs[degree - 1] = BigRational::from_integer(c.into());
    coeffs
}

/// Every `x^degree + a x + b p` with `p ∤ a` that is irreducible and
/// satisfies (H), ordered by `(a, b)`.
pub fn build_z_set(
    p: Prime,
    degree: usize,
    a_range: RangeInclusive<i64>,
    b_range: RangeInclusive<i64>,
) -> Result<Vec<MinPoly>, LabError> {
    if degree < 2 {
        return Err(LabError::Degree(degree));
    }
    let pi =
        i64::try_from(p.get()).map_err(|_| LabError::Config(format!("prime {p} too large")))?;
    let mut out = Vec::new();
    for a in a_range {
        if a.rem_euclid(pi) == 0 {
            continue;
        }
        for b in b_range.clone() {
            match validate_minpoly(p, trinomial(degree, a, b * pi)) {
                Ok(m) => out.push(m),
                Err(FieldError::Reducible | FieldError::HViolation(_)) => {}
                Err(FieldError::IrreducibilityUnknown { tried }) => {
                    return Err(LabError::Uncertified {
                        degree,
                        a,
                        b,
                        tried,
                    })
                }
                Err(e) => return Err(e.into()),
            }
        }
    }
    Ok(out)
}

pub fn default_z_set(p: Prime, degree: usize) -> Result<Vec<MinPoly>, LabError> {
    build_z_set(p, degree, DEFAULT_A_RANGE, DEFAULT_B_RANGE)
}
