//! Pseudorandom test elements drawn from the byte streams.

use std::collections::HashSet;

use num_rational::BigRational;
use serde::Serialize;

use super::bits::{source_bytes, suite_sources, BitSource};
use super::LabError;
use crate::field::{independent_with_one, Field, FieldElement, VectorElement};

pub const DEFAULT_SUITE_SIZE: usize = 100;
/// Bytes drawn per stream before giving up.
pub const DEFAULT_BYTE_BUDGET: usize = 1 << 16;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SuiteTrace {
    pub sources: Vec<BitSource>,
    /// Candidate indices examined, i.e. the least `m` plus one.
    pub consumed: usize,
    pub rejected: usize,
    pub duplicates: usize,
}

#[derive(Debug, Clone)]
pub struct TestSuite {
    pub field: Field,
    /// In order of first appearance.
    pub elements: Vec<VectorElement>,
    pub trace: SuiteTrace,
}

/// `(-1)^{e_{k+2}} e_{k+1}/(e_k + 1)`.
fn coefficient(bytes: &[u8]) -> BigRational {
    let value = BigRational::new(i64::from(bytes[1]).into(), (i64::from(bytes[0]) + 1).into());
    if bytes[2] % 2 == 1 {
        -value
    } else {
        value
    }
}

/// Candidate `i`: component `j` takes the `3(s+1)` bytes starting at
/// `3(s+1)i` of stream `j`, three per power of `z`.
fn candidate(field: &Field, streams: &[Vec<u8>], i: usize) -> Option<Vec<FieldElement>> {
    let n = field.degree();
    let width = 3 * n;
    streams
        .iter()
        .map(|bytes| {
            let chunk = bytes.get(width * i..width * (i + 1))?;
            let coeffs: Vec<BigRational> = chunk.chunks_exact(3).map(coefficient).collect();
            Some(FieldElement::new(field, &coeffs).expect("degree-sized coefficients"))
        })
        .collect()
}

fn acceptable(comps: &[FieldElement]) -> bool {
    if comps.len() == 1 {
        !comps[0].is_rational()
    } else {
        independent_with_one(comps)
    }
}

/// The first `size` distinct acceptable candidates.
pub fn build_test_set(field: &Field, size: usize) -> Result<TestSuite, LabError> {
    build_test_set_with_budget(field, size, DEFAULT_BYTE_BUDGET)
}

pub fn build_test_set_with_budget(
    field: &Field,
    size: usize,
    budget: usize,
) -> Result<TestSuite, LabError> {
    if field.degree() < 2 {
        return Err(LabError::Degree(field.degree()));
    }
    let sources = suite_sources(field.dimension());
    let width = 3 * field.degree();
    let mut elements = Vec::with_capacity(size);
    let mut seen = HashSet::new();
    let mut trace = SuiteTrace {
        sources: sources.clone(),
        consumed: 0,
        rejected: 0,
        duplicates: 0,
    };
    let mut have = 0;
    let mut want = (width * size * 2).min(budget).max(width);
    while elements.len() < size {
        if have >= budget {
            return Err(LabError::StreamExhausted { budget });
        }
        let streams: Vec<Vec<u8>> = sources.iter().map(|&s| source_bytes(s, want)).collect();
        let mut i = trace.consumed;
        while elements.len() < size {
            let Some(comps) = candidate(field, &streams, i) else {
                break;
            };
            i += 1;
            if !acceptable(&comps) {
                trace.rejected += 1;
                continue;
            }
            let v = VectorElement::new(comps)?;
            if seen.insert(v.clone()) {
                elements.push(v);
            } else {
                trace.duplicates += 1;
            }
        }
        trace.consumed = i;
        have = want;
        want = (want * 2).min(budget);
    }
    Ok(TestSuite {
        field: field.clone(),
        elements,
        trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::MinPoly;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn first_quadratic_element() {
        let f = MinPoly::from_ints(2, &[1, 2]).unwrap().into_field();
        let suite = build_test_set(&f, 3).unwrap();
        let bytes = source_bytes(BitSource::GOLDEN, 6);
        let expected =
            FieldElement::new(&f, &[coefficient(&bytes[0..3]), coefficient(&bytes[3..6])]).unwrap();
        if !expected.is_rational() {
            assert_eq!(suite.elements[0][0], expected);
        }
        assert_eq!(suite.elements.len(), 3);
        assert_eq!(coefficient(&[121, 10, 3]), q(-10, 122));
        assert_eq!(coefficient(&[0, 0, 0]), q(0, 1));
    }

    #[test]
    fn prefix_and_budget() {
        let f = MinPoly::from_ints(3, &[0, 1, 3]).unwrap().into_field();
        let small = build_test_set(&f, 10).unwrap();
        let large = build_test_set(&f, 100).unwrap();
        assert_eq!(small.elements[..], large.elements[..10]);
        assert_eq!(large.elements.len(), 100);
        assert!(matches!(
            build_test_set_with_budget(&f, 100, 20),
            Err(LabError::StreamExhausted { budget: 20 })
        ));
    }
}
