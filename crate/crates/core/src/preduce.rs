//! The p-reduced normal form of square rational matrices under row
//! operations over `Z_p ∩ Q`.

use num_rational::BigRational;
use num_traits::Zero;
use thiserror::Error;

use crate::matrix::RationalMatrix;
use crate::rational::{int_valuation, ord_p, tail, Prime, Valuation};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PReduceError {
    #[error("expected a square matrix, got {rows}x{cols}")]
    NonSquare { rows: usize, cols: usize },
}

fn finite_ord(q: &BigRational, p: Prime) -> i64 {
    ord_p(q, p).finite().expect("nonzero entry")
}

/// Row-reduces `m` to p-reduced form. Returns `(M', N)` with `M' = N·M` and
/// `N ∈ GL(n, Z_p ∩ Q)`.
pub fn p_reduce(
    m: &RationalMatrix,
    p: Prime,
) -> Result<(RationalMatrix, RationalMatrix), PReduceError> {
    if !m.is_square() {
        return Err(PReduceError::NonSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    let n = m.rows();
    let mut c = m.clone();
    let mut acc = RationalMatrix::identity(n);
    let mut k1 = 0;
    for k2 in 0..n {
        let candidates = (k1..n).filter(|&i| !c[(i, k2)].is_zero());
        // least row with the largest |c|_p, i.e. the smallest valuation
        let Some(pivot) = candidates.min_by_key(|&i| (finite_ord(&c[(i, k2)], p), i)) else {
            continue;
        };
        c.swap_rows(k1, pivot);
        acc.swap_rows(k1, pivot);
        let lead = c[(k1, k2)].clone();
        for i in k1 + 1..n {
            if c[(i, k2)].is_zero() {
                continue;
            }
            let factor = &c[(i, k2)] / &lead;
            c.sub_row_multiple(i, k1, &factor);
            acc.sub_row_multiple(i, k1, &factor);
        }
        // 1/(|c|_p c) turns the pivot into p^{ord c}
        let ord = finite_ord(&lead, p);
        let scale = p.pow_rational(ord) / &lead;
        c.scale_row(k1, &scale);
        acc.scale_row(k1, &scale);
        let pivot_value = c[(k1, k2)].clone();
        for i in 0..k1 {
            let excess = tail(&c[(i, k2)], p, ord - 1);
            if excess.is_zero() {
                continue;
            }
            let factor = excess / &pivot_value;
            c.sub_row_multiple(i, k1, &factor);
            acc.sub_row_multiple(i, k1, &factor);
        }
        k1 += 1;
    }
    Ok((c, acc))
}

fn is_power_of_p(q: &BigRational, p: Prime) -> bool {
    match ord_p(q, p) {
        Valuation::Finite(k) => *q == p.pow_rational(k),
        Valuation::Infinity => false,
    }
}

/// The step profile `u(i)`: number of leading zeros of each row.
pub fn step_profile(m: &RationalMatrix) -> Vec<usize> {
    (0..m.rows())
        .map(|i| {
            m.row(i)
                .iter()
                .position(|x| !x.is_zero())
                .unwrap_or(m.cols())
        })
        .collect()
}

/// Checks the four clauses of the p-reduced definition.
pub fn is_p_reduced(m: &RationalMatrix, p: Prime) -> bool {
    if !m.is_square() {
        return false;
    }
    let n = m.rows();
    // clause (1) pins u(i) to the leading-zero count whenever clause (2) holds
    let u = step_profile(m);
    for i in 0..n {
        if i > 0 && u[i] < u[i - 1] {
            return false;
        }
        if u[i] == n {
            continue;
        }
        let col = u[i];
        let pivot = &m[(i, col)];
        if !is_power_of_p(pivot, p) {
            return false;
        }
        if (i + 1..n).any(|k| !m[(k, col)].is_zero()) {
            return false;
        }
        let ord = finite_ord(pivot, p);
        if (0..i).any(|j| !tail(&m[(j, col)], p, ord - 1).is_zero()) {
            return false;
        }
    }
    true
}

/// Whether every entry has a denominator prime to `p`.
pub fn is_p_integral(m: &RationalMatrix, p: Prime) -> bool {
    (0..m.rows()).all(|i| m.row(i).iter().all(|x| int_valuation(x.denom(), p) == 0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn worked_example() {
        let p = Prime::new(2).unwrap();
        let m = RationalMatrix::from_rows(vec![vec![q(10, 1), q(3, 2)], vec![q(-5, 1), q(7, 1)]]);
        let (reduced, n) = p_reduce(&m, p).unwrap();
        assert_eq!(
            reduced,
            RationalMatrix::from_rows(vec![vec![q(1, 1), q(0, 1)], vec![q(0, 1), q(1, 2)]])
        );
        assert_eq!(
            n,
            RationalMatrix::from_rows(vec![vec![q(14, 155), q(-3, 155)], vec![q(1, 31), q(2, 31)]])
        );
        assert_eq!(n.mul(&m), reduced);
        assert!(is_p_reduced(&reduced, p));
    }

    #[test]
    fn identity_is_fixed() {
        let p = Prime::new(3).unwrap();
        let id = RationalMatrix::identity(3);
        assert_eq!(p_reduce(&id, p).unwrap(), (id.clone(), id));
    }

    #[test]
    fn predicate_examples() {
        let p = Prime::new(2).unwrap();
        let bad = RationalMatrix::from_i64_rows(&[&[2, 0], &[1, 0]]);
        assert!(!is_p_reduced(&bad, p));
        assert!(is_p_reduced(&RationalMatrix::zeros(3, 3), p));
        assert_eq!(step_profile(&RationalMatrix::zeros(3, 3)), vec![3, 3, 3]);
        // entry above a pivot 4 must have no digits at index >= 2
        let ok = RationalMatrix::from_i64_rows(&[&[1, 3], &[0, 4]]);
        assert!(is_p_reduced(&ok, p));
        let not_ok = RationalMatrix::from_i64_rows(&[&[1, 7], &[0, 4]]);
        assert!(!is_p_reduced(&not_ok, p));
        let not_power = RationalMatrix::from_i64_rows(&[&[3, 0], &[0, 1]]);
        assert!(!is_p_reduced(&not_power, p));
    }

    #[test]
    fn column_skip_branch() {
        let p = Prime::new(3).unwrap();
        let m = RationalMatrix::from_i64_rows(&[&[0, 6, 1], &[0, 2, 5], &[0, 0, 0]]);
        let (r, n) = p_reduce(&m, p).unwrap();
        assert_eq!(n.mul(&m), r);
        assert!(is_p_reduced(&r, p));
        assert_eq!(step_profile(&r), vec![1, 2, 3]);
    }

    #[test]
    fn non_square_rejected() {
        let p = Prime::new(2).unwrap();
        let m = RationalMatrix::zeros(2, 3);
        assert_eq!(
            p_reduce(&m, p),
            Err(PReduceError::NonSquare { rows: 2, cols: 3 })
        );
    }
}
