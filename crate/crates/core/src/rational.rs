//! p-adic digit arithmetic on exact rationals.
//!
//! Every rational `q != 0` has a unique expansion `q = Σ_{n ≥ ord} c_n p^n`
//! with digits `c_n ∈ {0, …, p-1}`. This module extracts the pieces of that
//! expansion that the continued fraction maps need: the valuation, the digit
//! at index zero, and the split of `q` into a finite head and a tail that is
//! divisible by a prescribed power of `p`.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RationalError {
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("cannot parse rational from {0:?}")]
    Parse(String),
}

/// A prime number, validated once on construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "u64", into = "u64")]
pub struct Prime(u64);

impl Prime {
    pub fn new(p: u64) -> Result<Self, RationalError> {
        if is_prime(p) {
            Ok(Prime(p))
        } else {
            Err(RationalError::NotPrime(p))
        }
    }

    pub fn get(self) -> u64 {
        self.0
    }

    pub fn to_bigint(self) -> BigInt {
        BigInt::from(self.0)
    }

    /// `p^k` as a big integer.
    pub fn pow(self, k: u32) -> BigInt {
        Pow::pow(&self.to_bigint(), k)
    }

    /// `p^k` as a rational; negative exponents give `1 / p^{-k}`.
    pub fn pow_rational(self, k: i64) -> BigRational {
        let magnitude = self.pow(k.unsigned_abs() as u32);
        if k >= 0 {
            BigRational::from_integer(magnitude)
        } else {
            BigRational::new(BigInt::one(), magnitude)
        }
    }
}

impl TryFrom<u64> for Prime {
    type Error = RationalError;
    fn try_from(p: u64) -> Result<Self, Self::Error> {
        Prime::new(p)
    }
}

impl From<Prime> for u64 {
    fn from(p: Prime) -> u64 {
        p.0
    }
}

impl fmt::Display for Prime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller–Rabin; the witness set is exact for all `u64`.
pub fn is_prime(n: u64) -> bool {
    const WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &w in &WITNESSES {
        if n.is_multiple_of(w) {
            return n == w;
        }
    }
    let mut d = n - 1;
    let mut r = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        r += 1;
    }
    'witness: for &a in &WITNESSES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..r {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// A p-adic valuation: an integer, or infinity for zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Valuation {
    Finite(i64),
    Infinity,
}

impl Valuation {
    pub fn finite(self) -> Option<i64> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinity => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        self == Valuation::Infinity
    }

    /// `|q|_p = p^{-ord}`, or zero for infinite valuation.
    pub fn abs_value(self, p: Prime) -> BigRational {
        match self {
            Valuation::Finite(v) => p.pow_rational(-v),
            Valuation::Infinity => BigRational::zero(),
        }
    }
}

impl PartialOrd for Valuation {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Valuation {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Valuation::Finite(a), Valuation::Finite(b)) => a.cmp(b),
            (Valuation::Finite(_), Valuation::Infinity) => Ordering::Less,
            (Valuation::Infinity, Valuation::Finite(_)) => Ordering::Greater,
            (Valuation::Infinity, Valuation::Infinity) => Ordering::Equal,
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::Infinity => write!(f, "inf"),
        }
    }
}

/// Exponent of `p` in a nonzero integer (0 for zero).
pub fn int_valuation(n: &BigInt, p: Prime) -> u64 {
    if n.is_zero() {
        return 0;
    }
    if p.get() == 2 {
        return n.trailing_zeros().unwrap_or(0);
    }
    let pb = p.to_bigint();
    let mut count = 0;
    let mut cur = n.clone();
    loop {
        let (q, r) = cur.div_rem(&pb);
        if !r.is_zero() {
            return count;
        }
        count += 1;
        cur = q;
    }
}

/// Splits `n` into `(p^e, n / p^e)` with `p ∤ n / p^e`.
pub fn split_p_power(n: &BigInt, p: Prime) -> (u64, BigInt) {
    let e = int_valuation(n, p);
    if e == 0 {
        return (0, n.clone());
    }
    (e, n / p.pow(e as u32))
}

pub fn ord_p(q: &BigRational, p: Prime) -> Valuation {
    if q.is_zero() {
        return Valuation::Infinity;
    }
    let num = int_valuation(q.numer(), p) as i64;
    let den = int_valuation(q.denom(), p) as i64;
    Valuation::Finite(num - den)
}

/// Non-negative residue of `n` modulo `m`.
pub fn mod_floor(n: &BigInt, m: &BigInt) -> BigInt {
    n.mod_floor(m)
}

/// Inverse of a unit modulo `m`; panics if `a` is not invertible.
pub fn mod_inverse(a: &BigInt, m: &BigInt) -> BigInt {
    if m.is_one() {
        return BigInt::zero();
    }
    a.mod_floor(m)
        .modinv(m)
        .expect("modular inverse of a non-unit")
}

/// The residue `q · p^e mod p^k` where `p^e` is the exact power of `p` in
/// the denominator of `q`, i.e. the digits `c_{-e}, …, c_{k-e-1}` of `q`
/// packed into one integer. Returns `(e, residue)`.
fn shifted_residue(q: &BigRational, p: Prime, k: u64) -> (u64, BigInt) {
    let (e, unit_den) = split_p_power(q.denom(), p);
    let modulus = p.pow(k as u32);
    let r = (q.numer() * mod_inverse(&unit_den, &modulus)).mod_floor(&modulus);
    (e, r)
}

/// The digit `c_0` of the p-adic expansion; zero for `q = 0`.
pub fn omega_p(q: &BigRational, p: Prime) -> u64 {
    if q.is_zero() {
        return 0;
    }
    let e = int_valuation(q.denom(), p);
    let (_, r) = shifted_residue(q, p, e + 1);
    let digit: BigInt = r / p.pow(e as u32);
    u64::try_from(&digit).expect("digit fits in u64")
}

/// Splits `q` into `(⌊q:m⌋_p, ⟨q:m⟩_p)`: the head collects the digits with
/// index `≤ m`, the tail the rest, so `head + tail = q` and `ord_p(tail) > m`.
pub fn head_tail(q: &BigRational, p: Prime, m: i64) -> (BigRational, BigRational) {
    let head = head(q, p, m);
    let tail = q - &head;
    (head, tail)
}

/// `⌊q:m⌋_p`, the finite digit sum `Σ_{n ≤ m} c_n p^n`.
pub fn head(q: &BigRational, p: Prime, m: i64) -> BigRational {
    if q.is_zero() {
        return BigRational::zero();
    }
    let e = int_valuation(q.denom(), p) as i64;
    let digits = e + m + 1;
    if digits <= 0 {
        return BigRational::zero();
    }
    let (e, r) = shifted_residue(q, p, digits as u64);
    BigRational::new(r, p.pow(e as u32))
}

/// `⟨q:m⟩_p`, the part of `q` with digits at index `> m`.
pub fn tail(q: &BigRational, p: Prime, m: i64) -> BigRational {
    q - head(q, p, m)
}

/// `|numerator| + denominator` of the reduced form.
pub fn height(q: &BigRational) -> BigInt {
    q.numer().abs() + q.denom()
}

/// Canonical string form: `num/den`, or `num` when the denominator is one.
pub fn format_rational(q: &BigRational) -> String {
    q.to_string()
}

pub fn parse_rational(s: &str) -> Result<BigRational, RationalError> {
    let s = s.trim();
    let err = || RationalError::Parse(s.to_string());
    match s.split_once('/') {
        Some((n, d)) => {
            let n = BigInt::from_str(n.trim()).map_err(|_| err())?;
            let d = BigInt::from_str(d.trim()).map_err(|_| err())?;
            if d.is_zero() {
                return Err(err());
            }
            Ok(BigRational::new(n, d))
        }
        None => Ok(BigRational::from_integer(
            BigInt::from_str(s).map_err(|_| err())?,
        )),
    }
}

/// Serde adapters encoding rationals as canonical strings.
pub mod serde_q {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(q: &BigRational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(q))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigRational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(serde::de::Error::custom)
    }

    pub mod vec {
        use super::*;

        pub fn serialize<S: Serializer>(v: &[BigRational], s: S) -> Result<S::Ok, S::Error> {
            s.collect_seq(v.iter().map(format_rational))
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigRational>, D::Error> {
            let raw = Vec::<String>::deserialize(d)?;
            raw.iter()
                .map(|s| parse_rational(s).map_err(serde::de::Error::custom))
                .collect()
        }
    }
}
