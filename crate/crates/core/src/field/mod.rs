//! Exact arithmetic in `K = Q(z)`, `z` a root of a certified minimal
//! polynomial satisfying condition (H).
//!
//! Elements are stored in the power basis `1, z, …, z^{n-1}` (ascending) as
//! an integer numerator vector over one positive common denominator, reduced
//! so that the content of the numerators is coprime to the denominator. That
//! form is canonical, so structural equality and hashing are field equality.

mod irreducible;

use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use irreducible::{certify, Certificate, Verdict, CANDIDATE_PRIMES};

use crate::matrix::RationalMatrix;
use crate::rational::{self, format_rational, ord_p, Prime, Valuation};

pub type Field = Arc<MinPoly>;

/// Which clause of condition (H) a polynomial fails.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HClause {
    /// Degree below 2: the generator would be rational.
    Degree,
    /// Coefficient `a_i` (1-based) has a denominator divisible by `p`.
    NotPIntegral(usize),
    /// `ord_p(a_{n-1}) != 0`.
    LinearCoefficientNotUnit,
    /// `ord_p(a_n) <= 0`.
    ConstantNotInMaximalIdeal,
}

impl fmt::Display for HClause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HClause::Degree => write!(f, "degree must be at least 2"),
            HClause::NotPIntegral(i) => write!(f, "a_{i} is not p-integral"),
            HClause::LinearCoefficientNotUnit => write!(f, "ord_p(a_(n-1)) != 0"),
            HClause::ConstantNotInMaximalIdeal => write!(f, "ord_p(a_n) <= 0"),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("condition (H) violated: {0}")]
    HViolation(HClause),
    #[error("polynomial is reducible over Q")]
    Reducible,
    #[error("no irreducibility certificate among {tried} candidate primes")]
    IrreducibilityUnknown { tried: usize },
    #[error("operands belong to different fields")]
    MixedField,
    #[error("division by zero")]
    DivisionByZero,
    #[error("expected {expected} coefficients, got {got}")]
    CoefficientCount { expected: usize, got: usize },
    #[error("expected a vector of {expected} components, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("{0}")]
    Rational(#[from] rational::RationalError),
}

/// Monic minimal polynomial `x^n + a_1 x^{n-1} + … + a_n` of the generator.
#[derive(Debug, Clone)]
pub struct MinPoly {
    p: Prime,
    coeffs: Vec<BigRational>,
    // a_i = scaled[i-1] / den
    scaled: Vec<BigInt>,
    den: BigInt,
    certificate: Certificate,
}

impl PartialEq for MinPoly {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.coeffs == other.coeffs
    }
}

impl Eq for MinPoly {}

/// Checks the clauses of condition (H) on `x^n + a_1 x^{n-1} + … + a_n`.
pub fn check_condition_h(p: Prime, coeffs: &[BigRational]) -> Result<(), HClause> {
    let n = coeffs.len();
    if n < 2 {
        return Err(HClause::Degree);
    }
    for (i, a) in coeffs.iter().enumerate() {
        if rational::int_valuation(a.denom(), p) > 0 {
            return Err(HClause::NotPIntegral(i + 1));
        }
    }
    if ord_p(&coeffs[n - 2], p) != Valuation::Finite(0) {
        return Err(HClause::LinearCoefficientNotUnit);
    }
    if ord_p(&coeffs[n - 1], p) <= Valuation::Finite(0) {
        return Err(HClause::ConstantNotInMaximalIdeal);
    }
    Ok(())
}

/// Validates condition (H) and certifies irreducibility over Q.
pub fn validate_minpoly(p: Prime, coeffs: Vec<BigRational>) -> Result<MinPoly, FieldError> {
    validate(p, coeffs, false)
}

/// Like [`validate_minpoly`], but accepts polynomials whose irreducibility
/// could not be certified (proven-reducible ones are still rejected).
pub fn validate_minpoly_forced(p: Prime, coeffs: Vec<BigRational>) -> Result<MinPoly, FieldError> {
    validate(p, coeffs, true)
}

fn validate(p: Prime, coeffs: Vec<BigRational>, force: bool) -> Result<MinPoly, FieldError> {
    check_condition_h(p, &coeffs).map_err(FieldError::HViolation)?;
    let certificate = match certify(p, &coeffs) {
        Verdict::Irreducible(c) => c,
        Verdict::Reducible => return Err(FieldError::Reducible),
        Verdict::Unknown { .. } if force => Certificate::Forced,
        Verdict::Unknown { tried } => return Err(FieldError::IrreducibilityUnknown { tried }),
    };
    Ok(MinPoly::assemble(p, coeffs, certificate))
}

impl MinPoly {
    fn assemble(p: Prime, coeffs: Vec<BigRational>, certificate: Certificate) -> Self {
        let den = coeffs
            .iter()
            .fold(BigInt::one(), |acc, a| acc.lcm(a.denom()));
        let scaled = coeffs
            .iter()
            .map(|a| a.numer() * (&den / a.denom()))
            .collect();
        MinPoly {
            p,
            coeffs,
            scaled,
            den,
            certificate,
        }
    }

    #[cfg(test)]
    pub(crate) fn unchecked(p: u64, coeffs: &[i64]) -> Self {
        let coeffs = coeffs
            .iter()
            .map(|&c| BigRational::from_integer(c.into()))
            .collect();
        Self::assemble(Prime::new(p).unwrap(), coeffs, Certificate::Forced)
    }

    /// The degree-one field Q, generated by the root `0` of `x`.
    pub fn rational(p: Prime) -> Self {
        Self::assemble(p, vec![BigRational::zero()], Certificate::RationalField)
    }

    /// Convenience constructor from integer coefficients `a_1, …, a_n`.
    pub fn from_ints(p: u64, coeffs: &[i64]) -> Result<Self, FieldError> {
        let p = Prime::new(p)?;
        validate_minpoly(
            p,
            coeffs
                .iter()
                .map(|&c| BigRational::from_integer(c.into()))
                .collect(),
        )
    }

    pub fn into_field(self) -> Field {
        Arc::new(self)
    }

    pub fn p(&self) -> Prime {
        self.p
    }

    /// `n = [K : Q]`.
    pub fn degree(&self) -> usize {
        self.coeffs.len()
    }

    /// Vector dimension `s`: `n - 1`, or 1 for Q itself.
    pub fn dimension(&self) -> usize {
        (self.degree() - 1).max(1)
    }

    pub fn is_rational_field(&self) -> bool {
        self.degree() == 1
    }

    /// `a_1, …, a_n`.
    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn certificate(&self) -> &Certificate {
        &self.certificate
    }

    /// `f(x)` for a rational `x`.
    pub fn eval(&self, x: &BigRational) -> BigRational {
        self.coeffs
            .iter()
            .fold(BigRational::one(), |acc, a| acc * x + a)
    }

    pub fn to_json(&self) -> MinPolyJson {
        MinPolyJson {
            p: self.p.get(),
            coeffs: self.coeffs.clone(),
            certificate_prime: self.certificate.prime(),
            certificate: Some(self.certificate.clone()),
        }
    }

    /// Rebuilds a polynomial from JSON, re-running validation.
    pub fn from_json(json: &MinPolyJson) -> Result<Self, FieldError> {
        let p = Prime::new(json.p)?;
        if json.coeffs.len() == 1 && json.coeffs[0].is_zero() {
            return Ok(Self::rational(p));
        }
        if json.certificate == Some(Certificate::Forced) {
            validate_minpoly_forced(p, json.coeffs.clone())
        } else {
            validate_minpoly(p, json.coeffs.clone())
        }
    }
}

impl fmt::Display for MinPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.degree();
        write!(f, "x^{n}")?;
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            let e = n - 1 - i;
            let sign = if a.is_negative() { "-" } else { "+" };
            let mag = format_rational(&a.abs());
            let mag = if e > 0 && a.abs().is_one() {
                String::new()
            } else {
                mag
            };
            match e {
                0 => write!(f, " {sign} {mag}")?,
                1 => write!(f, " {sign} {mag}x")?,
                _ => write!(f, " {sign} {mag}x^{e}")?,
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinPolyJson {
    pub p: u64,
    #[serde(with = "rational::serde_q::vec")]
    pub coeffs: Vec<BigRational>,
    pub certificate_prime: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<Certificate>,
}

fn normalize(mut num: Vec<BigInt>, mut den: BigInt) -> (Vec<BigInt>, BigInt) {
    if num.iter().all(Zero::is_zero) {
        return (num, BigInt::one());
    }
    if den.is_negative() {
        den = -den;
        num.iter_mut().for_each(|x| *x = -&*x);
    }
    let mut g = den.clone();
    for x in &num {
        if g.is_one() {
            break;
        }
        g = g.gcd(x);
    }
    if !g.is_one() {
        num.iter_mut().for_each(|x| *x /= &g);
        den /= &g;
    }
    (num, den)
}

/// An element `Σ c_i z^i` of `K`; `c_i = num[i] / den`.
#[derive(Clone)]
pub struct FieldElement {
    field: Field,
    num: Vec<BigInt>,
    den: BigInt,
}

impl PartialEq for FieldElement {
    fn eq(&self, other: &Self) -> bool {
        (Arc::ptr_eq(&self.field, &other.field) || self.field == other.field)
            && self.den == other.den
            && self.num == other.num
    }
}

impl Eq for FieldElement {}

impl Hash for FieldElement {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.num.hash(state);
        self.den.hash(state);
    }
}

impl FieldElement {
    fn from_parts(field: &Field, num: Vec<BigInt>, den: BigInt) -> Self {
        debug_assert_eq!(num.len(), field.degree());
        let (num, den) = normalize(num, den);
        FieldElement {
            field: field.clone(),
            num,
            den,
        }
    }

    /// From ascending coefficients; shorter lists are zero-padded.
    pub fn new(field: &Field, coeffs: &[BigRational]) -> Result<Self, FieldError> {
        let n = field.degree();
        if coeffs.len() > n {
            return Err(FieldError::CoefficientCount {
                expected: n,
                got: coeffs.len(),
            });
        }
        let den = coeffs
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let mut num: Vec<BigInt> = coeffs
            .iter()
            .map(|c| c.numer() * (&den / c.denom()))
            .collect();
        num.resize(n, BigInt::zero());
        Ok(Self::from_parts(field, num, den))
    }

    pub fn from_i64s(field: &Field, coeffs: &[i64]) -> Result<Self, FieldError> {
        let q: Vec<BigRational> = coeffs
            .iter()
            .map(|&c| BigRational::from_integer(c.into()))
            .collect();
        Self::new(field, &q)
    }

    pub fn zero(field: &Field) -> Self {
        FieldElement {
            field: field.clone(),
            num: vec![BigInt::zero(); field.degree()],
            den: BigInt::one(),
        }
    }

    pub fn one(field: &Field) -> Self {
        Self::from_rational(field, &BigRational::one())
    }

    pub fn from_rational(field: &Field, q: &BigRational) -> Self {
        let mut num = vec![BigInt::zero(); field.degree()];
        num[0] = q.numer().clone();
        FieldElement {
            field: field.clone(),
            num,
            den: q.denom().clone(),
        }
    }

    /// The generator `z` (zero in the rational field).
    pub fn generator(field: &Field) -> Self {
        if field.is_rational_field() {
            return Self::zero(field);
        }
        let mut num = vec![BigInt::zero(); field.degree()];
        num[1] = BigInt::one();
        FieldElement {
            field: field.clone(),
            num,
            den: BigInt::one(),
        }
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn same_field(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.field, &other.field) || self.field == other.field
    }

    pub fn is_zero(&self) -> bool {
        self.num.iter().all(Zero::is_zero)
    }

    /// True when the element lies in Q.
    pub fn is_rational(&self) -> bool {
        self.num[1..].iter().all(Zero::is_zero)
    }

    /// Integer numerators `d·c_i` over the common denominator [`Self::den`].
    pub fn numerators(&self) -> &[BigInt] {
        &self.num
    }

    /// The common denominator; equals `denom_z`.
    pub fn den(&self) -> &BigInt {
        &self.den
    }

    pub fn coeff(&self, i: usize) -> BigRational {
        BigRational::new(self.num[i].clone(), self.den.clone())
    }

    pub fn coeffs(&self) -> Vec<BigRational> {
        (0..self.num.len()).map(|i| self.coeff(i)).collect()
    }

    /// Smallest positive `d` with `d·a` having integer coefficients.
    pub fn denom_z(&self) -> BigInt {
        self.den.clone()
    }

    /// Largest coefficient height `|num| + den` over the power basis.
    pub fn height_z(&self) -> BigInt {
        self.coeffs()
            .iter()
            .map(rational::height)
            .max()
            .expect("nonempty coefficient list")
    }

    /// Cheap bound `max |num_i| + den >= height_z`.
    pub(crate) fn height_bound(&self) -> BigInt {
        self.num.iter().map(|x| x.abs()).max().unwrap_or_default() + &self.den
    }

    fn assert_same(&self, other: &Self) {
        assert!(self.same_field(other), "{}", FieldError::MixedField);
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, FieldError> {
        if !self.same_field(other) {
            return Err(FieldError::MixedField);
        }
        Ok(self.add_unchecked(other))
    }

    fn add_unchecked(&self, other: &Self) -> Self {
        if self.den == other.den {
            let num = self
                .num
                .iter()
                .zip(&other.num)
                .map(|(a, b)| a + b)
                .collect();
            return Self::from_parts(&self.field, num, self.den.clone());
        }
        let l = self.den.lcm(&other.den);
        let fa = &l / &self.den;
        let fb = &l / &other.den;
        let num = self
            .num
            .iter()
            .zip(&other.num)
            .map(|(a, b)| a * &fa + b * &fb)
            .collect();
        Self::from_parts(&self.field, num, l)
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self, FieldError> {
        if !self.same_field(other) {
            return Err(FieldError::MixedField);
        }
        Ok(self.mul_unchecked(other))
    }

    fn mul_unchecked(&self, other: &Self) -> Self {
        let n = self.field.degree();
        if self.is_rational() {
            return other.scale_integer(&self.num[0], &self.den);
        }
        if other.is_rational() {
            return self.scale_integer(&other.num[0], &other.den);
        }
        let mut prod = vec![BigInt::zero(); 2 * n - 1];
        for (i, a) in self.num.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.num.iter().enumerate() {
                if !b.is_zero() {
                    prod[i + j] += a * b;
                }
            }
        }
        let (num, extra) = self.reduce(prod);
        Self::from_parts(&self.field, num, &self.den * &other.den * extra)
    }

    /// Reduces an integer polynomial modulo the minimal polynomial; returns
    /// the reduced numerators and the extra denominator introduced.
    fn reduce(&self, mut prod: Vec<BigInt>) -> (Vec<BigInt>, BigInt) {
        let f = &*self.field;
        let n = f.degree();
        let mut extra = BigInt::one();
        while prod.len() > n {
            let c = prod.pop().expect("length > n");
            let k = prod.len();
            if c.is_zero() {
                continue;
            }
            if !f.den.is_one() {
                prod.iter_mut().for_each(|x| *x *= &f.den);
                extra *= &f.den;
            }
            for (i, a) in f.scaled.iter().enumerate() {
                if !a.is_zero() {
                    prod[k - 1 - i] -= &c * a;
                }
            }
        }
        (prod, extra)
    }

    fn scale_integer(&self, n: &BigInt, d: &BigInt) -> Self {
        let num = self.num.iter().map(|x| x * n).collect();
        Self::from_parts(&self.field, num, &self.den * d)
    }

    /// `q · a` for rational `q`.
    pub fn scale(&self, q: &BigRational) -> Self {
        self.scale_integer(q.numer(), q.denom())
    }

    /// `a + q` for rational `q`.
    pub fn add_rational(&self, q: &BigRational) -> Self {
        let mut num = self.num.clone();
        let l = self.den.lcm(q.denom());
        let fa = &l / &self.den;
        if !fa.is_one() {
            num.iter_mut().for_each(|x| *x *= &fa);
        }
        num[0] += q.numer() * (&l / q.denom());
        Self::from_parts(&self.field, num, l)
    }

    pub fn sub_rational(&self, q: &BigRational) -> Self {
        self.add_rational(&-q)
    }

    /// `1/a` by the extended Euclidean algorithm against the minimal polynomial.
    pub fn invert(&self) -> Result<Self, FieldError> {
        if self.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        if self.is_rational() {
            let mut num = vec![BigInt::zero(); self.num.len()];
            num[0] = self.den.clone();
            return Ok(Self::from_parts(&self.field, num, self.num[0].clone()));
        }
        // Work with the integer numerator polynomial; 1/(N/d) = d · (1/N).
        let f = &*self.field;
        let mut r0: Vec<BigRational> = f
            .coeffs
            .iter()
            .rev()
            .cloned()
            .chain(std::iter::once(BigRational::one()))
            .collect();
        let mut r1: Vec<BigRational> = trim_q(
            self.num
                .iter()
                .map(|x| BigRational::from_integer(x.clone()))
                .collect(),
        );
        let mut t0: Vec<BigRational> = Vec::new();
        let mut t1: Vec<BigRational> = vec![BigRational::one()];
        while r1.len() > 1 {
            let (q, r) = divrem_q(&r0, &r1);
            let t = sub_q(&t0, &mul_q(&q, &t1));
            r0 = std::mem::replace(&mut r1, r);
            t0 = std::mem::replace(&mut t1, t);
            if r1.is_empty() {
                // gcd of positive degree: impossible for an irreducible modulus
                return Err(FieldError::DivisionByZero);
            }
            // keep the remainder monic to slow coefficient growth
            let lead = r1.last().expect("nonempty").recip();
            r1.iter_mut().for_each(|c| *c *= &lead);
            t1.iter_mut().for_each(|c| *c *= &lead);
        }
        let c = r1[0].recip();
        let scale = BigRational::from_integer(self.den.clone()) * c;
        let coeffs: Vec<BigRational> = t1.iter().map(|x| x * &scale).collect();
        let inv = FieldElement::new(&self.field, &coeffs[..coeffs.len().min(f.degree())]);
        debug_assert!(coeffs.len() <= f.degree());
        inv
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self, FieldError> {
        let inv = other.invert()?;
        self.checked_mul(&inv)
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut acc = Self::one(&self.field);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_unchecked(&base);
            }
            base = base.mul_unchecked(&base);
            e >>= 1;
        }
        acc
    }

    /// Coordinates in the power basis, padded to `len`.
    fn coordinates(&self, len: usize) -> Vec<BigRational> {
        let mut c = self.coeffs();
        c.resize(len, BigRational::zero());
        c
    }

    pub fn to_json(&self) -> FieldElementJson {
        FieldElementJson {
            coeffs: self.coeffs(),
        }
    }

    pub fn from_json(field: &Field, json: &FieldElementJson) -> Result<Self, FieldError> {
        if json.coeffs.len() != field.degree() {
            return Err(FieldError::CoefficientCount {
                expected: field.degree(),
                got: json.coeffs.len(),
            });
        }
        Self::new(field, &json.coeffs)
    }
}

fn trim_q(mut v: Vec<BigRational>) -> Vec<BigRational> {
    while v.last().is_some_and(Zero::is_zero) {
        v.pop();
    }
    v
}

fn sub_q(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let n = a.len().max(b.len());
    trim_q(
        (0..n)
            .map(|i| {
                let x = a.get(i).cloned().unwrap_or_else(BigRational::zero);
                match b.get(i) {
                    Some(y) => x - y,
                    None => x,
                }
            })
            .collect(),
    )
}

fn mul_q(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trim_q(out)
}

fn divrem_q(a: &[BigRational], b: &[BigRational]) -> (Vec<BigRational>, Vec<BigRational>) {
    let db = b.len() - 1;
    let lead_inv = b[db].recip();
    let mut r = a.to_vec();
    if r.len() <= db {
        return (Vec::new(), trim_q(r));
    }
    let mut q = vec![BigRational::zero(); r.len() - db];
    while r.len() > db {
        let top = r.len() - 1;
        let c = &r[top] * &lead_inv;
        if !c.is_zero() {
            for (i, bi) in b.iter().enumerate() {
                let delta = &c * bi;
                r[top - db + i] -= delta;
            }
        }
        q[top - db] = c;
        r.pop();
    }
    (trim_q(q), trim_q(r))
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs().iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let mag = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            let mag_s = format_rational(&mag);
            match (i, mag.is_one()) {
                (0, _) => write!(f, "{mag_s}")?,
                (1, true) => write!(f, "z")?,
                (1, false) => write!(f, "{mag_s}z")?,
                (_, true) => write!(f, "z^{i}")?,
                (_, false) => write!(f, "{mag_s}z^{i}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FieldElement({self})")
    }
}

impl std::ops::Add for &FieldElement {
    type Output = FieldElement;
    fn add(self, rhs: &FieldElement) -> FieldElement {
        self.assert_same(rhs);
        self.add_unchecked(rhs)
    }
}

impl std::ops::Sub for &FieldElement {
    type Output = FieldElement;
    fn sub(self, rhs: &FieldElement) -> FieldElement {
        self.assert_same(rhs);
        self.add_unchecked(&-rhs)
    }
}

impl std::ops::Neg for &FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        FieldElement {
            field: self.field.clone(),
            num: self.num.iter().map(|x| -x).collect(),
            den: self.den.clone(),
        }
    }
}

/// Panics when the operands live in different fields; see
/// [`FieldElement::checked_mul`] for the fallible form.
impl std::ops::Mul for &FieldElement {
    type Output = FieldElement;
    fn mul(self, rhs: &FieldElement) -> FieldElement {
        self.assert_same(rhs);
        self.mul_unchecked(rhs)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldElementJson {
    #[serde(with = "rational::serde_q::vec")]
    pub coeffs: Vec<BigRational>,
}

impl Serialize for FieldElement {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

/// Lowest-degree monic polynomial over Q annihilating `a`, returned as
/// `[b_1, …, b_d]` for `x^d + b_1 x^{d-1} + … + b_d`.
pub fn element_minpoly(a: &FieldElement) -> Vec<BigRational> {
    let n = a.field.degree();
    let mut powers = vec![FieldElement::one(&a.field)];
    for d in 1..=n {
        let next = powers.last().expect("nonempty").mul_unchecked(a);
        powers.push(next);
        // columns are the coordinate vectors of 1, a, …, a^d
        let cols: Vec<Vec<BigRational>> = powers.iter().map(|x| x.coordinates(n)).collect();
        let m = RationalMatrix::from_rows(cols).transpose();
        let kernel = m.kernel();
        if let Some(v) = kernel.first() {
            let lead = v[d].clone();
            debug_assert!(!lead.is_zero());
            return (0..d).rev().map(|i| &v[i] / &lead).collect();
        }
    }
    unreachable!("1, a, …, a^n are always dependent")
}

/// A vector `(α_1, …, α_s)` of elements of one field.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct VectorElement(Vec<FieldElement>);

impl VectorElement {
    pub fn new(comps: Vec<FieldElement>) -> Result<Self, FieldError> {
        let first = comps.first().ok_or(FieldError::Dimension {
            expected: 1,
            got: 0,
        })?;
        if comps.iter().any(|c| !c.same_field(first)) {
            return Err(FieldError::MixedField);
        }
        let s = first.field.dimension();
        if comps.len() != s {
            return Err(FieldError::Dimension {
                expected: s,
                got: comps.len(),
            });
        }
        Ok(VectorElement(comps))
    }

    pub(crate) fn from_vec_unchecked(comps: Vec<FieldElement>) -> Self {
        VectorElement(comps)
    }

    pub fn zero(field: &Field) -> Self {
        VectorElement(vec![FieldElement::zero(field); field.dimension()])
    }

    pub fn from_rationals(field: &Field, v: &[BigRational]) -> Result<Self, FieldError> {
        Self::new(
            v.iter()
                .map(|q| FieldElement::from_rational(field, q))
                .collect(),
        )
    }

    pub fn field(&self) -> &Field {
        &self.0[0].field
    }

    pub fn components(&self) -> &[FieldElement] {
        &self.0
    }

    pub fn into_components(self) -> Vec<FieldElement> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(FieldElement::is_zero)
    }

    /// `max_i denom_z(α_i)`.
    pub fn denom_z(&self) -> BigInt {
        self.0
            .iter()
            .map(|a| a.den.clone())
            .max()
            .expect("nonempty")
    }

    /// `max_i Height_z(α_i)`.
    pub fn height_z(&self) -> BigInt {
        self.0
            .iter()
            .map(FieldElement::height_z)
            .max()
            .expect("nonempty")
    }

    /// True when `Height_z > bound`, avoiding per-coefficient reduction when
    /// a cheap upper bound already settles it.
    pub fn height_exceeds(&self, bound: &BigInt) -> bool {
        self.0
            .iter()
            .any(|a| &a.height_bound() > bound && &a.height_z() > bound)
    }

    /// The `s × (s+1)` matrix `M` with `ᾱ = M (z^s, …, z, 1)^T`; columns run
    /// in descending powers.
    pub fn coeff_matrix(&self) -> RationalMatrix {
        let s = self.0.len();
        let rows = self
            .0
            .iter()
            .map(|a| {
                let mut c = a.coordinates(s + 1);
                c.reverse();
                c
            })
            .collect();
        RationalMatrix::from_rows(rows)
    }

    /// Inverse of [`Self::coeff_matrix`].
    pub fn from_coeff_matrix(field: &Field, m: &RationalMatrix) -> Result<Self, FieldError> {
        let n = field.degree();
        let comps = (0..m.rows())
            .map(|i| {
                let mut c = m.row(i).to_vec();
                c.reverse();
                if c[n..].iter().any(|x| !x.is_zero()) {
                    return Err(FieldError::CoefficientCount {
                        expected: n,
                        got: c.len(),
                    });
                }
                c.truncate(n);
                FieldElement::new(field, &c)
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(comps)
    }

    pub fn to_json(&self) -> Vec<FieldElementJson> {
        self.0.iter().map(FieldElement::to_json).collect()
    }

    pub fn from_json(field: &Field, json: &[FieldElementJson]) -> Result<Self, FieldError> {
        Self::new(
            json.iter()
                .map(|j| FieldElement::from_json(field, j))
                .collect::<Result<_, _>>()?,
        )
    }
}

impl std::ops::Index<usize> for VectorElement {
    type Output = FieldElement;
    fn index(&self, i: usize) -> &FieldElement {
        &self.0[i]
    }
}

impl fmt::Debug for VectorElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, a) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, ")")
    }
}

impl Serialize for VectorElement {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

/// True iff `1, t_1, …, t_k` are linearly independent over Q.
pub fn independent_with_one(elems: &[FieldElement]) -> bool {
    let Some(first) = elems.first() else {
        return true;
    };
    let n = first.field.degree();
    if elems.len() + 1 > n {
        return false;
    }
    let rows: Vec<Vec<BigRational>> = std::iter::once(FieldElement::one(&first.field))
        .chain(elems.iter().cloned())
        .map(|e| e.coordinates(n))
        .collect();
    RationalMatrix::from_rows(rows).rank() == elems.len() + 1
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn cubic() -> Field {
        // x^3 + x + 4 at p = 2: ord(a_2) = 0, ord(a_3) = 2, no rational root
        MinPoly::from_ints(2, &[0, 1, 4]).unwrap().into_field()
    }

    fn el(f: &Field, c: &[i64]) -> FieldElement {
        FieldElement::from_i64s(f, c).unwrap()
    }

    #[test]
    fn validate_examples() {
        let m = MinPoly::from_ints(2, &[1, 2]).unwrap();
        assert_eq!(m.certificate().prime(), 3);
        assert_eq!(
            MinPoly::from_ints(2, &[2, 2]),
            Err(FieldError::HViolation(HClause::LinearCoefficientNotUnit))
        );
        assert!(MinPoly::from_ints(2, &[0, -4]).is_err());
        assert_eq!(
            MinPoly::from_ints(3, &[1, 1]),
            Err(FieldError::HViolation(HClause::ConstantNotInMaximalIdeal))
        );
        let p = Prime::new(3).unwrap();
        assert_eq!(
            validate_minpoly(p, vec![q(1, 3), q(3, 1)]),
            Err(FieldError::HViolation(HClause::NotPIntegral(1)))
        );
    }

    #[test]
    fn ring_identities_modulo_reducible_cubic() {
        // x^3 + x + 2 = (x + 1)(x^2 - x + 2) is rejected by validation, but
        // the quotient-ring identities still hold.
        assert_eq!(
            MinPoly::from_ints(2, &[0, 1, 2]),
            Err(FieldError::Reducible)
        );
        let f = MinPoly::unchecked(2, &[0, 1, 2]).into_field();
        let z = FieldElement::generator(&f);
        let z2 = el(&f, &[0, 0, 1]);
        assert_eq!(&z * &z2, el(&f, &[-2, -1, 0]));
        assert_eq!(&z2 * &z2, el(&f, &[0, -2, -1]));
        assert_eq!(
            z.invert().unwrap(),
            FieldElement::new(&f, &[q(-1, 2), q(0, 1), q(-1, 2)]).unwrap()
        );
    }

    #[test]
    fn multiplication_examples() {
        let f = cubic();
        let z = FieldElement::generator(&f);
        let z2 = el(&f, &[0, 0, 1]);
        assert_eq!(&z * &z2, el(&f, &[-4, -1, 0]));
        assert_eq!(&z2 * &z2, el(&f, &[0, -4, -1]));
        let a = el(&f, &[3, -1, 7]);
        assert_eq!(&a * &FieldElement::one(&f), a);
        let other = MinPoly::from_ints(2, &[1, 2]).unwrap().into_field();
        assert_eq!(
            z.checked_mul(&FieldElement::generator(&other)),
            Err(FieldError::MixedField)
        );
    }

    #[test]
    fn inversion_examples() {
        let f = cubic();
        let z = FieldElement::generator(&f);
        let inv = z.invert().unwrap();
        assert_eq!(
            inv,
            FieldElement::new(&f, &[q(-1, 4), q(0, 1), q(-1, 4)]).unwrap()
        );
        assert_eq!(&inv * &z, FieldElement::one(&f));
        assert_eq!(
            FieldElement::one(&f).invert().unwrap(),
            FieldElement::one(&f)
        );
        assert_eq!(
            FieldElement::zero(&f).invert(),
            Err(FieldError::DivisionByZero)
        );

        // x^2 + u x + v p^k with u = 3, v = 5, p = 2, k = 1: 1/z = -(z + u)/(v p^k)
        let quad = MinPoly::from_ints(2, &[3, 10]).unwrap().into_field();
        let z = FieldElement::generator(&quad);
        assert_eq!(
            z.invert().unwrap(),
            FieldElement::new(&quad, &[q(-3, 10), q(-1, 10)]).unwrap()
        );
    }

    #[test]
    fn rational_field_arithmetic() {
        let f = MinPoly::rational(Prime::new(5).unwrap()).into_field();
        assert_eq!(f.dimension(), 1);
        let a = FieldElement::from_rational(&f, &q(2, 3));
        let b = FieldElement::from_rational(&f, &q(-7, 4));
        assert_eq!(&a * &b, FieldElement::from_rational(&f, &q(-7, 6)));
        assert_eq!(
            a.invert().unwrap(),
            FieldElement::from_rational(&f, &q(3, 2))
        );
    }

    #[test]
    fn element_minpolys() {
        let f = cubic();
        let z = FieldElement::generator(&f);
        assert_eq!(element_minpoly(&z), f.coeffs().to_vec());
        let r = FieldElement::from_rational(&f, &q(5, 7));
        assert_eq!(element_minpoly(&r), vec![q(-5, 7)]);
        let z2 = el(&f, &[0, 0, 1]);
        let mp = element_minpoly(&z2);
        assert_eq!(mp.len(), 3);
        // substitute z^2 back in
        let mut acc = FieldElement::one(&f);
        for c in &mp {
            acc = (&acc * &z2).add_rational(c);
        }
        assert!(acc.is_zero());
    }

    #[test]
    fn denominators_and_heights() {
        let f = cubic();
        let a = FieldElement::new(&f, &[q(1, 3), q(1, 2)]).unwrap();
        assert_eq!(a.denom_z(), BigInt::from(6));
        assert_eq!(el(&f, &[4, -9, 2]).denom_z(), BigInt::one());
        let v = VectorElement::new(vec![
            FieldElement::new(&f, &[q(0, 1), q(1, 2)]).unwrap(),
            FieldElement::new(&f, &[q(0, 1), q(1, 4)]).unwrap(),
        ])
        .unwrap();
        assert_eq!(v.denom_z(), BigInt::from(4));

        let b = FieldElement::new(&f, &[q(2, 3), q(1, 1)]).unwrap();
        assert_eq!(b.height_z(), BigInt::from(5));
        assert_eq!(FieldElement::zero(&f).height_z(), BigInt::one());
        let w = VectorElement::new(vec![
            FieldElement::from_rational(&f, &q(-4, 1)),
            FieldElement::new(&f, &[q(0, 1), q(1, 7)]).unwrap(),
        ])
        .unwrap();
        assert_eq!(w.height_z(), BigInt::from(8));
        assert!(w.height_exceeds(&BigInt::from(7)));
        assert!(!w.height_exceeds(&BigInt::from(8)));
    }

    #[test]
    fn coefficient_matrices() {
        let f = cubic();
        let v = VectorElement::new(vec![el(&f, &[0, 0, 1]), el(&f, &[0, 1])]).unwrap();
        assert_eq!(
            v.coeff_matrix(),
            RationalMatrix::from_i64_rows(&[&[1, 0, 0], &[0, 1, 0]])
        );
        let u = VectorElement::new(vec![el(&f, &[0, 1, 1]), el(&f, &[0, 1])]).unwrap();
        let m = u.coeff_matrix();
        assert_eq!(m, RationalMatrix::from_i64_rows(&[&[1, 1, 0], &[0, 1, 0]]));
        assert_eq!(
            m.leading_columns(2),
            RationalMatrix::from_i64_rows(&[&[1, 1], &[0, 1]])
        );
        assert_eq!(VectorElement::from_coeff_matrix(&f, &m).unwrap(), u);

        let quad = MinPoly::from_ints(2, &[1, 2]).unwrap().into_field();
        let w = VectorElement::new(vec![el(&quad, &[1, 1])]).unwrap();
        assert_eq!(w.coeff_matrix(), RationalMatrix::from_i64_rows(&[&[1, 1]]));
    }

    #[test]
    fn independence() {
        let f = cubic();
        let z = FieldElement::generator(&f);
        let z2 = el(&f, &[0, 0, 1]);
        assert!(independent_with_one(&[z.clone(), z2]));
        assert!(!independent_with_one(&[z.clone(), el(&f, &[1, 1])]));
        assert!(!independent_with_one(&[FieldElement::from_rational(
            &f,
            &q(3, 1)
        )]));
    }

    #[test]
    fn json_forms() {
        let f = cubic();
        let a = FieldElement::new(&f, &[q(-5, 7), q(3, 1)]).unwrap();
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            r#"{"coeffs":["-5/7","3","0"]}"#
        );
        let back = FieldElement::from_json(
            &f,
            &serde_json::from_str(r#"{"coeffs":["-5/7","3","0"]}"#).unwrap(),
        )
        .unwrap();
        assert_eq!(back, a);
        let mj = serde_json::to_value(f.to_json()).unwrap();
        assert_eq!(mj["p"], 2);
        assert_eq!(mj["coeffs"], serde_json::json!(["0", "1", "4"]));
        assert!(mj["certificate_prime"].as_u64().unwrap() > 2);
        let again = MinPoly::from_json(&serde_json::from_value(mj).unwrap()).unwrap();
        assert_eq!(again, *f);
    }
}
