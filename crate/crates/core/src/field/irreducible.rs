//! Irreducibility certificates over Q via reduction modulo small primes.
//!
//! A monic `f` with `q`-integral coefficients that factors over Q factors the
//! same way (degree-wise) modulo `q`. So either `f mod q` irreducible for one
//! prime, or the factor-degree patterns of several primes leaving no common
//! proper subset sum, proves `f` irreducible over Q. Reducibility is proven by
//! exhibiting a factor: rational roots directly, higher-degree factors from
//! products of approximate complex roots, verified by exact division.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::rational::{is_prime, Prime};

/// Number of candidate primes examined before giving up.
pub const CANDIDATE_PRIMES: usize = 25;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Certificate {
    /// Degree-one field Q; nothing to certify.
    RationalField,
    /// `f mod q` is irreducible over the field with `q` elements.
    IrreducibleMod { prime: u64 },
    /// The factor-degree patterns modulo these primes admit no common proper
    /// subset sum.
    DegreeAnalysis { primes: Vec<u64> },
    /// Accepted without a certificate at the caller's request.
    Forced,
}

impl Certificate {
    /// The single certifying prime, or 0 when the certificate is of another kind.
    pub fn prime(&self) -> u64 {
        match self {
            Certificate::IrreducibleMod { prime } => *prime,
            _ => 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Irreducible(Certificate),
    /// Proven reducible (a factor was found).
    Reducible,
    Unknown {
        tried: usize,
    },
}

type Poly = Vec<u64>;

fn trim(mut a: Poly) -> Poly {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn inv_mod(a: u64, q: u64) -> u64 {
    let a = BigInt::from(a);
    a.modinv(&BigInt::from(q))
        .and_then(|x| x.to_u64())
        .expect("inverse mod prime")
}

fn rem(mut a: Poly, b: &[u64], q: u64) -> Poly {
    let db = b.len() - 1;
    let lead_inv = inv_mod(b[db], q);
    while a.len() > db {
        let top = a.len() - 1;
        let c = a[top] * lead_inv % q;
        if c != 0 {
            for (i, &bi) in b.iter().enumerate() {
                let idx = top - db + i;
                a[idx] = (a[idx] + q - c * bi % q) % q;
            }
        }
        a.pop();
        a = trim(a);
    }
    trim(a)
}

fn mul_mod(a: &[u64], b: &[u64], f: &[u64], q: u64) -> Poly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x * y) % q;
        }
    }
    rem(trim(out), f, q)
}

fn gcd(mut a: Poly, mut b: Poly, q: u64) -> Poly {
    while !b.is_empty() {
        let r = rem(a, &b, q);
        a = b;
        b = r;
    }
    if let Some(&lead) = a.last() {
        let inv = inv_mod(lead, q);
        a.iter_mut().for_each(|c| *c = *c * inv % q);
    }
    a
}

fn derivative(a: &[u64], q: u64) -> Poly {
    trim(
        a.iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| (i as u64 % q) * c % q)
            .collect(),
    )
}

/// `base^q` modulo `f`.
fn frobenius(base: &[u64], f: &[u64], q: u64) -> Poly {
    let mut acc: Poly = vec![1];
    let mut b = base.to_vec();
    let mut e = q;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(&acc, &b, f, q);
        }
        b = mul_mod(&b, &b, f, q);
        e >>= 1;
    }
    acc
}

fn sub(a: &[u64], b: &[u64], q: u64) -> Poly {
    let n = a.len().max(b.len());
    trim(
        (0..n)
            .map(|i| {
                let x = a.get(i).copied().unwrap_or(0);
                let y = b.get(i).copied().unwrap_or(0);
                (x + q - y) % q
            })
            .collect(),
    )
}

fn div_exact(a: &[u64], b: &[u64], q: u64) -> Poly {
    let db = b.len() - 1;
    let lead_inv = inv_mod(b[db], q);
    let mut a = a.to_vec();
    let mut quot = vec![0u64; a.len().saturating_sub(db)];
    while a.len() > db {
        let top = a.len() - 1;
        let c = a[top] * lead_inv % q;
        quot[top - db] = c;
        for (i, &bi) in b.iter().enumerate() {
            let idx = top - db + i;
            a[idx] = (a[idx] + q - c * bi % q) % q;
        }
        a.pop();
    }
    trim(quot)
}

/// Degrees of the irreducible factors of a squarefree monic `f` over F_q
/// (distinct-degree factorization).
pub(crate) fn factor_degrees(f: &[u64], q: u64) -> Vec<usize> {
    let mut degrees = Vec::new();
    let mut rest = f.to_vec();
    let x: Poly = vec![0, 1];
    let mut h = x.clone();
    let mut d = 0;
    while rest.len() > 1 {
        d += 1;
        if 2 * d > rest.len() - 1 {
            degrees.push(rest.len() - 1);
            break;
        }
        h = frobenius(&h, &rest, q);
        let g = gcd(rest.clone(), sub(&h, &x, q), q);
        let gd = g.len() - 1;
        if gd > 0 {
            degrees.extend(std::iter::repeat_n(d, gd / d));
            rest = div_exact(&rest, &g, q);
            h = rem(h, &rest, q);
        }
    }
    degrees.sort_unstable();
    degrees
}

/// Reduces `x^n + a_1 x^{n-1} + … + a_n` modulo `q`, ascending order;
/// `None` if some denominator is divisible by `q`.
pub(crate) fn reduce_mod(coeffs: &[BigRational], q: u64) -> Option<Poly> {
    let qb = BigInt::from(q);
    let mut out = Vec::with_capacity(coeffs.len() + 1);
    for a in coeffs.iter().rev() {
        let den = a.denom().mod_floor(&qb);
        if den.is_zero() {
            return None;
        }
        let v = (a.numer() * den.modinv(&qb)?).mod_floor(&qb);
        out.push(v.to_u64()?);
    }
    out.push(1);
    Some(out)
}

fn subset_sums(degrees: &[usize], n: usize) -> Vec<bool> {
    let mut reach = vec![false; n + 1];
    reach[0] = true;
    for &d in degrees {
        for s in (d..=n).rev() {
            if reach[s - d] {
                reach[s] = true;
            }
        }
    }
    reach
}

fn has_rational_root(coeffs: &[BigRational]) -> bool {
    let Some(last) = coeffs.last() else {
        return false;
    };
    if last.is_zero() {
        return true;
    }
    if !coeffs.iter().all(|c| c.is_integer()) {
        return false;
    }
    let Some(c) = last.numer().abs().to_u64() else {
        return false;
    };
    if c > 1_000_000 {
        return false;
    }
    let eval = |x: i64| {
        let x = BigRational::from_integer(x.into());
        coeffs
            .iter()
            .fold(BigRational::from_integer(1.into()), |acc, a| acc * &x + a)
    };
    (1..=c)
        .filter(|d| c % d == 0)
        .any(|d| eval(d as i64).is_zero() || eval(-(d as i64)).is_zero())
}

/// Searches for an irreducibility certificate of the monic polynomial with
/// lower coefficients `coeffs`, avoiding the prime `p`.
pub fn certify(p: Prime, coeffs: &[BigRational]) -> Verdict {
    let n = coeffs.len();
    if n <= 1 {
        return Verdict::Irreducible(Certificate::RationalField);
    }
    if has_rational_root(coeffs) {
        return Verdict::Reducible;
    }
    let mut possible = vec![true; n + 1];
    let mut used = Vec::new();
    let mut tried = 0;
    let mut q = 1u64;
    while tried < CANDIDATE_PRIMES {
        q += 1;
        if !is_prime(q) || q == p.get() {
            continue;
        }
        let Some(f) = reduce_mod(coeffs, q) else {
            continue;
        };
        tried += 1;
        // q ∤ disc(f)
        if gcd(f.clone(), derivative(&f, q), q).len() != 1 {
            continue;
        }
        let degrees = factor_degrees(&f, q);
        if degrees == [n] {
            return Verdict::Irreducible(Certificate::IrreducibleMod { prime: q });
        }
        let sums = subset_sums(&degrees, n);
        let before = possible[1..n].iter().filter(|&&b| b).count();
        for (slot, ok) in possible.iter_mut().zip(&sums) {
            *slot &= ok;
        }
        if possible[1..n].iter().filter(|&&b| b).count() < before {
            used.push(q);
        }
    }
    if possible[1..n].iter().all(|&b| !b) {
        Verdict::Irreducible(Certificate::DegreeAnalysis { primes: used })
    } else if find_factor(coeffs).is_some() {
        Verdict::Reducible
    } else {
        Verdict::Unknown { tried }
    }
}

/// Durand-Kerner iteration for the roots of a monic polynomial given by its
/// lower coefficients.
fn approximate_roots(coeffs: &[f64]) -> Vec<Complex64> {
    let n = coeffs.len();
    let eval = |x: Complex64| {
        coeffs
            .iter()
            .fold(Complex64::new(1.0, 0.0), |acc, &a| acc * x + a)
    };
    let bound = 1.0 + coeffs.iter().fold(0.0f64, |m, a| m.max(a.abs()));
    let seed = Complex64::new(0.4, 0.9);
    let mut roots: Vec<Complex64> = (0..n).map(|k| seed.powu(k as u32) * bound).collect();
    for _ in 0..2000 {
        let mut moved = 0.0f64;
        for i in 0..n {
            let denom = (0..n)
                .filter(|&j| j != i)
                .fold(Complex64::new(1.0, 0.0), |acc, j| {
                    acc * (roots[i] - roots[j])
                });
            if denom.norm() == 0.0 {
                roots[i] += Complex64::new(1e-6, 1e-6);
                continue;
            }
            let step = eval(roots[i]) / denom;
            roots[i] -= step;
            moved = moved.max(step.norm());
        }
        if moved < 1e-14 {
            break;
        }
    }
    roots
}

/// Whether the monic `g` divides the monic `f`, both given by their lower
/// coefficients in descending order.
fn divides(f: &[BigInt], g: &[BigInt]) -> bool {
    let (n, k) = (f.len(), g.len());
    let mut r: Vec<BigInt> = std::iter::once(BigInt::one())
        .chain(f.iter().cloned())
        .collect();
    for i in 0..=n - k {
        let c = r[i].clone();
        if c.is_zero() {
            continue;
        }
        for (j, gj) in g.iter().enumerate() {
            r[i + 1 + j] -= &c * gj;
        }
    }
    r[n - k + 1..].iter().all(Zero::is_zero)
}

/// A monic integer factor of degree `2 ≤ k ≤ n/2` (as `b_1, …, b_k`), for
/// integer coefficients only.
pub fn find_factor(coeffs: &[BigRational]) -> Option<Vec<BigInt>> {
    let n = coeffs.len();
    if n < 4 || !coeffs.iter().all(|c| c.is_integer()) {
        return None;
    }
    let ints: Vec<BigInt> = coeffs.iter().map(|c| c.to_integer()).collect();
    let floats: Vec<f64> = ints.iter().map(|c| c.to_f64()).collect::<Option<_>>()?;
    let roots = approximate_roots(&floats);
    for k in 2..=n / 2 {
        let mut pick: Vec<usize> = (0..k).collect();
        loop {
            // product of (x - r) over the picked roots
            let mut prod = vec![Complex64::new(1.0, 0.0)];
            for &i in &pick {
                let mut next = vec![Complex64::zero(); prod.len() + 1];
                for (j, c) in prod.iter().enumerate() {
                    next[j] += c;
                    next[j + 1] -= c * roots[i];
                }
                prod = next;
            }
            let rounded: Option<Vec<BigInt>> = prod[1..]
                .iter()
                .map(|c| {
                    let re = c.re.round();
                    (c.im.abs() < 1e-6 && (c.re - re).abs() < 1e-6 && re.abs() < 1e15)
                        .then(|| BigInt::from(re as i64))
                })
                .collect();
            if let Some(g) = rounded {
                if divides(&ints, &g) {
                    return Some(g);
                }
            }
            // next k-subset in lexicographic order
            let mut i = k;
            while i > 0 && pick[i - 1] == n - k + i - 1 {
                i -= 1;
            }
            if i == 0 {
                break;
            }
            pick[i - 1] += 1;
            for j in i..k {
                pick[j] = pick[j - 1] + 1;
            }
        }
    }
    None
}
