//! Independent oracles shared by the integration tests and the acceptance
//! runner. Nothing here calls into the library's valuation or field code.

#![allow(dead_code)]

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

pub fn qi(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

fn val(n: &BigInt, p: u64) -> u64 {
    let p = BigInt::from(p);
    let mut n = n.abs();
    let mut k = 0;
    while !n.is_zero() && (&n % &p).is_zero() {
        n /= &p;
        k += 1;
    }
    k
}

/// `ord_p` of a nonzero rational by repeated division.
pub fn rational_ord(x: &BigRational, p: u64) -> i64 {
    val(x.numer(), p) as i64 - val(x.denom(), p) as i64
}

/// Root of `x^2 + u x + v` in `pZ_p` modulo `p^n`, found one digit at a time.
fn quadratic_root(u: &BigInt, v: &BigInt, p: u64, n: u32) -> BigInt {
    let pb = BigInt::from(p);
    let mut r = BigInt::zero();
    let mut pk = pb.clone();
    // digit 0 is 0: the root lies in pZ_p
    for _ in 1..n {
        let next = pk.clone() * &pb;
        let d = (0..p)
            .map(|d| &r + &pk * BigInt::from(d))
            .find(|c| ((c * c + u * c + v) % &next).is_zero())
            .expect("a unique lift exists");
        r = d;
        pk = next;
    }
    r
}

/// `a + b·z` in `Q(z)` with `z^2 + u z + v = 0`, `z ∈ pZ_p`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Quad {
    pub a: BigRational,
    pub b: BigRational,
}

#[derive(Clone, Debug)]
pub struct QuadField {
    pub p: u64,
    pub u: BigInt,
    pub v: BigInt,
}

impl QuadField {
    pub fn mul(&self, x: &Quad, y: &Quad) -> Quad {
        // z^2 = -u z - v
        let bb = &x.b * &y.b;
        let u = BigRational::from_integer(self.u.clone());
        let v = BigRational::from_integer(self.v.clone());
        Quad {
            a: &x.a * &y.a - &bb * &v,
            b: &x.a * &y.b + &x.b * &y.a - &bb * &u,
        }
    }

    pub fn inv(&self, x: &Quad) -> Quad {
        let u = BigRational::from_integer(self.u.clone());
        let v = BigRational::from_integer(self.v.clone());
        let norm = &x.a * &x.a - &x.a * &x.b * &u + &x.b * &x.b * &v;
        Quad {
            a: (&x.a - &x.b * &u) / &norm,
            b: -&x.b / &norm,
        }
    }

    /// `ord_p`, refining the root until the residue is nonzero.
    pub fn ord(&self, x: &Quad) -> i64 {
        assert!(!(x.a.is_zero() && x.b.is_zero()));
        let d = x.a.denom().lcm(x.b.denom());
        let aa = x.a.numer() * (&d / x.a.denom());
        let bb = x.b.numer() * (&d / x.b.denom());
        let mut n = 32;
        loop {
            let m = BigInt::from(self.p).pow(n);
            let r = quadratic_root(&self.u, &self.v, self.p, n);
            let res = (&aa + &bb * &r).mod_floor(&m);
            if !res.is_zero() {
                return val(&res, self.p) as i64 - val(&d, self.p) as i64;
            }
            n *= 2;
        }
    }

    /// Lowest digit of a unit.
    pub fn digit(&self, x: &Quad) -> u64 {
        let pb = BigInt::from(self.p);
        let d = x.a.denom().lcm(x.b.denom());
        let aa = x.a.numer() * (&d / x.a.denom());
        let bb = x.b.numer() * (&d / x.b.denom());
        let vd = val(&d, self.p) as u32;
        let n = vd + 2;
        let r = quadratic_root(&self.u, &self.v, self.p, n);
        let top = (&aa + &bb * &r).mod_floor(&pb.pow(n)) / pb.pow(vd);
        let bottom = &d / pb.pow(vd);
        (0..self.p)
            .find(|&c| ((&bottom * BigInt::from(c) - &top) % &pb).is_zero())
            .expect("unit")
    }
}

/// The classical one-dimensional recurrence
/// `ξ_n = p^{ord ξ_{n-1}}/ξ_{n-1} - a_{n-1}`, returning `(a_n, ord ξ_n)` pairs.
pub fn schneider(field: &QuadField, start: &Quad, steps: usize) -> Vec<(u64, i64)> {
    let mut out = Vec::new();
    let mut x = start.clone();
    for _ in 0..steps {
        if x.a.is_zero() && x.b.is_zero() {
            break;
        }
        let k = field.ord(&x);
        let pk = if k >= 0 {
            BigRational::from_integer(BigInt::from(field.p).pow(k as u32))
        } else {
            BigRational::new(BigInt::one(), BigInt::from(field.p).pow((-k) as u32))
        };
        let y = field.mul(
            &Quad {
                a: pk,
                b: BigRational::zero(),
            },
            &field.inv(&x),
        );
        let a = field.digit(&y);
        out.push((a, k));
        x = Quad {
            a: &y.a - BigRational::from_integer(a.into()),
            b: y.b,
        };
    }
    out
}

/// Binary digits of the root in `(0, 1)` of `x^2 + b x + c` by integer
/// comparisons: `d_k = 1` iff `f((2m + 1)/2^k) < 0`.
pub fn root_bits(b: i64, c: i64, count: usize) -> Vec<u8> {
    let mut m = BigInt::zero();
    let mut out = Vec::with_capacity(count);
    for k in 1..=count as u32 {
        let cand = &m * 2 + 1;
        let d = BigInt::one() << k;
        // f(cand/d)·d^2
        let value: BigInt =
            &cand * &cand + BigInt::from(b) * &cand * &d + BigInt::from(c) * &d * &d;
        if value.is_negative() {
            out.push(1);
            m = cand;
        } else {
            out.push(0);
            m = &m * 2;
        }
    }
    out
}
