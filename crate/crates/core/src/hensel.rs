//! The embedding `K ⊂ Q_p` fixed by the Hensel root of the minimal
//! polynomial, and the p-adic functionals it induces on `K`.

use std::sync::{Arc, RwLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::field::{
    check_condition_h, element_minpoly, Field, FieldElement, MinPoly, VectorElement,
};
use crate::rational::{self, int_valuation, mod_inverse, split_p_power, Prime, Valuation};

/// Default number of `T_b` iterations tried by [`EmbeddingContext::find_h_generator`].
pub const DEFAULT_GENERATOR_CAP: u32 = 64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HenselError {
    #[error("element does not generate the whole field")]
    NotPrimitive,
    #[error("element is not in pZ_p")]
    NotInPZp,
    #[error("no generator satisfying (H) within {0} iterations")]
    CapExceeded(u32),
}

/// The root of `f` in `pZ_p`, known modulo `p^precision`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HenselLift {
    precision: u32,
    modulus: BigInt,
    residue: BigInt,
}

impl HenselLift {
    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn modulus(&self) -> &BigInt {
        &self.modulus
    }

    /// Representative in `[0, p^precision)`.
    pub fn residue(&self) -> &BigInt {
        &self.residue
    }

    /// The same root known to a lower precision.
    pub fn truncate(&self, p: Prime, m: u32) -> HenselLift {
        assert!(m <= self.precision);
        let modulus = p.pow(m);
        HenselLift {
            precision: m,
            residue: self.residue.mod_floor(&modulus),
            modulus,
        }
    }
}

/// `f(x) mod q` and `f'(x) mod q` for `x` an integer and `q` a power of `p`.
fn eval_with_derivative(f: &MinPoly, x: &BigInt, q: &BigInt) -> (BigInt, BigInt) {
    let mut v = BigInt::one();
    let mut dv = BigInt::zero();
    for a in f.coeffs() {
        let a = (a.numer() * mod_inverse(a.denom(), q)).mod_floor(q);
        dv = (dv * x + &v).mod_floor(q);
        v = (v * x + a).mod_floor(q);
    }
    (v, dv)
}

/// Lifts the root `≡ 0 mod p` of `f` to precision `m` by Newton iteration.
pub fn hensel_lift(f: &MinPoly, m: u32) -> HenselLift {
    let start = HenselLift {
        precision: 1,
        modulus: f.p().to_bigint(),
        residue: BigInt::zero(),
    };
    extend_lift(f, &start, m)
}

/// Continues Newton iteration from an existing lift.
pub fn extend_lift(f: &MinPoly, lift: &HenselLift, m: u32) -> HenselLift {
    let p = f.p();
    if m <= lift.precision {
        return lift.truncate(p, m);
    }
    if f.is_rational_field() {
        return HenselLift {
            precision: m,
            modulus: p.pow(m),
            residue: BigInt::zero(),
        };
    }
    let mut k = lift.precision;
    let mut x = lift.residue.clone();
    while k < m {
        k = (2 * k).min(m);
        let q = p.pow(k);
        let (v, dv) = eval_with_derivative(f, &x, &q);
        x = (x - v * mod_inverse(&dv, &q)).mod_floor(&q);
    }
    HenselLift {
        precision: m,
        modulus: p.pow(m),
        residue: x,
    }
}

/// Horner evaluation of an integer polynomial at `r` modulo `q`.
fn eval_mod(coeffs: &[BigInt], r: &BigInt, q: &BigInt) -> BigInt {
    coeffs
        .iter()
        .rev()
        .fold(BigInt::zero(), |acc, c| (acc * r + c).mod_floor(q))
}

/// A field together with a growable Hensel lift of its generator.
#[derive(Debug)]
pub struct EmbeddingContext {
    field: Field,
    lift: RwLock<Arc<HenselLift>>,
    ladder_start: u32,
}

impl Clone for EmbeddingContext {
    fn clone(&self) -> Self {
        EmbeddingContext {
            field: self.field.clone(),
            lift: RwLock::new(self.snapshot()),
            ladder_start: self.ladder_start,
        }
    }
}

impl EmbeddingContext {
    pub fn new(field: Field) -> Self {
        let ord_an = rational::ord_p(field.coeffs().last().expect("nonempty"), field.p())
            .finite()
            .unwrap_or(1);
        let ladder_start = (2 * (1 + ord_an * field.degree() as i64)).clamp(2, 1 << 16) as u32;
        let lift = hensel_lift(&field, ladder_start);
        EmbeddingContext {
            field,
            lift: RwLock::new(Arc::new(lift)),
            ladder_start,
        }
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn p(&self) -> Prime {
        self.field.p()
    }

    /// The current lift; never shrinks.
    pub fn snapshot(&self) -> Arc<HenselLift> {
        self.lift.read().expect("lift lock").clone()
    }

    /// A lift of precision at least `m`.
    pub fn lift_to(&self, m: u32) -> Arc<HenselLift> {
        let current = self.snapshot();
        if current.precision >= m {
            return current;
        }
        let mut guard = self.lift.write().expect("lift lock");
        if guard.precision < m {
            let target = m.max(2 * guard.precision);
            *guard = Arc::new(extend_lift(&self.field, &guard, target));
        }
        guard.clone()
    }

    /// `N(z) mod p^m` where `a = N(z)/d`.
    fn numerator_residue(&self, a: &FieldElement, m: u32) -> (BigInt, BigInt) {
        let lift = self.lift_to(m);
        let q = self.p().pow(m);
        let r = if lift.precision == m {
            lift.residue.clone()
        } else {
            lift.residue.mod_floor(&q)
        };
        (eval_mod(a.numerators(), &r, &q), q)
    }

    /// `ord_p` of an element of `K` under the embedding.
    pub fn ord(&self, a: &FieldElement) -> Valuation {
        if a.is_zero() {
            return Valuation::Infinity;
        }
        let p = self.p();
        if a.is_rational() {
            return rational::ord_p(&a.coeff(0), p);
        }
        let den_val = int_valuation(a.den(), p) as i64;
        let mut m = self.ladder_start;
        let mut cap: Option<u32> = None;
        loop {
            let (n, _) = self.numerator_residue(a, m);
            if !n.is_zero() {
                return Valuation::Finite(int_valuation(&n, p) as i64 - den_val);
            }
            if let Some(c) = cap {
                if m >= c {
                    unreachable!("valuation exceeds the bound given by the inverse");
                }
            }
            if m >= 4 * self.ladder_start && cap.is_none() {
                // With 1/a = N'(z)/d', ord(a) <= v_p(d'), so ord(N(z)) < v_p(d) + v_p(d') + 1.
                let inv = a.invert().expect("nonzero element");
                let bound = den_val as u32 + int_valuation(inv.den(), p) as u32 + 1;
                cap = Some(bound.max(m));
            }
            m = match cap {
                Some(c) => (2 * m).min(c),
                None => 2 * m,
            };
        }
    }

    /// `(ω_p(a), ⌊a:m⌋_p)`; both zero for `a = 0`.
    pub fn digits(&self, a: &FieldElement, m: i64) -> (u64, BigRational) {
        if a.is_zero() {
            return (0, BigRational::zero());
        }
        let p = self.p();
        if a.is_rational() {
            let c = a.coeff(0);
            return (rational::omega_p(&c, p), rational::head(&c, p, m));
        }
        // a p^e = N(z)/d' lies in Z_p, so its residue carries c_{-e}, …, c_m.
        let (e, unit_den) = split_p_power(a.den(), p);
        let top = e as i64 + m.max(0) + 1;
        let (n, q) = self.numerator_residue(a, top as u32);
        let r = (n * mod_inverse(&unit_den, &q)).mod_floor(&q);
        let pe = p.pow(e as u32);
        let omega = (&r / &pe).mod_floor(&p.to_bigint());
        let omega = u64::try_from(&omega).expect("digit fits in u64");
        let head_digits = e as i64 + m + 1;
        let head = if head_digits <= 0 {
            BigRational::zero()
        } else {
            BigRational::new(r.mod_floor(&p.pow(head_digits as u32)), pe)
        };
        (omega, head)
    }

    /// `ω_p(a) = c_0`.
    pub fn omega(&self, a: &FieldElement) -> u64 {
        if a.is_zero() {
            return 0;
        }
        if a.is_rational() {
            return rational::omega_p(&a.coeff(0), self.p());
        }
        let p = self.p();
        let (e, unit_den) = split_p_power(a.den(), p);
        let (n, q) = self.numerator_residue(a, e as u32 + 1);
        let r = (n * mod_inverse(&unit_den, &q)).mod_floor(&q);
        let omega = (r / p.pow(e as u32)).mod_floor(&p.to_bigint());
        u64::try_from(&omega).expect("digit fits in u64")
    }

    /// `⌊a:m⌋_p`.
    pub fn head(&self, a: &FieldElement, m: i64) -> BigRational {
        self.digits(a, m).1
    }

    /// `⟨a:m⟩_p = a - ⌊a:m⌋_p`.
    pub fn tail(&self, a: &FieldElement, m: i64) -> FieldElement {
        a.sub_rational(&self.head(a, m))
    }

    /// `T_b(a) = p^{ord a}/a - ω_p(p^{ord a}/a)`, `T_b(0) = 0`.
    pub fn t_b(&self, a: &FieldElement) -> FieldElement {
        if a.is_zero() {
            return a.clone();
        }
        let k = self.ord(a).finite().expect("nonzero element");
        let u = a
            .invert()
            .expect("nonzero element")
            .scale(&self.p().pow_rational(k));
        let w = self.omega(&u);
        u.sub_rational(&BigRational::from_integer(w.into()))
    }

    /// Whether `a ∈ pZ_p \ Q` has a minimal polynomial satisfying (H).
    pub fn satisfies_h(&self, a: &FieldElement) -> bool {
        if a.is_rational() || self.ord(a) < Valuation::Finite(1) {
            return false;
        }
        check_condition_h(self.p(), &element_minpoly(a)).is_ok()
    }

    /// Least `m <= cap` with `T_b^m(a)` satisfying (H), together with that element.
    pub fn find_h_generator(
        &self,
        a: &FieldElement,
        cap: u32,
    ) -> Result<(u32, FieldElement), HenselError> {
        if element_minpoly(a).len() != self.field.degree() || self.field.is_rational_field() {
            return Err(HenselError::NotPrimitive);
        }
        if self.ord(a) < Valuation::Finite(1) {
            return Err(HenselError::NotInPZp);
        }
        let mut b = a.clone();
        for m in 0..=cap {
            if self.satisfies_h(&b) {
                return Ok((m, b));
            }
            b = self.t_b(&b);
        }
        Err(HenselError::CapExceeded(cap))
    }

    /// `ord_p(ᾱ) = min_i ord_p(α_i)`.
    pub fn vector_ord(&self, v: &VectorElement) -> Valuation {
        v.components()
            .iter()
            .map(|a| self.ord(a))
            .min()
            .expect("nonempty vector")
    }

    /// `|ᾱ|_p = p^{-ord_p(ᾱ)}`.
    pub fn vector_abs(&self, v: &VectorElement) -> BigRational {
        self.vector_ord(v).abs_value(self.p())
    }

    /// `⌊ᾱ⌋_p`, component-wise `⌊α_i:0⌋_p`.
    pub fn vector_floor(&self, v: &VectorElement) -> Vec<BigRational> {
        v.components().iter().map(|a| self.head(a, 0)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quad() -> Field {
        MinPoly::from_ints(2, &[1, 2]).unwrap().into_field()
    }

    fn el(f: &Field, c: &[i64]) -> FieldElement {
        FieldElement::from_i64s(f, c).unwrap()
    }

    /// Roots of `f` that are `0 mod p`, by exhaustive search modulo `p^m`.
    fn brute_roots(f: &MinPoly, m: u32) -> Vec<BigInt> {
        let q = f.p().pow(m);
        let q_u = u64::try_from(&q).unwrap();
        (0..q_u)
            .step_by(f.p().get() as usize)
            .map(BigInt::from)
            .filter(|x| eval_with_derivative(f, x, &q).0.is_zero())
            .collect()
    }

    #[test]
    fn lift_examples() {
        let f = quad();
        assert_eq!(hensel_lift(&f, 2).residue(), &BigInt::from(2));
        assert_eq!(hensel_lift(&f, 4).residue(), &BigInt::from(10));
        assert_eq!(brute_roots(&f, 2), vec![BigInt::from(2)]);
        assert_eq!(brute_roots(&f, 4), vec![BigInt::from(10)]);
    }

    #[test]
    fn lift_matches_exhaustive_search() {
        for (p, coeffs) in [(3, vec![1, 3]), (5, vec![0, 2, 10]), (2, vec![3, -1, 6])] {
            let f = MinPoly::from_ints(p, &coeffs).unwrap();
            for m in 1..=5 {
                let lift = hensel_lift(&f, m);
                assert_eq!(
                    brute_roots(&f, m),
                    vec![lift.residue().clone()],
                    "{f} mod {p}^{m}"
                );
            }
        }
    }

    #[test]
    fn lift_is_path_independent() {
        let f = quad();
        let direct = hensel_lift(&f, 40);
        let stepped = extend_lift(&f, &hensel_lift(&f, 20), 40);
        assert_eq!(direct, stepped);
        assert_eq!(
            extend_lift(&f, &hensel_lift(&f, 7), 13),
            hensel_lift(&f, 13)
        );
    }

    #[test]
    fn valuation_examples() {
        let f = quad();
        let ctx = EmbeddingContext::new(f.clone());
        assert_eq!(ctx.ord(&el(&f, &[0, 1])), Valuation::Finite(1));
        assert_eq!(ctx.ord(&el(&f, &[1, 1])), Valuation::Finite(0));
        assert_eq!(ctx.ord(&el(&f, &[2, 1])), Valuation::Finite(2));
        assert_eq!(ctx.ord(&FieldElement::zero(&f)), Valuation::Infinity);
        // z^40 has valuation 40, far beyond the initial ladder
        let z40 = el(&f, &[0, 1]).pow(40);
        assert_eq!(ctx.ord(&z40), Valuation::Finite(40));
        assert_eq!(ctx.ord(&z40.invert().unwrap()), Valuation::Finite(-40));
    }

    #[test]
    fn digit_examples() {
        let f = quad();
        let ctx = EmbeddingContext::new(f.clone());
        let z = el(&f, &[0, 1]);
        assert_eq!(ctx.omega(&z), 0);
        let two_over_z = z
            .invert()
            .unwrap()
            .scale(&BigRational::from_integer(2.into()));
        assert_eq!(two_over_z, el(&f, &[-1, -1]));
        assert_eq!(ctx.omega(&two_over_z), 1);
        assert_eq!(ctx.digits(&two_over_z, 0).0, 1);
    }

    #[test]
    fn head_partitions_the_expansion() {
        let f = MinPoly::from_ints(3, &[0, 2, 6]).unwrap().into_field();
        let ctx = EmbeddingContext::new(f.clone());
        let a = FieldElement::new(
            &f,
            &[
                BigRational::new(5.into(), 9.into()),
                BigRational::new((-7).into(), 2.into()),
                BigRational::new(1.into(), 27.into()),
            ],
        )
        .unwrap();
        for m in -4..6 {
            let head = ctx.head(&a, m);
            assert!(ctx.ord(&ctx.tail(&a, m)) > Valuation::Finite(m));
            // head digits are in range: p^e·head is an integer in [0, p^{e+m+1})
            assert!(rational::ord_p(&head, ctx.p()) >= Valuation::Finite(-3));
        }
    }

    #[test]
    fn rational_elements_agree_with_rational_arithmetic() {
        let f = quad();
        let ctx = EmbeddingContext::new(f.clone());
        let p = ctx.p();
        for (n, d) in [(7, 2), (-3, 8), (12, 5), (1, 1024), (-96, 7)] {
            let q = BigRational::new(n.into(), d.into());
            let a = FieldElement::from_rational(&f, &q);
            assert_eq!(ctx.ord(&a), rational::ord_p(&q, p));
            assert_eq!(ctx.omega(&a), rational::omega_p(&q, p));
            for m in -3..4 {
                assert_eq!(ctx.head(&a, m), rational::head(&q, p, m));
            }
        }
    }

    #[test]
    fn t_b_examples() {
        let f = quad();
        let ctx = EmbeddingContext::new(f.clone());
        let zero = FieldElement::zero(&f);
        assert_eq!(ctx.t_b(&zero), zero);
        // 2/z = -(z+1) ≡ 1 mod 2, so T_b(z) = 2/z - 1 = -z - 2
        let z = el(&f, &[0, 1]);
        assert_eq!(ctx.t_b(&z), el(&f, &[-2, -1]));
        assert!(ctx.ord(&ctx.t_b(&z)) >= Valuation::Finite(1));
    }

    #[test]
    fn generator_search() {
        let f = quad();
        let ctx = EmbeddingContext::new(f.clone());
        let z = el(&f, &[0, 1]);
        assert_eq!(ctx.find_h_generator(&z, 64), Ok((0, z.clone())));
        let r = FieldElement::from_rational(&f, &BigRational::from_integer(4.into()));
        assert_eq!(ctx.find_h_generator(&r, 64), Err(HenselError::NotPrimitive));
        assert_eq!(
            ctx.find_h_generator(&el(&f, &[1, 1]), 64),
            Err(HenselError::NotInPZp)
        );

        let cubic = MinPoly::from_ints(2, &[0, 1, 4]).unwrap().into_field();
        let ctx = EmbeddingContext::new(cubic.clone());
        let a = el(&cubic, &[0, 1, 2]);
        let (m, b) = ctx.find_h_generator(&a, 64).unwrap();
        // independent re-check of the clauses on the output
        let mp = element_minpoly(&b);
        assert_eq!(mp.len(), 3);
        let p = ctx.p();
        assert!(mp.iter().all(|c| int_valuation(c.denom(), p) == 0));
        assert_eq!(rational::ord_p(&mp[1], p), Valuation::Finite(0));
        assert!(rational::ord_p(&mp[2], p) > Valuation::Finite(0));
        assert!(ctx.ord(&b) >= Valuation::Finite(1));
        assert!(m <= 64);
    }

    #[test]
    fn vector_functionals() {
        let f = MinPoly::from_ints(2, &[0, 1, 4]).unwrap().into_field();
        let ctx = EmbeddingContext::new(f.clone());
        let v = VectorElement::new(vec![el(&f, &[0, 0, 1]), el(&f, &[0, 1])]).unwrap();
        assert_eq!(ctx.vector_ord(&v), Valuation::Finite(2));
        assert_eq!(ctx.vector_abs(&v), BigRational::new(1.into(), 4.into()));
        assert_eq!(
            ctx.vector_floor(&v),
            vec![BigRational::zero(), BigRational::zero()]
        );
    }
}
