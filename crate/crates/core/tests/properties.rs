mod common;

use common::root_bits;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use pcf::cfrac::{expand, Algorithm, Epsilon, Limits, Phi3Variant};
use pcf::field::{
    element_minpoly, independent_with_one, Field, FieldElement, MinPoly, VectorElement,
};
use pcf::hensel::EmbeddingContext;
use pcf::lab::{byte_stream, irrational_bits, BitSource};
use pcf::matrix::RationalMatrix;
use pcf::preduce::{is_p_integral, is_p_reduced, p_reduce};
use pcf::rational::{head, int_valuation, ord_p, tail, Prime, Valuation};
use proptest::prelude::*;

fn small_q() -> impl Strategy<Value = BigRational> {
    (-60i64..=60, 1i64..=60).prop_map(|(n, d)| BigRational::new(n.into(), d.into()))
}

fn nonzero_q() -> impl Strategy<Value = BigRational> {
    small_q().prop_filter("nonzero", |q| !q.is_zero())
}

fn prime() -> impl Strategy<Value = Prime> {
    prop::sample::select(vec![2u64, 3, 5, 7]).prop_map(|p| Prime::new(p).unwrap())
}

fn fields() -> Vec<Field> {
    [
        (2u64, vec![1i64, 2]),
        (3, vec![0, 1, 3]),
        (2, vec![0, 1, 4]),
        (5, vec![0, 0, 2, 5]),
    ]
    .into_iter()
    .map(|(p, c)| MinPoly::from_ints(p, &c).unwrap().into_field())
    .collect()
}

fn element_in(f: &Field) -> impl Strategy<Value = FieldElement> {
    let f = f.clone();
    prop::collection::vec(small_q(), f.degree())
        .prop_map(move |c| FieldElement::new(&f, &c).unwrap())
}

fn field_and_elements(count: usize) -> impl Strategy<Value = (Field, Vec<FieldElement>)> {
    prop::sample::select(fields()).prop_flat_map(move |f| {
        (
            Just(f.clone()),
            prop::collection::vec(element_in(&f), count),
        )
    })
}

fn square_matrix() -> impl Strategy<Value = RationalMatrix> {
    (1usize..=4).prop_flat_map(|n| {
        prop::collection::vec(prop::collection::vec(small_q(), n), n)
            .prop_map(RationalMatrix::from_rows)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ring_axioms((_, xs) in field_and_elements(3)) {
        let (a, b, c) = (&xs[0], &xs[1], &xs[2]);
        prop_assert_eq!(a + b, b + a);
        prop_assert_eq!(a * b, b * a);
        prop_assert_eq!(&(a * b) * c, a * &(b * c));
        prop_assert_eq!(&(a + b) * c, &(a * c) + &(b * c));
        prop_assert_eq!(a - a, FieldElement::zero(a.field()));
    }

    #[test]
    fn inverses((f, xs) in field_and_elements(1)) {
        let a = &xs[0];
        if a.is_zero() {
            prop_assert!(a.invert().is_err());
        } else {
            prop_assert_eq!(a * &a.invert().unwrap(), FieldElement::one(&f));
        }
    }

    #[test]
    fn element_minpoly_vanishes((f, xs) in field_and_elements(1)) {
        let a = &xs[0];
        let m = element_minpoly(a);
        let value = m.iter().fold(FieldElement::one(&f), |acc, c| (&acc * a).add_rational(c));
        prop_assert!(value.is_zero());
        prop_assert_eq!(m.len() == 1, a.is_rational());
    }

    #[test]
    fn head_tail_split(q in small_q(), p in prime(), m in -3i64..4) {
        let h = head(&q, p, m);
        let t = tail(&q, p, m);
        prop_assert_eq!(&h + &t, q.clone());
        prop_assert!(ord_p(&t, p) > Valuation::Finite(m));
        // the head is a digit sum with p-power denominator
        let (_, rest) = pcf::rational::split_p_power(h.denom(), p);
        prop_assert!(rest.is_one());
    }

    #[test]
    fn valuation_is_additive(x in nonzero_q(), y in nonzero_q(), p in prime()) {
        let sum = ord_p(&x, p).finite().unwrap() + ord_p(&y, p).finite().unwrap();
        prop_assert_eq!(ord_p(&(&x * &y), p), Valuation::Finite(sum));
    }

    #[test]
    fn field_valuation_is_additive((f, xs) in field_and_elements(2)) {
        let ctx = EmbeddingContext::new(f);
        let (a, b) = (&xs[0], &xs[1]);
        match (ctx.ord(a), ctx.ord(b)) {
            (Valuation::Finite(x), Valuation::Finite(y)) => {
                prop_assert_eq!(ctx.ord(&(a * b)), Valuation::Finite(x + y));
            }
            _ => prop_assert!(ctx.ord(&(a * b)).is_infinite()),
        }
    }

    #[test]
    fn digit_subtraction_raises_valuation((f, xs) in field_and_elements(1)) {
        let ctx = EmbeddingContext::new(f);
        let a = &xs[0];
        if let Valuation::Finite(k) = ctx.ord(a) {
            let unit = a.scale(&ctx.p().pow_rational(-k));
            let w = BigRational::from_integer(ctx.omega(&unit).into());
            prop_assert!(w > BigRational::zero());
            prop_assert!(ctx.ord(&unit.sub_rational(&w)) >= Valuation::Finite(1));
        }
    }

    #[test]
    fn p_reduce_normal_form(m in square_matrix(), p in prime()) {
        let (reduced, n) = p_reduce(&m, p).unwrap();
        prop_assert_eq!(n.mul(&m), reduced.clone());
        prop_assert!(is_p_reduced(&reduced, p));
        prop_assert!(is_p_integral(&n, p));
        let inv = n.inverse().unwrap();
        prop_assert!(is_p_integral(&inv, p));
        prop_assert_eq!(p_reduce(&reduced, p).unwrap().0, reduced);
    }

    #[test]
    fn p_reduce_is_unique(m in square_matrix(), p in prime(), seed in prop::collection::vec(-5i64..=5, 16)) {
        let n = m.rows();
        // unipotent lower-triangular times a p-free diagonal: invertible over Z_p ∩ Q
        let mut u = RationalMatrix::identity(n);
        for i in 0..n {
            for j in 0..i {
                u[(i, j)] = BigRational::from_integer(seed[i * 4 + j].into());
            }
        }
        let mut d = RationalMatrix::identity(n);
        for i in 0..n {
            let v = seed[i] * p.get() as i64 + 1;
            d[(i, i)] = BigRational::from_integer(v.into());
        }
        let mut perm = RationalMatrix::identity(n);
        if n > 1 {
            perm.swap_rows(0, n - 1);
        }
        let g = perm.mul(&d).mul(&u);
        prop_assert!(int_valuation(g.determinant().numer(), p) == 0);
        prop_assert_eq!(p_reduce(&g.mul(&m), p).unwrap().0, p_reduce(&m, p).unwrap().0);
    }

    #[test]
    fn bit_pipeline_matches_oracle(count in 8usize..200, which in 0usize..3) {
        let (source, b, c) = [(BitSource::GOLDEN, 1, -1), (BitSource::shifted(1), 2, -1), (BitSource::shifted(2), 2, -2)][which];
        let bits = irrational_bits(source, count);
        prop_assert_eq!(&bits, &root_bits(b, c, count));
        let longer = irrational_bits(source, count + 40);
        prop_assert_eq!(&bits[..], &longer[..count]);
        prop_assert_eq!(&byte_stream(&bits)[..], &byte_stream(&longer)[..count / 8]);
    }
}

fn algorithms() -> Vec<Algorithm> {
    vec![
        Algorithm::Phi0 {
            epsilon: Epsilon::Plus,
        },
        Algorithm::Phi0 {
            epsilon: Epsilon::Minus,
        },
        Algorithm::Phi1 {
            epsilon: Epsilon::Plus,
        },
        Algorithm::Phi1 {
            epsilon: Epsilon::Minus,
        },
        Algorithm::Phi2 {
            epsilon: Epsilon::Plus,
            lookahead: 1,
        },
        Algorithm::phi3(),
        Algorithm::Phi3 {
            variant: Phi3Variant::G,
        },
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn steps_round_trip_in_e(
        (f, xs) in prop::sample::select(fields()).prop_flat_map(|f| {
            let s = f.dimension();
            (Just(f.clone()), prop::collection::vec(element_in(&f), s))
        }),
        which in 0usize..7,
    ) {
        prop_assume!(independent_with_one(&xs));
        let ctx = EmbeddingContext::new(f);
        let a = VectorElement::new(xs).unwrap();
        let algo = algorithms()[which];
        let limits = Limits { max_steps: 6, height_cap_exponent: 60 };
        let rec = expand(&ctx, &a, algo, &limits);
        for (k, st) in rec.steps.iter().enumerate() {
            let x = rec.remainders[k].components();
            let y = rec.remainders[k + 1].components();
            prop_assert_eq!(st.forward(x).unwrap(), y);
            prop_assert_eq!(st.inverse(y).unwrap(), x);
            prop_assert!(ctx.vector_ord(&rec.remainders[k + 1]) >= Valuation::Finite(1));
            prop_assert!(independent_with_one(y));
        }
    }

    #[test]
    fn contraction_of_inverse_steps(
        (f, xs) in prop::sample::select(fields()).prop_flat_map(|f| {
            let s = f.dimension();
            (Just(f.clone()), prop::collection::vec(element_in(&f), s))
        }),
        pts in prop::collection::vec(prop::collection::vec(-20i64..=20, 4), 2),
    ) {
        prop_assume!(independent_with_one(&xs));
        let ctx = EmbeddingContext::new(f.clone());
        let p = ctx.p();
        let s = f.dimension();
        let a = VectorElement::new(xs).unwrap();
        let limits = Limits { max_steps: 3, height_cap_exponent: 60 };
        let rec = expand(&ctx, &a, Algorithm::Phi1 { epsilon: Epsilon::Plus }, &limits);
        // two rational points in E, away from the step's poles
        let pick = |v: &[i64]| -> Vec<BigRational> {
            (0..s).map(|i| BigRational::new((v[i] * p.get() as i64).into(), BigInt::from(v[(i + 1) % 4].abs() * p.get() as i64 + 1))).collect()
        };
        let x = pick(&pts[0]);
        let y = pick(&pts[1]);
        prop_assume!(x != y);
        for (k, st) in rec.steps.iter().enumerate() {
            let (Ok(tx), Ok(ty)) = (st.inverse(&x), st.inverse(&y)) else { continue };
            let j = ctx.vector_ord(&rec.remainders[k]).finite().unwrap();
            let before = x.iter().zip(&y).map(|(a, b)| ord_p(&(a - b), p)).min().unwrap();
            let after = tx.iter().zip(&ty).map(|(a, b)| ord_p(&(a - b), p)).min().unwrap();
            if let (Valuation::Finite(b), after) = (before, after) {
                prop_assert!(after >= Valuation::Finite(b + j));
            }
        }
    }
}
