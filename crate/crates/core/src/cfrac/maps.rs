//! The fractional maps `G_j`, `H_j` and the four step rules built on them.

use std::collections::HashMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::{shift_matrix, Algorithm, CMapStep, Epsilon, Phi3Variant};
use crate::field::{FieldElement, VectorElement};
use crate::hensel::EmbeddingContext;
use crate::matrix::RationalMatrix;
use crate::preduce::p_reduce;
use crate::rational::{split_p_power, tail, Valuation};

/// Parameters and image of one `G_j` or `H_j` evaluated at its own base point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MapImage {
    pub index: usize,
    pub identity: bool,
    pub factors: Vec<BigRational>,
    pub shifts: Vec<BigRational>,
    pub image: VectorElement,
}

impl MapImage {
    fn into_step(self, matrix: RationalMatrix, gamma: Vec<BigRational>) -> CMapStep {
        CMapStep {
            index: self.index,
            identity: self.identity,
            factors: self.factors,
            shifts: self.shifts,
            matrix,
            gamma,
        }
    }
}

fn omega_q(ctx: &EmbeddingContext, a: &FieldElement) -> BigRational {
    BigRational::from_integer(ctx.omega(a).into())
}

/// `G_j^{[ᾱ,ε]}` (with `j` 1-based) together with `G_j(ᾱ)`.
pub fn g_map(
    ctx: &EmbeddingContext,
    alpha: &VectorElement,
    epsilon: Epsilon,
    j: usize,
) -> MapImage {
    let s = alpha.len();
    assert!((1..=s).contains(&j), "index {j} outside 1..={s}");
    let jj = j - 1;
    let pivot = &alpha[jj];
    if pivot.is_zero() {
        return MapImage {
            index: j,
            identity: true,
            factors: Vec::new(),
            shifts: Vec::new(),
            image: alpha.clone(),
        };
    }
    let p = ctx.p();
    let eps = epsilon.to_rational();
    let kj = ctx.ord(pivot).finite().expect("nonzero pivot");
    let inv = pivot.invert().expect("nonzero pivot");
    let mut factors = Vec::with_capacity(s);
    let mut shifts = Vec::with_capacity(s);
    let mut image = Vec::with_capacity(s);
    for (i, ai) in alpha.components().iter().enumerate() {
        let (c, u) = if i == jj {
            let c = &eps * p.pow_rational(kj);
            let u = inv.scale(&c);
            (c, u)
        } else {
            let k = match ctx.ord(ai) {
                Valuation::Finite(ki) => (kj - ki).max(0),
                Valuation::Infinity => 0,
            };
            let c = &eps * p.pow_rational(k);
            let u = if ai.is_zero() {
                FieldElement::zero(ai.field())
            } else {
                (ai * &inv).scale(&c)
            };
            (c, u)
        };
        let w = omega_q(ctx, &u);
        image.push(u.sub_rational(&w));
        factors.push(c);
        shifts.push(w);
    }
    MapImage {
        index: j,
        identity: false,
        factors,
        shifts,
        image: VectorElement::from_vec_unchecked(image),
    }
}

/// The normaliser `a'`: p-free part of the gcd of the reduced numerators of
/// the `z, …, z^s` coefficients, or 1 when they all vanish.
fn normaliser(ctx: &EmbeddingContext, a: &FieldElement) -> BigInt {
    let den = a.den();
    let g = a.numerators()[1..]
        .iter()
        .filter(|x| !x.is_zero())
        .fold(BigInt::zero(), |g, x| g.gcd(&(x / x.gcd(den))));
    if g.is_zero() {
        return BigInt::one();
    }
    split_p_power(&g.abs(), ctx.p()).1
}

/// `H_j^{[ᾱ,ε,z]}` (with `j` 1-based) together with `H_j(ᾱ)`.
pub fn h_map(
    ctx: &EmbeddingContext,
    alpha: &VectorElement,
    epsilon: Epsilon,
    j: usize,
) -> MapImage {
    let g = g_map(ctx, alpha, epsilon, j);
    if g.identity {
        return g;
    }
    let p = ctx.p();
    let s = alpha.len();
    let mut factors = Vec::with_capacity(s);
    let mut shifts = Vec::with_capacity(s);
    let mut image = Vec::with_capacity(s);
    for (i, gi) in g.image.components().iter().enumerate() {
        let a_prime = normaliser(ctx, gi);
        let (scaled, c, w) = if a_prime.is_one() {
            (gi.clone(), g.factors[i].clone(), g.shifts[i].clone())
        } else {
            let inv = BigRational::new(BigInt::one(), a_prime);
            (gi.scale(&inv), &g.factors[i] * &inv, &g.shifts[i] * &inv)
        };
        let t = tail(&scaled.coeff(0), p, 0);
        image.push(scaled.sub_rational(&t));
        factors.push(c);
        shifts.push(w + t);
    }
    MapImage {
        index: j,
        identity: false,
        factors,
        shifts,
        image: VectorElement::from_vec_unchecked(image),
    }
}

fn shifted(v: &VectorElement) -> VectorElement {
    let mut comps = v.components().to_vec();
    comps.rotate_left(1);
    VectorElement::from_vec_unchecked(comps)
}

fn no_shift(s: usize) -> Vec<BigRational> {
    vec![BigRational::zero(); s]
}

/// `Φ0^{[ε]}`: `S·G_1`.
pub fn step_phi0(
    ctx: &EmbeddingContext,
    alpha: &VectorElement,
    epsilon: Epsilon,
) -> (CMapStep, VectorElement) {
    let s = alpha.len();
    let m = g_map(ctx, alpha, epsilon, 1);
    let next = shifted(&m.image);
    (m.into_step(shift_matrix(s), no_shift(s)), next)
}

/// `Φ1^{[ε,z]}`: `S·H_1`.
pub fn step_phi1(
    ctx: &EmbeddingContext,
    alpha: &VectorElement,
    epsilon: Epsilon,
) -> (CMapStep, VectorElement) {
    let s = alpha.len();
    let m = h_map(ctx, alpha, epsilon, 1);
    let next = shifted(&m.image);
    (m.into_step(shift_matrix(s), no_shift(s)), next)
}

/// `Φ2^{[ε,z],(n)}`: `H` at the lookahead index, no matrix.
pub fn step_phi2(
    ctx: &EmbeddingContext,
    alpha: &VectorElement,
    lookahead: &mut Lookahead,
) -> (CMapStep, VectorElement) {
    let s = alpha.len();
    let j = lookahead.index(ctx, alpha);
    let m = lookahead.children(ctx, alpha)[j - 1].map.clone();
    let next = m.image.clone();
    (m.into_step(RationalMatrix::identity(s), no_shift(s)), next)
}

/// `Φ3^{[z]}`: `β = H_s^{[ᾱ,1,z]}(ᾱ)` (or `G_s` for the G variant),
/// `A = pr(M'_β)`, `γ = -⟨(A·M_β)_{·,s+1}⟩_p`, next `= A·β + γ`.
pub fn step_phi3(
    ctx: &EmbeddingContext,
    alpha: &VectorElement,
    variant: Phi3Variant,
) -> (CMapStep, VectorElement) {
    let s = alpha.len();
    let m = match variant {
        Phi3Variant::H => h_map(ctx, alpha, Epsilon::Plus, s),
        Phi3Variant::G => g_map(ctx, alpha, Epsilon::Plus, s),
    };
    let p = ctx.p();
    let full = m.image.coeff_matrix();
    let (_, a) = p_reduce(&full.leading_columns(s), p).expect("square by construction");
    let l = a.mul(&full);
    let gamma: Vec<BigRational> = (0..s).map(|r| -tail(&l[(r, s)], p, 0)).collect();
    let field = alpha.field().clone();
    let comps = (0..s)
        .map(|r| {
            let mut c: Vec<BigRational> = l.row(r).to_vec();
            c.reverse();
            c[0] += &gamma[r];
            c.truncate(field.degree());
            FieldElement::new(&field, &c).expect("degree-bounded coefficients")
        })
        .collect();
    let next = VectorElement::from_vec_unchecked(comps);
    (m.into_step(a, gamma), next)
}

#[derive(Debug, Clone)]
pub(crate) struct Child {
    pub denom: BigInt,
    pub map: MapImage,
}

/// Memoised evaluation of the lookahead values `v^{(n)}` used by `Φ2`.
#[derive(Debug)]
pub struct Lookahead {
    epsilon: Epsilon,
    depth: u32,
    children: HashMap<VectorElement, Arc<Vec<Child>>>,
    values: HashMap<(VectorElement, u32), BigInt>,
}

const LOOKAHEAD_CACHE_LIMIT: usize = 1 << 16;

impl Lookahead {
    pub fn new(epsilon: Epsilon, depth: u32) -> Self {
        assert!(depth >= 1, "lookahead depth must be at least 1");
        Lookahead {
            epsilon,
            depth,
            children: HashMap::new(),
            values: HashMap::new(),
        }
    }

    pub(crate) fn children(
        &mut self,
        ctx: &EmbeddingContext,
        beta: &VectorElement,
    ) -> Arc<Vec<Child>> {
        if let Some(c) = self.children.get(beta) {
            return c.clone();
        }
        if self.children.len() > LOOKAHEAD_CACHE_LIMIT {
            self.children.clear();
            self.values.clear();
        }
        let kids: Vec<Child> = (1..=beta.len())
            .map(|i| {
                let map = h_map(ctx, beta, self.epsilon, i);
                Child {
                    denom: map.image.denom_z(),
                    map,
                }
            })
            .collect();
        let kids = Arc::new(kids);
        self.children.insert(beta.clone(), kids.clone());
        kids
    }

    /// `v^{(n)}(β)`.
    pub fn value(&mut self, ctx: &EmbeddingContext, beta: &VectorElement, n: u32) -> BigInt {
        let key = (beta.clone(), n);
        if let Some(v) = self.values.get(&key) {
            return v.clone();
        }
        let kids = self.children(ctx, beta);
        let v = kids
            .iter()
            .map(|c| {
                if n == 1 {
                    c.denom.clone()
                } else {
                    &c.denom * self.value(ctx, &c.map.image, n - 1)
                }
            })
            .min()
            .expect("nonempty vector");
        self.values.insert(key, v.clone());
        v
    }

    /// `φ^{(n)}(ᾱ)`, 1-based: least `i` minimising `denom_z(H_i(ᾱ))·v^{(n)}(H_i(ᾱ))`.
    pub fn index(&mut self, ctx: &EmbeddingContext, alpha: &VectorElement) -> usize {
        let kids = self.children(ctx, alpha);
        let n = self.depth;
        let scores: Vec<BigInt> = kids
            .iter()
            .map(|c| &c.denom * self.value(ctx, &c.map.image, n))
            .collect();
        let best = scores.iter().min().expect("nonempty vector");
        scores
            .iter()
            .position(|x| x == best)
            .expect("minimum is attained")
            + 1
    }
}

/// `φ^{(n)}(ᾱ)` with a fresh cache.
pub fn lookahead_index(
    ctx: &EmbeddingContext,
    alpha: &VectorElement,
    epsilon: Epsilon,
    n: u32,
) -> usize {
    Lookahead::new(epsilon, n).index(ctx, alpha)
}

/// Runs one algorithm step by step, keeping any per-expansion caches.
#[derive(Debug)]
pub struct Stepper<'a> {
    ctx: &'a EmbeddingContext,
    algorithm: Algorithm,
    lookahead: Option<Lookahead>,
}

impl<'a> Stepper<'a> {
    pub fn new(ctx: &'a EmbeddingContext, algorithm: Algorithm) -> Self {
        let lookahead = match algorithm {
            Algorithm::Phi2 { epsilon, lookahead } => {
                Some(Lookahead::new(epsilon, lookahead.max(1)))
            }
            _ => None,
        };
        Stepper {
            ctx,
            algorithm,
            lookahead,
        }
    }

    pub fn context(&self) -> &EmbeddingContext {
        self.ctx
    }

    pub fn algorithm(&self) -> Algorithm {
        self.algorithm
    }

    pub fn step(&mut self, alpha: &VectorElement) -> (CMapStep, VectorElement) {
        match self.algorithm {
            Algorithm::Phi0 { epsilon } => step_phi0(self.ctx, alpha, epsilon),
            Algorithm::Phi1 { epsilon } => step_phi1(self.ctx, alpha, epsilon),
            Algorithm::Phi2 { .. } => {
                let la = self.lookahead.as_mut().expect("created with the stepper");
                step_phi2(self.ctx, alpha, la)
            }
            Algorithm::Phi3 { variant } => step_phi3(self.ctx, alpha, variant),
        }
    }
}

/// One step of `algorithm` from `alpha`.
pub fn step(
    ctx: &EmbeddingContext,
    algorithm: Algorithm,
    alpha: &VectorElement,
) -> (CMapStep, VectorElement) {
    Stepper::new(ctx, algorithm).step(alpha)
}
