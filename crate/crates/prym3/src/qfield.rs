//! Exact arithmetic in the real quadratic field Q(√D) and in the orders
//! O_D = Z[λ] and O_{D/4} = Z[ρ/2].
//!
//! Every geometric quantity in this crate is a [`QuadNum`]: a pair of
//! arbitrary-precision rationals (p, q) representing p + q√D. No floating
//! point enters any predicate; signs are decided by comparing p² against
//! q²D. A perfect-square D is kept symbolic in storage and only collapsed
//! inside equality and sign tests, so square-tiled (arithmetic) surfaces run
//! through the same code paths as the non-arithmetic ones.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Arbitrary-precision rational, the coefficient type of [`QuadNum`].
pub type Rat = BigRational;

/// Shorthand for an integer rational.
pub fn rat(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Shorthand for the rational n/d.
pub fn ratio(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum QFieldError {
    #[error("mixed radicands: Q(√{0}) vs Q(√{1})")]
    MixedRadicand(u64, u64),
    #[error("division by zero in Q(√{0})")]
    DivisionByZero(u64),
    #[error("generator does not span an order of discriminant {expected}: {detail}")]
    NotAnOrder { expected: u64, detail: String },
    #[error("no even d with d² ≡ {0} (mod 16); not a quadratic residue")]
    NotResidue(u64),
    #[error("value outside Z-span of the order basis")]
    OutsideOrder,
}

/// Sign of an exact quantity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

/// Integer square root (floor).
pub fn isqrt(n: u64) -> u64 {
    if n == 0 {
        return 0;
    }
    let mut x = (n as f64).sqrt() as u64;
    while x.saturating_mul(x) > n {
        x -= 1;
    }
    while (x + 1).saturating_mul(x + 1) <= n {
        x += 1;
    }
    x
}

/// An element p + q√D of Q(√D), exact.
///
/// Values interoperate only when their radicands agree; the arithmetic
/// operators panic on a mismatch (it is a programming error inside this
/// crate), while the `try_*` variants report it as [`QFieldError`].
#[derive(Clone)]
pub struct QuadNum {
    d: u64,
    p: Rat,
    q: Rat,
}

impl QuadNum {
    pub fn new(d: u64, p: Rat, q: Rat) -> Self {
        assert!(d > 0, "radicand must be positive");
        QuadNum { d, p, q }
    }

    pub fn zero(d: u64) -> Self {
        Self::new(d, Rat::zero(), Rat::zero())
    }

    pub fn one(d: u64) -> Self {
        Self::new(d, Rat::one(), Rat::zero())
    }

    pub fn from_int(d: u64, n: i64) -> Self {
        Self::new(d, rat(n), Rat::zero())
    }

    pub fn from_rat(d: u64, p: Rat) -> Self {
        Self::new(d, p, Rat::zero())
    }

    /// The element √D itself.
    pub fn sqrt_d(d: u64) -> Self {
        Self::new(d, Rat::zero(), Rat::one())
    }

    pub fn d_param(&self) -> u64 {
        self.d
    }

    /// Rational part in the {1, √D} basis.
    pub fn p(&self) -> &Rat {
        &self.p
    }

    /// √D coefficient in the {1, √D} basis.
    pub fn q(&self) -> &Rat {
        &self.q
    }

    /// Exact square root of D when D is a perfect square.
    fn square_root_of_d(&self) -> Option<u64> {
        let r = isqrt(self.d);
        (r * r == self.d).then_some(r)
    }

    /// Canonical (p, q) used for equality and hashing: for a perfect-square
    /// radicand the √D part is folded into the rational part.
    fn canonical_parts(&self) -> (Rat, Rat) {
        match self.square_root_of_d() {
            Some(r) => (&self.p + &self.q * rat(r as i64), Rat::zero()),
            None => (self.p.clone(), self.q.clone()),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.sign() == Sign::Zero
    }

    /// Exact sign, decided by case analysis on (sign p, sign q) and a
    /// comparison of p² with q²D. No floating point.
    pub fn sign(&self) -> Sign {
        let (p, q) = (&self.p, &self.q);
        let sp = rat_sign(p);
        let sq = rat_sign(q);
        match (sp, sq) {
            (Sign::Zero, Sign::Zero) => Sign::Zero,
            (s, Sign::Zero) => s,
            (Sign::Zero, s) => s, // √D > 0
            (Sign::Positive, Sign::Positive) => Sign::Positive,
            (Sign::Negative, Sign::Negative) => Sign::Negative,
            _ => {
                // Opposite signs: |p| vs |q|√D, i.e. p² vs q²D.
                let lhs = p * p;
                let rhs = q * q * rat(self.d as i64);
                match lhs.cmp(&rhs) {
                    Ordering::Greater => sp,
                    Ordering::Less => sq,
                    // p² = q²D with p, q ≠ 0 forces D to be a perfect square
                    // and the value to vanish.
                    Ordering::Equal => Sign::Zero,
                }
            }
        }
    }

    pub fn is_positive(&self) -> bool {
        self.sign() == Sign::Positive
    }

    pub fn is_negative(&self) -> bool {
        self.sign() == Sign::Negative
    }

    /// Galois conjugate p − q√D.
    pub fn conj(&self) -> Self {
        Self::new(self.d, self.p.clone(), -self.q.clone())
    }

    /// Field norm p² − q²D, a rational.
    pub fn norm(&self) -> Rat {
        &self.p * &self.p - &self.q * &self.q * rat(self.d as i64)
    }

    /// Field trace 2p, a rational.
    pub fn trace(&self) -> Rat {
        &self.p + &self.p
    }

    fn check_same(&self, other: &Self) -> Result<(), QFieldError> {
        if self.d != other.d {
            return Err(QFieldError::MixedRadicand(self.d, other.d));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, QFieldError> {
        self.check_same(other)?;
        Ok(Self::new(self.d, &self.p + &other.p, &self.q + &other.q))
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self, QFieldError> {
        self.check_same(other)?;
        Ok(Self::new(self.d, &self.p - &other.p, &self.q - &other.q))
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self, QFieldError> {
        self.check_same(other)?;
        let d = rat(self.d as i64);
        Ok(Self::new(
            self.d,
            &self.p * &other.p + &self.q * &other.q * d,
            &self.p * &other.q + &self.q * &other.p,
        ))
    }

    /// Multiplicative inverse by conjugate rationalization.
    pub fn try_inv(&self) -> Result<Self, QFieldError> {
        if self.is_zero() {
            return Err(QFieldError::DivisionByZero(self.d));
        }
        let n = self.norm();
        if n.is_zero() {
            // Perfect-square D can have zero norm with nonzero value only
            // when the value itself is zero, excluded above; but the
            // conjugate trick can still divide by zero there, so fall back
            // to the collapsed rational.
            let (p, _) = self.canonical_parts();
            return Ok(Self::new(self.d, p.recip(), Rat::zero()));
        }
        Ok(Self::new(self.d, &self.p / &n, -&self.q / &n))
    }

    pub fn try_div(&self, other: &Self) -> Result<Self, QFieldError> {
        self.check_same(other)?;
        self.try_mul(&other.try_inv()?)
    }

    pub fn scale(&self, r: &Rat) -> Self {
        Self::new(self.d, &self.p * r, &self.q * r)
    }

    pub fn add_rat(&self, r: &Rat) -> Self {
        Self::new(self.d, &self.p + r, self.q.clone())
    }

    /// True when the value lies in Q (the √D part vanishes after collapsing
    /// a perfect-square radicand).
    pub fn is_rational(&self) -> bool {
        self.canonical_parts().1.is_zero()
    }

    /// The value as a rational, when it is one.
    pub fn to_rat(&self) -> Option<Rat> {
        let (p, q) = self.canonical_parts();
        q.is_zero().then_some(p)
    }

    /// Floating-point approximation. Display/diagnostics only; never used in
    /// a predicate.
    pub fn approx(&self) -> f64 {
        let p = self.p.to_f64().unwrap_or(f64::NAN);
        let q = self.q.to_f64().unwrap_or(f64::NAN);
        p + q * (self.d as f64).sqrt()
    }

    /// Rational interval [lo, hi] containing the value, with |hi − lo| ≤ 1/10^digits.
    /// Used by tests as an independent check on `sign`.
    pub fn interval(&self, digits: u32) -> (Rat, Rat) {
        let scale = BigInt::from(10u32).pow(digits);
        // floor(√(D·scale²)) ≤ √D·scale < floor + 1
        let big = BigInt::from(self.d) * &scale * &scale;
        let root = big.sqrt();
        let lo_s = Rat::new(root.clone(), scale.clone());
        let hi_s = Rat::new(root + BigInt::one(), scale);
        let (a, b) = if self.q.is_negative() {
            (&self.q * &hi_s, &self.q * &lo_s)
        } else {
            (&self.q * &lo_s, &self.q * &hi_s)
        };
        (&self.p + a, &self.p + b)
    }
}

fn rat_sign(r: &Rat) -> Sign {
    if r.is_zero() {
        Sign::Zero
    } else if r.is_positive() {
        Sign::Positive
    } else {
        Sign::Negative
    }
}

impl PartialEq for QuadNum {
    fn eq(&self, other: &Self) -> bool {
        self.d == other.d && self.canonical_parts() == other.canonical_parts()
    }
}

impl Eq for QuadNum {}

impl Hash for QuadNum {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.d.hash(state);
        let (p, q) = self.canonical_parts();
        p.hash(state);
        q.hash(state);
    }
}

impl PartialOrd for QuadNum {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for QuadNum {
    fn cmp(&self, other: &Self) -> Ordering {
        assert_eq!(self.d, other.d, "cannot order values from different fields");
        match (self.clone() - other.clone()).sign() {
            Sign::Negative => Ordering::Less,
            Sign::Zero => Ordering::Equal,
            Sign::Positive => Ordering::Greater,
        }
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $try:ident) => {
        impl $trait for QuadNum {
            type Output = QuadNum;
            fn $method(self, rhs: QuadNum) -> QuadNum {
                self.$try(&rhs).expect("mixed-radicand arithmetic")
            }
        }
        impl $trait for &QuadNum {
            type Output = QuadNum;
            fn $method(self, rhs: &QuadNum) -> QuadNum {
                self.$try(rhs).expect("mixed-radicand arithmetic")
            }
        }
        impl $trait<&QuadNum> for QuadNum {
            type Output = QuadNum;
            fn $method(self, rhs: &QuadNum) -> QuadNum {
                self.$try(rhs).expect("mixed-radicand arithmetic")
            }
        }
    };
}

forward_binop!(Add, add, try_add);
forward_binop!(Sub, sub, try_sub);
forward_binop!(Mul, mul, try_mul);
forward_binop!(Div, div, try_div);

impl Neg for QuadNum {
    type Output = QuadNum;
    fn neg(self) -> QuadNum {
        QuadNum::new(self.d, -self.p, -self.q)
    }
}

impl Neg for &QuadNum {
    type Output = QuadNum;
    fn neg(self) -> QuadNum {
        QuadNum::new(self.d, -self.p.clone(), -self.q.clone())
    }
}

impl fmt::Debug for QuadNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for QuadNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.q.is_zero() {
            write!(f, "{}", self.p)
        } else if self.p.is_zero() {
            write!(f, "{}√{}", self.q, self.d)
        } else {
            write!(f, "{} + {}√{}", self.p, self.q, self.d)
        }
    }
}

/// The fundamental parameter λ = (e + √D)/2 of a prototype.
pub fn lambda(d_param: u64, e: i64) -> QuadNum {
    QuadNum::new(d_param, ratio(e, 2), ratio(1, 2))
}

/// Canonical even d ≥ 0 with d² ≡ D (mod 16), when one exists.
pub fn canonical_residue_root(d_param: u64) -> Result<i64, QFieldError> {
    for d in [0i64, 2, 4, 6] {
        if (d * d) as u64 % 16 == d_param % 16 {
            return Ok(d);
        }
    }
    Err(QFieldError::NotResidue(d_param))
}

/// ρ = (√D − d)/2 for the canonical d.
pub fn rho(d_param: u64) -> Result<QuadNum, QFieldError> {
    let d = canonical_residue_root(d_param)?;
    Ok(QuadNum::new(d_param, ratio(-d, 2), ratio(1, 2)))
}

/// A Z-basis {1, g} (or {1, g/2} when `half` is set) of a quadratic order.
///
/// Construction verifies that the spanned ring is an order of the stated
/// discriminant: the minimal polynomial of the basis generator must be monic
/// with integer coefficients and discriminant D (or D/4 for a half basis).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrderBasis {
    d_param: u64,
    generator: QuadNum,
    half: bool,
}

impl OrderBasis {
    pub fn new(d_param: u64, generator: QuadNum, half: bool) -> Result<Self, QFieldError> {
        if generator.d_param() != d_param {
            return Err(QFieldError::MixedRadicand(generator.d_param(), d_param));
        }
        let g = if half {
            generator.scale(&ratio(1, 2))
        } else {
            generator.clone()
        };
        // g satisfies x² − tr·x + nm = 0.
        let tr = g.trace();
        let nm = g.norm();
        if !tr.is_integer() || !nm.is_integer() {
            return Err(QFieldError::NotAnOrder {
                expected: d_param,
                detail: format!("minimal polynomial x² − ({tr})x + ({nm}) is not integral"),
            });
        }
        let disc = &tr * &tr - rat(4) * &nm;
        let expected = if half {
            ratio(d_param as i64, 4)
        } else {
            rat(d_param as i64)
        };
        if disc != expected {
            return Err(QFieldError::NotAnOrder {
                expected: d_param,
                detail: format!("discriminant {disc}, expected {expected}"),
            });
        }
        Ok(OrderBasis {
            d_param,
            generator,
            half,
        })
    }

    /// O_D = Z[ρ] with the canonical ρ.
    pub fn o_d(d_param: u64) -> Result<Self, QFieldError> {
        Self::new(d_param, rho(d_param)?, false)
    }

    /// O_{D/4} = Z[ρ/2] with the canonical ρ.
    pub fn o_d_over_4(d_param: u64) -> Result<Self, QFieldError> {
        Self::new(d_param, rho(d_param)?, true)
    }

    pub fn d_param(&self) -> u64 {
        self.d_param
    }

    pub fn half(&self) -> bool {
        self.half
    }

    /// The actual basis element: g or g/2.
    pub fn element(&self) -> QuadNum {
        if self.half {
            self.generator.scale(&ratio(1, 2))
        } else {
            self.generator.clone()
        }
    }

    /// Express x = p + q·g in this basis, exactly. Also returns
    /// fr(x) = p mod 1 ∈ [0, 1), the fractional part of the rational part.
    pub fn rational_part_fr(&self, x: &QuadNum) -> Result<RationalPart, QFieldError> {
        if x.d_param() != self.d_param {
            return Err(QFieldError::MixedRadicand(x.d_param(), self.d_param));
        }
        let g = self.element();
        // x_p + x_q√D = p + q(g_p + g_q√D); g_q ≠ 0 for any order generator.
        let q = x.q() / g.q();
        let p = x.p() - &q * g.p();
        let fr = fract(&p);
        Ok(RationalPart { p, q, fr })
    }

    /// True when x lies in the Z-span of {1, g}.
    pub fn contains(&self, x: &QuadNum) -> bool {
        match self.rational_part_fr(x) {
            Ok(rp) => rp.p.is_integer() && rp.q.is_integer(),
            Err(_) => false,
        }
    }
}

/// Result of a basis decomposition x = p + q·g.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalPart {
    pub p: Rat,
    pub q: Rat,
    /// p mod 1, in [0, 1).
    pub fr: Rat,
}

/// Fractional part in [0, 1).
pub fn fract(r: &Rat) -> Rat {
    let f = r - r.floor();
    debug_assert!(!f.is_negative() && f < Rat::one());
    f
}

#[cfg(test)]
mod tests {
    use super::*;

    /// xorshift64 for deterministic property sampling.
    pub(crate) struct XorShift(u64);

    impl XorShift {
        pub fn new(seed: u64) -> Self {
            XorShift(seed.max(1))
        }
        pub fn next(&mut self) -> u64 {
            let mut x = self.0;
            x ^= x << 13;
            x ^= x >> 7;
            x ^= x << 17;
            self.0 = x;
            x
        }
        pub fn small(&mut self, bound: i64) -> i64 {
            (self.next() % (2 * bound as u64 + 1)) as i64 - bound
        }
    }

    fn sample(rng: &mut XorShift, d: u64) -> QuadNum {
        let den1 = 1 + (rng.next() % 12) as i64;
        let den2 = 1 + (rng.next() % 12) as i64;
        QuadNum::new(d, ratio(rng.small(40), den1), ratio(rng.small(40), den2))
    }

    #[test]
    fn lambda_norm_for_d17() {
        // λ·conj(λ) = (e² − D)/4 = (9 − 17)/4 = −2 for D = 17, e = −3.
        let l = lambda(17, -3);
        let n = l.try_mul(&l.conj()).unwrap();
        assert_eq!(n.to_rat().unwrap(), rat(-2));
    }

    #[test]
    fn sub_self_is_zero() {
        let l = lambda(73, -3);
        assert!(l.try_sub(&l).unwrap().is_zero());
    }

    #[test]
    fn division_rationalizes() {
        // (1 − λ)/λ for D = 17, e = −3: rationalize by hand.
        // 1 − λ = (5 − √17)/2, λ = (−3 + √17)/2, λ·conj(λ) = −2.
        // (1−λ)/λ = (1−λ)·conj(λ)/(−2) = ((5−√17)(−3−√17)/4)/(−2)
        //         = (−15 − 5√17 + 3√17 + 17)/4 / (−2) = (2 − 2√17)/4 / (−2)
        //         = (1 − √17)/2 / (−2) = (√17 − 1)/4.
        let d = 17;
        let l = lambda(d, -3);
        let one = QuadNum::one(d);
        let got = (one - l.clone()).try_div(&l).unwrap();
        let expected = QuadNum::new(d, ratio(-1, 4), ratio(1, 4));
        assert_eq!(got, expected);
    }

    #[test]
    fn sign_cases() {
        let l = lambda(17, -3);
        assert_eq!(l.sign(), Sign::Positive);
        assert_eq!(QuadNum::zero(17).sign(), Sign::Zero);
        assert_eq!(l.conj().sign(), Sign::Negative);
    }

    #[test]
    fn perfect_square_collapses_in_eq_and_sign() {
        // D = 25: √25 = 5 only inside equality/sign tests.
        let x = QuadNum::new(25, rat(-5), Rat::one()); // −5 + √25 = 0
        assert!(x.is_zero());
        assert!(x.is_rational());
        let y = QuadNum::new(25, rat(2), ratio(1, 5)); // 2 + 1 = 3
        assert_eq!(y.to_rat().unwrap(), rat(3));
        assert_eq!(y, QuadNum::from_int(25, 3));
        // Storage stays symbolic.
        assert!(!y.q().is_zero());
    }

    #[test]
    fn field_axioms_on_samples() {
        let mut rng = XorShift::new(0x5eed);
        for d in [8u64, 17, 20, 73, 100] {
            for _ in 0..200 {
                let x = sample(&mut rng, d);
                let y = sample(&mut rng, d);
                let z = sample(&mut rng, d);
                let lhs = (x.clone() + y.clone()) * z.clone();
                let rhs = x.clone() * z.clone() + y.clone() * z.clone();
                assert_eq!(lhs, rhs);
                // Norm is rational and multiplicative on the samples.
                let n = x.try_mul(&x.conj()).unwrap();
                assert!(n.is_rational());
                assert_eq!(n.to_rat().unwrap(), x.norm());
                // Trace check: x + conj(x) = 2p.
                let t = x.try_add(&x.conj()).unwrap();
                assert_eq!(t.to_rat().unwrap(), x.trace());
                if !x.is_zero() {
                    let i = x.try_inv().unwrap();
                    assert_eq!(x.clone() * i, QuadNum::one(d));
                }
            }
        }
    }

    #[test]
    fn sign_agrees_with_interval_evaluation() {
        let mut rng = XorShift::new(0xabcdef);
        let mut checked = 0usize;
        while checked < 10_000 {
            let d = [5u64, 8, 12, 17, 20, 24, 33, 41, 68, 100, 116, 292][(rng.next() % 12) as usize];
            let x = sample(&mut rng, d);
            let mut digits = 30;
            loop {
                let (lo, hi) = x.interval(digits);
                if lo.is_positive() {
                    assert_eq!(x.sign(), Sign::Positive);
                    break;
                }
                if hi.is_negative() {
                    assert_eq!(x.sign(), Sign::Negative);
                    break;
                }
                if x.sign() == Sign::Zero {
                    // Interval straddles zero and the exact test says zero.
                    assert!(!lo.is_positive() && !hi.is_negative());
                    break;
                }
                digits *= 2;
                assert!(digits <= 480, "interval refinement runaway");
            }
            checked += 1;
        }
    }

    #[test]
    fn basis_reconstruction_roundtrip() {
        let mut rng = XorShift::new(0x0f1e2d);
        for d in [20u64, 32, 68, 116] {
            let b = OrderBasis::o_d(d).unwrap();
            let bh = OrderBasis::o_d_over_4(d).unwrap();
            for _ in 0..100 {
                let x = sample(&mut rng, d);
                for basis in [&b, &bh] {
                    let rp = basis.rational_part_fr(&x).unwrap();
                    let back = basis.element().scale(&rp.q).add_rat(&rp.p);
                    assert_eq!(back, x);
                }
            }
        }
    }

    #[test]
    fn fr_examples() {
        // x = ρ in basis {1, ρ}: (p, q, fr) = (0, 1, 0).
        let d = 20;
        let b = OrderBasis::o_d(d).unwrap();
        let r = rho(d).unwrap();
        let rp = b.rational_part_fr(&r).unwrap();
        assert_eq!((rp.p, rp.q, rp.fr), (rat(0), rat(1), rat(0)));

        // D = 20: canonical d = 2, ρ = (√20 − 2)/2 = √5 − 1; x = ½ + ρ/2.
        let x = r.scale(&ratio(1, 2)).add_rat(&ratio(1, 2));
        let rp = b.rational_part_fr(&x).unwrap();
        assert_eq!(rp.p, ratio(1, 2));
        assert_eq!(rp.fr, ratio(1, 2));
    }

    #[test]
    fn fr_of_half_lambda_vanishes_for_even_residues() {
        // For D ≡ 0, 4 (mod 16) and e ∈ S_D: λ/2 in basis {1, ρ/2} has
        // integral rational part (e + d ≡ 0 mod 4), so fr = 0.
        for (d_param, e) in [(20u64, -2i64), (32, 0), (68, -6), (68, -2), (100, -2), (116, -6)] {
            let bh = OrderBasis::o_d_over_4(d_param).unwrap();
            let half_l = lambda(d_param, e).scale(&ratio(1, 2));
            let rp = bh.rational_part_fr(&half_l).unwrap();
            assert!(rp.p.is_integer(), "D={d_param} e={e}: p={}", rp.p);
            assert_eq!(rp.fr, rat(0));
            assert!(bh.contains(&half_l));
        }
    }

    #[test]
    fn rho_half_basis_is_an_order() {
        for d in [20u64, 32, 36, 64, 68, 100, 116, 260] {
            assert!(OrderBasis::o_d(d).is_ok(), "O_{d}");
            assert!(OrderBasis::o_d_over_4(d).is_ok(), "O_{d}/4");
        }
        assert!(rho(17).is_err());
        assert!(rho(24).is_err());
    }

    #[test]
    fn mixed_radicand_rejected() {
        let a = QuadNum::one(17);
        let b = QuadNum::one(20);
        assert!(matches!(
            a.try_add(&b),
            Err(QFieldError::MixedRadicand(17, 20))
        ));
        assert!(matches!(
            QuadNum::one(17).try_div(&QuadNum::zero(17)),
            Err(QFieldError::DivisionByZero(17))
        ));
    }
}
