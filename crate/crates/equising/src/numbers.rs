//! Exact arithmetic in multiquadratic fields `Q(sqrt(d_1),...,sqrt(d_k))`.
//!
//! A [`SurdNumber`] is a finite sum of terms `q_d * sqrt(d)` with rational
//! coefficients `q_d` and pairwise distinct squarefree radicands `d >= 1`;
//! radicand 1 carries the rational part. Square roots of distinct squarefree
//! integers are linearly independent over the rationals, so the canonical
//! form is unique and the zero test is purely syntactic: a value is zero
//! exactly when its term set is empty.
//!
//! Nonzero sign decisions refine an enclosing [`RationalInterval`] with
//! doubling precision until zero is excluded. The precision cap exists only
//! to bound resource use; it is unreachable for canonical nonzero values at
//! sane scales.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Default hard cap for interval sign refinement.
pub const DEFAULT_MAX_BITS: u32 = 4096;
/// Default cap on the prime support of a reciprocal's field.
pub const DEFAULT_MAX_PRIMES: usize = 4;

const INITIAL_BITS: u32 = 64;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum NumberError {
    #[error("division by zero")]
    ZeroDivision,
    #[error("prime support {primes} exceeds the reciprocal cap {cap}")]
    FieldTooLarge { primes: usize, cap: usize },
    #[error("interval refinement exceeded {max_bits} bits")]
    PrecisionCap { max_bits: u32 },
    #[error("parse error at byte {position}: {message}")]
    Parse { position: usize, message: String },
}

/// Exact element of a multiquadratic field, kept in canonical form:
/// radicands squarefree and distinct, no zero coefficients.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct SurdNumber {
    terms: BTreeMap<u64, BigRational>,
}

/// Closed interval with exact rational endpoints.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalInterval {
    lo: BigRational,
    hi: BigRational,
}

impl RationalInterval {
    pub fn new(lo: BigRational, hi: BigRational) -> Self {
        assert!(lo <= hi, "interval endpoints out of order");
        RationalInterval { lo, hi }
    }

    pub fn point(q: BigRational) -> Self {
        RationalInterval {
            lo: q.clone(),
            hi: q,
        }
    }

    pub fn lo(&self) -> &BigRational {
        &self.lo
    }

    pub fn hi(&self) -> &BigRational {
        &self.hi
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn midpoint(&self) -> BigRational {
        (&self.lo + &self.hi) / BigRational::from_integer(BigInt::from(2))
    }

    pub fn contains_zero(&self) -> bool {
        !self.lo.is_positive() && !self.hi.is_negative()
    }

    /// Sign of every point in the interval, when uniform.
    pub fn sign(&self) -> Option<i32> {
        if self.lo.is_positive() {
            Some(1)
        } else if self.hi.is_negative() {
            Some(-1)
        } else if self.lo.is_zero() && self.hi.is_zero() {
            Some(0)
        } else {
            None
        }
    }

    fn add(&self, other: &Self) -> Self {
        RationalInterval {
            lo: &self.lo + &other.lo,
            hi: &self.hi + &other.hi,
        }
    }

    /// Scale by an exact rational, flipping endpoints on negative factors.
    fn scaled(&self, q: &BigRational) -> Self {
        if q.is_negative() {
            RationalInterval {
                lo: &self.hi * q,
                hi: &self.lo * q,
            }
        } else {
            RationalInterval {
                lo: &self.lo * q,
                hi: &self.hi * q,
            }
        }
    }
}

/// Squarefree decomposition `d = sf * root^2` by trial division.
fn normalize_radicand(d: u64) -> (u64, u64) {
    assert!(d >= 1, "radicand must be at least 1");
    let mut rest = d;
    let mut sf = 1u64;
    let mut root = 1u64;
    let mut p = 2u64;
    // p <= rest/p avoids the u64 overflow of p*p near the top of the range
    while p <= rest / p {
        if rest.is_multiple_of(p) {
            let mut e = 0u32;
            while rest.is_multiple_of(p) {
                rest /= p;
                e += 1;
            }
            if e % 2 == 1 {
                sf *= p;
            }
            root *= p.pow(e / 2);
        }
        p += if p == 2 { 1 } else { 2 };
    }
    (sf * rest, root)
}

/// Prime factors of a squarefree integer.
fn prime_factors(d: u64) -> Vec<u64> {
    let mut rest = d;
    let mut out = Vec::new();
    let mut p = 2u64;
    while p <= rest / p {
        if rest.is_multiple_of(p) {
            out.push(p);
            rest /= p;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if rest > 1 {
        out.push(rest);
    }
    out
}

/// Enclosure of `sqrt(d)` with dyadic endpoints of the given precision.
fn sqrt_interval(d: u64, bits: u32) -> RationalInterval {
    let scaled = BigUint::from(d) << (2 * bits as usize);
    let root = scaled.sqrt();
    let denom = BigInt::one() << bits as usize;
    let lo = BigRational::new(BigInt::from(root.clone()), denom.clone());
    let hi = BigRational::new(BigInt::from(root + 1u32), denom);
    RationalInterval::new(lo, hi)
}

/// Convert an exact rational to the nearest `f64`, robust to large
/// numerators and denominators.
pub(crate) fn ratio_to_f64(q: &BigRational) -> f64 {
    if q.is_zero() {
        return 0.0;
    }
    let neg = q.is_negative();
    let a = q.numer().magnitude().clone();
    let b = q.denom().magnitude().clone();
    let sh: i64 = 64 + b.bits() as i64 - a.bits() as i64;
    let sh = sh.clamp(-4000, 4000);
    let scaled = if sh >= 0 {
        (a << sh as usize) / b
    } else {
        a / (b << (-sh) as usize)
    };
    let val = scaled.to_f64().unwrap_or(f64::INFINITY) * 2f64.powi(-sh as i32);
    if neg {
        -val
    } else {
        val
    }
}

impl SurdNumber {
    pub fn zero() -> Self {
        SurdNumber::default()
    }

    pub fn one() -> Self {
        SurdNumber::from_integer(1)
    }

    pub fn from_integer(k: i64) -> Self {
        SurdNumber::from_rational(BigRational::from_integer(BigInt::from(k)))
    }

    pub fn from_rational(q: BigRational) -> Self {
        let mut terms = BTreeMap::new();
        if !q.is_zero() {
            terms.insert(1, q);
        }
        SurdNumber { terms }
    }

    /// `p/q` as a surd.
    pub fn rational(p: i64, q: i64) -> Self {
        SurdNumber::from_rational(BigRational::new(BigInt::from(p), BigInt::from(q)))
    }

    /// `(p/q) * sqrt(d)`.
    pub fn surd(p: i64, q: i64, d: u64) -> Self {
        let coeff = BigRational::new(BigInt::from(p), BigInt::from(q));
        SurdNumber::from_terms([(d, coeff)])
    }

    /// `sqrt(d)`, with square factors extracted.
    pub fn sqrt_of(d: u64) -> Self {
        SurdNumber::from_terms([(d, BigRational::one())])
    }

    /// Build from raw `(radicand, coefficient)` pairs, normalizing to
    /// canonical form: square factors extracted, like radicands merged,
    /// zero coefficients dropped. Radicand 0 contributes nothing.
    pub fn from_terms<I: IntoIterator<Item = (u64, BigRational)>>(pairs: I) -> Self {
        let mut terms: BTreeMap<u64, BigRational> = BTreeMap::new();
        for (d, q) in pairs {
            if d == 0 || q.is_zero() {
                continue;
            }
            let (sf, root) = normalize_radicand(d);
            let coeff = q * BigRational::from_integer(BigInt::from(root));
            let entry = terms.entry(sf).or_insert_with(BigRational::zero);
            *entry += coeff;
        }
        terms.retain(|_, q| !q.is_zero());
        SurdNumber { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_rational(&self) -> bool {
        self.terms.keys().all(|&d| d == 1)
    }

    /// The rational part (coefficient of radicand 1).
    pub fn rational_part(&self) -> BigRational {
        self.terms
            .get(&1)
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    /// The exact rational value, when the number has no irrational part.
    pub fn as_rational(&self) -> Option<BigRational> {
        if self.is_rational() {
            Some(self.rational_part())
        } else {
            None
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (u64, &BigRational)> {
        self.terms.iter().map(|(&d, q)| (d, q))
    }

    /// Multiply by an exact rational scalar.
    pub fn scaled(&self, q: &BigRational) -> Self {
        if q.is_zero() {
            return SurdNumber::zero();
        }
        SurdNumber {
            terms: self.terms.iter().map(|(&d, c)| (d, c * q)).collect(),
        }
    }

    fn conjugate(&self, primes: &[u64], mask: u32) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|(&d, q)| {
                let mut parity = 0u32;
                for (i, &p) in primes.iter().enumerate() {
                    if mask & (1 << i) != 0 && d % p == 0 {
                        parity ^= 1;
                    }
                }
                (d, if parity == 1 { -q.clone() } else { q.clone() })
            })
            .collect();
        SurdNumber { terms }
    }

    pub fn reciprocal(&self) -> Result<Self, NumberError> {
        self.reciprocal_capped(DEFAULT_MAX_PRIMES)
    }

    /// Exact multiplicative inverse via the product of all nontrivial Galois
    /// conjugates (one sign flip per prime in the radicand support) divided
    /// by the rational norm.
    pub fn reciprocal_capped(&self, max_primes: usize) -> Result<Self, NumberError> {
        if self.is_zero() {
            return Err(NumberError::ZeroDivision);
        }
        if let Some(q) = self.as_rational() {
            return Ok(SurdNumber::from_rational(q.recip()));
        }
        if self.terms.len() == 1 {
            // 1 / (q*sqrt(d)) = sqrt(d) / (q*d)
            let (&d, q) = self.terms.iter().next().unwrap();
            let coeff = (q * BigRational::from_integer(BigInt::from(d))).recip();
            return Ok(SurdNumber::from_terms([(d, coeff)]));
        }
        let support: BTreeSet<u64> = self
            .terms
            .keys()
            .filter(|&&d| d > 1)
            .flat_map(|&d| prime_factors(d))
            .collect();
        if support.len() > max_primes {
            return Err(NumberError::FieldTooLarge {
                primes: support.len(),
                cap: max_primes,
            });
        }
        let primes: Vec<u64> = support.into_iter().collect();
        let mut numer = SurdNumber::one();
        for mask in 1..(1u32 << primes.len()) {
            numer = &numer * &self.conjugate(&primes, mask);
        }
        let norm = (&numer * self)
            .as_rational()
            .expect("conjugate product must be rational");
        assert!(!norm.is_zero(), "nonzero surd has nonzero norm");
        Ok(numer.scaled(&norm.recip()))
    }

    pub fn checked_div(&self, rhs: &Self) -> Result<Self, NumberError> {
        self.checked_div_capped(rhs, DEFAULT_MAX_PRIMES)
    }

    pub fn checked_div_capped(&self, rhs: &Self, max_primes: usize) -> Result<Self, NumberError> {
        Ok(self * &rhs.reciprocal_capped(max_primes)?)
    }

    /// Enclosure of the value with dyadic endpoints at the given precision.
    pub fn enclosure(&self, bits: u32) -> RationalInterval {
        let mut acc = RationalInterval::point(self.rational_part());
        for (&d, q) in &self.terms {
            if d == 1 {
                continue;
            }
            acc = acc.add(&sqrt_interval(d, bits).scaled(q));
        }
        acc
    }

    pub fn sign(&self) -> i32 {
        self.sign_capped(DEFAULT_MAX_BITS)
            .expect("sign refinement hit the default precision cap")
    }

    /// Exact sign. Zero is decided syntactically; nonzero values by interval
    /// refinement with doubling precision up to `max_bits`.
    pub fn sign_capped(&self, max_bits: u32) -> Result<i32, NumberError> {
        if self.is_zero() {
            return Ok(0);
        }
        if let Some(q) = self.as_rational() {
            return Ok(if q.is_positive() { 1 } else { -1 });
        }
        let mut bits = INITIAL_BITS.min(max_bits);
        loop {
            match self.enclosure(bits).sign() {
                Some(s) if s != 0 => return Ok(s),
                _ => {}
            }
            if bits >= max_bits {
                return Err(NumberError::PrecisionCap { max_bits });
            }
            bits = (bits * 2).min(max_bits);
        }
    }

    pub fn is_positive(&self) -> bool {
        self.sign() > 0
    }

    pub fn floor(&self) -> BigInt {
        self.floor_capped(DEFAULT_MAX_BITS)
            .expect("floor refinement hit the default precision cap")
    }

    /// Greatest integer below the value. Exact for rationals; for irrational
    /// values the refinement terminates because the value is never an
    /// integer.
    pub fn floor_capped(&self, max_bits: u32) -> Result<BigInt, NumberError> {
        if let Some(q) = self.as_rational() {
            return Ok(q.floor().to_integer());
        }
        let mut bits = INITIAL_BITS.min(max_bits);
        loop {
            let e = self.enclosure(bits);
            let lo = e.lo().floor().to_integer();
            let hi = e.hi().floor().to_integer();
            if lo == hi {
                return Ok(lo);
            }
            if bits >= max_bits {
                return Err(NumberError::PrecisionCap { max_bits });
            }
            bits = (bits * 2).min(max_bits);
        }
    }

    pub fn try_cmp(&self, other: &Self) -> Result<Ordering, NumberError> {
        self.try_cmp_capped(other, DEFAULT_MAX_BITS)
    }

    pub fn try_cmp_capped(&self, other: &Self, max_bits: u32) -> Result<Ordering, NumberError> {
        let diff = self - other;
        Ok(match diff.sign_capped(max_bits)? {
            0 => Ordering::Equal,
            s if s > 0 => Ordering::Greater,
            _ => Ordering::Less,
        })
    }

    /// Nearest `f64`, via a 128-bit enclosure midpoint.
    pub fn to_f64(&self) -> f64 {
        if let Some(q) = self.as_rational() {
            return ratio_to_f64(&q);
        }
        ratio_to_f64(&self.enclosure(128).midpoint())
    }
}

impl Neg for &SurdNumber {
    type Output = SurdNumber;
    fn neg(self) -> SurdNumber {
        SurdNumber {
            terms: self.terms.iter().map(|(&d, q)| (d, -q.clone())).collect(),
        }
    }
}

impl Neg for SurdNumber {
    type Output = SurdNumber;
    fn neg(self) -> SurdNumber {
        -&self
    }
}

impl Add for &SurdNumber {
    type Output = SurdNumber;
    fn add(self, rhs: &SurdNumber) -> SurdNumber {
        let mut terms = self.terms.clone();
        for (&d, q) in &rhs.terms {
            let entry = terms.entry(d).or_insert_with(BigRational::zero);
            *entry += q;
        }
        terms.retain(|_, q| !q.is_zero());
        SurdNumber { terms }
    }
}

impl Sub for &SurdNumber {
    type Output = SurdNumber;
    fn sub(self, rhs: &SurdNumber) -> SurdNumber {
        self + &(-rhs)
    }
}

impl Mul for &SurdNumber {
    type Output = SurdNumber;
    fn mul(self, rhs: &SurdNumber) -> SurdNumber {
        let mut terms: BTreeMap<u64, BigRational> = BTreeMap::new();
        for (&d1, q1) in &self.terms {
            for (&d2, q2) in &rhs.terms {
                // sqrt(d1)*sqrt(d2) = g*sqrt((d1/g)*(d2/g)) with g = gcd;
                // the product of coprime squarefree numbers is squarefree.
                let g = d1.gcd(&d2);
                let rad = (d1 / g)
                    .checked_mul(d2 / g)
                    .expect("radicand overflow in surd product");
                let coeff = q1 * q2 * BigRational::from_integer(BigInt::from(g));
                let entry = terms.entry(rad).or_insert_with(BigRational::zero);
                *entry += coeff;
            }
        }
        terms.retain(|_, q| !q.is_zero());
        SurdNumber { terms }
    }
}

macro_rules! forward_owned_binop {
    ($trait:ident, $method:ident) => {
        impl $trait for SurdNumber {
            type Output = SurdNumber;
            fn $method(self, rhs: SurdNumber) -> SurdNumber {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&SurdNumber> for SurdNumber {
            type Output = SurdNumber;
            fn $method(self, rhs: &SurdNumber) -> SurdNumber {
                (&self).$method(rhs)
            }
        }
        impl $trait<SurdNumber> for &SurdNumber {
            type Output = SurdNumber;
            fn $method(self, rhs: SurdNumber) -> SurdNumber {
                self.$method(&rhs)
            }
        }
    };
}

forward_owned_binop!(Add, add);
forward_owned_binop!(Sub, sub);
forward_owned_binop!(Mul, mul);

impl PartialOrd for SurdNumber {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(
            self.try_cmp(other)
                .expect("comparison hit the default precision cap"),
        )
    }
}

fn fmt_abs_term(f: &mut fmt::Formatter<'_>, d: u64, q: &BigRational) -> fmt::Result {
    debug_assert!(!q.is_negative());
    if d == 1 {
        write!(f, "{}", q)
    } else if q.is_one() {
        write!(f, "sqrt({})", d)
    } else {
        write!(f, "{}*sqrt({})", q, d)
    }
}

impl fmt::Display for SurdNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (&d, q)) in self.terms.iter().enumerate() {
            if i == 0 {
                if q.is_negative() {
                    write!(f, "-")?;
                }
            } else if q.is_negative() {
                write!(f, "-")?;
            } else {
                write!(f, "+")?;
            }
            fmt_abs_term(f, d, &q.abs())?;
        }
        Ok(())
    }
}

impl fmt::Debug for SurdNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SurdNumber({})", self)
    }
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Self {
        Parser { src, pos: 0 }
    }

    fn error<T>(&self, message: &str) -> Result<T, NumberError> {
        Err(NumberError::Parse {
            position: self.pos,
            message: message.to_string(),
        })
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(|c| c == b' ' || c == b'\t') {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.src.as_bytes().get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<(), NumberError> {
        if self.eat(c) {
            Ok(())
        } else {
            self.error(&format!("expected '{}'", c as char))
        }
    }

    fn parse_digits(&mut self) -> Result<&'a str, NumberError> {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if self.pos == start {
            return self.error("expected digits");
        }
        Ok(&self.src[start..self.pos])
    }

    fn parse_uint(&mut self) -> Result<u64, NumberError> {
        let start = self.pos;
        let digits = self.parse_digits()?;
        digits.parse::<u64>().map_err(|_| NumberError::Parse {
            position: start,
            message: "integer out of range".to_string(),
        })
    }

    /// `rational := int ['/' posint]`; signs come from the weight level.
    fn parse_rational(&mut self) -> Result<BigRational, NumberError> {
        let numer: BigInt = self
            .parse_digits()?
            .parse()
            .expect("digits parse as BigInt");
        if self.eat(b'/') {
            let dstart = self.pos;
            let denom: BigInt = self
                .parse_digits()?
                .parse()
                .expect("digits parse as BigInt");
            if denom.is_zero() {
                return Err(NumberError::Parse {
                    position: dstart,
                    message: "zero denominator".to_string(),
                });
            }
            Ok(BigRational::new(numer, denom))
        } else {
            Ok(BigRational::from_integer(numer))
        }
    }

    fn parse_sqrt(&mut self) -> Result<u64, NumberError> {
        for c in *b"sqrt" {
            self.expect(c)?;
        }
        self.skip_ws();
        self.expect(b'(')?;
        self.skip_ws();
        let start = self.pos;
        let d = self.parse_uint()?;
        if d == 0 {
            return Err(NumberError::Parse {
                position: start,
                message: "radicand must be positive".to_string(),
            });
        }
        self.skip_ws();
        self.expect(b')')?;
        Ok(d)
    }

    /// `term := rational | rational '*' 'sqrt' '(' posint ')' | 'sqrt' '(' posint ')'`
    fn parse_term(&mut self, negate: bool) -> Result<SurdNumber, NumberError> {
        self.skip_ws();
        let mut value = if self.peek() == Some(b's') {
            SurdNumber::sqrt_of(self.parse_sqrt()?)
        } else {
            let coeff = self.parse_rational()?;
            self.skip_ws();
            if self.eat(b'*') {
                self.skip_ws();
                let d = self.parse_sqrt()?;
                SurdNumber::from_terms([(d, coeff)])
            } else {
                SurdNumber::from_rational(coeff)
            }
        };
        if negate {
            value = -value;
        }
        Ok(value)
    }

    fn parse_weight(&mut self) -> Result<SurdNumber, NumberError> {
        self.skip_ws();
        let leading_minus = self.eat(b'-');
        let mut acc = self.parse_term(leading_minus)?;
        loop {
            self.skip_ws();
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    acc = &acc + &self.parse_term(false)?;
                }
                Some(b'-') => {
                    self.pos += 1;
                    acc = &acc + &self.parse_term(true)?;
                }
                None => return Ok(acc),
                Some(_) => return self.error("unexpected trailing input"),
            }
        }
    }
}

impl FromStr for SurdNumber {
    type Err = NumberError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Parser::new(s).parse_weight()
    }
}

impl serde::Serialize for SurdNumber {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> serde::Deserialize<'de> for SurdNumber {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn s(text: &str) -> SurdNumber {
        text.parse().unwrap()
    }

    /// Random surd with radicands drawn from products of at most the first
    /// three primes, so reciprocals stay under the default support cap.
    fn random_surd(rng: &mut StdRng, radicands: &[u64], max_terms: usize) -> SurdNumber {
        let k = rng.gen_range(1..=max_terms);
        let mut pairs = Vec::new();
        for _ in 0..k {
            let d = radicands[rng.gen_range(0..radicands.len())];
            let p = loop {
                let p = rng.gen_range(-9i64..=9);
                if p != 0 {
                    break p;
                }
            };
            let q = rng.gen_range(1i64..=9);
            pairs.push((d, BigRational::new(BigInt::from(p), BigInt::from(q))));
        }
        SurdNumber::from_terms(pairs)
    }

    const RADS: [u64; 8] = [1, 2, 3, 5, 6, 10, 15, 30];

    #[test]
    fn add_cancels_and_combines() {
        assert_eq!(&s("1+sqrt(2)") + &s("2-sqrt(2)"), s("3"));
        let x = s("5-2*sqrt(3)");
        assert_eq!(&x + &SurdNumber::zero(), x);
        assert_eq!(&s("3/2*sqrt(3)") + &s("1/2*sqrt(3)"), s("2*sqrt(3)"));
    }

    #[test]
    fn mul_reduces_radicands() {
        assert_eq!(&s("sqrt(2)") * &s("sqrt(2)"), s("2"));
        assert_eq!(&s("sqrt(2)") * &s("sqrt(3)"), s("sqrt(6)"));
        // 12 = 2^2 * 3
        assert_eq!(&s("sqrt(6)") * &s("sqrt(2)"), s("2*sqrt(3)"));
    }

    #[test]
    fn sqrt_constructor_extracts_squares() {
        assert_eq!(SurdNumber::sqrt_of(8), s("2*sqrt(2)"));
        assert_eq!(SurdNumber::sqrt_of(12), s("2*sqrt(3)"));
        assert_eq!(SurdNumber::sqrt_of(4), s("2"));
        assert_eq!(SurdNumber::sqrt_of(1), s("1"));
        // large radicands: a perfect square and a ~1e9 prime
        assert_eq!(
            SurdNumber::sqrt_of(1_000_000_000_000_000_000),
            s("1000000000")
        );
        assert_eq!(
            SurdNumber::sqrt_of(999_999_937),
            s("sqrt(999999937)")
        );
    }

    #[test]
    fn reciprocal_examples() {
        let x = s("1+sqrt(2)");
        let r = x.reciprocal().unwrap();
        assert_eq!(r, s("-1+sqrt(2)"));
        assert_eq!(&x * &r, SurdNumber::one());

        let y = s("2*sqrt(2)");
        let ry = y.reciprocal().unwrap();
        assert_eq!(ry, s("1/4*sqrt(2)"));
        assert_eq!(&y * &ry, SurdNumber::one());

        assert_eq!(s("3/2").reciprocal().unwrap(), s("2/3"));
    }

    #[test]
    fn reciprocal_rejects_zero_and_large_fields() {
        assert_eq!(
            SurdNumber::zero().reciprocal(),
            Err(NumberError::ZeroDivision)
        );
        let wide = s("sqrt(2)+sqrt(3)+sqrt(5)+sqrt(7)+sqrt(11)");
        match wide.reciprocal() {
            Err(NumberError::FieldTooLarge { primes: 5, cap: 4 }) => {}
            other => panic!("expected FieldTooLarge, got {:?}", other),
        }
        // A wider cap admits it, and the product still comes out exact.
        let r = wide.reciprocal_capped(5).unwrap();
        assert_eq!(&wide * &r, SurdNumber::one());
    }

    #[test]
    fn sign_examples() {
        assert_eq!((&s("sqrt(6)") - &(&s("sqrt(2)") * &s("sqrt(3)"))).sign(), 0);
        assert_eq!(s("3-2*sqrt(2)").sign(), 1);
        assert_eq!(s("1+sqrt(2)-3").sign(), -1);
    }

    #[test]
    fn floor_examples() {
        assert_eq!(s("2*sqrt(2)").floor(), BigInt::from(2));
        assert_eq!(s("7/2").floor(), BigInt::from(3));
        assert_eq!(s("1+1/2*sqrt(2)").floor(), BigInt::from(1));
        assert_eq!(s("-3/2").floor(), BigInt::from(-2));
        assert_eq!(s("-1/2*sqrt(2)").floor(), BigInt::from(-1));
    }

    #[test]
    fn zero_test_is_syntactic() {
        let x = &s("sqrt(8)") - &s("2*sqrt(2)");
        assert!(x.is_zero());
        assert_eq!(x.terms.len(), 0);
        assert_eq!(x.sign(), 0);
    }

    #[test]
    fn normalization_is_idempotent() {
        let mut rng = StdRng::seed_from_u64(7);
        for _ in 0..200 {
            let x = random_surd(&mut rng, &RADS, 4);
            let renorm = SurdNumber::from_terms(x.terms().map(|(d, q)| (d, q.clone())));
            assert_eq!(renorm, x);
        }
    }

    #[test]
    fn reciprocal_roundtrip_1000() {
        let mut rng = StdRng::seed_from_u64(42);
        let mut checked = 0;
        while checked < 1000 {
            let x = random_surd(&mut rng, &RADS, 4);
            if x.is_zero() {
                continue;
            }
            let r = x.reciprocal().unwrap();
            assert_eq!(&x * &r, SurdNumber::one(), "failed for {}", x);
            checked += 1;
        }
    }

    #[test]
    fn ring_laws_on_random_triples() {
        let mut rng = StdRng::seed_from_u64(11);
        for _ in 0..300 {
            let a = random_surd(&mut rng, &RADS, 3);
            let b = random_surd(&mut rng, &RADS, 3);
            let c = random_surd(&mut rng, &RADS, 3);
            assert_eq!(&a + &b, &b + &a);
            assert_eq!(&a * &b, &b * &a);
            assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
            assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        }
    }

    /// 50 decimal digits is about 167 bits; use 200 as the independent
    /// evaluation precision.
    #[test]
    fn sign_agrees_with_50_digit_evaluation() {
        let mut rng = StdRng::seed_from_u64(91);
        for _ in 0..1000 {
            let x = random_surd(&mut rng, &RADS, 4);
            let e = x.enclosure(200);
            match e.sign() {
                Some(expected) => assert_eq!(x.sign(), expected, "value {}", x),
                None => assert!(x.is_zero()),
            }
        }
    }

    #[test]
    fn floor_agrees_with_50_digit_evaluation() {
        let mut rng = StdRng::seed_from_u64(92);
        for _ in 0..1000 {
            let x = random_surd(&mut rng, &RADS, 4);
            let e = x.enclosure(200);
            let lo = e.lo().floor().to_integer();
            let hi = e.hi().floor().to_integer();
            if lo == hi {
                assert_eq!(x.floor(), lo, "value {}", x);
            }
        }
    }

    #[test]
    fn to_f64_matches_enclosure() {
        let mut rng = StdRng::seed_from_u64(93);
        for _ in 0..200 {
            let x = random_surd(&mut rng, &RADS, 4);
            let f = x.to_f64();
            let e = x.enclosure(200);
            let lo = ratio_to_f64(e.lo());
            let hi = ratio_to_f64(e.hi());
            assert!(f >= lo - 1e-12 * (1.0 + lo.abs()));
            assert!(f <= hi + 1e-12 * (1.0 + hi.abs()));
        }
    }

    #[test]
    fn parse_examples() {
        assert_eq!(s("3/2"), SurdNumber::rational(3, 2));
        assert_eq!(s("1+sqrt(2)"), &SurdNumber::one() + &SurdNumber::sqrt_of(2));
        assert_eq!(s("3/2*sqrt(8)"), s("3*sqrt(2)"));
        assert_eq!(s("-1/2 + 2*sqrt(3)"), s("-1/2+2*sqrt(3)"));
        assert_eq!(s("2-sqrt(2)").to_string(), "2-sqrt(2)");
    }

    #[test]
    fn parse_errors_carry_positions() {
        match "1+sqrt(x)".parse::<SurdNumber>() {
            Err(NumberError::Parse { position, .. }) => assert_eq!(position, 7),
            other => panic!("expected parse error, got {:?}", other),
        }
        match "1/0".parse::<SurdNumber>() {
            Err(NumberError::Parse { position, .. }) => assert_eq!(position, 2),
            other => panic!("expected parse error, got {:?}", other),
        }
        assert!("".parse::<SurdNumber>().is_err());
        assert!("1+".parse::<SurdNumber>().is_err());
        assert!("sqrt(0)".parse::<SurdNumber>().is_err());
        assert!("2 junk".parse::<SurdNumber>().is_err());
    }

    #[test]
    fn precision_cap_is_reported() {
        // a 1-bit enclosure of 3 - 2*sqrt(2) straddles zero
        let x = s("3-2*sqrt(2)");
        assert_eq!(
            x.sign_capped(1),
            Err(NumberError::PrecisionCap { max_bits: 1 })
        );
        assert_eq!(
            x.floor_capped(1),
            Err(NumberError::PrecisionCap { max_bits: 1 })
        );
        assert_eq!(x.sign_capped(64), Ok(1));
    }

    #[test]
    fn comparison_uses_exact_sign() {
        assert!(s("sqrt(2)") < s("3/2"));
        assert!(s("2*sqrt(2)") > s("2"));
        assert_eq!(
            s("sqrt(6)")
                .try_cmp(&(&s("sqrt(2)") * &s("sqrt(3)")))
                .unwrap(),
            Ordering::Equal
        );
    }

    proptest! {
        #[test]
        fn display_roundtrip(seed in 0u64..10_000) {
            let mut rng = StdRng::seed_from_u64(seed);
            let x = random_surd(&mut rng, &RADS, 4);
            let text = x.to_string();
            let back: SurdNumber = text.parse().unwrap();
            prop_assert_eq!(back, x);
        }
    }

    /// Opt-in stress sweep: `cargo test -p equising -- --ignored`.
    #[test]
    #[ignore]
    fn stress_parser_never_panics() {
        let mut rng = StdRng::seed_from_u64(1_000_001);
        let alphabet: Vec<char> = "0123456789sqrt()+-*/ é√²".chars().collect();
        for _ in 0..50_000 {
            let len = rng.gen_range(0..24);
            let text: String = (0..len)
                .map(|_| alphabet[rng.gen_range(0..alphabet.len())])
                .collect();
            let _ = text.parse::<SurdNumber>();
        }
        // well-formed inputs still round-trip after the fuzz storm
        let mut rng = StdRng::seed_from_u64(1_000_002);
        for _ in 0..10_000 {
            let x = random_surd(&mut rng, &RADS, 5);
            assert_eq!(x.to_string().parse::<SurdNumber>().unwrap(), x);
        }
    }

    #[test]
    #[ignore]
    fn stress_reciprocal_and_sign_wide() {
        let mut rng = StdRng::seed_from_u64(1_000_003);
        let wide_rads: Vec<u64> = (1..=30).collect();
        let mut inverted = 0;
        for _ in 0..4_000 {
            let x = random_surd(&mut rng, &wide_rads, 5);
            let e = x.enclosure(300);
            match e.sign() {
                Some(expected) => assert_eq!(x.sign(), expected, "value {}", x),
                None => assert!(x.is_zero()),
            }
            if !x.is_zero() {
                if let Ok(r) = x.reciprocal_capped(5) {
                    assert_eq!(&x * &r, SurdNumber::one(), "inverse failed for {}", x);
                    inverted += 1;
                }
            }
        }
        assert!(inverted > 500);
    }
}
