//! Scalars of the two supported coefficient fields: the rationals and
//! word-sized prime fields.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// The coefficient field of every matrix, polynomial and point in a computation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Field {
    Rational,
    Prime(u64),
}

impl Field {
    pub fn prime(p: u64) -> Result<Field> {
        if is_prime_u64(p) {
            Ok(Field::Prime(p))
        } else {
            Err(Error::NotPrime(p))
        }
    }

    pub fn zero(self) -> FieldElem {
        match self {
            Field::Rational => FieldElem::Rational(BigRational::zero()),
            Field::Prime(p) => FieldElem::Prime { value: 0, modulus: p },
        }
    }

    pub fn one(self) -> FieldElem {
        match self {
            Field::Rational => FieldElem::Rational(BigRational::one()),
            Field::Prime(p) => FieldElem::Prime { value: 1 % p, modulus: p },
        }
    }

    pub fn from_i64(self, n: i64) -> FieldElem {
        self.from_bigint(&BigInt::from(n))
    }

    pub fn from_bigint(self, n: &BigInt) -> FieldElem {
        match self {
            Field::Rational => FieldElem::Rational(BigRational::from_integer(n.clone())),
            Field::Prime(p) => FieldElem::Prime { value: mod_bigint(n, p), modulus: p },
        }
    }

    /// `num / den` in this field. Fails when the denominator is zero in the field
    /// (zero, or divisible by the modulus).
    pub fn from_ratio(self, num: &BigInt, den: &BigInt) -> Result<FieldElem> {
        if den.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        match self {
            Field::Rational => Ok(FieldElem::Rational(BigRational::new(num.clone(), den.clone()))),
            Field::Prime(p) => {
                let d = mod_bigint(den, p);
                if d == 0 {
                    return Err(Error::ZeroDenominator);
                }
                let n = mod_bigint(num, p);
                Ok(FieldElem::Prime { value: mul_mod(n, inv_mod(d, p), p), modulus: p })
            }
        }
    }

    pub fn is_rational(self) -> bool {
        matches!(self, Field::Rational)
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Rational => write!(f, "QQ"),
            Field::Prime(p) => write!(f, "Fp {p}"),
        }
    }
}

impl Serialize for Field {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// An element of a [`Field`]. Rationals are kept in lowest terms with a
/// positive denominator; prime-field values are kept in `[0, p)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum FieldElem {
    Rational(BigRational),
    Prime { value: u64, modulus: u64 },
}

impl FieldElem {
    pub fn field(&self) -> Field {
        match self {
            FieldElem::Rational(_) => Field::Rational,
            FieldElem::Prime { modulus, .. } => Field::Prime(*modulus),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            FieldElem::Rational(q) => q.is_zero(),
            FieldElem::Prime { value, .. } => *value == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            FieldElem::Rational(q) => q.is_one(),
            FieldElem::Prime { value, .. } => *value == 1,
        }
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self) -> Option<FieldElem> {
        if self.is_zero() {
            return None;
        }
        Some(match self {
            FieldElem::Rational(q) => FieldElem::Rational(q.recip()),
            FieldElem::Prime { value, modulus } => {
                FieldElem::Prime { value: inv_mod(*value, *modulus), modulus: *modulus }
            }
        })
    }

    pub fn pow(&self, mut e: u32) -> FieldElem {
        let mut base = self.clone();
        let mut acc = self.field().one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Image under the reduction map Z_(p) -> F_p. `None` when the
    /// denominator is divisible by `p`. Prime-field elements are returned
    /// unchanged when the modulus already matches.
    pub fn reduce_mod(&self, p: u64) -> Option<FieldElem> {
        match self {
            FieldElem::Rational(q) => Field::Prime(p).from_ratio(q.numer(), q.denom()).ok(),
            FieldElem::Prime { modulus, .. } if *modulus == p => Some(self.clone()),
            FieldElem::Prime { .. } => None,
        }
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            FieldElem::Rational(q) => Some(q),
            FieldElem::Prime { .. } => None,
        }
    }

    /// Whether the value prints with a leading minus sign.
    pub fn is_negative(&self) -> bool {
        match self {
            FieldElem::Rational(q) => q.is_negative(),
            FieldElem::Prime { .. } => false,
        }
    }

    /// A rough size measure (bits of numerator plus denominator), used to
    /// pick small pivots.
    pub fn bit_size(&self) -> u64 {
        match self {
            FieldElem::Rational(q) => q.numer().bits() + q.denom().bits(),
            FieldElem::Prime { .. } => 0,
        }
    }

    pub fn to_f64(&self) -> Option<f64> {
        match self {
            FieldElem::Rational(q) => q.to_f64(),
            FieldElem::Prime { value, .. } => Some(*value as f64),
        }
    }
}

impl fmt::Display for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldElem::Rational(q) => {
                if q.denom().is_one() {
                    write!(f, "{}", q.numer())
                } else {
                    write!(f, "{}/{}", q.numer(), q.denom())
                }
            }
            FieldElem::Prime { value, .. } => write!(f, "{value}"),
        }
    }
}

impl Serialize for FieldElem {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

fn check_same(a: &FieldElem, b: &FieldElem) -> u64 {
    match (a, b) {
        (FieldElem::Prime { modulus: p, .. }, FieldElem::Prime { modulus: q, .. }) if p == q => *p,
        _ => panic!("arithmetic on mixed fields: {} and {}", a.field(), b.field()),
    }
}

impl Add for &FieldElem {
    type Output = FieldElem;
    fn add(self, rhs: &FieldElem) -> FieldElem {
        match (self, rhs) {
            (FieldElem::Rational(a), FieldElem::Rational(b)) => FieldElem::Rational(a + b),
            (FieldElem::Prime { value: a, .. }, FieldElem::Prime { value: b, .. }) => {
                let p = check_same(self, rhs);
                FieldElem::Prime { value: add_mod(*a, *b, p), modulus: p }
            }
            _ => {
                check_same(self, rhs);
                unreachable!()
            }
        }
    }
}

impl Sub for &FieldElem {
    type Output = FieldElem;
    fn sub(self, rhs: &FieldElem) -> FieldElem {
        match (self, rhs) {
            (FieldElem::Rational(a), FieldElem::Rational(b)) => FieldElem::Rational(a - b),
            (FieldElem::Prime { value: a, .. }, FieldElem::Prime { value: b, .. }) => {
                let p = check_same(self, rhs);
                FieldElem::Prime { value: add_mod(*a, p - *b, p), modulus: p }
            }
            _ => {
                check_same(self, rhs);
                unreachable!()
            }
        }
    }
}

impl Mul for &FieldElem {
    type Output = FieldElem;
    fn mul(self, rhs: &FieldElem) -> FieldElem {
        match (self, rhs) {
            (FieldElem::Rational(a), FieldElem::Rational(b)) => FieldElem::Rational(a * b),
            (FieldElem::Prime { value: a, .. }, FieldElem::Prime { value: b, .. }) => {
                let p = check_same(self, rhs);
                FieldElem::Prime { value: mul_mod(*a, *b, p), modulus: p }
            }
            _ => {
                check_same(self, rhs);
                unreachable!()
            }
        }
    }
}

/// Panics on division by zero, like integer division.
impl Div for &FieldElem {
    type Output = FieldElem;
    fn div(self, rhs: &FieldElem) -> FieldElem {
        let inv = rhs.inv().expect("division by zero field element");
        self * &inv
    }
}

impl Neg for &FieldElem {
    type Output = FieldElem;
    fn neg(self) -> FieldElem {
        match self {
            FieldElem::Rational(a) => FieldElem::Rational(-a),
            FieldElem::Prime { value, modulus } => {
                FieldElem::Prime { value: (modulus - value) % modulus, modulus: *modulus }
            }
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for FieldElem {
            type Output = FieldElem;
            fn $m(self, rhs: FieldElem) -> FieldElem {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl Neg for FieldElem {
    type Output = FieldElem;
    fn neg(self) -> FieldElem {
        -&self
    }
}

pub(crate) fn add_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 + b as u128) % p as u128) as u64
}

pub(crate) fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

pub(crate) fn pow_mod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, a, p);
        }
        a = mul_mod(a, a, p);
        e >>= 1;
    }
    acc
}

fn inv_mod(a: u64, p: u64) -> u64 {
    pow_mod(a, p - 2, p)
}

fn mod_bigint(n: &BigInt, p: u64) -> u64 {
    let r = n.mod_floor(&BigInt::from(p));
    r.to_u64().expect("residue fits in u64")
}

/// Deterministic Miller-Rabin for 64-bit integers.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &w in &WITNESSES {
        if n % w == 0 {
            return n == w;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &WITNESSES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}
