//! Exact coefficient fields: the rationals and prime fields `F_p`.
//!
//! Algebra code is generic over [`Scalar`]. The field itself is a runtime
//! value ([`FieldSpec`]) so that the command line can pick `Q` or `F7`
//! and dispatch to the matching monomorphized code path.

use std::fmt;
use std::hash::Hash;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Largest admissible prime modulus is below this bound.
pub const MAX_MODULUS: u64 = 1 << 31;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScalarError {
    #[error("field mismatch: {left} vs {right}")]
    FieldMismatch { left: FieldSpec, right: FieldSpec },
    #[error("division by zero")]
    DivisionByZero,
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("modulus {0} is too large (must be below 2^31)")]
    ModulusTooLarge(u64),
    #[error("invalid field '{0}' (expected Q or Fp with p prime, e.g. F2)")]
    InvalidField(String),
    #[error("scalar type cannot represent field {0}")]
    Unsupported(FieldSpec),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FieldKind {
    Rationals,
    PrimeField,
}

/// Runtime description of a coefficient field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FieldSpec {
    kind: FieldKind,
    p: u32,
}

impl FieldSpec {
    pub const fn rationals() -> Self {
        FieldSpec {
            kind: FieldKind::Rationals,
            p: 0,
        }
    }

    /// The prime field of order `p`. Fails unless `p` is a prime below 2^31.
    pub fn prime_field(p: u64) -> Result<Self, ScalarError> {
        if p >= MAX_MODULUS {
            return Err(ScalarError::ModulusTooLarge(p));
        }
        if !is_prime(p) {
            return Err(ScalarError::NotPrime(p));
        }
        Ok(FieldSpec {
            kind: FieldKind::PrimeField,
            p: p as u32,
        })
    }

    pub fn kind(&self) -> FieldKind {
        self.kind
    }

    /// Modulus of a prime field, `None` for the rationals.
    pub fn modulus(&self) -> Option<u32> {
        match self.kind {
            FieldKind::Rationals => None,
            FieldKind::PrimeField => Some(self.p),
        }
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            FieldKind::Rationals => write!(f, "Q"),
            FieldKind::PrimeField => write!(f, "F{}", self.p),
        }
    }
}

impl FromStr for FieldSpec {
    type Err = ScalarError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        if t == "Q" {
            return Ok(FieldSpec::rationals());
        }
        let digits = t
            .strip_prefix('F')
            .filter(|d| !d.is_empty() && d.bytes().all(|b| b.is_ascii_digit()))
            .ok_or_else(|| ScalarError::InvalidField(t.to_string()))?;
        let p: u64 = digits
            .parse()
            .map_err(|_| ScalarError::ModulusTooLarge(u64::MAX))?;
        FieldSpec::prime_field(p)
    }
}

/// Trial division; moduli are below 2^31 so at most ~46k candidate divisors.
pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    if p < 4 {
        return true;
    }
    if p.is_multiple_of(2) {
        return false;
    }
    let mut d = 3;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// An exact field element.
///
/// Values are immutable; the binary operators panic when the operands come
/// from different fields (a caller bug). Use [`field_add`] for a checked
/// variant.
pub trait Scalar:
    Clone
    + fmt::Debug
    + fmt::Display
    + PartialEq
    + Eq
    + Hash
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    /// Whether this representation can hold elements of `spec`.
    fn supports(spec: &FieldSpec) -> bool;
    fn zero(spec: &FieldSpec) -> Self;
    fn one(spec: &FieldSpec) -> Self;
    fn from_i64(spec: &FieldSpec, v: i64) -> Self;
    /// `num / den` interpreted in the field; over `F_p` both are reduced mod p.
    fn from_ratio(spec: &FieldSpec, num: &BigInt, den: &BigInt) -> Result<Self, ScalarError>;

    fn spec(&self) -> FieldSpec;
    fn is_zero(&self) -> bool;
    fn is_one(&self) -> bool;
    fn inv(&self) -> Result<Self, ScalarError>;

    fn add_ref(&self, other: &Self) -> Self;
    fn mul_ref(&self, other: &Self) -> Self;
    /// `self -= a * b`, the elimination kernel.
    fn sub_mul_assign(&mut self, a: &Self, b: &Self);

    /// True when the canonical rendering starts with a minus sign.
    fn is_negative(&self) -> bool {
        false
    }
}

fn check_same<S: Scalar>(a: &S, b: &S) -> Result<(), ScalarError> {
    let (l, r) = (a.spec(), b.spec());
    if l != r {
        return Err(ScalarError::FieldMismatch { left: l, right: r });
    }
    Ok(())
}

/// Checked sum.
pub fn field_add<S: Scalar>(a: &S, b: &S) -> Result<S, ScalarError> {
    check_same(a, b)?;
    Ok(a.add_ref(b))
}

/// Checked product.
pub fn field_mul<S: Scalar>(a: &S, b: &S) -> Result<S, ScalarError> {
    check_same(a, b)?;
    Ok(a.mul_ref(b))
}

pub fn field_mul_inv<S: Scalar>(a: &S) -> Result<S, ScalarError> {
    a.inv()
}

// ---------------------------------------------------------------------------
// Rationals

/// Arbitrary-precision fractions, always kept in lowest terms with a
/// positive denominator.
pub type Rational = BigRational;

impl Scalar for BigRational {
    fn supports(spec: &FieldSpec) -> bool {
        spec.kind == FieldKind::Rationals
    }

    fn zero(_: &FieldSpec) -> Self {
        <BigRational as Zero>::zero()
    }

    fn one(_: &FieldSpec) -> Self {
        <BigRational as One>::one()
    }

    fn from_i64(_: &FieldSpec, v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }

    fn from_ratio(_: &FieldSpec, num: &BigInt, den: &BigInt) -> Result<Self, ScalarError> {
        if den.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        Ok(BigRational::new(num.clone(), den.clone()))
    }

    fn spec(&self) -> FieldSpec {
        FieldSpec::rationals()
    }

    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }

    fn is_one(&self) -> bool {
        One::is_one(self)
    }

    fn inv(&self) -> Result<Self, ScalarError> {
        if Zero::is_zero(self) {
            return Err(ScalarError::DivisionByZero);
        }
        Ok(self.recip())
    }

    fn add_ref(&self, other: &Self) -> Self {
        self + other
    }

    fn mul_ref(&self, other: &Self) -> Self {
        self * other
    }

    fn sub_mul_assign(&mut self, a: &Self, b: &Self) {
        // Integer operands are the common case in elimination; skip the
        // generic fraction path for them.
        if a.is_integer() && b.is_integer() && self.is_integer() {
            let prod = a.numer() * b.numer();
            *self = BigRational::from_integer(self.numer() - prod);
        } else {
            *self -= a * b;
        }
    }

    fn is_negative(&self) -> bool {
        Signed::is_negative(self)
    }
}

// ---------------------------------------------------------------------------
// Prime fields

/// Residue class modulo a prime `p < 2^31`, stored in `[0, p)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Fp {
    value: u32,
    p: u32,
}

impl Fp {
    /// Reduces `v` modulo `p`. `p` is trusted to be prime.
    pub fn new(v: i64, p: u32) -> Self {
        let value = v.rem_euclid(p as i64) as u32;
        Fp { value, p }
    }

    pub fn value(&self) -> u32 {
        self.value
    }

    pub fn modulus(&self) -> u32 {
        self.p
    }

    #[inline]
    fn same(&self, other: &Fp) {
        assert_eq!(self.p, other.p, "arithmetic across different prime fields");
    }

    fn pow(self, mut e: u64) -> Fp {
        let p = self.p as u64;
        let mut base = self.value as u64;
        let mut acc = 1u64 % p;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base % p;
            }
            base = base * base % p;
            e >>= 1;
        }
        Fp {
            value: acc as u32,
            p: self.p,
        }
    }

    fn reduce_big(v: &BigInt, p: u32) -> u32 {
        let r = v.mod_floor(&BigInt::from(p));
        r.to_u32().expect("residue fits in u32")
    }
}

impl fmt::Display for Fp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl Add for Fp {
    type Output = Fp;
    fn add(self, rhs: Fp) -> Fp {
        self.add_ref(&rhs)
    }
}

impl Sub for Fp {
    type Output = Fp;
    fn sub(self, rhs: Fp) -> Fp {
        self.same(&rhs);
        let v = if self.value >= rhs.value {
            self.value - rhs.value
        } else {
            self.value + (self.p - rhs.value)
        };
        Fp {
            value: v,
            p: self.p,
        }
    }
}

impl Mul for Fp {
    type Output = Fp;
    fn mul(self, rhs: Fp) -> Fp {
        self.mul_ref(&rhs)
    }
}

impl Neg for Fp {
    type Output = Fp;
    fn neg(self) -> Fp {
        if self.value == 0 {
            self
        } else {
            Fp {
                value: self.p - self.value,
                p: self.p,
            }
        }
    }
}

impl Scalar for Fp {
    fn supports(spec: &FieldSpec) -> bool {
        spec.kind == FieldKind::PrimeField
    }

    fn zero(spec: &FieldSpec) -> Self {
        Fp {
            value: 0,
            p: spec.p,
        }
    }

    fn one(spec: &FieldSpec) -> Self {
        Fp {
            value: 1 % spec.p,
            p: spec.p,
        }
    }

    fn from_i64(spec: &FieldSpec, v: i64) -> Self {
        Fp::new(v, spec.p)
    }

    fn from_ratio(spec: &FieldSpec, num: &BigInt, den: &BigInt) -> Result<Self, ScalarError> {
        let d = Fp {
            value: Fp::reduce_big(den, spec.p),
            p: spec.p,
        };
        let n = Fp {
            value: Fp::reduce_big(num, spec.p),
            p: spec.p,
        };
        Ok(n * d.inv()?)
    }

    fn spec(&self) -> FieldSpec {
        FieldSpec {
            kind: FieldKind::PrimeField,
            p: self.p,
        }
    }

    fn is_zero(&self) -> bool {
        self.value == 0
    }

    fn is_one(&self) -> bool {
        self.value == 1
    }

    fn inv(&self) -> Result<Self, ScalarError> {
        if self.value == 0 {
            return Err(ScalarError::DivisionByZero);
        }
        Ok(self.pow(self.p as u64 - 2))
    }

    fn add_ref(&self, other: &Self) -> Self {
        self.same(other);
        let s = self.value as u64 + other.value as u64;
        let p = self.p as u64;
        Fp {
            value: if s >= p { (s - p) as u32 } else { s as u32 },
            p: self.p,
        }
    }

    fn mul_ref(&self, other: &Self) -> Self {
        self.same(other);
        Fp {
            value: (self.value as u64 * other.value as u64 % self.p as u64) as u32,
            p: self.p,
        }
    }

    fn sub_mul_assign(&mut self, a: &Self, b: &Self) {
        *self = *self - a.mul_ref(b);
    }
}

/// Convenience for tests and parsers: a signed big integer as a scalar.
pub fn from_bigint<S: Scalar>(spec: &FieldSpec, v: &BigInt) -> S {
    S::from_ratio(spec, v, &BigInt::from(1)).expect("unit denominator")
}
