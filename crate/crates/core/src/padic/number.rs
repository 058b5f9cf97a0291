//! p-adic floating point: elements of Q_p as (valuation, unit, absolute precision).

use std::cmp::min;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::ring::{CoeffRing, RingKind, Valuation};

/// An element of Q_p known modulo p^precision.
///
/// `Value` is normalized: `unit` is coprime to p, lies in `[1, p^(precision - valuation))`,
/// and `valuation < precision`. Two numbers that agree to the same precision
/// are therefore structurally equal.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum PadicNumber {
    /// Exact zero.
    Zero,
    /// Indistinguishable from zero: divisible by p^k, nothing more is known.
    ZeroTo(i64),
    Value { valuation: i64, unit: BigUint, precision: i64 },
}

impl PadicNumber {
    /// `None` means +infinity (a zero, exact or to precision).
    pub fn valuation(&self) -> Option<i64> {
        match self {
            PadicNumber::Value { valuation, .. } => Some(*valuation),
            _ => None,
        }
    }

    /// Absolute precision; `None` for exact zero.
    pub fn precision(&self) -> Option<i64> {
        match self {
            PadicNumber::Zero => None,
            PadicNumber::ZeroTo(k) => Some(*k),
            PadicNumber::Value { precision, .. } => Some(*precision),
        }
    }

    pub fn unit(&self) -> BigUint {
        match self {
            PadicNumber::Value { unit, .. } => unit.clone(),
            _ => BigUint::zero(),
        }
    }

    pub fn is_exact_zero(&self) -> bool {
        matches!(self, PadicNumber::Zero)
    }

    /// Zero, either exactly or to the available precision.
    pub fn is_zero(&self) -> bool {
        !matches!(self, PadicNumber::Value { .. })
    }

    /// Valuation is non-negative (or the value is a zero).
    pub fn is_integral(&self) -> bool {
        match self {
            PadicNumber::Value { valuation, .. } => *valuation >= 0,
            PadicNumber::ZeroTo(k) => *k >= 0,
            PadicNumber::Zero => true,
        }
    }

    fn relative_precision(&self) -> Option<i64> {
        match self {
            PadicNumber::Value { valuation, precision, .. } => Some(precision - valuation),
            _ => None,
        }
    }
}

impl fmt::Display for PadicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PadicNumber::Zero => write!(f, "0"),
            PadicNumber::ZeroTo(k) => write!(f, "O(p^{k})"),
            PadicNumber::Value { valuation, unit, precision } => {
                write!(f, "p^{valuation}*{unit} + O(p^{precision})")
            }
        }
    }
}

/// Q_p with a fixed relative precision cap; the ring in which linearizations
/// and commutants with denominators live.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PadicField {
    p: u64,
    rel_prec: u32,
}

impl PadicField {
    pub fn new(p: u64, rel_prec: u32) -> Self {
        PadicField { p, rel_prec: rel_prec.max(1) }
    }

    pub fn relative_precision(&self) -> u32 {
        self.rel_prec
    }

    fn pk(&self, k: i64) -> BigUint {
        BigUint::from(self.p).pow(k.max(0) as u32)
    }

    /// Builds a normalized value from an integer representative `x` of
    /// `p^shift * x` known mod `p^precision`.
    fn normalize(&self, shift: i64, x: BigUint, precision: i64) -> PadicNumber {
        let x = x % self.pk(precision - shift);
        if x.is_zero() {
            return PadicNumber::ZeroTo(precision);
        }
        let (w, unit) = strip_p(x, self.p);
        let valuation = shift + w;
        let precision = min(precision, valuation + self.rel_prec as i64);
        let unit = unit % self.pk(precision - valuation);
        PadicNumber::Value { valuation, unit, precision }
    }

    /// An integer to full relative precision (exact zero for 0).
    pub fn from_bigint(&self, n: &BigInt) -> PadicNumber {
        if n.is_zero() {
            return PadicNumber::Zero;
        }
        let (v, _) = strip_p(n.abs().to_biguint().unwrap_or_default(), self.p);
        let precision = v + self.rel_prec as i64;
        let m = BigInt::from(self.pk(precision));
        let rep = n.mod_floor(&m).to_biguint().unwrap_or_default();
        self.normalize(0, rep, precision)
    }

    pub fn from_rational(&self, num: &BigInt, den: &BigInt) -> Result<PadicNumber> {
        let a = self.from_bigint(num);
        let b = self.from_bigint(den);
        self.div(&a, &b)
    }

    /// `a * p^k`.
    pub fn shift(&self, a: &PadicNumber, k: i64) -> PadicNumber {
        match a {
            PadicNumber::Zero => PadicNumber::Zero,
            PadicNumber::ZeroTo(z) => PadicNumber::ZeroTo(z + k),
            PadicNumber::Value { valuation, unit, precision } => PadicNumber::Value {
                valuation: valuation + k,
                unit: unit.clone(),
                precision: precision + k,
            },
        }
    }

    /// Lowers the absolute precision to at most `prec`.
    pub fn truncate(&self, a: &PadicNumber, prec: i64) -> PadicNumber {
        match a {
            PadicNumber::Zero => PadicNumber::ZeroTo(prec),
            PadicNumber::ZeroTo(z) => PadicNumber::ZeroTo(min(*z, prec)),
            PadicNumber::Value { valuation, unit, precision } => {
                if prec <= *valuation {
                    PadicNumber::ZeroTo(prec)
                } else {
                    let precision = min(*precision, prec);
                    PadicNumber::Value {
                        valuation: *valuation,
                        unit: unit % self.pk(precision - valuation),
                        precision,
                    }
                }
            }
        }
    }

    /// The integer `p^v * unit`, for a value of non-negative valuation.
    pub fn to_integer(&self, a: &PadicNumber) -> Option<BigUint> {
        match a {
            PadicNumber::Value { valuation, unit, .. } if *valuation >= 0 => Some(unit * self.pk(*valuation)),
            PadicNumber::Value { .. } => None,
            _ => Some(BigUint::zero()),
        }
    }

    /// Signed rational representative `p^v * u` with `u` in the symmetric range.
    pub fn to_rational_parts(&self, a: &PadicNumber) -> (BigInt, BigInt) {
        match a {
            PadicNumber::Value { valuation, unit, precision } => {
                let m = self.pk(precision - valuation);
                let u = if unit * 2u32 > m {
                    BigInt::from(unit.clone()) - BigInt::from(m)
                } else {
                    BigInt::from(unit.clone())
                };
                if *valuation >= 0 {
                    (u * BigInt::from(self.pk(*valuation)), BigInt::one())
                } else {
                    (u, BigInt::from(self.pk(-valuation)))
                }
            }
            _ => (BigInt::zero(), BigInt::one()),
        }
    }

    pub fn div(&self, a: &PadicNumber, b: &PadicNumber) -> Result<PadicNumber> {
        let (vb, ub, rb) = match b {
            PadicNumber::Zero => return Err(Error::DivisionByZero),
            PadicNumber::ZeroTo(k) => {
                return Err(Error::PrecisionExhausted(format!("divisor is zero to precision {k}")))
            }
            PadicNumber::Value { valuation, unit, .. } => (*valuation, unit, b.relative_precision().unwrap_or(0)),
        };
        Ok(match a {
            PadicNumber::Zero => PadicNumber::Zero,
            PadicNumber::ZeroTo(z) => PadicNumber::ZeroTo(z - vb),
            PadicNumber::Value { valuation, unit, .. } => {
                let ra = a.relative_precision().unwrap_or(0);
                let rel = min(min(ra, rb), self.rel_prec as i64);
                let m = self.pk(rel);
                let inv = mod_inverse(&(ub % &m), &m).ok_or(Error::DivisionByZero)?;
                let v = valuation - vb;
                self.normalize(v, (unit * inv) % &m, v + rel)
            }
        })
    }

    pub fn pow(&self, a: &PadicNumber, mut e: u64) -> PadicNumber {
        let mut base = a.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }
}

/// Splits `x > 0` as `p^v * w` with `p ∤ w`.
pub(crate) fn strip_p(mut x: BigUint, p: u64) -> (i64, BigUint) {
    let pb = BigUint::from(p);
    let mut v = 0;
    loop {
        let (q, r) = x.div_rem(&pb);
        if !r.is_zero() {
            return (v, x);
        }
        x = q;
        v += 1;
    }
}

pub(crate) fn mod_inverse(a: &BigUint, m: &BigUint) -> Option<BigUint> {
    if m.is_one() {
        return Some(BigUint::zero());
    }
    let g = BigInt::from(a.clone()).extended_gcd(&BigInt::from(m.clone()));
    if !g.gcd.is_one() {
        return None;
    }
    g.x.mod_floor(&BigInt::from(m.clone())).to_biguint()
}

impl CoeffRing for PadicField {
    type Elem = PadicNumber;
    const KIND: RingKind = RingKind::Float;

    fn prime(&self) -> u64 {
        self.p
    }

    fn zero(&self) -> PadicNumber {
        PadicNumber::Zero
    }

    fn one(&self) -> PadicNumber {
        self.from_i64(1)
    }

    fn from_i64(&self, n: i64) -> PadicNumber {
        self.from_bigint(&BigInt::from(n))
    }

    fn add(&self, a: &PadicNumber, b: &PadicNumber) -> PadicNumber {
        use PadicNumber::*;
        match (a, b) {
            (Zero, x) | (x, Zero) => x.clone(),
            (ZeroTo(z), ZeroTo(w)) => ZeroTo(min(*z, *w)),
            (ZeroTo(z), x @ Value { .. }) | (x @ Value { .. }, ZeroTo(z)) => self.truncate(x, *z),
            (
                Value { valuation: va, unit: ua, precision: pa },
                Value { valuation: vb, unit: ub, precision: pb },
            ) => {
                let prec = min(*pa, *pb);
                let v = min(*va, *vb);
                let sum = ua * self.pk(va - v) + ub * self.pk(vb - v);
                self.normalize(v, sum, prec)
            }
        }
    }

    fn sub(&self, a: &PadicNumber, b: &PadicNumber) -> PadicNumber {
        self.add(a, &self.neg(b))
    }

    fn neg(&self, a: &PadicNumber) -> PadicNumber {
        match a {
            PadicNumber::Value { valuation, unit, precision } => {
                let m = self.pk(precision - valuation);
                PadicNumber::Value { valuation: *valuation, unit: &m - unit, precision: *precision }
            }
            other => other.clone(),
        }
    }

    fn mul(&self, a: &PadicNumber, b: &PadicNumber) -> PadicNumber {
        use PadicNumber::*;
        match (a, b) {
            (Zero, _) | (_, Zero) => Zero,
            (ZeroTo(z), ZeroTo(w)) => ZeroTo(z + w),
            (ZeroTo(z), Value { valuation, .. }) | (Value { valuation, .. }, ZeroTo(z)) => ZeroTo(z + valuation),
            (Value { valuation: va, unit: ua, .. }, Value { valuation: vb, unit: ub, .. }) => {
                let rel = min(
                    min(a.relative_precision().unwrap_or(0), b.relative_precision().unwrap_or(0)),
                    self.rel_prec as i64,
                );
                let v = va + vb;
                let unit = (ua * ub) % self.pk(rel);
                PadicNumber::Value { valuation: v, unit, precision: v + rel }
            }
        }
    }

    fn inv(&self, a: &PadicNumber) -> Result<PadicNumber> {
        self.div(&self.one(), a)
    }

    fn valuation(&self, a: &PadicNumber) -> Valuation {
        match a {
            PadicNumber::Zero => Valuation::Infinite,
            PadicNumber::ZeroTo(k) => Valuation::AtLeast(*k),
            PadicNumber::Value { valuation, .. } => Valuation::Finite(*valuation),
        }
    }

    fn is_zero(&self, a: &PadicNumber) -> bool {
        a.is_zero()
    }

    fn is_exact_zero(&self, a: &PadicNumber) -> bool {
        a.is_exact_zero()
    }

    fn meet(&self, other: &Self) -> Result<Self> {
        if self.p != other.p {
            return Err(Error::RingMismatch(format!("primes {} and {}", self.p, other.p)));
        }
        Ok(PadicField::new(self.p, min(self.rel_prec, other.rel_prec)))
    }

    fn coerce(&self, a: &PadicNumber, target: &Self) -> PadicNumber {
        match a {
            PadicNumber::Value { valuation, .. } if target.rel_prec < self.rel_prec => {
                self.truncate(a, valuation + target.rel_prec as i64)
            }
            _ => a.clone(),
        }
    }

    fn residue(&self, a: &PadicNumber) -> Option<u64> {
        match a {
            PadicNumber::Value { valuation, unit, .. } => match valuation.cmp(&0) {
                std::cmp::Ordering::Less => None,
                std::cmp::Ordering::Equal => (unit % self.p).to_u64(),
                std::cmp::Ordering::Greater => Some(0),
            },
            PadicNumber::ZeroTo(k) if *k < 1 => None,
            _ => Some(0),
        }
    }
}

/// Converts a non-negative valuation element back into a signed integer
/// representative in the symmetric range, used by tests and displays.
pub fn signed_representative(field: &PadicField, a: &PadicNumber) -> Option<BigInt> {
    let (num, den) = field.to_rational_parts(a);
    if den.is_one() {
        Some(num)
    } else {
        None
    }
}
