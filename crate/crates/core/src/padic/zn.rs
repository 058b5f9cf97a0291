//! Integers mod p^k with a tracked absolute precision k.
//!
//! Moduli below 2^63 use a u64/u128 fast path; larger ones fall back to
//! `BigUint`. The variant of every element always matches its ring.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::ring::{CoeffRing, RingKind, Valuation};

#[derive(Debug, Clone, PartialEq, Eq)]
enum Modulus {
    Small(u64),
    Big(BigUint),
}

/// An element of Z/p^k; see [`IntegralRing`].
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ZnElem {
    Small(u64),
    Big(BigUint),
}

/// Z/p^k: p-adic integers known to absolute precision k.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntegralRing {
    p: u64,
    prec: u32,
    modulus: Modulus,
}

const SMALL_LIMIT: u64 = 1 << 63;

impl IntegralRing {
    pub fn new(p: u64, prec: u32) -> Self {
        let m = BigUint::from(p).pow(prec);
        let modulus = match m.to_u64() {
            Some(v) if v < SMALL_LIMIT => Modulus::Small(v),
            _ => Modulus::Big(m),
        };
        IntegralRing { p, prec, modulus }
    }

    pub fn precision(&self) -> u32 {
        self.prec
    }

    /// The same prime at a different precision.
    pub fn with_precision(&self, prec: u32) -> Self {
        IntegralRing::new(self.p, prec)
    }

    pub fn modulus(&self) -> BigUint {
        match &self.modulus {
            Modulus::Small(m) => BigUint::from(*m),
            Modulus::Big(m) => m.clone(),
        }
    }

    pub fn from_biguint(&self, x: &BigUint) -> ZnElem {
        match &self.modulus {
            Modulus::Small(m) => ZnElem::Small((x % *m).to_u64().unwrap_or(0)),
            Modulus::Big(m) => ZnElem::Big(x % m),
        }
    }

    pub fn from_bigint(&self, x: &BigInt) -> ZnElem {
        let m = BigInt::from(self.modulus());
        let r = x.mod_floor(&m);
        self.from_biguint(&r.to_biguint().unwrap_or_default())
    }

    /// Canonical representative in [0, p^k).
    pub fn to_biguint(&self, a: &ZnElem) -> BigUint {
        match a {
            ZnElem::Small(v) => BigUint::from(*v),
            ZnElem::Big(v) => v.clone(),
        }
    }

    /// Representative in (-p^k/2, p^k/2], handy for display and oracles.
    pub fn to_signed(&self, a: &ZnElem) -> BigInt {
        let m = self.modulus();
        let v = self.to_biguint(a);
        if &v * 2u32 > m {
            BigInt::from_biguint(Sign::Plus, v) - BigInt::from(m)
        } else {
            BigInt::from(v)
        }
    }

    /// Move an element of another precision into this ring, keeping its
    /// representative (reducing if this ring is coarser).
    pub fn lift(&self, a: &ZnElem) -> ZnElem {
        match (a, &self.modulus) {
            (ZnElem::Small(v), Modulus::Small(m)) => ZnElem::Small(v % m),
            (ZnElem::Small(v), Modulus::Big(_)) => ZnElem::Big(BigUint::from(*v)),
            (ZnElem::Big(v), _) => self.from_biguint(v),
        }
    }

    /// Splits a nonzero element as p^v * w; `w` is returned in the ring of
    /// precision k - v, where it is a unit.
    pub fn split_unit(&self, a: &ZnElem) -> Option<(u32, IntegralRing, ZnElem)> {
        let mut x = self.to_biguint(a);
        if x.is_zero() {
            return None;
        }
        let p = BigUint::from(self.p);
        let mut v = 0u32;
        loop {
            let (q, r) = x.div_rem(&p);
            if !r.is_zero() {
                break;
            }
            x = q;
            v += 1;
        }
        let ring = self.with_precision(self.prec - v);
        let w = ring.from_biguint(&x);
        Some((v, ring, w))
    }

    pub fn pow(&self, a: &ZnElem, mut e: u64) -> ZnElem {
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

    pub fn from_u64(&self, n: u64) -> ZnElem {
        match &self.modulus {
            Modulus::Small(m) => ZnElem::Small(n % m),
            Modulus::Big(m) => ZnElem::Big(BigUint::from(n) % m),
        }
    }
}

fn add_small(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 + b as u128) % m as u128) as u64
}

impl CoeffRing for IntegralRing {
    type Elem = ZnElem;
    const KIND: RingKind = RingKind::Integral;

    fn prime(&self) -> u64 {
        self.p
    }

    fn zero(&self) -> ZnElem {
        match self.modulus {
            Modulus::Small(_) => ZnElem::Small(0),
            Modulus::Big(_) => ZnElem::Big(BigUint::zero()),
        }
    }

    fn one(&self) -> ZnElem {
        self.from_u64(1)
    }

    fn from_i64(&self, n: i64) -> ZnElem {
        if n >= 0 {
            self.from_u64(n as u64)
        } else {
            self.neg(&self.from_u64(n.unsigned_abs()))
        }
    }

    fn add(&self, a: &ZnElem, b: &ZnElem) -> ZnElem {
        match (a, b, &self.modulus) {
            (ZnElem::Small(x), ZnElem::Small(y), Modulus::Small(m)) => ZnElem::Small(add_small(*x, *y, *m)),
            (ZnElem::Big(x), ZnElem::Big(y), Modulus::Big(m)) => {
                let s = x + y;
                ZnElem::Big(if &s >= m { s - m } else { s })
            }
            _ => self.from_biguint(&(self.to_biguint(a) + self.to_biguint(b))),
        }
    }

    fn sub(&self, a: &ZnElem, b: &ZnElem) -> ZnElem {
        self.add(a, &self.neg(b))
    }

    fn neg(&self, a: &ZnElem) -> ZnElem {
        match (a, &self.modulus) {
            (ZnElem::Small(0), _) => a.clone(),
            (ZnElem::Small(x), Modulus::Small(m)) => ZnElem::Small(m - x % m),
            _ => {
                let x = self.to_biguint(a);
                if x.is_zero() {
                    self.zero()
                } else {
                    let m = self.modulus();
                    self.from_biguint(&(&m - (x % &m)))
                }
            }
        }
    }

    fn mul(&self, a: &ZnElem, b: &ZnElem) -> ZnElem {
        match (a, b, &self.modulus) {
            (ZnElem::Small(x), ZnElem::Small(y), Modulus::Small(m)) => {
                ZnElem::Small(((*x as u128 * *y as u128) % *m as u128) as u64)
            }
            (ZnElem::Big(x), ZnElem::Big(y), Modulus::Big(m)) => ZnElem::Big((x * y) % m),
            _ => self.from_biguint(&(self.to_biguint(a) * self.to_biguint(b))),
        }
    }

    fn inv(&self, a: &ZnElem) -> Result<ZnElem> {
        if !self.is_unit(a) {
            return Err(Error::DivisionByZero);
        }
        let m = BigInt::from(self.modulus());
        let x = BigInt::from(self.to_biguint(a));
        let g = x.extended_gcd(&m);
        debug_assert!(g.gcd.is_one());
        Ok(self.from_bigint(&g.x))
    }

    fn valuation(&self, a: &ZnElem) -> Valuation {
        match a {
            ZnElem::Small(x) => {
                if *x == 0 {
                    return Valuation::AtLeast(self.prec as i64);
                }
                let mut v = 0;
                let mut x = *x;
                while x % self.p == 0 {
                    x /= self.p;
                    v += 1;
                }
                Valuation::Finite(v)
            }
            ZnElem::Big(_) => match self.split_unit(a) {
                Some((v, _, _)) => Valuation::Finite(v as i64),
                None => Valuation::AtLeast(self.prec as i64),
            },
        }
    }

    fn is_zero(&self, a: &ZnElem) -> bool {
        match a {
            ZnElem::Small(x) => *x == 0,
            ZnElem::Big(x) => x.is_zero(),
        }
    }

    fn meet(&self, other: &Self) -> Result<Self> {
        if self.p != other.p {
            return Err(Error::RingMismatch(format!("primes {} and {}", self.p, other.p)));
        }
        Ok(if self.prec <= other.prec { self.clone() } else { other.clone() })
    }

    fn coerce(&self, a: &ZnElem, target: &Self) -> ZnElem {
        if self.prec == target.prec {
            a.clone()
        } else {
            target.lift(a)
        }
    }

    fn residue(&self, a: &ZnElem) -> Option<u64> {
        if self.prec == 0 {
            return Some(0);
        }
        Some(match a {
            ZnElem::Small(x) => x % self.p,
            ZnElem::Big(x) => (x % self.p).to_u64().unwrap_or(0),
        })
    }
}
