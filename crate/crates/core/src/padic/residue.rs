use crate::error::{Error, Result};
use crate::ring::{CoeffRing, RingKind, Valuation};

/// The residue field F_p, elements stored as `u64` in `[0, p)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ResidueField {
    p: u64,
}

impl ResidueField {
    pub fn new(p: u64) -> Self {
        ResidueField { p }
    }

    pub fn pow(&self, a: u64, mut e: u64) -> u64 {
        let mut base = a % self.p;
        let mut acc = 1 % self.p;
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

impl CoeffRing for ResidueField {
    type Elem = u64;
    const KIND: RingKind = RingKind::Residue;

    fn prime(&self) -> u64 {
        self.p
    }

    fn zero(&self) -> u64 {
        0
    }

    fn one(&self) -> u64 {
        1
    }

    fn from_i64(&self, n: i64) -> u64 {
        n.rem_euclid(self.p as i64) as u64
    }

    fn add(&self, a: &u64, b: &u64) -> u64 {
        ((*a as u128 + *b as u128) % self.p as u128) as u64
    }

    fn sub(&self, a: &u64, b: &u64) -> u64 {
        self.add(a, &self.neg(b))
    }

    fn neg(&self, a: &u64) -> u64 {
        if *a == 0 {
            0
        } else {
            self.p - a
        }
    }

    fn mul(&self, a: &u64, b: &u64) -> u64 {
        ((*a as u128 * *b as u128) % self.p as u128) as u64
    }

    fn inv(&self, a: &u64) -> Result<u64> {
        if *a == 0 {
            return Err(Error::DivisionByZero);
        }
        Ok(self.pow(*a, self.p - 2))
    }

    fn valuation(&self, a: &u64) -> Valuation {
        if *a == 0 {
            Valuation::AtLeast(1)
        } else {
            Valuation::Finite(0)
        }
    }

    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }

    fn meet(&self, other: &Self) -> Result<Self> {
        if self.p != other.p {
            return Err(Error::RingMismatch(format!("primes {} and {}", self.p, other.p)));
        }
        Ok(*self)
    }

    fn coerce(&self, a: &u64, _target: &Self) -> u64 {
        *a
    }

    fn residue(&self, a: &u64) -> Option<u64> {
        Some(*a)
    }
}
