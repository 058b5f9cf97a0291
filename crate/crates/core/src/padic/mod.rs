//! Coefficient arithmetic: the prime context, Z/p^N, p-adic floats, F_p,
//! valuations and Teichmüller lifts.

mod number;
mod residue;
mod zn;

use num_bigint::{BigInt, BigUint};
use num_traits::Zero;

pub use number::{signed_representative, PadicField, PadicNumber};
pub(crate) use number::strip_p;
pub use residue::ResidueField;
pub use zn::{IntegralRing, ZnElem};

use crate::error::{Error, Result};
use crate::ring::CoeffRing;

/// The prime p together with the coefficient precision N and x-adic
/// truncation order K shared by every series in a computation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PrimeContext {
    p: u64,
    n: u32,
    k: usize,
}

impl PrimeContext {
    pub fn new(p: u64, n: u32, k: usize) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if n < 1 {
            return Err(Error::InvalidContext("N must be at least 1".into()));
        }
        if k < 2 {
            return Err(Error::InvalidContext("K must be at least 2".into()));
        }
        Ok(PrimeContext { p, n, k })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    /// Absolute coefficient precision N.
    pub fn precision(&self) -> u32 {
        self.n
    }

    /// Truncation order K: series are known mod x^(K+1).
    pub fn order(&self) -> usize {
        self.k
    }

    pub fn with_precision(&self, n: u32) -> Result<Self> {
        PrimeContext::new(self.p, n, self.k)
    }

    pub fn with_order(&self, k: usize) -> Result<Self> {
        PrimeContext::new(self.p, self.n, k)
    }

    /// δ: 1 for odd p, 2 for p = 2.
    pub fn delta(&self) -> u32 {
        if self.p == 2 {
            2
        } else {
            1
        }
    }

    /// e: the order of the maximal torsion in Z_p^×, p - 1 for odd p, 2 for p = 2.
    pub fn torsion_order(&self) -> u64 {
        if self.p == 2 {
            2
        } else {
            self.p - 1
        }
    }

    pub fn integral_ring(&self) -> IntegralRing {
        IntegralRing::new(self.p, self.n)
    }

    pub fn float_field(&self) -> PadicField {
        PadicField::new(self.p, self.n)
    }

    pub fn residue_field(&self) -> ResidueField {
        ResidueField::new(self.p)
    }
}

/// Trial division.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// v_p(n) for a nonzero integer; `None` for zero.
pub fn vp_int(n: &BigInt, p: u64) -> Option<u32> {
    if n.is_zero() {
        return None;
    }
    let (v, _) = strip_p(n.magnitude().clone(), p);
    Some(v as u32)
}

pub fn vp_u64(n: u64, p: u64) -> Option<u32> {
    vp_int(&BigInt::from(n), p)
}

/// v_p(n!) by Legendre's formula.
pub fn vp_factorial(n: u64, p: u64) -> u64 {
    let mut total = 0;
    let mut q = n;
    while q > 0 {
        q /= p;
        total += q;
    }
    total
}

/// The Teichmüller lift of `c mod p` in Z/p^N, as a ring element.
pub fn teichmuller_in(ring: &IntegralRing, c: u64) -> Result<ZnElem> {
    let p = ring.prime();
    if c.is_multiple_of(p) {
        return Err(Error::Precondition(format!("Teichmüller lift of a multiple of {p}")));
    }
    let mut t = ring.from_u64(c % p);
    // Each application of t -> t^p gains one correct digit.
    for _ in 0..=ring.precision() {
        let next = ring.pow(&t, p);
        if next == t {
            return Ok(t);
        }
        t = next;
    }
    Ok(t)
}

/// The Teichmüller lift of `c mod p` to precision N.
pub fn teichmuller(ctx: &PrimeContext, c: u64) -> Result<PadicNumber> {
    let ring = ctx.integral_ring();
    let t = teichmuller_in(&ring, c)?;
    let field = ctx.float_field();
    Ok(field.truncate(&field.from_bigint(&BigInt::from(ring.to_biguint(&t))), ctx.precision() as i64))
}

/// Smallest generator of (Z/p)^×.
pub fn primitive_root(p: u64) -> u64 {
    if p == 2 {
        return 1;
    }
    let f = ResidueField::new(p);
    let order = p - 1;
    let prime_factors: Vec<u64> = (2..=order).filter(|q| order.is_multiple_of(*q) && is_prime(*q)).collect();
    (2..p)
        .find(|g| prime_factors.iter().all(|q| f.pow(*g, order / q) != 1))
        .unwrap_or(1)
}

/// The canonical primitive e-th root of unity ζ_e in Z/p^N: −1 for p = 2,
/// otherwise the Teichmüller lift of the smallest primitive root mod p.
pub fn zeta_e_in(ring: &IntegralRing) -> ZnElem {
    let p = ring.prime();
    if p == 2 {
        ring.from_i64(-1)
    } else {
        teichmuller_in(ring, primitive_root(p)).unwrap_or_else(|_| ring.one())
    }
}

/// ζ_e as a p-adic number at precision N.
pub fn zeta_e(ctx: &PrimeContext) -> PadicNumber {
    let ring = ctx.integral_ring();
    let z = zeta_e_in(&ring);
    let field = ctx.float_field();
    field.truncate(&field.from_bigint(&BigInt::from(ring.to_biguint(&z))), ctx.precision() as i64)
}

/// `p^k` as a `BigUint`.
pub fn pow_big(p: u64, k: u32) -> BigUint {
    BigUint::from(p).pow(k)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn context_validation() {
        assert!(PrimeContext::new(4, 8, 8).is_err());
        assert!(PrimeContext::new(3, 0, 8).is_err());
        assert!(PrimeContext::new(3, 8, 1).is_err());
        let c = PrimeContext::new(2, 8, 8).unwrap();
        assert_eq!((c.delta(), c.torsion_order()), (2, 2));
        let c = PrimeContext::new(7, 8, 8).unwrap();
        assert_eq!((c.delta(), c.torsion_order()), (1, 6));
    }

    #[test]
    fn teichmuller_examples() {
        let c2 = PrimeContext::new(2, 10, 4).unwrap();
        assert_eq!(teichmuller(&c2, 1).unwrap().unit(), BigUint::from(1u32));
        let r2 = c2.integral_ring();
        assert_eq!(r2.to_biguint(&zeta_e_in(&r2)), BigUint::from(1023u32));

        let c3 = PrimeContext::new(3, 2, 4).unwrap();
        let t = teichmuller_in(&c3.integral_ring(), 2).unwrap();
        assert_eq!(c3.integral_ring().to_biguint(&t), BigUint::from(8u32));

        let c5 = PrimeContext::new(5, 6, 4).unwrap();
        assert_eq!(teichmuller(&c5, 1).unwrap().unit(), BigUint::from(1u32));
        assert!(teichmuller(&c5, 10).is_err());
    }

    #[test]
    fn teichmuller_is_root_of_unity() {
        for p in [2u64, 3, 5, 7] {
            for n in [1u32, 5, 17, 32] {
                let ring = IntegralRing::new(p, n);
                for c in 1..p {
                    let t = teichmuller_in(&ring, c).unwrap();
                    assert_eq!(ring.pow(&t, p - 1), ring.one(), "p={p} N={n} c={c}");
                    assert_eq!(ring.residue(&t), Some(c));
                }
            }
        }
    }

    #[test]
    fn primitive_roots() {
        assert_eq!(primitive_root(3), 2);
        assert_eq!(primitive_root(5), 2);
        assert_eq!(primitive_root(7), 3);
        assert_eq!(vp_factorial(10, 2), 8);
        assert_eq!(vp_u64(24, 2), Some(3));
    }
}
