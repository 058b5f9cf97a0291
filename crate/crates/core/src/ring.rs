//! The coefficient-ring abstraction shared by all series arithmetic.
//!
//! Three rings implement it: [`IntegralRing`](crate::padic::IntegralRing)
//! (Z/p^N with a tracked absolute precision), [`PadicField`](crate::padic::PadicField)
//! (p-adic floating point for Q_p) and [`ResidueField`](crate::padic::ResidueField) (F_p).

use std::fmt::Debug;

use crate::error::Result;

/// p-adic valuation of a coefficient as far as the ring can see it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Valuation {
    /// The exact valuation.
    Finite(i64),
    /// Indistinguishable from zero: the value is divisible by p^k.
    AtLeast(i64),
    /// Exact zero.
    Infinite,
}

impl Valuation {
    pub fn finite(self) -> Option<i64> {
        match self {
            Valuation::Finite(v) => Some(v),
            _ => None,
        }
    }

    /// A lower bound usable in `min` computations (`i64::MAX` for exact zero).
    pub fn lower_bound(self) -> i64 {
        match self {
            Valuation::Finite(v) | Valuation::AtLeast(v) => v,
            Valuation::Infinite => i64::MAX,
        }
    }
}

/// Which of the three coefficient rings a series lives over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RingKind {
    Integral,
    Float,
    Residue,
}

impl RingKind {
    pub fn as_str(self) -> &'static str {
        match self {
            RingKind::Integral => "integral",
            RingKind::Float => "float",
            RingKind::Residue => "residue",
        }
    }
}

/// A commutative coefficient ring of characteristic 0 or p, attached to a prime p.
pub trait CoeffRing: Clone + Debug + PartialEq {
    type Elem: Clone + Debug + PartialEq;

    const KIND: RingKind;

    fn prime(&self) -> u64;
    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn from_i64(&self, n: i64) -> Self::Elem;

    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;

    /// Multiplicative inverse of a unit.
    fn inv(&self, a: &Self::Elem) -> Result<Self::Elem>;

    fn valuation(&self, a: &Self::Elem) -> Valuation;

    /// Zero to the precision the ring tracks.
    fn is_zero(&self, a: &Self::Elem) -> bool {
        !matches!(self.valuation(a), Valuation::Finite(_))
    }

    /// Contributes nothing to a sum or product, not even a precision bound.
    /// Only exact zeros of the float ring differ from `is_zero`.
    fn is_exact_zero(&self, a: &Self::Elem) -> bool {
        self.is_zero(a)
    }

    fn is_unit(&self, a: &Self::Elem) -> bool {
        self.valuation(a) == Valuation::Finite(0)
    }

    /// The common ring two operands are combined in (the coarser precision wins).
    fn meet(&self, other: &Self) -> Result<Self>;

    /// Re-express an element of `self` in the (coarser) ring `target`.
    fn coerce(&self, a: &Self::Elem, target: &Self) -> Self::Elem;

    /// Residue class mod p of an integral element; `None` if not integral.
    fn residue(&self, a: &Self::Elem) -> Option<u64>;

    fn kind(&self) -> RingKind {
        Self::KIND
    }
}
