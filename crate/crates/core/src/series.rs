//! Truncated power series without constant term over a coefficient ring.
//!
//! A series is stored as its coefficients at x^1..=x^K, so the zero constant
//! term of S_nc is structural: `compose` never has to check it. The
//! truncation order K comes from the shared [`PrimeContext`].

use std::fmt;

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::padic::{IntegralRing, PadicField, PadicNumber, PrimeContext, ResidueField, ZnElem};
use crate::ring::{CoeffRing, RingKind, Valuation};

/// A power series `c_1 x + c_2 x^2 + ... + c_K x^K + O(x^(K+1))`.
#[derive(Debug, Clone, PartialEq)]
pub struct Series<R: CoeffRing> {
    ctx: PrimeContext,
    ring: R,
    coeffs: Vec<R::Elem>,
}

pub type IntSeries = Series<IntegralRing>;
pub type FloatSeries = Series<PadicField>;
pub type ResSeries = Series<ResidueField>;

/// Membership of a series in S_nc and G_0, derived from its linear coefficient.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SncClass {
    pub is_snc: bool,
    pub is_invertible: bool,
    pub is_noninvertible: bool,
}

impl<R: CoeffRing> Series<R> {
    /// Builds a series from coefficients of x^1, x^2, ...; missing
    /// coefficients are zero and anything beyond x^K is dropped.
    pub fn new(ctx: PrimeContext, ring: R, mut coeffs: Vec<R::Elem>) -> Self {
        let k = ctx.order();
        coeffs.truncate(k);
        while coeffs.len() < k {
            coeffs.push(ring.zero());
        }
        Series { ctx, ring, coeffs }
    }

    pub fn from_i64s(ctx: PrimeContext, ring: R, coeffs: &[i64]) -> Self {
        let c = coeffs.iter().map(|&n| ring.from_i64(n)).collect();
        Series::new(ctx, ring, c)
    }

    pub fn zero(ctx: PrimeContext, ring: R) -> Self {
        Series::new(ctx, ring, Vec::new())
    }

    /// The identity series x.
    pub fn identity(ctx: PrimeContext, ring: R) -> Self {
        Self::monomial(ctx, ring.clone(), 1, ring.one())
    }

    pub fn monomial(ctx: PrimeContext, ring: R, degree: usize, c: R::Elem) -> Self {
        let mut s = Series::zero(ctx, ring);
        if (1..=ctx.order()).contains(&degree) {
            s.coeffs[degree - 1] = c;
        }
        s
    }

    pub fn ctx(&self) -> &PrimeContext {
        &self.ctx
    }

    pub fn ring(&self) -> &R {
        &self.ring
    }

    pub fn order(&self) -> usize {
        self.ctx.order()
    }

    /// Coefficient of x^i (1-based); zero outside `1..=K`.
    pub fn coeff(&self, i: usize) -> R::Elem {
        if i == 0 || i > self.coeffs.len() {
            self.ring.zero()
        } else {
            self.coeffs[i - 1].clone()
        }
    }

    pub fn coeffs(&self) -> &[R::Elem] {
        &self.coeffs
    }

    pub fn linear(&self) -> R::Elem {
        self.coeff(1)
    }

    pub fn classify(&self) -> SncClass {
        let lin = self.linear();
        let is_snc = !self.ring.is_zero(&lin);
        let is_invertible = self.ring.is_unit(&lin);
        SncClass { is_snc, is_invertible, is_noninvertible: is_snc && !is_invertible }
    }

    /// Index of the first nonzero coefficient, if any within x^K.
    pub fn x_valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !self.ring.is_zero(c)).map(|i| i + 1)
    }

    pub fn is_zero(&self) -> bool {
        self.x_valuation().is_none()
    }

    /// Both operands re-expressed over their common ring.
    fn aligned(&self, other: &Self) -> Result<(R, Vec<R::Elem>, Vec<R::Elem>)> {
        if self.ctx.p() != other.ctx.p() || self.ctx.order() != other.ctx.order() {
            return Err(Error::RingMismatch(format!(
                "contexts (p={}, K={}) and (p={}, K={})",
                self.ctx.p(),
                self.ctx.order(),
                other.ctx.p(),
                other.ctx.order()
            )));
        }
        let ring = self.ring.meet(&other.ring)?;
        let a = if ring == self.ring {
            self.coeffs.clone()
        } else {
            self.coeffs.iter().map(|c| self.ring.coerce(c, &ring)).collect()
        };
        let b = if ring == other.ring {
            other.coeffs.clone()
        } else {
            other.coeffs.iter().map(|c| other.ring.coerce(c, &ring)).collect()
        };
        Ok((ring, a, b))
    }

    fn ctx_min(&self, other: &Self) -> PrimeContext {
        if self.ctx.precision() <= other.ctx.precision() {
            self.ctx
        } else {
            other.ctx
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        let (ring, a, b) = self.aligned(other)?;
        let c = a.iter().zip(&b).map(|(x, y)| ring.add(x, y)).collect();
        Ok(Series { ctx: self.ctx_min(other), ring, coeffs: c })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        let (ring, a, b) = self.aligned(other)?;
        let c = a.iter().zip(&b).map(|(x, y)| ring.sub(x, y)).collect();
        Ok(Series { ctx: self.ctx_min(other), ring, coeffs: c })
    }

    pub fn neg(&self) -> Self {
        let c = self.coeffs.iter().map(|x| self.ring.neg(x)).collect();
        Series { ctx: self.ctx, ring: self.ring.clone(), coeffs: c }
    }

    pub fn scale(&self, s: &R::Elem) -> Self {
        let c = self.coeffs.iter().map(|x| self.ring.mul(s, x)).collect();
        Series { ctx: self.ctx, ring: self.ring.clone(), coeffs: c }
    }

    /// Cauchy product mod x^(K+1). The result has no linear term.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        let (ring, a, b) = self.aligned(other)?;
        let k = self.order();
        let da = dense(&ring, &a);
        let db = dense(&ring, &b);
        let prod = mul_trunc(&ring, &da, &db, k);
        Ok(Series { ctx: self.ctx_min(other), ring, coeffs: prod[1..].to_vec() })
    }

    /// `self ∘ inner` mod x^(K+1), by Horner's rule in the truncated ring.
    pub fn compose(&self, inner: &Self) -> Result<Self> {
        let (ring, outer, inner_c) = self.aligned(inner)?;
        let k = self.order();
        let h = dense(&ring, &inner_c);
        // acc_i = acc_{i+1}·h + a_i is only needed mod x^(K-i+1).
        let mut acc: Vec<R::Elem> = Vec::new();
        for i in (1..=k).rev() {
            let mut next = mul_trunc(&ring, &acc, &h, k - i);
            next[0] = ring.add(&next[0], &outer[i - 1]);
            acc = next;
        }
        let result = mul_trunc(&ring, &acc, &h, k);
        Ok(Series { ctx: self.ctx_min(inner), ring, coeffs: result[1..].to_vec() })
    }

    /// The n-fold iterate g^{∘n}, by binary powering; `iterate(0)` is x.
    pub fn iterate(&self, mut n: u64) -> Result<Self> {
        let mut acc = Series::identity(self.ctx, self.ring.clone());
        let mut base = self.clone();
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.compose(&base)?;
            }
            n >>= 1;
            if n > 0 {
                base = base.compose(&base)?;
            }
        }
        Ok(acc)
    }

    /// The compositional inverse, solved coefficient by coefficient.
    pub fn comp_inverse(&self) -> Result<Self> {
        let ring = &self.ring;
        let k = self.order();
        let g1 = self.linear();
        if !ring.is_unit(&g1) {
            return Err(Error::NonUnitLinear);
        }
        let g1inv = ring.inv(&g1)?;
        let mut table = PowerTable::new(ring.clone(), k);
        table.set(1, g1inv.clone());
        for d in 2..=k {
            table.extend_column(d);
            // [x^d] g(h) = g_1 h_d + Σ_{j≥2} g_j [x^d] h^j = 0
            let mut s = ring.zero();
            for j in 2..=d {
                let gj = &self.coeffs[j - 1];
                if !ring.is_exact_zero(gj) {
                    s = ring.add(&s, &ring.mul(gj, table.get(j, d)));
                }
            }
            let hd = ring.neg(&ring.mul(&s, &g1inv));
            table.set(d, hd);
        }
        Ok(Series { ctx: self.ctx, ring: ring.clone(), coeffs: table.base() })
    }

    /// Equality after subtraction, to the precision the ring tracks.
    pub fn agrees_with(&self, other: &Self) -> Result<bool> {
        Ok(self.sub(other)?.is_zero())
    }

    /// `self - x`.
    pub fn minus_identity(&self) -> Self {
        let mut s = self.clone();
        s.coeffs[0] = self.ring.sub(&s.coeffs[0], &self.ring.one());
        s
    }

    pub fn is_identity(&self) -> bool {
        self.minus_identity().is_zero()
    }

    /// Coefficientwise reduction to F_p.
    pub fn reduce_mod_p(&self) -> Result<ResSeries> {
        let mut out = Vec::with_capacity(self.coeffs.len());
        for (i, c) in self.coeffs.iter().enumerate() {
            out.push(self.ring.residue(c).ok_or(Error::NegativeValuation(i + 1))?);
        }
        Ok(Series::new(self.ctx, ResidueField::new(self.ctx.p()), out))
    }

    pub fn valuations(&self) -> Vec<Valuation> {
        self.coeffs.iter().map(|c| self.ring.valuation(c)).collect()
    }

    pub fn kind(&self) -> RingKind {
        R::KIND
    }

    /// Same coefficients in a context with a different truncation order.
    pub fn with_order(&self, k: usize) -> Result<Self> {
        let ctx = self.ctx.with_order(k)?;
        Ok(Series::new(ctx, self.ring.clone(), self.coeffs.clone()))
    }
}

impl IntSeries {
    /// Absolute p-adic precision of every coefficient.
    pub fn precision(&self) -> u32 {
        self.ring.precision()
    }

    /// Reduces all coefficients to a lower absolute precision.
    pub fn truncate_precision(&self, prec: u32) -> Self {
        let ring = self.ring.with_precision(prec.min(self.precision()));
        let coeffs = self.coeffs.iter().map(|c| ring.lift(c)).collect();
        Series { ctx: self.ctx, ring, coeffs }
    }

    /// Integer coefficients given as arbitrary-size signed integers.
    pub fn from_bigints(ctx: PrimeContext, coeffs: &[BigInt]) -> Self {
        let ring = ctx.integral_ring();
        let c = coeffs.iter().map(|n| ring.from_bigint(n)).collect();
        Series::new(ctx, ring, c)
    }

    /// Symmetric-range integer representatives of the coefficients.
    pub fn signed_coeffs(&self) -> Vec<BigInt> {
        self.coeffs.iter().map(|c| self.ring.to_signed(c)).collect()
    }

    pub fn to_float(&self) -> FloatSeries {
        let field = self.ctx.float_field();
        let prec = self.precision() as i64;
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| field.truncate(&field.from_bigint(&BigInt::from(self.ring.to_biguint(c))), prec))
            .collect();
        Series::new(self.ctx, field, coeffs)
    }
}

impl FloatSeries {
    /// Converts to Z/p^M where M is the smallest coefficient precision
    /// (capped at N); fails on any negative valuation.
    pub fn to_integral(&self) -> Result<IntSeries> {
        let mut prec = self.ctx.precision() as i64;
        for (i, c) in self.coeffs.iter().enumerate() {
            if !c.is_integral() {
                return Err(Error::NegativeValuation(i + 1));
            }
            if let Some(q) = c.precision() {
                prec = prec.min(q);
            }
        }
        if prec < 1 {
            return Err(Error::PrecisionExhausted(format!("integral precision {prec}")));
        }
        let ring = IntegralRing::new(self.ctx.p(), prec as u32);
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| ring.from_biguint(&self.ring.to_integer(c).unwrap_or_default()))
            .collect();
        Ok(Series::new(self.ctx, ring, coeffs))
    }

    /// Smallest absolute precision over the coefficients (`None` if all exact).
    pub fn min_precision(&self) -> Option<i64> {
        self.coeffs.iter().filter_map(PadicNumber::precision).min()
    }
}

impl ResSeries {
    /// Lifts to Z/p^N using representatives in `[0, p)`.
    pub fn lift(&self) -> IntSeries {
        let ring = self.ctx.integral_ring();
        let coeffs = self.coeffs.iter().map(|c| ring.from_u64(*c)).collect();
        Series::new(self.ctx, ring, coeffs)
    }

    pub fn from_u64s(ctx: PrimeContext, coeffs: &[u64]) -> Self {
        let f = ResidueField::new(ctx.p());
        Series::new(ctx, f, coeffs.iter().map(|c| c % ctx.p()).collect())
    }
}

impl<R: CoeffRing> fmt::Display for Series<R>
where
    R::Elem: fmt::Display,
{
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if self.ring.is_zero(c) {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i + 1 {
                1 => write!(f, "({c})*x")?,
                d => write!(f, "({c})*x^{d}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O(x^{})", self.order() + 1)
    }
}

impl fmt::Display for ZnElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ZnElem::Small(v) => write!(f, "{v}"),
            ZnElem::Big(v) => write!(f, "{v}"),
        }
    }
}

/// Coefficients with an explicit constant slot at index 0.
pub(crate) fn dense<R: CoeffRing>(ring: &R, c: &[R::Elem]) -> Vec<R::Elem> {
    let mut v = Vec::with_capacity(c.len() + 1);
    v.push(ring.zero());
    v.extend_from_slice(c);
    v
}

/// Product of dense polynomials, keeping degrees `0..=max_deg`.
pub(crate) fn mul_trunc<R: CoeffRing>(ring: &R, a: &[R::Elem], b: &[R::Elem], max_deg: usize) -> Vec<R::Elem> {
    let mut out = vec![ring.zero(); max_deg + 1];
    for (i, ai) in a.iter().enumerate().take(max_deg + 1) {
        if ring.is_exact_zero(ai) {
            continue;
        }
        for (j, bj) in b.iter().enumerate().take(max_deg + 1 - i) {
            if ring.is_exact_zero(bj) {
                continue;
            }
            out[i + j] = ring.add(&out[i + j], &ring.mul(ai, bj));
        }
    }
    out
}

/// Multiplicative inverse of a dense series with unit constant term, mod x^(max_deg+1).
pub(crate) fn inv_trunc<R: CoeffRing>(ring: &R, a: &[R::Elem], max_deg: usize) -> Result<Vec<R::Elem>> {
    let a0 = a.first().cloned().unwrap_or_else(|| ring.zero());
    let a0inv = ring.inv(&a0)?;
    let mut out = vec![ring.zero(); max_deg + 1];
    out[0] = a0inv.clone();
    for n in 1..=max_deg {
        let mut s = ring.zero();
        for j in 1..=n.min(a.len().saturating_sub(1)) {
            s = ring.add(&s, &ring.mul(&a[j], &out[n - j]));
        }
        out[n] = ring.neg(&ring.mul(&s, &a0inv));
    }
    Ok(out)
}

/// Coefficients `[x^d] h^j` of the powers of a series `h` whose coefficients
/// are discovered one at a time.
///
/// Column `d` of every power `j ≥ 2` only depends on `h_1..h_{d-1}`, so a
/// solver can fill column `d`, use it to determine `h_d`, then record `h_d`.
pub(crate) struct PowerTable<R: CoeffRing> {
    ring: R,
    k: usize,
    // rows[j][d] = [x^d] h^j, j in 1..=k, d in 0..=k
    rows: Vec<Vec<R::Elem>>,
}

impl<R: CoeffRing> PowerTable<R> {
    pub(crate) fn new(ring: R, k: usize) -> Self {
        let rows = vec![vec![ring.zero(); k + 1]; k + 1];
        PowerTable { ring, k, rows }
    }

    /// A complete table for a known series.
    pub(crate) fn of(ring: R, coeffs: &[R::Elem]) -> Self {
        let k = coeffs.len();
        let mut t = PowerTable::new(ring, k);
        for d in 1..=k {
            t.extend_column(d);
            t.set(d, coeffs[d - 1].clone());
        }
        t
    }

    pub(crate) fn set(&mut self, d: usize, hd: R::Elem) {
        self.rows[1][d] = hd;
    }

    pub(crate) fn get(&self, j: usize, d: usize) -> &R::Elem {
        &self.rows[j][d]
    }

    /// Fills `[x^d] h^j` for `2 ≤ j ≤ d` from the known `h_1..h_{d-1}`.
    pub(crate) fn extend_column(&mut self, d: usize) {
        let ring = &self.ring;
        for j in 2..=d.min(self.k) {
            let mut s = ring.zero();
            for m in 1..=(d + 1 - j) {
                let hm = &self.rows[1][m];
                let prev = &self.rows[j - 1][d - m];
                if ring.is_exact_zero(hm) || ring.is_exact_zero(prev) {
                    continue;
                }
                s = ring.add(&s, &ring.mul(hm, prev));
            }
            self.rows[j][d] = s;
        }
    }

    /// The series h itself, as coefficients of x^1..=x^K.
    pub(crate) fn base(&self) -> Vec<R::Elem> {
        self.rows[1][1..].to_vec()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(p: u64, n: u32, k: usize) -> PrimeContext {
        PrimeContext::new(p, n, k).unwrap()
    }

    fn int(p: u64, n: u32, k: usize, c: &[i64]) -> IntSeries {
        let cx = ctx(p, n, k);
        Series::from_i64s(cx, cx.integral_ring(), c)
    }

    fn binomial_row(a: i64, k: usize) -> Vec<i64> {
        let mut row = Vec::new();
        let mut c: i128 = 1;
        for i in 1..=k as i128 {
            c = c * (a as i128 - i + 1) / i;
            row.push(c as i64);
        }
        row
    }

    #[test]
    fn ring_ops() {
        let x = int(5, 8, 6, &[1]);
        assert_eq!(x.mul(&x).unwrap(), int(5, 8, 6, &[0, 1]));
        let a = int(5, 8, 6, &[1, 1]);
        let b = int(5, 8, 6, &[1, -1]);
        assert_eq!(a.add(&b).unwrap(), int(5, 8, 6, &[2]));
    }

    #[test]
    fn compose_examples() {
        let f = int(7, 8, 6, &[1, 1]);
        let g = int(7, 8, 6, &[1, 0, 1]);
        assert_eq!(f.compose(&g).unwrap(), int(7, 8, 6, &[1, 1, 1, 2, 0, 1]));
        let x = int(7, 8, 6, &[1]);
        assert_eq!(g.compose(&x).unwrap(), g);

        let u = int(5, 10, 8, &binomial_row(5, 8));
        let uu = u.compose(&u).unwrap();
        assert_eq!(uu, int(5, 10, 8, &binomial_row(25, 8)));
        assert_eq!(uu.signed_coeffs()[1], BigInt::from(300));
    }

    #[test]
    fn iterate_examples() {
        let two_x = int(3, 8, 4, &[2]);
        assert_eq!(two_x.iterate(3).unwrap(), int(3, 8, 4, &[8]));
        let f = int(3, 8, 10, &binomial_row(3, 10));
        assert_eq!(f.iterate(1).unwrap(), f);
        let f2 = f.iterate(2).unwrap();
        assert_eq!(f2, int(3, 8, 10, &binomial_row(9, 10)));
        assert_eq!(f2.signed_coeffs()[2], BigInt::from(84));
        assert!(f.iterate(0).unwrap().is_identity());
    }

    #[test]
    fn inverse_examples() {
        // x + x^2 inverts to the signed Catalan series
        let g = int(3, 12, 7, &[1, 1]);
        let h = g.comp_inverse().unwrap();
        assert_eq!(h, int(3, 12, 7, &[1, -1, 2, -5, 14, -42, 132]));
        assert!(g.compose(&h).unwrap().is_identity());
        assert!(h.compose(&g).unwrap().is_identity());

        let x = int(3, 12, 7, &[1]);
        assert_eq!(x.comp_inverse().unwrap(), x);

        let c2 = ctx(2, 4, 12);
        let all_ones = ResSeries::from_u64s(c2, &[1; 12]);
        assert_eq!(all_ones.comp_inverse().unwrap(), all_ones);

        let noninv = int(3, 12, 7, &[3, 1]);
        assert_eq!(noninv.comp_inverse(), Err(Error::NonUnitLinear));
    }

    #[test]
    fn reduction_examples() {
        let c2 = ctx(2, 8, 5);
        let u = Series::from_i64s(c2, c2.integral_ring(), &binomial_row(5, 5));
        assert_eq!(u.reduce_mod_p().unwrap(), ResSeries::from_u64s(c2, &[1, 0, 0, 1, 1]));
        let c3 = ctx(3, 8, 5);
        let f = Series::from_i64s(c3, c3.integral_ring(), &binomial_row(3, 5));
        assert_eq!(f.reduce_mod_p().unwrap(), ResSeries::from_u64s(c3, &[0, 0, 1]));
        assert!(f.scale(&c3.integral_ring().from_i64(3)).scale(&c3.integral_ring().from_i64(3)).reduce_mod_p().unwrap().is_zero());

        let third = c3.float_field().from_rational(&BigInt::from(1), &BigInt::from(3)).unwrap();
        let fs = Series::new(c3, c3.float_field(), vec![c3.float_field().one(), third]);
        assert_eq!(fs.reduce_mod_p(), Err(Error::NegativeValuation(2)));
    }

    #[test]
    fn multiplicative_inverse() {
        let r = IntegralRing::new(3, 10);
        let a = vec![r.from_i64(1), r.from_i64(-1)];
        let inv = inv_trunc(&r, &a, 5).unwrap();
        assert!(inv.iter().all(|c| *c == r.one()));
    }

    #[test]
    fn classification() {
        let f = int(3, 8, 4, &[3, 3, 1]);
        let c = f.classify();
        assert!(c.is_snc && !c.is_invertible && c.is_noninvertible);
        let u = int(3, 8, 4, &[4, 6]);
        assert!(u.classify().is_invertible);
        assert!(!f.mul(&u).unwrap().classify().is_snc);
    }

    #[test]
    fn mixed_precision_meets_at_coarser() {
        let a = int(2, 20, 4, &[1, 1]);
        let b = a.truncate_precision(5);
        let s = a.add(&b).unwrap();
        assert_eq!(s.precision(), 5);
    }
}
