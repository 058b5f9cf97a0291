//! Lubin's linearization L_f, the commutant [a]_f, and torsion series with
//! integrality certificates.
//!
//! All three solve triangular systems one coefficient at a time. For the
//! commutant z of f with z'(0) = a, comparing x^m coefficients of f∘z and z∘f
//! gives
//!
//! ```text
//! z_m (a_1^m − a_1) = Σ_{j≥2} a_j [x^m] z^j − Σ_{j<m} z_j [x^m] f^j
//! ```
//!
//! where the right side only involves z_1..z_{m−1}.

use num_bigint::BigUint;

use crate::error::{Error, Result};
use crate::newton::{weierstrass_degree, WeierstrassDegree};
use crate::oracle::validate_minimal_pair;
use crate::padic::{zeta_e_in, PadicNumber, ZnElem};
use crate::ring::{CoeffRing, Valuation};
use crate::series::{FloatSeries, IntSeries, PowerTable, Series};

/// Default number of p-adic digits a torsion certificate guarantees.
pub const DEFAULT_OUTPUT_PRECISION: u32 = 8;

/// L_f with L'(0) = 1 and L∘f = f'(0)·L.
#[derive(Debug, Clone, PartialEq)]
pub struct Linearization {
    pub series: FloatSeries,
    /// Lower bound on the valuation of each coefficient, x^1 first.
    pub min_valuation_profile: Vec<i64>,
}

fn check_noninvertible(f: &FloatSeries) -> Result<PadicNumber> {
    for (i, c) in f.coeffs().iter().enumerate() {
        if !c.is_integral() {
            return Err(Error::NegativeValuation(i + 1));
        }
    }
    let a1 = f.linear();
    match a1.valuation() {
        Some(v) if v >= 1 => Ok(a1),
        Some(_) => Err(Error::Precondition("f'(0) is a unit; f must be noninvertible".into())),
        None => Err(Error::Precondition("f'(0) is zero to the working precision".into())),
    }
}

pub fn linearize(f: &FloatSeries) -> Result<Linearization> {
    let a1 = check_noninvertible(f)?;
    let field = f.ring().clone();
    let k = f.order();
    let n = f.ctx().precision() as i64;
    let ftab = PowerTable::of(field.clone(), f.coeffs());
    let mut c: Vec<PadicNumber> = vec![field.one()];
    for m in 2..=k {
        // c_m (a_1 − a_1^m) = Σ_{j<m} c_j [x^m] f^j
        let mut s = field.zero();
        for (j, cj) in c.iter().enumerate().map(|(j, cj)| (j + 1, cj)) {
            let fjm = ftab.get(j, m);
            if cj.is_exact_zero() || fjm.is_exact_zero() {
                continue;
            }
            s = field.add(&s, &field.mul(cj, fjm));
        }
        let den = field.sub(&a1, &field.pow(&a1, m as u64));
        c.push(field.div(&s, &den)?);
    }
    let series = Series::new(*f.ctx(), field.clone(), c);
    let profile: Vec<i64> = series.valuations().into_iter().map(Valuation::lower_bound).collect();
    if let Some(worst) = profile.iter().copied().filter(|v| *v != i64::MAX).min() {
        if worst < -(n / 2) {
            return Err(Error::PrecisionBudget { needed: (2 * -worst) as u32, have: n as u32 });
        }
    }
    let lhs = series.compose(f)?;
    let rhs = series.scale(&a1);
    if !lhs.agrees_with(&rhs)? {
        return Err(Error::PrecisionExhausted("L∘f and f'(0)·L disagree at the tracked precision".into()));
    }
    Ok(Linearization { series, min_valuation_profile: profile })
}

/// The x^m numerator of the commutant recursion; column m of `ztab` must
/// already be extended.
fn commutant_numerator<R: CoeffRing>(ring: &R, f: &[R::Elem], ftab: &PowerTable<R>, ztab: &PowerTable<R>, m: usize) -> R::Elem {
    let mut s = ring.zero();
    for j in 2..=m {
        let fj = &f[j - 1];
        if ring.is_exact_zero(fj) {
            continue;
        }
        s = ring.add(&s, &ring.mul(fj, ztab.get(j, m)));
    }
    for j in 1..m {
        let zj = ztab.get(1, j);
        if ring.is_exact_zero(zj) {
            continue;
        }
        s = ring.sub(&s, &ring.mul(zj, ftab.get(j, m)));
    }
    s
}

/// [a]_f: the unique series with linear coefficient `a` commuting with f.
pub fn commutant(f: &FloatSeries, a: &PadicNumber) -> Result<FloatSeries> {
    let a1 = check_noninvertible(f)?;
    let field = f.ring().clone();
    if a.is_zero() {
        return Err(Error::Precondition("linear coefficient of the commutant must be nonzero".into()));
    }
    let k = f.order();
    let ftab = PowerTable::of(field.clone(), f.coeffs());
    let mut ztab = PowerTable::new(field.clone(), k);
    ztab.set(1, a.clone());
    for m in 2..=k {
        ztab.extend_column(m);
        let num = commutant_numerator(&field, f.coeffs(), &ftab, &ztab, m);
        let den = field.sub(&field.pow(&a1, m as u64), &a1);
        ztab.set(m, field.div(&num, &den)?);
    }
    let z = Series::new(*f.ctx(), field, ztab.base());
    if let Some(prec) = z.min_precision() {
        if prec < 1 {
            return Err(Error::PrecisionExhausted(format!(
                "commutant coefficients lost all precision by x^{k}; raise N or lower K"
            )));
        }
    }
    Ok(z)
}

/// Result of the commutant recursion run in Z/p^N.
pub(crate) enum IntegralSolve {
    /// Coefficients reduced to the precision they are known to.
    Solved(IntSeries),
    /// The x^index numerator is a unit while the divisor is not, so no
    /// integral solution exists.
    Witness { index: usize, precision: u32 },
}

/// The commutant recursion in Z/p^N for f with v_p(f'(0)) = 1.
///
/// Each divisor a_1^m − a_1 has valuation exactly 1, so every step costs one
/// digit and z_m is known mod p^(N−m+1).
pub(crate) fn solve_integral_commutant(f: &IntSeries, a: ZnElem) -> Result<IntegralSolve> {
    let ring = f.ring().clone();
    let k = f.order();
    let n = ring.precision();
    if (n as usize) < k {
        return Err(Error::PrecisionBudget { needed: k as u32, have: n });
    }
    let a1 = f.linear();
    if ring.valuation(&a1) != Valuation::Finite(1) {
        return Err(Error::Precondition("v_p(f'(0)) must be 1".into()));
    }
    let pb = BigUint::from(ring.prime());
    let ftab = PowerTable::of(ring.clone(), f.coeffs());
    let mut ztab = PowerTable::new(ring.clone(), k);
    ztab.set(1, a);
    // every quantity below is correct mod p^cur
    let mut cur = n;
    for m in 2..=k {
        ztab.extend_column(m);
        let num = commutant_numerator(&ring, f.coeffs(), &ftab, &ztab, m);
        if ring.valuation(&num) == Valuation::Finite(0) {
            return Ok(IntegralSolve::Witness { index: m, precision: cur });
        }
        let den = ring.sub(&ring.pow(&a1, m as u64), &a1);
        // both sides are divisible by p: divide representatives exactly
        let num_q = ring.from_biguint(&(ring.to_biguint(&num) / &pb));
        let den_q = ring.from_biguint(&(ring.to_biguint(&den) / &pb));
        ztab.set(m, ring.mul(&num_q, &ring.inv(&den_q)?));
        cur -= 1;
    }
    Ok(IntegralSolve::Solved(Series::new(*f.ctx(), ring, ztab.base()).truncate_precision(cur)))
}

/// Outcome of a torsion-series construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TorsionOutcome {
    Integral,
    NonIntegral,
    Inconclusive,
}

impl TorsionOutcome {
    pub fn as_str(self) -> &'static str {
        match self {
            TorsionOutcome::Integral => "integral",
            TorsionOutcome::NonIntegral => "non-integral",
            TorsionOutcome::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TorsionCertificate {
    pub outcome: TorsionOutcome,
    /// z, reduced to the certified precision, when integral.
    pub series: Option<IntSeries>,
    /// Index m where z_m (a_1^m − a_1) = numerator has no integral solution.
    pub witness_index: Option<usize>,
    /// Valuation of the numerator at the witness index.
    pub witness_valuation: Option<i64>,
    /// z^{∘e} = x (and z commutes with u, when given) at the certified precision.
    pub verified_order: bool,
    /// Absolute precision the series is certified to.
    pub precision: u32,
    pub order: usize,
    pub torsion_order: u64,
}

/// Builds the torsion series z with z'(0) = ζ_e commuting with f, entirely in
/// Z/p^N, and certifies its integrality or produces a witness that no
/// integral solution exists.
///
/// Each step divides by a_1^m − a_1, which has valuation exactly 1, so the
/// coefficient z_m is known mod p^(N−m+1). The budget N ≥ K + `out_prec`
/// keeps at least `out_prec` + 1 digits at the end.
pub fn torsion_check(f: &IntSeries, u: Option<&IntSeries>, out_prec: u32) -> Result<TorsionCertificate> {
    let ctx = *f.ctx();
    let p = ctx.p();
    let k = f.order();
    match weierstrass_degree(f)? {
        WeierstrassDegree::Finite(d) if d as u64 == p => {}
        other => {
            return Err(Error::Precondition(format!("f is not minimal: wideg(f) = {}, expected {p}", fmt_wideg(other))))
        }
    }
    let ring = f.ring().clone();
    let a1 = f.linear();
    if ring.valuation(&a1) != Valuation::Finite(1) {
        return Err(Error::Precondition("f is not minimal: v_p(f'(0)) != 1".into()));
    }
    if let Some(u) = u {
        let report = validate_minimal_pair(f, u)?;
        if !report.is_minimal {
            return Err(Error::Precondition(format!("(f, u) is not a minimal pair: {}", report.failures().join("; "))));
        }
    }
    let n = ring.precision();
    let needed = k as u32 + out_prec;
    if n < needed {
        return Err(Error::PrecisionBudget { needed, have: n });
    }

    let e = ctx.torsion_order();
    let (z, cur) = match solve_integral_commutant(f, zeta_e_in(&ring))? {
        IntegralSolve::Solved(z) => {
            let cur = z.precision();
            (z, cur)
        }
        IntegralSolve::Witness { index, precision } => {
            return Ok(TorsionCertificate {
                outcome: TorsionOutcome::NonIntegral,
                series: None,
                witness_index: Some(index),
                witness_valuation: Some(0),
                verified_order: false,
                precision,
                order: k,
                torsion_order: e,
            })
        }
    };
    let mut verified = z.iterate(e)?.is_identity();
    let fz = f.truncate_precision(cur);
    verified &= z.compose(&fz)?.agrees_with(&fz.compose(&z)?)?;
    if let Some(u) = u {
        let uz = u.truncate_precision(cur);
        verified &= z.compose(&uz)?.agrees_with(&uz.compose(&z)?)?;
    }
    Ok(TorsionCertificate {
        outcome: if verified { TorsionOutcome::Integral } else { TorsionOutcome::Inconclusive },
        series: Some(z),
        witness_index: None,
        witness_valuation: None,
        verified_order: verified,
        precision: cur,
        order: k,
        torsion_order: e,
    })
}

fn fmt_wideg(w: WeierstrassDegree) -> String {
    match w {
        WeierstrassDegree::Finite(d) => d.to_string(),
        WeierstrassDegree::Undetermined { at_least } => format!(">= {at_least}"),
    }
}

/// z = L_f^{∘−1}(ζ·L_f), the torsion series computed through the
/// linearization instead of the integral recursion.
pub fn torsion_via_linearization(f: &FloatSeries, zeta: &PadicNumber) -> Result<FloatSeries> {
    let l = linearize(f)?.series;
    let linv = l.comp_inverse()?;
    linv.compose(&l.scale(zeta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::{zeta_e, PrimeContext};
    use num_bigint::BigInt;

    fn gm(a: i64, p: u64, n: u32, k: usize) -> IntSeries {
        let ctx = PrimeContext::new(p, n, k).unwrap();
        let mut c = Vec::new();
        let mut b = BigInt::from(1);
        for i in 1..=k as i64 {
            b = b * (a - i + 1) / i;
            c.push(b.clone());
        }
        IntSeries::from_bigints(ctx, &c)
    }

    fn geometric(ctx: PrimeContext) -> IntSeries {
        let c: Vec<i64> = (1..=ctx.order()).map(|i| if i % 2 == 0 { 1 } else { -1 }).collect();
        Series::from_i64s(ctx, ctx.integral_ring(), &c)
    }

    #[test]
    fn log_series_is_the_linearization_of_the_cube_map() {
        let f = gm(3, 3, 20, 10).to_float();
        let l = linearize(&f).unwrap();
        let field = f.ring().clone();
        for i in 1..=10i64 {
            let sign = if i % 2 == 1 { 1 } else { -1 };
            let expect = field.from_rational(&BigInt::from(sign), &BigInt::from(i)).unwrap();
            let diff = field.sub(&l.series.coeff(i as usize), &expect);
            assert!(diff.valuation().is_none_or(|v| v >= 10), "coefficient {i}: {diff:?}");
        }
        assert_eq!(l.min_valuation_profile[2], -1);
    }

    #[test]
    fn degenerate_linear_map() {
        let ctx = PrimeContext::new(3, 10, 6).unwrap();
        let f = Series::from_i64s(ctx, ctx.float_field(), &[3]);
        let l = linearize(&f).unwrap();
        assert!(l.series.is_identity());
        assert!(linearize(&Series::from_i64s(ctx, ctx.float_field(), &[1, 1])).is_err());
    }

    #[test]
    fn commutant_trivial_cases() {
        let f = gm(3, 3, 24, 8).to_float();
        let field = f.ring().clone();
        assert!(commutant(&f, &field.one()).unwrap().is_identity());
        assert!(commutant(&f, &field.from_i64(3)).unwrap().agrees_with(&f).unwrap());
        let inv = commutant(&f, &field.from_i64(-1)).unwrap();
        let expect = geometric(*f.ctx()).to_float();
        assert!(inv.agrees_with(&expect).unwrap());
    }

    #[test]
    fn torsion_p2_seed_and_series() {
        let ctx = PrimeContext::new(2, 40, 24).unwrap();
        let f = Series::from_i64s(ctx, ctx.integral_ring(), &[2, 1]);
        let u = gm(5, 2, 40, 24);
        let cert = torsion_check(&f, Some(&u), 8).unwrap();
        assert_eq!(cert.outcome, TorsionOutcome::Integral);
        assert!(cert.verified_order);
        assert_eq!(cert.precision, 40 - 23);
        let z = cert.series.unwrap();
        assert_eq!(z.coeff(2), z.ring().one());
        assert_eq!(z, geometric(ctx).truncate_precision(cert.precision));
    }

    #[test]
    fn torsion_p3_gm() {
        let f = gm(3, 3, 30, 16);
        let u = gm(4, 3, 30, 16);
        let cert = torsion_check(&f, Some(&u), 8).unwrap();
        assert_eq!(cert.outcome, TorsionOutcome::Integral);
        assert_eq!(cert.series.unwrap(), geometric(*f.ctx()).truncate_precision(cert.precision));
    }

    #[test]
    fn torsion_witness_for_non_commuting_shape() {
        let ctx = PrimeContext::new(3, 30, 12).unwrap();
        let f = Series::from_i64s(ctx, ctx.integral_ring(), &[3, 0, 1, 1]);
        let cert = torsion_check(&f, None, 8).unwrap();
        assert_eq!(cert.outcome, TorsionOutcome::NonIntegral);
        assert_eq!(cert.witness_index, Some(4));
    }

    #[test]
    fn torsion_preconditions() {
        let ctx = PrimeContext::new(3, 30, 12).unwrap();
        let f = Series::from_i64s(ctx, ctx.integral_ring(), &[3, 1]);
        assert!(matches!(torsion_check(&f, None, 8), Err(Error::Precondition(_))));
        let f = gm(3, 3, 12, 12);
        assert_eq!(torsion_check(&f, None, 8), Err(Error::PrecisionBudget { needed: 20, have: 12 }));
    }

    #[test]
    fn linearization_cross_check() {
        let ctx = PrimeContext::new(3, 30, 8).unwrap();
        let f = gm(3, 3, 30, 8);
        let z = torsion_via_linearization(&f.to_float(), &zeta_e(&ctx)).unwrap();
        let cert = torsion_check(&f.with_order(8).unwrap(), None, 8).unwrap();
        let zi = z.to_integral().unwrap();
        let prec = zi.precision().min(cert.precision);
        assert!(prec >= 8);
        assert_eq!(zi.truncate_precision(prec), cert.series.unwrap().truncate_precision(prec));
    }
}
