//! Invariant checks shared by the property suite and the acceptance run.

#![allow(dead_code)]

use num_bigint::BigInt;
use padyn::lubin::commutant;
use padyn::newton::wprep;
use padyn::{CoeffRing, FloatSeries, IntSeries, PrimeContext, Series};
use proptest::prelude::*;
use proptest::test_runner::TestCaseError;

pub const PRIMES: [u64; 4] = [2, 3, 5, 7];

/// (p, N, K, coefficient seeds) for small integral series.
pub fn small_int_params() -> impl Strategy<Value = (u64, u32, usize, Vec<i64>, Vec<i64>, Vec<i64>)> {
    (0..PRIMES.len(), 1u32..10, 2usize..10).prop_flat_map(|(pi, n, k)| {
        let coeffs = || prop::collection::vec(-500i64..500, k);
        (Just(PRIMES[pi]), Just(n), Just(k), coeffs(), coeffs(), coeffs())
    })
}

pub fn int_series(p: u64, n: u32, k: usize, c: &[i64]) -> IntSeries {
    let ctx = PrimeContext::new(p, n, k).unwrap();
    Series::from_i64s(ctx, ctx.integral_ring(), c)
}

fn check(cond: bool, what: &str) -> Result<(), TestCaseError> {
    if cond {
        Ok(())
    } else {
        Err(TestCaseError::fail(what.to_string()))
    }
}

fn lift<T>(r: padyn::Result<T>) -> Result<T, TestCaseError> {
    r.map_err(|e| TestCaseError::fail(e.to_string()))
}

/// (a∘b)∘c = a∘(b∘c) over Z/p^N.
pub fn composition_associativity(p: u64, n: u32, k: usize, a: &[i64], b: &[i64], c: &[i64]) -> Result<(), TestCaseError> {
    let (a, b, c) = (int_series(p, n, k, a), int_series(p, n, k, b), int_series(p, n, k, c));
    let left = lift(lift(a.compose(&b))?.compose(&c))?;
    let right = lift(a.compose(&lift(b.compose(&c))?))?;
    check(left == right, "composition is not associative")
}

/// f∘f⁻¹ = f⁻¹∘f = x whenever f'(0) is a unit.
pub fn inverse_round_trip(p: u64, n: u32, k: usize, c: &[i64]) -> Result<(), TestCaseError> {
    let mut c = c.to_vec();
    if c[0].rem_euclid(p as i64) == 0 {
        c[0] += 1;
    }
    let f = int_series(p, n, k, &c);
    let g = lift(f.comp_inverse())?;
    check(lift(f.compose(&g))?.is_identity(), "f∘f⁻¹ ≠ x")?;
    check(lift(g.compose(&f))?.is_identity(), "f⁻¹∘f ≠ x")?;
    check(lift(g.comp_inverse())? == f, "(f⁻¹)⁻¹ ≠ f")
}

/// For f = h∘(πx)∘h⁻¹ with v(π) = 1, [a]_f = h∘(ax)∘h⁻¹ and [a]_f∘[b]_f = [ab]_f.
pub fn commutant_uniqueness(p: u64, h: &[i64], pi_unit: i64, a: i64, b: i64) -> Result<(), TestCaseError> {
    let k = h.len();
    let ctx = PrimeContext::new(p, 3 * k as u32 + 8, k).unwrap();
    let field = ctx.float_field();
    let unit = |x: i64| if x.rem_euclid(p as i64) == 0 { x + 1 } else { x };
    let (pi, a, b) = (p as i64 * unit(pi_unit), unit(a), unit(b));
    let mut hc = h.to_vec();
    hc[0] = 1;
    let hs: FloatSeries = Series::from_i64s(ctx, field.clone(), &hc);
    let hinv = lift(hs.comp_inverse())?;
    let linear = |c: i64| -> FloatSeries { Series::from_i64s(ctx, field.clone(), &[c]) };
    let conj = |c: i64| lift(lift(hs.compose(&linear(c)))?.compose(&hinv));
    let f = conj(pi)?;
    let big = |x: i64| field.from_bigint(&BigInt::from(x));
    let za = lift(commutant(&f, &big(a)))?;
    let zb = lift(commutant(&f, &big(b)))?;
    let zab = lift(commutant(&f, &big(a * b)))?;
    check(lift(za.agrees_with(&conj(a)?))?, "[a]_f differs from the conjugated linear map")?;
    check(lift(lift(za.compose(&f))?.agrees_with(&lift(f.compose(&za))?))?, "[a]_f does not commute with f")?;
    check(lift(lift(za.compose(&zb))?.agrees_with(&zab))?, "[a]_f∘[b]_f ≠ [ab]_f")
}

/// g ≡ P·U, P monic of degree wideg(g), and wprep(P·U) returns the same factors.
pub fn wprep_residual_and_idempotence(p: u64, n: u32, k: usize, c: &[i64], d: usize) -> Result<(), TestCaseError> {
    let d = d.clamp(1, k / 2);
    let mut c = c.to_vec();
    for x in c.iter_mut().take(d - 1) {
        *x *= p as i64;
    }
    if c[d - 1].rem_euclid(p as i64) == 0 {
        c[d - 1] += 1;
    }
    let g = int_series(p, n, k, &c);
    let w = lift(wprep(&g))?;
    check(w.degree == d, "wrong Weierstrass degree")?;
    check(w.distinguished.coeff(d) == w.ring.one(), "P is not monic")?;
    check(w.distinguished.coeffs()[d..].iter().all(|x| w.ring.is_zero(x)), "deg P > wideg")?;
    check(w.product() == g, "g ≠ P·U")?;
    check(w.residual_precision.0 == n, "residual not zero to full precision")?;
    let again = lift(wprep(&w.product()))?;
    check(again.distinguished == w.distinguished && again.unit == w.unit, "wprep is not idempotent")
}

/// Reduction mod p commutes with +, · and ∘.
pub fn reduction_homomorphism(p: u64, n: u32, k: usize, a: &[i64], b: &[i64]) -> Result<(), TestCaseError> {
    let (a, b) = (int_series(p, n, k, a), int_series(p, n, k, b));
    let r = |s: &IntSeries| lift(s.reduce_mod_p());
    let (ra, rb) = (r(&a)?, r(&b)?);
    check(r(&lift(a.add(&b))?)? == lift(ra.add(&rb))?, "reduction is not additive")?;
    check(r(&lift(a.mul(&b))?)? == lift(ra.mul(&rb))?, "reduction is not multiplicative")?;
    check(r(&lift(a.compose(&b))?)? == lift(ra.compose(&rb))?, "reduction does not respect composition")
}

pub fn commutant_params() -> impl Strategy<Value = (u64, Vec<i64>, i64, i64, i64)> {
    (0..2usize, 2usize..6).prop_flat_map(|(pi, k)| {
        (Just([2u64, 3][pi]), prop::collection::vec(-20i64..20, k), -30i64..30, -30i64..30, -30i64..30)
    })
}

pub fn wprep_params() -> impl Strategy<Value = (u64, u32, usize, Vec<i64>, usize)> {
    (0..PRIMES.len(), 1u32..8, 2usize..12).prop_flat_map(|(pi, n, k)| {
        (Just(PRIMES[pi]), Just(n), Just(k), prop::collection::vec(-200i64..200, k), 1..=k / 2)
    })
}
