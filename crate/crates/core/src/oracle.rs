//! Ground-truth generators and minimal-pair validation.
//!
//! The multiplicative formal group supplies closed forms: its endomorphisms
//! are (1+x)^a − 1. Lubin–Tate endomorphisms, conjugation by random
//! invertible series and non-commuting perturbations give further pairs with
//! known answers. Randomness is always drawn from a seeded ChaCha stream.

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::lubin::{solve_integral_commutant, IntegralSolve};
use crate::newton::{weierstrass_degree, WeierstrassDegree};
use crate::padic::{vp_factorial, IntegralRing, PadicField, PadicNumber, PrimeContext};
use crate::ring::{CoeffRing, Valuation};
use crate::series::{IntSeries, Series};

/// (1+x)^a − 1 for a ∈ Z_p, from generalized binomial coefficients computed
/// with v_p(K!) guard digits and checked to be integral.
pub fn gm_endomorphism(ctx: &PrimeContext, a: &PadicNumber) -> Result<IntSeries> {
    if !a.is_integral() {
        return Err(Error::Precondition("exponent must be a p-adic integer".into()));
    }
    let k = ctx.order();
    let n = ctx.precision();
    let guard = vp_factorial(k as u64, ctx.p()) as u32 + n;
    let field = PadicField::new(ctx.p(), guard);
    let mut binom = field.one();
    let mut coeffs = Vec::with_capacity(k);
    for i in 1..=k as i64 {
        let top = field.sub(a, &field.from_i64(i - 1));
        binom = field.div(&field.mul(&binom, &top), &field.from_i64(i))?;
        if !binom.is_integral() {
            return Err(Error::PrecisionExhausted(format!("binomial coefficient {i} came out non-integral")));
        }
        coeffs.push(binom.clone());
    }
    let floats = Series::new(ctx.with_precision(guard)?, field, coeffs);
    let ints = floats.to_integral()?;
    let ring = IntegralRing::new(ctx.p(), ints.precision().min(n));
    let coeffs = ints.coeffs().iter().map(|c| ring.lift(c)).collect();
    Ok(Series::new(*ctx, ring, coeffs))
}

/// (1+x)^a − 1 for an integer exponent.
pub fn gm_int(ctx: &PrimeContext, a: i64) -> Result<IntSeries> {
    let guard = vp_factorial(ctx.order() as u64, ctx.p()) as u32 + ctx.precision();
    gm_endomorphism(ctx, &PadicField::new(ctx.p(), guard).from_i64(a))
}

/// Checks f ≡ f'(0)x mod x², f ≡ x^p mod p and v_p(f'(0)) = 1.
fn check_lubin_tate_shape(f: &IntSeries) -> Result<()> {
    let p = f.ctx().p() as usize;
    let ring = f.ring();
    if ring.valuation(&f.linear()) != Valuation::Finite(1) {
        return Err(Error::Precondition("not a Lubin–Tate series: v_p(f'(0)) != 1".into()));
    }
    if p > f.order() {
        return Err(Error::Precondition(format!("truncation order {} below p = {p}", f.order())));
    }
    let bar = f.reduce_mod_p()?;
    let shape_ok = bar.coeffs().iter().enumerate().all(|(i, c)| *c == u64::from(i + 1 == p));
    if !shape_ok {
        return Err(Error::Precondition("not a Lubin–Tate series: f is not x^p mod p".into()));
    }
    Ok(())
}

/// [a]_f for a Lubin–Tate series f: the series with linear coefficient `a`
/// commuting with f. All divisions in the recursion are exact.
pub fn lubin_tate_endo(f: &IntSeries, a: &PadicNumber) -> Result<IntSeries> {
    check_lubin_tate_shape(f)?;
    if !a.is_integral() {
        return Err(Error::Precondition("a must be a p-adic integer".into()));
    }
    let ring = f.ring().clone();
    let field = PadicField::new(ring.prime(), ring.precision());
    let a_int = field.to_integer(a).unwrap_or_default();
    let a_zn = ring.from_biguint(&a_int);
    if ring.is_zero(&a_zn) {
        return Err(Error::Precondition("a must be nonzero mod p^N".into()));
    }
    match solve_integral_commutant(f, a_zn)? {
        IntegralSolve::Solved(z) => Ok(z),
        IntegralSolve::Witness { index, .. } => Err(Error::PrecisionExhausted(format!(
            "Lubin–Tate recursion failed to divide at x^{index}"
        ))),
    }
}

/// (h∘f∘h⁻¹, h∘u∘h⁻¹), validated to still be a minimal pair.
pub fn conjugate_pair(f: &IntSeries, u: &IntSeries, h: &IntSeries) -> Result<(IntSeries, IntSeries)> {
    let ring = h.ring();
    let h1 = h.linear();
    if !ring.is_unit(&h1) {
        return Err(Error::NonUnitLinear);
    }
    if ring.residue(&h1) != Some(1) {
        return Err(Error::Precondition("conjugator must satisfy h'(0) ≡ 1 mod p".into()));
    }
    let hinv = h.comp_inverse()?;
    let f2 = h.compose(&f.compose(&hinv)?)?;
    let u2 = h.compose(&u.compose(&hinv)?)?;
    let report = validate_minimal_pair(&f2, &u2)?;
    if !report.is_minimal {
        return Err(Error::Precondition(format!(
            "conjugated pair is not minimal: {}",
            report.failures().join("; ")
        )));
    }
    Ok((f2, u2))
}

/// Everything [`validate_minimal_pair`] measures.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinimalPairReport {
    /// `None` when no unit coefficient appears through x^K.
    pub wideg_f: Option<usize>,
    /// v_p(f'(0)); `None` when f'(0) vanishes to precision.
    pub v_f_prime: Option<i64>,
    /// v_p(u'(0) − 1); `None` when u'(0) ≡ 1 to precision.
    pub v_u_shift: Option<i64>,
    pub u_invertible: bool,
    /// u'(0) is certified not to be a root of unity.
    pub u_nontorsion: bool,
    pub commutes: bool,
    /// f∘u − u∘f was compared mod (p^a, x^b); this is (a, b).
    pub residual_modulus: (u32, usize),
    /// Lower bound on the valuation of f∘u − u∘f.
    pub residual_valuation: i64,
    pub delta: u32,
    pub p: u64,
    pub is_minimal: bool,
}

impl MinimalPairReport {
    /// Human-readable list of the conditions that fail.
    pub fn failures(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.wideg_f != Some(self.p as usize) {
            out.push(format!("wideg(f) = {:?}, expected {}", self.wideg_f, self.p));
        }
        if self.v_f_prime != Some(1) {
            out.push(format!("v_p(f'(0)) = {:?}, expected 1", self.v_f_prime));
        }
        if !self.u_invertible {
            out.push("u'(0) is not a unit".into());
        }
        if self.v_u_shift != Some(self.delta as i64) {
            out.push(format!("v_p(u'(0) - 1) = {:?}, expected {}", self.v_u_shift, self.delta));
        }
        if !self.u_nontorsion {
            out.push("u is not certified nontorsion".into());
        }
        if !self.commutes {
            out.push(format!(
                "f∘u != u∘f mod (p^{}, x^{}) (residual valuation {})",
                self.residual_modulus.0, self.residual_modulus.1, self.residual_valuation
            ));
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        let opt = |v: Option<i64>| v.map(serde_json::Value::from).unwrap_or_else(|| "inf".into());
        serde_json::json!({
            "wideg_f": self.wideg_f.map(serde_json::Value::from).unwrap_or_else(|| "undetermined".into()),
            "v_f_prime": opt(self.v_f_prime),
            "v_u_shift": opt(self.v_u_shift),
            "u_invertible": self.u_invertible,
            "u_nontorsion": self.u_nontorsion,
            "commutes": self.commutes,
            "residual_modulus": {"p_power": self.residual_modulus.0, "x_power": self.residual_modulus.1},
            "is_minimal": self.is_minimal,
            "failures": self.failures(),
        })
    }
}

pub fn validate_minimal_pair(f: &IntSeries, u: &IntSeries) -> Result<MinimalPairReport> {
    let ctx = f.ctx();
    let p = ctx.p();
    let delta = ctx.delta();
    let wideg_f = weierstrass_degree(f)?;
    let ring = f.ring();
    let v_f_prime = ring.valuation(&f.linear()).finite();
    let uring = u.ring();
    let u1 = u.linear();
    let u_invertible = uring.is_unit(&u1);
    let v_u_shift = uring.valuation(&uring.sub(&u1, &uring.one())).finite();
    // torsion units of Z_p satisfy ζ^e = 1
    let u_nontorsion =
        u_invertible && uring.valuation(&uring.sub(&uring.pow(&u1, ctx.torsion_order()), &uring.one())).finite().is_some();
    let residual = f.compose(u)?.sub(&u.compose(f)?)?;
    let residual_ring_prec = residual.ring().precision();
    let commutes = residual.is_zero();
    let residual_valuation = residual
        .valuations()
        .into_iter()
        .map(Valuation::lower_bound)
        .min()
        .unwrap_or(residual_ring_prec as i64);
    let wideg = match wideg_f {
        WeierstrassDegree::Finite(d) => Some(d),
        WeierstrassDegree::Undetermined { .. } => None,
    };
    let is_minimal = wideg == Some(p as usize)
        && v_f_prime == Some(1)
        && u_invertible
        && v_u_shift == Some(delta as i64)
        && u_nontorsion
        && commutes;
    Ok(MinimalPairReport {
        wideg_f: wideg,
        v_f_prime,
        v_u_shift,
        u_invertible,
        u_nontorsion,
        commutes,
        residual_modulus: (residual_ring_prec, f.order().min(u.order()) + 1),
        residual_valuation,
        delta,
        p,
        is_minimal,
    })
}

/// How a pair was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairKind {
    Gm,
    Lt,
    Conjugated,
}

impl PairKind {
    pub fn as_str(self) -> &'static str {
        match self {
            PairKind::Gm => "gm",
            PairKind::Lt => "lt",
            PairKind::Conjugated => "conjugated",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "gm" => Ok(PairKind::Gm),
            "lt" => Ok(PairKind::Lt),
            "conjugated" => Ok(PairKind::Conjugated),
            other => Err(Error::Parse(format!("unknown pair kind {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairBundle {
    pub f: IntSeries,
    pub u: IntSeries,
    pub kind: PairKind,
    pub seed: Option<u64>,
}

/// The multiplicative-group pair f = (1+x)^p − 1, u = (1+x)^(1+p^δ) − 1.
pub fn gm_pair(ctx: &PrimeContext) -> Result<PairBundle> {
    let p = ctx.p() as i64;
    let f = gm_int(ctx, p)?;
    let u = gm_int(ctx, 1 + p.pow(ctx.delta()))?;
    Ok(PairBundle { f, u, kind: PairKind::Gm, seed: None })
}

/// The Lubin–Tate pair f = px + x^p, u = [1+p^δ]_f.
///
/// The recursion loses one digit per coefficient, so u is known to
/// precision N − K + 1.
pub fn lt_pair(ctx: &PrimeContext) -> Result<PairBundle> {
    let p = ctx.p();
    if p as usize > ctx.order() {
        return Err(Error::Precondition(format!("truncation order {} below p = {p}", ctx.order())));
    }
    let ring = ctx.integral_ring();
    let f = Series::new(*ctx, ring.clone(), {
        let mut c = vec![ring.zero(); ctx.order()];
        c[0] = ring.from_u64(p);
        c[p as usize - 1] = ring.add(&c[p as usize - 1], &ring.one());
        c
    });
    let a = ctx.float_field().from_bigint(&(BigInt::from(1) + BigInt::from(p).pow(ctx.delta())));
    let u = lubin_tate_endo(&f, &a)?;
    let f = f.truncate_precision(u.precision());
    Ok(PairBundle { f, u, kind: PairKind::Lt, seed: None })
}

/// h = x + c_2 x^2 + ... + c_d x^d with c_i uniform in Z/p^N.
pub fn random_conjugator(ctx: &PrimeContext, rng: &mut ChaCha8Rng, degree: usize) -> IntSeries {
    let ring = ctx.integral_ring();
    let modulus = ring.modulus();
    let mut c = vec![ring.one()];
    for _ in 2..=degree.min(ctx.order()) {
        c.push(ring.from_biguint(&random_below(rng, &modulus)));
    }
    Series::new(*ctx, ring, c)
}

fn random_below(rng: &mut ChaCha8Rng, m: &num_bigint::BigUint) -> num_bigint::BigUint {
    let bytes = (m.bits() as usize).div_ceil(8) + 8;
    let buf: Vec<u8> = (0..bytes).map(|_| rng.gen()).collect();
    num_bigint::BigUint::from_bytes_le(&buf) % m
}

/// A Gm minimal pair conjugated by a random cubic conjugator drawn from `seed`.
pub fn conjugated_pair(ctx: &PrimeContext, seed: u64) -> Result<PairBundle> {
    let base = gm_pair(ctx)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let h = random_conjugator(ctx, &mut rng, 3);
    let (f, u) = conjugate_pair(&base.f, &base.u, &h)?;
    Ok(PairBundle { f, u, kind: PairKind::Conjugated, seed: Some(seed) })
}

/// u + p·x²·r(x) with r a random polynomial of degree < 3 whose constant term
/// is a unit, so the perturbation is nonzero mod p^N.
pub fn perturb(u: &IntSeries, seed: u64) -> Result<IntSeries> {
    let ctx = u.ctx();
    let ring = u.ring().clone();
    let p = ctx.p();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut r = Vec::new();
    let r0 = rng.gen_range(1..p.max(2)) + p * rng.gen_range(0..1000);
    r.push(ring.from_u64(r0));
    for _ in 1..3 {
        r.push(ring.from_u64(rng.gen_range(0..1000)));
    }
    let mut c = vec![ring.zero(); ctx.order()];
    for (i, ri) in r.iter().enumerate() {
        if i + 2 <= ctx.order() {
            c[i + 1] = ring.mul(&ring.from_u64(p), ri);
        }
    }
    u.add(&Series::new(*ctx, ring, c))
}

impl PairBundle {
    pub fn generate(ctx: &PrimeContext, kind: PairKind, seed: Option<u64>) -> Result<Self> {
        match kind {
            PairKind::Gm => gm_pair(ctx),
            PairKind::Lt => lt_pair(ctx),
            PairKind::Conjugated => conjugated_pair(ctx, seed.unwrap_or(0)),
        }
    }
}
