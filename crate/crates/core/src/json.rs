//! JSON wire formats.
//!
//! Output objects use `serde_json::Value` maps, whose keys serialize in
//! sorted order. Input series accept, besides the full
//! `{"ctx", "ring", "coeffs"}` form, a few shorthands:
//!
//! * `{"coeffs": [...]}` with the ring defaulting to integral,
//! * `{"binom": a}` for (1+x)^a − 1,
//! * `{"iterate": S, "times": n}`, `{"compose": [S, T]}`, `{"sub_x": S}` for S − x,
//! * `{"reduce": S}` for the reduction mod p.
//!
//! Coefficients are integers (JSON numbers or decimal strings), rationals
//! `"num/den"`, or the p-adic object `{"v", "u", "prec"}`.

use num_bigint::{BigInt, BigUint};
use num_traits::Zero;
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::oracle::{gm_endomorphism, PairBundle};
use crate::padic::{IntegralRing, PadicField, PadicNumber, PrimeContext, ResidueField, ZnElem};
use crate::ring::{CoeffRing, RingKind};
use crate::series::{FloatSeries, IntSeries, ResSeries, Series};

fn parse_err(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

pub fn ctx_to_json(ctx: &PrimeContext) -> Value {
    json!({"p": ctx.p(), "N": ctx.precision(), "K": ctx.order()})
}

pub fn ctx_from_json(v: &Value) -> Result<PrimeContext> {
    let obj = v.as_object().ok_or_else(|| parse_err("context must be an object"))?;
    let get = |k: &str| {
        obj.get(k)
            .and_then(Value::as_u64)
            .ok_or_else(|| parse_err(format!("context field {k:?} must be a non-negative integer")))
    };
    let n = u32::try_from(get("N")?).map_err(|_| parse_err("N too large"))?;
    PrimeContext::new(get("p")?, n, get("K")? as usize)
}

pub fn padic_to_json(a: &PadicNumber) -> Value {
    match a {
        PadicNumber::Zero => json!({"v": "inf", "u": "0", "prec": "inf"}),
        PadicNumber::ZeroTo(k) => json!({"v": "inf", "u": "0", "prec": k}),
        PadicNumber::Value { valuation, unit, precision } => {
            json!({"v": valuation, "u": unit.to_string(), "prec": precision})
        }
    }
}

fn zn_to_json(ring: &IntegralRing, a: &ZnElem) -> Value {
    match ring.split_unit(a) {
        None => json!({"v": "inf", "u": "0", "prec": ring.precision()}),
        Some((v, r, w)) => json!({"v": v, "u": r.to_biguint(&w).to_string(), "prec": ring.precision()}),
    }
}

/// Coefficient (de)serialization for each ring.
pub trait WireRing: CoeffRing {
    fn elem_to_json(&self, a: &Self::Elem) -> Value;

    /// The N recorded in a serialized series' context.
    fn wire_precision(&self, ctx: &PrimeContext) -> u32 {
        ctx.precision()
    }
}

impl WireRing for IntegralRing {
    fn elem_to_json(&self, a: &ZnElem) -> Value {
        zn_to_json(self, a)
    }

    fn wire_precision(&self, _ctx: &PrimeContext) -> u32 {
        self.precision()
    }
}

impl WireRing for PadicField {
    fn elem_to_json(&self, a: &PadicNumber) -> Value {
        padic_to_json(a)
    }
}

impl WireRing for ResidueField {
    fn elem_to_json(&self, a: &u64) -> Value {
        json!(a)
    }
}

pub fn series_to_json<R: WireRing>(s: &Series<R>) -> Value {
    let ring = s.ring();
    let ctx = s.ctx();
    json!({
        "ctx": {"p": ctx.p(), "N": ring.wire_precision(ctx), "K": ctx.order()},
        "ring": R::KIND.as_str(),
        "coeffs": s.coeffs().iter().map(|c| ring.elem_to_json(c)).collect::<Vec<_>>(),
    })
}

fn parse_bigint(s: &str) -> Result<BigInt> {
    s.trim().parse::<BigInt>().map_err(|_| parse_err(format!("not an integer: {s:?}")))
}

/// An exact input value: an integer, a rational, or a p-adic object.
enum Scalar {
    Int(BigInt),
    Ratio(BigInt, BigInt),
    Padic { v: Option<i64>, u: BigUint, prec: Option<i64> },
}

fn parse_scalar(v: &Value) -> Result<Scalar> {
    match v {
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(Scalar::Int(i.into()))
            } else if let Some(u) = n.as_u64() {
                Ok(Scalar::Int(u.into()))
            } else {
                Err(parse_err(format!("not an integer: {n}; use a \"num/den\" string for rationals")))
            }
        }
        Value::String(s) => match s.split_once('/') {
            Some((a, b)) => {
                let den = parse_bigint(b)?;
                if den.is_zero() {
                    return Err(parse_err("zero denominator"));
                }
                Ok(Scalar::Ratio(parse_bigint(a)?, den))
            }
            None => Ok(Scalar::Int(parse_bigint(s)?)),
        },
        Value::Object(o) => {
            let field = |k: &str| o.get(k).ok_or_else(|| parse_err(format!("p-adic value lacks {k:?}")));
            let opt_int = |x: &Value, k: &str| -> Result<Option<i64>> {
                match x {
                    Value::String(s) if s == "inf" => Ok(None),
                    _ => x.as_i64().map(Some).ok_or_else(|| parse_err(format!("{k:?} must be an integer or \"inf\""))),
                }
            };
            let v = opt_int(field("v")?, "v")?;
            let prec = opt_int(field("prec")?, "prec")?;
            let u = match field("u")? {
                Value::String(s) => s.trim().parse::<BigUint>().map_err(|_| parse_err(format!("bad unit {s:?}")))?,
                Value::Number(n) => n.as_u64().map(BigUint::from).ok_or_else(|| parse_err("bad unit"))?,
                _ => return Err(parse_err("unit must be a decimal string")),
            };
            Ok(Scalar::Padic { v, u, prec })
        }
        other => Err(parse_err(format!("expected a number, string or p-adic object, got {other}"))),
    }
}

/// Parses a p-adic scalar into `field`.
pub fn padic_from_json(field: &PadicField, v: &Value) -> Result<PadicNumber> {
    let p = field.prime();
    match parse_scalar(v)? {
        Scalar::Int(n) => Ok(field.from_bigint(&n)),
        Scalar::Ratio(a, b) => field.from_rational(&a, &b),
        Scalar::Padic { v: None, prec: None, .. } => Ok(PadicNumber::Zero),
        Scalar::Padic { v: None, prec: Some(k), .. } => Ok(PadicNumber::ZeroTo(k)),
        Scalar::Padic { v: Some(_), prec: None, .. } => Err(parse_err("a nonzero value needs a finite precision")),
        Scalar::Padic { v: Some(v), u, prec: Some(prec) } => {
            if (&u % p).is_zero() {
                return Err(parse_err("unit part is divisible by p"));
            }
            if prec <= v {
                return Err(parse_err("precision must exceed valuation"));
            }
            let unit = field.truncate(&field.from_bigint(&BigInt::from(u)), prec - v);
            Ok(field.shift(&unit, v))
        }
    }
}

fn zn_from_json(ring: &IntegralRing, v: &Value) -> Result<ZnElem> {
    match parse_scalar(v)? {
        Scalar::Int(n) => Ok(ring.from_bigint(&n)),
        Scalar::Ratio(a, b) => {
            let den = ring.from_bigint(&b);
            let inv = ring.inv(&den).map_err(|_| parse_err("denominator is not a p-adic unit"))?;
            Ok(ring.mul(&ring.from_bigint(&a), &inv))
        }
        Scalar::Padic { v: None, .. } => Ok(ring.zero()),
        Scalar::Padic { v: Some(v), u, .. } => {
            let v = u32::try_from(v).map_err(|_| parse_err("negative valuation in an integral coefficient"))?;
            Ok(ring.from_biguint(&(u * BigUint::from(ring.prime()).pow(v))))
        }
    }
}

fn res_from_json(p: u64, v: &Value) -> Result<u64> {
    match parse_scalar(v)? {
        Scalar::Int(n) => {
            let m = BigInt::from(p);
            let r = ((n % &m) + &m) % &m;
            Ok(u64::try_from(r).unwrap_or(0))
        }
        _ => Err(parse_err("residue coefficients must be integers")),
    }
}

/// A parsed series in whichever ring its JSON named.
#[derive(Debug, Clone, PartialEq)]
pub enum AnySeries {
    Int(IntSeries),
    Float(FloatSeries),
    Res(ResSeries),
}

impl AnySeries {
    pub fn kind(&self) -> RingKind {
        match self {
            AnySeries::Int(_) => RingKind::Integral,
            AnySeries::Float(_) => RingKind::Float,
            AnySeries::Res(_) => RingKind::Residue,
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            AnySeries::Int(s) => series_to_json(s),
            AnySeries::Float(s) => series_to_json(s),
            AnySeries::Res(s) => series_to_json(s),
        }
    }

    /// Integral view; residue series are lifted by their [0, p) representatives.
    pub fn into_int(self) -> Result<IntSeries> {
        match self {
            AnySeries::Int(s) => Ok(s),
            AnySeries::Float(s) => s.to_integral(),
            AnySeries::Res(s) => Ok(s.lift()),
        }
    }

    pub fn into_float(self) -> Result<FloatSeries> {
        match self {
            AnySeries::Int(s) => Ok(s.to_float()),
            AnySeries::Float(s) => Ok(s),
            AnySeries::Res(s) => Ok(s.lift().to_float()),
        }
    }

    pub fn into_res(self) -> Result<ResSeries> {
        match self {
            AnySeries::Int(s) => s.reduce_mod_p(),
            AnySeries::Float(s) => s.reduce_mod_p(),
            AnySeries::Res(s) => Ok(s),
        }
    }
}

fn get_int(o: &Map<String, Value>, key: &str) -> Result<u64> {
    o.get(key)
        .and_then(Value::as_u64)
        .ok_or_else(|| parse_err(format!("{key:?} must be a non-negative integer")))
}

/// Parses a series in context `ctx`. An embedded `"ctx"` must agree with
/// it on p and reach at least x^K; a larger embedded K is truncated.
pub fn series_from_json(ctx: &PrimeContext, v: &Value) -> Result<AnySeries> {
    let o = v.as_object().ok_or_else(|| parse_err("a series must be a JSON object"))?;
    if let Some(a) = o.get("binom") {
        let field = PadicField::new(ctx.p(), ctx.precision() + 64);
        let a = padic_from_json(&field, a)?;
        return Ok(AnySeries::Int(gm_endomorphism(ctx, &a)?));
    }
    if let Some(inner) = o.get("iterate") {
        let times = get_int(o, "times")?;
        return Ok(match series_from_json(ctx, inner)? {
            AnySeries::Int(s) => AnySeries::Int(s.iterate(times)?),
            AnySeries::Float(s) => AnySeries::Float(s.iterate(times)?),
            AnySeries::Res(s) => AnySeries::Res(s.iterate(times)?),
        });
    }
    if let Some(inner) = o.get("sub_x") {
        return Ok(match series_from_json(ctx, inner)? {
            AnySeries::Int(s) => AnySeries::Int(s.minus_identity()),
            AnySeries::Float(s) => AnySeries::Float(s.minus_identity()),
            AnySeries::Res(s) => AnySeries::Res(s.minus_identity()),
        });
    }
    if let Some(inner) = o.get("reduce") {
        return Ok(AnySeries::Res(series_from_json(ctx, inner)?.into_res()?));
    }
    if let Some(pair) = o.get("compose") {
        let arr = pair.as_array().filter(|a| a.len() == 2).ok_or_else(|| parse_err("\"compose\" takes [outer, inner]"))?;
        let outer = series_from_json(ctx, &arr[0])?;
        let inner = series_from_json(ctx, &arr[1])?;
        return Ok(match (outer, inner) {
            (AnySeries::Int(a), AnySeries::Int(b)) => AnySeries::Int(a.compose(&b)?),
            (AnySeries::Float(a), b) => AnySeries::Float(a.compose(&b.into_float()?)?),
            (a, AnySeries::Float(b)) => AnySeries::Float(a.into_float()?.compose(&b)?),
            (AnySeries::Res(a), b) => AnySeries::Res(a.compose(&b.into_res()?)?),
            (a, AnySeries::Res(b)) => AnySeries::Res(a.into_res()?.compose(&b)?),
        });
    }
    let coeffs = o
        .get("coeffs")
        .and_then(Value::as_array)
        .ok_or_else(|| parse_err("series needs \"coeffs\", \"binom\", \"iterate\", \"compose\", \"sub_x\" or \"reduce\""))?;
    let mut ctx = *ctx;
    if let Some(c) = o.get("ctx") {
        let embedded = ctx_from_json(c)?;
        if embedded.p() != ctx.p() {
            return Err(Error::RingMismatch(format!("series over p = {} used with p = {}", embedded.p(), ctx.p())));
        }
        if embedded.order() < ctx.order() {
            return Err(Error::Parse(format!(
                "series is only known mod x^{} but K = {}",
                embedded.order() + 1,
                ctx.order()
            )));
        }
        ctx = ctx.with_precision(ctx.precision().min(embedded.precision()))?;
    }
    if coeffs.len() > ctx.order() && coeffs[ctx.order()..].iter().any(|c| !is_zero_literal(c)) && o.get("ctx").is_none() {
        return Err(parse_err(format!("{} coefficients given but K = {}", coeffs.len(), ctx.order())));
    }
    let ring = o.get("ring").map(|r| r.as_str().unwrap_or("")).unwrap_or("integral");
    let take = coeffs.len().min(ctx.order());
    Ok(match ring {
        "integral" => {
            let r = ctx.integral_ring();
            let c = coeffs[..take].iter().map(|x| zn_from_json(&r, x)).collect::<Result<Vec<_>>>()?;
            AnySeries::Int(Series::new(ctx, r, c))
        }
        "float" => {
            let f = ctx.float_field();
            let c = coeffs[..take].iter().map(|x| padic_from_json(&f, x)).collect::<Result<Vec<_>>>()?;
            AnySeries::Float(Series::new(ctx, f, c))
        }
        "residue" => {
            let c = coeffs[..take].iter().map(|x| res_from_json(ctx.p(), x)).collect::<Result<Vec<_>>>()?;
            AnySeries::Res(Series::new(ctx, ctx.residue_field(), c))
        }
        other => return Err(parse_err(format!("unknown ring {other:?}"))),
    })
}

fn is_zero_literal(v: &Value) -> bool {
    match v {
        Value::Number(n) => n.as_i64() == Some(0),
        Value::String(s) => s.trim() == "0",
        _ => false,
    }
}

pub fn pair_to_json(b: &PairBundle) -> Value {
    let mut prov = Map::new();
    prov.insert("kind".into(), b.kind.as_str().into());
    if let Some(s) = b.seed {
        prov.insert("seed".into(), s.into());
    }
    json!({"f": series_to_json(&b.f), "u": series_to_json(&b.u), "provenance": prov})
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> PrimeContext {
        PrimeContext::new(3, 10, 6).unwrap()
    }

    #[test]
    fn padic_round_trip() {
        let f = PadicField::new(3, 10);
        for a in [f.from_i64(18), f.from_i64(-1), PadicNumber::Zero, PadicNumber::ZeroTo(4)] {
            let v = padic_to_json(&a);
            assert_eq!(padic_from_json(&f, &v).unwrap(), a, "{v}");
        }
        let third = f.from_rational(&1.into(), &3.into()).unwrap();
        assert_eq!(padic_to_json(&third)["v"], json!(-1));
        assert_eq!(padic_from_json(&f, &json!("1/3")).unwrap(), third);
    }

    #[test]
    fn series_round_trip_all_rings() {
        let c = ctx();
        let s = series_from_json(&c, &json!({"coeffs": [3, -1, "1/2", 0, 9]})).unwrap();
        assert_eq!(series_from_json(&c, &s.to_json()).unwrap(), s);
        let f = series_from_json(&c, &json!({"ring": "float", "coeffs": ["1/3", 2]})).unwrap();
        assert_eq!(series_from_json(&c, &f.to_json()).unwrap(), f);
        let r = series_from_json(&c, &json!({"ring": "residue", "coeffs": [1, 5, -1]})).unwrap();
        assert_eq!(r, AnySeries::Res(Series::from_u64s(c, &[1, 2, 2])));
        assert_eq!(series_from_json(&c, &r.to_json()).unwrap(), r);
    }

    #[test]
    fn shorthands() {
        let c = ctx();
        let b = series_from_json(&c, &json!({"binom": 4})).unwrap().into_int().unwrap();
        assert_eq!(b, Series::from_i64s(c, c.integral_ring(), &[4, 6, 4, 1]));
        let it = series_from_json(&c, &json!({"sub_x": {"iterate": {"binom": 2}, "times": 2}})).unwrap();
        assert_eq!(it.into_int().unwrap(), Series::from_i64s(c, c.integral_ring(), &[3, 6, 4, 1]));
        let red = series_from_json(&c, &json!({"reduce": {"binom": 4}})).unwrap();
        assert_eq!(red.kind(), RingKind::Residue);
        let comp = series_from_json(&c, &json!({"compose": [{"binom": 2}, {"binom": 2}]})).unwrap();
        assert_eq!(comp.into_int().unwrap(), Series::from_i64s(c, c.integral_ring(), &[4, 6, 4, 1]));
    }

    #[test]
    fn malformed_inputs_are_parse_errors() {
        let c = ctx();
        for bad in [
            json!(3),
            json!({"coeffs": "x"}),
            json!({"coeffs": [1.5]}),
            json!({"coeffs": [1], "ring": "complex"}),
            json!({"coeffs": ["1/0"]}),
            json!({"coeffs": [1, 2, 3, 4, 5, 6, 7]}),
            json!({"iterate": {"binom": 2}}),
        ] {
            let e = series_from_json(&c, &bad).unwrap_err();
            assert!(e.is_input_error(), "{bad}: {e:?}");
        }
        let other_p = json!({"ctx": {"p": 5, "N": 10, "K": 6}, "coeffs": [1]});
        assert!(matches!(series_from_json(&c, &other_p), Err(Error::RingMismatch(_))));
    }

    #[test]
    fn ctx_json() {
        let c = ctx();
        assert_eq!(ctx_from_json(&ctx_to_json(&c)).unwrap(), c);
        assert_eq!(ctx_from_json(&json!({"p": 4, "N": 1, "K": 2})), Err(Error::NotPrime(4)));
        assert_eq!(serde_json::to_string(&ctx_to_json(&c)).unwrap(), r#"{"K":6,"N":10,"p":3}"#);
    }
}
