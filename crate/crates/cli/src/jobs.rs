//! Job specifications and their dispatch to the library.

use std::fmt::Write as _;
use std::path::PathBuf;

use padyn::json::{ctx_from_json, padic_from_json, pair_to_json, series_from_json, series_to_json, AnySeries};
use padyn::lubin::{commutant, linearize, torsion_check, TorsionOutcome, DEFAULT_OUTPUT_PRECISION};
use padyn::newton::{
    lambda_polygon_check, newton_polygon, render_ascii, root_valuations, weierstrass_degree, wprep, WeierstrassDegree,
};
use padyn::oracle::{validate_minimal_pair, PairBundle, PairKind};
use padyn::ramification::{g0_order, lower_ramification, normalizer_witness, nottingham_order, zp_iterate};
use padyn::{Error, PrimeContext, Result};
use serde_json::{json, Value};

pub const DEFAULT_N: u32 = 48;
pub const DEFAULT_K: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandKind {
    Polygon,
    Wprep,
    Wideg,
    Linearize,
    Commutant,
    TorsionCheck,
    Ramification,
    Order,
    Normalizer,
    LambdaCheck,
    GenPair,
    ValidatePair,
    ZpIterate,
}

impl CommandKind {
    pub const ALL: [CommandKind; 13] = [
        CommandKind::Polygon,
        CommandKind::Wprep,
        CommandKind::Wideg,
        CommandKind::Linearize,
        CommandKind::Commutant,
        CommandKind::TorsionCheck,
        CommandKind::Ramification,
        CommandKind::Order,
        CommandKind::Normalizer,
        CommandKind::LambdaCheck,
        CommandKind::GenPair,
        CommandKind::ValidatePair,
        CommandKind::ZpIterate,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CommandKind::Polygon => "polygon",
            CommandKind::Wprep => "wprep",
            CommandKind::Wideg => "wideg",
            CommandKind::Linearize => "linearize",
            CommandKind::Commutant => "commutant",
            CommandKind::TorsionCheck => "torsion-check",
            CommandKind::Ramification => "ramification",
            CommandKind::Order => "order",
            CommandKind::Normalizer => "normalizer",
            CommandKind::LambdaCheck => "lambda-check",
            CommandKind::GenPair => "gen-pair",
            CommandKind::ValidatePair => "validate-pair",
            CommandKind::ZpIterate => "zp-iterate",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| Error::Parse(format!("unknown command {s:?}")))
    }
}

/// One unit of work: a command, its context and its JSON inputs.
#[derive(Debug, Clone)]
pub struct JobSpec {
    pub command: CommandKind,
    pub ctx: PrimeContext,
    pub inputs: Value,
    pub seed: Option<u64>,
    pub output_path: Option<PathBuf>,
}

/// Context flags given on the command line; each overrides the input's "ctx".
#[derive(Debug, Clone, Copy, Default)]
pub struct CtxFlags {
    pub p: Option<u64>,
    pub n: Option<u32>,
    pub k: Option<usize>,
}

/// The context carried by an input object: its own "ctx", else that of the
/// first series-valued field.
pub fn embedded_ctx(inputs: &Value) -> Option<&Value> {
    inputs.get("ctx").or_else(|| {
        ["series", "f", "u", "omega", "theta"]
            .iter()
            .find_map(|k| inputs.get(*k).and_then(|s| s.get("ctx")))
    })
}

pub fn resolve_ctx(flags: CtxFlags, embedded: Option<&Value>) -> Result<PrimeContext> {
    let base = embedded.map(ctx_from_json).transpose()?;
    let p = flags
        .p
        .or(base.map(|c| c.p()))
        .ok_or_else(|| Error::Parse("no prime given: pass --p or a \"ctx\" object".into()))?;
    let n = flags.n.or(base.map(|c| c.precision())).unwrap_or(DEFAULT_N);
    let k = flags.k.or(base.map(|c| c.order())).unwrap_or(DEFAULT_K);
    PrimeContext::new(p, n, k)
}

impl JobSpec {
    /// Parses an entry of a `--jobs` file.
    pub fn from_json(v: &Value, flags: CtxFlags, seed: Option<u64>) -> Result<Self> {
        let o = v.as_object().ok_or_else(|| Error::Parse("each job must be an object".into()))?;
        let command = CommandKind::parse(
            o.get("command").and_then(Value::as_str).ok_or_else(|| Error::Parse("job lacks \"command\"".into()))?,
        )?;
        let inputs = o.get("inputs").cloned().unwrap_or_else(|| json!({}));
        let ctx_json = o.get("ctx").or_else(|| embedded_ctx(&inputs));
        let ctx = resolve_ctx(flags, ctx_json)?;
        let seed = o.get("seed").and_then(Value::as_u64).or(seed);
        let output_path = o.get("output_path").and_then(Value::as_str).map(PathBuf::from);
        Ok(JobSpec { command, ctx, inputs, seed, output_path })
    }
}

/// A computed report: the JSON payload and a human-readable rendering.
#[derive(Debug, Clone)]
pub struct Report {
    pub json: Value,
    pub text: String,
}

fn series_arg(job: &JobSpec, key: &str, whole_ok: bool) -> Result<AnySeries> {
    match job.inputs.get(key) {
        Some(v) => series_from_json(&job.ctx, v),
        None if whole_ok && job.inputs.is_object() => series_from_json(&job.ctx, &job.inputs)
            .map_err(|e| match e {
                Error::Parse(m) => Error::Parse(format!("missing {key:?} ({m})")),
                other => other,
            }),
        None => Err(Error::Parse(format!("missing input {key:?}"))),
    }
}

fn uint_arg(job: &JobSpec, key: &str, default: Option<u64>) -> Result<u64> {
    match job.inputs.get(key) {
        Some(v) => v.as_u64().ok_or_else(|| Error::Parse(format!("{key:?} must be a non-negative integer"))),
        None => default.ok_or_else(|| Error::Parse(format!("missing input {key:?}"))),
    }
}

fn u32_arg(job: &JobSpec, key: &str, default: Option<u64>) -> Result<u32> {
    u32::try_from(uint_arg(job, key, default)?).map_err(|_| Error::Parse(format!("{key:?} is too large")))
}

const POLYGON_CONVENTION: &str = "polygon of g itself: points (i, v_p(a_i)) for i >= 1";

pub fn run(job: &JobSpec) -> Result<Report> {
    let ctx = &job.ctx;
    match job.command {
        CommandKind::Polygon => {
            let g = series_arg(job, "series", true)?;
            let (full, neg, roots) = match g {
                AnySeries::Float(s) => (newton_polygon(&s)?, newton_polygon(&s)?.negative_part()?, root_valuations(&s)?),
                other => {
                    let s = other.into_int()?;
                    (newton_polygon(&s)?, newton_polygon(&s)?.negative_part()?, root_valuations(&s)?)
                }
            };
            let segments: Vec<Value> = neg
                .segments()
                .iter()
                .map(|s| json!({"slope": s.slope.to_string(), "length": s.length}))
                .collect();
            let mut json = neg.to_json();
            json["full"] = full.to_json();
            json["segments"] = Value::Array(segments);
            json["root_valuations"] = roots.to_json();
            json["convention"] = POLYGON_CONVENTION.into();
            let mut text = render_ascii(&neg);
            let verts: Vec<String> = neg.vertices().iter().map(|(i, v)| format!("({i}, {v})")).collect();
            let _ = writeln!(text, "vertices: {}", verts.join(" "));
            for (v, n) in &roots.entries {
                let _ = writeln!(text, "{n} root(s) of valuation {v}");
            }
            Ok(Report { json, text })
        }
        CommandKind::Wideg => {
            let g = series_arg(job, "series", true)?;
            let w = match g {
                AnySeries::Float(s) => weierstrass_degree(&s)?,
                AnySeries::Res(s) => weierstrass_degree(&s)?,
                AnySeries::Int(s) => weierstrass_degree(&s)?,
            };
            let (json, text) = match w {
                WeierstrassDegree::Finite(d) => (json!({"wideg": d}), d.to_string()),
                WeierstrassDegree::Undetermined { at_least } => (
                    json!({"wideg": "undetermined", "at_least": at_least}),
                    format!("undetermined (at least {at_least})"),
                ),
            };
            Ok(Report { json, text: text + "\n" })
        }
        CommandKind::Wprep => {
            let g = series_arg(job, "series", true)?.into_int()?;
            let w = wprep(&g)?;
            let ring = w.ring.clone();
            let unit: Vec<Value> = w.unit_signed().iter().map(|c| Value::String(c.to_string())).collect();
            let json = json!({
                "wideg": w.degree,
                "distinguished": series_to_json(&w.distinguished),
                "unit": {"coeffs_from_x0": unit, "N": ring.precision()},
                "residual_precision": {"p_power": w.residual_precision.0, "x_power": w.residual_precision.1},
            });
            let text = format!(
                "P = {}\nU = {} + ...\ng = P*U mod (p^{}, x^{})\n",
                w.distinguished,
                w.unit_signed().iter().take(4).map(|c| c.to_string()).collect::<Vec<_>>().join(", "),
                w.residual_precision.0,
                w.residual_precision.1
            );
            Ok(Report { json, text })
        }
        CommandKind::Linearize => {
            let f = series_arg(job, "f", true)?.into_float()?;
            let l = linearize(&f)?;
            let json = json!({"series": series_to_json(&l.series), "min_valuation_profile": l.min_valuation_profile});
            Ok(Report { json, text: format!("L_f = {}\n", l.series) })
        }
        CommandKind::Commutant => {
            let f = series_arg(job, "f", false)?.into_float()?;
            let a = padic_from_json(
                &ctx.float_field(),
                job.inputs.get("a").ok_or_else(|| Error::Parse("missing input \"a\"".into()))?,
            )?;
            let z = commutant(&f, &a)?;
            Ok(Report { json: json!({"series": series_to_json(&z)}), text: format!("[a]_f = {z}\n") })
        }
        CommandKind::TorsionCheck => {
            let f = series_arg(job, "f", false)?.into_int()?;
            let u = match job.inputs.get("u") {
                Some(v) => Some(series_from_json(ctx, v)?.into_int()?),
                None => None,
            };
            let out_prec = u32_arg(job, "out_prec", Some(DEFAULT_OUTPUT_PRECISION as u64))?;
            let cert = torsion_check(&f, u.as_ref(), out_prec)?;
            let mut json = json!({
                "outcome": cert.outcome.as_str(),
                "verified_order": cert.verified_order,
                "precision": {"N": cert.precision, "K": cert.order},
                "torsion_order": cert.torsion_order,
            });
            let mut text = format!("outcome: {}\n", cert.outcome.as_str());
            if let Some(i) = cert.witness_index {
                json["witness_index"] = i.into();
                let _ = writeln!(text, "no integral solution: the x^{i} numerator is a unit");
            }
            if let Some(z) = &cert.series {
                json["series"] = series_to_json(z);
                if z.order() >= 2 {
                    json["d2"] = z.ring().to_signed(&z.coeff(2)).to_string().into();
                }
                let _ = writeln!(text, "z = {z}");
                let _ = writeln!(text, "z^(e) = x verified: {} (e = {})", cert.verified_order, cert.torsion_order);
            }
            if cert.outcome == TorsionOutcome::Inconclusive {
                let _ = writeln!(text, "verification failed at precision {}", cert.precision);
            }
            Ok(Report { json, text })
        }
        CommandKind::Ramification => {
            let w = series_arg(job, "omega", true)?.into_res()?;
            let prof = lower_ramification(&w, u32_arg(job, "n_max", Some(2))?)?;
            let json = prof.to_json();
            let text = format!(
                "i = {}\nsen = {:?}\ne estimates = {}\ne = {}\n",
                json["i"], prof.sen_ok, json["e_estimates"], json["e"]
            );
            Ok(Report { json, text })
        }
        CommandKind::Order => {
            let w = series_arg(job, "omega", true)?.into_res()?;
            let d_max = u32_arg(job, "d_max", Some(8))?;
            if w.linear() == 1 {
                let inv = nottingham_order(&w, d_max)?;
                let mut json = inv.to_json();
                json["in_nottingham"] = true.into();
                let text = format!("order {} to x-precision {}\n", json["order"], inv.order_k);
                Ok(Report { json, text })
            } else {
                let o = g0_order(&w, d_max)?;
                let order: Value = o.map(Value::from).unwrap_or_else(|| "not torsion within bounds".into());
                let text = format!("not in the Nottingham group; order in G_0 {order} to x-precision {}\n", w.order());
                Ok(Report { json: json!({"in_nottingham": false, "order": order, "K": w.order()}), text })
            }
        }
        CommandKind::Normalizer => {
            let theta = series_arg(job, "theta", false)?.into_res()?;
            let omega = series_arg(job, "omega", false)?.into_res()?;
            let wit = normalizer_witness(&theta, &omega, u32_arg(job, "m", Some(3))?)?;
            let json = wit.to_json();
            Ok(Report { text: format!("{json}\n"), json })
        }
        CommandKind::LambdaCheck => {
            let f = series_arg(job, "f", false)?.into_int()?;
            let u = series_arg(job, "u", false)?.into_int()?;
            let n = u32_arg(job, "n", None)?;
            let delta = u32_arg(job, "delta", Some(ctx.delta() as u64))?;
            let c = lambda_polygon_check(&f, &u, n, delta)?;
            let json = c.to_json();
            let text = format!("equal: {}\nf: {}\nu: {}\n", c.equal, json["lambda_f"], json["lambda_u"]);
            Ok(Report { json, text })
        }
        CommandKind::GenPair => {
            let kind = PairKind::parse(job.inputs.get("kind").and_then(Value::as_str).unwrap_or("gm"))?;
            let seed = job.inputs.get("seed").and_then(Value::as_u64).or(job.seed);
            let seed = if kind == PairKind::Conjugated { Some(seed.unwrap_or(0)) } else { None };
            let b = PairBundle::generate(ctx, kind, seed)?;
            let json = pair_to_json(&b);
            Ok(Report { json, text: format!("f = {}\nu = {}\n", b.f, b.u) })
        }
        CommandKind::ValidatePair => {
            let f = series_arg(job, "f", false)?.into_int()?;
            let u = series_arg(job, "u", false)?.into_int()?;
            let r = validate_minimal_pair(&f, &u)?;
            let mut text = format!("minimal: {}\n", r.is_minimal);
            for fail in r.failures() {
                let _ = writeln!(text, "  {fail}");
            }
            Ok(Report { json: r.to_json(), text })
        }
        CommandKind::ZpIterate => {
            let w = series_arg(job, "omega", false)?.into_res()?;
            let a = uint_arg(job, "a", None)?;
            let m = u32_arg(job, "m", None)?;
            let s = zp_iterate(&w, a, m)?;
            let json = json!({"series": series_to_json(&s), "digits": m, "K": w.order()});
            Ok(Report { json, text: format!("{s}\n") })
        }
    }
}

/// Exit status for a failed job: 1 for malformed input, 2 otherwise.
pub fn exit_code(e: &Error) -> i32 {
    if e.is_input_error() {
        1
    } else {
        2
    }
}

pub fn error_json(e: &Error) -> Value {
    json!({"error": {"code": e.code(), "message": e.to_string()}})
}

/// Runs independent jobs on scoped threads; results keep the input order.
pub fn run_batch(jobs: &[std::result::Result<JobSpec, Error>]) -> Vec<(Option<CommandKind>, std::result::Result<Report, Error>)> {
    std::thread::scope(|scope| {
        let handles: Vec<_> = jobs
            .iter()
            .map(|j| {
                scope.spawn(move || match j {
                    Ok(job) => (Some(job.command), run(job)),
                    Err(e) => (None, Err(e.clone())),
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().unwrap_or_else(|_| (None, Err(Error::Precondition("job panicked".into())))))
            .collect()
    })
}
