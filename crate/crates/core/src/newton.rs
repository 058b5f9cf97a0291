//! Newton polygons, Weierstrass degree and preparation, and root-valuation
//! multisets read off negative slopes.
//!
//! Polygons are of the series g itself, indexed from 1. Another convention uses the
//! polygon of g(x)/x, which is the same picture shifted one column
//! left, with identical slopes and lengths.

use std::fmt::Write as _;

use num_rational::Ratio;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::padic::{IntegralRing, ZnElem};
use crate::ring::{CoeffRing, Valuation};
use crate::series::{dense, inv_trunc, mul_trunc, IntSeries, Series};

pub type Rational = Ratio<i64>;

/// Weierstrass degree: index of the first unit coefficient.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeierstrassDegree {
    Finite(usize),
    /// Reduction is zero through x^K; the degree is at least K+1.
    Undetermined { at_least: usize },
}

impl WeierstrassDegree {
    pub fn finite(self) -> Option<usize> {
        match self {
            WeierstrassDegree::Finite(d) => Some(d),
            WeierstrassDegree::Undetermined { .. } => None,
        }
    }
}

fn check_integral<R: CoeffRing>(g: &Series<R>) -> Result<()> {
    for (i, v) in g.valuations().into_iter().enumerate() {
        if let Valuation::Finite(x) | Valuation::AtLeast(x) = v {
            if x < 0 {
                return Err(Error::NegativeValuation(i + 1));
            }
        }
    }
    Ok(())
}

pub fn weierstrass_degree<R: CoeffRing>(g: &Series<R>) -> Result<WeierstrassDegree> {
    check_integral(g)?;
    Ok(g.valuations()
        .iter()
        .position(|v| *v == Valuation::Finite(0))
        .map(|i| WeierstrassDegree::Finite(i + 1))
        .unwrap_or(WeierstrassDegree::Undetermined { at_least: g.order() + 1 }))
}

/// A segment of a polygon: slope and horizontal length.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Segment {
    pub slope: Rational,
    pub length: usize,
}

/// Lower convex hull of the points (i, v_p(a_i)).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NewtonPolygon {
    vertices: Vec<(usize, Rational)>,
    /// Coefficients known only to be divisible by p^k: (index, k).
    floors: Vec<(usize, i64)>,
    order: usize,
}

impl NewtonPolygon {
    /// Builds the lower hull of explicit points (sorted by index, distinct).
    pub fn from_points(points: &[(usize, Rational)], order: usize) -> Self {
        NewtonPolygon { vertices: lower_hull(points), floors: Vec::new(), order }
    }

    pub fn vertices(&self) -> &[(usize, Rational)] {
        &self.vertices
    }

    pub fn segments(&self) -> Vec<Segment> {
        self.vertices
            .windows(2)
            .map(|w| {
                let (i0, v0) = w[0];
                let (i1, v1) = w[1];
                let length = i1 - i0;
                Segment { slope: (v1 - v0) / Rational::from_integer(length as i64), length }
            })
            .collect()
    }

    /// Truncation order of the series the polygon was read from.
    pub fn order(&self) -> usize {
        self.order
    }

    /// Height of the hull above index `i`, if `i` lies within its span.
    pub fn height_at(&self, i: usize) -> Option<Rational> {
        let w = self.vertices.windows(2).find(|w| w[0].0 <= i && i <= w[1].0);
        match w {
            Some(w) => {
                let (i0, v0) = w[0];
                let (i1, v1) = w[1];
                let t = Rational::new((i - i0) as i64, (i1 - i0) as i64);
                Some(v0 + (v1 - v0) * t)
            }
            None => self.vertices.iter().find(|(j, _)| *j == i).map(|(_, v)| *v),
        }
    }

    /// The part of the polygon with negative slopes, up to the first vertex
    /// of valuation zero.
    ///
    /// Fails when no valuation-zero coefficient exists within x^K (the
    /// negative part would be incomplete) or when a coefficient known only to
    /// low precision could still lie below the hull.
    pub fn negative_part(&self) -> Result<NewtonPolygon> {
        if self.vertices.iter().any(|(_, v)| v.is_negative()) {
            let i = self.vertices.iter().find(|(_, v)| v.is_negative()).map(|(i, _)| *i).unwrap_or(0);
            return Err(Error::NegativeValuation(i));
        }
        let end = self
            .vertices
            .iter()
            .position(|(_, v)| v.is_zero())
            .ok_or(Error::WidegUndetermined(self.order))?;
        let vertices = self.vertices[..=end].to_vec();
        let neg = NewtonPolygon { vertices, floors: Vec::new(), order: self.order };
        let first = neg.vertices[0].0;
        for &(i, floor) in &self.floors {
            if i < first {
                return Err(Error::PrecisionExhausted(format!(
                    "coefficient {i} is only known to be divisible by p^{floor}; the polygon's left end is undetermined"
                )));
            }
            if let Some(h) = neg.height_at(i) {
                if h > Rational::from_integer(floor) {
                    return Err(Error::PrecisionExhausted(format!(
                        "coefficient {i} is only known to be divisible by p^{floor}, below the polygon"
                    )));
                }
            }
        }
        Ok(neg)
    }

    /// Serialized vertex list: `[[i, "num/den"], ...]`.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "vertices": self
                .vertices
                .iter()
                .map(|(i, v)| serde_json::json!([i, v.to_string()]))
                .collect::<Vec<_>>()
        })
    }
}

/// Lower convex hull with strictly increasing slopes.
fn lower_hull(points: &[(usize, Rational)]) -> Vec<(usize, Rational)> {
    let mut hull: Vec<(usize, Rational)> = Vec::new();
    for &pt in points {
        while hull.len() >= 2 {
            let (x1, y1) = hull[hull.len() - 2];
            let (x2, y2) = hull[hull.len() - 1];
            let (x3, y3) = pt;
            // drop the middle point unless slope(12) < slope(23)
            let lhs = (y2 - y1) * Rational::from_integer((x3 - x2) as i64);
            let rhs = (y3 - y2) * Rational::from_integer((x2 - x1) as i64);
            if lhs >= rhs {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(pt);
    }
    hull
}

pub fn newton_polygon<R: CoeffRing>(g: &Series<R>) -> Result<NewtonPolygon> {
    let mut points = Vec::new();
    let mut floors = Vec::new();
    for (i, v) in g.valuations().into_iter().enumerate() {
        match v {
            Valuation::Finite(x) => points.push((i + 1, Rational::from_integer(x))),
            Valuation::AtLeast(x) => floors.push((i + 1, x)),
            Valuation::Infinite => {}
        }
    }
    if points.is_empty() {
        return Err(Error::Precondition("Newton polygon of the zero series".into()));
    }
    Ok(NewtonPolygon { vertices: lower_hull(&points), floors, order: g.order() })
}

pub fn negative_part<R: CoeffRing>(g: &Series<R>) -> Result<NewtonPolygon> {
    newton_polygon(g)?.negative_part()
}

/// Valuations of the roots in the open unit disc, with multiplicities,
/// largest valuation first. The root at 0 is not counted.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RootValuationMultiset {
    pub entries: Vec<(Rational, usize)>,
}

impl RootValuationMultiset {
    pub fn new(entries: Vec<(Rational, usize)>) -> Self {
        RootValuationMultiset { entries }
    }

    pub fn total(&self) -> usize {
        self.entries.iter().map(|(_, l)| l).sum()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Array(
            self.entries
                .iter()
                .map(|(v, l)| serde_json::json!({"valuation": v.to_string(), "count": l}))
                .collect(),
        )
    }
}

pub fn root_valuations<R: CoeffRing>(g: &Series<R>) -> Result<RootValuationMultiset> {
    let neg = negative_part(g)?;
    Ok(RootValuationMultiset {
        entries: neg.segments().into_iter().map(|s| (-s.slope, s.length)).collect(),
    })
}

/// g = P·U with P monic of degree wideg(g) and U a unit power series.
#[derive(Debug, Clone, PartialEq)]
pub struct WeierstrassFactorization {
    /// P, which has zero constant term because g does.
    pub distinguished: IntSeries,
    pub degree: usize,
    /// U as dense coefficients u_0..u_K.
    pub unit: Vec<ZnElem>,
    pub ring: IntegralRing,
    /// g ≡ P·U mod (p^a, x^b), as (a, b).
    pub residual_precision: (u32, usize),
}

impl WeierstrassFactorization {
    /// P·U mod x^(K+1).
    pub fn product(&self) -> IntSeries {
        let k = self.distinguished.order();
        let pd = dense(&self.ring, self.distinguished.coeffs());
        let prod = mul_trunc(&self.ring, &pd, &self.unit, k);
        Series::new(*self.distinguished.ctx(), self.ring.clone(), prod[1..].to_vec())
    }

    pub fn unit_signed(&self) -> Vec<num_bigint::BigInt> {
        self.unit.iter().map(|c| self.ring.to_signed(c)).collect()
    }
}

/// Weierstrass preparation by a p-adically contracting fixed point.
///
/// With d = wideg(g), split g = B + x^d·C where deg B < d (so B ≡ 0 mod p)
/// and C is a unit. The polynomial q of degree ≤ K−d with
/// `(q·g) div x^d ≡ 1` satisfies `q = C⁻¹(1 − (q·B) div x^d)`; the map gains a
/// p-adic digit per round. Then P = q·g (a monic polynomial of degree d) and
/// U = q⁻¹, so g = P·U holds exactly in the truncated ring.
pub fn wprep(g: &IntSeries) -> Result<WeierstrassFactorization> {
    let d = weierstrass_degree(g)?.finite().ok_or(Error::WidegUndetermined(g.order()))?;
    let k = g.order();
    if 2 * d > k {
        return Err(Error::Precondition(format!(
            "wideg {d} too large for truncation order {k}: need wideg <= K - wideg"
        )));
    }
    let ring = g.ring().clone();
    let gd = dense(&ring, g.coeffs());
    let len = k - d + 1;
    let c: Vec<ZnElem> = gd[d..=k].to_vec();
    let cinv = inv_trunc(&ring, &c, len - 1)?;

    let mut q = vec![ring.zero(); len];
    q[0] = cinv[0].clone();
    let mut converged = false;
    for _ in 0..=(ring.precision() + 2) {
        // rhs_m = δ_{m0} − Σ_{j>m} q_j B_{m+d−j}
        let mut rhs = vec![ring.zero(); len];
        rhs[0] = ring.one();
        for (m, r) in rhs.iter_mut().enumerate() {
            let top = (m + d - 1).min(len - 1);
            for j in (m + 1)..=top {
                let b = &gd[m + d - j];
                if ring.is_zero(b) || ring.is_zero(&q[j]) {
                    continue;
                }
                *r = ring.sub(r, &ring.mul(&q[j], b));
            }
        }
        let next = mul_trunc(&ring, &cinv, &rhs, len - 1);
        if next == q {
            converged = true;
            break;
        }
        q = next;
    }
    if !converged {
        return Err(Error::PrecisionExhausted("Weierstrass iteration did not stabilise".into()));
    }

    let qg = mul_trunc(&ring, &q, &gd, k);
    let mut p_coeffs = qg[1..=d].to_vec();
    p_coeffs[d - 1] = ring.one();
    for (i, c) in qg.iter().enumerate().skip(d + 1) {
        if !ring.is_zero(c) {
            return Err(Error::PrecisionExhausted(format!("q·g has a stray term at x^{i}")));
        }
    }
    let distinguished = Series::new(*g.ctx(), ring.clone(), p_coeffs);
    let unit = inv_trunc(&ring, &q, k)?;
    let mut fact = WeierstrassFactorization {
        distinguished,
        degree: d,
        unit,
        ring: ring.clone(),
        residual_precision: (0, k + 1),
    };
    let residual = g.sub(&fact.product())?;
    let a = residual
        .valuations()
        .iter()
        .map(|v| v.lower_bound())
        .min()
        .unwrap_or(i64::MAX)
        .min(ring.precision() as i64);
    fact.residual_precision = (a as u32, k + 1);
    Ok(fact)
}

/// Outcome of comparing Λ_f(n) with Λ_u(n−δ) at the level of root valuations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LambdaCheck {
    pub equal: bool,
    /// Roots of f^{∘n}.
    pub lambda_f: RootValuationMultiset,
    /// Fixed points of u^{∘p^(n−δ)}.
    pub lambda_u: RootValuationMultiset,
}

impl LambdaCheck {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "equal": self.equal,
            "lambda_f": self.lambda_f.to_json(),
            "lambda_u": self.lambda_u.to_json(),
        })
    }
}

/// Compares the root valuations of f^{∘n} with those of u^{∘p^(n−δ)}(x) − x.
pub fn lambda_polygon_check<R: CoeffRing>(f: &Series<R>, u: &Series<R>, n: u32, delta: u32) -> Result<LambdaCheck> {
    if n < delta {
        return Err(Error::Precondition(format!("n = {n} must be at least δ = {delta}")));
    }
    let p = f.ctx().p();
    let fn_ = f.iterate(n as u64)?;
    let steps = p.checked_pow(n - delta).ok_or_else(|| Error::Precondition("iteration count overflows".into()))?;
    let un = u.iterate(steps)?.minus_identity();
    let lambda_f = root_valuations(&fn_)?;
    let lambda_u = root_valuations(&un)?;
    Ok(LambdaCheck { equal: lambda_f == lambda_u, lambda_f, lambda_u })
}

/// Plots a polygon with valuation up and index right; `:` marks the
/// undetermined tail when no valuation-zero vertex was found.
pub fn render_ascii(poly: &NewtonPolygon) -> String {
    let verts = poly.vertices();
    let Some(&(last_i, last_v)) = verts.last() else {
        return String::new();
    };
    let complete = last_v.is_zero();
    let width = if complete { last_i } else { poly.order().max(last_i) };
    let vmax = verts.iter().map(|(_, v)| v.ceil().to_integer()).max().unwrap_or(0).max(1);
    let mut grid = vec![vec![' '; width + 1]; (vmax + 1) as usize];
    for i in verts[0].0..=last_i {
        if let Some(h) = poly.height_at(i) {
            let row = h.round().to_integer();
            if (0..=vmax).contains(&row) {
                grid[row as usize][i] = '.';
            }
        }
    }
    if !complete && last_i < width {
        let row = last_v.round().to_integer().clamp(0, vmax) as usize;
        for cell in grid[row].iter_mut().take(width + 1).skip(last_i + 1) {
            *cell = ':';
        }
    }
    for (i, v) in verts {
        if v.is_integer() && (0..=vmax).contains(&v.to_integer()) {
            grid[v.to_integer() as usize][*i] = '*';
        }
    }
    let mut out = String::new();
    for row in (0..=vmax).rev() {
        let _ = write!(out, "{row:>3} |");
        for i in 1..=width {
            out.push(' ');
            out.push(grid[row as usize][i]);
        }
        out.push('\n');
    }
    let _ = write!(out, "    +");
    for _ in 1..=width {
        out.push_str("--");
    }
    out.push('\n');
    let mut labels = vec![' '; 2 * width + 8];
    for (i, _) in verts {
        let s = i.to_string();
        let pos = 5 + 2 * (i - 1) + 1;
        for (k, ch) in s.chars().enumerate() {
            if pos + k < labels.len() {
                labels[pos + k] = ch;
            }
        }
    }
    out.push_str(labels.iter().collect::<String>().trim_end());
    out.push('\n');
    out
}
