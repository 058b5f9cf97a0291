//! Diagnostics in the Nottingham group over F_p: lower ramification numbers,
//! Sen congruences, e(ω) estimates, Z_p-powers, torsion orders and
//! normalizer membership.
//!
//! Every statement is made mod x^(K+1); orders and memberships are therefore
//! "to x-precision K" and reports carry K.

use num_rational::Ratio;

use crate::error::{Error, Result};
use crate::series::ResSeries;

/// A lower ramification number i_n, or why it is missing.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RamNumber {
    Finite(u64),
    /// ω^{∘p^n} ≡ x mod x^(K+1): i_n ≥ K.
    Undetermined,
    /// ω is the identity.
    Infinite,
}

impl RamNumber {
    pub fn finite(self) -> Option<u64> {
        match self {
            RamNumber::Finite(i) => Some(i),
            _ => None,
        }
    }

    pub fn to_json(self) -> serde_json::Value {
        match self {
            RamNumber::Finite(i) => i.into(),
            RamNumber::Undetermined => "undetermined".into(),
            RamNumber::Infinite => "inf".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RamificationProfile {
    pub p: u64,
    pub order: usize,
    pub identity: bool,
    /// i_n for n = 0..=n_max.
    pub i_seq: Vec<RamNumber>,
    /// i_n ≡ i_{n−1} mod p^n for n = 1, 2, ... while both are determined.
    pub sen_ok: Vec<bool>,
    /// (p−1)·i_n / p^(n+1) for each determined i_n.
    pub e_estimates: Vec<Ratio<i64>>,
    /// Set when the last two rounded estimates agree and Sen holds throughout.
    pub e_reported: Option<i64>,
}

impl RamificationProfile {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "i": self.i_seq.iter().map(|i| i.to_json()).collect::<Vec<_>>(),
            "sen": self.sen_ok,
            "e_estimates": self.e_estimates.iter().map(|e| e.to_string()).collect::<Vec<_>>(),
            "e": self.e_reported.map(serde_json::Value::from).unwrap_or_else(|| "undetermined".into()),
            "identity": self.identity,
            "K": self.order,
        })
    }
}

fn require_nottingham(omega: &ResSeries) -> Result<()> {
    let a1 = omega.linear();
    if a1 != 1 {
        return Err(Error::NotNottingham(a1));
    }
    Ok(())
}

/// `wideg(s − x) − 1`, or `None` when s ≡ x.
fn depth(s: &ResSeries) -> Option<u64> {
    s.minus_identity().x_valuation().map(|w| w as u64 - 1)
}

/// Nearest integer, halves rounded up.
fn round_half_up(r: Ratio<i64>) -> i64 {
    (r + Ratio::new(1, 2)).floor().to_integer()
}

pub fn lower_ramification(omega: &ResSeries, n_max: u32) -> Result<RamificationProfile> {
    require_nottingham(omega)?;
    let p = omega.ctx().p();
    let k = omega.order();
    if omega.is_identity() {
        return Ok(RamificationProfile {
            p,
            order: k,
            identity: true,
            i_seq: vec![RamNumber::Infinite; n_max as usize + 1],
            sen_ok: Vec::new(),
            e_estimates: Vec::new(),
            e_reported: None,
        });
    }
    let mut i_seq = Vec::new();
    let mut w = omega.clone();
    for n in 0..=n_max {
        if n > 0 {
            w = w.iterate(p)?;
        }
        i_seq.push(depth(&w).map(RamNumber::Finite).unwrap_or(RamNumber::Undetermined));
    }
    let mut sen_ok = Vec::new();
    for n in 1..i_seq.len() {
        match (i_seq[n - 1].finite(), i_seq[n].finite()) {
            (Some(a), Some(b)) => {
                let pn = p.checked_pow(n as u32).unwrap_or(u64::MAX);
                sen_ok.push(a % pn == b % pn);
            }
            _ => break,
        }
    }
    let mut e_estimates = Vec::new();
    for (n, i) in i_seq.iter().enumerate() {
        let Some(i) = i.finite() else { break };
        let Some(den) = (p as i64).checked_pow(n as u32 + 1) else { break };
        e_estimates.push(Ratio::new((p as i64 - 1) * i as i64, den));
    }
    let e_reported = match e_estimates.as_slice() {
        [.., a, b] if sen_ok.iter().all(|s| *s) && round_half_up(*a) == round_half_up(*b) => Some(round_half_up(*b)),
        _ => None,
    };
    Ok(RamificationProfile { p, order: k, identity: false, i_seq, sen_ok, e_estimates, e_reported })
}

/// ω^{∘a} for a ∈ Z_p given by its residue mod p^m, certified to equal
/// ω^{∘a'} mod x^(K+1) for every a' ≡ a mod p^m.
pub fn zp_iterate(omega: &ResSeries, a: u64, m: u32) -> Result<ResSeries> {
    require_nottingham(omega)?;
    let p = omega.ctx().p();
    let pm = p
        .checked_pow(m)
        .ok_or_else(|| Error::Convergence(format!("p^{m} does not fit in 64 bits")))?;
    let mut w = omega.clone();
    for _ in 0..m {
        w = w.iterate(p)?;
    }
    if !w.is_identity() {
        return Err(Error::Convergence(format!(
            "ω^(p^{m}) is not x mod x^{}; more digits of a would change the result",
            omega.order() + 1
        )));
    }
    omega.iterate(a % pm)
}

/// Order and leading deviation of an element of the Nottingham group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TorsionInvariant {
    /// p^d with ω^{∘p^d} ≡ x mod x^(K+1); `None` if no d ≤ d_max works.
    pub order: Option<u64>,
    /// ω = x + a·x^ℓ + ...; `None` for ω = x.
    pub ell: Option<usize>,
    pub a: Option<u64>,
    /// x-precision the order claim holds at.
    pub order_k: usize,
}

impl TorsionInvariant {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "order": self.order.map(serde_json::Value::from).unwrap_or_else(|| "not torsion within bounds".into()),
            "ell": self.ell,
            "a": self.a,
            "K": self.order_k,
        })
    }
}

pub fn nottingham_order(omega: &ResSeries, d_max: u32) -> Result<TorsionInvariant> {
    require_nottingham(omega)?;
    let p = omega.ctx().p();
    let ell = omega.minus_identity().x_valuation();
    let a = ell.map(|l| omega.coeff(l));
    let mut w = omega.clone();
    let mut order = None;
    let mut pd = 1u64;
    for d in 0..=d_max {
        if d > 0 {
            w = w.iterate(p)?;
            pd = match pd.checked_mul(p) {
                Some(v) => v,
                None => break,
            };
        }
        if w.is_identity() {
            order = Some(pd);
            break;
        }
    }
    Ok(TorsionInvariant { order, ell, a, order_k: omega.order() })
}

/// Order of an element of G_0(F_p): the order of ω'(0) in F_p^× times the
/// Nottingham order of ω^{∘ord(ω'(0))}. `None` if not torsion within bounds.
pub fn g0_order(omega: &ResSeries, d_max: u32) -> Result<Option<u64>> {
    let ring = omega.ring();
    let a1 = omega.linear();
    if a1 == 0 {
        return Err(Error::NonUnitLinear);
    }
    let mut o = 1u64;
    while ring.pow(a1, o) != 1 {
        o += 1;
    }
    let w = omega.iterate(o)?;
    Ok(nottingham_order(&w, d_max)?.order.map(|q| q * o))
}

/// Result of the digit-by-digit solve of ϑ∘ω∘ϑ⁻¹ = ω^{∘a}.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NormalizerWitness {
    /// a mod p^m.
    Member { a: u64, digits: u32 },
    /// No digit works at this stage: the conjugate is not in A_ω mod x^(K+1).
    NotMember { stage: u32 },
}

impl NormalizerWitness {
    pub fn to_json(&self) -> serde_json::Value {
        match self {
            NormalizerWitness::Member { a, digits } => serde_json::json!({"member": true, "a": a, "digits": digits}),
            NormalizerWitness::NotMember { stage } => serde_json::json!({"member": false, "stage": stage}),
        }
    }
}

/// Finds a mod p^m with ϑ∘ω∘ϑ⁻¹ = ω^{∘a} mod x^(K+1), or a stage at which no
/// digit can work.
///
/// Writing r_j = ω^{∘−a_j}∘(ϑ∘ω∘ϑ⁻¹), membership forces r_j to be a power of
/// ω^{∘p^j}; the next digit c is the one making (ω^{∘p^j})^{∘−c}∘r_j agree
/// with x beyond the depth i_j of ω^{∘p^j}.
pub fn normalizer_witness(theta: &ResSeries, omega: &ResSeries, m: u32) -> Result<NormalizerWitness> {
    require_nottingham(omega)?;
    if omega.is_identity() {
        return Err(Error::Precondition("ω must not be the identity".into()));
    }
    if theta.linear() == 0 {
        return Err(Error::NonUnitLinear);
    }
    let p = omega.ctx().p();
    let pm = p
        .checked_pow(m)
        .ok_or_else(|| Error::Convergence(format!("p^{m} does not fit in 64 bits")))?;
    let target = theta.compose(&omega.compose(&theta.comp_inverse()?)?)?;

    let mut w = omega.clone();
    let mut w_inv = omega.comp_inverse()?;
    let mut r = target.clone();
    let mut a = 0u64;
    let mut pj = 1u64;
    for j in 0..m {
        let Some(i_j) = depth(&w) else {
            // ω^{∘p^j} ≡ x: later digits cannot matter, so r must already be x
            if !r.is_identity() {
                return Ok(NormalizerWitness::NotMember { stage: j });
            }
            break;
        };
        let mut chosen = None;
        let mut cand = r.clone();
        for c in 0..p {
            if c > 0 {
                cand = w_inv.compose(&cand)?;
            }
            if depth(&cand).is_none_or(|d| d > i_j) {
                chosen = Some((c, cand.clone()));
                break;
            }
        }
        let Some((c, next)) = chosen else {
            return Ok(NormalizerWitness::NotMember { stage: j });
        };
        a += c * pj;
        r = next;
        pj *= p;
        w = w.iterate(p)?;
        w_inv = w_inv.iterate(p)?;
    }
    if zp_iterate(omega, a, m)? != target {
        return Ok(NormalizerWitness::NotMember { stage: m });
    }
    Ok(NormalizerWitness::Member { a: a % pm, digits: m })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::PrimeContext;
    use crate::series::Series;

    fn res(p: u64, k: usize, c: &[u64]) -> ResSeries {
        Series::from_u64s(PrimeContext::new(p, 1, k).unwrap(), c)
    }

    fn geometric2(k: usize) -> ResSeries {
        res(2, k, &vec![1; k])
    }

    #[test]
    fn profile_p2() {
        let w = res(2, 32, &[1, 0, 0, 1, 1]);
        let prof = lower_ramification(&w, 2).unwrap();
        let i: Vec<_> = prof.i_seq.iter().map(|r| r.finite().unwrap()).collect();
        assert_eq!(i, vec![3, 7, 15]);
        assert_eq!(prof.sen_ok, vec![true, true]);
        assert_eq!(prof.e_estimates, vec![Ratio::new(3, 2), Ratio::new(7, 4), Ratio::new(15, 8)]);
        assert_eq!(prof.e_reported, Some(2));
    }

    #[test]
    fn profile_p3() {
        let w = res(3, 32, &[1, 0, 1, 1]);
        let prof = lower_ramification(&w, 2).unwrap();
        let i: Vec<_> = prof.i_seq.iter().map(|r| r.finite().unwrap()).collect();
        assert_eq!(i, vec![2, 8, 26]);
        assert_eq!(prof.e_reported, Some(2));
    }

    #[test]
    fn identity_and_truncation() {
        let x = res(5, 8, &[1]);
        let prof = lower_ramification(&x, 3).unwrap();
        assert!(prof.identity);
        let w = res(2, 10, &[1, 0, 0, 1, 1]);
        let prof = lower_ramification(&w, 3).unwrap();
        assert_eq!(prof.i_seq[2], RamNumber::Undetermined);
        assert_eq!(prof.sen_ok, vec![true]);
        assert!(lower_ramification(&res(3, 8, &[2, 1]), 2).is_err());
    }

    #[test]
    fn zp_powers() {
        let w = res(2, 16, &[1, 0, 0, 1, 1]);
        assert!(zp_iterate(&w, 0, 3).unwrap().is_identity());
        let five = zp_iterate(&w, 5, 3).unwrap();
        let mut direct = res(2, 16, &[1]);
        for _ in 0..5 {
            direct = direct.compose(&w).unwrap();
        }
        assert_eq!(five, direct);
        assert!(matches!(zp_iterate(&w, 5, 1), Err(Error::Convergence(_))));
        let g = geometric2(16);
        assert_eq!(zp_iterate(&g, 3, 2).unwrap(), g);
    }

    #[test]
    fn orders() {
        let inv = nottingham_order(&geometric2(32), 5).unwrap();
        assert_eq!((inv.order, inv.ell, inv.a), (Some(2), Some(2), Some(1)));
        assert_eq!(nottingham_order(&res(3, 8, &[1]), 3).unwrap().order, Some(1));
        assert_eq!(nottingham_order(&res(2, 32, &[1, 0, 0, 1, 1]), 3).unwrap().order, None);
        // -x/(1+x) over F_3: linear coefficient 2, order 2 in G_0
        let c: Vec<u64> = (1..=16).map(|i| if i % 2 == 1 { 2 } else { 1 }).collect();
        let z = res(3, 16, &c);
        assert!(matches!(nottingham_order(&z, 3), Err(Error::NotNottingham(2))));
        assert_eq!(g0_order(&z, 3).unwrap(), Some(2));
    }

    #[test]
    fn normalizer() {
        let w = res(2, 24, &[1, 0, 0, 1, 1]);
        assert_eq!(normalizer_witness(&w, &w, 3).unwrap(), NormalizerWitness::Member { a: 1, digits: 3 });
        assert_eq!(normalizer_witness(&geometric2(24), &w, 3).unwrap(), NormalizerWitness::Member { a: 1, digits: 3 });
        let theta = res(2, 24, &[1, 0, 1]);
        let v1 = normalizer_witness(&theta, &w, 3).unwrap();
        assert_eq!(v1, normalizer_witness(&theta, &w, 3).unwrap());
        if let NormalizerWitness::Member { a, .. } = v1 {
            let target = theta.compose(&w.compose(&theta.comp_inverse().unwrap()).unwrap()).unwrap();
            assert_eq!(zp_iterate(&w, a, 3).unwrap(), target);
        }
    }
}
