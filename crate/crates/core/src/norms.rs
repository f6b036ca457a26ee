//! Rearrangement-invariant norms computed from distribution profiles.
//!
//! Every norm here depends on `f` only through `S(α) = P(|f| ≥ α)`:
//!
//! * `‖f‖_p^p = ∫₀^∞ p α^{p−1} S(α) dα`
//! * `∫ ψ(|f|/K) = ∫₀^∞ ψ'(α) S(Kα) dα`
//! * `‖f‖_{p,q}^q = p ∫₀^∞ α^{q−1} S(α)^{p/q} dα`
//!
//! `S` is an exact piecewise polynomial, so the integrals are exact rationals
//! whenever the weights are polynomial. Otherwise they are evaluated per
//! piece with Gauss-Legendre quadrature after a power substitution that
//! smooths the endpoint singularities of `α^{p−1}` and `S^{p/q}`.

use std::sync::OnceLock;

use gauss_quad::GaussLegendre;
use num::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::distribution::DistributionProfile;
use crate::error::{Error, Result};
use crate::piecewise::PiecewisePoly;
use crate::poly::Poly;
use crate::rational::{as_u32, fmt_q, parse_q, pow_u, q, qi, serde_opt_q, serde_vec_q, to_f64, Q};

/// Gauss-Legendre orders; their disagreement estimates the error.
const LOW_ORDER: usize = 48;
const HIGH_ORDER: usize = 64;

fn rules() -> &'static (GaussLegendre, GaussLegendre) {
    static RULES: OnceLock<(GaussLegendre, GaussLegendre)> = OnceLock::new();
    RULES.get_or_init(|| {
        let rule = |n: usize| GaussLegendre::new(n.try_into().expect("order ≥ 2"));
        (rule(LOW_ORDER), rule(HIGH_ORDER))
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NormKind {
    LpPow,
    Psi,
    LorentzPow,
    Beta,
}

/// A norm value, exact when the computation closes over the rationals.
/// `|approx − true value| ≤ error_bound` in every case.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NormValue {
    pub kind: NormKind,
    #[serde(with = "serde_opt_q")]
    pub exact: Option<Q>,
    pub approx: f64,
    pub error_bound: f64,
}

impl NormValue {
    fn exact(kind: NormKind, v: Q) -> Self {
        NormValue {
            kind,
            approx: to_f64(&v),
            // rounding of the conversion only
            error_bound: to_f64(&v).abs() * f64::EPSILON,
            exact: Some(v),
        }
    }

    fn approx(kind: NormKind, approx: f64, error_bound: f64) -> Self {
        NormValue {
            kind,
            exact: None,
            approx,
            error_bound,
        }
    }
}

fn positive(x: &Q, name: &str) -> Result<()> {
    if x.is_positive() {
        Ok(())
    } else {
        Err(Error::InvalidExponent(format!("{name} = {}", fmt_q(x))))
    }
}

/// Substitution exponent that turns `x^e` (e = n/d) into a smooth power.
fn smoothing_power(e: &Q) -> u32 {
    if e.is_integer() {
        1
    } else {
        e.denom().to_u32().unwrap_or(u32::MAX).min(16)
    }
}

/// Target for the estimated error of each half piece.
const HALF_TOL: f64 = 1e-13;
/// Bisection depth beyond which an estimate is accepted as it stands.
const MAX_DEPTH: u32 = 12;

/// `∫_lo^hi g` by Gauss-Legendre, bisecting until the gap between the two
/// orders plus the rounding of the sum meets `tol`.
fn gauss_adaptive(g: &impl Fn(f64) -> f64, lo: f64, hi: f64, tol: f64, depth: u32) -> (f64, f64) {
    let (low, high) = rules();
    let v = high.integrate(lo, hi, g);
    let coarse = low.integrate(lo, hi, g);
    let magnitude = high.integrate(lo, hi, |u| g(u).abs());
    let err = (v - coarse).abs() + magnitude * HIGH_ORDER as f64 * f64::EPSILON;
    if err <= tol || depth == MAX_DEPTH {
        return (v, err);
    }
    let mid = (lo + hi) / 2.0;
    let (l, el) = gauss_adaptive(g, lo, mid, tol / 2.0, depth + 1);
    let (r, er) = gauss_adaptive(g, mid, hi, tol / 2.0, depth + 1);
    (l + r, el + er)
}

/// `∫_a^b f` with `α = a + h u^{m_a}` on the left half and
/// `α = b − h u^{m_b}` on the right half. With `m` the denominator of the
/// endpoint exponent the integrands become smooth in `u`, so Gauss-Legendre
/// converges fast; the error estimate is the gap between two orders plus
/// the rounding of the sum.
fn integrate_regularized(f: &impl Fn(f64) -> f64, a: f64, b: f64, m_a: u32, m_b: u32) -> (f64, f64) {
    let h = (b - a) / 2.0;
    let half = |m: u32, sign: f64, origin: f64| {
        let g = |u: f64| h * m as f64 * u.powi(m as i32 - 1) * f(origin + sign * h * u.powi(m as i32));
        gauss_adaptive(&g, 0.0, 1.0, HALF_TOL, 0)
    };
    let (l, el) = half(m_a, 1.0, a);
    let (r, er) = half(m_b, -1.0, b);
    (l + r, el + er)
}

/// Integrates `p α^{e} · S(α)^r` over the tail's support piece by piece.
fn tail_quadrature(tail: &PiecewisePoly, p: &Q, e: &Q, r: &Q) -> (f64, f64) {
    let (pf, ef, rf) = (to_f64(p), to_f64(e), to_f64(r));
    let pieces: Vec<_> = tail.iter_pieces().collect();
    let mut total = 0.0;
    let mut err = 0.0;
    for (i, (a, b, s)) in pieces.iter().enumerate() {
        let f = |t: f64| pf * t.powf(ef) * s.eval_f64(t).max(0.0).powf(rf);
        let m_a = if a.is_zero() { smoothing_power(e) } else { 1 };
        let m_b = if i + 1 == pieces.len() { smoothing_power(r) } else { 1 };
        let (v, e) = integrate_regularized(&f, to_f64(a), to_f64(b), m_a, m_b);
        total += v;
        err += e;
    }
    (total, err + total.abs() * 16.0 * f64::EPSILON)
}

/// `‖f‖_p^p` from the profile of `|f|`; exact for integer `p`.
pub fn lp_norm_pow(profile: &DistributionProfile, p: &Q) -> Result<NormValue> {
    positive(p, "p")?;
    let tail = profile.tail();
    if let Some(k) = p.is_integer().then(|| as_u32(p)).flatten() {
        let weight = Poly::monomial(k as usize - 1).scale(p);
        let v = tail
            .iter_pieces()
            .map(|(a, b, s)| (&weight * s).integrate(a, b))
            .sum();
        return Ok(NormValue::exact(NormKind::LpPow, v));
    }
    let (v, e) = tail_quadrature(&tail, p, &(p - Q::one()), &Q::one());
    Ok(NormValue::approx(NormKind::LpPow, v, e))
}

/// `‖f‖_{p,q}^q`; exact when `q` and `p/q` are positive integers.
pub fn lorentz_norm_pow(profile: &DistributionProfile, p: &Q, q_: &Q) -> Result<NormValue> {
    positive(p, "p")?;
    positive(q_, "q")?;
    let tail = profile.tail();
    let r = p / q_;
    if let (Some(qk), Some(rk)) = (
        q_.is_integer().then(|| as_u32(q_)).flatten(),
        r.is_integer().then(|| as_u32(&r)).flatten(),
    ) {
        let weight = Poly::monomial(qk as usize - 1).scale(p);
        let v = tail
            .iter_pieces()
            .map(|(a, b, s)| (&weight * &s.pow(rk)).integrate(a, b))
            .sum();
        return Ok(NormValue::exact(NormKind::LorentzPow, v));
    }
    let (v, e) = tail_quadrature(&tail, p, &(q_ - Q::one()), &r);
    Ok(NormValue::approx(NormKind::LorentzPow, v, e))
}

/// A polynomial on each `[b_i, b_{i+1})`, the last piece extending to `∞`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HalfLinePoly {
    #[serde(with = "serde_vec_q")]
    pub breakpoints: Vec<Q>,
    pub pieces: Vec<Poly>,
}

impl HalfLinePoly {
    fn piece_index(&self, s: &Q) -> usize {
        self.breakpoints.iter().rposition(|b| b <= s).unwrap_or(0)
    }

    pub fn eval(&self, s: &Q) -> Q {
        self.pieces[self.piece_index(s)].eval(s)
    }

    fn derivative(&self) -> HalfLinePoly {
        HalfLinePoly {
            breakpoints: self.breakpoints.clone(),
            pieces: self.pieces.iter().map(Poly::derivative).collect(),
        }
    }

    /// Continuous antiderivative vanishing at the first breakpoint.
    fn antiderivative(&self) -> HalfLinePoly {
        let mut pieces = Vec::with_capacity(self.pieces.len());
        let mut acc = Q::zero();
        for (i, p) in self.pieces.iter().enumerate() {
            let a = &self.breakpoints[i];
            let anti = p.antiderivative();
            let shift = &acc - anti.eval(a);
            let anti = &anti + &Poly::constant(shift);
            if let Some(b) = self.breakpoints.get(i + 1) {
                acc = anti.eval(b);
            }
            pieces.push(anti);
        }
        HalfLinePoly {
            breakpoints: self.breakpoints.clone(),
            pieces,
        }
    }

    /// The restriction to `(0, len)` as a compactly supported function.
    fn truncate(&self, len: &Q) -> PiecewisePoly {
        let mut bps = Vec::new();
        let mut ps = Vec::new();
        for (i, p) in self.pieces.iter().enumerate() {
            let a = &self.breakpoints[i];
            if a >= len {
                break;
            }
            bps.push(a.clone());
            ps.push(p.clone());
        }
        bps.push(len.clone());
        PiecewisePoly::from_parts(bps, ps).expect("breakpoints are increasing")
    }
}

/// A strictly increasing, continuous, piecewise-polynomial `ψ` on `[0, ∞)`
/// with `ψ(0) = 0`, together with `Ψ = ∫ψ` and `T = ∫Ψ`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PsiSpec {
    pub name: String,
    pub psi: HalfLinePoly,
    #[serde(skip)]
    dpsi: HalfLinePoly,
    #[serde(skip)]
    big_psi: HalfLinePoly,
    #[serde(skip)]
    t: HalfLinePoly,
}

impl PsiSpec {
    pub fn new(name: impl Into<String>, psi: HalfLinePoly) -> Result<Self> {
        let bad = |m: &str| Err(Error::InvalidPsi(m.to_string()));
        let bps = &psi.breakpoints;
        if bps.is_empty() || bps.len() != psi.pieces.len() {
            return bad("need one piece per breakpoint");
        }
        if !bps[0].is_zero() {
            return bad("first breakpoint must be 0");
        }
        if bps.windows(2).any(|w| w[0] >= w[1]) {
            return bad("breakpoints must be strictly increasing");
        }
        if !psi.pieces[0].eval(&Q::zero()).is_zero() {
            return bad("psi(0) must be 0");
        }
        for (i, b) in bps.iter().enumerate().skip(1) {
            if psi.pieces[i - 1].eval(b) != psi.pieces[i].eval(b) {
                return bad(&format!("psi is discontinuous at {}", fmt_q(b)));
            }
        }
        let dpsi = psi.derivative();
        for (i, d) in dpsi.pieces.iter().enumerate() {
            if d.is_zero() {
                return bad("psi is constant on a piece");
            }
            let a = &bps[i];
            let b = match bps.get(i + 1) {
                Some(b) => b.clone(),
                None => {
                    if !d.leading().is_positive() {
                        return bad("psi must increase on its last piece");
                    }
                    // beyond the Cauchy root bound the sign is the leading one
                    let lead = d.leading().abs();
                    let bound = d
                        .coeffs()
                        .iter()
                        .map(|c| c.abs() / &lead)
                        .fold(Q::zero(), |m, c| if c > m { c } else { m });
                    a + bound + Q::one()
                }
            };
            if d.negative_point_in(a, &b).is_some() {
                return bad("psi must be non-decreasing");
            }
        }
        let big_psi = psi.antiderivative();
        let t = big_psi.antiderivative();
        Ok(PsiSpec {
            name: name.into(),
            psi,
            dpsi,
            big_psi,
            t,
        })
    }

    /// `ψ(s) = s^k`.
    pub fn power(k: u32) -> Self {
        assert!(k >= 1);
        Self::new(
            format!("power:{k}"),
            HalfLinePoly {
                breakpoints: vec![Q::zero()],
                pieces: vec![Poly::monomial(k as usize)],
            },
        )
        .expect("powers are valid")
    }

    /// Presets `power:k`, `taylor:k` (`Σ_{j≤k} s^j/j!`), `huber`
    /// (`s²` then `2s − 1` from 1) and `mixed` (`s` then `s² + 1/4` from 1/2),
    /// or an inline JSON `{"breakpoints": [...], "pieces": [[...], ...]}`.
    pub fn parse(spec: &str) -> Result<Self> {
        let spec = spec.trim();
        if spec.starts_with('{') {
            let psi: HalfLinePoly =
                serde_json::from_str(spec).map_err(|e| Error::InvalidPsi(e.to_string()))?;
            return Self::new("inline", psi);
        }
        let order = |s: &str| -> Result<u32> {
            s.parse::<u32>()
                .ok()
                .filter(|k| (1..=32).contains(k))
                .ok_or_else(|| Error::InvalidPsi(format!("bad order {s:?}")))
        };
        let single = |coeffs: Vec<Q>| HalfLinePoly {
            breakpoints: vec![Q::zero()],
            pieces: vec![Poly::new(coeffs)],
        };
        match spec.split_once(':') {
            Some(("power", k)) => Ok(Self::power(order(k)?)),
            Some(("taylor", k)) => {
                let k = order(k)?;
                let mut coeffs = vec![Q::zero()];
                let mut fact = Q::one();
                for j in 1..=k {
                    fact *= qi(j as i64);
                    coeffs.push(Q::one() / &fact);
                }
                Self::new(spec, single(coeffs))
            }
            None if spec == "huber" => Self::new(
                spec,
                HalfLinePoly {
                    breakpoints: vec![qi(0), qi(1)],
                    pieces: vec![Poly::monomial(2), Poly::linear(qi(-1), qi(2))],
                },
            ),
            None if spec == "mixed" => Self::new(
                spec,
                HalfLinePoly {
                    breakpoints: vec![qi(0), q(1, 2)],
                    pieces: vec![Poly::monomial(1), Poly::new(vec![q(1, 4), qi(0), qi(1)])],
                },
            ),
            _ => Err(Error::InvalidPsi(format!("unknown preset {spec:?}"))),
        }
    }

    pub fn psi(&self, s: &Q) -> Q {
        self.psi.eval(s)
    }

    /// `Ψ(s) = ∫₀^s ψ`.
    pub fn big_psi(&self, s: &Q) -> Q {
        self.big_psi.eval(s)
    }

    /// `T(s) = ∫₀^s Ψ`.
    pub fn t(&self, s: &Q) -> Q {
        self.t.eval(s)
    }

    /// `∫ ψ(|f|/K) = ∫₀^{onset/K} ψ'(α) S(Kα) dα`, exactly.
    pub fn membership(&self, profile: &DistributionProfile, k: &Q) -> Q {
        if profile.onset().is_zero() {
            return Q::zero();
        }
        let len = profile.onset() / k;
        let s = profile.tail().dilate(k);
        self.dpsi.truncate(&len).mul(&s).total_integral()
    }
}

/// Result of a monotone bisection: the threshold lies in `[lo, hi]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Bracket {
    #[serde(with = "crate::rational::serde_q")]
    pub lo: Q,
    #[serde(with = "crate::rational::serde_q")]
    pub hi: Q,
    pub exact: bool,
}

impl Bracket {
    pub fn value(&self) -> NormValue {
        if self.exact {
            return NormValue::exact(NormKind::Psi, self.hi.clone());
        }
        let mid = (to_f64(&self.lo) + to_f64(&self.hi)) / 2.0;
        NormValue::approx(
            NormKind::Psi,
            mid,
            to_f64(&(&self.hi - &self.lo)) / 2.0 + mid.abs() * f64::EPSILON,
        )
    }
}

/// `inf{K > 0 : phi(K) ≤ 1}` for continuous `phi` that is strictly
/// decreasing while positive, exceeds 1 near 0 and tends to 0. Returns a
/// bracket of width at most `tol` with `phi(lo) > 1 ≥ phi(hi)`; hitting
/// `phi = 1` exactly pins the answer.
pub fn solve_threshold(phi: impl Fn(&Q) -> Q, start: &Q, tol: &Q) -> Result<Bracket> {
    if !tol.is_positive() {
        return Err(Error::ToleranceInvalid);
    }
    let one = Q::one();
    let two = qi(2);
    let pinned = |k: Q| Bracket {
        lo: k.clone(),
        hi: k,
        exact: true,
    };
    let mut hi = if start.is_positive() { start.clone() } else { one.clone() };
    while phi(&hi) > one {
        hi = &hi * &two;
    }
    if phi(&hi) == one {
        return Ok(pinned(hi));
    }
    let mut lo = &hi / &two;
    loop {
        let v = phi(&lo);
        if v == one {
            return Ok(pinned(lo));
        }
        if v > one {
            break;
        }
        hi = lo.clone();
        lo = &lo / &two;
    }
    while &hi - &lo > *tol {
        let mid = (&lo + &hi) / &two;
        let v = phi(&mid);
        if v == one {
            return Ok(pinned(mid));
        }
        if v > one {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Bracket {
        lo,
        hi,
        exact: false,
    })
}

/// `‖f‖_ψ = inf{K > 0 : ∫ψ(|f|/K) ≤ 1}`, bracketed to within `tol`.
pub fn psi_norm(profile: &DistributionProfile, psi: &PsiSpec, tol: &Q) -> Result<Bracket> {
    if !tol.is_positive() {
        return Err(Error::ToleranceInvalid);
    }
    if profile.onset().is_zero() {
        return Ok(Bracket {
            lo: Q::zero(),
            hi: Q::zero(),
            exact: true,
        });
    }
    solve_threshold(|k| psi.membership(profile, k), profile.onset(), tol)
}

/// `inf{K > 0 : 2K Ψ(1/(2K)) ≤ 1}`, the least `ψ`-norm of `D` over all sets.
pub fn min_psi_norm_d(psi: &PsiSpec, tol: &Q) -> Result<Bracket> {
    solve_threshold(
        |k| {
            let two_k = k * qi(2);
            psi.big_psi(&(Q::one() / &two_k)) * two_k
        },
        &q(1, 2),
        tol,
    )
}

/// `inf{K > 0 : 2K² T(1/K) ≤ 1}`, the least `ψ`-norm of `D̃`.
pub fn min_psi_norm_dtilde(psi: &PsiSpec, tol: &Q) -> Result<Bracket> {
    solve_threshold(
        |k| psi.t(&(Q::one() / k)) * k * k * qi(2),
        &Q::one(),
        tol,
    )
}

/// `2^x` for rational `x`: exact for integers.
fn pow2(x: &Q) -> (Option<Q>, f64) {
    if x.is_integer() {
        let e = x.to_integer().to_i32().expect("exponent fits in i32");
        let v = if e >= 0 {
            pow_u(&qi(2), e as u32)
        } else {
            Q::one() / pow_u(&qi(2), (-e) as u32)
        };
        let f = to_f64(&v);
        return (Some(v), f);
    }
    (None, to_f64(x).exp2())
}

fn combine(kind: NormKind, exact: Option<Q>, approx: f64, rel: f64) -> NormValue {
    match exact {
        Some(v) => NormValue {
            kind,
            ..NormValue::exact(kind, v)
        },
        None => NormValue::approx(kind, approx, approx.abs() * rel),
    }
}

/// `‖D‖_p^p` of the centered grid, `1/(2^p (p+1))`.
pub fn min_lp_pow_d(p: &Q) -> Result<NormValue> {
    positive(p, "p")?;
    let (e, f) = pow2(p);
    let den1 = p + Q::one();
    let exact = e.map(|two_p| Q::one() / (two_p * &den1));
    Ok(combine(NormKind::LpPow, exact, 1.0 / (f * to_f64(&den1)), 4.0 * f64::EPSILON))
}

/// `‖D̃‖_p^p` of every translated grid, `2/((p+1)(p+2))`.
pub fn min_lp_pow_dtilde(p: &Q) -> Result<NormValue> {
    positive(p, "p")?;
    Ok(NormValue::exact(
        NormKind::LpPow,
        qi(2) / ((p + Q::one()) * (p + qi(2))),
    ))
}

/// Relative accuracy claimed for the log-gamma route.
const BETA_REL: f64 = 1e-12;

/// `B(x, y) = ∫₀¹ t^{x−1}(1−t)^{y−1} dt`; exact when either argument is a
/// positive integer, via `B(n, y) = (n−1)! / (y (y+1) ⋯ (y+n−1))`.
pub fn beta(x: &Q, y: &Q) -> Result<NormValue> {
    positive(x, "x")?;
    positive(y, "y")?;
    let int_arg = |v: &Q| v.is_integer().then(|| as_u32(v)).flatten();
    let exact = match (int_arg(x), int_arg(y)) {
        (Some(n), _) => Some(beta_int(n, y)),
        (None, Some(n)) => Some(beta_int(n, x)),
        _ => None,
    };
    if let Some(v) = exact {
        return Ok(NormValue::exact(NormKind::Beta, v));
    }
    Ok(beta_numeric(x, y))
}

fn beta_int(n: u32, y: &Q) -> Q {
    let mut v = Q::one();
    for k in 0..n {
        v = v * qi(k.max(1) as i64) / (y + qi(k as i64));
    }
    v
}

/// Log-gamma evaluation regardless of integrality.
pub fn beta_numeric(x: &Q, y: &Q) -> NormValue {
    let v = statrs::function::beta::beta(to_f64(x), to_f64(y));
    NormValue::approx(NormKind::Beta, v, v.abs() * BETA_REL)
}

/// `inf ‖D‖_{p,q}^q = p/2^q · B(q, 1 + p/q)`, the Lorentz norm of the
/// centered grid.
pub fn min_lorentz_pow_d(p: &Q, q_: &Q) -> Result<NormValue> {
    positive(p, "p")?;
    positive(q_, "q")?;
    let b = beta(q_, &(Q::one() + p / q_))?;
    let (two_q, two_qf) = pow2(q_);
    let exact = match (&b.exact, two_q) {
        (Some(b), Some(t)) => Some(p * b / t),
        _ => None,
    };
    let approx = to_f64(p) * b.approx / two_qf;
    let rel = b.error_bound / b.approx.abs() + 4.0 * f64::EPSILON;
    Ok(combine(NormKind::LorentzPow, exact, approx, rel))
}

/// `inf ‖D̃‖_{p,q}^q = p · B(q, 1 + 2p/q)`.
pub fn min_lorentz_pow_dtilde(p: &Q, q_: &Q) -> Result<NormValue> {
    positive(p, "p")?;
    positive(q_, "q")?;
    let b = beta(q_, &(Q::one() + qi(2) * p / q_))?;
    let exact = b.exact.as_ref().map(|b| p * b);
    let approx = to_f64(p) * b.approx;
    let rel = b.error_bound / b.approx.abs() + 4.0 * f64::EPSILON;
    Ok(combine(NormKind::LorentzPow, exact, approx, rel))
}

/// Parses a positive exponent such as `2`, `1/2` or `0.75`.
pub fn parse_exponent(s: &str) -> Result<Q> {
    let v = parse_q(s)?;
    positive(&v, "exponent")?;
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distribution::{dist_d, dist_dtilde, grid_profile_d, grid_profile_dtilde};
    use crate::pointset::PointSet;

    fn exact(v: NormValue) -> Q {
        v.exact.expect("exact value")
    }

    #[test]
    fn lp_of_grid_profiles() {
        let d = grid_profile_d();
        let dt = grid_profile_dtilde();
        assert_eq!(exact(lp_norm_pow(&d, &qi(1)).unwrap()), q(1, 4));
        assert_eq!(exact(lp_norm_pow(&d, &qi(2)).unwrap()), q(1, 12));
        assert_eq!(exact(lp_norm_pow(&d, &qi(3)).unwrap()), q(1, 32));
        assert_eq!(exact(lp_norm_pow(&dt, &qi(2)).unwrap()), q(1, 6));
        assert_eq!(exact(lp_norm_pow(&dt, &qi(3)).unwrap()), q(1, 10));
        assert!(matches!(lp_norm_pow(&d, &qi(0)), Err(Error::InvalidExponent(_))));
    }

    #[test]
    fn lp_fractional_exponents() {
        for (n, dd) in [(1, 2), (1, 3), (3, 2), (5, 4), (7, 3)] {
            let p = q(n, dd);
            let pf = to_f64(&p);
            let v = lp_norm_pow(&grid_profile_d(), &p).unwrap();
            let want = 1.0 / (pf.exp2() * (pf + 1.0));
            assert!(v.exact.is_none());
            assert!((v.approx - want).abs() <= 1e-12, "p={pf}: {} vs {want}", v.approx);
            assert!(v.error_bound <= 1e-12);
            let m = min_lp_pow_d(&p).unwrap();
            assert!((m.approx - want).abs() <= 1e-14);
            let vt = lp_norm_pow(&grid_profile_dtilde(), &p).unwrap();
            let want = 2.0 / ((pf + 1.0) * (pf + 2.0));
            assert!((vt.approx - want).abs() <= 1e-12);
        }
    }

    #[test]
    fn distribution_trick_matches_direct_integration() {
        for seed in 0..15 {
            let p = PointSet::random(1 + seed as usize % 6, seed, 20);
            let prof = dist_d(&p);
            for k in 1..=4u32 {
                let via_profile = exact(lp_norm_pow(&prof, &qi(k as i64)).unwrap());
                assert_eq!(via_profile, crate::discrepancy::lp_pow_direct(&p, k));
            }
            let l2 = exact(lp_norm_pow(&dist_dtilde(&p), &qi(2)).unwrap());
            assert_eq!(l2, crate::discrepancy::extreme_l2_sq_square_direct(&p));
        }
    }

    #[test]
    fn lorentz_values() {
        let d = grid_profile_d();
        assert_eq!(exact(lorentz_norm_pow(&d, &qi(2), &qi(2)).unwrap()), q(1, 12));
        assert_eq!(exact(lorentz_norm_pow(&d, &qi(1), &qi(1)).unwrap()), q(1, 4));
        assert_eq!(
            exact(lorentz_norm_pow(&grid_profile_dtilde(), &qi(2), &qi(2)).unwrap()),
            q(1, 6)
        );
        // p=2, q=1: 2 ∫ (1 − 2α)² dα over (0, 1/2)
        assert_eq!(exact(lorentz_norm_pow(&d, &qi(2), &qi(1)).unwrap()), q(1, 3));
        assert_eq!(exact(min_lorentz_pow_d(&qi(2), &qi(1)).unwrap()), q(1, 3));
        assert_eq!(exact(min_lorentz_pow_d(&qi(2), &qi(2)).unwrap()), q(1, 12));
        assert_eq!(exact(min_lorentz_pow_dtilde(&qi(1), &qi(1)).unwrap()), q(1, 3));
        for a in 1..=3 {
            for b in 1..=3 {
                let (p, q_) = (qi(a), qi(b));
                let lhs = min_lorentz_pow_d(&p, &q_).unwrap();
                let rhs = lorentz_norm_pow(&d, &p, &q_).unwrap();
                assert!((lhs.approx - rhs.approx).abs() < 1e-12, "D {a},{b}");
                let lhs = min_lorentz_pow_dtilde(&p, &q_).unwrap();
                let rhs = lorentz_norm_pow(&grid_profile_dtilde(), &p, &q_).unwrap();
                assert!((lhs.approx - rhs.approx).abs() < 1e-12, "Dtilde {a},{b}");
            }
        }
    }

    #[test]
    fn lorentz_fractional_parameters() {
        let d = grid_profile_d();
        for (p, q_) in [(q(1, 2), q(3, 2)), (qi(3), q(1, 2)), (q(5, 2), qi(2))] {
            let lhs = min_lorentz_pow_d(&p, &q_).unwrap();
            let rhs = lorentz_norm_pow(&d, &p, &q_).unwrap();
            assert!(
                (lhs.approx - rhs.approx).abs() < 1e-10,
                "{} {}: {} vs {}",
                fmt_q(&p),
                fmt_q(&q_),
                lhs.approx,
                rhs.approx
            );
        }
    }

    #[test]
    fn beta_function() {
        assert_eq!(exact(beta(&qi(2), &qi(2)).unwrap()), q(1, 6));
        assert_eq!(exact(beta(&qi(1), &qi(3)).unwrap()), q(1, 3));
        assert_eq!(exact(beta(&qi(1), &q(3, 2)).unwrap()), q(2, 3));
        assert_eq!(exact(beta(&q(1, 2), &qi(2)).unwrap()), q(4, 3));
        for a in 1..=6 {
            for b in 1..=6 {
                let e = to_f64(&exact(beta(&qi(a), &qi(b)).unwrap()));
                let n = beta_numeric(&qi(a), &qi(b));
                assert!((n.approx - e).abs() <= e * 1e-12);
            }
        }
        // B(1/2, 1/2) = π
        let v = beta(&q(1, 2), &q(1, 2)).unwrap();
        assert!((v.approx - std::f64::consts::PI).abs() < 1e-12);
    }

    #[test]
    fn minima_reduce_to_lp_when_p_equals_q() {
        for k in 1..=3 {
            let p = qi(k);
            assert_eq!(
                exact(min_lorentz_pow_d(&p, &p).unwrap()),
                exact(min_lp_pow_d(&p).unwrap())
            );
            assert_eq!(
                exact(min_lorentz_pow_dtilde(&p, &p).unwrap()),
                exact(min_lp_pow_dtilde(&p).unwrap())
            );
        }
        assert_eq!(exact(min_lp_pow_d(&qi(3)).unwrap()), q(1, 32));
        assert_eq!(exact(min_lp_pow_dtilde(&qi(3)).unwrap()), q(1, 10));
    }

    #[test]
    fn psi_presets_and_validation() {
        let huber = PsiSpec::parse("huber").unwrap();
        assert_eq!(huber.psi(&qi(3)), qi(5));
        assert_eq!(huber.big_psi(&qi(2)), q(1, 3) + qi(2));
        let mixed = PsiSpec::parse("mixed").unwrap();
        assert_eq!(mixed.psi(&qi(1)), q(5, 4));
        let p2 = PsiSpec::parse("power:2").unwrap();
        assert_eq!(p2.big_psi(&qi(3)), qi(9));
        assert_eq!(p2.t(&qi(2)), q(4, 3));
        let t = PsiSpec::parse("taylor:3").unwrap();
        assert_eq!(t.psi(&qi(1)), q(5, 3));
        let inline =
            PsiSpec::parse(r#"{"breakpoints":["0","1"],"pieces":[["0","1"],["-1","2"]]}"#).unwrap();
        assert_eq!(inline.psi(&qi(2)), qi(3));
        for bad in [
            "power:0",
            "cubic",
            r#"{"breakpoints":["0"],"pieces":[["1","1"]]}"#,
            r#"{"breakpoints":["0"],"pieces":[["0","-1"]]}"#,
            r#"{"breakpoints":["0"],"pieces":[["0","-1","1"]]}"#,
            r#"{"breakpoints":["0","1"],"pieces":[["0","1"],["0","2"]]}"#,
            r#"{"breakpoints":["0","1"],"pieces":[["0","1"],["1"]]}"#,
        ] {
            assert!(matches!(PsiSpec::parse(bad), Err(Error::InvalidPsi(_))), "{bad}");
        }
    }

    #[test]
    fn psi_norm_of_grid() {
        let tol = q(1, 1_000_000_000_000);
        let p1 = PsiSpec::power(1);
        let b = psi_norm(&grid_profile_d(), &p1, &tol).unwrap();
        assert!(b.lo <= q(1, 4) && q(1, 4) <= b.hi);
        let b = psi_norm(&grid_profile_d(), &PsiSpec::power(2), &tol).unwrap();
        assert!((b.value().approx - (1.0f64 / 12.0).sqrt()).abs() < 1e-11);
        // bracket soundness
        let m = |k: &Q| PsiSpec::power(2).membership(&grid_profile_d(), k);
        assert!(b.lo < b.hi || b.exact);
        if !b.exact {
            assert!(m(&b.lo) > qi(1) && m(&b.hi) <= qi(1));
        }
        assert_eq!(p1.membership(&grid_profile_d(), &q(1, 4)), qi(1));
        assert!(matches!(psi_norm(&grid_profile_d(), &p1, &qi(0)), Err(Error::ToleranceInvalid)));
    }

    #[test]
    fn psi_minima_match_grid_norms() {
        let tol = q(1, 1 << 40);
        let tolf = to_f64(&tol);
        for name in ["power:1", "power:2", "power:3", "huber", "mixed", "taylor:2"] {
            let psi = PsiSpec::parse(name).unwrap();
            let a = min_psi_norm_d(&psi, &tol).unwrap().value().approx;
            let b = psi_norm(&grid_profile_d(), &psi, &tol).unwrap().value().approx;
            assert!((a - b).abs() <= 2.0 * tolf, "{name}: {a} vs {b}");
            let a = min_psi_norm_dtilde(&psi, &tol).unwrap().value().approx;
            let b = psi_norm(&grid_profile_dtilde(), &psi, &tol).unwrap().value().approx;
            assert!((a - b).abs() <= 2.0 * tolf, "{name}: {a} vs {b}");
        }
        let v = min_psi_norm_dtilde(&PsiSpec::power(1), &tol).unwrap().value();
        assert!((v.approx - 1.0 / 3.0).abs() <= tolf);
        let v = min_psi_norm_dtilde(&PsiSpec::power(2), &tol).unwrap().value();
        assert!((v.approx - (1.0f64 / 6.0).sqrt()).abs() <= tolf);
    }

    #[test]
    fn random_sets_never_beat_the_minima() {
        for seed in 0..20 {
            let p = PointSet::random(1 + seed as usize % 6, seed, 24);
            for k in 1..=3 {
                let pk = qi(k);
                let v = exact(lp_norm_pow(&dist_d(&p), &pk).unwrap());
                assert!(v >= exact(min_lp_pow_d(&pk).unwrap()));
                let v = exact(lp_norm_pow(&dist_dtilde(&p), &pk).unwrap());
                assert!(v >= exact(min_lp_pow_dtilde(&pk).unwrap()));
            }
        }
    }
}
