//! Exact checks of the convolution and distribution inequalities, with
//! witnesses on failure, and a seeded randomized campaign over them.
//!
//! Statements quantified over every `α > 0` (or every s.d. `h`, which reduces
//! to the indicators `1_{(−α,α)}`) are decided on exact piecewise
//! representations of `α ↦ ∫_{−α}^{α}(rhs − lhs)`, never on samples.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use num::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::distribution::{
    compare_profiles, dist_d, dist_dtilde, first_positive_interval, grid_profile_d,
    grid_profile_dtilde, Dominance,
};
use crate::error::{Error, Result};
use crate::piecewise::{PiecewisePoly, StepFunction};
use crate::pointset::{GridClass, PointSet};
use crate::rational::{fmt_q, max_q, q, qi, serde_opt_q, serde_q, Q};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    Charest,
    Main,
    Riesz,
    Nconv,
    Thm1,
    Thm2,
}

impl CheckKind {
    pub const ALL: [CheckKind; 6] = [
        CheckKind::Charest,
        CheckKind::Main,
        CheckKind::Riesz,
        CheckKind::Nconv,
        CheckKind::Thm1,
        CheckKind::Thm2,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CheckKind::Charest => "charest",
            CheckKind::Main => "main",
            CheckKind::Riesz => "riesz",
            CheckKind::Nconv => "nconv",
            CheckKind::Thm1 => "thm1",
            CheckKind::Thm2 => "thm2",
        }
    }

    /// `all` or one check name.
    pub fn parse_set(s: &str) -> Result<Vec<CheckKind>> {
        if s == "all" {
            return Ok(Self::ALL.to_vec());
        }
        Ok(vec![s.parse()?])
    }
}

impl fmt::Display for CheckKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CheckKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown check {s:?}")))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Outcome {
    Holds,
    HoldsWithEquality,
    /// `lhs > rhs`, at `witness` when the inequality is indexed by `α`.
    StrictViolation {
        #[serde(with = "serde_opt_q")]
        witness: Option<Q>,
        #[serde(with = "serde_q")]
        lhs: Q,
        #[serde(with = "serde_q")]
        rhs: Q,
    },
}

impl Outcome {
    pub fn is_violation(&self) -> bool {
        matches!(self, Outcome::StrictViolation { .. })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerificationReport {
    pub check: CheckKind,
    pub instance: serde_json::Value,
    pub outcome: Outcome,
    #[serde(with = "serde_opt_q", skip_serializing_if = "Option::is_none")]
    pub lhs: Option<Q>,
    #[serde(with = "serde_opt_q", skip_serializing_if = "Option::is_none")]
    pub rhs: Option<Q>,
    /// First interval of `α` on which the universal family is strict.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub strict_interval: Option<[String; 2]>,
    /// Equality for every s.d. `h` (or every `α`).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub universal_equality: Option<bool>,
    /// The structural equality condition: `g = M_1`, `g_j^* = M_1`, or the
    /// grid classification.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub structural_equality: Option<bool>,
    /// Equality detection agrees with the structural condition.
    pub consistent: bool,
    #[serde(skip)]
    pub elapsed: Duration,
}

impl VerificationReport {
    fn new(check: CheckKind, instance: serde_json::Value, outcome: Outcome) -> Self {
        VerificationReport {
            check,
            instance,
            outcome,
            lhs: None,
            rhs: None,
            strict_interval: None,
            universal_equality: None,
            structural_equality: None,
            consistent: true,
            elapsed: Duration::ZERO,
        }
    }

    pub fn is_equality(&self) -> bool {
        self.outcome == Outcome::HoldsWithEquality
    }
}

fn outcome_of(lhs: &Q, rhs: &Q) -> Outcome {
    use std::cmp::Ordering::*;
    match lhs.cmp(rhs) {
        Less => Outcome::Holds,
        Equal => Outcome::HoldsWithEquality,
        Greater => Outcome::StrictViolation {
            witness: None,
            lhs: lhs.clone(),
            rhs: rhs.clone(),
        },
    }
}

fn json<T: Serialize>(v: &T) -> serde_json::Value {
    serde_json::to_value(v).expect("instances serialize")
}

fn interval_strings((a, b): (Q, Q)) -> [String; 2] {
    [fmt_q(&a), fmt_q(&b)]
}

/// `0 ≤ g ≤ 1` and `∫ g = 1`, exactly.
pub fn validate_density(g: &PiecewisePoly) -> Result<()> {
    if !g.is_nonnegative() {
        return Err(Error::HypothesisViolated("density takes negative values".into()));
    }
    let excess = g.sub(&PiecewisePoly::indicator(
        g.support().map(|s| s.0).unwrap_or_else(Q::zero),
        g.support().map(|s| s.1).unwrap_or_else(Q::zero),
        Q::one(),
    ));
    if excess.iter_pieces().any(|(a, b, p)| {
        p.scale(&-Q::one()).negative_point_in(a, b).is_some()
    }) {
        return Err(Error::HypothesisViolated("density exceeds 1".into()));
    }
    let mass = g.total_integral();
    if !mass.is_one() {
        return Err(Error::HypothesisViolated(format!(
            "density has integral {}",
            fmt_q(&mass)
        )));
    }
    Ok(())
}

fn validate_step_nonneg(f: &PiecewisePoly) -> Result<()> {
    if !f.is_step() {
        return Err(Error::NotAStepFunction);
    }
    if !f.is_nonnegative() {
        return Err(Error::NegativeValues);
    }
    Ok(())
}

fn validate_sd(f: &PiecewisePoly, name: &str) -> Result<()> {
    if !f.is_sd() || !f.is_nonnegative() {
        return Err(Error::HypothesisViolated(format!(
            "{name} is not symmetrically decreasing"
        )));
    }
    Ok(())
}

/// `α ↦ ∫_{−α}^{α} w` on `(0, len)`, for `len ≥ max |supp w|`.
pub fn symmetric_cumulative(w: &PiecewisePoly, len: &Q) -> PiecewisePoly {
    let zero = Q::zero();
    let folded = w.add(&w.reflect()).restrict(&zero, len);
    let c = folded.integral_from(&zero);
    let end = folded.support().map(|s| s.1).unwrap_or_else(|| zero.clone());
    c.restrict(&zero, &end)
        .add(&PiecewisePoly::indicator(end, len.clone(), folded.total_integral()))
}

fn reach(fs: &[&PiecewisePoly]) -> Q {
    let mut m = Q::one();
    for f in fs {
        if let Some((a, b)) = f.support() {
            m = max_q(&m, max_q(&a.abs(), &b.abs())).clone();
        }
    }
    m + Q::one()
}

/// Decision of `∫_{−α}^{α} small ≤ ∫_{−α}^{α} big` for every `α > 0`.
enum Universal {
    Equal,
    Strict(Q, Q),
    Fails { alpha: Q, lhs: Q, rhs: Q },
}

fn decide_universal(small: &PiecewisePoly, big: &PiecewisePoly) -> Universal {
    let len = reach(&[small, big]);
    let cs = symmetric_cumulative(small, &len);
    let cb = symmetric_cumulative(big, &len);
    let gap = cb.sub(&cs);
    for (a, b, p) in gap.iter_pieces() {
        if let Some(alpha) = p.negative_point_in(a, b) {
            return Universal::Fails {
                lhs: cs.evaluate(&alpha),
                rhs: cb.evaluate(&alpha),
                alpha,
            };
        }
    }
    match first_positive_interval(&gap) {
        None => Universal::Equal,
        Some((a, b)) => Universal::Strict(a, b),
    }
}

/// `∫_I g ≤ ∫_I M_1` for every symmetric `I = (−α, α)`, with equality for
/// all `α` iff `g = M_1`. The ladder adds explicit exact evaluations.
pub fn check_charest(g: &StepFunction, alphas: &[Q]) -> Result<VerificationReport> {
    validate_density(g)?;
    let start = Instant::now();
    let m1 = PiecewisePoly::bspline(1);
    let instance = serde_json::json!({ "g": json(g) });
    let mut ladder: Vec<Q> = alphas.iter().filter(|a| a.is_positive()).cloned().collect();
    ladder.extend(g.breakpoints().iter().map(|b| b.abs()).filter(|b| b.is_positive()));
    for alpha in &ladder {
        let lhs = g.integrate(Some(&-alpha.clone()), Some(alpha));
        let rhs = m1.integrate(Some(&-alpha.clone()), Some(alpha));
        if lhs > rhs {
            let mut r = VerificationReport::new(
                CheckKind::Charest,
                instance,
                Outcome::StrictViolation {
                    witness: Some(alpha.clone()),
                    lhs,
                    rhs,
                },
            );
            r.elapsed = start.elapsed();
            return Ok(r);
        }
    }
    let structural = *g == m1;
    let mut r = universal_report(CheckKind::Charest, instance, g, &m1);
    r.structural_equality = Some(structural);
    r.consistent = r.is_equality() == structural;
    r.elapsed = start.elapsed();
    Ok(r)
}

fn universal_report(
    check: CheckKind,
    instance: serde_json::Value,
    small: &PiecewisePoly,
    big: &PiecewisePoly,
) -> VerificationReport {
    match decide_universal(small, big) {
        Universal::Equal => {
            let mut r = VerificationReport::new(check, instance, Outcome::HoldsWithEquality);
            r.universal_equality = Some(true);
            r
        }
        Universal::Strict(a, b) => {
            let mut r = VerificationReport::new(check, instance, Outcome::Holds);
            r.universal_equality = Some(false);
            r.strict_interval = Some(interval_strings((a, b)));
            r
        }
        Universal::Fails { alpha, lhs, rhs } => VerificationReport::new(
            check,
            instance,
            Outcome::StrictViolation {
                witness: Some(alpha),
                lhs,
                rhs,
            },
        ),
    }
}

/// `∫ h (f*g) ≤ ∫ h (f*M_1)` for s.d. `f, h` and a density `g`; equality for
/// every s.d. `h` is decided too and, for non-zero `f`, must force `g = M_1`.
pub fn check_thm_main(
    f: &PiecewisePoly,
    g: &StepFunction,
    h: &PiecewisePoly,
) -> Result<VerificationReport> {
    validate_sd(f, "f")?;
    validate_sd(h, "h")?;
    validate_density(g)?;
    let start = Instant::now();
    let m1 = PiecewisePoly::bspline(1);
    let fg = f.convolve(g);
    let fm = f.convolve(&m1);
    let lhs = h.mul(&fg).total_integral();
    let rhs = h.mul(&fm).total_integral();
    let instance = serde_json::json!({ "f": json(f), "g": json(g), "h": json(h) });
    let mut r = VerificationReport::new(CheckKind::Main, instance.clone(), outcome_of(&lhs, &rhs));
    if !r.outcome.is_violation() {
        let u = universal_report(CheckKind::Main, instance, &fg, &fm);
        if u.outcome.is_violation() {
            r = u;
        } else {
            r.universal_equality = u.universal_equality;
            r.strict_interval = u.strict_interval;
        }
    }
    let structural = *g == m1;
    let universal = r.universal_equality == Some(true);
    r.structural_equality = Some(structural);
    // g = M_1 gives equality everywhere; the converse needs f ≠ 0
    r.consistent = (!structural || (universal && r.is_equality())) && (f.is_zero() || !universal || structural);
    r.lhs = Some(lhs);
    r.rhs = Some(rhs);
    r.elapsed = start.elapsed();
    Ok(r)
}

/// `∫ f (g_1 * ⋯ * g_n) ≤ ∫ f^* (g_1^* * ⋯ * g_n^*)` for non-negative steps.
pub fn check_riesz(f: &StepFunction, gs: &[StepFunction]) -> Result<VerificationReport> {
    if gs.is_empty() {
        return Err(Error::HypothesisViolated("need at least one g".into()));
    }
    validate_step_nonneg(f)?;
    for g in gs {
        validate_step_nonneg(g)?;
    }
    let start = Instant::now();
    let lhs = f.mul(&PiecewisePoly::convolve_all(gs)).total_integral();
    let stars = gs
        .iter()
        .map(PiecewisePoly::sd_rearrange)
        .collect::<Result<Vec<_>>>()?;
    let rhs = f
        .sd_rearrange()?
        .mul(&PiecewisePoly::convolve_all(&stars))
        .total_integral();
    let instance = serde_json::json!({ "f": json(f), "gs": json(&gs) });
    let mut r = VerificationReport::new(CheckKind::Riesz, instance, outcome_of(&lhs, &rhs));
    let all_sd = f.is_sd() && gs.iter().all(PiecewisePoly::is_sd);
    r.structural_equality = Some(all_sd);
    r.consistent = !all_sd || r.is_equality();
    r.lhs = Some(lhs);
    r.rhs = Some(rhs);
    r.elapsed = start.elapsed();
    Ok(r)
}

/// Extra detail of an n-fold convolution check.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NconvChain {
    /// `∫ h^* (g_1^* * ⋯ * g_n^*)`, between the two sides.
    #[serde(with = "serde_q")]
    pub middle: Q,
    /// Equality for every s.d. `h` in the rearranged inequality.
    pub rearranged_universal_equality: bool,
    pub all_rearrangements_m1: bool,
}

/// `∫ h (g_1 * ⋯ * g_n) ≤ ∫ h^* M_n` for densities `g_j` and a non-negative
/// step `h`. Universal equality (over s.d. `h`) implies every `g_j^* = M_1`;
/// for the rearranged chain step the implication goes both ways.
pub fn check_nconv(gs: &[StepFunction], h: &StepFunction) -> Result<(VerificationReport, NconvChain)> {
    if gs.is_empty() {
        return Err(Error::HypothesisViolated("need at least one g".into()));
    }
    for g in gs {
        validate_density(g)?;
    }
    validate_step_nonneg(h)?;
    let start = Instant::now();
    let n = gs.len();
    let mn = PiecewisePoly::bspline(n);
    let m1 = PiecewisePoly::bspline(1);
    let conv = PiecewisePoly::convolve_all(gs);
    let stars = gs
        .iter()
        .map(PiecewisePoly::sd_rearrange)
        .collect::<Result<Vec<_>>>()?;
    let conv_star = PiecewisePoly::convolve_all(&stars);
    let h_star = h.sd_rearrange()?;
    let lhs = h.mul(&conv).total_integral();
    let middle = h_star.mul(&conv_star).total_integral();
    let rhs = h_star.mul(&mn).total_integral();
    let instance = serde_json::json!({ "gs": json(&gs), "h": json(h) });
    let mut r = VerificationReport::new(CheckKind::Nconv, instance.clone(), outcome_of(&lhs, &rhs));
    if lhs > middle || middle > rhs {
        r.outcome = Outcome::StrictViolation {
            witness: None,
            lhs: lhs.clone(),
            rhs: rhs.clone(),
        };
    }
    let all_m1 = stars.iter().all(|s| *s == m1);
    let mut rearranged_equal = false;
    if !r.outcome.is_violation() {
        let u = universal_report(CheckKind::Nconv, instance.clone(), &conv, &mn);
        let v = universal_report(CheckKind::Nconv, instance, &conv_star, &mn);
        if u.outcome.is_violation() {
            r = u;
        } else if v.outcome.is_violation() {
            r = v;
        } else {
            r.universal_equality = u.universal_equality;
            r.strict_interval = u.strict_interval;
            rearranged_equal = v.universal_equality == Some(true);
        }
    }
    let universal = r.universal_equality == Some(true);
    r.structural_equality = Some(all_m1);
    r.consistent = rearranged_equal == all_m1 && (!universal || all_m1);
    r.lhs = Some(lhs);
    r.rhs = Some(rhs);
    r.elapsed = start.elapsed();
    Ok((
        r,
        NconvChain {
            middle,
            rearranged_universal_equality: rearranged_equal,
            all_rearrangements_m1: all_m1,
        },
    ))
}

fn theorem_report(
    check: CheckKind,
    p: &PointSet,
    dom: Dominance,
    structural: bool,
    start: Instant,
) -> VerificationReport {
    let instance = json(p);
    let mut r = match dom {
        Dominance::Equal => {
            let mut r = VerificationReport::new(check, instance, Outcome::HoldsWithEquality);
            r.universal_equality = Some(true);
            r
        }
        Dominance::Strict { from, to } => {
            let mut r = VerificationReport::new(check, instance, Outcome::Holds);
            r.universal_equality = Some(false);
            r.strict_interval = Some(interval_strings((from, to)));
            r
        }
        Dominance::Violated { alpha, lhs, rhs } => VerificationReport::new(
            check,
            instance,
            Outcome::StrictViolation {
                witness: Some(alpha),
                lhs,
                rhs,
            },
        ),
    };
    r.structural_equality = Some(structural);
    r.consistent = r.is_equality() == structural;
    r.elapsed = start.elapsed();
    r
}

/// `P(|D| < α) ≤ P(|D_{Γ_N}| < α)` for all `α`, equality iff `P = Γ_N`.
pub fn check_theorem1(p: &PointSet) -> VerificationReport {
    let start = Instant::now();
    let dom = compare_profiles(&dist_d(p), &grid_profile_d());
    let structural = p.classify() == GridClass::CenteredGrid;
    theorem_report(CheckKind::Thm1, p, dom, structural, start)
}

/// `P(|D̃| < α) ≤ P(|D̃_{Γ_N}| < α)` for all `α`, equality iff `P` is a
/// translated grid `Γ_N^δ`, where `δ = 1/N` must be admitted as well (see
/// [`PointSet::is_closed_translated_grid`]).
pub fn check_theorem2(p: &PointSet) -> VerificationReport {
    let start = Instant::now();
    let dom = compare_profiles(&dist_dtilde(p), &grid_profile_dtilde());
    let structural = p.is_closed_translated_grid();
    theorem_report(CheckKind::Thm2, p, dom, structural, start)
}

/// Seeded generators of valid random instances.
pub mod random {
    use super::*;

    fn rat<R: Rng>(rng: &mut R, lo: i64, hi: i64, den: i64) -> Q {
        q(rng.gen_range(lo..=hi), den)
    }

    /// A density with `0 ≤ g ≤ 1`, `∫ g = 1`: the density of a random point
    /// set, `M_1`, a translate of `M_1`, or a random ladder of steps.
    pub fn density<R: Rng>(rng: &mut R) -> StepFunction {
        match rng.gen_range(0..8) {
            0 => PiecewisePoly::bspline(1),
            1 => {
                let c = rat(rng, -8, 8, 8);
                PiecewisePoly::indicator(c.clone() - q(1, 2), c + q(1, 2), Q::one())
            }
            2 | 3 => {
                let n = rng.gen_range(1..=6);
                let den = [2 * n as u64, 8, 16][rng.gen_range(0..3)];
                let p = PointSet::random_with(rng, n, den.max(2));
                crate::distribution::density_of_d(&p).density
            }
            _ => ladder(rng),
        }
    }

    /// Pieces of width `u_i / Σ u_j v_j` and height `v_i ∈ (0, 1]`, possibly
    /// separated by gaps.
    fn ladder<R: Rng>(rng: &mut R) -> StepFunction {
        let k = rng.gen_range(1..=4);
        let us: Vec<Q> = (0..k).map(|_| qi(rng.gen_range(1..=6))).collect();
        let vs: Vec<Q> = (0..k).map(|_| q(rng.gen_range(1..=4), 4)).collect();
        let norm: Q = us.iter().zip(&vs).map(|(u, v)| u * v).sum();
        let mut x = rat(rng, -8, 4, 4);
        let mut intervals = Vec::with_capacity(k);
        for u in &us {
            if rng.gen_bool(0.3) {
                x += rat(rng, 1, 4, 4);
            }
            let end = &x + u / &norm;
            intervals.push((x.clone(), end.clone()));
            x = end;
        }
        PiecewisePoly::make_step(&intervals, &vs).expect("ordered intervals")
    }

    /// `Σ c_i 1_{(−t_i, t_i)}`, occasionally a B-spline.
    pub fn sd<R: Rng>(rng: &mut R, allow_splines: bool) -> PiecewisePoly {
        if allow_splines && rng.gen_bool(0.25) {
            return PiecewisePoly::bspline(rng.gen_range(1..=3));
        }
        let k = rng.gen_range(1..=3);
        let intervals: Vec<(Q, Q)> = (0..k)
            .map(|_| {
                let t = rat(rng, 1, 8, 4);
                (-t.clone(), t)
            })
            .collect();
        let values: Vec<Q> = (0..k).map(|_| rat(rng, 1, 4, 4)).collect();
        PiecewisePoly::make_step(&intervals, &values).expect("valid steps")
    }

    /// Overlapping random intervals with positive heights.
    pub fn nonneg_step<R: Rng>(rng: &mut R) -> StepFunction {
        let k = rng.gen_range(1..=4);
        let intervals: Vec<(Q, Q)> = (0..k)
            .map(|_| {
                let a = rat(rng, -12, 8, 4);
                let b = &a + rat(rng, 1, 8, 4);
                (a, b)
            })
            .collect();
        let values: Vec<Q> = (0..k).map(|_| rat(rng, 1, 6, 3)).collect();
        PiecewisePoly::make_step(&intervals, &values).expect("valid steps")
    }

    /// A point set with `1 ≤ N ≤ n_max`, hitting the grids now and then.
    pub fn point_set<R: Rng>(rng: &mut R, n_max: usize) -> PointSet {
        let n = rng.gen_range(1..=n_max.max(1));
        match rng.gen_range(0..8) {
            0 => PointSet::centered_grid(n),
            1 => {
                let k = rng.gen_range(1..=5i64);
                let j = rng.gen_range(0..k);
                PointSet::translated_grid(n, &q(j, k * n as i64)).expect("delta in range")
            }
            _ => {
                let den = [2 * n as u64, 4 * n as u64, 64][rng.gen_range(0..3)];
                PointSet::random_with(rng, n, den)
            }
        }
    }
}

/// Runs one trial of `check`; the random stream depends only on
/// `(seed, index, check)`.
pub fn run_trial(check: CheckKind, seed: u64, index: u64, n_max: usize) -> Result<VerificationReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index * CheckKind::ALL.len() as u64 + check as u64);
    let rng = &mut rng;
    match check {
        CheckKind::Charest => {
            let g = random::density(rng);
            let alphas: Vec<Q> = (1..=20).map(|k| q(k, 8)).collect();
            check_charest(&g, &alphas)
        }
        CheckKind::Main => {
            let f = random::sd(rng, true);
            let g = random::density(rng);
            let h = random::sd(rng, true);
            check_thm_main(&f, &g, &h)
        }
        CheckKind::Riesz => {
            let f = random::nonneg_step(rng);
            let n = rng.gen_range(1..=3);
            let gs: Vec<_> = (0..n).map(|_| random::nonneg_step(rng)).collect();
            check_riesz(&f, &gs)
        }
        CheckKind::Nconv => {
            let n = rng.gen_range(1..=3);
            let gs: Vec<_> = (0..n).map(|_| random::density(rng)).collect();
            let h = if rng.gen_bool(0.5) {
                random::sd(rng, false)
            } else {
                random::nonneg_step(rng)
            };
            check_nconv(&gs, &h).map(|(r, _)| r)
        }
        CheckKind::Thm1 => Ok(check_theorem1(&random::point_set(rng, n_max))),
        CheckKind::Thm2 => Ok(check_theorem2(&random::point_set(rng, n_max))),
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct CheckTally {
    pub run: usize,
    pub holds: usize,
    pub equality: usize,
    pub violations: usize,
    pub inconsistent: usize,
    pub errors: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CampaignSummary {
    pub seed: u64,
    pub trials: usize,
    pub n_max: usize,
    pub checks: Vec<CheckKind>,
    pub tallies: BTreeMap<CheckKind, CheckTally>,
    /// Every report that is a violation or misclassifies equality.
    pub failures: Vec<VerificationReport>,
    pub errors: Vec<String>,
    #[serde(skip)]
    pub elapsed: Duration,
}

impl CampaignSummary {
    pub fn ok(&self) -> bool {
        self.failures.is_empty() && self.errors.is_empty()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("summaries serialize")
    }
}

/// Thread count from `EXDISC_THREADS`, if set to a positive integer.
pub fn thread_cap() -> Option<usize> {
    std::env::var("EXDISC_THREADS")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
}

/// Runs `trials` seeded instances of each selected check in parallel. The
/// summary is independent of scheduling: trials are merged by index.
pub fn campaign(seed: u64, trials: usize, n_max: usize, checks: &[CheckKind]) -> CampaignSummary {
    let start = Instant::now();
    let mut checks = checks.to_vec();
    checks.sort();
    checks.dedup();
    let jobs: Vec<(CheckKind, u64)> = checks
        .iter()
        .flat_map(|&c| (0..trials as u64).map(move |i| (c, i)))
        .collect();
    let work = || -> Vec<(CheckKind, u64, Result<VerificationReport>)> {
        jobs.par_iter()
            .map(|&(c, i)| (c, i, run_trial(c, seed, i, n_max)))
            .collect()
    };
    let results = match thread_cap() {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .expect("thread pool")
            .install(work),
        None => work(),
    };
    let mut tallies: BTreeMap<CheckKind, CheckTally> =
        checks.iter().map(|&c| (c, CheckTally::default())).collect();
    let mut failures = Vec::new();
    let mut errors = Vec::new();
    for (c, i, res) in results {
        let t = tallies.get_mut(&c).expect("tally exists");
        t.run += 1;
        match res {
            Err(e) => {
                t.errors += 1;
                errors.push(format!("{c} trial {i}: {e}"));
            }
            Ok(r) => {
                match r.outcome {
                    Outcome::Holds => t.holds += 1,
                    Outcome::HoldsWithEquality => t.equality += 1,
                    Outcome::StrictViolation { .. } => t.violations += 1,
                }
                if !r.consistent {
                    t.inconsistent += 1;
                }
                if r.outcome.is_violation() || !r.consistent {
                    failures.push(r);
                }
            }
        }
    }
    CampaignSummary {
        seed,
        trials,
        n_max,
        checks,
        tallies,
        failures,
        errors,
        elapsed: start.elapsed(),
    }
}
