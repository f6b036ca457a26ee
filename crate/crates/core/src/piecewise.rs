//! Exact calculus of compactly supported piecewise polynomial functions.
//!
//! A [`PiecewisePoly`] is an a.e. equivalence class: values at breakpoints
//! carry no meaning and every operation returns the canonical form, so two
//! functions are equal a.e. exactly when they compare equal.

use std::cmp::Ordering;

use num::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::rational::{fmt_q, max_q, min_q, q, serde_vec_q, to_f64, Q};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(try_from = "RawPiecewise", into = "RawPiecewise")]
pub struct PiecewisePoly {
    breakpoints: Vec<Q>,
    pieces: Vec<Poly>,
}

/// A [`PiecewisePoly`] all of whose pieces are constant.
pub type StepFunction = PiecewisePoly;

#[derive(Serialize, Deserialize)]
struct RawPiecewise {
    #[serde(with = "serde_vec_q")]
    breakpoints: Vec<Q>,
    pieces: Vec<Poly>,
}

impl TryFrom<RawPiecewise> for PiecewisePoly {
    type Error = Error;
    fn try_from(raw: RawPiecewise) -> Result<Self> {
        PiecewisePoly::from_parts(raw.breakpoints, raw.pieces)
    }
}

impl From<PiecewisePoly> for RawPiecewise {
    fn from(f: PiecewisePoly) -> Self {
        RawPiecewise {
            breakpoints: f.breakpoints,
            pieces: f.pieces,
        }
    }
}

/// Certified enclosure `[lower, upper]` of a Lebesgue measure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelMeasure {
    pub lower: Q,
    pub upper: Q,
}

impl LevelMeasure {
    pub fn exact(&self) -> Option<Q> {
        (self.lower == self.upper).then(|| self.lower.clone())
    }
}

impl PiecewisePoly {
    pub fn zero() -> Self {
        PiecewisePoly::default()
    }

    /// Builds from `m+1` strictly increasing breakpoints and `m` pieces.
    pub fn from_parts(breakpoints: Vec<Q>, pieces: Vec<Poly>) -> Result<Self> {
        if breakpoints.is_empty() && pieces.is_empty() {
            return Ok(Self::zero());
        }
        if breakpoints.len() != pieces.len() + 1 {
            return Err(Error::MalformedPiecewise(format!(
                "{} breakpoints for {} pieces",
                breakpoints.len(),
                pieces.len()
            )));
        }
        if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::MalformedPiecewise(
                "breakpoints must be strictly increasing".into(),
            ));
        }
        Ok(Self::canonical(breakpoints, pieces))
    }

    fn canonical(breakpoints: Vec<Q>, pieces: Vec<Poly>) -> Self {
        let mut bps: Vec<Q> = Vec::with_capacity(breakpoints.len());
        let mut ps: Vec<Poly> = Vec::with_capacity(pieces.len());
        let mut it = breakpoints.into_iter();
        let Some(first) = it.next() else {
            return Self::zero();
        };
        bps.push(first);
        for (b, p) in it.zip(pieces) {
            if ps.last() == Some(&p) {
                *bps.last_mut().unwrap() = b;
            } else {
                ps.push(p);
                bps.push(b);
            }
        }
        let lead = ps.iter().take_while(|p| p.is_zero()).count();
        if lead == ps.len() {
            return Self::zero();
        }
        let trail = ps.iter().rev().take_while(|p| p.is_zero()).count();
        ps.truncate(ps.len() - trail);
        bps.truncate(bps.len() - trail);
        ps.drain(..lead);
        bps.drain(..lead);
        PiecewisePoly {
            breakpoints: bps,
            pieces: ps,
        }
    }

    /// `c · 1_{(a,b)}`.
    pub fn indicator(a: Q, b: Q, c: Q) -> Self {
        if a >= b || c.is_zero() {
            return Self::zero();
        }
        Self::canonical(vec![a, b], vec![Poly::constant(c)])
    }

    /// `Σ values_i · 1_{intervals_i}`; overlapping intervals add up.
    pub fn make_step(intervals: &[(Q, Q)], values: &[Q]) -> Result<StepFunction> {
        if intervals.len() != values.len() {
            return Err(Error::MalformedPiecewise(
                "interval and value counts differ".into(),
            ));
        }
        if let Some((a, b)) = intervals.iter().find(|(a, b)| a > b) {
            return Err(Error::MalformedInterval(fmt_q(a), fmt_q(b)));
        }
        let mut events: Vec<(Q, Q)> = Vec::with_capacity(2 * intervals.len());
        for ((a, b), v) in intervals.iter().zip(values) {
            if a < b && !v.is_zero() {
                events.push((a.clone(), v.clone()));
                events.push((b.clone(), -v.clone()));
            }
        }
        events.sort_by(|x, y| x.0.cmp(&y.0));
        let mut bps = Vec::new();
        let mut ps = Vec::new();
        let mut level = Q::zero();
        let mut i = 0;
        while i < events.len() {
            let x = events[i].0.clone();
            if !bps.is_empty() {
                ps.push(Poly::constant(level.clone()));
            }
            bps.push(x.clone());
            while i < events.len() && events[i].0 == x {
                level += &events[i].1;
                i += 1;
            }
        }
        Ok(Self::canonical(bps, ps))
    }

    pub fn breakpoints(&self) -> &[Q] {
        &self.breakpoints
    }

    pub fn pieces(&self) -> &[Poly] {
        &self.pieces
    }

    /// `(open interval, polynomial)` for every piece.
    pub fn iter_pieces(&self) -> impl Iterator<Item = (&Q, &Q, &Poly)> {
        self.pieces
            .iter()
            .enumerate()
            .map(|(i, p)| (&self.breakpoints[i], &self.breakpoints[i + 1], p))
    }

    pub fn is_zero(&self) -> bool {
        self.pieces.is_empty()
    }

    /// Closed hull of the support, `None` for the zero function.
    pub fn support(&self) -> Option<(Q, Q)> {
        Some((
            self.breakpoints.first()?.clone(),
            self.breakpoints.last()?.clone(),
        ))
    }

    pub fn max_degree(&self) -> usize {
        self.pieces.iter().map(Poly::degree).max().unwrap_or(0)
    }

    pub fn is_step(&self) -> bool {
        self.pieces.iter().all(Poly::is_constant)
    }

    /// Value at `t`; at a breakpoint the right limit is returned.
    pub fn evaluate(&self, t: &Q) -> Q {
        self.piece_at(t)
            .map(|p| p.eval(t))
            .unwrap_or_else(Q::zero)
    }

    fn piece_at(&self, t: &Q) -> Option<&Poly> {
        let first = self.breakpoints.first()?;
        if t < first || t >= self.breakpoints.last()? {
            return None;
        }
        let idx = self.breakpoints.partition_point(|b| b <= t) - 1;
        self.pieces.get(idx)
    }

    pub fn right_limit(&self, t: &Q) -> Q {
        self.evaluate(t)
    }

    pub fn left_limit(&self, t: &Q) -> Q {
        let Some(first) = self.breakpoints.first() else {
            return Q::zero();
        };
        if t <= first || t > self.breakpoints.last().unwrap() {
            return Q::zero();
        }
        let idx = self.breakpoints.partition_point(|b| b < t) - 1;
        self.pieces[idx].eval(t)
    }

    /// Piece polynomials of `self` on each elementary interval of `grid`.
    fn pieces_on(&self, grid: &[Q]) -> Vec<Poly> {
        let mut out = Vec::with_capacity(grid.len().saturating_sub(1));
        let mut j = 0;
        for w in grid.windows(2) {
            if self.is_zero() || w[0] < self.breakpoints[0] || &w[1] > self.breakpoints.last().unwrap()
            {
                out.push(Poly::zero());
                continue;
            }
            while self.breakpoints[j + 1] <= w[0] {
                j += 1;
            }
            out.push(self.pieces[j].clone());
        }
        out
    }

    fn zip_with(&self, other: &Self, op: impl Fn(&Poly, &Poly) -> Poly) -> Self {
        let mut grid: Vec<Q> = self
            .breakpoints
            .iter()
            .chain(&other.breakpoints)
            .cloned()
            .collect();
        grid.sort();
        grid.dedup();
        if grid.len() < 2 {
            return Self::zero();
        }
        let a = self.pieces_on(&grid);
        let b = other.pieces_on(&grid);
        let ps = a.iter().zip(&b).map(|(x, y)| op(x, y)).collect();
        Self::canonical(grid, ps)
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a - b)
    }

    /// Pointwise product.
    pub fn mul(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a * b)
    }

    pub fn scale(&self, c: &Q) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self::canonical(
            self.breakpoints.clone(),
            self.pieces.iter().map(|p| p.scale(c)).collect(),
        )
    }

    /// `t ↦ f(-t)`.
    pub fn reflect(&self) -> Self {
        Self::canonical(
            self.breakpoints.iter().rev().map(|b| -b).collect(),
            self.pieces.iter().rev().map(Poly::reflect).collect(),
        )
    }

    /// `t ↦ f(k·t)` for `k > 0`.
    pub fn dilate(&self, k: &Q) -> Self {
        assert!(k.is_positive(), "dilation factor must be positive");
        let zero = Q::zero();
        Self::canonical(
            self.breakpoints.iter().map(|b| b / k).collect(),
            self.pieces
                .iter()
                .map(|p| p.compose_affine(k, &zero))
                .collect(),
        )
    }

    /// `f · 1_{(a,b)}`.
    pub fn restrict(&self, a: &Q, b: &Q) -> Self {
        if a >= b {
            return Self::zero();
        }
        self.mul(&Self::indicator(a.clone(), b.clone(), Q::one()))
    }

    /// Exact `∫_a^b f`, where `None` stands for an infinite bound.
    pub fn integrate(&self, a: Option<&Q>, b: Option<&Q>) -> Q {
        let mut total = Q::zero();
        for (lo, hi, p) in self.iter_pieces() {
            let lo = match a {
                Some(a) => max_q(lo, a),
                None => lo,
            };
            let hi = match b {
                Some(b) => min_q(hi, b),
                None => hi,
            };
            if lo < hi {
                total += p.integrate(lo, hi);
            }
        }
        total
    }

    pub fn total_integral(&self) -> Q {
        self.integrate(None, None)
    }

    /// `x ↦ ∫_{x0}^x f` on `[x0, t_m]`, zero elsewhere.
    pub fn integral_from(&self, x0: &Q) -> Self {
        let mut bps = vec![x0.clone()];
        let mut ps = Vec::new();
        let mut acc = Q::zero();
        for (lo, hi, p) in self.iter_pieces() {
            if hi <= x0 {
                continue;
            }
            let lo = max_q(lo, x0);
            if lo > bps.last().unwrap() {
                // gap before this piece: constant accumulated mass
                ps.push(Poly::constant(acc.clone()));
                bps.push(lo.clone());
            }
            let anti = p.antiderivative();
            let offset = &acc - anti.eval(lo);
            ps.push(&anti + &Poly::constant(offset));
            acc += p.integrate(lo, hi);
            bps.push(hi.clone());
        }
        if ps.is_empty() {
            return Self::zero();
        }
        Self::canonical(bps, ps)
    }

    /// Exact convolution `(f*g)(x) = ∫ f(x-y) g(y) dy`.
    pub fn convolve(&self, other: &Self) -> Self {
        let mut events: Vec<(Q, Poly)> = Vec::new();
        for (a, b, p) in self.iter_pieces() {
            if p.is_zero() {
                continue;
            }
            let split = split_in_x(p);
            for (c, d, qy) in other.iter_pieces() {
                if qy.is_zero() {
                    continue;
                }
                convolve_pieces(&split, (a, b), (c, d), qy, &mut events);
            }
        }
        assemble_events(events)
    }

    /// `f*f*…*f` style folds need an identity-free start; convolves all inputs.
    pub fn convolve_all(fs: &[Self]) -> Self {
        let mut it = fs.iter();
        let Some(first) = it.next() else {
            return Self::zero();
        };
        it.fold(first.clone(), |acc, f| acc.convolve(f))
    }

    /// Centered cardinal B-spline `M_n`.
    pub fn bspline(n: usize) -> Self {
        assert!(n >= 1, "B-spline order must be at least 1");
        let m1 = Self::indicator(q(-1, 2), q(1, 2), Q::one());
        let mut m = m1.clone();
        for _ in 1..n {
            m = m.convolve(&m1);
        }
        m
    }

    /// Whether `f ≥ 0` almost everywhere, decided exactly.
    pub fn is_nonnegative(&self) -> bool {
        self.iter_pieces()
            .all(|(a, b, p)| p.negative_point_in(a, b).is_none())
    }

    /// Symmetric decreasing rearrangement of a non-negative step function.
    pub fn sd_rearrange(&self) -> Result<StepFunction> {
        if !self.is_step() {
            return Err(Error::NotAStepFunction);
        }
        let mut levels: Vec<(Q, Q)> = Vec::new();
        for (a, b, p) in self.iter_pieces() {
            let v = p.coeffs().first().cloned().unwrap_or_else(Q::zero);
            if v.is_negative() {
                return Err(Error::NegativeValues);
            }
            if v.is_positive() {
                levels.push((v, b - a));
            }
        }
        levels.sort_by(|x, y| y.0.cmp(&x.0));
        let two = Q::from_integer(2.into());
        let mut intervals = Vec::new();
        let mut values = Vec::new();
        let mut inner = Q::zero();
        let mut i = 0;
        while i < levels.len() {
            let v = levels[i].0.clone();
            let mut m = Q::zero();
            while i < levels.len() && levels[i].0 == v {
                m += &levels[i].1;
                i += 1;
            }
            let outer = &inner + &m / &two;
            intervals.push((-outer.clone(), -inner.clone()));
            values.push(v.clone());
            intervals.push((inner.clone(), outer.clone()));
            values.push(v);
            inner = outer;
        }
        Self::make_step(&intervals, &values)
    }

    /// Symmetric about 0 and non-increasing on `(0, ∞)`, almost everywhere.
    pub fn is_sd(&self) -> bool {
        if self.is_zero() {
            return true;
        }
        if *self != self.reflect() {
            return false;
        }
        let zero = Q::zero();
        for (a, b, p) in self.iter_pieces() {
            if b <= &zero {
                continue;
            }
            let a = max_q(a, &zero);
            if p.derivative().scale(&-Q::one()).negative_point_in(a, b).is_some() {
                return false;
            }
        }
        self.breakpoints
            .iter()
            .filter(|t| t.is_positive())
            .all(|t| self.left_limit(t) >= self.right_limit(t))
    }

    /// Measure of `{f ≥ λ}` for `λ > 0`, exact whenever the boundary points
    /// are rational and found exactly.
    pub fn level_measure(&self, lambda: &Q) -> LevelMeasure {
        self.level_measure_tol(lambda, &Q::new(One::one(), num::pow(2.into(), 64)))
    }

    pub fn level_measure_tol(&self, lambda: &Q, tol: &Q) -> LevelMeasure {
        let mut lower = Q::zero();
        let mut upper = Q::zero();
        let lam = Poly::constant(lambda.clone());
        for (a, b, p) in self.iter_pieces() {
            let d = p - &lam;
            if d.is_zero() {
                lower += b - a;
                upper += b - a;
                continue;
            }
            let roots = d.roots_in(a, b, tol);
            let mut cuts = Vec::with_capacity(roots.len() + 2);
            cuts.push((a.clone(), a.clone()));
            cuts.extend(roots.into_iter().map(|r| (r.lo, r.hi)));
            cuts.push((b.clone(), b.clone()));
            let two = Q::from_integer(2.into());
            for w in cuts.windows(2) {
                let sample = (&w[0].1 + &w[1].0) / &two;
                if !d.eval(&sample).is_negative() {
                    lower += &w[1].0 - &w[0].1;
                    upper += &w[1].1 - &w[0].0;
                }
            }
        }
        LevelMeasure { lower, upper }
    }

    /// `(t, f(t))` rows on a uniform grid of `n+1` points over `[lo, hi]`.
    pub fn sample_csv(&self, lo: &Q, hi: &Q, n: usize) -> String {
        let mut out = String::from("t,f\n");
        let n = n.max(1);
        let step = (hi - lo) / Q::from_integer(n.into());
        for k in 0..=n {
            let t = lo + &step * Q::from_integer(k.into());
            let v = self.evaluate(&t);
            out.push_str(&format!("{},{}\n", fmt_q(&t), fmt_q(&v)));
        }
        out
    }

    /// Approximate value, for plotting and diagnostics only.
    pub fn evaluate_f64(&self, t: f64) -> f64 {
        for (a, b, p) in self.iter_pieces() {
            if t >= to_f64(a) && t < to_f64(b) {
                return p.eval_f64(t);
            }
        }
        0.0
    }
}

/// `p(x - y) = Σ_i x^i · B_i(y)`.
fn split_in_x(p: &Poly) -> Vec<Poly> {
    let n = p.coeffs().len();
    let mut out = vec![Vec::<Q>::new(); n];
    for (k, pk) in p.coeffs().iter().enumerate() {
        // (x - y)^k = Σ_i C(k,i) x^i (-y)^{k-i}
        let mut binom = Q::one();
        for (i, row) in out.iter_mut().enumerate().take(k + 1) {
            let j = k - i;
            let sign = if j % 2 == 1 { -Q::one() } else { Q::one() };
            let coeff = pk * &binom * sign;
            if row.len() <= j {
                row.resize(j + 1, Q::zero());
            }
            row[j] += coeff;
            binom = binom * Q::from_integer((k - i).into()) / Q::from_integer((i + 1).into());
        }
    }
    out.into_iter().map(Poly::new).collect()
}

enum Limit<'a> {
    Const(&'a Q),
    /// `x - c`
    Shifted(&'a Q),
}

fn convolve_pieces(
    split: &[Poly],
    (a, b): (&Q, &Q),
    (c, d): (&Q, &Q),
    qy: &Poly,
    events: &mut Vec<(Q, Poly)>,
) {
    let antis: Vec<Poly> = split.iter().map(|bi| (bi * qy).antiderivative()).collect();
    let eval_at = |lim: &Limit| -> Vec<Poly> {
        antis
            .iter()
            .map(|r| match lim {
                Limit::Const(v) => Poly::constant(r.eval(v)),
                Limit::Shifted(s) => r.shift(&-(*s).clone()),
            })
            .collect()
    };
    let region = |lo: &Limit, hi: &Limit| -> Poly {
        let up = eval_at(hi);
        let dn = eval_at(lo);
        let mut acc = Poly::zero();
        for (i, (u, l)) in up.iter().zip(&dn).enumerate() {
            acc = &acc + &(&Poly::monomial(i) * &(u - l));
        }
        acc
    };
    let ac = a + c;
    let ad = a + d;
    let bc = b + c;
    let bd = b + d;
    let (s1, s2) = if ad <= bc { (&ad, &bc) } else { (&bc, &ad) };
    let mut push = |lo: &Q, hi: &Q, p: Poly| {
        if lo < hi && !p.is_zero() {
            events.push((lo.clone(), p.clone()));
            events.push((hi.clone(), -p));
        }
    };
    push(&ac, s1, region(&Limit::Const(c), &Limit::Shifted(a)));
    if ad <= bc {
        push(s1, s2, region(&Limit::Const(c), &Limit::Const(d)));
    } else {
        push(s1, s2, region(&Limit::Shifted(b), &Limit::Shifted(a)));
    }
    push(s2, &bd, region(&Limit::Shifted(b), &Limit::Const(d)));
}

fn assemble_events(mut events: Vec<(Q, Poly)>) -> PiecewisePoly {
    if events.is_empty() {
        return PiecewisePoly::zero();
    }
    events.sort_by(|x, y| x.0.cmp(&y.0));
    let mut bps = Vec::new();
    let mut ps = Vec::new();
    let mut running = Poly::zero();
    let mut i = 0;
    while i < events.len() {
        let x = events[i].0.clone();
        if !bps.is_empty() {
            ps.push(running.clone());
        }
        bps.push(x.clone());
        while i < events.len() && events[i].0.cmp(&x) == Ordering::Equal {
            running = &running + &events[i].1;
            i += 1;
        }
    }
    PiecewisePoly::canonical(bps, ps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::qi;

    fn m1() -> PiecewisePoly {
        PiecewisePoly::indicator(q(-1, 2), q(1, 2), qi(1))
    }

    fn ind(a: Q, b: Q) -> PiecewisePoly {
        PiecewisePoly::indicator(a, b, qi(1))
    }

    #[test]
    fn make_step_examples() {
        let f = PiecewisePoly::make_step(&[(q(-1, 2), q(1, 2))], &[qi(1)]).unwrap();
        assert_eq!(f, m1());
        let f = PiecewisePoly::make_step(&[(qi(0), qi(1)), (qi(0), qi(1))], &[qi(1), qi(1)]).unwrap();
        assert_eq!(f, PiecewisePoly::indicator(qi(0), qi(1), qi(2)));
        let f = PiecewisePoly::make_step(&[(qi(0), qi(0))], &[qi(5)]).unwrap();
        assert!(f.is_zero());
        assert_eq!(
            PiecewisePoly::make_step(&[(qi(1), qi(0))], &[qi(1)]),
            Err(Error::MalformedInterval("1".into(), "0".into()))
        );
        // gap in the middle survives as an explicit zero piece
        let f = PiecewisePoly::make_step(&[(qi(0), qi(1)), (qi(2), qi(3))], &[qi(1), qi(1)]).unwrap();
        assert_eq!(f.pieces().len(), 3);
        assert!(f.pieces()[1].is_zero());
        // cancelling overlap
        let f = PiecewisePoly::make_step(&[(qi(0), qi(1)), (qi(0), qi(1))], &[qi(1), qi(-1)]).unwrap();
        assert!(f.is_zero());
    }

    #[test]
    fn evaluate_uses_right_limits() {
        assert_eq!(m1().evaluate(&qi(0)), qi(1));
        assert_eq!(m1().evaluate(&q(3, 4)), qi(0));
        assert_eq!(m1().evaluate(&q(1, 2)), qi(0));
        assert_eq!(m1().evaluate(&q(-1, 2)), qi(1));
        assert_eq!(m1().left_limit(&q(1, 2)), qi(1));
        assert_eq!(m1().left_limit(&q(-1, 2)), qi(0));
    }

    #[test]
    fn add_scale_reflect() {
        assert_eq!(m1().reflect(), m1());
        let f = PiecewisePoly::bspline(3);
        assert!(f.add(&f.scale(&qi(-1))).is_zero());
        assert_eq!(ind(qi(0), qi(1)).reflect(), ind(qi(-1), qi(0)));
    }

    #[test]
    fn integrate_examples() {
        assert_eq!(m1().integrate(None, None), qi(1));
        assert_eq!(m1().integrate(Some(&qi(0)), Some(&q(1, 4))), q(1, 4));
        assert_eq!(PiecewisePoly::zero().integrate(Some(&qi(-5)), Some(&qi(5))), qi(0));
    }

    #[test]
    fn convolution_examples() {
        let m2 = m1().convolve(&m1());
        assert_eq!(m2.support(), Some((qi(-1), qi(1))));
        assert_eq!(m2.evaluate(&qi(0)), qi(1));
        assert_eq!(m2.evaluate(&q(1, 2)), q(1, 2));
        assert!(m1().convolve(&PiecewisePoly::zero()).is_zero());
        let u = ind(qi(0), qi(1));
        assert_eq!(u.convolve(&u).total_integral(), qi(1));
        // direct oracle: ∫ M1(-y) M1(y) dy = 1 and triangle 1-|x|
        for (x, v) in [(q(-1, 4), q(3, 4)), (q(7, 8), q(1, 8))] {
            assert_eq!(m2.evaluate(&x), v);
        }
    }

    #[test]
    fn convolution_of_non_constant_pieces() {
        // (t on (0,1)) * (1 on (0,2)): value at x is ∫ (x-y) 1_{0<x-y<1} 1_{0<y<2} dy
        let f = PiecewisePoly::from_parts(vec![qi(0), qi(1)], vec![Poly::linear(qi(0), qi(1))]).unwrap();
        let g = ind(qi(0), qi(2));
        let h = f.convolve(&g);
        // x = 1/2: ∫_0^{1/2} (1/2 - y) dy = 1/8
        assert_eq!(h.evaluate(&q(1, 2)), q(1, 8));
        // x = 3/2: y ∈ (1/2, 3/2): ∫ (3/2 - y) dy = 1/2
        assert_eq!(h.evaluate(&q(3, 2)), q(1, 2));
        // x = 5/2: y ∈ (3/2, 2): ∫ (5/2-y) dy = [1 .. 1/2] avg 3/4 * 1/2 = 3/8
        assert_eq!(h.evaluate(&q(5, 2)), q(3, 8));
        assert_eq!(h, g.convolve(&f));
    }

    #[test]
    fn bspline_examples() {
        assert_eq!(PiecewisePoly::bspline(1), m1());
        assert_eq!(PiecewisePoly::bspline(2).evaluate(&qi(0)), qi(1));
        assert_eq!(PiecewisePoly::bspline(3).evaluate(&qi(0)), q(3, 4));
        for n in 1..=6 {
            let m = PiecewisePoly::bspline(n);
            assert_eq!(m.total_integral(), qi(1));
            assert_eq!(m.reflect(), m);
            let h = q(n as i64, 2);
            assert_eq!(m.support(), Some((-h.clone(), h)));
            assert!(m.is_sd());
        }
    }

    #[test]
    fn rearrangement_examples() {
        assert_eq!(ind(qi(0), qi(1)).sd_rearrange().unwrap(), m1());
        assert_eq!(m1().sd_rearrange().unwrap(), m1());
        let f = PiecewisePoly::make_step(&[(qi(0), q(1, 2)), (qi(3), q(7, 2))], &[qi(1), qi(2)]).unwrap();
        let expected = PiecewisePoly::make_step(
            &[(q(-1, 4), q(1, 4)), (q(-1, 2), q(1, 2))],
            &[qi(1), qi(1)],
        )
        .unwrap();
        assert_eq!(f.sd_rearrange().unwrap(), expected);
        let neg = PiecewisePoly::indicator(qi(0), qi(1), qi(-1));
        assert_eq!(neg.sd_rearrange(), Err(Error::NegativeValues));
        assert_eq!(
            PiecewisePoly::bspline(2).sd_rearrange(),
            Err(Error::NotAStepFunction)
        );
    }

    #[test]
    fn sd_examples() {
        assert!(m1().is_sd());
        assert!(!ind(qi(0), qi(1)).is_sd());
        assert!(PiecewisePoly::bspline(3).is_sd());
        // symmetric but increasing away from 0
        let f = PiecewisePoly::make_step(&[(qi(-2), qi(2)), (qi(-1), qi(1))], &[qi(2), qi(-1)]).unwrap();
        assert!(!f.is_sd());
        // symmetric with a hole
        let f = PiecewisePoly::make_step(&[(qi(-2), qi(-1)), (qi(1), qi(2))], &[qi(1), qi(1)]).unwrap();
        assert!(!f.is_sd());
    }

    #[test]
    fn level_measure_examples() {
        assert_eq!(m1().level_measure(&q(1, 2)).exact(), Some(qi(1)));
        assert_eq!(PiecewisePoly::bspline(2).level_measure(&q(1, 2)).exact(), Some(qi(1)));
        assert_eq!(m1().level_measure(&qi(2)).exact(), Some(qi(0)));
        // M_3 ≥ 1/2 on |x| ≤ 1/2: boundary from quadratic piece 3/4 - x²
        assert_eq!(PiecewisePoly::bspline(3).level_measure(&q(1, 2)).exact(), Some(qi(1)));
        // irrational boundary: M_3 ≥ 5/8 ⇔ x² ≤ 1/8
        let m = PiecewisePoly::bspline(3).level_measure(&q(5, 8));
        assert!(m.exact().is_none());
        let truth = 2.0 * (0.125f64).sqrt();
        assert!(to_f64(&m.lower) <= truth + 1e-15 && to_f64(&m.upper) >= truth - 1e-15);
        assert!(&m.upper - &m.lower < q(1, 1 << 30));
    }

    #[test]
    fn integral_from_tracks_mass() {
        let g = PiecewisePoly::make_step(&[(qi(1), qi(2)), (qi(3), qi(4))], &[qi(1), qi(2)]).unwrap();
        let big = g.integral_from(&qi(0));
        assert_eq!(big.evaluate(&q(3, 2)), q(1, 2));
        assert_eq!(big.evaluate(&q(5, 2)), qi(1));
        assert_eq!(big.evaluate(&q(7, 2)), qi(2));
        assert_eq!(big.left_limit(&qi(4)), qi(3));
    }

    #[test]
    fn json_schema() {
        let s = serde_json::to_string(&m1()).unwrap();
        assert_eq!(s, r#"{"breakpoints":["-1/2","1/2"],"pieces":[["1"]]}"#);
        let back: PiecewisePoly = serde_json::from_str(&s).unwrap();
        assert_eq!(back, m1());
        assert!(serde_json::from_str::<PiecewisePoly>(r#"{"breakpoints":["1","0"],"pieces":[["1"]]}"#).is_err());
    }
}
