//! Exact distribution profiles `α ↦ P(|f| < α)` of the discrepancy
//! functions, built from the density of `D`, plus independent geometric
//! oracles that measure the same sets directly.
//!
//! On the piece `(x_{n−1}, x_n)` the function `D` is linear with slope `−N`,
//! so its values fill the interval `(n − N x_n, n − N x_{n−1})` with density
//! `1/N`. Summing over pieces gives the step density `g`, and
//! `P(|D| < α) = ∫_{−α}^{α} g`. For `D̃ = D(t₂) − D(t₁)` the density is the
//! convolution `g * g̃` with `g̃(t) = g(−t)`.

use num::{One, Signed, Zero};
use serde::Serialize;

use crate::discrepancy::curve_of_d;
use crate::geometry::{area, clip_halfplane, clip_halfplane_int, rectangle, twice_area_int, IPoint};
use crate::piecewise::{PiecewisePoly, StepFunction};
use crate::pointset::PointSet;
use crate::poly::Poly;
use crate::rational::{fmt_q, max_q, min_q, q, qi, serde_q, Q};

/// Step density `g` of `D`: `0 ≤ g ≤ 1`, `∫ g = 1`, values in `{j/N}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DensityOfD {
    pub density: StepFunction,
    pub n: usize,
}

pub fn density_of_d(p: &PointSet) -> DensityOfD {
    let nq = p.n_q();
    let xs = p.padded();
    let mut intervals = Vec::with_capacity(p.len() + 1);
    for (k, w) in xs.windows(2).enumerate() {
        let kq = Q::from_integer(k.into());
        intervals.push((&kq - &nq * &w[1], &kq - &nq * &w[0]));
    }
    let values = vec![Q::one() / &nq; intervals.len()];
    let density = PiecewisePoly::make_step(&intervals, &values).expect("intervals are ordered");
    DensityOfD {
        density,
        n: p.len(),
    }
}

/// `F(α) = P(|f| < α)` for `α ≥ 0`, exactly. `F` equals `body` below `onset`
/// and 1 from `onset` on.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DistributionProfile {
    body: PiecewisePoly,
    #[serde(with = "serde_q")]
    onset: Q,
}

impl DistributionProfile {
    /// Profile of a random variable with density `w` (total mass 1).
    pub fn from_density(w: &PiecewisePoly) -> Self {
        let Some((lo, hi)) = w.support() else {
            return DistributionProfile {
                body: PiecewisePoly::zero(),
                onset: Q::zero(),
            };
        };
        let onset = max_q(&lo.abs(), &hi.abs()).clone();
        let zero = Q::zero();
        let folded = w.add(&w.reflect()).restrict(&zero, &onset);
        let body = folded.integral_from(&zero).restrict(&zero, &onset);
        DistributionProfile { body, onset }
    }

    /// `F` must be the cumulative profile below `onset` and reach 1 there.
    pub fn from_parts(body: PiecewisePoly, onset: Q) -> Self {
        DistributionProfile { body, onset }
    }

    pub fn eval(&self, alpha: &Q) -> Q {
        if alpha >= &self.onset {
            Q::one()
        } else {
            self.body.evaluate(alpha)
        }
    }

    /// Smallest `α` with `F(α) = 1`, i.e. `ess sup |f|`.
    pub fn onset(&self) -> &Q {
        &self.onset
    }

    pub fn body(&self) -> &PiecewisePoly {
        &self.body
    }

    /// `F` on `(0, len)` as a compactly supported function, `len ≥ onset`.
    pub fn on_window(&self, len: &Q) -> PiecewisePoly {
        let plateau = PiecewisePoly::indicator(self.onset.clone(), len.clone(), Q::one());
        self.body.add(&plateau).restrict(&Q::zero(), len)
    }

    /// Tail `P(|f| ≥ α) = 1 − F(α)`, supported on `[0, onset]`.
    pub fn tail(&self) -> PiecewisePoly {
        let one = PiecewisePoly::indicator(Q::zero(), self.onset.clone(), Q::one());
        one.sub(&self.body)
    }

    /// Every breakpoint in `[0, onset]`, including both ends.
    pub fn breakpoints(&self) -> Vec<Q> {
        let mut v: Vec<Q> = self.body.breakpoints().to_vec();
        v.push(Q::zero());
        v.push(self.onset.clone());
        v.sort();
        v.dedup();
        v
    }
}

/// `P(|D| < α) = ∫_{−α}^{α} g`.
pub fn dist_d(p: &PointSet) -> DistributionProfile {
    DistributionProfile::from_density(&density_of_d(p).density)
}

/// `P(|D̃| < α) = ∫_{−α}^{α} g * g̃` on `[0, 1]²`.
pub fn dist_dtilde(p: &PointSet) -> DistributionProfile {
    let g = density_of_d(p).density;
    DistributionProfile::from_density(&g.convolve(&g.reflect()))
}

/// `min(2α, 1)`, the profile of `|D|` for the centered grid.
pub fn grid_profile_d() -> DistributionProfile {
    DistributionProfile {
        body: PiecewisePoly::from_parts(vec![qi(0), q(1, 2)], vec![Poly::linear(qi(0), qi(2))])
            .unwrap(),
        onset: q(1, 2),
    }
}

/// `1 − (1 − min(α, 1))²`, the profile of `|D̃|` for every translated grid.
pub fn grid_profile_dtilde() -> DistributionProfile {
    DistributionProfile {
        body: PiecewisePoly::from_parts(
            vec![qi(0), qi(1)],
            vec![Poly::new(vec![qi(0), qi(2), qi(-1)])],
        )
        .unwrap(),
        onset: qi(1),
    }
}

/// `|{t ∈ [0,1] : |D(t)| < α}|`, measured piece by piece on the curve.
pub fn sublevel_measure_d_direct(p: &PointSet, alpha: &Q) -> Q {
    let nq = p.n_q();
    let mut total = Q::zero();
    for pc in curve_of_d(p).pieces() {
        // |k − N t| < α  ⇔  t ∈ ((k − α)/N, (k + α)/N)
        let k = Q::from_integer(pc.index.into());
        let lo = (&k - alpha) / &nq;
        let hi = (&k + alpha) / &nq;
        let a = max_q(&lo, &pc.lo);
        let b = min_q(&hi, &pc.hi);
        if a < b {
            total += b - a;
        }
    }
    total
}

/// One rectangle of `[0,1]²` on which `D̃ = k − N (t₂ − t₁)`, with the range
/// of `u = N (t₂ − t₁) − k` over the cell and its normalized area.
struct Cell {
    x0: Q,
    x1: Q,
    y0: Q,
    y1: Q,
    k: Q,
    u_min: Q,
    u_max: Q,
    area: Q,
}

/// A [`Cell`] in integer coordinates `t · L N`, where `L` clears every point
/// denominator. `k` and the `u` range are multiplied by `L`.
struct IntCell {
    rect: [IPoint; 4],
    k: i128,
    u_min: i128,
    u_max: i128,
    twice_area: i128,
}

/// Largest scale `L N den(α)` for which the integer path cannot overflow.
const INT_SCALE_LIMIT: i128 = 1 << 50;

/// Exact measures of `{|D̃| < α}` for many `α`, by clipping each cell of the
/// `(N+1) × (N+1)` grid where `D̃` is affine against the band
/// `k − α < N (t₂ − t₁) < k + α`. Cells entirely inside or outside the band
/// are decided from `u_min`, `u_max` alone.
pub struct DtildeSublevelOracle {
    n: Q,
    triangle: bool,
    cells: Vec<Cell>,
    /// `L` and the integer cells, when `L N` is small enough.
    int: Option<(i128, Vec<IntCell>)>,
}

impl DtildeSublevelOracle {
    /// Over `[0,1]²`, or over the triangle `t₁ ≤ t₂` normalized by its area.
    pub fn new(p: &PointSet, triangle: bool) -> Self {
        let n = p.n_q();
        let curve = curve_of_d(p);
        let pieces = curve.pieces();
        let zero = Q::zero();
        let one = Q::one();
        let weight = if triangle { qi(2) } else { one.clone() };
        let mut cells = Vec::with_capacity(pieces.len() * pieces.len());
        for c1 in pieces {
            for c2 in pieces {
                let k = Q::from_integer(c2.index.into()) - Q::from_integer(c1.index.into());
                let mut d_min = &c2.lo - &c1.hi;
                let d_max = &c2.hi - &c1.lo;
                let mut poly = rectangle(&c1.lo, &c1.hi, &c2.lo, &c2.hi);
                if triangle {
                    if d_max <= zero {
                        continue;
                    }
                    if d_min < zero {
                        d_min = zero.clone();
                        poly = clip_halfplane(&poly, &-one.clone(), &one, &zero);
                    }
                }
                let a = area(&poly) * &weight;
                if a.is_zero() {
                    continue;
                }
                cells.push(Cell {
                    u_min: &n * d_min - &k,
                    u_max: &n * d_max - &k,
                    x0: c1.lo.clone(),
                    x1: c1.hi.clone(),
                    y0: c2.lo.clone(),
                    y1: c2.hi.clone(),
                    k,
                    area: a,
                });
            }
        }
        let int = Self::integer_cells(&n, &cells, triangle);
        DtildeSublevelOracle {
            n,
            triangle,
            cells,
            int,
        }
    }

    fn integer_cells(n: &Q, cells: &[Cell], triangle: bool) -> Option<(i128, Vec<IntCell>)> {
        let mut l = num::BigInt::one();
        for c in cells {
            for v in [&c.x0, &c.x1, &c.y0, &c.y1] {
                l = num::integer::lcm(l, v.denom().clone());
            }
        }
        let l = i128::try_from(l).ok()?;
        let nl = l.checked_mul(i128::try_from(n.to_integer()).ok()?)?;
        if nl > INT_SCALE_LIMIT {
            return None;
        }
        let scale = Q::from_integer(nl.into());
        let lq = Q::from_integer(l.into());
        let int = |v: &Q| i128::try_from((v * &scale).to_integer()).expect("bounded by L N");
        let by_l = |v: &Q| i128::try_from((v * &lq).to_integer()).expect("bounded by L N");
        let out = cells
            .iter()
            .map(|c| {
                let (x0, x1, y0, y1) = (int(&c.x0), int(&c.x1), int(&c.y0), int(&c.y1));
                let mut rect = vec![(x0, y0), (x1, y0), (x1, y1), (x0, y1)];
                if triangle {
                    rect = clip_halfplane_int(&rect, -1, 1, 0);
                }
                let weight = if triangle { 2 } else { 1 };
                IntCell {
                    rect: [(x0, y0), (x1, y0), (x1, y1), (x0, y1)],
                    k: i128::try_from(c.k.to_integer()).expect("cell index"),
                    u_min: by_l(&c.u_min),
                    u_max: by_l(&c.u_max),
                    twice_area: twice_area_int(&rect) * weight,
                }
            })
            .collect();
        Some((l, out))
    }

    /// The integer path; `None` if the scale for this `α` is too large.
    fn measure_int(&self, alpha: &Q) -> Option<Q> {
        let (l, cells) = self.int.as_ref()?;
        let da = i128::try_from(alpha.denom().clone()).ok()?;
        let na = i128::try_from(alpha.numer().clone()).ok()?;
        let n = i128::try_from(self.n.to_integer()).ok()?;
        let s = l.checked_mul(n)?.checked_mul(da)?;
        if s > INT_SCALE_LIMIT || na.checked_mul(*l)?.abs() > INT_SCALE_LIMIT {
            return None;
        }
        // Compare L u against L α = L na / da.
        let la = l * na;
        let weight = if self.triangle { 2 } else { 1 };
        let mut twice = 0i128;
        for c in cells {
            let (umin, umax) = (c.u_min * da, c.u_max * da);
            if umax <= -la || umin >= la {
                continue;
            }
            if umin >= -la && umax <= la {
                twice += c.twice_area * da * da;
                continue;
            }
            // band L N da · (t₂ − t₁) ∈ [L (k da − na), L (k da + na)]
            let lo = l * c.k * da - la;
            let hi = l * c.k * da + la;
            let mut poly: Vec<IPoint> = c.rect.iter().map(|&(x, y)| (x * da, y * da)).collect();
            if self.triangle {
                poly = clip_halfplane_int(&poly, -1, 1, 0);
            }
            poly = clip_halfplane_int(&poly, -1, 1, -lo);
            poly = clip_halfplane_int(&poly, 1, -1, hi);
            twice += twice_area_int(&poly) * weight;
        }
        Some(Q::new(twice.into(), (2 * s * s).into()))
    }

    pub fn measure(&self, alpha: &Q) -> Q {
        self.measure_int(alpha)
            .unwrap_or_else(|| self.measure_rational(alpha))
    }

    /// The rational path, valid for every `α`.
    pub fn measure_rational(&self, alpha: &Q) -> Q {
        let neg = -alpha.clone();
        let one = Q::one();
        let zero = Q::zero();
        let mut total = Q::zero();
        for c in &self.cells {
            if c.u_max <= neg || c.u_min >= *alpha {
                continue;
            }
            if c.u_min >= neg && c.u_max <= *alpha {
                total += &c.area;
                continue;
            }
            let lo = (&c.k - alpha) / &self.n;
            let hi = (&c.k + alpha) / &self.n;
            let mut poly = rectangle(&c.x0, &c.x1, &c.y0, &c.y1);
            if self.triangle {
                poly = clip_halfplane(&poly, &-one.clone(), &one, &zero);
            }
            // lo ≤ t₂ − t₁ ≤ hi
            poly = clip_halfplane(&poly, &-one.clone(), &one, &-lo);
            poly = clip_halfplane(&poly, &one, &-one.clone(), &hi);
            let a = area(&poly);
            total += if self.triangle { a * qi(2) } else { a };
        }
        total
    }
}

/// `|{(t₁,t₂) ∈ [0,1]² : |D̃(t₁,t₂)| < α}|` by exact cell-wise clipping.
pub fn sublevel_measure_dtilde_direct(p: &PointSet, alpha: &Q) -> Q {
    DtildeSublevelOracle::new(p, false).measure(alpha)
}

/// The same normalized measure restricted to the triangle `t₁ ≤ t₂`.
pub fn sublevel_measure_dtilde_triangle_direct(p: &PointSet, alpha: &Q) -> Q {
    DtildeSublevelOracle::new(p, true).measure(alpha)
}

/// Outcome of comparing a profile against a dominating one for every `α`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Dominance {
    /// The two profiles coincide for all `α`.
    Equal,
    /// Dominated everywhere, strictly on the witness interval.
    Strict {
        #[serde(with = "serde_q")]
        from: Q,
        #[serde(with = "serde_q")]
        to: Q,
    },
    /// Not dominated: `lower(α) > upper(α)` at `alpha`.
    Violated {
        #[serde(with = "serde_q")]
        alpha: Q,
        #[serde(with = "serde_q")]
        lhs: Q,
        #[serde(with = "serde_q")]
        rhs: Q,
    },
}

/// Decides `lower(α) ≤ upper(α)` for all `α > 0` exactly, on the piecewise
/// representation of the gap `upper − lower`.
pub fn compare_profiles(lower: &DistributionProfile, upper: &DistributionProfile) -> Dominance {
    let len = max_q(lower.onset(), upper.onset()).clone();
    if len.is_zero() {
        return Dominance::Equal;
    }
    let gap = upper.on_window(&len).sub(&lower.on_window(&len));
    for (a, b, p) in gap.iter_pieces() {
        if let Some(alpha) = p.negative_point_in(a, b) {
            return Dominance::Violated {
                lhs: lower.eval(&alpha),
                rhs: upper.eval(&alpha),
                alpha,
            };
        }
    }
    match first_positive_interval(&gap) {
        None => Dominance::Equal,
        Some((from, to)) => Dominance::Strict { from, to },
    }
}

/// First (in increasing `t`) closed interval with rational ends on which a
/// non-negative piecewise polynomial is strictly positive.
pub fn first_positive_interval(f: &PiecewisePoly) -> Option<(Q, Q)> {
    f.iter_pieces()
        .filter(|(_, _, p)| !p.is_zero())
        .find_map(|(a, b, p)| positive_subinterval(p, a, b))
}

/// A closed sub-interval of `(a, b)` on which `p > 0`, if `p ≥ 0` there and
/// `p` is not the zero polynomial.
pub fn positive_subinterval(p: &Poly, a: &Q, b: &Q) -> Option<(Q, Q)> {
    // ≤ deg roots touch at most 2·deg of the 2·deg+2 cells
    let cells = 2 * p.degree() + 2;
    let step = (b - a) / Q::from_integer((cells + 2).into());
    let tol = &step / qi(1 << 20);
    (1..=cells).find_map(|i| {
        let lo = a + &step * Q::from_integer(i.into());
        let hi = &lo + &step;
        let ok = p.eval(&lo).is_positive()
            && p.eval(&hi).is_positive()
            && p.roots_in(&lo, &hi, &tol).is_empty();
        ok.then_some((lo, hi))
    })
}

/// One row of a profile comparison table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ProfileRow {
    #[serde(with = "serde_q")]
    pub alpha: Q,
    #[serde(with = "serde_q")]
    pub value: Q,
    #[serde(with = "serde_q")]
    pub grid: Q,
    #[serde(with = "serde_q")]
    pub gap: Q,
}

/// Rows at every breakpoint of both profiles, each gap between consecutive
/// breakpoints split into `refine` equal parts.
pub fn profile_table(
    profile: &DistributionProfile,
    grid: &DistributionProfile,
    refine: usize,
) -> Vec<ProfileRow> {
    let mut alphas: Vec<Q> = profile
        .breakpoints()
        .into_iter()
        .chain(grid.breakpoints())
        .collect();
    alphas.sort();
    alphas.dedup();
    let refine = refine.max(1);
    let mut all = Vec::new();
    for w in alphas.windows(2) {
        let step = (&w[1] - &w[0]) / Q::from_integer(refine.into());
        for k in 0..refine {
            all.push(&w[0] + &step * Q::from_integer(k.into()));
        }
    }
    if let Some(last) = alphas.last() {
        all.push(last.clone());
    }
    all.into_iter()
        .map(|alpha| {
            let value = profile.eval(&alpha);
            let g = grid.eval(&alpha);
            ProfileRow {
                gap: &g - &value,
                grid: g,
                value,
                alpha,
            }
        })
        .collect()
}

/// CSV with header `alpha,F,F_grid,gap`; `decimal` appends rounded columns.
pub fn profile_csv(rows: &[ProfileRow], decimal: bool) -> String {
    let mut out = String::from("alpha,F,F_grid,gap");
    if decimal {
        out.push_str(",alpha_dec,F_dec,F_grid_dec,gap_dec");
    }
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{}",
            fmt_q(&r.alpha),
            fmt_q(&r.value),
            fmt_q(&r.grid),
            fmt_q(&r.gap)
        ));
        if decimal {
            use crate::rational::to_f64;
            out.push_str(&format!(
                ",{:.12},{:.12},{:.12},{:.12}",
                to_f64(&r.alpha),
                to_f64(&r.value),
                to_f64(&r.grid),
                to_f64(&r.gap)
            ));
        }
        out.push('\n');
    }
    out
}
