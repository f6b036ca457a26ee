//! One- and two-parameter discrepancy functions of a point set, together
//! with the classical closed forms and direct piecewise oracles for them.
//!
//! `D(t) = #{n : x_n < t} − N·t` on `[0, 1]`. The two-parameter function is
//! always the extension `D̃(t₁, t₂) = D(t₂) − D(t₁)` on the full square.

use num::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::piecewise::PiecewisePoly;
use crate::pointset::PointSet;
use crate::poly::Poly;
use crate::rational::{fmt_q, max_q, q, qi, Q};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Region {
    /// `{0 ≤ t₁ ≤ t₂ ≤ 1}`
    Triangle,
    /// `[0, 1]²`
    Square,
}

/// One linear piece `D(t) = index − N·t` on `(lo, hi)`, `lo < hi`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearPiece {
    pub lo: Q,
    pub hi: Q,
    pub index: usize,
}

impl LinearPiece {
    pub fn value_at(&self, t: &Q, n: &Q) -> Q {
        Q::from_integer(self.index.into()) - n * t
    }

    fn poly(&self, n: &Q) -> Poly {
        Poly::linear(Q::from_integer(self.index.into()), -n.clone())
    }
}

/// Exact piecewise-linear representation of `D` on `[0, 1]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiscrepancyCurve {
    n: usize,
    pieces: Vec<LinearPiece>,
    function: PiecewisePoly,
}

impl DiscrepancyCurve {
    pub fn new(p: &PointSet) -> Self {
        let xs = p.padded();
        let pieces: Vec<LinearPiece> = xs
            .windows(2)
            .enumerate()
            .filter(|(_, w)| w[0] < w[1])
            .map(|(index, w)| LinearPiece {
                lo: w[0].clone(),
                hi: w[1].clone(),
                index,
            })
            .collect();
        let nq = p.n_q();
        let mut bps = vec![pieces[0].lo.clone()];
        bps.extend(pieces.iter().map(|pc| pc.hi.clone()));
        let polys = pieces.iter().map(|pc| pc.poly(&nq)).collect();
        let function = PiecewisePoly::from_parts(bps, polys).expect("pieces tile [0, 1]");
        DiscrepancyCurve {
            n: p.len(),
            pieces,
            function,
        }
    }

    /// Non-degenerate linear pieces, in increasing `t`.
    pub fn pieces(&self) -> &[LinearPiece] {
        &self.pieces
    }

    pub fn function(&self) -> &PiecewisePoly {
        &self.function
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Essential supremum and infimum of `D`, via one-sided limits.
    pub fn ess_range(&self) -> (Q, Q) {
        let nq = Q::from_integer(self.n.into());
        let mut hi: Option<Q> = None;
        let mut lo: Option<Q> = None;
        for pc in &self.pieces {
            // slope is −N: the left end is the largest value
            let top = pc.value_at(&pc.lo, &nq);
            let bottom = pc.value_at(&pc.hi, &nq);
            if hi.as_ref().is_none_or(|h| &top > h) {
                hi = Some(top);
            }
            if lo.as_ref().is_none_or(|l| &bottom < l) {
                lo = Some(bottom);
            }
        }
        (hi.unwrap(), lo.unwrap())
    }
}

fn check_unit(t: &Q) -> Result<()> {
    if t.is_negative() || t > &qi(1) {
        Err(Error::OutOfRange(fmt_q(t)))
    } else {
        Ok(())
    }
}

/// `D(t) = #{n : x_n < t} − N·t`.
pub fn eval_d(p: &PointSet, t: &Q) -> Result<Q> {
    check_unit(t)?;
    let count = p.points().partition_point(|x| x < t);
    Ok(Q::from_integer(count.into()) - p.n_q() * t)
}

/// `D(t₂) − D(t₁)`; the arguments need not be ordered.
pub fn eval_dtilde(p: &PointSet, t1: &Q, t2: &Q) -> Result<Q> {
    Ok(eval_d(p, t2)? - eval_d(p, t1)?)
}

pub fn curve_of_d(p: &PointSet) -> DiscrepancyCurve {
    DiscrepancyCurve::new(p)
}

/// `ess sup |D|` from the piecewise representation.
pub fn star_discrepancy_direct(p: &PointSet) -> Q {
    let (hi, lo) = curve_of_d(p).ess_range();
    max_q(&hi.abs(), &lo.abs()).clone()
}

fn centered_offsets(p: &PointSet) -> impl Iterator<Item = Q> + '_ {
    let two_n = Q::from_integer((2 * p.len()).into());
    p.points()
        .iter()
        .enumerate()
        .map(move |(k, x)| x - Q::from_integer((2 * k + 1).into()) / &two_n)
}

/// `N · max |x_n − (2n+1)/(2N)| + 1/2`.
pub fn closed_form_star(p: &PointSet) -> Q {
    let m = centered_offsets(p)
        .map(|d| d.abs())
        .max()
        .expect("point sets are non-empty");
    p.n_q() * m + q(1, 2)
}

/// `N · Σ (x_n − (2n+1)/(2N))² + 1/12`, the squared L₂ norm of `D`.
pub fn closed_form_l2_sq(p: &PointSet) -> Q {
    let s: Q = centered_offsets(p).map(|d| &d * &d).sum();
    p.n_q() * s + q(1, 12)
}

/// `∫₀¹ D²` by exact piecewise integration.
pub fn l2_sq_direct(p: &PointSet) -> Q {
    let f = curve_of_d(p);
    f.function().mul(f.function()).total_integral()
}

/// `∫₀¹ |D|^k`, splitting each linear piece at its zero.
pub fn lp_pow_direct(p: &PointSet, k: u32) -> Q {
    let curve = curve_of_d(p);
    let nq = p.n_q();
    let mut total = Q::zero();
    for pc in curve.pieces() {
        let poly = pc.poly(&nq);
        let root = Q::from_integer(pc.index.into()) / &nq;
        let mut cuts = vec![pc.lo.clone()];
        if root > pc.lo && root < pc.hi {
            cuts.push(root);
        }
        cuts.push(pc.hi.clone());
        for w in cuts.windows(2) {
            let mid = (&w[0] + &w[1]) / qi(2);
            let signed = if poly.eval(&mid).is_negative() {
                poly.scale(&qi(-1))
            } else {
                poly.clone()
            };
            total += signed.pow(k).integrate(&w[0], &w[1]);
        }
    }
    total
}

/// `1 + N max (n/N − x_n) − N min (n/N − x_n)`.
pub fn closed_form_extreme_star(p: &PointSet) -> Q {
    let nq = p.n_q();
    let offs: Vec<Q> = p
        .points()
        .iter()
        .enumerate()
        .map(|(k, x)| Q::from_integer(k.into()) / &nq - x)
        .collect();
    let mx = offs.iter().max().unwrap();
    let mn = offs.iter().min().unwrap();
    qi(1) + &nq * mx - &nq * mn
}

/// `ess sup |D̃| = ess sup D − ess inf D`.
pub fn extreme_star_direct(p: &PointSet) -> Q {
    let (hi, lo) = curve_of_d(p).ess_range();
    hi - lo
}

/// `1/12 + ½ Σ_{n,m} (x_n − x_m − (n−m)/N)²` on the triangle, twice that on
/// the square.
pub fn closed_form_extreme_l2_sq(p: &PointSet, region: Region) -> Q {
    let nq = p.n_q();
    let xs = p.points();
    let mut s = Q::zero();
    for (i, xi) in xs.iter().enumerate() {
        for (j, xj) in xs.iter().enumerate() {
            let d = xi - xj - Q::from_integer((i as i64 - j as i64).into()) / &nq;
            s += &d * &d;
        }
    }
    let tri = q(1, 12) + s / qi(2);
    match region {
        Region::Triangle => tri,
        Region::Square => tri * qi(2),
    }
}

/// `∫∫_{[0,1]²} D̃²`, integrated exactly cell by cell over the rectangles on
/// which `D̃` is affine.
pub fn extreme_l2_sq_square_direct(p: &PointSet) -> Q {
    let curve = curve_of_d(p);
    let nq = p.n_q();
    // per piece: (length, ∫ D, ∫ D²)
    let moments: Vec<(Q, Q, Q)> = curve
        .pieces()
        .iter()
        .map(|pc| {
            let d = pc.poly(&nq);
            (
                &pc.hi - &pc.lo,
                d.integrate(&pc.lo, &pc.hi),
                (&d * &d).integrate(&pc.lo, &pc.hi),
            )
        })
        .collect();
    let mut total = Q::zero();
    for (len1, m1, s1) in &moments {
        for (len2, m2, s2) in &moments {
            // ∫_{I₁}∫_{I₂} (D(t₂) − D(t₁))²
            total += len1 * s2 - qi(2) * m1 * m2 + len2 * s1;
        }
    }
    total
}

/// Summary of every closed form for one point set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClosedForms {
    #[serde(with = "crate::rational::serde_q")]
    pub star: Q,
    #[serde(with = "crate::rational::serde_q")]
    pub l2_sq: Q,
    #[serde(with = "crate::rational::serde_q")]
    pub extreme_star: Q,
    #[serde(with = "crate::rational::serde_q")]
    pub extreme_l2_sq_triangle: Q,
    #[serde(with = "crate::rational::serde_q")]
    pub extreme_l2_sq_square: Q,
}

impl ClosedForms {
    pub fn of(p: &PointSet) -> Self {
        ClosedForms {
            star: closed_form_star(p),
            l2_sq: closed_form_l2_sq(p),
            extreme_star: closed_form_extreme_star(p),
            extreme_l2_sq_triangle: closed_form_extreme_l2_sq(p, Region::Triangle),
            extreme_l2_sq_square: closed_form_extreme_l2_sq(p, Region::Square),
        }
    }
}
