//! Convex polygon clipping with exact rational vertices.

use num::{Signed, Zero};

use crate::rational::Q;

pub type Point = (Q, Q);

/// Axis-aligned rectangle `[x0, x1] × [y0, y1]` as a counter-clockwise polygon.
pub fn rectangle(x0: &Q, x1: &Q, y0: &Q, y1: &Q) -> Vec<Point> {
    vec![
        (x0.clone(), y0.clone()),
        (x1.clone(), y0.clone()),
        (x1.clone(), y1.clone()),
        (x0.clone(), y1.clone()),
    ]
}

/// Sutherland–Hodgman step: keeps the part of a convex polygon where
/// `a·x + b·y + c ≥ 0`.
pub fn clip_halfplane(poly: &[Point], a: &Q, b: &Q, c: &Q) -> Vec<Point> {
    let side = |p: &Point| a * &p.0 + b * &p.1 + c;
    let mut out = Vec::with_capacity(poly.len() + 1);
    for i in 0..poly.len() {
        let cur = &poly[i];
        let next = &poly[(i + 1) % poly.len()];
        let sc = side(cur);
        let sn = side(next);
        if !sc.is_negative() {
            out.push(cur.clone());
        }
        if (sc.is_negative() && sn.is_positive()) || (sc.is_positive() && sn.is_negative()) {
            let t = &sc / (&sc - &sn);
            out.push((
                &cur.0 + &t * (&next.0 - &cur.0),
                &cur.1 + &t * (&next.1 - &cur.1),
            ));
        }
    }
    out
}

/// Shoelace area of a simple polygon (absolute value).
pub fn area(poly: &[Point]) -> Q {
    if poly.len() < 3 {
        return Q::zero();
    }
    let mut twice = Q::zero();
    for i in 0..poly.len() {
        let (x0, y0) = &poly[i];
        let (x1, y1) = &poly[(i + 1) % poly.len()];
        twice += x0 * y1 - x1 * y0;
    }
    twice.abs() / Q::from_integer(2.into())
}

/// Integer point, used when every vertex is known to be a lattice point.
pub type IPoint = (i128, i128);

/// [`clip_halfplane`] over the integers. Exact provided every intersection
/// is a lattice point, which holds for axis-aligned and unit-slope edges
/// cut by `±x ± y + c` with integer `c`.
pub fn clip_halfplane_int(poly: &[IPoint], a: i128, b: i128, c: i128) -> Vec<IPoint> {
    let side = |p: &IPoint| a * p.0 + b * p.1 + c;
    let mut out = Vec::with_capacity(poly.len() + 1);
    for i in 0..poly.len() {
        let cur = poly[i];
        let next = poly[(i + 1) % poly.len()];
        let sc = side(&cur);
        let sn = side(&next);
        if sc >= 0 {
            out.push(cur);
        }
        if (sc < 0 && sn > 0) || (sc > 0 && sn < 0) {
            let den = sc - sn;
            let x = cur.0 + sc * (next.0 - cur.0) / den;
            let y = cur.1 + sc * (next.1 - cur.1) / den;
            debug_assert_eq!(sc * (next.0 - cur.0) % den, 0);
            debug_assert_eq!(sc * (next.1 - cur.1) % den, 0);
            out.push((x, y));
        }
    }
    out
}

/// Twice the shoelace area of an integer polygon.
pub fn twice_area_int(poly: &[IPoint]) -> i128 {
    if poly.len() < 3 {
        return 0;
    }
    let mut twice = 0;
    for i in 0..poly.len() {
        let (x0, y0) = poly[i];
        let (x1, y1) = poly[(i + 1) % poly.len()];
        twice += x0 * y1 - x1 * y0;
    }
    twice.abs()
}
