//! Dense univariate polynomials over the rationals, with exact real-root
//! isolation by Sturm sequences.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::rational::{serde_vec_q, sqrt_exact, Q};

/// Coefficients in ascending degree, with no trailing zeros.
#[derive(Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Poly {
    #[serde(with = "serde_vec_q")]
    coeffs: Vec<Q>,
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| match k {
                0 => format!("{c}"),
                1 => format!("({c})t"),
                _ => format!("({c})t^{k}"),
            })
            .collect();
        write!(f, "{}", terms.join(" + "))
    }
}

impl Poly {
    pub fn new(mut coeffs: Vec<Q>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn constant(c: Q) -> Self {
        Poly::new(vec![c])
    }

    /// `a + b t`.
    pub fn linear(a: Q, b: Q) -> Self {
        Poly::new(vec![a, b])
    }

    /// `t^k`.
    pub fn monomial(k: usize) -> Self {
        let mut c = vec![Q::zero(); k + 1];
        c[k] = Q::one();
        Poly { coeffs: c }
    }

    pub fn coeffs(&self) -> &[Q] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, with the zero polynomial reported as degree 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn leading(&self) -> Q {
        self.coeffs.last().cloned().unwrap_or_else(Q::zero)
    }

    pub fn eval(&self, t: &Q) -> Q {
        let mut acc = Q::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * t + c;
        }
        acc
    }

    pub fn eval_f64(&self, t: f64) -> f64 {
        let mut acc = 0.0;
        for c in self.coeffs.iter().rev() {
            acc = acc * t + crate::rational::to_f64(c);
        }
        acc
    }

    pub fn scale(&self, c: &Q) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn derivative(&self) -> Poly {
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * Q::from_integer(k.into()))
                .collect(),
        )
    }

    /// Antiderivative vanishing at 0.
    pub fn antiderivative(&self) -> Poly {
        let mut c = Vec::with_capacity(self.coeffs.len() + 1);
        c.push(Q::zero());
        for (k, a) in self.coeffs.iter().enumerate() {
            c.push(a / Q::from_integer((k + 1).into()));
        }
        Poly::new(c)
    }

    /// Exact `∫_a^b p`.
    pub fn integrate(&self, a: &Q, b: &Q) -> Q {
        let anti = self.antiderivative();
        anti.eval(b) - anti.eval(a)
    }

    /// `p(s·t + c)` as a polynomial in `t`.
    pub fn compose_affine(&self, s: &Q, c: &Q) -> Poly {
        let inner = Poly::linear(c.clone(), s.clone());
        let mut acc = Poly::zero();
        for a in self.coeffs.iter().rev() {
            acc = &(&acc * &inner) + &Poly::constant(a.clone());
        }
        acc
    }

    /// `p(t + c)`.
    pub fn shift(&self, c: &Q) -> Poly {
        self.compose_affine(&Q::one(), c)
    }

    /// `p(-t)`.
    pub fn reflect(&self) -> Poly {
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(k, c)| if k % 2 == 1 { -c } else { c.clone() })
                .collect(),
        )
    }

    pub fn pow(&self, k: u32) -> Poly {
        let mut acc = Poly::constant(Q::one());
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn div_rem(&self, d: &Poly) -> (Poly, Poly) {
        assert!(!d.is_zero(), "polynomial division by zero");
        let mut rem = self.coeffs.clone();
        let dl = d.leading();
        let dd = d.degree();
        if self.coeffs.len() < d.coeffs.len() {
            return (Poly::zero(), self.clone());
        }
        let mut quot = vec![Q::zero(); self.coeffs.len() - d.coeffs.len() + 1];
        for k in (0..quot.len()).rev() {
            let c = &rem[k + dd] / &dl;
            if !c.is_zero() {
                for (j, dj) in d.coeffs.iter().enumerate() {
                    rem[k + j] -= &c * dj;
                }
            }
            quot[k] = c;
        }
        rem.truncate(dd);
        (Poly::new(quot), Poly::new(rem))
    }

    pub fn monic(&self) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        self.scale(&(Q::one() / self.leading()))
    }

    pub fn gcd(&self, other: &Poly) -> Poly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// `p / gcd(p, p')`: same distinct roots, all simple.
    pub fn square_free(&self) -> Poly {
        if self.degree() <= 1 {
            return self.clone();
        }
        let g = self.gcd(&self.derivative());
        self.div_rem(&g).0
    }

    fn sturm_chain(&self) -> Vec<Poly> {
        let mut chain = vec![self.clone(), self.derivative()];
        loop {
            let n = chain.len();
            if chain[n - 1].is_zero() {
                chain.pop();
                break;
            }
            let (_, r) = chain[n - 2].div_rem(&chain[n - 1]);
            if r.is_zero() {
                break;
            }
            chain.push(-r);
        }
        chain
    }

    /// Isolates every distinct real root in the open interval `(a, b)`.
    ///
    /// Rational roots of degree-1 and degree-2 factors are found exactly;
    /// other roots are returned as enclosures no wider than `tol`.
    pub fn roots_in(&self, a: &Q, b: &Q, tol: &Q) -> Vec<Root> {
        if self.is_zero() || self.is_constant() || a >= b {
            return Vec::new();
        }
        let p = self.square_free();
        if p.degree() == 1 {
            let r = -&p.coeffs[0] / &p.coeffs[1];
            return if &r > a && &r < b {
                vec![Root::exact(r)]
            } else {
                Vec::new()
            };
        }
        if p.degree() == 2 {
            let (c, bq, aq) = (&p.coeffs[0], &p.coeffs[1], &p.coeffs[2]);
            let disc = bq * bq - Q::from_integer(4.into()) * aq * c;
            if disc.is_negative() {
                return Vec::new();
            }
            if let Some(s) = sqrt_exact(&disc) {
                let two_a = aq * Q::from_integer(2.into());
                let mut rs = vec![(-bq - &s) / &two_a, (-bq + &s) / &two_a];
                rs.sort();
                rs.dedup();
                return rs
                    .into_iter()
                    .filter(|r| r > a && r < b)
                    .map(Root::exact)
                    .collect();
            }
        }
        let chain = p.sturm_chain();
        let mut out = Vec::new();
        isolate(&p, &chain, a.clone(), b.clone(), tol, &mut out);
        // roots in (a, b] were counted; drop one sitting exactly at b
        out.retain(|r| !(r.is_exact() && &r.lo == b));
        out.sort_by(|x, y| x.lo.cmp(&y.lo));
        out
    }

    /// Exact sign test: `p ≥ 0` on the open interval `(a, b)`.
    ///
    /// Returns `None` when it holds, or a rational point where `p < 0`.
    pub fn negative_point_in(&self, a: &Q, b: &Q) -> Option<Q> {
        if self.is_zero() {
            return None;
        }
        if self.is_constant() {
            return if self.coeffs[0].is_negative() {
                Some((a + b) / Q::from_integer(2.into()))
            } else {
                None
            };
        }
        self.sample_points(a, b)
            .into_iter()
            .find(|s| self.eval(s).is_negative())
    }

    /// One rational sample point strictly inside each maximal subinterval of
    /// `(a, b)` on which `p` has no root. The sign of `p` is constant on each.
    pub fn sample_points(&self, a: &Q, b: &Q) -> Vec<Q> {
        let width = b - a;
        let tol = &width / Q::from_integer(1024.into());
        let roots = self.roots_in(a, b, &tol);
        let two = Q::from_integer(2.into());
        let mut cuts: Vec<(Q, Q)> = Vec::with_capacity(roots.len() + 2);
        cuts.push((a.clone(), a.clone()));
        for r in roots {
            cuts.push((r.lo, r.hi));
        }
        cuts.push((b.clone(), b.clone()));
        cuts.windows(2)
            .map(|w| (&w[0].1 + &w[1].0) / &two)
            .collect()
    }
}

/// A real root, known exactly (`lo == hi`) or enclosed in `(lo, hi)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Root {
    pub lo: Q,
    pub hi: Q,
}

impl Root {
    pub fn exact(r: Q) -> Root {
        Root { lo: r.clone(), hi: r }
    }

    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }
}

fn sign_changes(chain: &[Poly], t: &Q) -> usize {
    let mut count = 0;
    let mut prev: Option<bool> = None;
    for p in chain {
        let v = p.eval(t);
        if v.is_zero() {
            continue;
        }
        let pos = v.is_positive();
        if prev.is_some_and(|s| s != pos) {
            count += 1;
        }
        prev = Some(pos);
    }
    count
}

// Counts roots of a square-free `p` in (lo, hi] and bisects until each is
// isolated to width `tol` or hit exactly.
fn isolate(p: &Poly, chain: &[Poly], lo: Q, hi: Q, tol: &Q, out: &mut Vec<Root>) {
    let count = sign_changes(chain, &lo) - sign_changes(chain, &hi);
    if count == 0 {
        return;
    }
    if count == 1 && p.eval(&hi).is_zero() {
        out.push(Root::exact(hi));
        return;
    }
    if count == 1 && &(&hi - &lo) <= tol {
        out.push(Root { lo, hi });
        return;
    }
    let mid = (&lo + &hi) / Q::from_integer(2.into());
    isolate(p, chain, lo, mid.clone(), tol, out);
    isolate(p, chain, mid, hi, tol, out);
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let z = Q::zero();
        Poly::new(
            (0..n)
                .map(|k| self.coeffs.get(k).unwrap_or(&z) + rhs.coeffs.get(k).unwrap_or(&z))
                .collect(),
        )
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let z = Q::zero();
        Poly::new(
            (0..n)
                .map(|k| self.coeffs.get(k).unwrap_or(&z) - rhs.coeffs.get(k).unwrap_or(&z))
                .collect(),
        )
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut c = vec![Q::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        Poly::new(c)
    }
}

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly::new(self.coeffs.into_iter().map(|c| -c).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qi};

    fn p(c: &[i64]) -> Poly {
        Poly::new(c.iter().map(|&x| qi(x)).collect())
    }

    #[test]
    fn arithmetic_and_calculus() {
        let a = p(&[1, 2, 3]);
        assert_eq!(a.eval(&qi(2)), qi(17));
        assert_eq!(a.derivative(), p(&[2, 6]));
        assert_eq!(a.antiderivative().derivative(), a);
        assert_eq!(a.integrate(&qi(0), &qi(1)), qi(3));
        assert_eq!(&a - &a, Poly::zero());
        assert_eq!(a.reflect(), p(&[1, -2, 3]));
        // (t+1)^2 evaluated via composition
        assert_eq!(p(&[0, 0, 1]).shift(&qi(1)), p(&[1, 2, 1]));
        assert_eq!(p(&[0, 1]).compose_affine(&qi(3), &qi(-1)), p(&[-1, 3]));
    }

    #[test]
    fn division_and_gcd() {
        let a = &p(&[-1, 1]) * &p(&[-2, 1]); // (t-1)(t-2)
        let b = &p(&[-1, 1]) * &p(&[3, 1]);
        assert_eq!(a.gcd(&b), p(&[-1, 1]));
        let (qt, r) = a.div_rem(&p(&[-1, 1]));
        assert_eq!(qt, p(&[-2, 1]));
        assert!(r.is_zero());
        let sq = &a * &a;
        assert_eq!(sq.square_free().monic(), a);
    }

    #[test]
    fn root_isolation() {
        // t^2 - 2 on (0, 2): irrational root enclosed
        let r = p(&[-2, 0, 1]).roots_in(&qi(0), &qi(2), &q(1, 1 << 20));
        assert_eq!(r.len(), 1);
        assert!(!r[0].is_exact());
        assert!(&r[0].hi - &r[0].lo <= q(1, 1 << 20));
        assert!(r[0].lo < q(1415, 1000) && r[0].hi > q(1414, 1000));
        // cubic with rational roots 1/3, 1/2, 3
        let c = &(&p(&[-1, 3]) * &p(&[-1, 2])) * &p(&[-3, 1]);
        let r = c.roots_in(&qi(0), &qi(4), &q(1, 1 << 30));
        assert_eq!(r.len(), 3);
        assert!(r[1].is_exact() && r[1].lo == q(1, 2));
        // roots on the boundary are excluded
        assert!(p(&[-1, 1]).roots_in(&qi(1), &qi(2), &q(1, 8)).is_empty());
        // double root counted once
        let d = p(&[1, -2, 1]);
        assert_eq!(d.roots_in(&qi(0), &qi(2), &q(1, 8)), vec![Root::exact(qi(1))]);
    }

    #[test]
    fn sign_checks() {
        let d = p(&[1, -2, 1]); // (t-1)^2
        assert_eq!(d.negative_point_in(&qi(-5), &qi(5)), None);
        let c = p(&[-1, 0, 1]);
        let w = c.negative_point_in(&qi(-5), &qi(5)).unwrap();
        assert!(c.eval(&w) < qi(0));
    }
}
