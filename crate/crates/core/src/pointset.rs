//! Finite point sets in the unit interval and the regular grids.

use num::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{fmt_q, parse_q, serde_vec_q, Q};

/// `N ≥ 1` exact rationals in `[0, 1]`, sorted non-decreasingly.
/// Repeated coordinates are allowed.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "PointSetJson", into = "PointSetJson")]
pub struct PointSet {
    points: Vec<Q>,
}

/// Wire form: `{"points": ["1/4", "3/4"]}`.
#[derive(Serialize, Deserialize)]
struct PointSetJson {
    #[serde(with = "serde_vec_q")]
    points: Vec<Q>,
}

impl TryFrom<PointSetJson> for PointSet {
    type Error = Error;
    fn try_from(raw: PointSetJson) -> Result<Self> {
        PointSet::new(raw.points)
    }
}

impl From<PointSet> for PointSetJson {
    fn from(p: PointSet) -> Self {
        PointSetJson { points: p.points }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GridClass {
    CenteredGrid,
    TranslatedGrid(Q),
    Other,
}

impl GridClass {
    /// Centered grids are a special case of translated ones.
    pub fn is_translated_grid(&self) -> bool {
        !matches!(self, GridClass::Other)
    }
}

impl PointSet {
    pub fn new(mut points: Vec<Q>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptySet);
        }
        if let Some(x) = points.iter().find(|x| x.is_negative() || **x > Q::one()) {
            return Err(Error::OutOfRange(fmt_q(x)));
        }
        points.sort();
        Ok(PointSet { points })
    }

    /// Parses a list of `"p/q"` or decimal strings.
    pub fn parse<S: AsRef<str>>(items: &[S]) -> Result<Self> {
        let pts = items
            .iter()
            .map(|s| parse_q(s.as_ref()))
            .collect::<Result<Vec<_>>>()?;
        PointSet::new(pts)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("point sets always serialize")
    }

    /// `Γ_N = {(2n+1)/(2N)}`.
    pub fn centered_grid(n: usize) -> Self {
        assert!(n >= 1, "grid needs at least one point");
        let den = Q::from_integer((2 * n).into());
        PointSet {
            points: (0..n)
                .map(|k| Q::from_integer((2 * k + 1).into()) / &den)
                .collect(),
        }
    }

    /// `Γ_N^δ = {n/N + δ}` for `δ ∈ [0, 1/N)`.
    pub fn translated_grid(n: usize, delta: &Q) -> Result<Self> {
        assert!(n >= 1, "grid needs at least one point");
        let nq = Q::from_integer(n.into());
        if delta.is_negative() || delta * &nq >= Q::one() {
            return Err(Error::DeltaOutOfRange {
                n,
                delta: fmt_q(delta),
            });
        }
        Ok(PointSet {
            points: (0..n)
                .map(|k| Q::from_integer(k.into()) / &nq + delta)
                .collect(),
        })
    }

    pub fn classify(&self) -> GridClass {
        let nq = Q::from_integer(self.len().into());
        let delta = &self.points[0];
        let is_translate = self
            .points
            .iter()
            .enumerate()
            .all(|(k, x)| x - Q::from_integer(k.into()) / &nq == *delta);
        if !is_translate || delta * &nq >= Q::one() {
            return GridClass::Other;
        }
        if delta * &nq * Q::from_integer(2.into()) == Q::one() {
            GridClass::CenteredGrid
        } else {
            GridClass::TranslatedGrid(delta.clone())
        }
    }

    /// Whether `x_n − n/N` is one constant `δ ∈ [0, 1/N]`. Beyond the
    /// translated grids this admits `{1/N, 2/N, …, 1}`: a point at 1 is never
    /// counted in `[0, t)`, so this set has the same `D̃` as `Γ_N^0`.
    pub fn is_closed_translated_grid(&self) -> bool {
        let nq = self.n_q();
        let delta = &self.points[0];
        delta * &nq <= Q::one()
            && self
                .points
                .iter()
                .enumerate()
                .all(|(k, x)| x - Q::from_integer(k.into()) / &nq == *delta)
    }

    /// `n` points drawn uniformly from `{k/denominator : 0 ≤ k ≤ denominator}`,
    /// reproducible from `seed`.
    pub fn random(n: usize, seed: u64, denominator: u64) -> Self {
        assert!(n >= 1 && denominator >= 2);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Self::random_with(&mut rng, n, denominator)
    }

    pub fn random_with<R: Rng>(rng: &mut R, n: usize, denominator: u64) -> Self {
        let den = Q::from_integer(denominator.into());
        let pts = (0..n)
            .map(|_| Q::from_integer(rng.gen_range(0..=denominator).into()) / &den)
            .collect();
        PointSet::new(pts).expect("grid draws lie in [0, 1]")
    }

    pub fn points(&self) -> &[Q] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// `N` as a rational.
    pub fn n_q(&self) -> Q {
        Q::from_integer(self.len().into())
    }

    /// `x_{-1} = 0, x_0, …, x_{N-1}, x_N = 1`.
    pub fn padded(&self) -> Vec<Q> {
        let mut v = Vec::with_capacity(self.len() + 2);
        v.push(Q::zero());
        v.extend(self.points.iter().cloned());
        v.push(Q::one());
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qi};
    use proptest::prelude::*;

    #[test]
    fn construction() {
        let p = PointSet::new(vec![q(3, 4), q(1, 4)]).unwrap();
        assert_eq!(p.points(), &[q(1, 4), q(3, 4)]);
        assert_eq!(PointSet::new(vec![qi(0), qi(1)]).unwrap().len(), 2);
        assert_eq!(
            PointSet::new(vec![q(1, 2), qi(2)]),
            Err(Error::OutOfRange("2".into()))
        );
        assert_eq!(PointSet::new(vec![]), Err(Error::EmptySet));
        let p = PointSet::parse(&["0.3", "1/10"]).unwrap();
        assert_eq!(p.points(), &[q(1, 10), q(3, 10)]);
    }

    #[test]
    fn grids() {
        assert_eq!(PointSet::centered_grid(1).points(), &[q(1, 2)]);
        assert_eq!(PointSet::centered_grid(2).points(), &[q(1, 4), q(3, 4)]);
        assert_eq!(PointSet::centered_grid(3).points(), &[q(1, 6), q(1, 2), q(5, 6)]);
        assert_eq!(
            PointSet::translated_grid(2, &qi(0)).unwrap().points(),
            &[qi(0), q(1, 2)]
        );
        assert_eq!(
            PointSet::translated_grid(2, &q(1, 4)).unwrap(),
            PointSet::centered_grid(2)
        );
        assert!(matches!(
            PointSet::translated_grid(3, &q(1, 3)),
            Err(Error::DeltaOutOfRange { .. })
        ));
        assert!(PointSet::translated_grid(3, &q(-1, 9)).is_err());
    }

    #[test]
    fn classification() {
        assert_eq!(PointSet::parse(&["1/4", "3/4"]).unwrap().classify(), GridClass::CenteredGrid);
        assert_eq!(
            PointSet::parse(&["0", "1/2"]).unwrap().classify(),
            GridClass::TranslatedGrid(qi(0))
        );
        assert_eq!(PointSet::parse(&["0", "3/4"]).unwrap().classify(), GridClass::Other);
        let wrapped = PointSet::parse(&["1"]).unwrap();
        assert_eq!(wrapped.classify(), GridClass::Other);
        assert!(wrapped.is_closed_translated_grid());
        assert!(PointSet::parse(&["1/2", "1"]).unwrap().is_closed_translated_grid());
        assert!(!PointSet::parse(&["0", "3/4"]).unwrap().is_closed_translated_grid());
        for n in 1..=12 {
            assert_eq!(PointSet::centered_grid(n).classify(), GridClass::CenteredGrid);
            for k in 0..5 {
                let delta = q(k, 5 * n as i64);
                let expected = if 2 * k == 5 {
                    GridClass::CenteredGrid
                } else {
                    GridClass::TranslatedGrid(delta.clone())
                };
                let g = PointSet::translated_grid(n, &delta).unwrap();
                assert_eq!(g.classify(), expected);
            }
        }
    }

    #[test]
    fn random_sets_are_reproducible() {
        let a = PointSet::random(3, 7, 1000);
        assert_eq!(a, PointSet::random(3, 7, 1000));
        assert_eq!(a.len(), 3);
        for seed in 0..20 {
            let p = PointSet::random(1, seed, 2);
            assert!([qi(0), q(1, 2), qi(1)].contains(&p.points()[0]));
        }
    }

    #[test]
    fn json_round_trip() {
        let p = PointSet::centered_grid(2);
        assert_eq!(p.to_json(), r#"{"points":["1/4","3/4"]}"#);
        assert_eq!(PointSet::from_json(r#"{"points":["0.75","1/4"]}"#).unwrap(), p);
        assert!(PointSet::from_json(r#"{"points":[]}"#).is_err());
        assert!(PointSet::from_json(r#"{"points":["3/2"]}"#).is_err());
    }

    proptest! {
        #[test]
        fn construction_ignores_input_order(ks in proptest::collection::vec(0u32..=64, 1..12), rot in 0usize..12) {
            let pts: Vec<Q> = ks.iter().map(|&k| q(k as i64, 64)).collect();
            let a = PointSet::new(pts.clone()).unwrap();
            let mut shuffled = pts;
            let r = rot % shuffled.len();
            shuffled.rotate_left(r);
            shuffled.reverse();
            prop_assert_eq!(PointSet::new(shuffled).unwrap(), a.clone());
            prop_assert_eq!(PointSet::new(a.points().to_vec()).unwrap(), a);
        }
    }
}
