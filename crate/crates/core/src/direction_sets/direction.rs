use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A nonzero vector standing for the ray it spans.
///
/// Raw coordinates are kept as given; `unit` normalizes on demand. Exact
/// directions carry rational coordinates scaled so the largest magnitude
/// is one.
#[derive(Clone, Debug, PartialEq)]
pub struct Direction {
    coords: Vec<f64>,
    exact: Option<Vec<BigRational>>,
}

impl Direction {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.len() < 2 {
            return Err(Error::InvalidDirection(format!("dimension {} is below 2", coords.len())));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidDirection("non-finite coordinate".into()));
        }
        if coords.iter().all(|&c| c == 0.0) {
            return Err(Error::InvalidDirection("zero vector".into()));
        }
        Ok(Direction { coords, exact: None })
    }

    pub fn from_rationals(q: Vec<BigRational>) -> Result<Self> {
        if q.len() < 2 {
            return Err(Error::InvalidDirection(format!("dimension {} is below 2", q.len())));
        }
        let scale = q.iter().map(|x| x.abs()).max().unwrap_or_else(BigRational::zero);
        if scale.is_zero() {
            return Err(Error::InvalidDirection("zero vector".into()));
        }
        let exact: Vec<BigRational> = q.iter().map(|x| x / &scale).collect();
        let coords = exact.iter().map(rational_to_f64).collect();
        Ok(Direction { coords, exact: Some(exact) })
    }

    pub fn from_integers(v: &[i64]) -> Result<Self> {
        Self::from_rationals(v.iter().map(|&x| BigRational::from_integer(x.into())).collect())
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn exact(&self) -> Option<&[BigRational]> {
        self.exact.as_deref()
    }

    pub fn is_exact(&self) -> bool {
        self.exact.is_some()
    }

    pub fn norm(&self) -> f64 {
        self.coords.iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    pub fn unit(&self) -> Vec<f64> {
        // Rescale first so tiny or huge raw coordinates do not under/overflow.
        let m = self.coords.iter().fold(0.0f64, |m, c| m.max(c.abs()));
        let s: Vec<f64> = self.coords.iter().map(|c| c / m).collect();
        let r = s.iter().map(|c| c * c).sum::<f64>().sqrt();
        s.into_iter().map(|c| c / r).collect()
    }

    /// Same ray: exact comparison when both are exact, otherwise unit
    /// vectors agree within `tol` in every coordinate.
    pub fn same_ray(&self, other: &Direction, tol: f64) -> bool {
        if self.dim() != other.dim() {
            return false;
        }
        if let (Some(a), Some(b)) = (&self.exact, &other.exact) {
            return a == b;
        }
        let (u, v) = (self.unit(), other.unit());
        u.iter().zip(&v).all(|(a, b)| (a - b).abs() <= tol)
    }
}

pub fn rational_to_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or_else(|| if q.is_negative() { f64::NEG_INFINITY } else { f64::INFINITY })
}

pub fn format_rational(q: &BigRational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

pub fn parse_rational(s: &str) -> Result<BigRational> {
    let bad = || Error::Format(format!("not a rational: {s:?}"));
    let s = s.trim();
    let (p, q) = match s.split_once('/') {
        Some((p, q)) => (p.trim(), q.trim()),
        None => (s, "1"),
    };
    let p: BigInt = p.parse().map_err(|_| bad())?;
    let q: BigInt = q.parse().map_err(|_| bad())?;
    if q.is_zero() {
        return Err(bad());
    }
    Ok(BigRational::new(p, q))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Float,
    Rational,
}

/// Finite list of directions of a common dimension. Order is preserved and
/// duplicates are allowed; see `distinct_count`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DirectionSetRepr", into = "DirectionSetRepr")]
pub struct DirectionSet {
    n: usize,
    directions: Vec<Direction>,
}

impl DirectionSet {
    pub fn new(n: usize, directions: Vec<Direction>) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParameter(format!("dimension {n} is below 2")));
        }
        for d in &directions {
            if d.dim() != n {
                return Err(Error::DimensionMismatch { expected: n, got: d.dim() });
            }
        }
        Ok(DirectionSet { n, directions })
    }

    pub fn empty(n: usize) -> Self {
        DirectionSet { n, directions: Vec::new() }
    }

    pub fn from_coords(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.first().map(|r| r.len()).ok_or(Error::EmptyDirectionSet)?;
        let dirs = rows.iter().map(|r| Direction::new(r.clone())).collect::<Result<_>>()?;
        Self::new(n, dirs)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.directions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.directions.is_empty()
    }

    pub fn directions(&self) -> &[Direction] {
        &self.directions
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Direction> {
        self.directions.iter()
    }

    pub fn get(&self, i: usize) -> Option<&Direction> {
        self.directions.get(i)
    }

    pub fn push(&mut self, d: Direction) -> Result<()> {
        if d.dim() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: d.dim() });
        }
        self.directions.push(d);
        Ok(())
    }

    pub fn mode(&self) -> Mode {
        if !self.directions.is_empty() && self.directions.iter().all(Direction::is_exact) {
            Mode::Rational
        } else {
            Mode::Float
        }
    }

    pub fn units(&self) -> Vec<Vec<f64>> {
        self.directions.iter().map(Direction::unit).collect()
    }

    /// Number of distinct rays: exact equality for rational directions,
    /// otherwise unit vectors within 1e-12.
    pub fn distinct_count(&self) -> usize {
        self.distinct(1e-12).len()
    }

    /// Indices of the first occurrence of every distinct ray.
    pub fn distinct(&self, tol: f64) -> Vec<usize> {
        let mut keep: Vec<usize> = Vec::new();
        let units = self.units();
        'outer: for (i, d) in self.directions.iter().enumerate() {
            for &k in &keep {
                let other = &self.directions[k];
                let same = match (d.exact(), other.exact()) {
                    (Some(a), Some(b)) => a == b,
                    _ => units[i].iter().zip(&units[k]).all(|(a, b)| (a - b).abs() <= tol),
                };
                if same {
                    continue 'outer;
                }
            }
            keep.push(i);
        }
        keep
    }

    pub fn subset(&self, positions: &[usize]) -> DirectionSet {
        DirectionSet { n: self.n, directions: positions.iter().map(|&i| self.directions[i].clone()).collect() }
    }

    pub fn union(&self, other: &DirectionSet) -> Result<DirectionSet> {
        if other.n != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: other.n });
        }
        let mut directions = self.directions.clone();
        directions.extend(other.directions.iter().cloned());
        Ok(DirectionSet { n: self.n, directions })
    }
}

impl<'a> IntoIterator for &'a DirectionSet {
    type Item = &'a Direction;
    type IntoIter = std::slice::Iter<'a, Direction>;
    fn into_iter(self) -> Self::IntoIter {
        self.directions.iter()
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum CoordRepr {
    Num(f64),
    Str(String),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct DirectionSetRepr {
    n: usize,
    mode: Mode,
    directions: Vec<Vec<CoordRepr>>,
}

impl From<DirectionSet> for DirectionSetRepr {
    fn from(s: DirectionSet) -> Self {
        let mode = s.mode();
        let directions = s
            .directions
            .iter()
            .map(|d| match (mode, d.exact()) {
                (Mode::Rational, Some(q)) => q.iter().map(|x| CoordRepr::Str(format_rational(x))).collect(),
                _ => d.coords().iter().map(|&c| CoordRepr::Num(c)).collect(),
            })
            .collect();
        DirectionSetRepr { n: s.n, mode, directions }
    }
}

impl TryFrom<DirectionSetRepr> for DirectionSet {
    type Error = Error;
    fn try_from(r: DirectionSetRepr) -> Result<Self> {
        let mut dirs = Vec::with_capacity(r.directions.len());
        for row in r.directions {
            let d = match r.mode {
                Mode::Rational => {
                    let q =
                        row.iter()
                            .map(|c| match c {
                                CoordRepr::Str(s) => parse_rational(s),
                                CoordRepr::Num(x) => BigRational::from_float(*x)
                                    .ok_or_else(|| Error::Format(format!("bad coordinate {x}"))),
                            })
                            .collect::<Result<Vec<_>>>()?;
                    Direction::from_rationals(q)?
                }
                Mode::Float => {
                    let v = row
                        .iter()
                        .map(|c| match c {
                            CoordRepr::Num(x) => Ok(*x),
                            CoordRepr::Str(s) => parse_rational(s).map(|q| rational_to_f64(&q)),
                        })
                        .collect::<Result<Vec<_>>>()?;
                    Direction::new(v)?
                }
            };
            dirs.push(d);
        }
        DirectionSet::new(r.n, dirs)
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            match &self.exact {
                Some(q) => write!(f, "{}", format_rational(&q[i]))?,
                None => write!(f, "{c}")?,
            }
        }
        write!(f, ")")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_round_trip() {
        let q = parse_rational("-3/6").unwrap();
        assert_eq!(format_rational(&q), "-1/2");
        assert_eq!(parse_rational("4").unwrap(), BigRational::from_integer(4.into()));
        assert!(parse_rational("1/0").is_err());
    }

    #[test]
    fn projective_normalization() {
        let a = Direction::from_integers(&[2, 2]).unwrap();
        let b = Direction::from_integers(&[1, 1]).unwrap();
        let c = Direction::from_integers(&[-1, -1]).unwrap();
        assert_eq!(a, b);
        assert!(!a.same_ray(&c, 0.0));
        assert_eq!(a.coords(), &[1.0, 1.0]);
    }

    #[test]
    fn rejects_zero_and_mismatch() {
        assert!(Direction::new(vec![0.0, 0.0]).is_err());
        let d = Direction::new(vec![1.0, 0.0, 0.0]).unwrap();
        assert!(DirectionSet::new(2, vec![d]).is_err());
    }

    #[test]
    fn json_round_trip() {
        let s = DirectionSet::new(
            2,
            vec![Direction::from_integers(&[1, 3]).unwrap(), Direction::from_integers(&[2, 1]).unwrap()],
        )
        .unwrap();
        let text = serde_json::to_string(&s).unwrap();
        assert!(text.contains("\"1/3\""));
        let back: DirectionSet = serde_json::from_str(&text).unwrap();
        assert_eq!(back, s);
        let f = DirectionSet::from_coords(&[vec![0.5, 0.25]]).unwrap();
        let back: DirectionSet = serde_json::from_str(&serde_json::to_string(&f).unwrap()).unwrap();
        assert_eq!(back, f);
    }

    #[test]
    fn unit_survives_extreme_scales() {
        let d = Direction::new(vec![1e-300, 1e-300]).unwrap();
        let u = d.unit();
        assert!((u[0] - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
    }
}
