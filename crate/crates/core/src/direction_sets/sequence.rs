use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::direction::{format_rational, parse_rational, rational_to_f64};
use crate::error::{Error, Result};

/// A real that is either a double or an exact rational. Comparisons are
/// exact whenever one side is exact.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ScalarRepr", into = "ScalarRepr")]
pub enum Scalar {
    Float(f64),
    Exact(BigRational),
}

impl Scalar {
    pub fn to_f64(&self) -> f64 {
        match self {
            Scalar::Float(x) => *x,
            Scalar::Exact(q) => rational_to_f64(q),
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Scalar::Exact(_))
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Float(x) => *x == 0.0,
            Scalar::Exact(q) => q.is_zero(),
        }
    }

    pub fn abs(&self) -> Scalar {
        match self {
            Scalar::Float(x) => Scalar::Float(x.abs()),
            Scalar::Exact(q) => Scalar::Exact(q.abs()),
        }
    }

    /// Natural log of a positive value, accurate even when the rational is
    /// far outside the double range.
    pub fn ln(&self) -> f64 {
        match self {
            Scalar::Float(x) => x.ln(),
            Scalar::Exact(q) => ln_big(q.numer()) - ln_big(q.denom()),
        }
    }

    pub fn div(&self, other: &Scalar) -> Scalar {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(a / b),
            _ => Scalar::Float(self.to_f64() / other.to_f64()),
        }
    }

    pub fn compare(&self, other: &Scalar) -> Ordering {
        match (self, other) {
            (Scalar::Float(a), Scalar::Float(b)) => a.partial_cmp(b).unwrap_or(Ordering::Equal),
            (Scalar::Exact(a), Scalar::Exact(b)) => a.cmp(b),
            (Scalar::Exact(a), Scalar::Float(b)) => cmp_exact_float(a, *b),
            (Scalar::Float(a), Scalar::Exact(b)) => cmp_exact_float(b, *a).reverse(),
        }
    }
}

fn cmp_exact_float(a: &BigRational, b: f64) -> Ordering {
    match BigRational::from_float(b) {
        Some(bq) => a.cmp(&bq),
        None if b > 0.0 => Ordering::Less,
        None => Ordering::Greater,
    }
}

fn ln_big(x: &BigInt) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        let v: f64 = num_traits::ToPrimitive::to_f64(&x.abs()).unwrap_or(f64::INFINITY);
        return v.ln();
    }
    let shift = bits - 64;
    let top: BigInt = x.abs() >> shift;
    let v: f64 = num_traits::ToPrimitive::to_f64(&top).unwrap_or(f64::INFINITY);
    v.ln() + shift as f64 * std::f64::consts::LN_2
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum ScalarRepr {
    Num(f64),
    Str(String),
}

impl From<Scalar> for ScalarRepr {
    fn from(s: Scalar) -> Self {
        match s {
            Scalar::Float(x) => ScalarRepr::Num(x),
            Scalar::Exact(q) => ScalarRepr::Str(format_rational(&q)),
        }
    }
}

impl TryFrom<ScalarRepr> for Scalar {
    type Error = Error;
    fn try_from(r: ScalarRepr) -> Result<Self> {
        match r {
            ScalarRepr::Num(x) => Ok(Scalar::Float(x)),
            ScalarRepr::Str(s) => parse_rational(&s).map(Scalar::Exact),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SequenceRule {
    /// θ_i = theta0 · ratio^i.
    Geometric { theta0: Scalar, ratio: Scalar },
    /// θ_{start+m} = values[m]; outside the table the sequence continues
    /// geometrically with `tail_ratio`.
    Table { start: i64, values: Vec<f64>, tail_ratio: f64 },
    /// Every gap of `base` split into `parts` equal steps on the log scale:
    /// θ'_{p·q+t} = θ_q (θ_{q+1}/θ_q)^{t/p}.
    Subdivided { base: Box<LacunarySequence>, parts: u32 },
}

/// Decreasing bi-infinite sequence (θ_i)_{i∈Z} with θ_{i+1} ≤ λ θ_i.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SequenceRepr", into = "SequenceRepr")]
pub struct LacunarySequence {
    lambda: f64,
    rule: SequenceRule,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct SequenceRepr {
    lambda: f64,
    #[serde(flatten)]
    rule: SequenceRule,
}

impl From<LacunarySequence> for SequenceRepr {
    fn from(s: LacunarySequence) -> Self {
        SequenceRepr { lambda: s.lambda, rule: s.rule }
    }
}

impl TryFrom<SequenceRepr> for LacunarySequence {
    type Error = Error;
    fn try_from(r: SequenceRepr) -> Result<Self> {
        LacunarySequence::with_rule(r.lambda, r.rule)
    }
}

const MAX_STEPS: usize = 100_000;

impl LacunarySequence {
    pub fn with_rule(lambda: f64, rule: SequenceRule) -> Result<Self> {
        let s = LacunarySequence { lambda, rule };
        s.validate()?;
        Ok(s)
    }

    pub fn geometric(theta0: f64, ratio: f64) -> Result<Self> {
        Self::with_rule(ratio, SequenceRule::Geometric { theta0: Scalar::Float(theta0), ratio: Scalar::Float(ratio) })
    }

    pub fn geometric_exact(theta0: BigRational, ratio: BigRational) -> Result<Self> {
        let lambda = f64_at_least(&ratio);
        Self::with_rule(lambda, SequenceRule::Geometric { theta0: Scalar::Exact(theta0), ratio: Scalar::Exact(ratio) })
    }

    /// θ_i = 2^{-i}, exact.
    pub fn dyadic() -> Self {
        Self::geometric_exact(BigRational::one(), BigRational::new(1.into(), 2.into()))
            .expect("dyadic sequence is valid")
    }

    pub fn table(start: i64, values: Vec<f64>, lambda: f64, tail_ratio: f64) -> Result<Self> {
        Self::with_rule(lambda, SequenceRule::Table { start, values, tail_ratio })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn rule(&self) -> &SequenceRule {
        &self.rule
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidSequence(m));
        if !(self.lambda > 0.0 && self.lambda < 1.0) {
            return bad(format!("lacunary constant {} outside (0,1)", self.lambda));
        }
        match &self.rule {
            SequenceRule::Geometric { theta0, ratio } => {
                let (t, r) = (theta0.to_f64(), ratio.to_f64());
                if !(t > 0.0 && t.is_finite()) {
                    return bad(format!("theta0 {t} must be positive"));
                }
                if !(r > 0.0) || ratio.compare(&Scalar::Float(self.lambda)) == Ordering::Greater {
                    return bad(format!("ratio {r} outside (0, lambda]"));
                }
            }
            SequenceRule::Table { values, tail_ratio, .. } => {
                if values.is_empty() {
                    return bad("empty table".into());
                }
                if values.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
                    return bad("table values must be positive and finite".into());
                }
                for (m, w) in values.windows(2).enumerate() {
                    if !(w[1] <= self.lambda * w[0]) {
                        return bad(format!(
                            "entry {} = {} exceeds lambda times its predecessor {}",
                            m + 1,
                            w[1],
                            w[0]
                        ));
                    }
                }
                if !(*tail_ratio > 0.0 && *tail_ratio <= self.lambda) {
                    return bad(format!("tail ratio {tail_ratio} outside (0, lambda]"));
                }
            }
            SequenceRule::Subdivided { base, parts } => {
                if *parts == 0 {
                    return bad("zero parts".into());
                }
                base.validate()?;
                if base.lambda.powf(1.0 / *parts as f64) > self.lambda * (1.0 + 1e-12) {
                    return bad("lambda below the subdivided step".into());
                }
            }
        }
        Ok(())
    }

    pub fn theta(&self, i: i64) -> f64 {
        match &self.rule {
            SequenceRule::Geometric { theta0, ratio } => theta0.to_f64() * ratio.to_f64().powi(clamp_i32(i)),
            SequenceRule::Table { start, values, tail_ratio } => {
                let last = start + values.len() as i64 - 1;
                if i < *start {
                    values[0] * tail_ratio.powi(clamp_i32(i - start))
                } else if i > last {
                    values[values.len() - 1] * tail_ratio.powi(clamp_i32(i - last))
                } else {
                    values[(i - start) as usize]
                }
            }
            SequenceRule::Subdivided { base, parts } => {
                let p = *parts as i64;
                let (q, t) = (i.div_euclid(p), i.rem_euclid(p));
                let a = base.theta(q);
                if t == 0 {
                    a
                } else {
                    a * (base.theta(q + 1) / a).powf(t as f64 / p as f64)
                }
            }
        }
    }

    /// θ_i, exact when the rule allows it.
    pub fn theta_scalar(&self, i: i64) -> Scalar {
        match &self.rule {
            SequenceRule::Geometric { theta0: Scalar::Exact(t), ratio: Scalar::Exact(r) } => match i32::try_from(i) {
                Ok(e) => Scalar::Exact(t * num_traits::Pow::pow(r, e)),
                Err(_) => Scalar::Float(self.theta(i)),
            },
            SequenceRule::Subdivided { base, parts } if i.rem_euclid(*parts as i64) == 0 => {
                base.theta_scalar(i.div_euclid(*parts as i64))
            }
            _ => Scalar::Float(self.theta(i)),
        }
    }

    fn guess(&self, ln_rho: f64) -> i64 {
        let g = match &self.rule {
            SequenceRule::Geometric { theta0, ratio } => (ln_rho - theta0.ln()) / ratio.ln(),
            SequenceRule::Table { start, values, tail_ratio } => {
                let last = values.len() - 1;
                if ln_rho > values[0].ln() {
                    *start as f64 + (ln_rho - values[0].ln()) / tail_ratio.ln()
                } else if ln_rho < values[last].ln() {
                    (*start + last as i64) as f64 + (ln_rho - values[last].ln()) / tail_ratio.ln()
                } else {
                    let k = values.partition_point(|v| v.ln() >= ln_rho);
                    (*start + k as i64 - 1) as f64
                }
            }
            SequenceRule::Subdivided { base, parts } => {
                let q = base.guess(ln_rho);
                let (a, b) = (base.theta(q).ln(), base.theta(q + 1).ln());
                let frac = if b < a { ((ln_rho - a) / (b - a)).clamp(0.0, 1.0) } else { 0.0 };
                (q * *parts as i64) as f64 + frac * *parts as f64
            }
        };
        if g.is_finite() {
            g.floor().clamp(-1e15, 1e15) as i64
        } else {
            0
        }
    }

    /// The unique i with θ_{i+1} < rho ≤ θ_i.
    pub fn locate(&self, rho: &Scalar) -> Result<i64> {
        if !(rho.to_f64() > 0.0) && !matches!(rho, Scalar::Exact(q) if q.is_positive()) {
            return Err(Error::InvalidParameter(format!("ratio {} is not positive", rho.to_f64())));
        }
        let mut i = self.guess(rho.ln());
        let mut steps = 0;
        // Walk until rho ≤ θ_i, then until θ_{i+1} < rho.
        while self.theta_scalar(i).compare(rho) == Ordering::Less {
            i -= 1;
            steps += 1;
            if steps > MAX_STEPS {
                return Err(Error::InvalidSequence("sequence is not monotone".into()));
            }
        }
        while self.theta_scalar(i + 1).compare(rho) != Ordering::Less {
            i += 1;
            steps += 1;
            if steps > MAX_STEPS {
                return Err(Error::InvalidSequence("sequence is not monotone".into()));
            }
        }
        Ok(i)
    }

    /// Geometric means inserted into every gap wider than a factor 3/2, so
    /// consecutive terms satisfy (2/3)θ'_i ≤ θ'_{i+1}. The original terms
    /// survive as a subsequence (exactly, including exact rationals).
    pub fn refine(&self) -> LacunarySequence {
        let needed = |ratio: f64| -> u32 {
            let mut p = ((1.0 / ratio).ln() / 1.5f64.ln()).ceil().max(1.0) as u32;
            while ratio.powf(1.0 / p as f64) < 2.0 / 3.0 {
                p += 1;
            }
            p
        };
        match &self.rule {
            SequenceRule::Geometric { ratio, .. } => {
                let r = ratio.to_f64();
                let p = needed(r);
                if p == 1 {
                    return self.clone();
                }
                let step = r.powf(1.0 / p as f64);
                let lambda = step.max(self.lambda.powf(1.0 / p as f64)) * (1.0 + 4.0 * f64::EPSILON);
                LacunarySequence {
                    lambda: lambda.min(1.0 - f64::EPSILON),
                    rule: SequenceRule::Subdivided { base: Box::new(self.clone()), parts: p },
                }
            }
            SequenceRule::Table { start, values, tail_ratio } => {
                let mut out = Vec::new();
                let mut lambda: f64 = 0.0;
                for w in values.windows(2) {
                    let r = w[1] / w[0];
                    let p = needed(r);
                    out.push(w[0]);
                    for t in 1..p {
                        out.push(w[0] * r.powf(t as f64 / p as f64));
                    }
                }
                out.push(values[values.len() - 1]);
                for w in out.windows(2) {
                    lambda = lambda.max(w[1] / w[0]);
                }
                let pt = needed(*tail_ratio);
                let tail = tail_ratio.powf(1.0 / pt as f64);
                lambda = lambda.max(tail);
                // Index of the old start is preserved.
                LacunarySequence { lambda, rule: SequenceRule::Table { start: *start, values: out, tail_ratio: tail } }
            }
            SequenceRule::Subdivided { .. } => {
                let r = self.theta(1) / self.theta(0);
                let p = needed(r);
                if p == 1 {
                    return self.clone();
                }
                let step = r.powf(1.0 / p as f64);
                LacunarySequence {
                    lambda: (step * (1.0 + 4.0 * f64::EPSILON)).max(self.lambda.powf(1.0 / p as f64)),
                    rule: SequenceRule::Subdivided { base: Box::new(self.clone()), parts: p },
                }
            }
        }
    }

    /// (θ_i^e)_i, exact for exact geometric sequences and integer e.
    pub fn pow(&self, e: f64) -> Result<LacunarySequence> {
        if !(e > 0.0 && e.is_finite()) {
            return Err(Error::InvalidParameter(format!("exponent {e} must be positive")));
        }
        let lambda = self.lambda.powf(e);
        let rule = match &self.rule {
            SequenceRule::Geometric { theta0: Scalar::Exact(t), ratio: Scalar::Exact(r) }
                if e.fract() == 0.0 && e < 1e6 =>
            {
                let k = e as i32;
                SequenceRule::Geometric {
                    theta0: Scalar::Exact(num_traits::Pow::pow(t, k)),
                    ratio: Scalar::Exact(num_traits::Pow::pow(r, k)),
                }
            }
            SequenceRule::Geometric { theta0, ratio } => SequenceRule::Geometric {
                theta0: Scalar::Float(theta0.to_f64().powf(e)),
                ratio: Scalar::Float(ratio.to_f64().powf(e)),
            },
            SequenceRule::Table { start, values, tail_ratio } => SequenceRule::Table {
                start: *start,
                values: values.iter().map(|v| v.powf(e)).collect(),
                tail_ratio: tail_ratio.powf(e),
            },
            SequenceRule::Subdivided { base, parts } => {
                SequenceRule::Subdivided { base: Box::new(base.pow(e)?), parts: *parts }
            }
        };
        let lambda = match &rule {
            SequenceRule::Geometric { ratio: Scalar::Exact(r), .. } => f64_at_least(r),
            SequenceRule::Geometric { ratio, .. } => ratio.to_f64(),
            _ => lambda,
        };
        Self::with_rule(lambda, rule)
    }
}

/// Smallest double not below q (q > 0).
fn f64_at_least(q: &BigRational) -> f64 {
    let x = rational_to_f64(q);
    if cmp_exact_float(q, x) == Ordering::Greater {
        x.next_up()
    } else {
        x
    }
}

fn clamp_i32(i: i64) -> i32 {
    i.clamp(i32::MIN as i64, i32::MAX as i64) as i32
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(p: i64, r: i64) -> Scalar {
        Scalar::Exact(BigRational::new(p.into(), r.into()))
    }

    #[test]
    fn locate_closed_above_open_below() {
        let s = LacunarySequence::dyadic();
        assert_eq!(s.locate(&q(1, 2)).unwrap(), 1);
        assert_eq!(s.locate(&q(1, 3)).unwrap(), 1);
        assert_eq!(s.locate(&q(1, 4)).unwrap(), 2);
        assert_eq!(s.locate(&q(1, 1)).unwrap(), 0);
        assert_eq!(s.locate(&q(3, 1)).unwrap(), -2);
        assert_eq!(s.locate(&Scalar::Float(0.5)).unwrap(), 1);
        let tiny = Scalar::Exact(BigRational::new(1.into(), BigInt::from(2).pow(3000)));
        assert_eq!(s.locate(&tiny).unwrap(), 3000);
    }

    #[test]
    fn table_extrapolates() {
        let s = LacunarySequence::table(0, vec![1.0, 0.4, 0.1], 0.5, 0.5).unwrap();
        assert_eq!(s.theta(-1), 2.0);
        assert_eq!(s.theta(3), 0.05);
        assert_eq!(s.locate(&Scalar::Float(0.2)).unwrap(), 1);
        assert_eq!(s.locate(&Scalar::Float(3.0)).unwrap(), -2);
        assert!(LacunarySequence::table(0, vec![1.0, 0.9], 0.5, 0.5).is_err());
    }

    #[test]
    fn refine_examples() {
        let d = LacunarySequence::dyadic().refine();
        for i in -5..5 {
            let r = d.theta(i + 1) / d.theta(i);
            assert!((r - 0.5f64.sqrt()).abs() < 1e-14);
        }
        assert_eq!(d.theta_scalar(4), LacunarySequence::dyadic().theta_scalar(2));
        let s = LacunarySequence::geometric(1.0, 0.7).unwrap();
        assert_eq!(s.refine(), s);
        let t = LacunarySequence::geometric(1.0, 0.1).unwrap().refine();
        match t.rule() {
            SequenceRule::Subdivided { parts, .. } => assert_eq!(*parts, 6),
            _ => panic!(),
        }
    }

    #[test]
    fn pow_is_exact() {
        let t = LacunarySequence::geometric_exact(BigRational::one(), BigRational::new(1.into(), 3.into())).unwrap();
        let s = t.pow(2.0).unwrap();
        assert_eq!(s.theta_scalar(2), q(1, 81));
    }

    #[test]
    fn json_round_trip() {
        let s = LacunarySequence::dyadic().refine();
        let text = serde_json::to_string(&s).unwrap();
        let back: LacunarySequence = serde_json::from_str(&text).unwrap();
        assert_eq!(back, s);
    }
}
