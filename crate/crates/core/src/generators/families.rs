use std::collections::BTreeMap;
use std::ops::RangeInclusive;

use num_rational::BigRational;
use num_traits::Pow;

use crate::direction_sets::{
    sigma_pairs, Basis, Direction, DirectionSet, Dissection, LacunaryCertificate, LacunarySequence, Scalar,
    SequenceRule, SigmaPair,
};
use crate::error::{Error, Result};

/// Directions (ϑ_i^{a_1}, …, ϑ_i^{a_n}) for i = 1..=count, with the
/// sequences θ_{(j,k),i} = ϑ_i^{a_k - a_j} that separate them (shifted by
/// half a band when the directions are not exact).
#[derive(Clone, Debug)]
pub struct NswFamily {
    pub directions: DirectionSet,
    pub sequences: BTreeMap<SigmaPair, LacunarySequence>,
}

pub fn nsw_directions(a: &[f64], vartheta: &LacunarySequence, count: usize) -> Result<NswFamily> {
    let n = a.len();
    if n < 2 {
        return Err(Error::InvalidParameter("need at least two exponents".into()));
    }
    if count == 0 {
        return Err(Error::InvalidParameter("count must be at least 1".into()));
    }
    if !(a[0] > 0.0) || a.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidParameter(format!("exponents must satisfy 0 < a_1 < ... < a_n, got {a:?}")));
    }
    let integer = a.iter().all(|x| x.fract() == 0.0 && *x < 1e6);
    let mut dirs = Vec::with_capacity(count);
    for i in 1..=count as i64 {
        let d = match vartheta.theta_scalar(i) {
            Scalar::Exact(t) if integer => {
                Direction::from_rationals(a.iter().map(|&e| Pow::pow(&t, e as i32)).collect())?
            }
            s => {
                let t = s.to_f64();
                Direction::new(a.iter().map(|&e| t.powf(e)).collect())?
            }
        };
        dirs.push(d);
    }
    let exact = dirs.iter().all(Direction::is_exact);
    let mut sequences = BTreeMap::new();
    for s in sigma_pairs(n) {
        let seq = vartheta.pow(a[s.k() - 1] - a[s.j() - 1])?;
        sequences.insert(s, if exact { seq } else { half_shifted(&seq, count)? });
    }
    Ok(NswFamily { directions: DirectionSet::new(n, dirs)?, sequences })
}

/// θ'_i = (θ_i θ_{i-1})^{1/2}. Float directions sit on the band edges θ_i
/// of the canonical sequence, where rounding would decide the side; the
/// shifted edges put each one strictly inside its own band.
fn half_shifted(seq: &LacunarySequence, count: usize) -> Result<LacunarySequence> {
    if let SequenceRule::Geometric { theta0, ratio } = seq.rule() {
        let (t, r) = (theta0.to_f64(), ratio.to_f64());
        return LacunarySequence::geometric(t / r.sqrt(), r);
    }
    let values = (0..=count as i64 + 1).map(|i| (seq.theta(i) * seq.theta(i - 1)).sqrt()).collect();
    LacunarySequence::table(0, values, seq.lambda(), seq.lambda())
}

impl NswFamily {
    pub fn dissection(&self) -> Result<Dissection> {
        Dissection::new(Basis::standard(self.directions.n()), self.sequences.clone())
    }

    /// Order 1 certificate under the canonical sequences (order 0 for a
    /// single direction).
    pub fn certificate(&self) -> Result<LacunaryCertificate> {
        LacunaryCertificate::auto(&self.directions, Some(self.dissection()?), self.directions.n() + 1)
    }
}

/// Every tuple (2^{k_1}, …, 2^{k_n}) with k_j in the range, in lexicographic
/// order (last index fastest). Tuples that are multiples of each other are
/// kept, so the list has |range|^n entries.
pub fn carbery_directions(n: usize, k_range: RangeInclusive<i64>) -> Result<DirectionSet> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("dimension {n} is below 2")));
    }
    let ks: Vec<i64> = k_range.collect();
    if ks.is_empty() {
        return Err(Error::InvalidParameter("empty exponent range".into()));
    }
    let total = ks
        .len()
        .checked_pow(n as u32)
        .filter(|&t| t <= 10_000_000)
        .ok_or_else(|| Error::InvalidParameter("range too large for enumeration".into()))?;
    let mut dirs = Vec::with_capacity(total);
    let mut idx = vec![0usize; n];
    for _ in 0..total {
        dirs.push(Direction::from_rationals(idx.iter().map(|&m| two_pow(ks[m])).collect())?);
        for a in (0..n).rev() {
            idx[a] += 1;
            if idx[a] < ks.len() {
                break;
            }
            idx[a] = 0;
        }
    }
    DirectionSet::new(n, dirs)
}

/// Dyadic dissection of the standard basis at the root; deeper levels use
/// bases aligned with each segment's span.
pub fn carbery_certificate(omega: &DirectionSet) -> Result<LacunaryCertificate> {
    let top = Dissection::uniform(Basis::standard(omega.n()), &LacunarySequence::dyadic())?;
    LacunaryCertificate::auto(omega, Some(top), omega.n() + 1)
}

fn two_pow(k: i64) -> BigRational {
    let two = BigRational::from_integer(2.into());
    Pow::pow(&two, k as i32)
}

/// The first `count` rationals of [1/2, 2/3], ordered by denominator and
/// then numerator, as reduced pairs (p, q).
pub fn slope_rationals(count: usize) -> Vec<(u64, u64)> {
    let mut out = Vec::with_capacity(count);
    let mut q = 1u64;
    while out.len() < count {
        // p/q in [1/2, 2/3]  <=>  q <= 2p and 3p <= 2q.
        for p in q.div_ceil(2)..=(2 * q) / 3 {
            if num_integer::gcd(p, q) == 1 {
                out.push((p, q));
                if out.len() == count {
                    break;
                }
            }
        }
        q += 1;
    }
    out
}

/// ω_1 = q_ℓ ω_2, ω_j = 2^{-jℓ} (1 < j < n), ω_n fixing the unit norm.
/// For n = 2 the directions are (q_ℓ, 1).
pub fn rational_slope_set(n: usize, count: usize) -> Result<DirectionSet> {
    if n < 2 || count == 0 {
        return Err(Error::InvalidParameter("need n >= 2 and count >= 1".into()));
    }
    let mut dirs = Vec::with_capacity(count);
    for (l, (p, q)) in slope_rationals(count).into_iter().enumerate() {
        let l = (l + 1) as i32;
        let q = p as f64 / q as f64;
        let mut c = vec![0.0; n];
        if n == 2 {
            c[0] = q;
            c[1] = 1.0;
        } else {
            for (j, cj) in c.iter_mut().enumerate().take(n - 1).skip(1) {
                *cj = (-((j + 1) as f64) * l as f64).exp2();
            }
            c[0] = q * c[1];
            let s: f64 = c.iter().map(|x| x * x).sum();
            c[n - 1] = (1.0 - s).sqrt();
        }
        dirs.push(Direction::new(c)?);
    }
    DirectionSet::new(n, dirs)
}

#[derive(Clone, Debug)]
pub struct RotatedFamily {
    pub directions: DirectionSet,
    /// (e_1, e_2', e_3, …, e_{n-1}, e_n').
    pub basis: Basis,
    /// (e_1, e_2'), the plane carrying the badly spaced shadows.
    pub plane: Basis,
    pub taus: Vec<f64>,
}

const SEPARATION: f64 = 2.0 * (1.0 + 1e-9);

/// Directions accumulating at e_n' = (δe_2 + e_n)/|·| whose shadows on
/// span(e_1, e_2') have slopes q_ℓ.
///
/// In the rotated basis ω_ℓ has coordinates c_1 = τ^{n-2}, c_2' = q_ℓ c_1,
/// c_m = τ^{m-2} (3 ≤ m < n) and c_n' > 0 from the unit norm; τ_ℓ is the
/// largest value (found by bisection) for which, against ω_{ℓ-1}, the
/// angle to e_n' halves, (ω·e_n')/(ω·e_2') doubles, and every standard
/// ratio (ω·e_k)/(ω·e_j), (j,k) ≠ (2,n), moves by a factor of at least 2.
pub fn rotated_accumulating_set(n: usize, count: usize, delta: f64) -> Result<RotatedFamily> {
    if n < 3 {
        return Err(Error::InvalidParameter("the rotated construction needs n >= 3".into()));
    }
    if !(delta > 0.0 && delta < 0.2) {
        return Err(Error::InvalidParameter(format!("tilt {delta} outside (0, 0.2)")));
    }
    if count == 0 {
        return Err(Error::InvalidParameter("count must be at least 1".into()));
    }
    let s = (1.0 + delta * delta).sqrt();
    let mut e2p = vec![0.0; n];
    e2p[1] = 1.0 / s;
    e2p[n - 1] = -delta / s;
    let mut enp = vec![0.0; n];
    enp[1] = delta / s;
    enp[n - 1] = 1.0 / s;
    let mut rows = vec![];
    for a in 0..n {
        rows.push(match a {
            1 => e2p.clone(),
            a if a == n - 1 => enp.clone(),
            a => {
                let mut r = vec![0.0; n];
                r[a] = 1.0;
                r
            }
        });
    }
    let basis = Basis::new(rows.clone())?;
    let plane = Basis::new(vec![rows[0].clone(), rows[1].clone()])?;

    let qs: Vec<f64> = slope_rationals(count).into_iter().map(|(p, q)| p as f64 / q as f64).collect();
    let point = |tau: f64, q: f64| -> Option<Vec<f64>> {
        let mut c = vec![0.0; n];
        c[0] = tau.powi(n as i32 - 2);
        c[1] = q * c[0];
        for (m, cm) in c.iter_mut().enumerate().take(n - 1).skip(2) {
            *cm = tau.powi(m as i32 - 1);
        }
        let rest: f64 = c.iter().map(|x| x * x).sum();
        if rest >= 1.0 {
            return None;
        }
        c[n - 1] = (1.0 - rest).sqrt();
        // Back to the standard basis.
        let mut w = vec![0.0; n];
        for (ci, r) in c.iter().zip(&rows) {
            for (x, y) in w.iter_mut().zip(r) {
                *x += ci * y;
            }
        }
        if w.iter().any(|&x| x <= 0.0) {
            return None;
        }
        Some(w)
    };
    let angle_to = |w: &[f64]| -> f64 {
        let d: f64 = w.iter().zip(&enp).map(|(x, y)| x * y).sum();
        d.clamp(-1.0, 1.0).acos()
    };
    let dot = |w: &[f64], r: &[f64]| -> f64 { w.iter().zip(r).map(|(x, y)| x * y).sum() };
    let admissible = |prev: &[f64], w: &[f64]| -> bool {
        if angle_to(prev) < 2.0 * angle_to(w) {
            return false;
        }
        let rp = dot(prev, &enp) / dot(prev, &e2p);
        let rw = dot(w, &enp) / dot(w, &e2p);
        if !(rp * SEPARATION <= rw) {
            return false;
        }
        for sg in sigma_pairs(n) {
            let (j, k) = (sg.j() - 1, sg.k() - 1);
            if (j, k) == (1, n - 1) {
                continue;
            }
            let (a, b) = (prev[k] / prev[j], w[k] / w[j]);
            // Either direction works for separating bands; the pairs that
            // grow are those involving e_1 or e_n.
            let grows = j == 0 || k == n - 1;
            let ok = if grows { a * SEPARATION <= b } else { b * SEPARATION <= a };
            if !ok {
                return false;
            }
        }
        true
    };

    let mut taus = Vec::with_capacity(count);
    let mut dirs: Vec<Vec<f64>> = Vec::with_capacity(count);
    let mut tau = 0.25;
    while point(tau, qs[0]).is_none() {
        tau *= 0.5;
    }
    dirs.push(point(tau, qs[0]).unwrap());
    taus.push(tau);
    for &q in &qs[1..] {
        let prev = dirs.last().unwrap().clone();
        let ok = |t: f64| point(t, q).is_some_and(|w| admissible(&prev, &w));
        let hi0 = *taus.last().unwrap();
        let mut lo = hi0;
        let mut found = false;
        for _ in 0..200 {
            lo *= 0.5;
            if ok(lo) {
                found = true;
                break;
            }
        }
        if !found {
            return Err(Error::Construction(format!("no admissible direction for q = {q} within 200 halvings")));
        }
        let mut hi = (2.0 * lo).min(hi0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if ok(mid) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let w = point(lo, q).unwrap();
        if !admissible(&prev, &w) {
            return Err(Error::Construction(format!("bisection failed for q = {q}")));
        }
        taus.push(lo);
        dirs.push(w);
    }
    let directions = DirectionSet::from_coords(&dirs)?;
    Ok(RotatedFamily { directions, basis, plane, taus })
}
