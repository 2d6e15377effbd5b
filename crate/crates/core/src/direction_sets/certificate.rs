use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::direction::DirectionSet;
use super::partition::{partition, sigma_pairs, Basis, Dissection, Segment, SegmentIndex, SigmaPair};
use super::sequence::LacunarySequence;
use crate::error::{Error, Result};

/// Members must lie within this distance of the span of the dissection basis.
pub const SPAN_TOL: f64 = 1e-9;

/// Recursive witness that a finite set is lacunary of a given order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LacunaryCertificate {
    pub order: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dissection: Option<Dissection>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub children: Vec<CertificateChild>,
    /// Uniform bound on every lacunary constant in the tree, when claimed.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_lambda: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificateChild {
    pub sigma: SigmaPair,
    pub index: SegmentIndex,
    pub certificate: LacunaryCertificate,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Violation {
    EmptySet,
    NotSingleton { distinct: usize },
    MissingDissection,
    BasisTooSmall { rows: usize },
    OutsideSpan { position: usize, distance: f64 },
    LambdaBound { sigma: SigmaPair, lambda: f64, bound: f64 },
    MissingChild { sigma: SigmaPair, index: SegmentIndex },
    DuplicateChild { sigma: SigmaPair, index: SegmentIndex },
    ChildOnEmptySegment { sigma: SigmaPair, index: SegmentIndex },
    ChildOrderTooLarge { sigma: SigmaPair, index: SegmentIndex, child: usize, parent: usize },
    Sequence(String),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::EmptySet => write!(f, "empty direction set"),
            Violation::NotSingleton { distinct } => {
                write!(f, "order 0 claimed for {distinct} distinct directions")
            }
            Violation::MissingDissection => write!(f, "positive order without a dissection"),
            Violation::BasisTooSmall { rows } => {
                write!(f, "dissection basis has {rows} row(s), at least 2 are needed")
            }
            Violation::OutsideSpan { position, distance } => {
                write!(f, "direction {position} is {distance:e} away from the basis span")
            }
            Violation::LambdaBound { sigma, lambda, bound } => {
                write!(f, "sequence for {sigma} has lambda {lambda} above the bound {bound}")
            }
            Violation::MissingChild { sigma, index } => {
                write!(f, "no child certificate for segment {sigma}/{index}")
            }
            Violation::DuplicateChild { sigma, index } => {
                write!(f, "two child certificates for segment {sigma}/{index}")
            }
            Violation::ChildOnEmptySegment { sigma, index } => {
                write!(f, "child certificate for empty segment {sigma}/{index}")
            }
            Violation::ChildOrderTooLarge { sigma, index, child, parent } => {
                write!(f, "child {sigma}/{index} has order {child}, parent order is {parent}")
            }
            Violation::Sequence(m) => write!(f, "sequence error: {m}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Witness {
    /// Segments followed from the root to the offending node.
    pub path: Vec<(SigmaPair, SegmentIndex)>,
    pub violation: Violation,
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "at root")?;
        for (s, i) in &self.path {
            write!(f, " > {s}/{i}")?;
        }
        write!(f, ": {}", self.violation)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Verdict {
    Valid { order: usize },
    Invalid(Witness),
}

impl Verdict {
    pub fn is_valid(&self) -> bool {
        matches!(self, Verdict::Valid { .. })
    }
}

pub fn verify_lacunary_certificate(omega: &DirectionSet, cert: &LacunaryCertificate) -> Verdict {
    if omega.is_empty() {
        return Verdict::Invalid(Witness { path: vec![], violation: Violation::EmptySet });
    }
    let mut path = Vec::new();
    match check(omega, cert, cert.max_lambda, &mut path) {
        Ok(()) => Verdict::Valid { order: cert.order },
        Err(violation) => Verdict::Invalid(Witness { path, violation }),
    }
}

fn check(
    omega: &DirectionSet,
    cert: &LacunaryCertificate,
    bound: Option<f64>,
    path: &mut Vec<(SigmaPair, SegmentIndex)>,
) -> std::result::Result<(), Violation> {
    if cert.order == 0 {
        let distinct = omega.distinct_count();
        return if distinct == 1 { Ok(()) } else { Err(Violation::NotSingleton { distinct }) };
    }
    let ds = cert.dissection.as_ref().ok_or(Violation::MissingDissection)?;
    let basis = ds.basis();
    if basis.dim() < 2 {
        return Err(Violation::BasisTooSmall { rows: basis.dim() });
    }
    for (position, w) in omega.iter().enumerate() {
        let distance = basis.residual(&w.unit());
        if distance > SPAN_TOL {
            return Err(Violation::OutsideSpan { position, distance });
        }
    }
    let bound = cert.max_lambda.or(bound);
    if let Some(b) = bound {
        for (sigma, q) in ds.sequences() {
            if q.lambda() > b {
                return Err(Violation::LambdaBound { sigma: *sigma, lambda: q.lambda(), bound: b });
            }
        }
    }
    let mut by_key: BTreeMap<(SigmaPair, SegmentIndex), &LacunaryCertificate> = BTreeMap::new();
    for c in &cert.children {
        if by_key.insert((c.sigma, c.index), &c.certificate).is_some() {
            return Err(Violation::DuplicateChild { sigma: c.sigma, index: c.index });
        }
    }
    let mut segments = BTreeMap::new();
    for sigma in sigma_pairs(basis.dim()) {
        let seq = ds.sequence(sigma).expect("dissection covers every pair");
        let parts = partition(omega, sigma, seq, basis).map_err(|e| Violation::Sequence(e.to_string()))?;
        segments.insert(sigma, parts);
    }
    for (sigma, index) in by_key.keys() {
        if !segments[sigma].contains_key(index) {
            return Err(Violation::ChildOnEmptySegment { sigma: *sigma, index: *index });
        }
    }
    for (sigma, parts) in &segments {
        for (index, seg) in parts {
            let child =
                by_key.get(&(*sigma, *index)).ok_or(Violation::MissingChild { sigma: *sigma, index: *index })?;
            if child.order >= cert.order {
                return Err(Violation::ChildOrderTooLarge {
                    sigma: *sigma,
                    index: *index,
                    child: child.order,
                    parent: cert.order,
                });
            }
            path.push((*sigma, *index));
            check(&seg.members, child, bound, path)?;
            path.pop();
        }
    }
    Ok(())
}

/// True iff every estimate is at most twice the estimate of `i_star`.
pub fn verify_dominating(
    segments: &BTreeMap<SegmentIndex, Segment>,
    estimates: &BTreeMap<SegmentIndex, f64>,
    i_star: SegmentIndex,
) -> Result<bool> {
    let star = *estimates.get(&i_star).ok_or_else(|| Error::MissingEstimate(i_star.to_string()))?;
    let mut ok = true;
    for i in segments.keys() {
        let e = *estimates.get(i).ok_or_else(|| Error::MissingEstimate(i.to_string()))?;
        if e > 2.0 * star {
            ok = false;
        }
    }
    Ok(ok)
}

impl LacunaryCertificate {
    pub fn singleton() -> Self {
        LacunaryCertificate { order: 0, dissection: None, children: vec![], max_lambda: None }
    }

    /// Builds a certificate by recursive dissection.
    ///
    /// The root uses `top` when given. Every other node takes the basis
    /// obtained by projecting its parent's basis onto the span of its
    /// members, and for each pair a dyadic sequence whose band edges are
    /// shifted to sit halfway between the members' ratios on a log scale.
    /// Fails when `max_depth` levels do not reduce the set to singletons.
    pub fn auto(omega: &DirectionSet, top: Option<Dissection>, max_depth: usize) -> Result<Self> {
        if omega.is_empty() {
            return Err(Error::EmptyDirectionSet);
        }
        let top = match top {
            Some(d) => d,
            None => {
                let basis = Basis::spanning(&project_rows(&Basis::standard(omega.n()), omega)?, SPAN_TOL)?;
                centred_dissection(omega, basis)?
            }
        };
        build(omega, top, max_depth)
    }
}

fn build(omega: &DirectionSet, ds: Dissection, depth: usize) -> Result<LacunaryCertificate> {
    if omega.distinct_count() <= 1 {
        return Ok(LacunaryCertificate::singleton());
    }
    if depth == 0 {
        return Err(Error::Construction("dissection depth exhausted before reaching singletons".into()));
    }
    let mut children = Vec::new();
    let mut order = 0;
    let mut lam = ds.sequences().values().map(LacunarySequence::lambda).fold(0.0, f64::max);
    for (sigma, seq) in ds.sequences() {
        for (index, seg) in partition(omega, *sigma, seq, ds.basis())? {
            let child = if seg.members.distinct_count() <= 1 {
                LacunaryCertificate::singleton()
            } else {
                let rows = project_rows(ds.basis(), &seg.members)?;
                let basis = Basis::spanning(&rows, SPAN_TOL)?;
                build(&seg.members, centred_dissection(&seg.members, basis)?, depth - 1)?
            };
            order = order.max(child.order + 1);
            if let Some(l) = child.max_lambda {
                lam = lam.max(l);
            }
            children.push(CertificateChild { sigma: *sigma, index, certificate: child });
        }
    }
    Ok(LacunaryCertificate { order, dissection: Some(ds), children, max_lambda: Some(lam) })
}

/// Parent rows projected onto the span of the members.
fn project_rows(parent: &Basis, members: &DirectionSet) -> Result<Vec<Vec<f64>>> {
    let span = Basis::spanning(&members.units(), SPAN_TOL)?;
    Ok(parent
        .rows()
        .iter()
        .map(|r| {
            let c = span.coordinates(r);
            let mut p = vec![0.0; r.len()];
            for (ci, s) in c.iter().zip(span.rows()) {
                for (x, y) in p.iter_mut().zip(s) {
                    *x += ci * y;
                }
            }
            p
        })
        .collect())
}

const EDGE_MARGIN: f64 = 1e-6;

/// Dyadic bands per pair. Band edges sit halfway around the circular mean
/// of the members' log2-ratios, unless an edge placed in a gap between
/// them separates more members or keeps them clearly further from the
/// edges.
fn centred_dissection(members: &DirectionSet, basis: Basis) -> Result<Dissection> {
    let mut sequences = BTreeMap::new();
    for sigma in sigma_pairs(basis.dim()) {
        let mut logs = Vec::new();
        for w in members {
            let c = basis.coordinates(&w.unit());
            let (a, b) = (c[sigma.j() - 1].abs(), c[sigma.k() - 1].abs());
            if a > 1e-12 && b > 1e-12 {
                logs.push((b / a).log2());
            }
        }
        let (mut sx, mut sy) = (0.0, 0.0);
        for t in &logs {
            let ang = std::f64::consts::TAU * (t - t.floor());
            sx += ang.cos();
            sy += ang.sin();
        }
        let phi = if sx == 0.0 && sy == 0.0 { 0.0 } else { sy.atan2(sx) / std::f64::consts::TAU };
        // (occupied bands, distance from the nearest member to an edge)
        let score = |edge: f64| {
            let mut v: Vec<i64> = logs.iter().map(|t| (t - edge).floor() as i64).collect();
            v.sort_unstable();
            v.dedup();
            let margin = logs.iter().map(|t| {
                let f = (t - edge) - (t - edge).floor();
                f.min(1.0 - f)
            });
            (v.len(), margin.fold(0.5, f64::min))
        };
        let mut edge = phi + 0.5;
        let mut best = score(edge);
        let mut fr: Vec<f64> = logs.iter().map(|t| t - t.floor()).collect();
        fr.sort_by(f64::total_cmp);
        for q in 0..fr.len() {
            let next = if q + 1 < fr.len() { fr[q + 1] } else { fr[0] + 1.0 };
            let e = 0.5 * (fr[q] + next);
            let c = score(e);
            // Gaps narrower than EDGE_MARGIN are rounding noise.
            if c.1 >= EDGE_MARGIN && (c.0 > best.0 || (c.0 == best.0 && c.1 > best.1 + EDGE_MARGIN)) {
                best = c;
                edge = e;
            }
        }
        let edge = edge - edge.floor();
        sequences.insert(sigma, LacunarySequence::geometric(edge.exp2(), 0.5)?);
    }
    Dissection::new(basis, sequences)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::direction_sets::Direction;

    #[test]
    fn singleton_and_corruption() {
        let one = DirectionSet::from_coords(&[vec![1.0, 2.0], vec![2.0, 4.0]]).unwrap();
        assert_eq!(verify_lacunary_certificate(&one, &LacunaryCertificate::singleton()), Verdict::Valid { order: 0 });
        let two = DirectionSet::new(
            2,
            vec![Direction::from_integers(&[1, 1]).unwrap(), Direction::from_integers(&[1, 4]).unwrap()],
        )
        .unwrap();
        let v = verify_lacunary_certificate(&two, &LacunaryCertificate::singleton());
        assert!(matches!(v, Verdict::Invalid(Witness { violation: Violation::NotSingleton { distinct: 2 }, .. })));

        let ds = Dissection::uniform(Basis::standard(2), &LacunarySequence::dyadic()).unwrap();
        let cert = LacunaryCertificate::auto(&two, Some(ds), 4).unwrap();
        assert_eq!(verify_lacunary_certificate(&two, &cert), Verdict::Valid { order: 1 });
        let mut bad = cert.clone();
        bad.children.pop();
        assert!(!verify_lacunary_certificate(&two, &bad).is_valid());
        let mut bad = cert.clone();
        bad.children[0].index = SegmentIndex::Finite(40);
        match verify_lacunary_certificate(&two, &bad) {
            Verdict::Invalid(w) => assert!(matches!(w.violation, Violation::ChildOnEmptySegment { .. })),
            v => panic!("{v:?}"),
        }
    }

    #[test]
    fn dominating() {
        let s = DirectionSet::from_coords(&[vec![1.0, 1.0], vec![4.0, 1.0]]).unwrap();
        let segs =
            partition(&s, SigmaPair::new(1, 2).unwrap(), &LacunarySequence::dyadic(), &Basis::standard(2)).unwrap();
        let keys: Vec<_> = segs.keys().copied().collect();
        let mut est = BTreeMap::new();
        est.insert(keys[0], 1.0);
        assert!(verify_dominating(&segs, &est, keys[0]).is_err());
        est.insert(keys[1], 3.0);
        assert!(!verify_dominating(&segs, &est, keys[0]).unwrap());
        est.insert(keys[1], 1.0);
        assert!(verify_dominating(&segs, &est, keys[0]).unwrap());
    }
}
