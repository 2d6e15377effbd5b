use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::direction::{Direction, DirectionSet};
use super::sequence::{LacunarySequence, Scalar};
use crate::error::{Error, Result};

/// Coordinate pair (j, k), 1-based with j < k.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SigmaPair {
    j: usize,
    k: usize,
}

impl SigmaPair {
    pub fn new(j: usize, k: usize) -> Result<Self> {
        if j == 0 || j >= k {
            return Err(Error::InvalidParameter(format!("pair ({j},{k}) needs 1 <= j < k")));
        }
        Ok(SigmaPair { j, k })
    }

    pub fn j(&self) -> usize {
        self.j
    }

    pub fn k(&self) -> usize {
        self.k
    }
}

impl fmt::Display for SigmaPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.j, self.k)
    }
}

impl Serialize for SigmaPair {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        [self.j, self.k].serialize(s)
    }
}

impl<'de> Deserialize<'de> for SigmaPair {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let [j, k] = <[usize; 2]>::deserialize(d)?;
        SigmaPair::new(j, k).map_err(serde::de::Error::custom)
    }
}

/// All pairs of Σ(d) in lexicographic order.
pub fn sigma_pairs(d: usize) -> Vec<SigmaPair> {
    let mut v = Vec::new();
    for j in 1..=d {
        for k in j + 1..=d {
            v.push(SigmaPair { j, k });
        }
    }
    v
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SegmentIndex {
    Finite(i64),
    /// ω·e_j = 0 or ω·e_k = 0.
    Infinite,
}

impl fmt::Display for SegmentIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SegmentIndex::Finite(i) => write!(f, "{i}"),
            SegmentIndex::Infinite => write!(f, "inf"),
        }
    }
}

impl Serialize for SegmentIndex {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            SegmentIndex::Finite(i) => s.serialize_i64(*i),
            SegmentIndex::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for SegmentIndex {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            I(i64),
            S(String),
        }
        match Repr::deserialize(d)? {
            Repr::I(i) => Ok(SegmentIndex::Finite(i)),
            Repr::S(s) if s == "inf" => Ok(SegmentIndex::Infinite),
            Repr::S(s) => Err(serde::de::Error::custom(format!("bad segment index {s:?}"))),
        }
    }
}

/// Orthonormal rows e_1..e_d in R^n, d ≤ n.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct Basis {
    rows: Vec<Vec<f64>>,
}

impl From<Basis> for Vec<Vec<f64>> {
    fn from(b: Basis) -> Self {
        b.rows
    }
}

impl TryFrom<Vec<Vec<f64>>> for Basis {
    type Error = Error;
    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self> {
        Basis::new(rows)
    }
}

pub const ORTHONORMAL_TOL: f64 = 1e-12;

impl Basis {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.first().map(Vec::len).ok_or_else(|| Error::InvalidBasis("no rows".into()))?;
        if rows.len() > n {
            return Err(Error::InvalidBasis(format!("{} rows in R^{n}", rows.len())));
        }
        for (a, r) in rows.iter().enumerate() {
            if r.len() != n {
                return Err(Error::DimensionMismatch { expected: n, got: r.len() });
            }
            for (b, s) in rows.iter().enumerate().skip(a) {
                let d: f64 = r.iter().zip(s).map(|(x, y)| x * y).sum();
                let want = if a == b { 1.0 } else { 0.0 };
                if (d - want).abs() > ORTHONORMAL_TOL {
                    return Err(Error::InvalidBasis(format!("rows {a} and {b} have inner product {d}")));
                }
            }
        }
        Ok(Basis { rows })
    }

    pub fn standard(n: usize) -> Self {
        Self::axes(n, &(0..n).collect::<Vec<_>>())
    }

    /// Rows e_{a} for the given 0-based axes.
    pub fn axes(n: usize, axes: &[usize]) -> Self {
        let rows = axes
            .iter()
            .map(|&a| {
                let mut r = vec![0.0; n];
                r[a] = 1.0;
                r
            })
            .collect();
        Basis { rows }
    }

    /// Orthonormal basis of the span of `vectors` by Gram–Schmidt; vectors
    /// whose residual falls below `tol` are skipped.
    pub fn spanning(vectors: &[Vec<f64>], tol: f64) -> Result<Self> {
        let mut rows: Vec<Vec<f64>> = Vec::new();
        for v in vectors {
            let nv = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if nv == 0.0 {
                continue;
            }
            let mut w: Vec<f64> = v.iter().map(|x| x / nv).collect();
            for _ in 0..2 {
                for r in &rows {
                    let d: f64 = w.iter().zip(r).map(|(x, y)| x * y).sum();
                    for (x, y) in w.iter_mut().zip(r) {
                        *x -= d * y;
                    }
                }
            }
            let nw = w.iter().map(|x| x * x).sum::<f64>().sqrt();
            if nw > tol {
                rows.push(w.into_iter().map(|x| x / nw).collect());
            }
        }
        if rows.is_empty() {
            return Err(Error::InvalidBasis("vectors span nothing".into()));
        }
        Basis::new(rows)
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn ambient(&self) -> usize {
        self.rows[0].len()
    }

    /// Axis index of a row that is exactly a standard basis vector.
    fn standard_axis(&self, a: usize) -> Option<usize> {
        let r = &self.rows[a];
        let mut hit = None;
        for (b, &x) in r.iter().enumerate() {
            if x == 1.0 && hit.is_none() {
                hit = Some(b);
            } else if x != 0.0 {
                return None;
            }
        }
        hit
    }

    pub fn is_standard_rows(&self) -> bool {
        (0..self.dim()).all(|a| self.standard_axis(a).is_some())
    }

    /// ω·e_a, exact when possible (rational ω, standard row).
    pub fn component(&self, w: &Direction, a: usize) -> Scalar {
        if let (Some(q), Some(b)) = (w.exact(), self.standard_axis(a)) {
            return Scalar::Exact(q[b].clone());
        }
        Scalar::Float(w.coords().iter().zip(&self.rows[a]).map(|(x, y)| x * y).sum())
    }

    pub fn coordinates(&self, v: &[f64]) -> Vec<f64> {
        self.rows.iter().map(|r| r.iter().zip(v).map(|(x, y)| x * y).sum()).collect()
    }

    /// Distance from the unit vector of `v` to the span of the rows.
    pub fn residual(&self, v: &[f64]) -> f64 {
        let c = self.coordinates(v);
        let mut w = v.to_vec();
        for (r, ci) in self.rows.iter().zip(&c) {
            for (x, y) in w.iter_mut().zip(r) {
                *x -= ci * y;
            }
        }
        w.iter().map(|x| x * x).sum::<f64>().sqrt()
    }
}

/// Index i with θ_{i+1} < |ω_k/ω_j| ≤ θ_i, or ∞ when either coordinate
/// vanishes. Exact comparisons for rational directions in a standard basis,
/// otherwise plain doubles with no tolerance.
pub fn segment_index(w: &Direction, sigma: SigmaPair, seq: &LacunarySequence, basis: &Basis) -> Result<SegmentIndex> {
    if sigma.k > basis.dim() {
        return Err(Error::InvalidParameter(format!("pair {sigma} exceeds basis dimension {}", basis.dim())));
    }
    if w.dim() != basis.ambient() {
        return Err(Error::DimensionMismatch { expected: basis.ambient(), got: w.dim() });
    }
    let cj = basis.component(w, sigma.j - 1);
    let ck = basis.component(w, sigma.k - 1);
    if cj.is_zero() || ck.is_zero() {
        return Ok(SegmentIndex::Infinite);
    }
    let ratio = ck.abs().div(&cj.abs());
    seq.locate(&ratio).map(SegmentIndex::Finite)
}

/// Subset of a direction set with the positions it came from.
#[derive(Clone, Debug, PartialEq)]
pub struct Part {
    pub members: DirectionSet,
    pub positions: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Segment {
    pub sigma: SigmaPair,
    pub index: SegmentIndex,
    pub members: DirectionSet,
    pub positions: Vec<usize>,
}

pub fn partition(
    omega: &DirectionSet,
    sigma: SigmaPair,
    seq: &LacunarySequence,
    basis: &Basis,
) -> Result<BTreeMap<SegmentIndex, Segment>> {
    seq.validate()?;
    let mut out: BTreeMap<SegmentIndex, Segment> = BTreeMap::new();
    for (p, w) in omega.iter().enumerate() {
        let i = segment_index(w, sigma, seq, basis)?;
        let seg = out.entry(i).or_insert_with(|| Segment {
            sigma,
            index: i,
            members: DirectionSet::empty(omega.n()),
            positions: Vec::new(),
        });
        seg.members.push(w.clone())?;
        seg.positions.push(p);
    }
    Ok(out)
}

/// Sign of every coordinate, +1 or -1; zero counts as +1.
pub type SignPattern = Vec<i8>;

pub fn octant_split(omega: &DirectionSet) -> BTreeMap<SignPattern, Part> {
    let mut out: BTreeMap<SignPattern, Part> = BTreeMap::new();
    for (p, w) in omega.iter().enumerate() {
        let key: SignPattern = w.coords().iter().map(|&c| if c < 0.0 { -1 } else { 1 }).collect();
        let part =
            out.entry(key).or_insert_with(|| Part { members: DirectionSet::empty(omega.n()), positions: Vec::new() });
        part.members.push(w.clone()).expect("same dimension");
        part.positions.push(p);
    }
    out
}

/// Basis plus one lacunary sequence per pair of Σ(d), d = number of rows.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DissectionRepr", into = "DissectionRepr")]
pub struct Dissection {
    basis: Basis,
    sequences: BTreeMap<SigmaPair, LacunarySequence>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct SequenceEntry {
    sigma: SigmaPair,
    sequence: LacunarySequence,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct DissectionRepr {
    basis: Basis,
    sequences: Vec<SequenceEntry>,
}

impl From<Dissection> for DissectionRepr {
    fn from(d: Dissection) -> Self {
        DissectionRepr {
            basis: d.basis,
            sequences: d.sequences.into_iter().map(|(sigma, sequence)| SequenceEntry { sigma, sequence }).collect(),
        }
    }
}

impl TryFrom<DissectionRepr> for Dissection {
    type Error = Error;
    fn try_from(r: DissectionRepr) -> Result<Self> {
        Dissection::new(r.basis, r.sequences.into_iter().map(|e| (e.sigma, e.sequence)).collect())
    }
}

impl Dissection {
    pub fn new(basis: Basis, sequences: BTreeMap<SigmaPair, LacunarySequence>) -> Result<Self> {
        let want = sigma_pairs(basis.dim());
        if want.len() != sequences.len() || want.iter().any(|s| !sequences.contains_key(s)) {
            return Err(Error::InvalidParameter(format!(
                "a dissection with {} basis rows needs exactly the pairs of Σ({})",
                basis.dim(),
                basis.dim()
            )));
        }
        for s in sequences.values() {
            s.validate()?;
        }
        Ok(Dissection { basis, sequences })
    }

    /// Same sequence for every pair.
    pub fn uniform(basis: Basis, seq: &LacunarySequence) -> Result<Self> {
        let sequences = sigma_pairs(basis.dim()).into_iter().map(|s| (s, seq.clone())).collect();
        Self::new(basis, sequences)
    }

    pub fn basis(&self) -> &Basis {
        &self.basis
    }

    pub fn sequences(&self) -> &BTreeMap<SigmaPair, LacunarySequence> {
        &self.sequences
    }

    pub fn sequence(&self, sigma: SigmaPair) -> Option<&LacunarySequence> {
        self.sequences.get(&sigma)
    }

    pub fn refined(&self) -> Dissection {
        Dissection {
            basis: self.basis.clone(),
            sequences: self.sequences.iter().map(|(s, q)| (*s, q.refine())).collect(),
        }
    }

    /// Multi-index of ω, one entry per pair in `sigma_pairs` order.
    pub fn cell_index(&self, w: &Direction) -> Result<Vec<SegmentIndex>> {
        self.sequences.iter().map(|(s, q)| segment_index(w, *s, q, &self.basis)).collect()
    }
}

/// Nonempty cells Ω_𝐢 keyed by the multi-index in `sigma_pairs` order.
pub fn cells(omega: &DirectionSet, dissection: &Dissection) -> Result<BTreeMap<Vec<SegmentIndex>, Part>> {
    let mut out: BTreeMap<Vec<SegmentIndex>, Part> = BTreeMap::new();
    for (p, w) in omega.iter().enumerate() {
        let key = dissection.cell_index(w)?;
        let part =
            out.entry(key).or_insert_with(|| Part { members: DirectionSet::empty(omega.n()), positions: Vec::new() });
        part.members.push(w.clone())?;
        part.positions.push(p);
    }
    Ok(out)
}
