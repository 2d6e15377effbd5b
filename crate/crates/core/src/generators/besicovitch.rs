use serde::{Deserialize, Serialize};

use crate::direction_sets::{Basis, DirectionSet};
use crate::error::{Error, Result};

/// Closed rectangle in plane coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct Rectangle2D {
    pub center: [f64; 2],
    /// Unit vector along the long side.
    pub direction: [f64; 2],
    pub length: f64,
    pub width: f64,
}

impl Rectangle2D {
    pub fn new(center: [f64; 2], direction: [f64; 2], length: f64, width: f64) -> Result<Self> {
        let nd = direction[0].hypot(direction[1]);
        if !(width > 0.0 && length >= width && length.is_finite()) || !(nd > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "rectangle needs length >= width > 0, got {length} x {width}"
            )));
        }
        Ok(Rectangle2D { center, direction: [direction[0] / nd, direction[1] / nd], length, width })
    }

    pub fn angle(&self) -> f64 {
        self.direction[1].atan2(self.direction[0])
    }

    pub fn diameter(&self) -> f64 {
        self.length.hypot(self.width)
    }

    /// Corners of the rectangle with its length multiplied by `dilation`.
    pub fn corners(&self, dilation: f64) -> [[f64; 2]; 4] {
        let [dx, dy] = self.direction;
        let (hl, hw) = (0.5 * self.length * dilation, 0.5 * self.width);
        let [cx, cy] = self.center;
        [
            [cx - hl * dx + hw * dy, cy - hl * dy - hw * dx],
            [cx + hl * dx + hw * dy, cy + hl * dy - hw * dx],
            [cx + hl * dx - hw * dy, cy + hl * dy + hw * dx],
            [cx - hl * dx - hw * dy, cy - hl * dy + hw * dx],
        ]
    }

    pub fn contains(&self, p: [f64; 2], dilation: f64) -> bool {
        let (rx, ry) = (p[0] - self.center[0], p[1] - self.center[1]);
        let along = rx * self.direction[0] + ry * self.direction[1];
        let across = -rx * self.direction[1] + ry * self.direction[0];
        along.abs() <= 0.5 * self.length * dilation && across.abs() <= 0.5 * self.width
    }

    pub fn bbox(&self, dilation: f64) -> [f64; 4] {
        let c = self.corners(dilation);
        let mut b = [f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY];
        for p in c {
            b[0] = b[0].min(p[0]);
            b[1] = b[1].min(p[1]);
            b[2] = b[2].max(p[0]);
            b[3] = b[3].max(p[1]);
        }
        b
    }

    /// Intersection of the (dilated) rectangle with the vertical line
    /// through x, as an interval of y.
    pub fn y_interval(&self, x: f64, dilation: f64) -> Option<(f64, f64)> {
        let c = self.corners(dilation);
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for e in 0..4 {
            let (p, q) = (c[e], c[(e + 1) % 4]);
            let (x0, x1) = if p[0] <= q[0] { (p, q) } else { (q, p) };
            if x < x0[0] || x > x1[0] {
                continue;
            }
            let y = if x1[0] == x0[0] {
                lo = lo.min(x0[1].min(x1[1]));
                hi = hi.max(x0[1].max(x1[1]));
                continue;
            } else {
                x0[1] + (x - x0[0]) * (x1[1] - x0[1]) / (x1[0] - x0[0])
            };
            lo = lo.min(y);
            hi = hi.max(y);
        }
        (lo <= hi).then_some((lo, hi))
    }
}

/// Rectangles in the plane spanned by `plane_basis`; rectangle coordinates
/// are with respect to those two vectors.
#[derive(Clone, Debug, PartialEq)]
pub struct RectangleFamily {
    pub rectangles: Vec<Rectangle2D>,
    pub plane_basis: Basis,
    pub levels: usize,
}

#[derive(Serialize, Deserialize)]
struct RectangleRepr {
    center: [f64; 2],
    angle: f64,
    length: f64,
    width: f64,
}

#[derive(Serialize, Deserialize)]
pub(crate) struct FamilyRepr {
    levels: usize,
    plane_basis: Basis,
    rectangles: Vec<RectangleRepr>,
}

impl Serialize for RectangleFamily {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        FamilyRepr {
            levels: self.levels,
            plane_basis: self.plane_basis.clone(),
            rectangles: self
                .rectangles
                .iter()
                .map(|r| RectangleRepr { center: r.center, angle: r.angle(), length: r.length, width: r.width })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for RectangleFamily {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = FamilyRepr::deserialize(d)?;
        let rectangles = r
            .rectangles
            .into_iter()
            .map(|x| Rectangle2D::new(x.center, [x.angle.cos(), x.angle.sin()], x.length, x.width))
            .collect::<Result<Vec<_>>>()
            .map_err(serde::de::Error::custom)?;
        if r.plane_basis.dim() != 2 {
            return Err(serde::de::Error::custom("plane basis needs two rows"));
        }
        Ok(RectangleFamily { rectangles, plane_basis: r.plane_basis, levels: r.levels })
    }
}

/// 2^N slopes a + b·j/2^N, j = 0..2^N, with [a, a+b] = [1/2, 2/3].
pub fn default_slopes(levels: usize) -> Vec<f64> {
    let m = 1usize << levels;
    (0..m).map(|j| 0.5 + (1.0 / 6.0) * j as f64 / m as f64).collect()
}

/// Bisection ("Keich") family of 2^N rectangles over the unit x-interval.
///
/// Sorted slopes s_0 < … < s_{M-1} are arranged in a binary tree; the
/// line of leaf j is y = s_0 x + Σ_{k=1}^{N} (σ_k − σ_{k−1})(x − k/N),
/// where σ_k is the smallest slope below the depth-k ancestor of the leaf.
/// Lines sharing a depth-k ancestor therefore meet near x = k/N, which is
/// what compresses the union. Each rectangle covers x ∈ [0, 1] around its
/// line with vertical thickness equal to the mean slope gap, so that the
/// 3-fold dilates spread apart while the originals overlap.
///
/// Slopes come from `slopes` (in-plane directions of the given set, at
/// least 2^N distinct, evenly subsampled when there are more) or from
/// `default_slopes`.
pub fn besicovitch_family(
    levels: usize,
    plane_basis: &Basis,
    slopes: Option<&DirectionSet>,
) -> Result<RectangleFamily> {
    if plane_basis.dim() != 2 {
        return Err(Error::InvalidBasis("the plane basis needs exactly two rows".into()));
    }
    if levels > 24 {
        return Err(Error::InvalidParameter(format!("{levels} levels is too many")));
    }
    let m = 1usize << levels;
    let mut s: Vec<f64> = match slopes {
        None => default_slopes(levels),
        Some(set) => {
            let mut v = Vec::new();
            for w in set {
                let c = plane_basis.coordinates(&w.unit());
                if c[0] != 0.0 && c[1].is_finite() {
                    v.push(c[1] / c[0]);
                }
            }
            v.sort_by(f64::total_cmp);
            v.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * b.abs().max(1.0));
            if v.len() < m {
                return Err(Error::InvalidParameter(format!("{} distinct slopes available, {m} needed", v.len())));
            }
            if v.len() > m {
                let k = v.len();
                v = (0..m).map(|j| v[if m == 1 { 0 } else { j * (k - 1) / (m - 1) }]).collect();
            }
            v
        }
    };
    s.sort_by(f64::total_cmp);
    let spread = s[m - 1] - s[0];
    let thickness = if m == 1 { 1.0 / 6.0 } else { spread / (m - 1) as f64 };

    let mut rectangles = Vec::with_capacity(m);
    for (j, &sj) in s.iter().enumerate() {
        // Offset c with y = s_j x − c; ancestors at depth k cover index
        // blocks of size M / 2^k.
        let mut c = 0.0;
        let mut prev = s[0];
        for k in 1..=levels {
            let block = m >> k;
            let sigma = s[(j / block) * block];
            c += (sigma - prev) * (k as f64 / levels as f64);
            prev = sigma;
        }
        let len = (1.0 + sj * sj).sqrt();
        let center = [0.5, 0.5 * sj - c];
        rectangles.push(Rectangle2D::new(center, [1.0, sj], len, thickness / len)?);
    }
    Ok(RectangleFamily { rectangles, plane_basis: plane_basis.clone(), levels })
}
