use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::generators::{KakeyaLift, Rectangle2D, RectangleFamily};

pub enum UnionInput<'a> {
    Family(&'a RectangleFamily),
    Lift(&'a KakeyaLift),
}

const SUBSAMPLES: usize = 4;

/// Area of ⋃R (dilation 1) or ⋃3R (dilation 3); for a lift, the volume of
/// the union times [0, α]^{n−2}.
///
/// The bounding box is cut into `resolution` columns, each sampled at 4
/// evenly spaced abscissae; on every sample line the union of the exact
/// y-intervals is measured. The only error comes from the x-sampling: it
/// is bounded by the total perimeter times the box width over
/// 4·resolution.
pub fn measure_union(input: UnionInput<'_>, resolution: usize, dilation: u32) -> Result<f64> {
    if resolution < 256 {
        return Err(Error::InvalidParameter(format!("resolution {resolution} is below 256")));
    }
    if dilation != 1 && dilation != 3 {
        return Err(Error::InvalidParameter(format!("dilation must be 1 or 3, got {dilation}")));
    }
    let (rects, factor) = match input {
        UnionInput::Family(f) => (&f.rectangles, 1.0),
        UnionInput::Lift(l) => {
            let k = l.basis.dim().saturating_sub(2) as i32;
            (&l.family.rectangles, l.alpha.powi(k))
        }
    };
    Ok(union_area(rects, dilation as f64, resolution) * factor)
}

pub(crate) fn union_area(rects: &[Rectangle2D], dilation: f64, resolution: usize) -> f64 {
    if rects.is_empty() {
        return 0.0;
    }
    let (mut x0, mut x1) = (f64::INFINITY, f64::NEG_INFINITY);
    for r in rects {
        let b = r.bbox(dilation);
        x0 = x0.min(b[0]);
        x1 = x1.max(b[2]);
    }
    let samples = resolution * SUBSAMPLES;
    let dx = (x1 - x0) / samples as f64;
    let lengths: Vec<f64> = (0..samples)
        .into_par_iter()
        .map(|c| {
            let x = x0 + (c as f64 + 0.5) * dx;
            let mut iv: Vec<(f64, f64)> = rects.iter().filter_map(|r| r.y_interval(x, dilation)).collect();
            iv.sort_by(|a, b| a.0.total_cmp(&b.0));
            let mut total = 0.0;
            let mut cur: Option<(f64, f64)> = None;
            for (lo, hi) in iv {
                match cur {
                    Some((a, b)) if lo <= b => cur = Some((a, b.max(hi))),
                    Some((a, b)) => {
                        total += b - a;
                        cur = Some((lo, hi));
                    }
                    None => cur = Some((lo, hi)),
                }
            }
            if let Some((a, b)) = cur {
                total += b - a;
            }
            total
        })
        .collect();
    lengths.iter().sum::<f64>() * dx
}
