use serde::{Deserialize, Serialize};

use super::besicovitch::RectangleFamily;
use crate::direction_sets::{Basis, DirectionSet};
use crate::error::{Error, Result};

/// E_N = ⋃ R × [0, α]^{n−2} in the coordinates of `basis`, whose first two
/// rows are the plane of the family.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KakeyaLift {
    pub family: RectangleFamily,
    pub alpha: f64,
    pub betas: Vec<f64>,
    pub basis: Basis,
    /// Position in Ω of the direction shading each rectangle.
    pub shading: Vec<usize>,
}

/// Rectangle directions must agree with a shadow to this accuracy.
pub const SHADING_TOL: f64 = 1e-9;

pub fn kakeya_lift(family: &RectangleFamily, omega: &DirectionSet, basis: &Basis) -> Result<KakeyaLift> {
    let n = omega.n();
    if basis.dim() != n || basis.ambient() != n {
        return Err(Error::InvalidBasis(format!("ambient basis must have {n} rows in R^{n}")));
    }
    for a in 0..2 {
        let d: f64 =
            basis.rows()[a].iter().zip(&family.plane_basis.rows()[a]).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        if d > 1e-12 {
            return Err(Error::InvalidBasis("the first two basis rows must be the family's plane".into()));
        }
    }
    let coords: Vec<Vec<f64>> = omega.iter().map(|w| basis.coordinates(&w.unit())).collect();
    let mut betas = Vec::with_capacity(family.rectangles.len());
    let mut shading = Vec::with_capacity(family.rectangles.len());
    for (r_idx, r) in family.rectangles.iter().enumerate() {
        let [dx, dy] = r.direction;
        let hit = coords.iter().position(|c| {
            let p = c[0].hypot(c[1]);
            p > 0.0 && ((c[0] * dy - c[1] * dx) / p).abs() <= SHADING_TOL
        });
        let k = hit
            .ok_or_else(|| Error::InvalidParameter(format!("rectangle {r_idx} has no shading direction in the set")))?;
        let p = coords[k][0].hypot(coords[k][1]);
        betas.push(r.diameter() / p);
        shading.push(k);
    }
    let alpha = 10.0 * betas.iter().cloned().fold(0.0, f64::max);
    Ok(KakeyaLift { family: family.clone(), alpha, betas, basis: basis.clone(), shading })
}
