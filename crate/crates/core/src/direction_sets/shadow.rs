use num_rational::BigRational;
use num_traits::Zero;

use super::direction::{Direction, DirectionSet};
use super::partition::Basis;

/// Two float shadows closer than this are the same direction.
pub const COALESCE_TOL: f64 = 1e-10;

/// Normalized projections onto span(pi), in ambient coordinates, with
/// directions in the orthogonal complement dropped and duplicates merged
/// (first occurrence kept).
pub fn shadow(omega: &DirectionSet, pi: &Basis) -> DirectionSet {
    let n = omega.n();
    let mut out = DirectionSet::empty(n);
    let axes: Option<Vec<usize>> = if pi.is_standard_rows() {
        Some(pi.rows().iter().map(|r| r.iter().position(|&x| x == 1.0).unwrap()).collect())
    } else {
        None
    };
    let mut units: Vec<Vec<f64>> = Vec::new();
    for w in omega {
        let d = match (w.exact(), &axes) {
            (Some(q), Some(axes)) => {
                let mut p = vec![BigRational::zero(); n];
                for &a in axes {
                    p[a] = q[a].clone();
                }
                if p.iter().all(Zero::is_zero) {
                    continue;
                }
                let d = Direction::from_rationals(p).expect("nonzero projection");
                if out.iter().any(|o| o == &d) {
                    continue;
                }
                d
            }
            _ => {
                let Some(c) = plane_coordinates(w, pi) else {
                    continue;
                };
                let mut p = vec![0.0; n];
                for (ci, r) in c.iter().zip(pi.rows()) {
                    for (x, y) in p.iter_mut().zip(r) {
                        *x += ci * y;
                    }
                }
                let p = normalized(p);
                let dup = units
                    .iter()
                    .any(|v| v.iter().zip(&p).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt() <= COALESCE_TOL);
                if dup {
                    continue;
                }
                Direction::new(p).expect("unit vector")
            }
        };
        units.push(d.unit());
        out.push(d).expect("same dimension");
    }
    out
}

/// Rescales by the largest entry before normalizing, so tiny vectors do
/// not underflow.
fn normalized(v: Vec<f64>) -> Vec<f64> {
    let m = v.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    let v: Vec<f64> = v.into_iter().map(|x| x / m).collect();
    let len = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.into_iter().map(|x| x / len).collect()
}

/// Unit coordinates of the shadow of ω with respect to the rows of `pi`,
/// or None when ω is orthogonal to the subspace.
///
/// A coordinate counts as zero only when it is within the rounding error
/// of its own dot product, so directions arbitrarily close to (but not
/// in) the orthogonal complement keep their shadow.
pub fn plane_coordinates(w: &Direction, pi: &Basis) -> Option<Vec<f64>> {
    let u = w.unit();
    let c = pi.coordinates(&u);
    let noise = |r: &[f64]| 4.0 * f64::EPSILON * r.iter().zip(&u).map(|(a, b)| (a * b).abs()).sum::<f64>();
    if c.iter().zip(pi.rows()).all(|(x, r)| x.abs() <= noise(r)) {
        return None;
    }
    Some(normalized(c))
}
