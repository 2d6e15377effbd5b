use rayon::prelude::*;

use super::directional::check_directions;
use super::grid::GridFunction;
use crate::direction_sets::DirectionSet;
use crate::error::{Error, Result};

/// Grid offsets d with |d·u| h ≤ ℓ/2 and |d − (d·u)u| h ≤ w/2.
fn tube_offsets(u: &[f64], length: f64, width: f64, h: f64) -> Vec<Vec<isize>> {
    let n = u.len();
    let reach = (0.5 * length.max(width) / h).ceil() as isize;
    let mut out = Vec::new();
    let mut d = vec![-reach; n];
    loop {
        let along: f64 = d.iter().zip(u).map(|(&x, y)| x as f64 * y).sum();
        let perp2: f64 = d.iter().zip(u).map(|(&x, y)| (x as f64 - along * y).powi(2)).sum();
        if along.abs() * h <= 0.5 * length + 1e-12 && perp2.sqrt() * h <= 0.5 * width + 1e-12 {
            out.push(d.clone());
        }
        let mut a = n;
        loop {
            if a == 0 {
                return out;
            }
            a -= 1;
            d[a] += 1;
            if d[a] <= reach {
                break;
            }
            d[a] = -reach;
        }
    }
}

fn shifted(dims: &[usize], p: &[usize], d: &[isize], sign: isize) -> Option<usize> {
    let mut lin = 0usize;
    for a in 0..dims.len() {
        let q = p[a] as isize + sign * d[a];
        if q < 0 || q >= dims[a] as isize {
            return None;
        }
        lin = lin * dims[a] + q as usize;
    }
    Some(lin)
}

/// Mean of |f| over the rasterized tube centred at grid point `center`.
pub fn tube_average(f: &GridFunction, center: &[usize], u: &[f64], length: f64, width: f64) -> f64 {
    let offs = tube_offsets(u, length, width, f.spacing());
    let s: f64 = offs.iter().filter_map(|d| shifted(f.dims(), center, d, 1)).map(|i| f.data()[i].abs()).sum();
    s / offs.len() as f64
}

/// sup over tubes T ∋ x with axis in Ω, centre on the grid, and every
/// (length, width) pair, of the mean of |f| over the grid points of T.
pub fn tube_maximal(f: &GridFunction, omega: &DirectionSet, lengths: &[f64], widths: &[f64]) -> Result<GridFunction> {
    let units = check_directions(f, omega)?;
    if lengths.is_empty() || widths.is_empty() {
        return Err(Error::InvalidParameter("need at least one length and one width".into()));
    }
    if lengths.iter().chain(widths).any(|v| !(*v > 0.0)) {
        return Err(Error::InvalidParameter("tube sizes must be positive".into()));
    }
    let dims = f.dims().to_vec();
    let mut out = vec![0.0; f.len()];
    for u in &units {
        for &l in lengths {
            for &w in widths {
                let offs = tube_offsets(u, l, w, f.spacing());
                let cnt = offs.len() as f64;
                let avg: Vec<f64> = (0..f.len())
                    .into_par_iter()
                    .map(|i| {
                        let p = f.unravel(i);
                        let s: f64 =
                            offs.iter().filter_map(|d| shifted(&dims, &p, d, 1)).map(|j| f.data()[j].abs()).sum();
                        s / cnt
                    })
                    .collect();
                out.par_iter_mut().enumerate().for_each(|(i, slot)| {
                    let p = f.unravel(i);
                    for d in &offs {
                        if let Some(c) = shifted(&dims, &p, d, -1) {
                            if avg[c] > *slot {
                                *slot = avg[c];
                            }
                        }
                    }
                });
            }
        }
    }
    f.with_data(out)
}
