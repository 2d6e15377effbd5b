use rayon::prelude::*;

use super::grid::GridFunction;
use super::radii::RadiusSet;
use crate::direction_sets::DirectionSet;
use crate::error::{Error, Result};

// The sampling rule below is shared with the brute-force oracle; both must
// perform the same floating-point operations in the same order.

/// K in t_s = r·s/K, s = −K..=K.
pub(crate) fn half_count(r: f64, h: f64) -> i64 {
    ((r / h).ceil() as i64).max(1)
}

/// Offset in grid units of sample s along axis component w.
#[inline]
pub(crate) fn sample_offset(r_over_h: f64, s: i64, k: i64, w: f64) -> f64 {
    -(r_over_h * (s as f64 / k as f64)) * w
}

/// Multilinear weight of corner c (bit a set = upper neighbour on axis a).
#[inline]
pub(crate) fn corner_weight(fracs: &[f64], c: usize) -> f64 {
    let mut w = 1.0;
    for (a, &f) in fracs.iter().enumerate() {
        w *= if (c >> a) & 1 == 1 { f } else { 1.0 - f };
    }
    w
}

/// Nonzero taps of one (direction, radius) pair.
struct Stencil {
    lin: Vec<isize>,
    offs: Vec<isize>,
    weights: Vec<f64>,
    lo: Vec<isize>,
    hi: Vec<isize>,
    count: f64,
}

impl Stencil {
    fn build(u: &[f64], r: f64, h: f64, strides: &[usize]) -> Stencil {
        let n = u.len();
        let k = half_count(r, h);
        let roh = r / h;
        let mut st = Stencil {
            lin: vec![],
            offs: vec![],
            weights: vec![],
            lo: vec![0; n],
            hi: vec![0; n],
            count: (2 * k + 1) as f64,
        };
        let mut base = vec![0isize; n];
        let mut frac = vec![0.0; n];
        for s in -k..=k {
            for a in 0..n {
                let o = sample_offset(roh, s, k, u[a]);
                let b = o.floor();
                base[a] = b as isize;
                frac[a] = o - b;
            }
            for c in 0..1usize << n {
                let w = corner_weight(&frac, c);
                if w == 0.0 {
                    continue;
                }
                let mut lin = 0isize;
                for a in 0..n {
                    let d = base[a] + ((c >> a) & 1) as isize;
                    st.offs.push(d);
                    st.lo[a] = st.lo[a].min(d);
                    st.hi[a] = st.hi[a].max(d);
                    lin += d * strides[a] as isize;
                }
                st.lin.push(lin);
                st.weights.push(w);
            }
        }
        st
    }

    #[inline]
    fn average(&self, absf: &[f64], dims: &[usize], p: &[usize], lin_p: usize) -> f64 {
        let n = dims.len();
        let interior = (0..n).all(|a| {
            let q = p[a] as isize;
            q + self.lo[a] >= 0 && q + self.hi[a] < dims[a] as isize
        });
        let mut sum = 0.0;
        if interior {
            for (l, w) in self.lin.iter().zip(&self.weights) {
                sum += w * absf[(lin_p as isize + l) as usize];
            }
        } else {
            'tap: for (t, (l, w)) in self.lin.iter().zip(&self.weights).enumerate() {
                for a in 0..n {
                    let q = p[a] as isize + self.offs[t * n + a];
                    if q < 0 || q >= dims[a] as isize {
                        continue 'tap;
                    }
                }
                sum += w * absf[(lin_p as isize + l) as usize];
            }
        }
        sum / self.count
    }
}

pub(crate) fn check_directions(f: &GridFunction, omega: &DirectionSet) -> Result<Vec<Vec<f64>>> {
    if omega.is_empty() {
        return Err(Error::EmptyDirectionSet);
    }
    if omega.n() != f.n() {
        return Err(Error::DimensionMismatch { expected: f.n(), got: omega.n() });
    }
    Ok(omega.units())
}

/// sup over ω and r of the mean of |f| at x − t_s ω, t_s = r·s/K,
/// s = −K..=K, K = ⌈r/h⌉, with multilinear interpolation and zero outside
/// the grid. Parallel over output points; each point reduces directions
/// in order, radii in order, so results do not depend on the thread count.
pub fn directional_maximal(f: &GridFunction, omega: &DirectionSet, radii: &RadiusSet) -> Result<GridFunction> {
    let units = check_directions(f, omega)?;
    Ok(maximal_units(f, &units, radii))
}

pub(crate) fn maximal_units(f: &GridFunction, units: &[Vec<f64>], radii: &RadiusSet) -> GridFunction {
    let strides = f.strides();
    let h = f.spacing();
    let stencils: Vec<Stencil> = units
        .iter()
        .flat_map(|u| radii.radii().iter().map(|&r| Stencil::build(u, r, h, &strides)).collect::<Vec<_>>())
        .collect();
    let absf: Vec<f64> = f.data().iter().map(|v| v.abs()).collect();
    let dims = f.dims();
    let mut out = vec![0.0; f.len()];
    const CHUNK: usize = 1024;
    out.par_chunks_mut(CHUNK).enumerate().for_each(|(ci, chunk)| {
        let start = ci * CHUNK;
        let mut p = f.unravel(start);
        for (o, slot) in chunk.iter_mut().enumerate() {
            let lin = start + o;
            let mut m = 0.0;
            for st in &stencils {
                let v = st.average(&absf, dims, &p, lin);
                if v > m {
                    m = v;
                }
            }
            *slot = m;
            f.advance(&mut p);
        }
    });
    f.with_data(out).expect("finite output")
}

/// One-dimensional maximal function along `axis`, same sampling rule.
pub fn hl_1d(f: &GridFunction, axis: usize, radii: &RadiusSet) -> Result<GridFunction> {
    if axis >= f.n() {
        return Err(Error::InvalidParameter(format!("axis {axis} out of range for n = {}", f.n())));
    }
    let mut e = vec![0.0; f.n()];
    e[axis] = 1.0;
    Ok(maximal_units(f, &[e], radii))
}

/// hl_1d applied along axes 0, 1, …, n−1 in that order. Dominates the
/// strong maximal function up to discretization.
pub fn strong_maximal(f: &GridFunction, radii: &RadiusSet) -> Result<GridFunction> {
    let mut g = f.clone();
    for a in 0..f.n() {
        g = hl_1d(&g, a, radii)?;
    }
    Ok(g)
}

/// Mean of |f| over the sampled segment of radius r through grid point x.
pub fn line_average(f: &GridFunction, x: &[usize], u: &[f64], r: f64) -> f64 {
    let st = Stencil::build(u, r, f.spacing(), &f.strides());
    let absf: Vec<f64> = f.data().iter().map(|v| v.abs()).collect();
    st.average(&absf, f.dims(), x, f.index(x))
}
