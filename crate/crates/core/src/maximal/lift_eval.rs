//! M_Ω χ_E for lifted sets E = ⋃R × [0, α]^{n−2}.
//!
//! α is ten times the largest β(R) and grows like 2^{2N} for the rational
//! slope sets, so a uniform n-dimensional grid cannot resolve E. Instead
//! the plane of the family is rasterized and the vertical directions are
//! sampled by a few slices. A line x − tω is followed by its planar
//! arclength s = t·|ω'| (ω' the planar part): the planar trace is a line in
//! direction u = ω'/|ω'| and the vertical coordinates move by −s·κ with
//! κ = ω_vertical/|ω'|. Radii are dyadic in s, which leaves the sup over
//! r > 0 unchanged; the vertical indicator only restricts s to an interval.

use rayon::prelude::*;

use super::grid::GridFunction;
use crate::direction_sets::DirectionSet;
use crate::error::{Error, Result};
use crate::generators::KakeyaLift;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LineRule {
    /// Digital lines with prefix sums; all grid points at once.
    Digital,
    /// Bilinear samples at planar step h; meant for selected points.
    Interpolated,
}

#[derive(Clone, Debug)]
pub struct LiftOptions {
    /// Cells along the longer side of the planar box.
    pub resolution: usize,
    /// Slices per vertical axis, cell-centred in [0, α].
    pub slices: usize,
    /// Extra space around the bounding box of ⋃3R, relative to its longer side.
    pub margin: f64,
}

impl Default for LiftOptions {
    fn default() -> Self {
        LiftOptions { resolution: 512, slices: 16, margin: 0.1 }
    }
}

pub struct LiftField {
    chi: GridFunction,
    alpha: f64,
    vdim: usize,
    slices: usize,
    lift: KakeyaLift,
}

const SUB: usize = 4;

impl LiftField {
    pub fn new(lift: &KakeyaLift, opts: &LiftOptions) -> Result<Self> {
        if opts.resolution < 16 || opts.slices == 0 {
            return Err(Error::InvalidParameter("resolution >= 16 and slices >= 1 required".into()));
        }
        let rects = &lift.family.rectangles;
        if rects.is_empty() {
            return Err(Error::InvalidParameter("empty rectangle family".into()));
        }
        let mut b = [f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY];
        for r in rects {
            let rb = r.bbox(3.0);
            b[0] = b[0].min(rb[0]);
            b[1] = b[1].min(rb[1]);
            b[2] = b[2].max(rb[2]);
            b[3] = b[3].max(rb[3]);
        }
        let ext = (b[2] - b[0]).max(b[3] - b[1]);
        let pad = opts.margin * ext;
        let (x0, y0) = (b[0] - pad, b[1] - pad);
        let h = (ext + 2.0 * pad) / opts.resolution as f64;
        let nx = (((b[2] + pad) - x0) / h).ceil().max(1.0) as usize;
        let ny = (((b[3] + pad) - y0) / h).ceil().max(1.0) as usize;
        let (nx, ny) = (nx.min(opts.resolution), ny.min(opts.resolution));

        // Coverage fraction from SUB x SUB subsamples per cell; each
        // subsample column is cut exactly against every rectangle.
        let cols: Vec<Vec<u16>> = (0..nx)
            .into_par_iter()
            .map(|i| {
                let mut mask = vec![0u16; ny];
                for a in 0..SUB {
                    let x = x0 + (i as f64 + (a as f64 + 0.5) / SUB as f64) * h;
                    for r in rects {
                        if let Some((lo, hi)) = r.y_interval(x, 1.0) {
                            // Subsample rows with centre in [lo, hi].
                            let first = (((lo - y0) / h) * SUB as f64 - 0.5).ceil().max(0.0) as usize;
                            let last = (((hi - y0) / h) * SUB as f64 - 0.5).floor();
                            if last < 0.0 {
                                continue;
                            }
                            let last = (last as usize).min(ny * SUB - 1);
                            for q in first..=last {
                                mask[q / SUB] |= 1 << (a * SUB + q % SUB);
                            }
                        }
                    }
                }
                mask
            })
            .collect();
        let mut data = Vec::with_capacity(nx * ny);
        for col in &cols {
            data.extend(col.iter().map(|m| m.count_ones() as f64 / (SUB * SUB) as f64));
        }
        let chi = GridFunction::new(vec![nx, ny], h, vec![x0 + 0.5 * h, y0 + 0.5 * h], data)?;
        let vdim = lift.basis.dim().saturating_sub(2);
        Ok(LiftField { chi, alpha: lift.alpha, vdim, slices: opts.slices, lift: lift.clone() })
    }

    /// Planar coverage raster, axes (x, y) of the family's plane.
    pub fn chi(&self) -> &GridFunction {
        &self.chi
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn slice_count(&self) -> usize {
        self.slices.pow(self.vdim as u32)
    }

    pub fn heights(&self, t: usize) -> Vec<f64> {
        let mut t = t;
        let mut z = vec![0.0; self.vdim];
        for m in (0..self.vdim).rev() {
            z[m] = ((t % self.slices) as f64 + 0.5) * self.alpha / self.slices as f64;
            t /= self.slices;
        }
        z
    }

    fn radii_cells(&self) -> Vec<i64> {
        let d = self.chi.dims();
        let diag = ((d[0] * d[0] + d[1] * d[1]) as f64).sqrt();
        let mut v = vec![1i64];
        while (v[v.len() - 1] as f64) < diag {
            v.push(2 * v[v.len() - 1]);
        }
        v
    }

    fn geometry(&self, omega: &DirectionSet) -> Result<Vec<LineGeom>> {
        let n = self.lift.basis.dim();
        if omega.n() != n {
            return Err(Error::DimensionMismatch { expected: n, got: omega.n() });
        }
        if omega.is_empty() {
            return Err(Error::EmptyDirectionSet);
        }
        let mut out = Vec::new();
        for w in omega {
            let c = self.lift.basis.coordinates(&w.unit());
            let rho = c[0].hypot(c[1]);
            // Directions orthogonal to the plane see χ_E constant along the
            // line near x; they add nothing beyond χ itself.
            if rho <= 1e-300 {
                continue;
            }
            let mut u = [c[0] / rho, c[1] / rho];
            let mut kappa: Vec<f64> = c[2..].iter().map(|x| x / rho).collect();
            let dominant_x = u[0].abs() >= u[1].abs();
            let lead = if dominant_x { u[0] } else { u[1] };
            if lead < 0.0 {
                u = [-u[0], -u[1]];
                kappa.iter_mut().for_each(|k| *k = -*k);
            }
            out.push(LineGeom { u, kappa, dominant_x });
        }
        Ok(out)
    }

    /// Admissible planar arclength interval for heights z.
    fn s_range(&self, g: &LineGeom, z: &[f64]) -> (f64, f64) {
        let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
        for (zm, &k) in z.iter().zip(&g.kappa) {
            if k > 0.0 {
                lo = lo.max((zm - self.alpha) / k);
                hi = hi.min(zm / k);
            } else if k < 0.0 {
                lo = lo.max(zm / k);
                hi = hi.min((zm - self.alpha) / k);
            }
        }
        (lo, hi)
    }

    /// M_Ω χ_E on every (slice, planar cell), digital rule.
    pub fn maximal(&self, omega: &DirectionSet) -> Result<Vec<Vec<f64>>> {
        let geoms = self.geometry(omega)?;
        let npts = self.chi.len();
        let mut out = vec![vec![0.0; npts]; self.slice_count()];
        let radii = self.radii_cells();
        for g in &geoms {
            let lines = DigitalLines::new(&self.chi, g);
            let big = lines.span as i64 + 1;
            // Distinct step windows over slices; unbounded ones collapse.
            let mut variants: Vec<((i64, i64), Vec<usize>)> = Vec::new();
            for t in 0..self.slice_count() {
                let (lo, hi) = self.s_range(g, &self.heights(t));
                let ka = (lo / lines.ds).ceil().clamp(-(big as f64), big as f64) as i64;
                let kb = (hi / lines.ds).floor().clamp(-(big as f64), big as f64) as i64;
                match variants.iter_mut().find(|v| v.0 == (ka, kb)) {
                    Some(v) => v.1.push(t),
                    None => variants.push(((ka, kb), vec![t])),
                }
            }
            for ((ka, kb), ts) in variants {
                let vals = lines.window_max(&radii, ka, kb);
                for t in ts {
                    out[t].par_iter_mut().zip(&vals).for_each(|(o, v)| {
                        if *v > *o {
                            *o = *v;
                        }
                    });
                }
            }
        }
        Ok(out)
    }

    /// M_Ω χ_E at the given (planar cell, slice) pairs.
    pub fn maximal_at(&self, omega: &DirectionSet, rule: LineRule, points: &[(usize, usize)]) -> Result<Vec<f64>> {
        match rule {
            LineRule::Digital => {
                let all = self.maximal(omega)?;
                Ok(points.iter().map(|&(c, t)| all[t][c]).collect())
            }
            LineRule::Interpolated => {
                let geoms = self.geometry(omega)?;
                let radii = self.radii_cells();
                let kmax = radii[radii.len() - 1];
                let vals: Vec<f64> = points
                    .par_iter()
                    .map(|&(c, t)| {
                        let z = self.heights(t);
                        let p = self.chi.unravel(c);
                        let mut best = 0.0f64;
                        let mut pref = vec![0.0; (2 * kmax + 2) as usize];
                        for g in &geoms {
                            let (lo, hi) = self.s_range(g, &z);
                            let h = self.chi.spacing();
                            let ka = ((lo / h).ceil().max(-(kmax as f64))) as i64;
                            let kb = ((hi / h).floor().min(kmax as f64)) as i64;
                            for k in -kmax..=kmax {
                                let s = k as f64;
                                let v = self.bilinear(p[0] as f64 - s * g.u[0], p[1] as f64 - s * g.u[1]);
                                let idx = (k + kmax) as usize;
                                pref[idx + 1] = pref[idx] + v;
                            }
                            for &kr in &radii {
                                let a = ka.max(-kr);
                                let b = kb.min(kr);
                                if a > b {
                                    continue;
                                }
                                let sum = pref[(b + kmax + 1) as usize] - pref[(a + kmax) as usize];
                                best = best.max(sum / (2 * kr + 1) as f64);
                            }
                        }
                        best
                    })
                    .collect();
                Ok(vals)
            }
        }
    }

    /// χ at fractional cell coordinates, zero outside.
    fn bilinear(&self, fi: f64, fj: f64) -> f64 {
        let d = self.chi.dims();
        let (i0, j0) = (fi.floor(), fj.floor());
        let (a, b) = (fi - i0, fj - j0);
        let (i0, j0) = (i0 as i64, j0 as i64);
        let mut v = 0.0;
        for (di, wi) in [(0, 1.0 - a), (1, a)] {
            for (dj, wj) in [(0, 1.0 - b), (1, b)] {
                let (i, j) = (i0 + di, j0 + dj);
                if i >= 0 && j >= 0 && (i as usize) < d[0] && (j as usize) < d[1] && wi * wj != 0.0 {
                    v += wi * wj * self.chi.data()[i as usize * d[1] + j as usize];
                }
            }
        }
        v
    }

    /// (cell, slice) pairs in ⋃_R 3R × [3β(R), α − 3β(R)]^{n−2}.
    pub fn dilated_region(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        let rects = &self.lift.family.rectangles;
        for c in 0..self.chi.len() {
            let p = self.chi.position(&self.chi.unravel(c));
            let inside: Vec<usize> = (0..rects.len()).filter(|&r| rects[r].contains([p[0], p[1]], 3.0)).collect();
            if inside.is_empty() {
                continue;
            }
            for t in 0..self.slice_count() {
                let z = self.heights(t);
                let ok = inside.iter().any(|&r| {
                    let b = 3.0 * self.lift.betas[r];
                    z.iter().all(|&zm| zm >= b && zm <= self.alpha - b)
                });
                if ok {
                    out.push((c, t));
                }
            }
        }
        out
    }

    /// ‖M χ_E‖_p / ‖χ_E‖_p over the sampled slab; every sample carries the
    /// same volume, which cancels.
    pub fn norm_ratio(&self, values: &[Vec<f64>], p: f64) -> Result<f64> {
        if !(p > 1.0 && p.is_finite()) {
            return Err(Error::InvalidParameter(format!("p = {p} outside (1, inf)")));
        }
        let den: f64 = self.chi.data().iter().map(|v| v.powf(p)).sum::<f64>() * self.slice_count() as f64;
        if den == 0.0 {
            return Err(Error::ZeroNorm);
        }
        let num: f64 = values.iter().map(|s| s.iter().map(|v| v.powf(p)).sum::<f64>()).sum();
        Ok((num / den).powf(1.0 / p))
    }
}

struct LineGeom {
    u: [f64; 2],
    kappa: Vec<f64>,
    dominant_x: bool,
}

/// Digital lines j = b0 + round(i·c) along the dominant axis, with prefix
/// sums of χ along each line.
struct DigitalLines {
    /// Extents (dominant, cross).
    nd: usize,
    nc: usize,
    c: f64,
    ds: f64,
    lead: f64,
    span: usize,
    /// Prefix sums indexed like the transposed grid (dominant, cross).
    pref: Vec<f64>,
    /// First and last dominant index per line, by b0 − b_min.
    ends: Vec<(i64, i64)>,
    b_min: i64,
    dominant_x: bool,
    ny: usize,
}

impl DigitalLines {
    fn new(chi: &GridFunction, g: &LineGeom) -> Self {
        let (nx, ny) = (chi.dims()[0], chi.dims()[1]);
        let (nd, nc, c, lead) =
            if g.dominant_x { (nx, ny, g.u[1] / g.u[0], g.u[0]) } else { (ny, nx, g.u[0] / g.u[1], g.u[1]) };
        let ds = chi.spacing() / lead;
        let at = |i: usize, j: usize| if g.dominant_x { chi.data()[i * ny + j] } else { chi.data()[j * ny + i] };
        let shift: Vec<i64> = (0..nd).map(|i| (i as f64 * c).round() as i64).collect();
        let b_min = -shift.iter().copied().max().unwrap_or(0);
        let b_max = nc as i64 - 1 - shift.iter().copied().min().unwrap_or(0);
        let mut ends = vec![(i64::MAX, i64::MIN); (b_max - b_min + 1) as usize];
        let mut pref = vec![0.0; nd * nc];
        for i in 0..nd {
            for j in 0..nc {
                let b0 = j as i64 - shift[i];
                let e = &mut ends[(b0 - b_min) as usize];
                e.0 = e.0.min(i as i64);
                e.1 = e.1.max(i as i64);
                let prev = if i > 0 {
                    let jp = b0 + shift[i - 1];
                    if jp >= 0 && (jp as usize) < nc {
                        pref[(i - 1) * nc + jp as usize]
                    } else {
                        0.0
                    }
                } else {
                    0.0
                };
                pref[i * nc + j] = prev + at(i, j);
            }
        }
        DigitalLines { nd, nc, c, ds, lead, span: nd, pref, ends, b_min, dominant_x: g.dominant_x, ny }
    }

    /// Prefix sum of line b0 through dominant index q (inclusive).
    #[inline]
    fn prefix(&self, b0: i64, shift_of: impl Fn(i64) -> i64, q: i64) -> f64 {
        let (first, last) = self.ends[(b0 - self.b_min) as usize];
        if q < first {
            return 0.0;
        }
        let q = q.min(last);
        let j = b0 + shift_of(q);
        self.pref[q as usize * self.nc + j as usize]
    }

    /// Per grid point (original layout): max over radii of the windowed
    /// line average restricted to steps k ∈ [ka, kb].
    fn window_max(&self, radii: &[i64], ka: i64, kb: i64) -> Vec<f64> {
        let shift = |i: i64| (i as f64 * self.c).round() as i64;
        let mut out = vec![0.0; self.nd * self.nc];
        let vals: Vec<f64> = (0..self.nd * self.nc)
            .into_par_iter()
            .map(|idx| {
                let (i, j) = ((idx / self.nc) as i64, (idx % self.nc) as i64);
                let b0 = j - shift(i);
                let (first, last) = self.ends[(b0 - self.b_min) as usize];
                let mut best = 0.0f64;
                for &kr in radii {
                    // Steps covering planar radius kr cells.
                    let kk = ((kr as f64) * self.lead).ceil().max(1.0) as i64;
                    let a = ka.max(-kk);
                    let b = kb.min(kk);
                    if a <= b {
                        let hi = self.prefix(b0, shift, i - a);
                        let lo = self.prefix(b0, shift, i - b - 1);
                        best = best.max((hi - lo) / (2 * kk + 1) as f64);
                    }
                    if (i - kk <= first && i + kk >= last) || (kk >= -ka && kk >= kb) {
                        break;
                    }
                }
                best
            })
            .collect();
        for (idx, v) in vals.into_iter().enumerate() {
            let (i, j) = (idx / self.nc, idx % self.nc);
            let o = if self.dominant_x { i * self.ny + j } else { j * self.ny + i };
            out[o] = v;
        }
        out
    }
}
