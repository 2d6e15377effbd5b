use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::cone::{ConeSpec, MultiplierStack};
use super::dft::{forward, multiplier_values};
use super::operators::{t_multiplier, CellIndex};
use crate::direction_sets::{segment_index, Basis, Direction, SegmentIndex, SigmaPair};
use crate::error::{Error, Result};
use crate::maximal::GridFunction;

/// Frequencies ξ = spacing·k for k ∈ [−half, half)^n.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FrequencyLattice {
    pub half: i64,
    pub spacing: f64,
}

impl Default for FrequencyLattice {
    /// 256 points per axis at unit spacing.
    fn default() -> Self {
        FrequencyLattice { half: 128, spacing: 1.0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VanishingResult {
    pub max: f64,
    /// A frequency attaining the max, when it is positive.
    pub witness: Option<Vec<f64>>,
    /// Lattice points at which the product was actually evaluated.
    pub evaluated: u64,
}

/// Checks ω ∈ Ω_𝐢 for the stack's sequences, ω in the open positive
/// octant, and θ_{i+1} ≥ (2/3)θ_i at every used index.
pub fn check_cell(omega: &Direction, idx: &CellIndex, stack: &MultiplierStack) -> Result<()> {
    let n = stack.n();
    if omega.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, got: omega.dim() });
    }
    if omega.coords().iter().any(|&c| !(c > 0.0)) {
        return Err(Error::Precondition("the direction must have positive coordinates".into()));
    }
    let basis = Basis::standard(n);
    for (s, seq) in stack.sequences() {
        let i = *idx.get(s).ok_or_else(|| Error::Precondition(format!("the multi-index has no entry for {s}")))?;
        match segment_index(omega, *s, seq, &basis)? {
            SegmentIndex::Finite(got) if got == i => {}
            got => return Err(Error::Precondition(format!("the direction lies in segment {got} of {s}, not {i}"))),
        }
        if 3.0 * seq.theta(i + 1) < 2.0 * seq.theta(i) {
            return Err(Error::Precondition(format!(
                "segment {i} of {s} is wider than a factor 3/2; refine the sequence"
            )));
        }
    }
    if idx.len() != stack.sequences().len() {
        return Err(Error::Precondition("the multi-index has entries for unknown pairs".into()));
    }
    Ok(())
}

/// max |m(rω⊙ξ) ∏_σ (1 − ψ_{σ,i_σ})(ξ)| over a frequency lattice, with no
/// precondition on ω.
///
/// Only the slab |r ω·ξ| < 1 outside the ellipsoid |rω⊙ξ| ≤ 2n² can give
/// a nonzero m, so for each line along the axis of the largest ω
/// coordinate only that window (plus one point of slack on each side) is
/// evaluated. Everything skipped is exactly zero.
pub fn vanishing_max(
    r: f64,
    omega: &[f64],
    idx: &CellIndex,
    stack: &MultiplierStack,
    lattice: &FrequencyLattice,
) -> Result<VanishingResult> {
    let n = stack.n();
    if omega.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: omega.len() });
    }
    if !(r > 0.0 && r.is_finite()) || lattice.half < 1 || !(lattice.spacing > 0.0) {
        return Err(Error::InvalidParameter("need r > 0 and a nonempty lattice".into()));
    }
    let cones: Vec<ConeSpec> = idx.iter().map(|(&s, &i)| stack.cone(s, i)).collect::<Result<_>>()?;
    let lead = (0..n).max_by(|&a, &b| omega[a].abs().total_cmp(&omega[b].abs())).unwrap_or(0);
    let c = r * omega[lead].abs() * lattice.spacing;
    if c == 0.0 {
        return Err(Error::InvalidParameter("zero direction".into()));
    }
    let h = lattice.half;
    let side = (2 * h) as u64;
    let lines = side.pow(n as u32 - 1);
    let n2 = (n * n) as f64;

    let best = (0..lines)
        .into_par_iter()
        .map(|line| {
            let mut xi = vec![0.0; n];
            let mut rest = line;
            let (mut s, mut p) = (0.0, 0.0);
            for a in (0..n).filter(|&a| a != lead) {
                let k = (rest % side) as i64 - h;
                rest /= side;
                xi[a] = lattice.spacing * k as f64;
                let z = r * omega[a] * xi[a];
                s += z;
                p += z * z;
            }
            let (lo, hi) = {
                let (x, y) = ((-1.0 - s) / c, (1.0 - s) / c);
                let (x, y) = if x <= y { (x, y) } else { (y, x) };
                ((x.floor() as i64 - 1).max(-h), (y.ceil() as i64 + 1).min(h - 1))
            };
            let hole = ((4.0 * n2 * n2 - p).max(0.0).sqrt() / c).floor() as i64 - 1;
            let mut local: (f64, Option<Vec<f64>>, u64) = (0.0, None, 0);
            for k in lo..=hi {
                if k.abs() < hole {
                    continue;
                }
                xi[lead] = lattice.spacing * k as f64;
                local.2 += 1;
                let m = t_multiplier(r, omega, &xi);
                if m == 0.0 {
                    continue;
                }
                let v = (m * cones.iter().map(|c| 1.0 - c.psi_eval(&xi)).product::<f64>()).abs();
                if v > local.0 {
                    local = (v, Some(xi.clone()), local.2);
                }
            }
            local
        })
        .reduce(
            || (0.0, None, 0),
            |a, b| {
                let count = a.2 + b.2;
                if b.0 > a.0 {
                    (b.0, b.1, count)
                } else {
                    (a.0, a.1, count)
                }
            },
        );
    Ok(VanishingResult { max: best.0, witness: best.1, evaluated: best.2 })
}

/// `vanishing_max` after checking that ω lies in the cell 𝐢 of a
/// sufficiently fine stack; the result should be exactly zero.
pub fn vanishing_check(
    r: f64,
    omega: &Direction,
    idx: &CellIndex,
    stack: &MultiplierStack,
    lattice: &FrequencyLattice,
) -> Result<VanishingResult> {
    check_cell(omega, idx, stack)?;
    vanishing_max(r, &omega.unit(), idx, stack, lattice)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EmptinessOptions {
    pub samples: usize,
    pub seed: u64,
    /// Constant in the strict pairwise inequality; (n−1)/(n+1) when unset.
    pub cond3: Option<f64>,
}

impl Default for EmptinessOptions {
    fn default() -> Self {
        EmptinessOptions { samples: 1_000_000, seed: 7, cond3: None }
    }
}

fn in_region(xi: &[f64], r: f64, c3: f64) -> bool {
    let n = xi.len();
    let n2 = (n * n) as f64;
    let sum: f64 = xi.iter().sum();
    if sum.abs() > 1.0 / r {
        return false;
    }
    if xi.iter().map(|x| x * x).sum::<f64>().sqrt() < 2.0 * n2 / r {
        return false;
    }
    for j in 0..n {
        for k in j + 1..n {
            if !((xi[k] + xi[j]).abs() > c3 * (xi[k].abs() + xi[j].abs())) {
                return false;
            }
        }
    }
    true
}

/// Points satisfying |Σξ| ≤ 1/r, |ξ| ≥ 2n²/r and, for every pair,
/// |ξ_k + ξ_j| > c(|ξ_k| + |ξ_j|). Scans a `resolution`^n grid over the box
/// of radius 8n²/r, then random points spread over the slab at radii up to
/// 10^4 times the inner one.
pub fn region_emptiness_search(n: usize, r: f64, resolution: usize, opts: &EmptinessOptions) -> Result<Vec<Vec<f64>>> {
    if n < 2 {
        return Err(Error::InvalidParameter("n must be at least 2".into()));
    }
    if resolution < 2 || !(r > 0.0 && r.is_finite()) {
        return Err(Error::InvalidParameter("need r > 0 and at least two points per axis".into()));
    }
    let c3 = opts.cond3.unwrap_or((n as f64 - 1.0) / (n as f64 + 1.0));
    let n2 = (n * n) as f64;
    let big = 8.0 * n2 / r;
    let step = 2.0 * big / (resolution - 1) as f64;
    let total = (resolution as u64).pow(n as u32);
    let mut hits: Vec<Vec<f64>> = (0..total)
        .into_par_iter()
        .filter_map(|flat| {
            let mut rest = flat;
            let mut xi = vec![0.0; n];
            for x in xi.iter_mut().rev() {
                *x = -big + step * (rest % resolution as u64) as f64;
                rest /= resolution as u64;
            }
            in_region(&xi, r, c3).then_some(xi)
        })
        .collect();

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let inner = 2.0 * n2 / r;
    let mut u = vec![0.0; n];
    for _ in 0..opts.samples {
        for x in u.iter_mut() {
            *x = rng.gen_range(-1.0..1.0);
        }
        let mean = u.iter().sum::<f64>() / n as f64;
        u.iter_mut().for_each(|x| *x -= mean);
        let len = u.iter().map(|x| x * x).sum::<f64>().sqrt();
        if len == 0.0 {
            continue;
        }
        let rho = inner * 10f64.powf(rng.gen_range(0.0..4.0));
        let t: f64 = rng.gen_range(-1.0..=1.0) / r;
        let xi: Vec<f64> = u.iter().map(|x| rho * x / len + t / n as f64).collect();
        if in_region(&xi, r, c3) {
            hits.push(xi);
        }
    }
    Ok(hits)
}

/// max over the lattice (ξ_j, ξ_k) ∈ [−half, half]² (other coordinates
/// zero, which ψ_σ ignores) of #{i : ψ_{σ,i}(ξ) > 0}.
pub fn overlap_count(stack: &MultiplierStack, sigma: SigmaPair, half: i64) -> Result<usize> {
    if half < 1 {
        return Err(Error::InvalidParameter("the lattice needs half >= 1".into()));
    }
    let range = stack.active_range(sigma, 1.0 / half as f64, half as f64)?;
    let cones: Vec<ConeSpec> = range.map(|i| stack.cone(sigma, i)).collect::<Result<_>>()?;
    let n = stack.n();
    let side = 2 * half + 1;
    let best = (0..side * side)
        .into_par_iter()
        .map(|flat| {
            let mut xi = vec![0.0; n];
            xi[sigma.j() - 1] = (flat / side - half) as f64;
            xi[sigma.k() - 1] = (flat % side - half) as f64;
            cones.iter().filter(|c| c.psi_eval(&xi) > 0.0).count()
        })
        .max()
        .unwrap_or(0);
    Ok(best)
}

/// (Σ_i ‖K_{σ,i} f‖², ‖f‖²), the left side summed over every i whose cone
/// meets the grid's frequencies, via Plancherel.
pub fn square_function_p2(f: &GridFunction, stack: &MultiplierStack, sigma: SigmaPair) -> Result<(f64, f64)> {
    if f.n() != stack.n() {
        return Err(Error::DimensionMismatch { expected: stack.n(), got: f.n() });
    }
    let cell = f.spacing().powi(f.n() as i32);
    let rhs = f.data().iter().map(|v| v * v).sum::<f64>() * cell;
    if rhs == 0.0 {
        return Ok((0.0, 0.0));
    }
    let spec = forward(f)?;
    let power: Vec<f64> = spec.iter().map(|c| c.norm_sqr()).collect();
    let (ej, ek) = (f.dims()[sigma.j() - 1] as f64, f.dims()[sigma.k() - 1] as f64);
    let range = stack.active_range(sigma, 2.0 / ej, ek / 2.0)?;
    let scale = cell / f.len() as f64;
    let mut lhs = 0.0;
    for i in range {
        let c = stack.cone(sigma, i)?;
        let psi = multiplier_values(f.dims(), f.spacing(), |xi| c.psi_eval(xi))?;
        lhs += psi.iter().zip(&power).map(|(m, p)| m * m * p).sum::<f64>() * scale;
    }
    Ok((lhs, rhs))
}
