//! n-dimensional DFT on periodic grids.
//!
//! Forward transforms are unnormalized and inverse transforms divide by the
//! number of samples, so ‖DFT f‖² = N‖f‖². Index k on an axis of extent E
//! and spacing h stands for the frequency ξ = 2πk'/(Eh), k' the signed
//! representative of k in [−E/2, E/2).

use std::f64::consts::PI;

use rayon::prelude::*;
use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::maximal::GridFunction;

pub fn check_extents(dims: &[usize]) -> Result<()> {
    match dims.iter().find(|d| !d.is_power_of_two() || **d < 2) {
        Some(&d) => Err(Error::NotPowerOfTwo(d)),
        None => Ok(()),
    }
}

fn transform(buf: &mut [Complex64], dims: &[usize], inverse: bool) {
    let mut planner = FftPlanner::new();
    let total = buf.len();
    let mut stride = total;
    for &e in dims {
        stride /= e;
        let fft = if inverse { planner.plan_fft_inverse(e) } else { planner.plan_fft_forward(e) };
        let block = e * stride;
        let mut line = vec![Complex64::new(0.0, 0.0); e];
        let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
        for start in (0..total).step_by(block) {
            for off in 0..stride {
                let base = start + off;
                for (t, v) in line.iter_mut().enumerate() {
                    *v = buf[base + t * stride];
                }
                fft.process_with_scratch(&mut line, &mut scratch);
                for (t, v) in line.iter().enumerate() {
                    buf[base + t * stride] = *v;
                }
            }
        }
    }
}

pub fn forward(f: &GridFunction) -> Result<Vec<Complex64>> {
    check_extents(f.dims())?;
    let mut buf: Vec<Complex64> = f.data().iter().map(|&v| Complex64::new(v, 0.0)).collect();
    transform(&mut buf, f.dims(), false);
    Ok(buf)
}

pub fn inverse(mut buf: Vec<Complex64>, dims: &[usize]) -> Result<Vec<Complex64>> {
    check_extents(dims)?;
    if buf.len() != dims.iter().product::<usize>() {
        return Err(Error::Grid("spectrum length does not match the extents".into()));
    }
    transform(&mut buf, dims, true);
    let scale = 1.0 / buf.len() as f64;
    for v in &mut buf {
        *v *= scale;
    }
    Ok(buf)
}

/// Signed lattice index of k on an axis of extent e.
pub fn signed_index(k: usize, e: usize) -> i64 {
    if k < e / 2 {
        k as i64
    } else {
        k as i64 - e as i64
    }
}

/// Samples of a multiplier at every DFT index, in storage order.
///
/// The Nyquist index −E/2 is its own negative, so a multiplier that is
/// even under ξ → −ξ is averaged over both signs of each Nyquist
/// coordinate. That keeps the sampled multiplier Hermitian and real input
/// real.
pub fn multiplier_values<F>(dims: &[usize], spacing: f64, m: F) -> Result<Vec<f64>>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    check_extents(dims)?;
    let n = dims.len();
    let total: usize = dims.iter().product();
    let scales: Vec<f64> = dims.iter().map(|&e| 2.0 * PI / (e as f64 * spacing)).collect();
    let out = (0..total)
        .into_par_iter()
        .map_init(
            || (vec![0.0; n], Vec::with_capacity(n)),
            |(xi, nyq), flat| {
                let mut rest = flat;
                nyq.clear();
                for a in (0..n).rev() {
                    let k = rest % dims[a];
                    rest /= dims[a];
                    let s = signed_index(k, dims[a]);
                    xi[a] = s as f64 * scales[a];
                    if 2 * s == -(dims[a] as i64) {
                        nyq.push(a);
                    }
                }
                if nyq.is_empty() {
                    return m(xi);
                }
                let count = 1usize << nyq.len();
                let mut acc = 0.0;
                for mask in 0..count {
                    for (b, &a) in nyq.iter().enumerate() {
                        xi[a] = xi[a].abs() * if mask >> b & 1 == 1 { 1.0 } else { -1.0 };
                    }
                    acc += m(xi);
                }
                acc / count as f64
            },
        )
        .collect();
    Ok(out)
}

/// Multiplies a spectrum by precomputed multiplier samples and inverts.
/// Returns the real part and the largest discarded imaginary part.
pub fn apply_values(f: &GridFunction, values: &[f64]) -> Result<(GridFunction, f64)> {
    let mut spec = forward(f)?;
    if spec.len() != values.len() {
        return Err(Error::Grid("multiplier length does not match the grid".into()));
    }
    for (s, &m) in spec.iter_mut().zip(values) {
        *s *= m;
    }
    let back = inverse(spec, f.dims())?;
    let imag = back.iter().map(|c| c.im.abs()).fold(0.0, f64::max);
    let g = f.with_data(back.into_iter().map(|c| c.re).collect())?;
    Ok((g, imag))
}

/// Inverse DFT of m·DFT(f), together with the largest imaginary part.
pub fn apply_multiplier_checked<F>(f: &GridFunction, m: F) -> Result<(GridFunction, f64)>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let values = multiplier_values(f.dims(), f.spacing(), m)?;
    apply_values(f, &values)
}

pub fn apply_multiplier<F>(f: &GridFunction, m: F) -> Result<GridFunction>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    apply_multiplier_checked(f, m).map(|(g, _)| g)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_and_plancherel() {
        let f = GridFunction::from_fn(vec![8, 4, 2], 0.3, |i| ((i[0] * 7 + i[1] * 3 + i[2]) % 5) as f64 - 2.0).unwrap();
        let spec = forward(&f).unwrap();
        let e_space: f64 = f.data().iter().map(|v| v * v).sum();
        let e_freq: f64 = spec.iter().map(|c| c.norm_sqr()).sum();
        assert!((e_freq - f.len() as f64 * e_space).abs() < 1e-9 * e_freq);
        let back = inverse(spec, f.dims()).unwrap();
        for (a, b) in back.iter().zip(f.data()) {
            assert!((a.re - b).abs() < 1e-12 && a.im.abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_odd_extents() {
        let f = GridFunction::zeros(vec![6, 4], 1.0).unwrap();
        assert!(matches!(forward(&f), Err(Error::NotPowerOfTwo(6))));
    }

    #[test]
    fn single_mode_frequency() {
        // cos(2π·3x/(Eh)) sits at k' = ±3.
        let (e, h) = (16usize, 0.25);
        let f = GridFunction::from_fn(vec![e], h, |i| (2.0 * PI * 3.0 * i[0] as f64 / e as f64).cos()).unwrap();
        let target = 2.0 * PI * 3.0 / (e as f64 * h);
        let g = apply_multiplier(&f, |xi| if (xi[0].abs() - target).abs() < 1e-9 { 1.0 } else { 0.0 }).unwrap();
        for (a, b) in g.data().iter().zip(f.data()) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}
