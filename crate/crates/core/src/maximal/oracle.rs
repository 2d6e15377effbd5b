use super::directional::{check_directions, corner_weight, half_count, sample_offset};
use super::grid::GridFunction;
use super::radii::RadiusSet;
use crate::direction_sets::DirectionSet;
use crate::error::{Error, Result};

pub const ORACLE_LIMIT: usize = 1_000_000;

/// Reference evaluation of `directional_maximal`: a plain loop over points,
/// directions, radii, samples and corners, recomputing everything. The
/// accumulation order matches the optimized path, so the two agree bit for
/// bit.
pub fn brute_oracle(f: &GridFunction, omega: &DirectionSet, radii: &RadiusSet) -> Result<GridFunction> {
    if f.len() > ORACLE_LIMIT {
        return Err(Error::OracleGuard { cells: f.len(), limit: ORACLE_LIMIT });
    }
    let units = check_directions(f, omega)?;
    let n = f.n();
    let h = f.spacing();
    let dims = f.dims();
    let mut out = vec![0.0; f.len()];
    let mut frac = vec![0.0; n];
    let mut base = vec![0i64; n];
    for (lin, slot) in out.iter_mut().enumerate() {
        let p = f.unravel(lin);
        let mut m = 0.0;
        for u in &units {
            for &r in radii.radii() {
                let k = half_count(r, h);
                let mut sum = 0.0;
                for s in -k..=k {
                    for a in 0..n {
                        let o = sample_offset(r / h, s, k, u[a]);
                        let b = o.floor();
                        base[a] = b as i64;
                        frac[a] = o - b;
                    }
                    'corner: for c in 0..1usize << n {
                        let w = corner_weight(&frac, c);
                        let mut idx = vec![0usize; n];
                        for a in 0..n {
                            let q = p[a] as i64 + base[a] + ((c >> a) & 1) as i64;
                            if q < 0 || q >= dims[a] as i64 {
                                continue 'corner;
                            }
                            idx[a] = q as usize;
                        }
                        if w == 0.0 {
                            continue;
                        }
                        sum += w * f.get(&idx).abs();
                    }
                }
                let v = sum / (2 * k + 1) as f64;
                if v > m {
                    m = v;
                }
            }
        }
        *slot = m;
    }
    f.with_data(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn guard() {
        let g = GridFunction::zeros(vec![1001, 1000], 1.0).unwrap();
        let omega = DirectionSet::from_coords(&[vec![1.0, 0.0]]).unwrap();
        let r = RadiusSet::new(vec![1.0]).unwrap();
        assert!(matches!(brute_oracle(&g, &omega, &r), Err(Error::OracleGuard { .. })));
    }
}
