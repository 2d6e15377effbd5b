use super::grid::GridFunction;
use crate::error::{Error, Result};

/// (Σ |f|^p h^n)^{1/p}.
pub fn lp_norm(f: &GridFunction, p: f64) -> f64 {
    let cell = f.spacing().powi(f.n() as i32);
    (f.data().iter().map(|v| v.abs().powf(p)).sum::<f64>() * cell).powf(1.0 / p)
}

/// ‖result‖_p / ‖f‖_p on a common grid.
pub fn norm_ratio(f: &GridFunction, result: &GridFunction, p: f64) -> Result<f64> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::InvalidParameter(format!("p = {p} outside (1, inf)")));
    }
    if !f.same_shape(result) {
        return Err(Error::Grid("input and result grids differ".into()));
    }
    let d = lp_norm(f, p);
    if d == 0.0 {
        return Err(Error::ZeroNorm);
    }
    Ok(lp_norm(result, p) / d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scaling() {
        let f = GridFunction::from_fn(vec![4, 4], 0.5, |i| (i[0] + i[1]) as f64).unwrap();
        let g = f.with_data(f.data().iter().map(|v| 2.0 * v).collect()).unwrap();
        assert_eq!(norm_ratio(&f, &f, 2.0).unwrap(), 1.0);
        assert!((norm_ratio(&f, &g, 3.0).unwrap() - 2.0).abs() < 1e-14);
        let z = GridFunction::zeros(vec![4, 4], 0.5).unwrap();
        assert!(matches!(norm_ratio(&z, &f, 2.0), Err(Error::ZeroNorm)));
        assert!(norm_ratio(&f, &f, 1.0).is_err());
    }
}
