use std::collections::BTreeMap;

use super::cone::MultiplierStack;
use super::dft::{apply_values, forward, inverse, multiplier_values};
use super::profile::{eta_o, m_multiplier, m_o};
use crate::direction_sets::SigmaPair;
use crate::error::{Error, Result};
use crate::maximal::GridFunction;

/// A cell multi-index 𝐢 = (i_σ)_σ with finite entries.
pub type CellIndex = BTreeMap<SigmaPair, i64>;

fn scaled(r: f64, omega: &[f64], xi: &[f64], out: &mut [f64]) {
    for ((o, w), x) in out.iter_mut().zip(omega).zip(xi) {
        *o = r * w * x;
    }
}

/// m(r ω⊙ξ), the symbol of T_{r,ω}.
pub fn t_multiplier(r: f64, omega: &[f64], xi: &[f64]) -> f64 {
    let mut z = vec![0.0; xi.len()];
    scaled(r, omega, xi, &mut z);
    m_multiplier(xi.len(), &z)
}

/// η_o(r ω⊙ξ) m_o(r ω·ξ), the symbol of S_{r,ω}.
pub fn s_multiplier(r: f64, omega: &[f64], xi: &[f64]) -> f64 {
    let mut z = vec![0.0; xi.len()];
    scaled(r, omega, xi, &mut z);
    eta_o(xi.len(), &z) * m_o(z.iter().sum())
}

fn check_omega(n: usize, r: f64, omega: &[f64]) -> Result<()> {
    if omega.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: omega.len() });
    }
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::InvalidParameter(format!("scale r = {r} must be positive")));
    }
    Ok(())
}

fn check_grid(f: &GridFunction, stack: &MultiplierStack) -> Result<()> {
    if f.n() != stack.n() {
        return Err(Error::DimensionMismatch { expected: stack.n(), got: f.n() });
    }
    Ok(())
}

fn check_index(idx: &CellIndex, stack: &MultiplierStack) -> Result<()> {
    if idx.len() != stack.sequences().len() || idx.keys().any(|s| !stack.sequences().contains_key(s)) {
        return Err(Error::InvalidParameter("the multi-index must have one entry per pair".into()));
    }
    Ok(())
}

/// Samples of ψ_{σ,i} for every σ of the multi-index.
fn psi_values(f: &GridFunction, idx: &CellIndex, stack: &MultiplierStack) -> Result<Vec<Vec<f64>>> {
    idx.iter()
        .map(|(&s, &i)| {
            let c = stack.cone(s, i)?;
            multiplier_values(f.dims(), f.spacing(), |xi| c.psi_eval(xi))
        })
        .collect()
}

/// K_{σ,i} f.
pub fn apply_k(f: &GridFunction, sigma: SigmaPair, i: i64, stack: &MultiplierStack) -> Result<GridFunction> {
    check_grid(f, stack)?;
    let c = stack.cone(sigma, i)?;
    let v = multiplier_values(f.dims(), f.spacing(), |xi| c.psi_eval(xi))?;
    Ok(apply_values(f, &v)?.0)
}

/// R_𝐢 f, with symbol ∏_σ (1 − ψ_{σ,i_σ}).
pub fn apply_r(f: &GridFunction, idx: &CellIndex, stack: &MultiplierStack) -> Result<GridFunction> {
    check_grid(f, stack)?;
    check_index(idx, stack)?;
    let psis = psi_values(f, idx, stack)?;
    let v: Vec<f64> = (0..f.len()).map(|t| psis.iter().map(|p| 1.0 - p[t]).product()).collect();
    Ok(apply_values(f, &v)?.0)
}

/// T_{r,ω} f.
pub fn apply_t(f: &GridFunction, r: f64, omega: &[f64]) -> Result<GridFunction> {
    check_omega(f.n(), r, omega)?;
    let v = multiplier_values(f.dims(), f.spacing(), |xi| t_multiplier(r, omega, xi))?;
    Ok(apply_values(f, &v)?.0)
}

/// Relative L² residual ‖Tf − (T R_𝐢 f + Σ_Γ (−1)^{|Γ|+1} T ∏_{σ∈Γ} K f)‖ / ‖f‖.
/// Each of the 2^{|Σ|} terms is inverted separately before summing.
pub fn inclusion_exclusion_residual(
    f: &GridFunction,
    r: f64,
    omega: &[f64],
    idx: &CellIndex,
    stack: &MultiplierStack,
) -> Result<f64> {
    check_grid(f, stack)?;
    check_index(idx, stack)?;
    check_omega(f.n(), r, omega)?;
    let norm: f64 = f.data().iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm == 0.0 {
        return Ok(0.0);
    }
    let spec = forward(f)?;
    let t = multiplier_values(f.dims(), f.spacing(), |xi| t_multiplier(r, omega, xi))?;
    let psis = psi_values(f, idx, stack)?;
    let run = |m: &dyn Fn(usize) -> f64| -> Result<Vec<f64>> {
        let s = spec.iter().enumerate().map(|(q, c)| c * (t[q] * m(q))).collect();
        Ok(inverse(s, f.dims())?.into_iter().map(|c| c.re).collect())
    };
    let lhs = run(&|_| 1.0)?;
    let mut rhs = run(&|q| psis.iter().map(|p| 1.0 - p[q]).product())?;
    let d = psis.len();
    for gamma in 1usize..(1 << d) {
        let sign = if gamma.count_ones() % 2 == 1 { 1.0 } else { -1.0 };
        let term = run(&|q| (0..d).filter(|b| gamma >> b & 1 == 1).map(|b| psis[b][q]).product())?;
        for (x, y) in rhs.iter_mut().zip(term) {
            *x += sign * y;
        }
    }
    let err: f64 = lhs.iter().zip(&rhs).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
    Ok(err / norm)
}
