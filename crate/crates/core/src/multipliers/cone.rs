use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::profile::smooth_step;
use crate::direction_sets::{sigma_pairs, Dissection, LacunarySequence, SigmaPair};
use crate::error::{Error, Result};

/// Smoothed indicator of the double cone |θξ_k + ξ_j| ≤ c(|θξ_k| + |ξ_j|)
/// for σ = (j, k): one for c = inner, zero from c = outer on.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConeSpec {
    pub sigma: SigmaPair,
    pub theta: f64,
    pub inner: f64,
    pub outer: f64,
}

impl ConeSpec {
    /// Constants (n−1)/n and n/(n+1).
    pub fn new(n: usize, sigma: SigmaPair, theta: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParameter("n must be at least 2".into()));
        }
        let n = n as f64;
        Self::with_constants(sigma, theta, (n - 1.0) / n, n / (n + 1.0))
    }

    pub fn with_constants(sigma: SigmaPair, theta: f64, inner: f64, outer: f64) -> Result<Self> {
        if !(theta > 0.0 && theta.is_finite()) {
            return Err(Error::InvalidParameter(format!("cone parameter {theta} must be positive")));
        }
        if !(0.0 <= inner && inner < outer && outer < 1.0) {
            return Err(Error::InvalidParameter(format!("need 0 <= inner < outer < 1, got {inner} and {outer}")));
        }
        Ok(ConeSpec { sigma, theta, inner, outer })
    }

    /// ψ(ξ). Zero on the degenerate plane ξ_j = ξ_k = 0.
    pub fn psi_eval(&self, xi: &[f64]) -> f64 {
        let a = self.theta * xi[self.sigma.k() - 1];
        let b = xi[self.sigma.j() - 1];
        let den = a.abs() + b.abs();
        if den == 0.0 {
            return 0.0;
        }
        let num = (a + b).abs();
        if num <= self.inner * den {
            return 1.0;
        }
        if num >= self.outer * den {
            return 0.0;
        }
        let u = num / den;
        smooth_step((self.outer - u) / (self.outer - self.inner))
    }
}

/// One lacunary sequence of cone parameters per pair σ, in standard
/// coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct MultiplierStack {
    n: usize,
    sequences: BTreeMap<SigmaPair, LacunarySequence>,
}

impl MultiplierStack {
    pub fn new(n: usize, sequences: BTreeMap<SigmaPair, LacunarySequence>) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParameter("n must be at least 2".into()));
        }
        let want = sigma_pairs(n);
        if sequences.len() != want.len() || want.iter().any(|s| !sequences.contains_key(s)) {
            return Err(Error::InvalidParameter(format!("need one sequence for each of the {} pairs", want.len())));
        }
        for s in sequences.values() {
            s.validate()?;
        }
        Ok(MultiplierStack { n, sequences })
    }

    pub fn uniform(n: usize, seq: &LacunarySequence) -> Result<Self> {
        Self::new(n, sigma_pairs(n).into_iter().map(|s| (s, seq.clone())).collect())
    }

    /// θ_i = 2^{−i} for every pair.
    pub fn dyadic(n: usize) -> Result<Self> {
        Self::uniform(n, &LacunarySequence::dyadic())
    }

    /// Requires the standard basis, since the cones live in standard
    /// frequency coordinates.
    pub fn from_dissection(d: &Dissection) -> Result<Self> {
        let b = d.basis();
        if b.dim() != b.ambient() || !b.is_standard_rows() || (0..b.dim()).any(|a| b.rows()[a][a] != 1.0) {
            return Err(Error::InvalidBasis("multiplier stacks need the standard basis".into()));
        }
        Self::new(b.dim(), d.sequences().clone())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn sequences(&self) -> &BTreeMap<SigmaPair, LacunarySequence> {
        &self.sequences
    }

    pub fn sequence(&self, sigma: SigmaPair) -> Result<&LacunarySequence> {
        self.sequences.get(&sigma).ok_or_else(|| Error::InvalidParameter(format!("pair {sigma} is not in the stack")))
    }

    pub fn cone(&self, sigma: SigmaPair, i: i64) -> Result<ConeSpec> {
        ConeSpec::new(self.n, sigma, self.sequence(sigma)?.theta(i))
    }

    /// Indices i whose cone ψ_{σ,i} can be positive at some ξ with
    /// lo ≤ |ξ_j|/|ξ_k| ≤ hi. The support needs θ within a factor
    /// (1+outer)/(1−outer) = 2n+1 of the ratio.
    pub fn active_range(&self, sigma: SigmaPair, lo: f64, hi: f64) -> Result<std::ops::RangeInclusive<i64>> {
        use crate::direction_sets::Scalar;
        if !(lo > 0.0 && lo <= hi && hi.is_finite()) {
            return Err(Error::InvalidParameter(format!("bad ratio range [{lo}, {hi}]")));
        }
        let seq = self.sequence(sigma)?;
        let w = (2 * self.n + 1) as f64 * 1.01;
        let first = seq.locate(&Scalar::Float(hi * w))? - 1;
        let last = seq.locate(&Scalar::Float(lo / w))? + 1;
        Ok(first..=last)
    }
}
