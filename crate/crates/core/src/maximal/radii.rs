use super::grid::GridFunction;
use crate::error::{Error, Result};

/// Finite increasing list of radii standing in for sup over r > 0.
#[derive(Clone, Debug, PartialEq)]
pub struct RadiusSet {
    radii: Vec<f64>,
}

impl RadiusSet {
    pub fn new(radii: Vec<f64>) -> Result<Self> {
        if radii.is_empty() {
            return Err(Error::InvalidParameter("empty radius set".into()));
        }
        if radii.iter().any(|r| !(*r > 0.0 && r.is_finite())) {
            return Err(Error::InvalidParameter("radii must be positive".into()));
        }
        if radii.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidParameter("radii must be strictly increasing".into()));
        }
        Ok(RadiusSet { radii })
    }

    /// h·2^m for m = 0, 1, … up to half the domain diameter (at least h).
    pub fn dyadic(g: &GridFunction) -> Self {
        let h = g.spacing();
        let diam = h * g.dims().iter().map(|&d| (d * d) as f64).sum::<f64>().sqrt();
        let mut radii = vec![h];
        while 2.0 * radii[radii.len() - 1] <= 0.5 * diam {
            radii.push(2.0 * radii[radii.len() - 1]);
        }
        RadiusSet { radii }
    }

    /// "dyadic" or "explicit:r1,r2,…".
    pub fn parse(spec: &str, g: &GridFunction) -> Result<Self> {
        if spec == "dyadic" {
            return Ok(Self::dyadic(g));
        }
        let list =
            spec.strip_prefix("explicit:").ok_or_else(|| Error::InvalidParameter(format!("radius spec {spec:?}")))?;
        let radii = list
            .split(',')
            .map(|s| s.trim().parse::<f64>().map_err(|_| Error::InvalidParameter(format!("radius {s:?}"))))
            .collect::<Result<Vec<_>>>()?;
        Self::new(radii)
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }
}
