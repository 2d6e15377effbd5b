use std::io::{Read, Write};

use crate::error::{Error, Result};

const MAGIC: &[u8; 8] = b"LACGRID1";

/// Samples of a function on h·Z^n + origin, row-major (last axis fastest).
#[derive(Clone, Debug, PartialEq)]
pub struct GridFunction {
    dims: Vec<usize>,
    spacing: f64,
    origin: Vec<f64>,
    data: Vec<f64>,
}

impl GridFunction {
    pub fn new(dims: Vec<usize>, spacing: f64, origin: Vec<f64>, data: Vec<f64>) -> Result<Self> {
        if dims.is_empty() || dims.iter().any(|&d| d == 0) {
            return Err(Error::Grid(format!("extents must be positive, got {dims:?}")));
        }
        if !(spacing > 0.0 && spacing.is_finite()) {
            return Err(Error::Grid(format!("spacing {spacing} must be positive")));
        }
        if origin.len() != dims.len() {
            return Err(Error::DimensionMismatch { expected: dims.len(), got: origin.len() });
        }
        let len = dims.iter().try_fold(1usize, |a, &d| a.checked_mul(d));
        if len != Some(data.len()) {
            return Err(Error::Grid(format!("data has {} values for extents {dims:?}", data.len())));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::Grid("non-finite sample".into()));
        }
        Ok(GridFunction { dims, spacing, origin, data })
    }

    pub fn zeros(dims: Vec<usize>, spacing: f64) -> Result<Self> {
        let len = dims.iter().product();
        let origin = vec![0.0; dims.len()];
        Self::new(dims, spacing, origin, vec![0.0; len])
    }

    pub fn from_fn(dims: Vec<usize>, spacing: f64, mut f: impl FnMut(&[usize]) -> f64) -> Result<Self> {
        let mut g = Self::zeros(dims, spacing)?;
        let mut idx = vec![0usize; g.n()];
        for i in 0..g.data.len() {
            g.data[i] = f(&idx);
            g.advance(&mut idx);
        }
        if g.data.iter().any(|v| !v.is_finite()) {
            return Err(Error::Grid("non-finite sample".into()));
        }
        Ok(g)
    }

    /// Same geometry, new samples.
    pub fn with_data(&self, data: Vec<f64>) -> Result<Self> {
        Self::new(self.dims.clone(), self.spacing, self.origin.clone(), data)
    }

    pub fn n(&self) -> usize {
        self.dims.len()
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn origin(&self) -> &[f64] {
        &self.origin
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn strides(&self) -> Vec<usize> {
        let mut s = vec![1usize; self.n()];
        for a in (0..self.n().saturating_sub(1)).rev() {
            s[a] = s[a + 1] * self.dims[a + 1];
        }
        s
    }

    pub fn index(&self, idx: &[usize]) -> usize {
        idx.iter().zip(self.strides()).map(|(i, s)| i * s).sum()
    }

    pub fn unravel(&self, mut i: usize) -> Vec<usize> {
        let mut idx = vec![0; self.n()];
        for a in (0..self.n()).rev() {
            idx[a] = i % self.dims[a];
            i /= self.dims[a];
        }
        idx
    }

    pub fn get(&self, idx: &[usize]) -> f64 {
        self.data[self.index(idx)]
    }

    pub fn set(&mut self, idx: &[usize], v: f64) {
        let i = self.index(idx);
        self.data[i] = v;
    }

    pub fn position(&self, idx: &[usize]) -> Vec<f64> {
        idx.iter().zip(&self.origin).map(|(&i, o)| o + self.spacing * i as f64).collect()
    }

    /// Row-major successor of a multi-index (wraps to zero at the end).
    pub fn advance(&self, idx: &mut [usize]) {
        for a in (0..idx.len()).rev() {
            idx[a] += 1;
            if idx[a] < self.dims[a] {
                return;
            }
            idx[a] = 0;
        }
    }

    pub fn same_shape(&self, other: &GridFunction) -> bool {
        self.dims == other.dims && self.spacing == other.spacing
    }

    pub fn write_to(&self, w: &mut impl Write) -> Result<()> {
        w.write_all(MAGIC)?;
        w.write_all(&(self.n() as u32).to_le_bytes())?;
        for &d in &self.dims {
            let d = u32::try_from(d).map_err(|_| Error::Format(format!("extent {d} exceeds u32")))?;
            w.write_all(&d.to_le_bytes())?;
        }
        w.write_all(&self.spacing.to_le_bytes())?;
        for o in &self.origin {
            w.write_all(&o.to_le_bytes())?;
        }
        let mut buf = Vec::with_capacity(8 * self.data.len());
        for v in &self.data {
            buf.extend_from_slice(&v.to_le_bytes());
        }
        w.write_all(&buf)?;
        Ok(())
    }

    pub fn read_from(r: &mut impl Read) -> Result<Self> {
        let mut magic = [0u8; 8];
        r.read_exact(&mut magic)?;
        if &magic != MAGIC {
            return Err(Error::Format("bad magic, expected LACGRID1".into()));
        }
        let mut b4 = [0u8; 4];
        let mut b8 = [0u8; 8];
        r.read_exact(&mut b4)?;
        let n = u32::from_le_bytes(b4) as usize;
        if n == 0 || n > 16 {
            return Err(Error::Format(format!("unsupported dimension {n}")));
        }
        let mut dims = Vec::with_capacity(n);
        for _ in 0..n {
            r.read_exact(&mut b4)?;
            dims.push(u32::from_le_bytes(b4) as usize);
        }
        r.read_exact(&mut b8)?;
        let spacing = f64::from_le_bytes(b8);
        let mut origin = Vec::with_capacity(n);
        for _ in 0..n {
            r.read_exact(&mut b8)?;
            origin.push(f64::from_le_bytes(b8));
        }
        let len = dims
            .iter()
            .try_fold(1usize, |a, &d| a.checked_mul(d))
            .filter(|&l| l <= 1 << 31)
            .ok_or_else(|| Error::Format("grid too large".into()))?;
        let mut raw = vec![0u8; 8 * len];
        r.read_exact(&mut raw)?;
        let data = raw.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect();
        let mut trailing = [0u8; 1];
        if r.read(&mut trailing)? != 0 {
            return Err(Error::Format("trailing bytes after grid data".into()));
        }
        Self::new(dims, spacing, origin, data)
    }
}
