//! Uniform periodic grids on the unit torus Q = [0,1)^dim.

use crate::error::{NematicError, Result};

/// A uniform tensor grid on the unit torus. Axis lengths are all 1, so the
/// wavenumber of spectral index `i` along an axis of `n` points is the
/// integer `i` (or `i - n` past the Nyquist fold), carrying a 2*pi factor
/// into derivatives.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct PeriodicGrid {
    dim: usize,
    shape: [usize; 3],
}

impl PeriodicGrid {
    pub fn new(dim: usize, n_per_axis: &[usize]) -> Result<Self> {
        if dim != 2 && dim != 3 {
            return Err(NematicError::InvalidGrid(format!("dim must be 2 or 3, got {dim}")));
        }
        if n_per_axis.len() != dim {
            return Err(NematicError::InvalidGrid(format!(
                "expected {dim} axis sizes, got {}",
                n_per_axis.len()
            )));
        }
        let mut shape = [1usize; 3];
        for (a, &n) in n_per_axis.iter().enumerate() {
            if n < 4 || n % 2 != 0 {
                return Err(NematicError::InvalidGrid(format!(
                    "axis {a}: n must be even and >= 4, got {n}"
                )));
            }
            shape[a] = n;
        }
        Ok(Self { dim, shape })
    }

    /// Same even size `n` on every axis.
    pub fn square(dim: usize, n: usize) -> Result<Self> {
        let ns = [n; 3];
        Self::new(dim, ns.get(..dim).unwrap_or(&ns))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Axis sizes, `dim` entries.
    pub fn shape(&self) -> &[usize] {
        &self.shape[..self.dim]
    }

    pub(crate) fn full_shape(&self) -> [usize; 3] {
        self.shape
    }

    /// Total number of grid points.
    pub fn len(&self) -> usize {
        self.shape[0] * self.shape[1] * self.shape[2]
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Signed integer wavenumber for spectral index `i` on an axis of `n`
    /// points. The Nyquist index n/2 maps to +n/2.
    pub fn wavenumber(n: usize, i: usize) -> i64 {
        if i <= n / 2 {
            i as i64
        } else {
            i as i64 - n as i64
        }
    }

    /// Decompose a flat row-major index into per-axis spectral indices.
    #[inline]
    pub(crate) fn unravel(&self, flat: usize) -> [usize; 3] {
        let [_, n1, n2] = self.shape;
        let i2 = flat % n2;
        let r = flat / n2;
        let i1 = r % n1;
        let i0 = r / n1;
        [i0, i1, i2]
    }

    /// Integer wavenumber vector at a flat spectral index.
    #[inline]
    pub fn wave_at(&self, flat: usize) -> [i64; 3] {
        let idx = self.unravel(flat);
        let mut k = [0i64; 3];
        for a in 0..3 {
            k[a] = if self.shape[a] == 1 {
                0
            } else {
                Self::wavenumber(self.shape[a], idx[a])
            };
        }
        k
    }

    /// Physical coordinates of a flat index (row-major).
    pub fn coords(&self, flat: usize) -> [f64; 3] {
        let idx = self.unravel(flat);
        let mut x = [0.0; 3];
        for a in 0..3 {
            x[a] = idx[a] as f64 / self.shape[a] as f64;
        }
        x
    }
}
