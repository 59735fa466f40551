//! Scalar and vector fields on the periodic unit torus, stored either as
//! grid values or as Fourier series coefficients (f = sum c_k e^{2 pi i k.x}).

use num_complex::Complex64;

use crate::error::{NematicError, Result};
use crate::fft::fft_nd;
use crate::grid::PeriodicGrid;
use crate::pad::{padded_n, zero_nyquist, Pad};

const TAU: f64 = 2.0 * std::f64::consts::PI;

#[derive(Debug, Clone)]
enum Data {
    Phys(Vec<f64>),
    Spec(Vec<Complex64>),
}

#[derive(Debug, Clone)]
pub struct Field {
    grid: PeriodicGrid,
    data: Data,
}

impl Field {
    pub fn from_physical(grid: PeriodicGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(NematicError::GridMismatch);
        }
        Ok(Field {
            grid,
            data: Data::Phys(values),
        })
    }

    pub fn from_spectral(grid: PeriodicGrid, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.len() {
            return Err(NematicError::GridMismatch);
        }
        Ok(Field {
            grid,
            data: Data::Spec(coeffs),
        })
    }

    pub fn zeros_spectral(grid: PeriodicGrid) -> Self {
        Field {
            grid,
            data: Data::Spec(vec![Complex64::default(); grid.len()]),
        }
    }

    pub fn constant(grid: PeriodicGrid, value: f64) -> Self {
        let mut spec = vec![Complex64::default(); grid.len()];
        spec[0] = Complex64::new(value, 0.0);
        Field {
            grid,
            data: Data::Spec(spec),
        }
    }

    /// Sample a function of the point coordinates onto the grid (physical).
    pub fn from_fn(grid: PeriodicGrid, f: impl Fn(&[f64]) -> f64) -> Self {
        let values = (0..grid.len())
            .map(|i| f(&grid.coords(i)[..grid.dim()]))
            .collect();
        Field {
            grid,
            data: Data::Phys(values),
        }
    }

    pub fn grid(&self) -> &PeriodicGrid {
        &self.grid
    }

    pub fn is_spectral(&self) -> bool {
        matches!(self.data, Data::Spec(_))
    }

    /// True when every stored value is exactly zero.
    pub fn is_zero(&self) -> bool {
        match &self.data {
            Data::Spec(v) => v.iter().all(|c| *c == Complex64::default()),
            Data::Phys(v) => v.iter().all(|&x| x == 0.0),
        }
    }

    /// Convert to spectral representation in place (no-op if already there).
    pub fn ensure_spectral(&mut self) {
        if let Data::Phys(values) = &self.data {
            let mut spec: Vec<Complex64> =
                values.iter().map(|&x| Complex64::new(x, 0.0)).collect();
            fft_nd(self.grid.full_shape(), &mut spec, false);
            let scale = 1.0 / self.grid.len() as f64;
            for c in spec.iter_mut() {
                *c *= scale;
            }
            self.data = Data::Spec(spec);
        }
    }

    /// Convert to physical representation in place (no-op if already there).
    pub fn ensure_physical(&mut self) {
        if let Data::Spec(coeffs) = &self.data {
            let mut buf = coeffs.clone();
            fft_nd(self.grid.full_shape(), &mut buf, true);
            self.data = Data::Phys(buf.iter().map(|c| c.re).collect());
        }
    }

    pub fn physical_data(&self) -> Result<&[f64]> {
        match &self.data {
            Data::Phys(v) => Ok(v),
            Data::Spec(_) => Err(NematicError::WrongRepresentation {
                expected: "physical",
            }),
        }
    }

    pub fn spectral_data(&self) -> Result<&[Complex64]> {
        match &self.data {
            Data::Spec(v) => Ok(v),
            Data::Phys(_) => Err(NematicError::WrongRepresentation {
                expected: "spectral",
            }),
        }
    }

    pub fn spectral_data_mut(&mut self) -> Result<&mut [Complex64]> {
        match &mut self.data {
            Data::Spec(v) => Ok(v),
            Data::Phys(_) => Err(NematicError::WrongRepresentation {
                expected: "spectral",
            }),
        }
    }

    pub fn physical_data_mut(&mut self) -> Result<&mut [f64]> {
        match &mut self.data {
            Data::Phys(v) => Ok(v),
            Data::Spec(_) => Err(NematicError::WrongRepresentation {
                expected: "physical",
            }),
        }
    }

    /// Spectral coefficients regardless of current representation.
    pub fn spectral_copy(&self) -> Vec<Complex64> {
        self.spec_clone()
    }

    /// Exact spectral interpolation onto a finer grid of the same dimension.
    pub fn lift_to(&self, target: PeriodicGrid) -> Result<Field> {
        if target.dim() != self.grid.dim() {
            return Err(NematicError::GridMismatch);
        }
        for ax in 0..self.grid.dim() {
            if target.shape()[ax] < self.grid.shape()[ax] {
                return Err(NematicError::InvalidGrid(
                    "lift target must be at least as fine".into(),
                ));
            }
        }
        let pad = Pad::to_shape(self.grid, target.full_shape());
        Field::from_spectral(target, pad.pad(&self.spec_clone()))
    }

    fn spec_clone(&self) -> Vec<Complex64> {
        let mut tmp = self.clone();
        tmp.ensure_spectral();
        match tmp.data {
            Data::Spec(v) => v,
            Data::Phys(_) => unreachable!(),
        }
    }

    /// Spectral partial derivative of the given order along one axis.
    /// Nyquist coefficients are zeroed for odd orders.
    pub fn partial(&self, axis: usize, order: u32) -> Field {
        let mut spec = self.spec_clone();
        let n = self.grid.full_shape()[axis];
        for (flat, c) in spec.iter_mut().enumerate() {
            let k = self.grid.wave_at(flat)[axis];
            if order % 2 == 1 && k == (n / 2) as i64 {
                *c = Complex64::default();
                continue;
            }
            let ik = Complex64::new(0.0, TAU * k as f64);
            *c *= ik.powu(order);
        }
        Field {
            grid: self.grid,
            data: Data::Spec(spec),
        }
    }

    pub fn gradient(&self) -> VectorField {
        let comps = (0..self.grid.dim()).map(|ax| self.partial(ax, 1)).collect();
        VectorField {
            grid: self.grid,
            comps,
        }
    }

    pub fn laplacian(&self) -> Field {
        let mut spec = self.spec_clone();
        for (flat, c) in spec.iter_mut().enumerate() {
            let k = self.grid.wave_at(flat);
            let k2: f64 = k.iter().map(|&x| (x as f64) * (x as f64)).sum();
            *c *= -TAU * TAU * k2;
        }
        Field {
            grid: self.grid,
            data: Data::Spec(spec),
        }
    }

    /// Zeroth Fourier coefficient: the integral over the unit torus.
    pub fn integrate(&self) -> f64 {
        match &self.data {
            Data::Spec(v) => v[0].re,
            Data::Phys(v) => v.iter().sum::<f64>() / v.len() as f64,
        }
    }

    /// L2 norm over the torus, via Parseval in spectral representation.
    pub fn l2_norm(&self) -> f64 {
        match &self.data {
            Data::Spec(v) => v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt(),
            Data::Phys(v) => {
                (v.iter().map(|&x| x * x).sum::<f64>() / v.len() as f64).sqrt()
            }
        }
    }

    pub fn linf_norm(&self) -> f64 {
        let mut tmp = self.clone();
        tmp.ensure_physical();
        match &tmp.data {
            Data::Phys(v) => v.iter().fold(0.0f64, |m, &x| m.max(x.abs())),
            Data::Spec(_) => unreachable!(),
        }
    }

    pub fn zero_nyquist(&mut self) {
        self.ensure_spectral();
        if let Data::Spec(v) = &mut self.data {
            zero_nyquist(&self.grid, v);
        }
    }

    pub fn scale(&mut self, s: f64) {
        match &mut self.data {
            Data::Spec(v) => v.iter_mut().for_each(|c| *c *= s),
            Data::Phys(v) => v.iter_mut().for_each(|x| *x *= s),
        }
    }

    pub fn add_assign(&mut self, other: &Field, weight: f64) {
        self.ensure_spectral();
        let other = other.spec_clone();
        if let Data::Spec(v) = &mut self.data {
            for (a, b) in v.iter_mut().zip(other) {
                *a += weight * b;
            }
        }
    }
}

/// Pointwise product of two fields with zero-padding: the result is the
/// exact Galerkin projection of a*b for any factor >= 1.5.
pub fn dealias_multiply(a: &Field, b: &Field, factor: f64) -> Result<Field> {
    if a.grid != b.grid {
        return Err(NematicError::GridMismatch);
    }
    if a.is_zero() || b.is_zero() {
        return Ok(Field::zeros_spectral(a.grid));
    }
    let pad = Pad::new(a.grid, factor);
    let pa = pad.to_phys(pad.pad(&a.spec_clone()));
    let pb = pad.to_phys(pad.pad(&b.spec_clone()));
    let prod: Vec<f64> = pa.iter().zip(&pb).map(|(x, y)| x * y).collect();
    let spec = pad.unpad(&pad.from_phys(&prod));
    Field::from_spectral(a.grid, spec)
}

/// Exact integral of a pointwise product of several fields, computed on a
/// grid large enough that no aliasing contaminates the zero mode.
pub fn integrate_product(fields: &[&Field]) -> Result<f64> {
    let grid = *fields
        .first()
        .ok_or(NematicError::InvalidGrid("empty product".into()))?
        .grid();
    for f in fields {
        if *f.grid() != grid {
            return Err(NematicError::GridMismatch);
        }
    }
    let l = fields.len() as f64;
    // Per-axis padded size M with M > L*n/2, so sums of L wavenumbers
    // cannot wrap onto mode zero.
    let factor = (l / 2.0) + 2.0 / grid.shape().iter().copied().min().unwrap() as f64;
    let pad = Pad::new(grid, factor.max(1.0));
    let mut prod = vec![1.0f64; pad.padded_len()];
    for f in fields {
        let phys = pad.to_phys(pad.pad(&f.spec_clone()));
        for (p, x) in prod.iter_mut().zip(phys) {
            *p *= x;
        }
    }
    Ok(prod.iter().sum::<f64>() / prod.len() as f64)
}

#[derive(Debug, Clone)]
pub struct VectorField {
    grid: PeriodicGrid,
    comps: Vec<Field>,
}

impl VectorField {
    pub fn new(comps: Vec<Field>) -> Result<Self> {
        let grid = *comps
            .first()
            .ok_or(NematicError::InvalidGrid("empty vector field".into()))?
            .grid();
        for c in &comps {
            if *c.grid() != grid {
                return Err(NematicError::GridMismatch);
            }
        }
        Ok(VectorField { grid, comps })
    }

    pub fn zeros_spectral(grid: PeriodicGrid, ncomp: usize) -> Self {
        VectorField {
            grid,
            comps: (0..ncomp).map(|_| Field::zeros_spectral(grid)).collect(),
        }
    }

    pub fn grid(&self) -> &PeriodicGrid {
        &self.grid
    }

    pub fn ncomp(&self) -> usize {
        self.comps.len()
    }

    pub fn comp(&self, i: usize) -> &Field {
        &self.comps[i]
    }

    pub fn comp_mut(&mut self, i: usize) -> &mut Field {
        &mut self.comps[i]
    }

    pub fn comps(&self) -> &[Field] {
        &self.comps
    }

    pub fn ensure_spectral(&mut self) {
        self.comps.iter_mut().for_each(Field::ensure_spectral);
    }

    pub fn ensure_physical(&mut self) {
        self.comps.iter_mut().for_each(Field::ensure_physical);
    }

    pub fn divergence(&self) -> Field {
        let mut out = Field::zeros_spectral(self.grid);
        for (ax, c) in self.comps.iter().take(self.grid.dim()).enumerate() {
            out.add_assign(&c.partial(ax, 1), 1.0);
        }
        out
    }

    /// Project onto divergence-free fields mode by mode:
    /// u_k -> u_k - k (k.u_k)/|k|^2. Only the first `dim` components enter.
    /// Nyquist content is removed first: the projection is ambiguous there
    /// and the one-sided derivative convention would leave a spurious
    /// divergence behind.
    pub fn leray_project(&mut self) -> Result<()> {
        self.ensure_spectral();
        let dim = self.grid.dim();
        let grid = self.grid;
        let mut specs: Vec<&mut [Complex64]> = Vec::with_capacity(dim);
        let (head, _) = self.comps.split_at_mut(dim);
        for c in head.iter_mut() {
            c.ensure_spectral();
            c.zero_nyquist();
        }
        for c in head.iter_mut() {
            specs.push(c.spectral_data_mut()?);
        }
        for flat in 0..grid.len() {
            let k = grid.wave_at(flat);
            let k2: f64 = k[..dim].iter().map(|&x| (x * x) as f64).sum();
            if k2 == 0.0 {
                continue;
            }
            let mut dot = Complex64::default();
            for (ax, s) in specs.iter().enumerate() {
                dot += k[ax] as f64 * s[flat];
            }
            for (ax, s) in specs.iter_mut().enumerate() {
                s[flat] -= k[ax] as f64 * dot / k2;
            }
        }
        Ok(())
    }

    /// Max pointwise Euclidean magnitude on the collocation grid (a lower
    /// bound of the true sup; no interpolation refinement).
    pub fn linf_norm(&self) -> f64 {
        let phys: Vec<Field> = self
            .comps
            .iter()
            .map(|c| {
                let mut f = c.clone();
                f.ensure_physical();
                f
            })
            .collect();
        let mut max = 0.0f64;
        for i in 0..self.grid.len() {
            let mag2: f64 = phys
                .iter()
                .map(|p| {
                    let v = p.physical_data().unwrap()[i];
                    v * v
                })
                .sum();
            max = max.max(mag2);
        }
        max.sqrt()
    }

    pub fn l2_norm(&self) -> f64 {
        self.comps
            .iter()
            .map(|c| {
                let n = c.l2_norm();
                n * n
            })
            .sum::<f64>()
            .sqrt()
    }
}

/// Helper used by solver and diagnostics: padded size for a factor.
pub fn dealias_padded_n(n: usize, factor: f64) -> usize {
    padded_n(n, factor)
}
