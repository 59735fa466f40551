//! Zero-padding in spectral space for de-aliased products.
//!
//! Padding splits each Nyquist coefficient evenly between the +n/2 and
//! -n/2 slots of the enlarged grid; truncation merges them back. With the
//! staged pairwise products used throughout, every final result is an
//! exact Galerkin projection for any padding factor >= 1.5.
//!
//! Index mappings are precomputed per axis and the (grid, padded-shape)
//! tables are cached globally, since the same few shapes recur on every
//! right-hand-side evaluation.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;

use crate::fft::fft_nd;
use crate::grid::PeriodicGrid;

/// Smallest even padded size >= factor * n.
pub(crate) fn padded_n(n: usize, factor: f64) -> usize {
    let mut m = (factor * n as f64).ceil() as usize;
    if m % 2 == 1 {
        m += 1;
    }
    m.max(n)
}

/// Per-source-index targets on one axis: one slot, or the +-Nyquist pair
/// with half weight each.
#[derive(Clone, Copy)]
struct AxisMap {
    primary: usize,
    secondary: usize,
    weight: f64, // 1.0 for a single target, 0.5 for a split pair
}

fn axis_maps(n: usize, m: usize) -> Vec<AxisMap> {
    (0..n)
        .map(|i| {
            let k = PeriodicGrid::wavenumber(n, i);
            let slot = |k: i64| -> usize {
                if k >= 0 {
                    k as usize
                } else {
                    (k + m as i64) as usize
                }
            };
            if k == (n / 2) as i64 && m > n {
                AxisMap {
                    primary: slot(k),
                    secondary: slot(-k),
                    weight: 0.5,
                }
            } else {
                AxisMap {
                    primary: slot(k),
                    secondary: slot(k),
                    weight: 1.0,
                }
            }
        })
        .collect()
}

struct PadTables {
    shape: [usize; 3],
    padded: [usize; 3],
    maps: [Vec<AxisMap>; 3],
}

fn tables(shape: [usize; 3], padded: [usize; 3]) -> Arc<PadTables> {
    type Cache = HashMap<([usize; 3], [usize; 3]), Arc<PadTables>>;
    static CACHE: OnceLock<Mutex<Cache>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut cache = cache.lock().unwrap();
    cache
        .entry((shape, padded))
        .or_insert_with(|| {
            Arc::new(PadTables {
                shape,
                padded,
                maps: [
                    axis_maps(shape[0], padded[0]),
                    axis_maps(shape[1], padded[1]),
                    axis_maps(shape[2], padded[2]),
                ],
            })
        })
        .clone()
}

pub(crate) struct Pad {
    grid: PeriodicGrid,
    pub(crate) padded: [usize; 3],
    tables: Arc<PadTables>,
}

impl Pad {
    pub(crate) fn new(grid: PeriodicGrid, factor: f64) -> Self {
        let mut padded = [1usize; 3];
        for ax in 0..grid.dim() {
            padded[ax] = padded_n(grid.full_shape()[ax], factor);
        }
        Pad {
            grid,
            padded,
            tables: tables(grid.full_shape(), padded),
        }
    }

    /// Embed into an explicit target shape (used for spectral lifting).
    pub(crate) fn to_shape(grid: PeriodicGrid, padded: [usize; 3]) -> Self {
        Pad {
            grid,
            padded,
            tables: tables(grid.full_shape(), padded),
        }
    }

    pub(crate) fn padded_len(&self) -> usize {
        self.padded.iter().product()
    }

    /// Embed spectral coefficients into the padded grid, splitting Nyquist.
    pub(crate) fn pad(&self, spec: &[Complex64]) -> Vec<Complex64> {
        let t = &self.tables;
        let [n0, n1, n2] = t.shape;
        let [_, p1, p2] = t.padded;
        let mut out = vec![Complex64::default(); self.padded_len()];
        let mut flat = 0usize;
        for m0 in t.maps[0].iter().take(n0) {
            for m1 in t.maps[1].iter().take(n1) {
                for m2 in t.maps[2].iter().take(n2) {
                    let c = spec[flat];
                    flat += 1;
                    if c == Complex64::default() {
                        continue;
                    }
                    let w = m0.weight * m1.weight * m2.weight;
                    let v = w * c;
                    // scatter over the (up to 8) signed-Nyquist targets
                    for i0 in dedup2(m0) {
                        for i1 in dedup2(m1) {
                            for i2 in dedup2(m2) {
                                out[(i0 * p1 + i1) * p2 + i2] += v;
                            }
                        }
                    }
                }
            }
        }
        out
    }

    /// Truncate padded coefficients back to the base grid, merging the
    /// +-Nyquist pair into the single Nyquist slot.
    pub(crate) fn unpad(&self, padded: &[Complex64]) -> Vec<Complex64> {
        let t = &self.tables;
        let [n0, n1, n2] = t.shape;
        let [_, p1, p2] = t.padded;
        let mut out = vec![Complex64::default(); self.grid.len()];
        let mut flat = 0usize;
        for m0 in t.maps[0].iter().take(n0) {
            for m1 in t.maps[1].iter().take(n1) {
                for m2 in t.maps[2].iter().take(n2) {
                    let mut acc = Complex64::default();
                    for i0 in dedup2(m0) {
                        for i1 in dedup2(m1) {
                            for i2 in dedup2(m2) {
                                acc += padded[(i0 * p1 + i1) * p2 + i2];
                            }
                        }
                    }
                    out[flat] = acc;
                    flat += 1;
                }
            }
        }
        out
    }

    /// Padded spectral coefficients -> physical values on the padded grid.
    pub(crate) fn to_phys(&self, mut spec: Vec<Complex64>) -> Vec<f64> {
        fft_nd(self.padded, &mut spec, true);
        spec.iter().map(|c| c.re).collect()
    }

    /// Physical values on the padded grid -> padded spectral coefficients.
    pub(crate) fn from_phys(&self, phys: &[f64]) -> Vec<Complex64> {
        let mut spec: Vec<Complex64> = phys.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        fft_nd(self.padded, &mut spec, false);
        let scale = 1.0 / self.padded_len() as f64;
        for c in spec.iter_mut() {
            *c *= scale;
        }
        spec
    }
}

/// The distinct target indices of an axis map (one or two).
#[inline]
fn dedup2(m: &AxisMap) -> impl Iterator<Item = usize> {
    let two = m.primary != m.secondary;
    std::iter::once(m.primary).chain(two.then_some(m.secondary))
}

/// Zero every coefficient with a Nyquist wavenumber on any axis.
pub(crate) fn zero_nyquist(grid: &PeriodicGrid, spec: &mut [Complex64]) {
    for (flat, c) in spec.iter_mut().enumerate() {
        let k = grid.wave_at(flat);
        for ax in 0..grid.dim() {
            if k[ax] == (grid.full_shape()[ax] / 2) as i64 {
                *c = Complex64::default();
                break;
            }
        }
    }
}
