//! Multi-dimensional complex FFT over row-major arrays, built on rustfft.
//! Plans are cached globally; the transform is unnormalized in both
//! directions, callers apply the 1/N factor after the forward pass.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

type PlanKey = (usize, bool);

fn plan(n: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    static PLANS: OnceLock<Mutex<HashMap<PlanKey, Arc<dyn Fft<f64>>>>> = OnceLock::new();
    let cache = PLANS.get_or_init(|| Mutex::new(HashMap::new()));
    let mut cache = cache.lock().unwrap();
    cache
        .entry((n, inverse))
        .or_insert_with(|| {
            let mut planner = FftPlanner::new();
            if inverse {
                planner.plan_fft_inverse(n)
            } else {
                planner.plan_fft_forward(n)
            }
        })
        .clone()
}

/// In-place FFT along every non-trivial axis of a row-major `shape` array.
pub(crate) fn fft_nd(shape: [usize; 3], data: &mut [Complex64], inverse: bool) {
    let [n0, n1, n2] = shape;
    debug_assert_eq!(data.len(), n0 * n1 * n2);

    if n2 > 1 {
        let p = plan(n2, inverse);
        let mut scratch = vec![Complex64::default(); p.get_inplace_scratch_len()];
        for chunk in data.chunks_exact_mut(n2) {
            p.process_with_scratch(chunk, &mut scratch);
        }
    }
    if n1 > 1 {
        let p = plan(n1, inverse);
        let mut scratch = vec![Complex64::default(); p.get_inplace_scratch_len()];
        let mut line = vec![Complex64::default(); n1];
        for i0 in 0..n0 {
            for i2 in 0..n2 {
                let base = i0 * n1 * n2 + i2;
                for t in 0..n1 {
                    line[t] = data[base + t * n2];
                }
                p.process_with_scratch(&mut line, &mut scratch);
                for t in 0..n1 {
                    data[base + t * n2] = line[t];
                }
            }
        }
    }
    if n0 > 1 {
        let p = plan(n0, inverse);
        let mut scratch = vec![Complex64::default(); p.get_inplace_scratch_len()];
        let mut line = vec![Complex64::default(); n0];
        let stride = n1 * n2;
        for rest in 0..stride {
            for t in 0..n0 {
                line[t] = data[rest + t * stride];
            }
            p.process_with_scratch(&mut line, &mut scratch);
            for t in 0..n0 {
                data[rest + t * stride] = line[t];
            }
        }
    }
}
