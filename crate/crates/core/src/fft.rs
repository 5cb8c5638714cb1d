//! Unnormalized n-dimensional complex FFTs on cubic arrays (last axis fastest).

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

type PlanCache = Mutex<HashMap<(usize, bool), Arc<dyn Fft<f64>>>>;

fn plan(len: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    static CACHE: OnceLock<PlanCache> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("fft plan cache poisoned");
    guard
        .entry((len, inverse))
        .or_insert_with(|| {
            let mut planner = FftPlanner::new();
            if inverse {
                planner.plan_fft_inverse(len)
            } else {
                planner.plan_fft_forward(len)
            }
        })
        .clone()
}

/// Forward transform `X_r = Σ_p x_p e^{-2πi r·p/size}`, or its unnormalized inverse.
pub fn fft_nd(data: &mut [Complex64], dim: usize, size: usize, inverse: bool) {
    debug_assert_eq!(data.len(), size.pow(dim as u32));
    if size <= 1 {
        return;
    }
    let fft = plan(size, inverse);
    let total = data.len();
    let mut line = vec![Complex64::new(0.0, 0.0); size];
    let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
    for axis in 0..dim {
        let stride = size.pow((dim - 1 - axis) as u32);
        if stride == 1 {
            for chunk in data.chunks_exact_mut(size) {
                fft.process_with_scratch(chunk, &mut scratch);
            }
            continue;
        }
        let block = stride * size;
        for base in (0..total).step_by(block) {
            for offset in 0..stride {
                let start = base + offset;
                for (i, slot) in line.iter_mut().enumerate() {
                    *slot = data[start + i * stride];
                }
                fft.process_with_scratch(&mut line, &mut scratch);
                for (i, value) in line.iter().enumerate() {
                    data[start + i * stride] = *value;
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn matches_direct_dft_in_2d() {
        let size = 4;
        let data: Vec<Complex64> = (0..16)
            .map(|i| Complex64::new((i as f64).sin(), (i as f64 * 0.3).cos()))
            .collect();
        let mut fast = data.clone();
        fft_nd(&mut fast, 2, size, false);
        for r0 in 0..size {
            for r1 in 0..size {
                let mut acc = Complex64::new(0.0, 0.0);
                for p0 in 0..size {
                    for p1 in 0..size {
                        let phase = -2.0 * PI * ((r0 * p0 + r1 * p1) as f64) / size as f64;
                        acc += data[p0 * size + p1] * Complex64::from_polar(1.0, phase);
                    }
                }
                assert!((acc - fast[r0 * size + r1]).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn inverse_undoes_forward_up_to_volume() {
        let data: Vec<Complex64> = (0..64).map(|i| Complex64::new(i as f64, -(i as f64))).collect();
        let mut work = data.clone();
        fft_nd(&mut work, 3, 4, false);
        fft_nd(&mut work, 3, 4, true);
        for (a, b) in work.iter().zip(&data) {
            assert!((a / 64.0 - b).norm() < 1e-12);
        }
    }
}
