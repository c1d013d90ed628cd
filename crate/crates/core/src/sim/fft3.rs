//! In-place 3D FFT on a cubic grid via axis-cycling: FFT the contiguous
//! axis, rotate (i,j,k) → (j,k,i), repeat three times. Three rotations
//! restore the original layout.

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::sync::Arc;

pub struct Fft3 {
    n: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl Fft3 {
    pub fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            n,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
        }
    }

    pub fn len(&self) -> usize {
        self.n * self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    fn rotate(&self, src: &[Complex64], dst: &mut [Complex64]) {
        let n = self.n;
        // (i,j,k) → position of axis-1 as the new contiguous axis:
        // dst[j + n(k + n i)] = src[i + n(j + n k)]
        for k in 0..n {
            for j in 0..n {
                let row = j + n * k;
                for i in 0..n {
                    dst[j + n * (k + n * i)] = src[i + n * row];
                }
            }
        }
    }

    fn pass(&self, plan: &Arc<dyn Fft<f64>>, data: &mut [Complex64], scratch: &mut [Complex64]) {
        let n = self.n;
        #[cfg(feature = "parallel")]
        {
            use rayon::prelude::*;
            data.par_chunks_exact_mut(n)
                .for_each(|line| plan.process(line));
        }
        #[cfg(not(feature = "parallel"))]
        for line in data.chunks_exact_mut(n) {
            plan.process(line);
        }
        self.rotate(data, scratch);
        data.copy_from_slice(scratch);
    }

    /// Unnormalized forward transform.
    pub fn forward(&self, data: &mut [Complex64], scratch: &mut [Complex64]) {
        for _ in 0..3 {
            self.pass(&self.forward, data, scratch);
        }
    }

    /// Inverse transform scaled by 1/n³.
    pub fn inverse(&self, data: &mut [Complex64], scratch: &mut [Complex64]) {
        for _ in 0..3 {
            self.pass(&self.inverse, data, scratch);
        }
        let scale = 1.0 / (self.len() as f64);
        for v in data.iter_mut() {
            *v *= scale;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn round_trip_and_parseval() {
        let n = 16;
        let fft = Fft3::new(n);
        let mut data: Vec<Complex64> = (0..n * n * n)
            .map(|i| Complex64::new((i as f64 * 0.37).sin(), (i as f64 * 0.11).cos()))
            .collect();
        let original = data.clone();
        let mut scratch = vec![Complex64::new(0.0, 0.0); data.len()];
        fft.forward(&mut data, &mut scratch);
        let sum_x: f64 = original.iter().map(|z| z.norm_sqr()).sum();
        let sum_k: f64 = data.iter().map(|z| z.norm_sqr()).sum();
        assert_relative_eq!(sum_k, sum_x * (n * n * n) as f64, max_relative = 1e-12);
        fft.inverse(&mut data, &mut scratch);
        let dev = data
            .iter()
            .zip(&original)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0f64, f64::max);
        assert!(dev < 1e-12, "round trip dev {dev}");
    }

    #[test]
    fn plane_wave_lands_on_single_mode() {
        let n = 8;
        let fft = Fft3::new(n);
        let (kx, ky, kz) = (2usize, 5usize, 1usize);
        let mut data: Vec<Complex64> = Vec::with_capacity(n * n * n);
        for k in 0..n {
            for j in 0..n {
                for i in 0..n {
                    let phase = 2.0 * std::f64::consts::PI
                        * (kx * i + ky * j + kz * k) as f64
                        / n as f64;
                    data.push(Complex64::from_polar(1.0, phase));
                }
            }
        }
        let mut scratch = vec![Complex64::new(0.0, 0.0); data.len()];
        fft.forward(&mut data, &mut scratch);
        // forward with e^{-i k·x} convention puts the spike at (kx, ky, kz)
        let spike = kx + n * (ky + n * kz);
        for (idx, v) in data.iter().enumerate() {
            if idx == spike {
                assert_relative_eq!(v.re, (n * n * n) as f64, max_relative = 1e-12);
            } else {
                assert!(v.norm() < 1e-9, "leakage at {idx}: {v}");
            }
        }
    }
}
