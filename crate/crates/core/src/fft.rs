//! Complex FFT of any length, backed by `rustfft`.
//!
//! Both directions are unnormalized: `forward` computes
//! `X_j = Σ x_k exp(-2πi jk/N)` and `inverse` the same with `+`.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::FftPlanner;

#[derive(Clone)]
pub struct Fft {
    len: usize,
    fwd: Arc<dyn rustfft::Fft<f64>>,
    inv: Arc<dyn rustfft::Fft<f64>>,
}

impl fmt::Debug for Fft {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Fft").field("len", &self.len).finish()
    }
}

impl Fft {
    pub fn new(len: usize) -> Self {
        let mut planner = FftPlanner::new();
        Fft { len, fwd: planner.plan_fft_forward(len), inv: planner.plan_fft_inverse(len) }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn forward(&self, buf: &mut [Complex64]) {
        assert_eq!(buf.len(), self.len, "buffer length");
        self.fwd.process(buf);
    }

    pub fn inverse(&self, buf: &mut [Complex64]) {
        assert_eq!(buf.len(), self.len, "buffer length");
        self.inv.process(buf);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn naive_dft(x: &[Complex64], sign: f64) -> Vec<Complex64> {
        let n = x.len();
        (0..n)
            .map(|j| {
                x.iter()
                    .enumerate()
                    .map(|(k, &v)| {
                        let e = (j * k % n) as f64;
                        v * Complex64::from_polar(1.0, sign * 2.0 * PI * e / n as f64)
                    })
                    .sum()
            })
            .collect()
    }

    fn sample(n: usize) -> Vec<Complex64> {
        (0..n).map(|k| Complex64::new(((k * 7 + 3) % 11) as f64 - 5.0, ((k * 5 + 1) % 13) as f64 - 6.0)).collect()
    }

    #[test]
    fn matches_naive_dft_for_many_lengths() {
        for n in (1..=70).chain([97, 128, 255, 256, 1009]) {
            let x = sample(n);
            let plan = Fft::new(n);
            let mut fwd = x.clone();
            plan.forward(&mut fwd);
            let mut inv = x.clone();
            plan.inverse(&mut inv);
            let (ef, ei) = (naive_dft(&x, -1.0), naive_dft(&x, 1.0));
            for j in 0..n {
                assert!((fwd[j] - ef[j]).norm() < 1e-8 * n as f64, "n={n} j={j}");
                assert!((inv[j] - ei[j]).norm() < 1e-8 * n as f64, "n={n} j={j}");
            }
        }
    }

    #[test]
    fn forward_then_inverse_scales_by_length() {
        for n in [8usize, 17, 1024, 1153] {
            let x = sample(n);
            let plan = Fft::new(n);
            let mut y = x.clone();
            plan.forward(&mut y);
            plan.inverse(&mut y);
            for (a, b) in x.iter().zip(&y) {
                assert!((a * n as f64 - b).norm() < 1e-9 * n as f64);
            }
        }
    }
}
