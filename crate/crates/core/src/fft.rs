//! FFT backend abstraction.
//!
//! The core is `no_std`, so it does not own an FFT implementation. Every
//! routine that needs one takes a `&dyn FftBackend`. With the `rustfft`
//! feature (on by default) [`RustFft`] adapts the `rustfft` planner; [`NaiveDft`]
//! is an O(n²) fallback that works anywhere.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

/// Unnormalized complex DFT of arbitrary length.
///
/// `forward` computes `X[k] = Σ x[t] e^{-2πi tk/n}`, `inverse` the same sum
/// with `e^{+2πi tk/n}`. Neither scales by `1/n`.
pub trait FftBackend: Sync {
    fn forward(&self, buf: &mut [Complex64]);
    fn inverse(&self, buf: &mut [Complex64]);

    /// Forward transforms of consecutive length-`len` chunks of `buf`.
    fn forward_batch(&self, buf: &mut [Complex64], len: usize) {
        for chunk in buf.chunks_exact_mut(len) {
            self.forward(chunk);
        }
    }

    /// Inverse transforms of consecutive length-`len` chunks of `buf`.
    fn inverse_batch(&self, buf: &mut [Complex64], len: usize) {
        for chunk in buf.chunks_exact_mut(len) {
            self.inverse(chunk);
        }
    }
}

/// Smallest length `>= n` whose only prime factors are 2, 3 and 5.
pub fn next_smooth(n: usize) -> usize {
    let mut len = n.max(1);
    loop {
        let mut r = len;
        for p in [2, 3, 5] {
            while r.is_multiple_of(p) {
                r /= p;
            }
        }
        if r == 1 {
            return len;
        }
        len += 1;
    }
}

/// Direct O(n²) evaluation of the DFT. Slow, but dependency free.
#[derive(Debug, Default, Clone, Copy)]
pub struct NaiveDft;

impl NaiveDft {
    fn run(buf: &mut [Complex64], sign: f64) {
        let n = buf.len();
        if n <= 1 {
            return;
        }
        let twiddles: Vec<Complex64> = (0..n)
            .map(|t| Complex64::from_polar(1.0, sign * 2.0 * PI * t as f64 / n as f64))
            .collect();
        let input = buf.to_vec();
        for (k, out) in buf.iter_mut().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for (t, x) in input.iter().enumerate() {
                acc += x * twiddles[(t * k) % n];
            }
            *out = acc;
        }
    }
}

impl FftBackend for NaiveDft {
    fn forward(&self, buf: &mut [Complex64]) {
        Self::run(buf, -1.0);
    }

    fn inverse(&self, buf: &mut [Complex64]) {
        Self::run(buf, 1.0);
    }
}

#[cfg(feature = "rustfft")]
pub use self::rustfft_backend::RustFft;

#[cfg(feature = "rustfft")]
mod rustfft_backend {
    extern crate std;

    use alloc::sync::Arc;
    use std::collections::HashMap;
    use std::sync::{Mutex, RwLock};

    use num_complex::Complex64;
    use rustfft::{Fft, FftDirection, FftPlanner};

    use super::FftBackend;

    type PlanPair = (Arc<dyn Fft<f64>>, Arc<dyn Fft<f64>>);

    /// [`FftBackend`] backed by `rustfft`, caching one plan pair per length.
    pub struct RustFft {
        planner: Mutex<FftPlanner<f64>>,
        plans: RwLock<HashMap<usize, PlanPair>>,
    }

    impl RustFft {
        pub fn new() -> Self {
            Self {
                planner: Mutex::new(FftPlanner::new()),
                plans: RwLock::new(HashMap::new()),
            }
        }

        fn plans(&self, len: usize) -> PlanPair {
            if let Some(p) = self.plans.read().unwrap().get(&len) {
                return p.clone();
            }
            let pair = {
                let mut planner = self.planner.lock().unwrap();
                (
                    planner.plan_fft(len, FftDirection::Forward),
                    planner.plan_fft(len, FftDirection::Inverse),
                )
            };
            self.plans
                .write()
                .unwrap()
                .entry(len)
                .or_insert(pair)
                .clone()
        }
    }

    impl Default for RustFft {
        fn default() -> Self {
            Self::new()
        }
    }

    impl core::fmt::Debug for RustFft {
        fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
            let cached = self.plans.read().map(|p| p.len()).unwrap_or(0);
            f.debug_struct("RustFft").field("cached_lengths", &cached).finish()
        }
    }

    impl FftBackend for RustFft {
        fn forward(&self, buf: &mut [Complex64]) {
            if buf.len() > 1 {
                self.plans(buf.len()).0.process(buf);
            }
        }

        fn inverse(&self, buf: &mut [Complex64]) {
            if buf.len() > 1 {
                self.plans(buf.len()).1.process(buf);
            }
        }

        fn forward_batch(&self, buf: &mut [Complex64], len: usize) {
            if len > 1 && buf.len() >= len {
                let end = buf.len() - buf.len() % len;
                self.plans(len).0.process(&mut buf[..end]);
            }
        }

        fn inverse_batch(&self, buf: &mut [Complex64], len: usize) {
            if len > 1 && buf.len() >= len {
                let end = buf.len() - buf.len() % len;
                self.plans(len).1.process(&mut buf[..end]);
            }
        }
    }
}
