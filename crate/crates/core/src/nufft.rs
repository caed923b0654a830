//! One-dimensional nonuniform FFTs by Gaussian gridding.
//!
//! Type I:  `f_k = (1/N) Σ_j c_j e^{±i k x_j}`
//! Type II: `c_j = Σ_k f_k e^{±i k x_j}`
//!
//! with `k` running over `modes` consecutive integers starting at
//! `-(modes/2)` (so `-n/2 ..= n/2-1` for even counts and a symmetric range
//! for odd counts), and nodes `x_j ∈ [-π, π]`.
//!
//! Values are spread onto an oversampled periodic grid with a truncated
//! Gaussian, transformed with one FFT, and deconvolved in mode space. The
//! Gaussian factorization `e^{-(lh-δ)²/4τ} = e^{-δ²/4τ}·(e^{δh/2τ})^l·e^{-(lh)²/4τ}`
//! keeps the cost per node at two exponentials.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{check_len, Error, Result};
use crate::fft::{next_smooth, FftBackend};

/// Default requested accuracy.
pub const DEFAULT_EPS: f64 = 1e-13;
/// Default oversampling factor.
pub const DEFAULT_SIGMA: f64 = 2.0;

const NODE_SLACK: f64 = 1e-12;

/// Sign of `i` in the exponent.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Negative,
    Positive,
}

/// Points in `[-π, π]`.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeSet {
    pts: Vec<f64>,
}

impl NodeSet {
    pub fn new(pts: Vec<f64>) -> Result<Self> {
        if pts
            .iter()
            .any(|p| !p.is_finite() || p.abs() > PI * (1.0 + NODE_SLACK))
        {
            return Err(Error::Domain("nonuniform node outside [-pi, pi]"));
        }
        Ok(Self { pts })
    }

    pub fn points(&self) -> &[f64] {
        &self.pts
    }

    pub fn len(&self) -> usize {
        self.pts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pts.is_empty()
    }
}

/// Lowest mode index for `modes` consecutive modes.
#[inline]
pub fn first_mode(modes: usize) -> i64 {
    -((modes / 2) as i64)
}

/// Kernel and grid parameters for transforms with a fixed mode count.
#[derive(Debug, Clone, PartialEq)]
pub struct NufftPlan {
    eps: f64,
    sigma: f64,
    msp: usize,
    modes: usize,
    grid: usize,
    tau: f64,
    /// `sqrt(π/τ) e^{k²τ} / grid` for each mode.
    deconv: Vec<f64>,
    /// `e^{-(lh)²/4τ}` for `l = 1-msp ..= msp`.
    e3: Vec<f64>,
}

impl NufftPlan {
    pub fn new(modes: usize, eps: f64) -> Result<Self> {
        Self::with_sigma(modes, eps, DEFAULT_SIGMA)
    }

    pub fn with_sigma(modes: usize, eps: f64, sigma: f64) -> Result<Self> {
        if !(eps > 0.0 && eps < 1.0) {
            return Err(Error::Domain("NUFFT accuracy must lie in (0, 1)"));
        }
        if !(sigma >= 1.5) || !sigma.is_finite() {
            return Err(Error::Domain("NUFFT oversampling factor must be at least 1.5"));
        }
        if modes == 0 {
            return Err(Error::Domain("NUFFT needs at least one mode"));
        }
        let msp = libm::ceil(-libm::log10(eps)) as usize + 2;
        let grid = next_smooth((libm::ceil(sigma * modes as f64) as usize).max(2));
        let r = grid as f64 / modes as f64;
        let tau = PI * msp as f64 / ((modes * modes) as f64 * r * (r - 0.5));
        let h = 2.0 * PI / grid as f64;
        let k0 = first_mode(modes);
        let norm = libm::sqrt(PI / tau) / grid as f64;
        let deconv = (0..modes as i64)
            .map(|i| {
                let k = (k0 + i) as f64;
                norm * libm::exp(k * k * tau)
            })
            .collect();
        let e3 = (1 - msp as i64..=msp as i64)
            .map(|l| {
                let d = l as f64 * h;
                libm::exp(-d * d / (4.0 * tau))
            })
            .collect();
        Ok(Self {
            eps,
            sigma,
            msp,
            modes,
            grid,
            tau,
            deconv,
            e3,
        })
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// Kernel half-width in grid points.
    pub fn msp(&self) -> usize {
        self.msp
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    /// Length of the oversampled grid.
    pub fn grid_len(&self) -> usize {
        self.grid
    }

    /// Precomputes spreading weights for a node set.
    pub fn prepare(&self, nodes: &NodeSet) -> PreparedNodes {
        let h = 2.0 * PI / self.grid as f64;
        let width = 2 * self.msp;
        let lo = 1 - self.msp as i64;
        let mut offsets = Vec::with_capacity(nodes.len());
        let mut weights = Vec::with_capacity(nodes.len() * width);
        for &x in nodes.points() {
            let m0 = libm::floor(x / h);
            let delta = x - m0 * h;
            let e1 = libm::exp(-delta * delta / (4.0 * self.tau));
            let e2 = libm::exp(delta * h / (2.0 * self.tau));
            let mut pow = libm::exp(lo as f64 * delta * h / (2.0 * self.tau));
            for e3 in &self.e3 {
                weights.push(e1 * pow * e3);
                pow *= e2;
            }
            let start = (m0 as i64 + lo).rem_euclid(self.grid as i64) as usize;
            offsets.push(start);
        }
        PreparedNodes {
            grid: self.grid,
            width,
            offsets,
            weights,
        }
    }

    fn mode_slot(&self, i: usize) -> usize {
        (first_mode(self.modes) + i as i64).rem_euclid(self.grid as i64) as usize
    }

    /// Type I with precomputed nodes. Includes the `1/N` factor.
    pub fn type1_prepared(
        &self,
        fft: &dyn FftBackend,
        nodes: &PreparedNodes,
        values: &[Complex64],
        sign: Sign,
    ) -> Result<Vec<Complex64>> {
        self.check_prepared(nodes)?;
        check_len("NUFFT type-I values", nodes.len(), values.len())?;
        let mut grid = vec![Complex64::new(0.0, 0.0); self.grid];
        for ((&start, w), &c) in nodes
            .offsets
            .iter()
            .zip(nodes.weights.chunks_exact(nodes.width))
            .zip(values)
        {
            let mut idx = start;
            for &wl in w {
                grid[idx] += c * wl;
                idx += 1;
                if idx == self.grid {
                    idx = 0;
                }
            }
        }
        match sign {
            Sign::Negative => fft.forward(&mut grid),
            Sign::Positive => fft.inverse(&mut grid),
        }
        let inv_n = if values.is_empty() {
            0.0
        } else {
            1.0 / values.len() as f64
        };
        Ok((0..self.modes)
            .map(|i| grid[self.mode_slot(i)] * (self.deconv[i] * inv_n))
            .collect())
    }

    /// Type II with precomputed nodes.
    pub fn type2_prepared(
        &self,
        fft: &dyn FftBackend,
        nodes: &PreparedNodes,
        coeffs: &[Complex64],
        sign: Sign,
    ) -> Result<Vec<Complex64>> {
        self.check_prepared(nodes)?;
        check_len("NUFFT type-II coefficients", self.modes, coeffs.len())?;
        let mut grid = vec![Complex64::new(0.0, 0.0); self.grid];
        for (i, (&f, &d)) in coeffs.iter().zip(&self.deconv).enumerate() {
            grid[self.mode_slot(i)] += f * d;
        }
        match sign {
            Sign::Negative => fft.forward(&mut grid),
            Sign::Positive => fft.inverse(&mut grid),
        }
        Ok(nodes
            .offsets
            .iter()
            .zip(nodes.weights.chunks_exact(nodes.width))
            .map(|(&start, w)| {
                let mut acc = Complex64::new(0.0, 0.0);
                let mut idx = start;
                for &wl in w {
                    acc += grid[idx] * wl;
                    idx += 1;
                    if idx == self.grid {
                        idx = 0;
                    }
                }
                acc
            })
            .collect())
    }

    fn check_prepared(&self, nodes: &PreparedNodes) -> Result<()> {
        check_len("prepared NUFFT grid", self.grid, nodes.grid)?;
        check_len("prepared NUFFT kernel width", 2 * self.msp, nodes.width)
    }
}

/// Node offsets and Gaussian weights for one [`NodeSet`] under one plan.
#[derive(Debug, Clone, PartialEq)]
pub struct PreparedNodes {
    grid: usize,
    width: usize,
    offsets: Vec<usize>,
    weights: Vec<f64>,
}

impl PreparedNodes {
    pub fn len(&self) -> usize {
        self.offsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.offsets.is_empty()
    }
}

/// `f_k = (1/N) Σ_j c_j e^{sign·i k x_j}`.
pub fn nufft_type1(
    fft: &dyn FftBackend,
    plan: &NufftPlan,
    nodes: &NodeSet,
    values: &[Complex64],
    sign: Sign,
) -> Result<Vec<Complex64>> {
    check_len("NUFFT type-I values", nodes.len(), values.len())?;
    plan.type1_prepared(fft, &plan.prepare(nodes), values, sign)
}

/// `c_j = Σ_k f_k e^{sign·i k x_j}`.
pub fn nufft_type2(
    fft: &dyn FftBackend,
    plan: &NufftPlan,
    nodes: &NodeSet,
    coeffs: &[Complex64],
    sign: Sign,
) -> Result<Vec<Complex64>> {
    plan.type2_prepared(fft, &plan.prepare(nodes), coeffs, sign)
}
