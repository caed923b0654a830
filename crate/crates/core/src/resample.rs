//! Resampling of univariate trigonometric polynomials between node sets.
//!
//! Given samples `f_j = p(y_j)` of `p(x) = Σ_k α_k e^{ikx}` (modes `k` as in
//! [`crate::nufft`]), estimate `α` by least squares and evaluate `p` at new
//! nodes. The fast path forms the normal equations: the Gram matrix `A*A`
//! is Hermitian Toeplitz, its first column comes from a single type-I NUFFT,
//! and its inverse is applied through a Gohberg–Semencul plan. The dense QR
//! path is the reference.

use alloc::vec::Vec;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{check_len, Error, Result};
use crate::fft::FftBackend;
use crate::nufft::{first_mode, NodeSet, NufftPlan, PreparedNodes, Sign};
use crate::toeplitz::{toeplitz_inv_mul, toeplitz_inv_plan, ToeplitzInvPlan};

/// Relative pivot threshold below which the dense least-squares system is
/// declared rank deficient.
const RANK_TOL: f64 = 1e-11;

/// First column of the Gram matrix `A*A`, `c_p = Σ_j e^{-i p y_j}`.
pub fn gram_first_column(
    fft: &dyn FftBackend,
    src: &NodeSet,
    plan: &NufftPlan,
) -> Result<Vec<Complex64>> {
    gram_column_prepared(fft, src, &plan.prepare(src), plan)
}

fn gram_column_prepared(
    fft: &dyn FftBackend,
    src: &NodeSet,
    prepared: &PreparedNodes,
    plan: &NufftPlan,
) -> Result<Vec<Complex64>> {
    let k0 = first_mode(plan.modes()) as f64;
    let w: Vec<Complex64> = src
        .points()
        .iter()
        .map(|&y| Complex64::from_polar(1.0, k0 * y))
        .collect();
    let nj = src.len() as f64;
    let mut col = plan.type1_prepared(fft, prepared, &w, Sign::Negative)?;
    for c in &mut col {
        *c *= nj;
    }
    Ok(col)
}

/// Preprocessed inverse-Gram operator for one source node set.
#[derive(Debug, Clone)]
pub struct ResamplePlan {
    src: NodeSet,
    prepared: PreparedNodes,
    nufft: NufftPlan,
    inv: ToeplitzInvPlan,
}

/// Builds the fast resampling plan for `modes` modes at source nodes `src`.
pub fn make_resample_plan(
    fft: &dyn FftBackend,
    src: &NodeSet,
    modes: usize,
    eps: f64,
) -> Result<ResamplePlan> {
    if src.len() < modes {
        return Err(Error::RankDeficient);
    }
    let nufft = NufftPlan::new(modes, eps)?;
    let prepared = nufft.prepare(src);
    let col = gram_column_prepared(fft, src, &prepared, &nufft)?;
    let inv = toeplitz_inv_plan(fft, &col)?;
    Ok(ResamplePlan {
        src: src.clone(),
        prepared,
        nufft,
        inv,
    })
}

impl ResamplePlan {
    pub fn src(&self) -> &NodeSet {
        &self.src
    }

    pub fn modes(&self) -> usize {
        self.nufft.modes()
    }

    pub fn nufft(&self) -> &NufftPlan {
        &self.nufft
    }

    pub fn inverse_gram(&self) -> &ToeplitzInvPlan {
        &self.inv
    }

    /// Least-squares Fourier coefficients `α = (A*A)⁻¹ A* f`.
    pub fn coefficients(&self, fft: &dyn FftBackend, f: &[Complex64]) -> Result<Vec<Complex64>> {
        check_len("resampled samples", self.src.len(), f.len())?;
        let nj = f.len() as f64;
        let mut rhs = self
            .nufft
            .type1_prepared(fft, &self.prepared, f, Sign::Negative)?;
        for v in &mut rhs {
            *v *= nj;
        }
        toeplitz_inv_mul(fft, &self.inv, &rhs)
    }

    /// Precomputes destination weights for repeated [`Self::resample_prepared`].
    pub fn prepare_dst(&self, dst: &NodeSet) -> PreparedNodes {
        self.nufft.prepare(dst)
    }

    pub fn resample(&self, fft: &dyn FftBackend, f: &[Complex64], dst: &NodeSet) -> Result<Vec<Complex64>> {
        self.resample_prepared(fft, f, &self.prepare_dst(dst))
    }

    pub fn resample_prepared(
        &self,
        fft: &dyn FftBackend,
        f: &[Complex64],
        dst: &PreparedNodes,
    ) -> Result<Vec<Complex64>> {
        let alpha = self.coefficients(fft, f)?;
        self.nufft.type2_prepared(fft, dst, &alpha, Sign::Positive)
    }
}

/// Fast resampling of `f` (samples at `plan.src()`) onto `dst`.
pub fn toeplitz_resample(
    fft: &dyn FftBackend,
    plan: &ResamplePlan,
    f: &[Complex64],
    dst: &NodeSet,
) -> Result<Vec<Complex64>> {
    plan.resample(fft, f, dst)
}

fn vandermonde(nodes: &NodeSet, modes: usize) -> DMatrix<Complex64> {
    let k0 = first_mode(modes);
    DMatrix::from_fn(nodes.len(), modes, |j, k| {
        Complex64::from_polar(1.0, (k0 + k as i64) as f64 * nodes.points()[j])
    })
}

/// Pseudo-inverse `A⁺ = R⁻¹Q*` of the source Vandermonde matrix (modes × |src|).
fn pseudo_inverse(src: &NodeSet, modes: usize) -> Result<DMatrix<Complex64>> {
    if src.len() < modes || modes == 0 {
        return Err(Error::RankDeficient);
    }
    let qr = vandermonde(src, modes).qr();
    let r = qr.r();
    let scale = (0..modes).map(|i| r[(i, i)].norm()).fold(0.0, f64::max);
    if (0..modes).any(|i| r[(i, i)].norm() <= RANK_TOL * scale) {
        return Err(Error::RankDeficient);
    }
    r.solve_upper_triangular(&qr.q().adjoint())
        .ok_or(Error::RankDeficient)
}

/// Dense least-squares resampling via QR. `O(N·modes²)`; reference only.
pub fn ls_resample(src: &NodeSet, f: &[Complex64], dst: &NodeSet, modes: usize) -> Result<Vec<Complex64>> {
    check_len("resampled samples", src.len(), f.len())?;
    let alpha = ls_coefficients(src, f, modes)?;
    Ok((vandermonde(dst, modes) * alpha).iter().copied().collect())
}

/// Dense least-squares coefficients `argmin_α ‖Aα − f‖₂`.
pub fn ls_coefficients(src: &NodeSet, f: &[Complex64], modes: usize) -> Result<DMatrix<Complex64>> {
    check_len("resampled samples", src.len(), f.len())?;
    let pinv = pseudo_inverse(src, modes)?;
    Ok(pinv * DMatrix::from_column_slice(f.len(), 1, f))
}

/// Precomputed dense resampling matrix `E_dst · A_src⁺`.
#[derive(Debug, Clone)]
pub struct DenseResampler {
    matrix: DMatrix<Complex64>,
}

impl DenseResampler {
    pub fn new(src: &NodeSet, dst: &NodeSet, modes: usize) -> Result<Self> {
        let pinv = pseudo_inverse(src, modes)?;
        Ok(Self {
            matrix: vandermonde(dst, modes) * pinv,
        })
    }

    pub fn apply(&self, f: &[Complex64]) -> Result<Vec<Complex64>> {
        check_len("resampled samples", self.matrix.ncols(), f.len())?;
        let mut out = Vec::with_capacity(self.matrix.nrows());
        for i in 0..self.matrix.nrows() {
            let mut acc = Complex64::new(0.0, 0.0);
            for (j, v) in f.iter().enumerate() {
                acc += self.matrix[(i, j)] * v;
            }
            out.push(acc);
        }
        Ok(out)
    }
}

/// Which resampling backend a [`Resampler`] uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Method {
    /// Toeplitz normal equations plus NUFFT, `O(n log n)` per call.
    #[default]
    Toeplitz,
    /// Precomputed dense least-squares matrix, `O(n²)` per call.
    LeastSquares,
}

/// A fixed source → destination resampling map.
#[derive(Debug, Clone)]
pub enum Resampler {
    Toeplitz { plan: ResamplePlan, dst: PreparedNodes },
    Dense(DenseResampler),
}

impl Resampler {
    pub fn new(
        fft: &dyn FftBackend,
        src: &NodeSet,
        dst: &NodeSet,
        modes: usize,
        eps: f64,
        method: Method,
    ) -> Result<Self> {
        Ok(match method {
            Method::Toeplitz => {
                let plan = make_resample_plan(fft, src, modes, eps)?;
                let dst = plan.prepare_dst(dst);
                Resampler::Toeplitz { plan, dst }
            }
            Method::LeastSquares => Resampler::Dense(DenseResampler::new(src, dst, modes)?),
        })
    }

    pub fn apply(&self, fft: &dyn FftBackend, f: &[Complex64]) -> Result<Vec<Complex64>> {
        match self {
            Resampler::Toeplitz { plan, dst } => plan.resample_prepared(fft, f, dst),
            Resampler::Dense(d) => d.apply(f),
        }
    }
}
