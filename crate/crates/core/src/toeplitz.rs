//! Toeplitz matrices: fast products through a 2n circulant embedding, the
//! Levinson recursion, and inverse application through the
//! Gohberg–Semencul formula
//!
//! ```text
//! T⁻¹ = (1/x₀)·(M₁M₂ − M₃M₄)
//! ```
//!
//! where `x = T⁻¹e₀`, `y = T⁻¹e_{n−1}` and `M₁..M₄` are triangular Toeplitz
//! matrices built from `x` and `y`. A plan stores only the four circulant
//! diagonals (`8n` numbers) and `x₀`.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{check_len, Error, Result};
use crate::fft::{next_smooth, FftBackend};

/// Levinson breakdown threshold on `|1 − ρ_f ρ_b|`.
pub const BREAKDOWN_TOL: f64 = 1e-14;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// An `n × n` Toeplitz matrix given by its first column and first row.
#[derive(Debug, Clone, PartialEq)]
pub struct ToeplitzSpec {
    col: Vec<Complex64>,
    row: Vec<Complex64>,
}

impl ToeplitzSpec {
    pub fn new(col: Vec<Complex64>, row: Vec<Complex64>) -> Result<Self> {
        check_len("Toeplitz first row", col.len(), row.len())?;
        if col.is_empty() {
            return Err(Error::Domain("Toeplitz matrix must have positive order"));
        }
        if col[0] != row[0] {
            return Err(Error::Domain("first column and row disagree on the diagonal"));
        }
        Ok(Self { col, row })
    }

    /// Hermitian Toeplitz matrix with first column `col` (first row `conj(col)`).
    ///
    /// For real `col` this is the symmetric matrix `T(c, c)`.
    pub fn hermitian(col: &[Complex64]) -> Result<Self> {
        if col.is_empty() {
            return Err(Error::Domain("Toeplitz matrix must have positive order"));
        }
        let mut col = col.to_vec();
        col[0] = Complex64::new(col[0].re, 0.0);
        let row = col.iter().map(|c| c.conj()).collect();
        Self::new(col, row)
    }

    pub fn order(&self) -> usize {
        self.col.len()
    }

    pub fn col(&self) -> &[Complex64] {
        &self.col
    }

    pub fn row(&self) -> &[Complex64] {
        &self.row
    }

    /// Entry `T[i, j]`.
    #[inline]
    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        if i >= j {
            self.col[i - j]
        } else {
            self.row[j - i]
        }
    }

    /// `t(d) = T[i, i − d]` for `d ∈ −(n−1) ..= n−1`.
    #[inline]
    fn diag(&self, d: isize) -> Complex64 {
        if d >= 0 {
            self.col[d as usize]
        } else {
            self.row[(-d) as usize]
        }
    }
}

/// Eigenvalues of a circulant that embeds a Toeplitz matrix.
///
/// [`toeplitz_diag`] uses the `2n × 2n` embedding; any length `≥ 2n − 1`
/// is valid (see [`toeplitz_diag_with_len`]).
#[derive(Debug, Clone, PartialEq)]
pub struct CirculantDiag {
    d: Vec<Complex64>,
    order: usize,
}

impl CirculantDiag {
    pub fn values(&self) -> &[Complex64] {
        &self.d
    }

    /// Order of the embedded Toeplitz matrix.
    pub fn order(&self) -> usize {
        self.order
    }

    /// Size of the embedding circulant.
    pub fn len(&self) -> usize {
        self.d.len()
    }

    pub fn is_empty(&self) -> bool {
        self.d.is_empty()
    }
}

/// FFT of `[c; 0; r(n−1), …, r(1)]`.
pub fn toeplitz_diag(fft: &dyn FftBackend, spec: &ToeplitzSpec) -> CirculantDiag {
    embed(fft, spec, 2 * spec.order())
}

/// FFT of `[c; 0, …, 0; r(n−1), …, r(1)]` of length `len ≥ 2n − 1`.
pub fn toeplitz_diag_with_len(fft: &dyn FftBackend, spec: &ToeplitzSpec, len: usize) -> Result<CirculantDiag> {
    let n = spec.order();
    if len + 1 < 2 * n {
        return Err(Error::Shape {
            what: "circulant embedding length",
            expected: 2 * n - 1,
            got: len,
        });
    }
    Ok(embed(fft, spec, len))
}

fn embed(fft: &dyn FftBackend, spec: &ToeplitzSpec, len: usize) -> CirculantDiag {
    let n = spec.order();
    let mut d = Vec::with_capacity(len);
    d.extend_from_slice(&spec.col);
    d.resize(len + 1 - n, ZERO);
    d.extend(spec.row[1..].iter().rev());
    fft.forward(&mut d);
    CirculantDiag { d, order: n }
}

fn padded(v: &[Complex64], len: usize) -> Vec<Complex64> {
    let mut buf = vec![ZERO; len];
    buf[..v.len()].copy_from_slice(v);
    buf
}

/// `T v` through the circulant embedding.
pub fn toeplitz_mul(fft: &dyn FftBackend, d: &CirculantDiag, v: &[Complex64]) -> Result<Vec<Complex64>> {
    let n = d.order();
    check_len("toeplitz_mul input", n, v.len())?;
    let mut buf = padded(v, d.len());
    fft.forward(&mut buf);
    for (b, e) in buf.iter_mut().zip(&d.d) {
        *b *= e;
    }
    fft.inverse(&mut buf);
    let scale = 1.0 / d.len() as f64;
    buf.truncate(n);
    buf.iter_mut().for_each(|b| *b *= scale);
    Ok(buf)
}

/// Levinson recursion. Returns `f`, `b` with `T f = e₀`, `T b = e_{n−1}`
/// and, when `rhs` is given, the solution of `T x = rhs` (else empty).
fn levinson(
    spec: &ToeplitzSpec,
    rhs: Option<&[Complex64]>,
) -> Result<(Vec<Complex64>, Vec<Complex64>, Vec<Complex64>)> {
    let n = spec.order();
    let t0 = spec.col[0];
    if t0.norm() == 0.0 || !t0.is_finite() {
        return Err(Error::Singular { order: 1 });
    }
    let mut f = Vec::with_capacity(n);
    let mut b = Vec::with_capacity(n);
    let mut x = Vec::with_capacity(if rhs.is_some() { n } else { 0 });
    f.push(t0.inv());
    b.push(t0.inv());
    if let Some(r) = rhs {
        x.push(r[0] / t0);
    }
    let mut f_next = Vec::with_capacity(n);
    let mut b_next = Vec::with_capacity(n);
    for k in 1..n {
        // T_{k+1}[f; 0] = e₀ + ef·e_k and T_{k+1}[0; b] = eb·e₀ + e_k.
        let ef: Complex64 = (0..k).map(|i| spec.diag((k - i) as isize) * f[i]).sum();
        let eb: Complex64 = (0..k).map(|i| spec.diag(-((i + 1) as isize)) * b[i]).sum();
        let denom = Complex64::new(1.0, 0.0) - ef * eb;
        if denom.norm() < BREAKDOWN_TOL || !denom.is_finite() {
            return Err(Error::Singular { order: k + 1 });
        }
        let inv = denom.inv();
        f_next.clear();
        b_next.clear();
        for i in 0..=k {
            let fi = if i < k { f[i] } else { ZERO };
            let bi = if i > 0 { b[i - 1] } else { ZERO };
            f_next.push((fi - ef * bi) * inv);
            b_next.push((bi - eb * fi) * inv);
        }
        core::mem::swap(&mut f, &mut f_next);
        core::mem::swap(&mut b, &mut b_next);
        if let Some(r) = rhs {
            // T_{k+1}[x; 0] agrees with rhs except in the last entry.
            let ex: Complex64 = (0..k).map(|i| spec.diag((k - i) as isize) * x[i]).sum();
            let gap = r[k] - ex;
            x.push(ZERO);
            for (xi, bi) in x.iter_mut().zip(&b) {
                *xi += gap * bi;
            }
        }
    }
    Ok((f, b, x))
}

fn levinson_vectors(spec: &ToeplitzSpec) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
    levinson(spec, None).map(|(f, b, _)| (f, b))
}

/// Solves `T x = rhs` for a general Toeplitz `T` in O(n²).
pub fn levinson_solve_toeplitz(spec: &ToeplitzSpec, rhs: &[Complex64]) -> Result<Vec<Complex64>> {
    check_len("levinson right-hand side", spec.order(), rhs.len())?;
    levinson(spec, Some(rhs)).map(|(_, _, x)| x)
}

/// Solves `T x = rhs` for the Hermitian Toeplitz matrix with first column `col`.
pub fn levinson_solve(col: &[Complex64], rhs: &[Complex64]) -> Result<Vec<Complex64>> {
    levinson_solve_toeplitz(&ToeplitzSpec::hermitian(col)?, rhs)
}

/// Precomputed Gohberg–Semencul representation of `T⁻¹`.
#[derive(Debug, Clone, PartialEq)]
pub struct ToeplitzInvPlan {
    d1: CirculantDiag,
    d2: CirculantDiag,
    d3: CirculantDiag,
    d4: CirculantDiag,
    x0: Complex64,
}

/// Plan for the Hermitian Toeplitz matrix with first column `col`.
pub fn toeplitz_inv_plan(fft: &dyn FftBackend, col: &[Complex64]) -> Result<ToeplitzInvPlan> {
    ToeplitzInvPlan::from_spec(fft, &ToeplitzSpec::hermitian(col)?)
}

impl ToeplitzInvPlan {
    pub fn from_spec(fft: &dyn FftBackend, spec: &ToeplitzSpec) -> Result<Self> {
        let n = spec.order();
        let (x, y) = levinson_vectors(spec)?;
        let x0 = x[0];
        if !(x0.norm() > f64::MIN_POSITIVE) || !x0.is_finite() {
            return Err(Error::InvalidPlan);
        }
        let zeros = vec![ZERO; n];

        let mut m1_row = zeros.clone();
        m1_row[0] = x0;
        let m1 = ToeplitzSpec::new(x.clone(), m1_row)?;

        let mut m2_col = zeros.clone();
        m2_col[0] = y[n - 1];
        let m2 = ToeplitzSpec::new(m2_col, y.iter().rev().copied().collect())?;

        let mut m3_col = zeros.clone();
        m3_col[1..].copy_from_slice(&y[..n - 1]);
        let m3 = ToeplitzSpec::new(m3_col, zeros.clone())?;

        let mut m4_row = zeros.clone();
        for (dst, src) in m4_row[1..].iter_mut().zip(x[1..].iter().rev()) {
            *dst = *src;
        }
        let m4 = ToeplitzSpec::new(zeros, m4_row)?;

        // Any embedding length >= 2n - 1 is exact; a 5-smooth one keeps
        // the six transforms per application on fast FFT paths.
        let len = next_smooth(2 * n);
        Ok(Self {
            d1: embed(fft, &m1, len),
            d2: embed(fft, &m2, len),
            d3: embed(fft, &m3, len),
            d4: embed(fft, &m4, len),
            x0,
        })
    }

    pub fn order(&self) -> usize {
        self.d1.order()
    }

    pub fn x0(&self) -> Complex64 {
        self.x0
    }

    pub fn diagonals(&self) -> [&CirculantDiag; 4] {
        [&self.d1, &self.d2, &self.d3, &self.d4]
    }

    /// Number of complex values held by the plan.
    pub fn storage_len(&self) -> usize {
        self.diagonals().iter().map(|d| d.d.len()).sum::<usize>() + 1
    }
}

/// `T⁻¹ v = (1/x₀)(M₁M₂v − M₃M₄v)` in O(n log n).
///
/// `M₂v` and `M₄v` share the transform of `v`, and the two outer products
/// are combined before the last inverse transform, so the whole
/// application costs six FFTs of the embedding length (the smallest
/// 5-smooth length `≥ 2n`).
pub fn toeplitz_inv_mul(fft: &dyn FftBackend, p: &ToeplitzInvPlan, v: &[Complex64]) -> Result<Vec<Complex64>> {
    let n = p.order();
    check_len("toeplitz_inv_mul input", n, v.len())?;
    let len = p.d1.len();
    let scale = 1.0 / len as f64;

    let mut spec_v = padded(v, len);
    fft.forward(&mut spec_v);

    let inner = |d: &CirculantDiag| {
        let mut buf: Vec<Complex64> = spec_v.iter().zip(&d.d).map(|(a, b)| a * b).collect();
        fft.inverse(&mut buf);
        for b in &mut buf[..n] {
            *b *= scale;
        }
        buf[n..].iter_mut().for_each(|b| *b = ZERO);
        fft.forward(&mut buf);
        buf
    };
    let u1 = inner(&p.d2);
    let u2 = inner(&p.d4);

    let mut out: Vec<Complex64> = u1
        .iter()
        .zip(&u2)
        .zip(p.d1.d.iter().zip(&p.d3.d))
        .map(|((a, b), (e1, e3))| a * e1 - b * e3)
        .collect();
    fft.inverse(&mut out);
    out.truncate(n);
    let s = p.x0.inv() * scale;
    out.iter_mut().for_each(|o| *o *= s);
    Ok(out)
}
