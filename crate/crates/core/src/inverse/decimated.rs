//! The decimated-frequency operator `F_D` and recovery of a volume from its
//! samples on the decimated Cartesian grid `Ω_c`.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{check_len, Error, Result};
use crate::fft::FftBackend;
use crate::geometry::{centered, GridParams};
use crate::par;
use crate::ppft::Volume;
use crate::toeplitz::{toeplitz_inv_mul, toeplitz_inv_plan, ToeplitzInvPlan};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Samples of `Î` on `Ω_c`: element `[a][b][c]` (with `a` fastest) holds
/// `Î(q(a-n/2), q(b-n/2), q(c-n/2))`.
#[derive(Debug, Clone, PartialEq)]
pub struct CartesianCube {
    g: GridParams,
    data: Vec<Complex64>,
}

impl CartesianCube {
    pub fn new(g: GridParams, data: Vec<Complex64>) -> Result<Self> {
        let a = g.n() + 1;
        check_len("Cartesian cube samples", a * a * a, data.len())?;
        Ok(Self { g, data })
    }

    pub fn zeros(g: GridParams) -> Self {
        let a = g.n() + 1;
        Self {
            g,
            data: vec![ZERO; a * a * a],
        }
    }

    pub fn grid(&self) -> GridParams {
        self.g
    }

    pub fn side(&self) -> usize {
        self.g.n() + 1
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    #[inline]
    pub fn offset(&self, a: usize, b: usize, c: usize) -> usize {
        let s = self.side();
        a + s * (b + s * c)
    }

    #[inline]
    pub fn at(&self, a: usize, b: usize, c: usize) -> Complex64 {
        self.data[self.offset(a, b, c)]
    }

    #[inline]
    pub fn set(&mut self, a: usize, b: usize, c: usize, v: Complex64) {
        let i = self.offset(a, b, c);
        self.data[i] = v;
    }

    /// Sample at the grid point `(qu, qv, qw)`.
    pub fn get(&self, u: i64, v: i64, w: i64) -> Option<Complex64> {
        let h = self.g.half();
        if [u, v, w].iter().all(|c| (-h..=h).contains(c)) {
            Some(self.at((u + h) as usize, (v + h) as usize, (w + h) as usize))
        } else {
            None
        }
    }
}

/// `(F_D u)_k = Σ_{j=-n/2}^{n/2-1} u_j e^{-2πi·jqk/m}`, `k = -n/2 ..= n/2`.
pub fn f_decimated(fft: &dyn FftBackend, u: &[Complex64], g: GridParams) -> Result<Vec<Complex64>> {
    let (n, m) = (g.n(), g.m());
    check_len("F_D input", n, u.len())?;
    let mut buf = vec![ZERO; m];
    for (i, v) in u.iter().enumerate() {
        buf[centered(i, n).rem_euclid(m as i64) as usize] = *v;
    }
    fft.forward(&mut buf);
    Ok((0..=n)
        .map(|i| buf[(g.q() as i64 * centered(i, n + 1)).rem_euclid(m as i64) as usize])
        .collect())
}

/// `(F_D* w)_j = Σ_{k=-n/2}^{n/2} w_k e^{2πi·jqk/m}`.
///
/// The input is spread onto every `q`-th point of a length-`m` grid and
/// inverse transformed; the `n` entries nearest the origin are kept.
pub fn adj_f_decimated(fft: &dyn FftBackend, w: &[Complex64], g: GridParams) -> Result<Vec<Complex64>> {
    let (n, m) = (g.n(), g.m());
    check_len("F_D* input", n + 1, w.len())?;
    let mut buf = vec![ZERO; m];
    for (i, v) in w.iter().enumerate() {
        buf[(g.q() as i64 * centered(i, n + 1)).rem_euclid(m as i64) as usize] = *v;
    }
    fft.inverse(&mut buf);
    Ok((0..n)
        .map(|i| buf[centered(i, n).rem_euclid(m as i64) as usize])
        .collect())
}

/// Gram column `c_d = Σ_{k=-n/2}^{n/2} e^{2πi·qkd/m}` of `F_D*F_D`.
pub fn fd_gram_column(g: GridParams) -> Vec<Complex64> {
    let (n, q, m) = (g.n() as i64, g.q() as i64, g.m() as i64);
    (0..n)
        .map(|d| {
            let s: f64 = (-n / 2..=n / 2)
                .map(|k| libm::cos(2.0 * PI * ((q * k * d).rem_euclid(m)) as f64 / m as f64))
                .sum();
            Complex64::new(s, 0.0)
        })
        .collect()
}

/// Factorized `(F_D*F_D)⁻¹`.
#[derive(Debug, Clone)]
pub struct FdPlan {
    g: GridParams,
    inv: ToeplitzInvPlan,
}

pub fn make_fd_plan(fft: &dyn FftBackend, g: GridParams) -> Result<FdPlan> {
    Ok(FdPlan {
        g,
        inv: toeplitz_inv_plan(fft, &fd_gram_column(g))?,
    })
}

impl FdPlan {
    pub fn grid(&self) -> GridParams {
        self.g
    }

    pub fn inverse_gram(&self) -> &ToeplitzInvPlan {
        &self.inv
    }

    /// Least-squares solution `(F_D*F_D)⁻¹F_D* w` of `F_D u = w`.
    pub fn solve(&self, fft: &dyn FftBackend, w: &[Complex64]) -> Result<Vec<Complex64>> {
        toeplitz_inv_mul(fft, &self.inv, &adj_f_decimated(fft, w, self.g)?)
    }
}

/// Applies `f` to every pencil along `axis` of a 3D array with extents
/// `dims` (`dims[0]` fastest); the pencil length changes to `out_len`.
fn along_axis(
    data: &[Complex64],
    dims: [usize; 3],
    axis: usize,
    out_len: usize,
    f: impl Fn(&[Complex64]) -> Result<Vec<Complex64>> + Sync + Send,
) -> Result<(Vec<Complex64>, [usize; 3])> {
    let stride = |d: [usize; 3]| [1, d[0], d[0] * d[1]];
    let (si, mut out_dims) = (stride(dims), dims);
    out_dims[axis] = out_len;
    let so = stride(out_dims);
    let (o1, o2) = match axis {
        0 => (1, 2),
        1 => (0, 2),
        _ => (0, 1),
    };
    let count = dims[o1] * dims[o2];
    let pencils = par::map_range(count, |p| {
        let (i1, i2) = (p % dims[o1], p / dims[o1]);
        let base = i1 * si[o1] + i2 * si[o2];
        let pencil: Vec<Complex64> = (0..dims[axis]).map(|t| data[base + t * si[axis]]).collect();
        f(&pencil)
    });
    let mut out = vec![ZERO; out_dims.iter().product()];
    for (p, pencil) in pencils.into_iter().enumerate() {
        let pencil = pencil?;
        let (i1, i2) = (p % dims[o1], p / dims[o1]);
        let base = i1 * so[o1] + i2 * so[o2];
        for (t, v) in pencil.into_iter().enumerate() {
            out[base + t * so[axis]] = v;
        }
    }
    Ok((out, out_dims))
}

/// Samples of the DTFT of `vol` on `Ω_c`, by three separable `F_D` passes.
pub fn forward_decimated(fft: &dyn FftBackend, vol: &Volume, g: GridParams) -> Result<CartesianCube> {
    check_len("volume side vs grid", g.n(), vol.n())?;
    let n = g.n();
    // Î(qk) along an axis is (F_D u)_{-k}.
    let pass = |p: &[Complex64]| {
        let mut y = f_decimated(fft, p, g)?;
        y.reverse();
        Ok(y)
    };
    let (d, dims) = along_axis(vol.data(), [n, n, n], 0, n + 1, pass)?;
    let (d, dims) = along_axis(&d, dims, 1, n + 1, pass)?;
    let (d, _) = along_axis(&d, dims, 2, n + 1, pass)?;
    CartesianCube::new(g, d)
}

/// Recovers the volume from `Ω_c` samples, applying `(F_D*F_D)⁻¹F_D*` along
/// z, then y, then x.
pub fn inv_decimated_freq(fft: &dyn FftBackend, plan: &FdPlan, cube: &CartesianCube) -> Result<Volume> {
    let g = plan.grid();
    if cube.grid() != g {
        return Err(Error::Shape {
            what: "Cartesian cube side vs plan",
            expected: g.n() + 1,
            got: cube.side(),
        });
    }
    let n = g.n();
    let pass = |p: &[Complex64]| {
        let mut w = p.to_vec();
        w.reverse();
        plan.solve(fft, &w)
    };
    let s = n + 1;
    let (d, dims) = along_axis(cube.data(), [s, s, s], 2, n, pass)?;
    let (d, dims) = along_axis(&d, dims, 1, n, pass)?;
    let (d, _) = along_axis(&d, dims, 0, n, pass)?;
    Volume::new(n, d)
}

/// `F_D` as a dense `(n+1)×n` matrix.
pub fn fd_matrix(g: GridParams) -> DMatrix<Complex64> {
    let (n, q, m) = (g.n(), g.q() as i64, g.m() as i64);
    DMatrix::from_fn(n + 1, n, |k, j| {
        let e = (centered(j, n) * q * centered(k, n + 1)).rem_euclid(m);
        Complex64::from_polar(1.0, -2.0 * PI * e as f64 / m as f64)
    })
}

/// `σ_max/σ_min` of `F_D` by dense SVD.
pub fn fd_condition_number(g: GridParams) -> f64 {
    let sv = fd_matrix(g).singular_values();
    let max = sv.iter().copied().fold(0.0, f64::max);
    let min = sv.iter().copied().fold(f64::INFINITY, f64::min);
    max / min
}
