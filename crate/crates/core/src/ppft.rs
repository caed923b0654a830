//! Forward 3D pseudo-polar Fourier transform.
//!
//! The DTFT convention is `Î(ω) = Σ_{u,v,w} I(u,v,w) e^{2πi(uωx + vωy + wωz)/m}`
//! with `u, v, w ∈ [-n/2, n/2)`.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{check_len, Error, Result};
use crate::fft::{next_smooth, FftBackend};
use crate::geometry::{centered, linear, pp_point, Freq3, GridParams, PpIndex, Sector};
use crate::par;

/// Dense `n×n×n` complex volume. `u` varies fastest, then `v`, then `w`;
/// centered coordinates run over `[-n/2, n/2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Volume {
    n: usize,
    data: Vec<Complex64>,
}

impl Volume {
    pub fn new(n: usize, data: Vec<Complex64>) -> Result<Self> {
        if n < 2 || !n.is_multiple_of(2) {
            return Err(Error::Domain("volume side must be even and at least 2"));
        }
        check_len("volume samples", n * n * n, data.len())?;
        Ok(Self { n, data })
    }

    pub fn zeros(n: usize) -> Result<Self> {
        Self::new(n, vec![Complex64::new(0.0, 0.0); n * n * n])
    }

    /// Builds a volume from a function of centered `(u, v, w)`.
    pub fn from_fn(n: usize, mut f: impl FnMut(i64, i64, i64) -> Complex64) -> Result<Self> {
        let mut vol = Self::zeros(n)?;
        for w in 0..n {
            for v in 0..n {
                for u in 0..n {
                    vol.data[u + n * (v + n * w)] = f(centered(u, n), centered(v, n), centered(w, n));
                }
            }
        }
        Ok(vol)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<Complex64> {
        self.data
    }

    fn offset(&self, u: i64, v: i64, w: i64) -> Option<usize> {
        let h = (self.n / 2) as i64;
        if [u, v, w].iter().all(|c| (-h..h).contains(c)) {
            Some(linear(u, self.n) + self.n * (linear(v, self.n) + self.n * linear(w, self.n)))
        } else {
            None
        }
    }

    /// Sample at centered coordinates, `None` outside the volume.
    pub fn get(&self, u: i64, v: i64, w: i64) -> Option<Complex64> {
        self.offset(u, v, w).map(|i| self.data[i])
    }

    pub fn set(&mut self, u: i64, v: i64, w: i64, value: Complex64) -> Result<()> {
        let i = self.offset(u, v, w).ok_or(Error::Range {
            what: "volume coordinate",
            value: u.max(v).max(w),
            min: -((self.n / 2) as i64),
            max: (self.n / 2) as i64 - 1,
        })?;
        self.data[i] = value;
        Ok(())
    }
}

/// Samples of `Î` on the three pseudo-polar sectors.
///
/// Each sector is an `m × (n+1) × (n+1)` array indexed `[k][l][j]` with `j`
/// fastest; array index `i` along an axis of length `L` is the centered
/// index `i - L/2`.
#[derive(Debug, Clone, PartialEq)]
pub struct PpftData {
    g: GridParams,
    sectors: [Vec<Complex64>; 3],
}

impl PpftData {
    pub fn new(g: GridParams, sx: Vec<Complex64>, sy: Vec<Complex64>, sz: Vec<Complex64>) -> Result<Self> {
        let len = Self::sector_len(g);
        for s in [&sx, &sy, &sz] {
            check_len("pseudo-polar sector", len, s.len())?;
        }
        Ok(Self { g, sectors: [sx, sy, sz] })
    }

    pub fn zeros(g: GridParams) -> Self {
        let len = Self::sector_len(g);
        let z = vec![Complex64::new(0.0, 0.0); len];
        Self {
            g,
            sectors: [z.clone(), z.clone(), z],
        }
    }

    /// Number of samples per sector, `m·(n+1)²`.
    pub fn sector_len(g: GridParams) -> usize {
        g.m() * (g.n() + 1) * (g.n() + 1)
    }

    pub fn grid(&self) -> GridParams {
        self.g
    }

    pub fn sector(&self, s: Sector) -> &[Complex64] {
        &self.sectors[s as usize]
    }

    pub fn sector_mut(&mut self, s: Sector) -> &mut [Complex64] {
        &mut self.sectors[s as usize]
    }

    /// Value at array indices (not centered).
    #[inline]
    pub fn at(&self, s: Sector, k_idx: usize, l_idx: usize, j_idx: usize) -> Complex64 {
        let a = self.g.n() + 1;
        self.sectors[s as usize][(k_idx * a + l_idx) * a + j_idx]
    }

    pub fn get(&self, p: PpIndex) -> Result<Complex64> {
        pp_point(p, self.g)?;
        let n = self.g.n();
        Ok(self.at(
            p.sector,
            linear(p.k, self.g.m()),
            linear(p.l, n + 1),
            linear(p.j, n + 1),
        ))
    }
}

fn check_grid(vol: &Volume, g: GridParams) -> Result<()> {
    check_len("volume side vs grid", g.n(), vol.n())
}

fn phases(n: usize, omega: f64, m: f64) -> Vec<Complex64> {
    (0..n)
        .map(|u| Complex64::from_polar(1.0, 2.0 * PI * centered(u, n) as f64 * omega / m))
        .collect()
}

/// Direct evaluation of the DTFT at one frequency.
pub fn dtft3_sample(vol: &Volume, f: Freq3, g: GridParams) -> Result<Complex64> {
    check_grid(vol, g)?;
    let m = g.m() as f64;
    if f.as_array().iter().any(|c| !c.is_finite() || c.abs() > m / 2.0) {
        return Err(Error::Domain("frequency outside [-m/2, m/2]^3"));
    }
    let n = vol.n();
    let (ex, ey, ez) = (phases(n, f.x, m), phases(n, f.y, m), phases(n, f.z, m));
    let mut total = Complex64::new(0.0, 0.0);
    for (w, pw) in ez.iter().enumerate() {
        let mut plane = Complex64::new(0.0, 0.0);
        for (v, pv) in ey.iter().enumerate() {
            let row = &vol.data[n * (v + n * w)..n * (v + n * w) + n];
            let line: Complex64 = row.iter().zip(&ex).map(|(a, b)| a * b).sum();
            plane += line * pv;
        }
        total += plane * pw;
    }
    Ok(total)
}

/// Pseudo-polar transform by direct summation at every grid point; O(n⁶).
pub fn ppft_forward_oracle(vol: &Volume, g: GridParams) -> Result<PpftData> {
    check_grid(vol, g)?;
    let mut out = PpftData::zeros(g);
    let (n, m) = (g.n(), g.m());
    for s in Sector::ALL {
        let mut idx = 0;
        for ki in 0..m {
            for li in 0..=n {
                for ji in 0..=n {
                    let p = PpIndex {
                        sector: s,
                        k: centered(ki, m),
                        l: centered(li, n + 1),
                        j: centered(ji, n + 1),
                    };
                    out.sectors[s as usize][idx] = dtft3_sample(vol, pp_point(p, g)?, g)?;
                    idx += 1;
                }
            }
        }
    }
    Ok(out)
}

/// Bluestein evaluation of `g_k = Σ_u x_u e^{-2πiα·u·k}` for centered
/// input and output index ranges, with the chirp precomputed.
#[derive(Debug, Clone)]
pub struct ChirpZ {
    in_len: usize,
    out_len: usize,
    conv_len: usize,
    pre: Vec<Complex64>,
    post: Vec<Complex64>,
    kernel: Vec<Complex64>,
}

impl ChirpZ {
    /// `chirp(t)` must return `e^{-πiα t²}`.
    fn with_chirp(
        fft: &dyn FftBackend,
        in_len: usize,
        out_len: usize,
        chirp: impl Fn(i64) -> Complex64,
    ) -> Self {
        let u0 = centered(0, in_len);
        let k0 = centered(0, out_len);
        let span = in_len + out_len - 1;
        let conv_len = next_smooth(span);
        let pre = (0..in_len as i64).map(|i| chirp(u0 + i)).collect();
        let post = (0..out_len as i64).map(|i| chirp(k0 + i)).collect();
        let dmin = k0 - u0 - (in_len as i64 - 1);
        let mut kernel = vec![Complex64::new(0.0, 0.0); conv_len];
        for (s, h) in kernel.iter_mut().take(span).enumerate() {
            *h = chirp(dmin + s as i64).conj();
        }
        fft.forward(&mut kernel);
        let scale = 1.0 / conv_len as f64;
        for h in &mut kernel {
            *h *= scale;
        }
        Self {
            in_len,
            out_len,
            conv_len,
            pre,
            post,
            kernel,
        }
    }

    /// Arbitrary real `alpha`.
    pub fn new(fft: &dyn FftBackend, in_len: usize, out_len: usize, alpha: f64) -> Self {
        Self::with_chirp(fft, in_len, out_len, |t| {
            Complex64::from_polar(1.0, -PI * alpha * (t * t) as f64)
        })
    }

    /// Rational `alpha = num/den`; phases are reduced exactly in integers.
    pub fn rational(fft: &dyn FftBackend, in_len: usize, out_len: usize, num: i64, den: i64) -> Result<Self> {
        if den <= 0 {
            return Err(Error::Domain("chirp denominator must be positive"));
        }
        let period = 2 * den as i128;
        Ok(Self::with_chirp(fft, in_len, out_len, |t| {
            let r = (num as i128 * (t as i128 * t as i128)).rem_euclid(period);
            Complex64::from_polar(1.0, -PI * r as f64 / den as f64)
        }))
    }

    pub fn in_len(&self) -> usize {
        self.in_len
    }

    pub fn out_len(&self) -> usize {
        self.out_len
    }

    pub fn apply(&self, fft: &dyn FftBackend, x: &[Complex64]) -> Result<Vec<Complex64>> {
        check_len("chirp-z input", self.in_len, x.len())?;
        let mut out = vec![Complex64::new(0.0, 0.0); self.out_len];
        self.apply_batch(fft, 1, |_, u| x[u], |_, k, v| out[k] = v);
        Ok(out)
    }

    /// Transforms `count` sequences read element-wise through `read(seq, u)`
    /// and emitted through `write(seq, k, value)`.
    pub fn apply_batch(
        &self,
        fft: &dyn FftBackend,
        count: usize,
        read: impl Fn(usize, usize) -> Complex64,
        mut write: impl FnMut(usize, usize, Complex64),
    ) {
        let len = self.conv_len;
        let mut buf = vec![Complex64::new(0.0, 0.0); count * len];
        for (s, chunk) in buf.chunks_exact_mut(len).enumerate() {
            for (u, (slot, c)) in chunk.iter_mut().zip(&self.pre).enumerate() {
                *slot = read(s, u) * c;
            }
        }
        fft.forward_batch(&mut buf, len);
        for chunk in buf.chunks_exact_mut(len) {
            for (v, h) in chunk.iter_mut().zip(&self.kernel) {
                *v *= h;
            }
        }
        fft.inverse_batch(&mut buf, len);
        let shift = self.in_len - 1;
        for (s, chunk) in buf.chunks_exact(len).enumerate() {
            for (k, c) in self.post.iter().enumerate() {
                write(s, k, chunk[k + shift] * c);
            }
        }
    }
}

/// `g_k = Σ_u x_u e^{-2πiα·u·k}`, `u` over the centered range of `x`, `k`
/// over the centered range of length `out_len`.
pub fn frac_fft(fft: &dyn FftBackend, x: &[Complex64], alpha: f64, out_len: usize) -> Vec<Complex64> {
    let cz = ChirpZ::new(fft, x.len(), out_len, alpha);
    let mut out = vec![Complex64::new(0.0, 0.0); out_len];
    cz.apply_batch(fft, 1, |_, u| x[u], |_, k, v| out[k] = v);
    out
}

/// [`frac_fft`] with `alpha = num/den` reduced exactly.
pub fn frac_fft_rational(
    fft: &dyn FftBackend,
    x: &[Complex64],
    num: i64,
    den: i64,
    out_len: usize,
) -> Result<Vec<Complex64>> {
    ChirpZ::rational(fft, x.len(), out_len, num, den)?.apply(fft, x)
}

/// Separable fast pseudo-polar transform, O(n³ log n).
///
/// Each sector takes a length-`m` FFT along its radial axis, then two
/// chirp-z passes along the angular axes with `α = 2k/(nm)`.
pub fn ppft_forward_fast(fft: &dyn FftBackend, vol: &Volume, g: GridParams) -> Result<PpftData> {
    check_grid(vol, g)?;
    let sectors = par::map_range(3, |s| sector_fast(fft, vol, g, Sector::ALL[s]));
    let [sx, sy, sz]: [Vec<Complex64>; 3] = sectors.try_into().map_err(|_| Error::InvalidPlan)?;
    PpftData::new(g, sx, sy, sz)
}

fn sector_fast(fft: &dyn FftBackend, vol: &Volume, g: GridParams, s: Sector) -> Vec<Complex64> {
    let (n, m) = (g.n(), g.m());
    let strides = [1, n, n * n];
    let (ab, ac) = s.angular_axes();
    let (sa, sb, sc) = (strides[s.radial_axis()], strides[ab], strides[ac]);
    let data = vol.data();

    // radial[k][b][c]
    let mut radial = vec![Complex64::new(0.0, 0.0); m * n * n];
    let mut buf = vec![Complex64::new(0.0, 0.0); n * m];
    for b in 0..n {
        buf.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
        for c in 0..n {
            for a in 0..n {
                let slot = centered(a, n).rem_euclid(m as i64) as usize;
                buf[c * m + slot] = data[a * sa + b * sb + c * sc];
            }
        }
        fft.inverse_batch(&mut buf, m);
        for ki in 0..m {
            let slot = centered(ki, m).rem_euclid(m as i64) as usize;
            for c in 0..n {
                radial[(ki * n + b) * n + c] = buf[c * m + slot];
            }
        }
    }

    let a = n + 1;
    let planes = par::map_range(m, |ki| {
        let k = centered(ki, m);
        let cz = ChirpZ::rational(fft, n, a, 2 * k, (n * m) as i64)
            .expect("positive denominator");
        let plane = &radial[ki * n * n..(ki + 1) * n * n];
        // Along c for every b, then along b for every j.
        let mut half = vec![Complex64::new(0.0, 0.0); n * a];
        cz.apply_batch(fft, n, |b, c| plane[b * n + c], |b, j, v| half[b * a + j] = v);
        let mut out = vec![Complex64::new(0.0, 0.0); a * a];
        cz.apply_batch(fft, a, |j, b| half[b * a + j], |j, l, v| out[l * a + j] = v);
        out
    });
    planes.concat()
}
