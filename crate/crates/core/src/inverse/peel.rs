//! Onion peeling: resampling pseudo-polar data onto `Ω_c`, one Cartesian
//! shell per iteration from the outside in.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{check_len, Error, Result};
use crate::fft::FftBackend;
use crate::geometry::{GridParams, Sector};
use crate::nufft::{NodeSet, DEFAULT_EPS};
use crate::par;
use crate::ppft::PpftData;
use crate::resample::{Method, Resampler};

use super::decimated::CartesianCube;

/// Square `(n+1)×(n+1)` slice, row-major.
pub type Slice = Vec<Complex64>;

/// Tuning of the inversion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IppftOptions {
    /// NUFFT accuracy for the Toeplitz resampler.
    pub eps: f64,
    pub method: Method,
    /// Verify that values recovered by two faces agree before overwriting.
    pub check_overlap: bool,
}

impl Default for IppftOptions {
    fn default() -> Self {
        Self {
            eps: DEFAULT_EPS,
            method: Method::Toeplitz,
            check_overlap: false,
        }
    }
}

/// Agreement required between faces sharing a shell edge.
pub const OVERLAP_TOL: f64 = 1e-9;

/// The two resampling maps used at peeling depth `j`.
#[derive(Debug, Clone)]
pub struct PeelStage {
    /// Cartesian row spacing onto the pseudo-polar angular spacing.
    outer: Resampler,
    /// Mixed pseudo-polar/Cartesian nodes onto the Cartesian targets.
    mixed: Resampler,
}

/// Node sets for depth `j ≥ 1`: `(y1, x1, y, x)`.
pub fn peel_nodes(g: GridParams, j: usize) -> Result<(NodeSet, NodeSet, NodeSet, NodeSet)> {
    let n = g.n();
    if j == 0 || j > n / 2 {
        return Err(Error::Range {
            what: "peeling depth",
            value: j as i64,
            min: 1,
            max: (n / 2) as i64,
        });
    }
    let half = (n / 2) as i64;
    let k = half - j as i64;
    let alpha = k as f64 / half as f64;
    let scale = -2.0 * g.q() as f64 * PI / g.m() as f64;
    let y1: Vec<f64> = (-half..=half).map(|t| t as f64 * scale).collect();
    let x1 = y1.iter().map(|v| alpha * v).collect();
    let y = (-half..-half + j as i64)
        .map(|t| t as f64)
        .chain((-half..=half).map(|t| alpha * t as f64))
        .chain((half - j as i64 + 1..=half).map(|t| t as f64))
        .map(|t| t * scale);
    let y = y.collect();
    let x = (-k..=k).map(|t| t as f64 * scale).collect();
    Ok((NodeSet::new(y1)?, NodeSet::new(x1)?, NodeSet::new(y)?, NodeSet::new(x)?))
}

impl PeelStage {
    pub fn new(fft: &dyn FftBackend, g: GridParams, j: usize, opts: &IppftOptions) -> Result<Self> {
        let (y1, x1, y, x) = peel_nodes(g, j)?;
        let modes = g.n() + 1;
        Ok(Self {
            outer: Resampler::new(fft, &y1, &x1, modes, opts.eps, opts.method)?,
            mixed: Resampler::new(fft, &y, &x, modes, opts.eps, opts.method)?,
        })
    }
}

/// Recovers the Cartesian values on one face of shell `n/2 - j`.
///
/// `slice_pp` holds the pseudo-polar samples at pseudo-radius `q(n/2-j)` in
/// the orientation of `slice_d` (the Cartesian plane, whose outer `j`-ring
/// is already known). Returns `slice_d` with its central
/// `(n+1-2j)×(n+1-2j)` block filled in.
pub fn recover2d(
    fft: &dyn FftBackend,
    slice_pp: &[Complex64],
    slice_d: &[Complex64],
    j: usize,
    stage: Option<&PeelStage>,
    g: GridParams,
) -> Result<Slice> {
    let n = g.n();
    let a = n + 1;
    check_len("pseudo-polar slice", a * a, slice_pp.len())?;
    check_len("Cartesian slice", a * a, slice_d.len())?;
    if j > n / 2 {
        return Err(Error::Range {
            what: "peeling depth",
            value: j as i64,
            min: 0,
            max: (n / 2) as i64,
        });
    }
    if j == 0 {
        return Ok(slice_pp.to_vec());
    }
    let stage = stage.ok_or(Error::InvalidPlan)?;
    let inner = a - 2 * j;
    let outer_rows: Vec<usize> = (0..j).chain(a - j..a).collect();

    // Outer Cartesian rows moved onto the pseudo-polar column positions.
    let mut moved = Vec::with_capacity(outer_rows.len());
    for &r in &outer_rows {
        moved.push(stage.outer.apply(fft, &slice_d[r * a..(r + 1) * a])?);
    }

    // Columns: [moved top; pseudo-polar column; moved bottom] -> inner rows.
    let mut r1 = vec![Complex64::new(0.0, 0.0); inner * a];
    let mut col = Vec::with_capacity(a + 2 * j);
    for c in 0..a {
        col.clear();
        col.extend(moved[..j].iter().map(|row| row[c]));
        col.extend((0..a).map(|r| slice_pp[r * a + c]));
        col.extend(moved[j..].iter().map(|row| row[c]));
        for (i, v) in stage.mixed.apply(fft, &col)?.into_iter().enumerate() {
            r1[i * a + c] = v;
        }
    }

    // Rows: [Cartesian left; resampled row; Cartesian right] -> inner block.
    let mut out = slice_d.to_vec();
    let mut row = Vec::with_capacity(a + 2 * j);
    for i in 0..inner {
        let d = &slice_d[(i + j) * a..(i + j + 1) * a];
        row.clear();
        row.extend_from_slice(&d[..j]);
        row.extend_from_slice(&r1[i * a..(i + 1) * a]);
        row.extend_from_slice(&d[a - j..]);
        let vals = stage.mixed.apply(fft, &row)?;
        out[(i + j) * a + j..(i + j) * a + j + inner].copy_from_slice(&vals);
    }
    Ok(out)
}

/// Precomputed resampling maps for every peeling depth of one grid.
#[derive(Debug, Clone)]
pub struct PeelPlan {
    g: GridParams,
    opts: IppftOptions,
    stages: Vec<Option<PeelStage>>,
}

impl PeelPlan {
    pub fn new(fft: &dyn FftBackend, g: GridParams, opts: IppftOptions) -> Result<Self> {
        let stages = par::map_range(g.n() / 2, |j| {
            if j == 0 {
                Ok(None)
            } else {
                PeelStage::new(fft, g, j, &opts).map(Some)
            }
        });
        Ok(Self {
            g,
            opts,
            stages: stages.into_iter().collect::<Result<_>>()?,
        })
    }

    pub fn grid(&self) -> GridParams {
        self.g
    }

    pub fn options(&self) -> &IppftOptions {
        &self.opts
    }

    pub fn stage(&self, j: usize) -> Option<&PeelStage> {
        self.stages.get(j).and_then(Option::as_ref)
    }
}

/// The six faces in processing order: `-x, +x, -y, +y, -z, +z`.
const FACES: [(Sector, bool); 6] = [
    (Sector::X, false),
    (Sector::X, true),
    (Sector::Y, false),
    (Sector::Y, true),
    (Sector::Z, false),
    (Sector::Z, true),
];

/// Cube offset of slice element `(r, c)` of the plane `p` normal to `axis`.
/// Rows/columns follow the remaining axes in increasing order.
#[inline]
fn plane_offset(cube: &CartesianCube, axis: usize, p: usize, r: usize, c: usize) -> usize {
    match axis {
        0 => cube.offset(p, r, c),
        1 => cube.offset(r, p, c),
        _ => cube.offset(r, c, p),
    }
}

fn pp_slice(data: &PpftData, s: Sector, k_idx: usize, reversed: bool) -> Slice {
    let a = data.grid().n() + 1;
    let sector = &data.sector(s)[k_idx * a * a..(k_idx + 1) * a * a];
    if !reversed {
        return sector.to_vec();
    }
    (0..a * a)
        .map(|i| sector[(a - 1 - i / a) * a + (a - 1 - i % a)])
        .collect()
}

/// Resamples pseudo-polar data onto `Ω_c`. `observe(j, cube)` runs after
/// the faces of depth `j` are written (and once more, with `j = n/2`, after
/// the center is set).
pub fn peel_with(
    fft: &dyn FftBackend,
    plan: &PeelPlan,
    data: &PpftData,
    mut observe: impl FnMut(usize, &CartesianCube),
) -> Result<CartesianCube> {
    let g = plan.grid();
    if data.grid() != g {
        return Err(Error::Shape {
            what: "pseudo-polar data side vs plan",
            expected: g.n(),
            got: data.grid().n(),
        });
    }
    let (n, q) = (g.n(), g.q());
    let a = n + 1;
    let mut cube = CartesianCube::zeros(g);
    let mut written = if plan.opts.check_overlap {
        vec![usize::MAX; a * a * a]
    } else {
        Vec::new()
    };
    for j in 0..n / 2 {
        let stage = plan.stage(j);
        let snapshot = &cube;
        let faces = par::map_range(FACES.len(), |f| {
            let (s, positive) = FACES[f];
            let axis = s.radial_axis();
            let (k_idx, p) = if positive { (q * (n - j), n - j) } else { (q * j, j) };
            let sp = pp_slice(data, s, k_idx, positive);
            let sd: Slice = (0..a * a)
                .map(|i| snapshot.data()[plane_offset(snapshot, axis, p, i / a, i % a)])
                .collect();
            recover2d(fft, &sp, &sd, j, stage, g).map(|out| (axis, p, out))
        });
        for faces_result in faces {
            let (axis, p, out) = faces_result?;
            for r in j..a - j {
                for c in j..a - j {
                    let off = plane_offset(&cube, axis, p, r, c);
                    let v = out[r * a + c];
                    if plan.opts.check_overlap {
                        if written[off] == j {
                            let d = (cube.data()[off] - v).norm();
                            let scale = v.norm().max(cube.data()[off].norm()).max(1.0);
                            if d > OVERLAP_TOL * scale {
                                return Err(Error::OverlapMismatch(d / scale));
                            }
                        }
                        written[off] = j;
                    }
                    cube.data_mut()[off] = v;
                }
            }
        }
        observe(j, &cube);
    }
    let c = n / 2;
    let center = data.at(Sector::X, q * n / 2, c, c);
    cube.set(c, c, c, center);
    observe(n / 2, &cube);
    Ok(cube)
}

pub fn peel(fft: &dyn FftBackend, plan: &PeelPlan, data: &PpftData) -> Result<CartesianCube> {
    peel_with(fft, plan, data, |_, _| {})
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fft::RustFft;
    use crate::geometry::{omega_c_point, theta_shell_indices};
    use crate::ppft::{dtft3_sample, ppft_forward_fast, Volume};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_volume(n: usize, seed: u64) -> Volume {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Volume::from_fn(n, |_, _, _| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).unwrap()
    }

    #[test]
    fn node_sets() {
        let g = GridParams::new(8, 3).unwrap();
        let (y1, x1, y, x) = peel_nodes(g, 1).unwrap();
        assert_eq!((y1.len(), x1.len(), y.len(), x.len()), (9, 9, 11, 7));
        assert!(peel_nodes(g, 0).is_err());
        assert!(peel_nodes(g, 5).is_err());
    }

    #[test]
    fn depth_zero_is_identity() {
        let fft = RustFft::new();
        let g = GridParams::new(4, 3).unwrap();
        let sp: Slice = (0..25).map(|i| Complex64::new(i as f64, 1.0)).collect();
        let sd = vec![Complex64::new(0.0, 0.0); 25];
        assert_eq!(recover2d(&fft, &sp, &sd, 0, None, g).unwrap(), sp);
        assert!(recover2d(&fft, &sp, &sd, 1, None, g).is_err());
        assert!(recover2d(&fft, &sp[..24], &sd, 0, None, g).is_err());
    }

    #[test]
    fn constant_slices_stay_constant() {
        let fft = RustFft::new();
        let g = GridParams::new(8, 3).unwrap();
        let plan = PeelPlan::new(&fft, g, IppftOptions::default()).unwrap();
        let ones = vec![Complex64::new(1.0, 0.0); 81];
        for j in 1..4 {
            let out = recover2d(&fft, &ones, &ones, j, plan.stage(j), g).unwrap();
            assert!(out.iter().all(|v| (v - 1.0).norm() < 1e-12), "j={j}");
        }
    }

    #[test]
    fn face_plus_x_depth_one() {
        let fft = RustFft::new();
        let g = GridParams::new(8, 3).unwrap();
        let vol = random_volume(8, 5);
        let data = ppft_forward_fast(&fft, &vol, g).unwrap();
        let plan = PeelPlan::new(&fft, g, IppftOptions::default()).unwrap();
        // Exact Cartesian values on the plane ωx = 3q, used for the outer ring.
        let exact = |b: usize, c: usize| {
            let f = omega_c_point(3, b as i64 - 4, c as i64 - 4, g).unwrap();
            dtft3_sample(&vol, f, g).unwrap()
        };
        let sd: Slice = (0..81).map(|i| exact(i / 9, i % 9)).collect();
        let sp = pp_slice(&data, Sector::X, 3 * 7, true);
        let out = recover2d(&fft, &sp, &sd, 1, plan.stage(1), g).unwrap();
        let mut err: f64 = 0.0;
        let mut scale: f64 = 0.0;
        for b in 1..8 {
            for c in 1..8 {
                err = err.max((out[b * 9 + c] - exact(b, c)).norm());
                scale = scale.max(exact(b, c).norm());
            }
        }
        assert!(err / scale < 1e-11, "{}", err / scale);
    }

    #[test]
    fn shells_match_dtft_after_each_depth() {
        let fft = RustFft::new();
        let g = GridParams::new(8, 3).unwrap();
        let vol = random_volume(8, 6);
        let data = ppft_forward_fast(&fft, &vol, g).unwrap();
        let opts = IppftOptions {
            check_overlap: true,
            ..IppftOptions::default()
        };
        let plan = PeelPlan::new(&fft, g, opts).unwrap();
        let mut worst: f64 = 0.0;
        peel_with(&fft, &plan, &data, |j, cube| {
            let k = 4 - j as i64;
            for [u, v, w] in theta_shell_indices(k, g).unwrap() {
                let want = dtft3_sample(&vol, omega_c_point(u, v, w, g).unwrap(), g).unwrap();
                worst = worst.max((cube.get(u, v, w).unwrap() - want).norm() / want.norm().max(1e-300));
            }
        })
        .unwrap();
        assert!(worst < 1e-10, "{worst}");
    }

    #[test]
    fn mismatched_grid() {
        let fft = RustFft::new();
        let plan = PeelPlan::new(&fft, GridParams::new(4, 3).unwrap(), IppftOptions::default()).unwrap();
        let data = PpftData::zeros(GridParams::new(6, 3).unwrap());
        assert!(peel(&fft, &plan, &data).is_err());
    }
}
