//! Pseudo-polar and decimated Cartesian frequency grids.
//!
//! All arrays in this crate are stored 0-based. Centered indices (running
//! from `-len/2`) are converted with [`centered`] and [`linear`]; for odd
//! lengths the centered range is symmetric, `-(len-1)/2 ..= (len-1)/2`.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Volume side `n`, oversampling factor `q` and the derived `m = qn + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GridParams {
    n: usize,
    q: usize,
}

impl GridParams {
    pub fn new(n: usize, q: usize) -> Result<Self> {
        if n < 2 || !n.is_multiple_of(2) {
            return Err(Error::Domain("volume side n must be even and at least 2"));
        }
        if q == 0 {
            return Err(Error::Domain("oversampling factor q must be positive"));
        }
        Ok(Self { n, q })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn q(&self) -> usize {
        self.q
    }

    /// Number of pseudo-radius samples per ray, `qn + 1`.
    #[inline]
    pub fn m(&self) -> usize {
        self.q * self.n + 1
    }

    #[inline]
    pub fn half(&self) -> i64 {
        (self.n / 2) as i64
    }

    /// Largest pseudo-radius index, `floor(m/2) = qn/2`.
    #[inline]
    pub fn max_radius(&self) -> i64 {
        (self.q * self.n / 2) as i64
    }
}

/// Centered index of position `idx` in an axis of length `len`.
#[inline]
pub fn centered(idx: usize, len: usize) -> i64 {
    idx as i64 - (len / 2) as i64
}

/// Inverse of [`centered`].
#[inline]
pub fn linear(c: i64, len: usize) -> usize {
    (c + (len / 2) as i64) as usize
}

/// One of the three pseudo-polar sectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sector {
    X,
    Y,
    Z,
}

impl Sector {
    pub const ALL: [Sector; 3] = [Sector::X, Sector::Y, Sector::Z];

    /// Axis (0 = x, 1 = y, 2 = z) carrying the pseudo-radius.
    pub fn radial_axis(self) -> usize {
        match self {
            Sector::X => 0,
            Sector::Y => 1,
            Sector::Z => 2,
        }
    }

    /// Axes carrying the pseudo-angles `l` and `j`, in that order.
    pub fn angular_axes(self) -> (usize, usize) {
        match self {
            Sector::X => (1, 2),
            Sector::Y => (0, 2),
            Sector::Z => (0, 1),
        }
    }
}

/// A pseudo-polar grid point: radius `k` and slopes `l`, `j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PpIndex {
    pub sector: Sector,
    pub k: i64,
    pub l: i64,
    pub j: i64,
}

/// A continuous frequency triple.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Freq3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Freq3 {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn from_array(a: [f64; 3]) -> Self {
        Self::new(a[0], a[1], a[2])
    }
}

fn check_range(what: &'static str, value: i64, min: i64, max: i64) -> Result<()> {
    if (min..=max).contains(&value) {
        Ok(())
    } else {
        Err(Error::Range {
            what,
            value,
            min,
            max,
        })
    }
}

/// Frequency of a pseudo-polar grid point.
pub fn pp_point(p: PpIndex, g: GridParams) -> Result<Freq3> {
    let r = g.max_radius();
    let h = g.half();
    check_range("pseudo-radius k", p.k, -r, r)?;
    check_range("pseudo-angle l", p.l, -h, h)?;
    check_range("pseudo-angle j", p.j, -h, h)?;
    let n = g.n() as f64;
    let k = p.k as f64;
    let radial = k;
    let a = -2.0 * p.l as f64 * k / n;
    let b = -2.0 * p.j as f64 * k / n;
    let mut out = [0.0; 3];
    let (ax1, ax2) = p.sector.angular_axes();
    out[p.sector.radial_axis()] = radial;
    out[ax1] = a;
    out[ax2] = b;
    Ok(Freq3::from_array(out))
}

/// Frequency `(qu, qv, qw)` of a point of the decimated Cartesian grid.
pub fn omega_c_point(u: i64, v: i64, w: i64, g: GridParams) -> Result<Freq3> {
    let h = g.half();
    check_range("omega_c u", u, -h, h)?;
    check_range("omega_c v", v, -h, h)?;
    check_range("omega_c w", w, -h, h)?;
    let q = g.q() as f64;
    Ok(Freq3::new(q * u as f64, q * v as f64, q * w as f64))
}

/// Faces of a Cartesian shell, in the order used for deduplication.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Face {
    PosX,
    NegX,
    PosY,
    NegY,
    PosZ,
    NegZ,
}

impl Face {
    pub const ALL: [Face; 6] = [
        Face::PosX,
        Face::NegX,
        Face::PosY,
        Face::NegY,
        Face::PosZ,
        Face::NegZ,
    ];

    fn point(self, k: i64, a: i64, b: i64) -> [i64; 3] {
        match self {
            Face::PosX => [k, a, b],
            Face::NegX => [-k, a, b],
            Face::PosY => [a, k, b],
            Face::NegY => [a, -k, b],
            Face::PosZ => [a, b, k],
            Face::NegZ => [a, b, -k],
        }
    }
}

/// Integer coordinates `(u, v, w)` of the shell at radius `k`, so that the
/// frequencies are `q·(u, v, w)`. Each point appears once; the first face
/// in [`Face::ALL`] order owns shared edges and corners.
pub fn theta_shell_indices(k: i64, g: GridParams) -> Result<Vec<[i64; 3]>> {
    check_range("shell radius", k, 0, g.half())?;
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for face in Face::ALL {
        for a in -k..=k {
            for b in -k..=k {
                let p = face.point(k, a, b);
                if seen.insert(p) {
                    out.push(p);
                }
            }
        }
    }
    Ok(out)
}

/// Frequencies of the shell at radius `k`, see [`theta_shell_indices`].
pub fn theta_shell(k: i64, g: GridParams) -> Result<Vec<Freq3>> {
    let q = g.q() as f64;
    Ok(theta_shell_indices(k, g)?
        .into_iter()
        .map(|[u, v, w]| Freq3::new(q * u as f64, q * v as f64, q * w as f64))
        .collect())
}
