//! Little-endian binary containers for volumes (`PPV1`) and pseudo-polar
//! data (`PPF1`).
//!
//! ```text
//! PPV1: magic "PPV1" | version u32 | n u32 | dtype u8 | n³ × (re f64, im f64)
//! PPF1: magic "PPF1" | version u32 | n u32 | q u32 | dtype u8 | sectors X, Y, Z
//! ```
//!
//! Samples are stored in memory order (`u` fastest for volumes, `[k][l][j]`
//! with `j` fastest for sectors).

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Read, Write};
use std::path::Path;

use num_complex::Complex64;
use ppft_core::geometry::{GridParams, Sector};
use ppft_core::ppft::{PpftData, Volume};

pub const VOLUME_MAGIC: [u8; 4] = *b"PPV1";
pub const PPFT_MAGIC: [u8; 4] = *b"PPF1";
pub const VERSION: u32 = 1;
/// The only defined sample type: complex128.
pub const DTYPE_C128: u8 = 0;

/// Refuse headers that would need more than this many samples.
const MAX_SAMPLES: usize = 1 << 34;

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("bad magic {0:?}")]
    Magic([u8; 4]),
    #[error("unsupported version {0}")]
    Version(u32),
    #[error("unsupported dtype {0}")]
    Dtype(u8),
    #[error("invalid header: {0}")]
    Header(String),
    #[error(transparent)]
    Core(#[from] ppft_core::Error),
}

fn read_u32(r: &mut impl Read) -> io::Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn read_u8(r: &mut impl Read) -> io::Result<u8> {
    let mut b = [0u8; 1];
    r.read_exact(&mut b)?;
    Ok(b[0])
}

fn read_header(r: &mut impl Read, magic: [u8; 4]) -> Result<(), FormatError> {
    let mut m = [0u8; 4];
    r.read_exact(&mut m)?;
    if m != magic {
        return Err(FormatError::Magic(m));
    }
    match read_u32(r)? {
        VERSION => Ok(()),
        v => Err(FormatError::Version(v)),
    }
}

fn check_dtype(r: &mut impl Read) -> Result<(), FormatError> {
    match read_u8(r)? {
        DTYPE_C128 => Ok(()),
        d => Err(FormatError::Dtype(d)),
    }
}

fn write_samples(w: &mut impl Write, data: &[Complex64]) -> io::Result<()> {
    for z in data {
        w.write_all(&z.re.to_le_bytes())?;
        w.write_all(&z.im.to_le_bytes())?;
    }
    Ok(())
}

fn read_samples(r: &mut impl Read, count: usize) -> io::Result<Vec<Complex64>> {
    let mut bytes = vec![0u8; 16 * count];
    r.read_exact(&mut bytes)?;
    Ok(bytes
        .chunks_exact(16)
        .map(|c| {
            let re = f64::from_le_bytes(c[..8].try_into().unwrap());
            let im = f64::from_le_bytes(c[8..].try_into().unwrap());
            Complex64::new(re, im)
        })
        .collect())
}

fn samples_for(n: usize, per: impl Fn(usize) -> Option<usize>) -> Result<usize, FormatError> {
    per(n)
        .filter(|&c| c <= MAX_SAMPLES)
        .ok_or_else(|| FormatError::Header(format!("side {n} is too large")))
}

pub fn write_volume(w: &mut impl Write, vol: &Volume) -> io::Result<()> {
    w.write_all(&VOLUME_MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    w.write_all(&(vol.n() as u32).to_le_bytes())?;
    w.write_all(&[DTYPE_C128])?;
    write_samples(w, vol.data())
}

pub fn read_volume(r: &mut impl Read) -> Result<Volume, FormatError> {
    read_header(r, VOLUME_MAGIC)?;
    let n = read_u32(r)? as usize;
    check_dtype(r)?;
    let count = samples_for(n, |n| n.checked_pow(3))?;
    Ok(Volume::new(n, read_samples(r, count)?)?)
}

pub fn write_ppft(w: &mut impl Write, data: &PpftData) -> io::Result<()> {
    let g = data.grid();
    w.write_all(&PPFT_MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    w.write_all(&(g.n() as u32).to_le_bytes())?;
    w.write_all(&(g.q() as u32).to_le_bytes())?;
    w.write_all(&[DTYPE_C128])?;
    for s in Sector::ALL {
        write_samples(w, data.sector(s))?;
    }
    Ok(())
}

pub fn read_ppft(r: &mut impl Read) -> Result<PpftData, FormatError> {
    read_header(r, PPFT_MAGIC)?;
    let n = read_u32(r)? as usize;
    let q = read_u32(r)? as usize;
    check_dtype(r)?;
    let g = GridParams::new(n, q)?;
    let count = samples_for(n, |_| {
        let a = n.checked_add(1)?;
        g.m().checked_mul(a)?.checked_mul(a)?.checked_mul(3)
    })? / 3;
    let sx = read_samples(r, count)?;
    let sy = read_samples(r, count)?;
    let sz = read_samples(r, count)?;
    Ok(PpftData::new(g, sx, sy, sz)?)
}

pub fn save_volume(path: &Path, vol: &Volume) -> Result<(), FormatError> {
    let mut w = BufWriter::new(File::create(path)?);
    write_volume(&mut w, vol)?;
    w.flush()?;
    Ok(())
}

pub fn load_volume(path: &Path) -> Result<Volume, FormatError> {
    read_volume(&mut BufReader::new(File::open(path)?))
}

pub fn save_ppft(path: &Path, data: &PpftData) -> Result<(), FormatError> {
    let mut w = BufWriter::new(File::create(path)?);
    write_ppft(&mut w, data)?;
    w.flush()?;
    Ok(())
}

pub fn load_ppft(path: &Path) -> Result<PpftData, FormatError> {
    read_ppft(&mut BufReader::new(File::open(path)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_volume(n: usize) -> Volume {
        Volume::from_fn(n, |u, v, w| Complex64::new(u as f64 + 0.25, (v * w) as f64 - 1e-300)).unwrap()
    }

    #[test]
    fn volume_header_layout() {
        let mut buf = Vec::new();
        write_volume(&mut buf, &sample_volume(2)).unwrap();
        assert_eq!(&buf[..4], b"PPV1");
        assert_eq!(&buf[4..8], &1u32.to_le_bytes());
        assert_eq!(&buf[8..12], &2u32.to_le_bytes());
        assert_eq!(buf[12], 0);
        assert_eq!(buf.len(), 13 + 16 * 8);
        // First sample is (u, v, w) = (-1, -1, -1).
        assert_eq!(&buf[13..21], &(-0.75f64).to_le_bytes());
    }

    #[test]
    fn volume_roundtrip_is_bit_exact() {
        let vol = sample_volume(4);
        let mut buf = Vec::new();
        write_volume(&mut buf, &vol).unwrap();
        let back = read_volume(&mut buf.as_slice()).unwrap();
        assert_eq!(back, vol);
    }

    #[test]
    fn ppft_roundtrip() {
        let g = GridParams::new(2, 3).unwrap();
        let mut data = PpftData::zeros(g);
        data.sector_mut(Sector::Y)[5] = Complex64::new(1.5, -2.0);
        let mut buf = Vec::new();
        write_ppft(&mut buf, &data).unwrap();
        assert_eq!(&buf[..4], b"PPF1");
        assert_eq!(buf.len(), 17 + 3 * 16 * 7 * 9);
        assert_eq!(read_ppft(&mut buf.as_slice()).unwrap(), data);
    }

    #[test]
    fn rejects_bad_input() {
        let mut buf = Vec::new();
        write_volume(&mut buf, &sample_volume(2)).unwrap();
        let mut bad = buf.clone();
        bad[0] = b'X';
        assert!(matches!(read_volume(&mut bad.as_slice()), Err(FormatError::Magic(_))));
        let mut bad = buf.clone();
        bad[4] = 2;
        assert!(matches!(read_volume(&mut bad.as_slice()), Err(FormatError::Version(2))));
        let mut bad = buf.clone();
        bad[12] = 1;
        assert!(matches!(read_volume(&mut bad.as_slice()), Err(FormatError::Dtype(1))));
        assert!(matches!(read_volume(&mut &buf[..40]), Err(FormatError::Io(_))));
        let mut odd = buf.clone();
        odd[8] = 3;
        assert!(read_volume(&mut odd.as_slice()).is_err());
        assert!(read_ppft(&mut buf.as_slice()).is_err());
    }
}
