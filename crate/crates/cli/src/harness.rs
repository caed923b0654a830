//! Experiment drivers: test volumes, the relative error, timed runs and the
//! CSV they report.

use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;
use std::time::Instant;

use num_complex::Complex64;
use ppft_core::fft::FftBackend;
use ppft_core::geometry::GridParams;
use ppft_core::inverse::{fd_condition_number, inv_decimated_freq, peel, IppftOptions, IppftPlan};
use ppft_core::nufft::NodeSet;
use ppft_core::ppft::{ppft_forward_fast, PpftData, Volume};
use ppft_core::resample::{ls_resample, make_resample_plan, Method};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub use ppft_core::Error as CoreError;

/// `sqrt(Σ|I − I_r|² / Σ|I|²)`.
pub fn error_metric(i: &Volume, ir: &Volume) -> Result<f64, CoreError> {
    if i.n() != ir.n() {
        return Err(CoreError::Shape {
            what: "error metric volumes",
            expected: i.n(),
            got: ir.n(),
        });
    }
    let den: f64 = i.data().iter().map(|z| z.norm_sqr()).sum();
    if den == 0.0 {
        return Err(CoreError::Domain("reference volume has zero norm"));
    }
    let num: f64 = i.data().iter().zip(ir.data()).map(|(a, b)| (a - b).norm_sqr()).sum();
    Ok((num / den).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VolumeKind {
    /// i.i.d. real N(0, 1) samples.
    RandomGaussian,
    /// One at the centered origin.
    Delta,
    /// Indicator of the ball of radius n/4.
    Ball,
    /// `(-1)^(u+v+w)`.
    Checker,
}

impl VolumeKind {
    pub const ALL: [VolumeKind; 4] = [
        VolumeKind::RandomGaussian,
        VolumeKind::Delta,
        VolumeKind::Ball,
        VolumeKind::Checker,
    ];

    pub fn name(self) -> &'static str {
        match self {
            VolumeKind::RandomGaussian => "random_gaussian",
            VolumeKind::Delta => "delta",
            VolumeKind::Ball => "ball",
            VolumeKind::Checker => "checker",
        }
    }
}

impl fmt::Display for VolumeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for VolumeKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        VolumeKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown volume kind '{s}' (expected random_gaussian, delta, ball or checker)"))
    }
}

/// Deterministic test volume. `seed` only affects `RandomGaussian`.
pub fn generate_volume(kind: VolumeKind, n: usize, seed: u64) -> Result<Volume, CoreError> {
    if n < 2 || !n.is_multiple_of(2) {
        return Err(CoreError::Domain("volume side must be even and at least 2"));
    }
    let real = |x: f64| Complex64::new(x, 0.0);
    match kind {
        VolumeKind::RandomGaussian => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            Volume::from_fn(n, |_, _, _| real(StandardNormal.sample(&mut rng)))
        }
        VolumeKind::Delta => Volume::from_fn(n, |u, v, w| real(((u, v, w) == (0, 0, 0)) as u8 as f64)),
        VolumeKind::Ball => {
            let r = n as i64 / 4;
            Volume::from_fn(n, |u, v, w| real((u * u + v * v + w * w <= r * r) as u8 as f64))
        }
        VolumeKind::Checker => Volume::from_fn(n, |u, v, w| {
            real(if (u + v + w).rem_euclid(2) == 0 { 1.0 } else { -1.0 })
        }),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Forward,
    /// Plan construction; excluded from `Total`.
    Precompute,
    Peel,
    Decimate,
    /// `Peel + Decimate`.
    Total,
}

impl Stage {
    pub fn name(self) -> &'static str {
        match self {
            Stage::Forward => "forward",
            Stage::Precompute => "precompute",
            Stage::Peel => "peel",
            Stage::Decimate => "decimate",
            Stage::Total => "total",
        }
    }
}

/// One CSV row.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunMetrics {
    pub n: usize,
    pub q: usize,
    pub stage: Stage,
    pub seconds: f64,
    /// Relative error of the run the stage belongs to, when a reference is known.
    pub rmse: Option<f64>,
}

pub const CSV_HEADER: &str = "n,q,stage,seconds,rmse";

impl RunMetrics {
    pub fn csv_row(&self) -> String {
        let rmse = self.rmse.map(|e| format!("{e:.6e}")).unwrap_or_default();
        format!("{},{},{},{:.6e},{}", self.n, self.q, self.stage.name(), self.seconds, rmse)
    }
}

pub fn write_csv(w: &mut impl Write, rows: &[RunMetrics]) -> io::Result<()> {
    writeln!(w, "{CSV_HEADER}")?;
    for r in rows {
        writeln!(w, "{}", r.csv_row())?;
    }
    Ok(())
}

fn secs(t: Instant) -> f64 {
    t.elapsed().as_secs_f64().max(f64::MIN_POSITIVE)
}

/// Wall times of one inversion.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct InverseTimings {
    pub precompute: f64,
    pub peel: f64,
    pub decimate: f64,
}

impl InverseTimings {
    pub fn total(&self) -> f64 {
        self.peel + self.decimate
    }
}

/// Inverts with a prepared plan, timing the two stages.
pub fn invert_with_plan(
    fft: &dyn FftBackend,
    plan: &IppftPlan,
    data: &PpftData,
) -> Result<(Volume, f64, f64), CoreError> {
    let t = Instant::now();
    let cube = peel(fft, plan.peel_plan(), data)?;
    let peel_s = secs(t);
    let t = Instant::now();
    let vol = inv_decimated_freq(fft, plan.fd_plan(), &cube)?;
    Ok((vol, peel_s, secs(t)))
}

/// Builds the plan and inverts, timing every stage.
pub fn invert_timed(
    fft: &dyn FftBackend,
    data: &PpftData,
    opts: IppftOptions,
) -> Result<(Volume, InverseTimings), CoreError> {
    let t = Instant::now();
    let plan = IppftPlan::new(fft, data.grid(), opts)?;
    let precompute = secs(t);
    let (vol, peel, decimate) = invert_with_plan(fft, &plan, data)?;
    Ok((
        vol,
        InverseTimings {
            precompute,
            peel,
            decimate,
        },
    ))
}

/// Metric rows for an inversion, optionally preceded by a forward time.
pub fn inverse_rows(g: GridParams, forward: Option<f64>, t: &InverseTimings, rmse: Option<f64>) -> Vec<RunMetrics> {
    let row = |stage, seconds| RunMetrics {
        n: g.n(),
        q: g.q(),
        stage,
        seconds,
        rmse,
    };
    let mut rows: Vec<RunMetrics> = forward.map(|s| row(Stage::Forward, s)).into_iter().collect();
    rows.extend([
        row(Stage::Precompute, t.precompute),
        row(Stage::Peel, t.peel),
        row(Stage::Decimate, t.decimate),
        row(Stage::Total, t.total()),
    ]);
    rows
}

/// Result of [`roundtrip`].
#[derive(Debug, Clone)]
pub struct Roundtrip {
    pub recovered: Volume,
    pub rmse: f64,
    pub rows: Vec<RunMetrics>,
}

/// Forward transform, inversion and error of `vol`.
pub fn roundtrip(fft: &dyn FftBackend, vol: &Volume, q: usize, opts: IppftOptions) -> Result<Roundtrip, CoreError> {
    let g = GridParams::new(vol.n(), q)?;
    let t = Instant::now();
    let data = ppft_forward_fast(fft, vol, g)?;
    let forward = secs(t);
    let (recovered, timings) = invert_timed(fft, &data, opts)?;
    let rmse = error_metric(vol, &recovered)?;
    Ok(Roundtrip {
        rows: inverse_rows(g, Some(forward), &timings, Some(rmse)),
        recovered,
        rmse,
    })
}

/// Roundtrips each size, keeping the fastest of `repeats` inversions per
/// stage (the plan and forward data are built once per size).
pub fn bench(
    fft: &dyn FftBackend,
    sizes: &[usize],
    q: usize,
    kind: VolumeKind,
    seed: u64,
    opts: IppftOptions,
    repeats: usize,
) -> Result<Vec<RunMetrics>, CoreError> {
    let mut rows = Vec::new();
    for &n in sizes {
        let g = GridParams::new(n, q)?;
        let vol = generate_volume(kind, n, seed)?;
        let t = Instant::now();
        let data = ppft_forward_fast(fft, &vol, g)?;
        let forward = secs(t);
        let t = Instant::now();
        let plan = IppftPlan::new(fft, g, opts)?;
        let mut best = InverseTimings {
            precompute: secs(t),
            peel: f64::INFINITY,
            decimate: f64::INFINITY,
        };
        let mut rmse = 0.0;
        for _ in 0..repeats.max(1) {
            let (rec, p, d) = invert_with_plan(fft, &plan, &data)?;
            if p + d < best.total() {
                best.peel = p;
                best.decimate = d;
            }
            rmse = error_metric(&vol, &rec)?;
        }
        rows.extend(inverse_rows(g, Some(forward), &best, Some(rmse)));
    }
    Ok(rows)
}

/// `(n, κ(F_D))` for each size.
pub fn cond_sweep(q: usize, sizes: &[usize]) -> Result<Vec<(usize, f64)>, CoreError> {
    sizes
        .iter()
        .map(|&n| Ok((n, fd_condition_number(GridParams::new(n, q)?))))
        .collect()
}

/// Outcome of the chirp resampling comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChirpReport {
    pub n: usize,
    /// Plan construction for the fast method.
    pub precompute_seconds: f64,
    pub toeplitz_seconds: f64,
    pub ls_seconds: f64,
    /// `‖fast − ls‖∞ / ‖ls‖∞`.
    pub disagreement: f64,
}

/// Node sets and samples of the chirp `cos(10k²)`, `k_j = −π + 2πj/n`
/// (`j = 0..=n`), resampled to `0.3·k_j`.
pub fn chirp_problem(n: usize) -> Result<(NodeSet, NodeSet, Vec<Complex64>), CoreError> {
    use std::f64::consts::PI;
    let k: Vec<f64> = (0..=n).map(|j| -PI + 2.0 * PI * j as f64 / n as f64).collect();
    let f = k.iter().map(|&t| Complex64::new((10.0 * t * t).cos(), 0.0)).collect();
    let dst = NodeSet::new(k.iter().map(|t| 0.3 * t).collect())?;
    Ok((NodeSet::new(k)?, dst, f))
}

/// Resamples the chirp with `n` modes by both methods.
pub fn chirp_demo(fft: &dyn FftBackend, n: usize, eps: f64) -> Result<ChirpReport, CoreError> {
    let (src, dst, f) = chirp_problem(n)?;
    let t = Instant::now();
    let plan = make_resample_plan(fft, &src, n, eps)?;
    let precompute_seconds = secs(t);
    let t = Instant::now();
    let fast = plan.resample(fft, &f, &dst)?;
    let toeplitz_seconds = secs(t);
    let t = Instant::now();
    let slow = ls_resample(&src, &f, &dst, n)?;
    let ls_seconds = secs(t);
    let num = fast.iter().zip(&slow).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    let den = slow.iter().map(|b| b.norm()).fold(0.0, f64::max);
    Ok(ChirpReport {
        n,
        precompute_seconds,
        toeplitz_seconds,
        ls_seconds,
        disagreement: num / den,
    })
}

/// Parses `toeplitz` or `ls`.
pub fn parse_method(s: &str) -> Result<Method, String> {
    match s {
        "toeplitz" => Ok(Method::Toeplitz),
        "ls" => Ok(Method::LeastSquares),
        _ => Err(format!("unknown method '{s}' (expected toeplitz or ls)")),
    }
}
