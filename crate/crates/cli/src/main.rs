use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use ppft_core::fft::RustFft;
use ppft_core::geometry::GridParams;
use ppft_core::inverse::IppftOptions;
use ppft_core::nufft::DEFAULT_EPS;
use ppft_core::ppft::ppft_forward_fast;
use ppft_core::resample::Method;

use ppft::format::{load_ppft, load_volume, save_ppft, save_volume};
use ppft::harness::{self, error_metric, generate_volume, write_csv, RunMetrics, Stage, VolumeKind};

#[derive(Parser)]
#[command(name = "ppft", version, about = "3D pseudo-polar Fourier transform and its direct inverse")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Pseudo-polar transform of a volume (file or generated) into a PPF1 file.
    Forward(ForwardArgs),
    /// Recover a volume from a PPF1 file.
    Inverse(InverseArgs),
    /// Forward transform, inversion and relative error of a generated volume.
    Roundtrip(RoundtripArgs),
    /// Timed roundtrips over several sizes, fastest of several inversions each.
    Bench(BenchArgs),
    /// Condition number of the decimated operator.
    Cond(CondArgs),
    /// Chirp resampling: Toeplitz solver against dense least squares.
    ResampleDemo(DemoArgs),
}

#[derive(Args)]
struct VolumeSpec {
    /// Volume side (even).
    #[arg(long, default_value_t = 16)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// random_gaussian, delta, ball or checker.
    #[arg(long, default_value = "random_gaussian")]
    kind: VolumeKind,
}

#[derive(Args)]
struct SolverArgs {
    #[arg(long, default_value_t = DEFAULT_EPS)]
    eps: f64,
    /// toeplitz or ls.
    #[arg(long, default_value = "toeplitz", value_parser = harness::parse_method)]
    method: Method,
    /// Check that faces agree on shared samples.
    #[arg(long)]
    check_overlap: bool,
}

impl SolverArgs {
    fn options(&self) -> Result<IppftOptions> {
        if !(self.eps > 0.0 && self.eps < 1.0) {
            bail!("--eps must lie in (0, 1)");
        }
        Ok(IppftOptions {
            eps: self.eps,
            method: self.method,
            check_overlap: self.check_overlap,
        })
    }
}

#[derive(Args)]
struct CsvArg {
    /// Also write the CSV to this file.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct ForwardArgs {
    #[command(flatten)]
    volume: VolumeSpec,
    /// Read the volume from a PPV1 file instead of generating it.
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long, default_value_t = 3)]
    q: usize,
    /// Destination PPF1 file.
    #[arg(long)]
    output: PathBuf,
    /// Save the transformed volume as PPV1.
    #[arg(long)]
    save_volume: Option<PathBuf>,
    #[command(flatten)]
    csv: CsvArg,
}

#[derive(Args)]
struct InverseArgs {
    /// PPF1 file.
    #[arg(long)]
    input: PathBuf,
    /// Destination PPV1 file.
    #[arg(long)]
    output: Option<PathBuf>,
    /// PPV1 volume to measure the error against.
    #[arg(long)]
    reference: Option<PathBuf>,
    #[command(flatten)]
    solver: SolverArgs,
    #[command(flatten)]
    csv: CsvArg,
}

#[derive(Args)]
struct RoundtripArgs {
    #[command(flatten)]
    volume: VolumeSpec,
    #[arg(long, default_value_t = 3)]
    q: usize,
    #[command(flatten)]
    solver: SolverArgs,
    /// Save the recovered volume as PPV1.
    #[arg(long)]
    output: Option<PathBuf>,
    #[command(flatten)]
    csv: CsvArg,
}

#[derive(Args)]
struct BenchArgs {
    /// Comma separated sizes.
    #[arg(long, value_delimiter = ',', default_values_t = [16, 32, 64])]
    sizes: Vec<usize>,
    #[arg(long, default_value_t = 3)]
    q: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "random_gaussian")]
    kind: VolumeKind,
    #[arg(long, default_value_t = 3)]
    repeats: usize,
    #[command(flatten)]
    solver: SolverArgs,
    #[command(flatten)]
    csv: CsvArg,
}

#[derive(Args)]
struct CondArgs {
    #[arg(long, value_delimiter = ',', default_values_t = [16, 32, 64, 128])]
    sizes: Vec<usize>,
    #[arg(long, default_value_t = 3)]
    q: usize,
}

#[derive(Args)]
struct DemoArgs {
    #[arg(long, value_delimiter = ',', default_values_t = [512, 1024])]
    sizes: Vec<usize>,
    #[arg(long, default_value_t = DEFAULT_EPS)]
    eps: f64,
}

fn emit(text: &str, csv: &CsvArg) -> Result<()> {
    print!("{text}");
    if let Some(path) = &csv.csv {
        std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

fn emit_rows(rows: &[RunMetrics], csv: &CsvArg) -> Result<()> {
    let mut out = Vec::new();
    write_csv(&mut out, rows)?;
    emit(&String::from_utf8(out)?, csv)
}

fn volume(spec: &VolumeSpec, input: Option<&Path>) -> Result<ppft_core::ppft::Volume> {
    Ok(match input {
        Some(p) => load_volume(p).with_context(|| format!("reading {}", p.display()))?,
        None => generate_volume(spec.kind, spec.n, spec.seed)?,
    })
}

fn configure_threads() -> Result<()> {
    if let Ok(v) = std::env::var("PPFT_THREADS") {
        let threads: usize = v.parse().context("PPFT_THREADS must be a positive integer")?;
        if threads == 0 {
            bail!("PPFT_THREADS must be a positive integer");
        }
        rayon::ThreadPoolBuilder::new().num_threads(threads).build_global()?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    let fft = RustFft::new();
    match cli.command {
        Command::Forward(a) => {
            let vol = volume(&a.volume, a.input.as_deref())?;
            let g = GridParams::new(vol.n(), a.q)?;
            let t = Instant::now();
            let data = ppft_forward_fast(&fft, &vol, g)?;
            let seconds = t.elapsed().as_secs_f64();
            save_ppft(&a.output, &data).with_context(|| format!("writing {}", a.output.display()))?;
            if let Some(p) = &a.save_volume {
                save_volume(p, &vol).with_context(|| format!("writing {}", p.display()))?;
            }
            let row = RunMetrics {
                n: g.n(),
                q: g.q(),
                stage: Stage::Forward,
                seconds,
                rmse: None,
            };
            emit_rows(&[row], &a.csv)
        }
        Command::Inverse(a) => {
            let opts = a.solver.options()?;
            let data = load_ppft(&a.input).with_context(|| format!("reading {}", a.input.display()))?;
            let (rec, timings) = harness::invert_timed(&fft, &data, opts)?;
            let rmse = match &a.reference {
                Some(p) => Some(error_metric(&load_volume(p)?, &rec)?),
                None => None,
            };
            if let Some(p) = &a.output {
                save_volume(p, &rec).with_context(|| format!("writing {}", p.display()))?;
            }
            emit_rows(&harness::inverse_rows(data.grid(), None, &timings, rmse), &a.csv)
        }
        Command::Roundtrip(a) => {
            let opts = a.solver.options()?;
            let vol = volume(&a.volume, None)?;
            let rt = harness::roundtrip(&fft, &vol, a.q, opts)?;
            if let Some(p) = &a.output {
                save_volume(p, &rt.recovered)?;
            }
            emit_rows(&rt.rows, &a.csv)
        }
        Command::Bench(a) => {
            let opts = a.solver.options()?;
            let rows = harness::bench(&fft, &a.sizes, a.q, a.kind, a.seed, opts, a.repeats)?;
            emit_rows(&rows, &a.csv)
        }
        Command::Cond(a) => {
            let mut text = String::from("n,q,kappa\n");
            for (n, k) in harness::cond_sweep(a.q, &a.sizes)? {
                text += &format!("{n},{},{k:.6}\n", a.q);
            }
            emit(&text, &CsvArg { csv: None })
        }
        Command::ResampleDemo(a) => {
            let stdout = io::stdout();
            let mut out = BufWriter::new(stdout.lock());
            writeln!(out, "n,precompute_seconds,toeplitz_seconds,ls_seconds,disagreement")?;
            for &n in &a.sizes {
                let r = harness::chirp_demo(&fft, n, a.eps)?;
                writeln!(
                    out,
                    "{},{:.6e},{:.6e},{:.6e},{:.3e}",
                    r.n, r.precompute_seconds, r.toeplitz_seconds, r.ls_seconds, r.disagreement
                )?;
            }
            Ok(())
        }
    }
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    configure_threads()?;
    run(cli)
}

