//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails. Runs sequentially so the timing
//! criterion is not disturbed by other tests.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use ppft::harness::{bench, chirp_demo, cond_sweep, generate_volume, roundtrip, Stage, VolumeKind};
use ppft_core::fft::RustFft;
use ppft_core::geometry::{theta_shell_indices, GridParams, Sector};
use ppft_core::inverse::{peel_with, IppftOptions, PeelPlan};
use ppft_core::nufft::{first_mode, nufft_type1, nufft_type2, NodeSet, NufftPlan, Sign};
use ppft_core::ppft::{ppft_forward_fast, ppft_forward_oracle, PpftData, Volume};
use ppft_core::resample::{ls_resample, make_resample_plan};
use ppft_core::toeplitz::{toeplitz_diag, toeplitz_inv_plan, toeplitz_inv_mul, toeplitz_mul, ToeplitzSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const ROUNDTRIP_TOL: f64 = 1e-12;
const ROUNDTRIP_TOL_64: f64 = 1e-13;
const ROUNDTRIP_SECONDS_64: f64 = 60.0;
const KAPPA_MAX: f64 = 25.0;
const TOEPLITZ_INV_TOL: f64 = 1e-10;
const TOEPLITZ_MUL_TOL: f64 = 1e-12;
const NUFFT_FACTOR: f64 = 10.0;
const NUFFT_TRIALS: usize = 100;
const ADJOINT_TOL: f64 = 1e-12;
const RESAMPLE_TOL: f64 = 1e-9;
const FORWARD_TOL: f64 = 1e-12;
const SHELL_TOL: f64 = 1e-10;
const RATIO_BAND: (f64, f64) = (6.0, 14.0);
const TIMING_REPEATS: usize = 5;

type C = Complex64;

struct Report {
    failures: usize,
}

impl Report {
    fn check(&mut self, id: usize, name: &str, pass: bool, detail: String) {
        if !pass {
            self.failures += 1;
        }
        println!("{} [{id}] {name}: {detail}", if pass { "PASS" } else { "FAIL" });
    }
}

fn rel_l2(a: &[C], b: &[C]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum();
    let den: f64 = b.iter().map(|y| y.norm_sqr()).sum();
    (num / den).sqrt()
}

fn crandn(rng: &mut ChaCha8Rng) -> C {
    C::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

/// Direct DTFT `Σ I(u,v,w) e^{2πi(uωx+vωy+wωz)/m}` over the centered volume.
fn dtft_direct(vol: &Volume, w: [f64; 3], m: usize) -> C {
    let n = vol.n();
    let h = (n / 2) as i64;
    let phase = |om: f64| -> Vec<C> {
        (0..n)
            .map(|i| C::from_polar(1.0, 2.0 * PI * (i as i64 - h) as f64 * om / m as f64))
            .collect()
    };
    let (px, py, pz) = (phase(w[0]), phase(w[1]), phase(w[2]));
    let d = vol.data();
    let mut acc = C::new(0.0, 0.0);
    for c in 0..n {
        for b in 0..n {
            let pbc = py[b] * pz[c];
            let row = &d[n * (b + n * c)..][..n];
            let s: C = row.iter().zip(&px).map(|(x, p)| x * p).sum();
            acc += s * pbc;
        }
    }
    acc
}

/// Pseudo-polar transform by direct summation at every grid point.
fn ppft_direct(vol: &Volume, g: GridParams) -> PpftData {
    let (n, q) = (g.n() as i64, g.q() as i64);
    let m = g.m();
    let mut out = PpftData::zeros(g);
    for s in Sector::ALL {
        let r = s.radial_axis();
        let (a1, a2) = s.angular_axes();
        let sec = out.sector_mut(s);
        let mut idx = 0;
        for k in -(q * n / 2)..=(q * n / 2) {
            for l in -(n / 2)..=(n / 2) {
                for j in -(n / 2)..=(n / 2) {
                    let mut w = [0.0; 3];
                    w[r] = k as f64;
                    w[a1] = -2.0 * (l * k) as f64 / n as f64;
                    w[a2] = -2.0 * (j * k) as f64 / n as f64;
                    sec[idx] = dtft_direct(vol, w, m);
                    idx += 1;
                }
            }
        }
    }
    out
}

fn ppft_rel(a: &PpftData, b: &PpftData) -> f64 {
    let flat = |d: &PpftData| -> Vec<C> { Sector::ALL.iter().flat_map(|&s| d.sector(s).to_vec()).collect() };
    rel_l2(&flat(a), &flat(b))
}

fn criterion_roundtrip(r: &mut Report, fft: &RustFft) {
    let mut worst: f64 = 0.0;
    let mut ok = true;
    for n in [8, 16, 32] {
        let vol = generate_volume(VolumeKind::RandomGaussian, n, 100 + n as u64).unwrap();
        let e = roundtrip(fft, &vol, 3, IppftOptions::default()).unwrap().rmse;
        worst = worst.max(e);
        ok &= e < ROUNDTRIP_TOL;
    }
    r.check(1, "roundtrip n=8,16,32 q=3", ok, format!("max E = {worst:.3e} (tol {ROUNDTRIP_TOL:.0e})"));

    let vol = generate_volume(VolumeKind::RandomGaussian, 64, 164).unwrap();
    let t = Instant::now();
    let e = roundtrip(fft, &vol, 3, IppftOptions::default()).unwrap().rmse;
    let secs = t.elapsed().as_secs_f64();
    r.check(
        1,
        "roundtrip n=64 q=3",
        e < ROUNDTRIP_TOL_64 && secs < ROUNDTRIP_SECONDS_64,
        format!("E = {e:.3e} (tol {ROUNDTRIP_TOL_64:.0e}), {secs:.2} s (limit {ROUNDTRIP_SECONDS_64} s)"),
    );
}

fn criterion_condition(r: &mut Report) {
    let sizes = [16, 32, 64, 128, 256];
    let ks = cond_sweep(3, &sizes).unwrap();
    let worst = ks.iter().map(|&(_, k)| k).fold(0.0, f64::max);
    let detail: Vec<String> = ks.iter().map(|(n, k)| format!("n={n}: {k:.3}")).collect();
    r.check(2, "condition number q=3", worst < KAPPA_MAX, format!("{} (bound {KAPPA_MAX})", detail.join(", ")));
}

fn dense_toeplitz(col: &[C], row: &[C]) -> DMatrix<C> {
    let n = col.len();
    DMatrix::from_fn(n, n, |i, j| if i >= j { col[i - j] } else { row[j - i] })
}

fn criterion_toeplitz(r: &mut Report, fft: &RustFft) {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let sizes = [4, 5, 7, 8, 13, 16, 31, 32, 64, 100, 127, 128, 200, 255, 256];
    let (mut inv_worst, mut mul_worst): (f64, f64) = (0.0, 0.0);
    for &n in &sizes {
        for trial in 0..4 {
            // Symmetric positive definite by diagonal dominance. Odd trials
            // use complex Hermitian entries, even trials real symmetric ones.
            let mut col: Vec<C> = (0..n)
                .map(|_| {
                    let z = crandn(&mut rng) / (n as f64);
                    if trial % 2 == 0 {
                        C::new(z.re, 0.0)
                    } else {
                        z
                    }
                })
                .collect();
            col[0] = C::new(2.0 + rng.gen_range(0.0..1.0), 0.0);
            let row: Vec<C> = col.iter().map(|z| z.conj()).collect();
            let a = dense_toeplitz(&col, &row);
            let ainv = a.clone().try_inverse().unwrap();
            let v: Vec<C> = (0..n).map(|_| crandn(&mut rng)).collect();
            let dv = DVector::from_vec(v.clone());
            let plan = toeplitz_inv_plan(fft, &col).unwrap();
            let got = toeplitz_inv_mul(fft, &plan, &v).unwrap();
            let want = &ainv * &dv;
            inv_worst = inv_worst.max(rel_l2(&got, want.as_slice()));

            // Fast matvec of a general (non-symmetric) Toeplitz matrix.
            let gcol: Vec<C> = (0..n).map(|_| crandn(&mut rng)).collect();
            let mut grow: Vec<C> = (0..n).map(|_| crandn(&mut rng)).collect();
            grow[0] = gcol[0];
            let spec = ToeplitzSpec::new(gcol.clone(), grow.clone()).unwrap();
            let got = toeplitz_mul(fft, &toeplitz_diag(fft, &spec), &v).unwrap();
            let want = dense_toeplitz(&gcol, &grow) * &dv;
            mul_worst = mul_worst.max(rel_l2(&got, want.as_slice()));
        }
    }
    r.check(
        3,
        "toeplitz inverse vs dense, n=4..256",
        inv_worst < TOEPLITZ_INV_TOL,
        format!("max rel err = {inv_worst:.3e} (tol {TOEPLITZ_INV_TOL:.0e})"),
    );
    r.check(
        3,
        "toeplitz matvec vs dense, n=4..256",
        mul_worst < TOEPLITZ_MUL_TOL,
        format!("max rel err = {mul_worst:.3e} (tol {TOEPLITZ_MUL_TOL:.0e})"),
    );
}

fn sgn(s: Sign) -> f64 {
    match s {
        Sign::Negative => -1.0,
        Sign::Positive => 1.0,
    }
}

fn type1_direct(x: &[f64], c: &[C], modes: usize, s: Sign) -> Vec<C> {
    let k0 = first_mode(modes);
    (0..modes as i64)
        .map(|i| {
            let k = (k0 + i) as f64;
            x.iter().zip(c).map(|(&xj, &cj)| cj * C::from_polar(1.0, sgn(s) * k * xj)).sum::<C>() / x.len() as f64
        })
        .collect()
}

fn type2_direct(x: &[f64], f: &[C], s: Sign) -> Vec<C> {
    let k0 = first_mode(f.len());
    x.iter()
        .map(|&xj| {
            f.iter()
                .enumerate()
                .map(|(i, &fk)| fk * C::from_polar(1.0, sgn(s) * (k0 + i as i64) as f64 * xj))
                .sum()
        })
        .collect()
}

fn dot(a: &[C], b: &[C]) -> C {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[C]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn criterion_nufft(r: &mut Report, fft: &RustFft) {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut adj_worst: f64 = 0.0;
    for eps in [1e-8, 1e-13] {
        let (mut w1, mut w2): (f64, f64) = (0.0, 0.0);
        for trial in 0..NUFFT_TRIALS {
            let modes = rng.gen_range(1..=256);
            let count = rng.gen_range(1..=300);
            let x: Vec<f64> = (0..count).map(|_| rng.gen_range(-PI..=PI)).collect();
            let c: Vec<C> = (0..count).map(|_| crandn(&mut rng)).collect();
            let f: Vec<C> = (0..modes).map(|_| crandn(&mut rng)).collect();
            let s = if trial % 2 == 0 { Sign::Negative } else { Sign::Positive };
            let t = if trial % 2 == 0 { Sign::Positive } else { Sign::Negative };
            let nodes = NodeSet::new(x.clone()).unwrap();
            let plan = NufftPlan::new(modes, eps).unwrap();
            let a1 = nufft_type1(fft, &plan, &nodes, &c, s).unwrap();
            let a2 = nufft_type2(fft, &plan, &nodes, &f, t).unwrap();
            w1 = w1.max(rel_l2(&a1, &type1_direct(&x, &c, modes, s)));
            w2 = w2.max(rel_l2(&a2, &type2_direct(&x, &f, t)));
            if eps == 1e-13 {
                // <type2_t f, c> = N <f, type1_s c> with t = -s.
                let lhs = dot(&a2, &c);
                let rhs = dot(&f, &a1) * count as f64;
                adj_worst = adj_worst.max((lhs - rhs).norm() / (norm(&a2) * norm(&c)));
            }
        }
        let tol = NUFFT_FACTOR * eps;
        r.check(
            4,
            &format!("nufft vs direct sums, eps={eps:.0e}, {NUFFT_TRIALS} trials"),
            w1 <= tol && w2 <= tol,
            format!("type-I {w1:.3e}, type-II {w2:.3e} (tol {tol:.0e})"),
        );
    }
    r.check(
        4,
        "nufft adjoint duality",
        adj_worst < ADJOINT_TOL,
        format!("max rel defect = {adj_worst:.3e} (tol {ADJOINT_TOL:.0e})"),
    );
}

fn criterion_resample(r: &mut Report, fft: &RustFft) {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (mut worst_ls, mut worst_exact): (f64, f64) = (0.0, 0.0);
    for &(modes, count) in &[(16, 24), (64, 65), (128, 200), (255, 300)] {
        let jitter = |rng: &mut ChaCha8Rng, len: usize| -> Vec<f64> {
            (0..len)
                .map(|j| -PI + 2.0 * PI * (j as f64 + rng.gen_range(0.0..0.5)) / len as f64)
                .collect()
        };
        let y = jitter(&mut rng, count);
        let x: Vec<f64> = (0..count).map(|_| rng.gen_range(-PI..=PI)).collect();
        let coeffs: Vec<C> = (0..modes).map(|_| crandn(&mut rng)).collect();
        let f = type2_direct(&y, &coeffs, Sign::Positive);
        let exact = type2_direct(&x, &coeffs, Sign::Positive);
        let (src, dst) = (NodeSet::new(y).unwrap(), NodeSet::new(x).unwrap());
        let fast = make_resample_plan(fft, &src, modes, 1e-13).unwrap().resample(fft, &f, &dst).unwrap();
        let slow = ls_resample(&src, &f, &dst, modes).unwrap();
        worst_ls = worst_ls.max(rel_l2(&fast, &slow));
        worst_exact = worst_exact.max(rel_l2(&fast, &exact));
    }
    r.check(
        5,
        "resampling of random trig polynomials",
        worst_ls < RESAMPLE_TOL && worst_exact < RESAMPLE_TOL,
        format!("vs LS {worst_ls:.3e}, vs exact {worst_exact:.3e} (tol {RESAMPLE_TOL:.0e})"),
    );
    for n in [512, 1024] {
        let rep = chirp_demo(fft, n, 1e-13).unwrap();
        r.check(
            5,
            &format!("chirp resampling n={n}"),
            rep.disagreement < RESAMPLE_TOL,
            format!(
                "disagreement {:.3e} (tol {RESAMPLE_TOL:.0e}); toeplitz {:.2e} s + plan {:.2e} s, LS {:.2e} s",
                rep.disagreement, rep.toeplitz_seconds, rep.precompute_seconds, rep.ls_seconds
            ),
        );
    }
}

fn criterion_forward(r: &mut Report, fft: &RustFft) {
    let (mut w_direct, mut w_oracle): (f64, f64) = (0.0, 0.0);
    for n in [4, 8, 16] {
        let g = GridParams::new(n, 3).unwrap();
        let vol = generate_volume(VolumeKind::RandomGaussian, n, 600 + n as u64).unwrap();
        let fast = ppft_forward_fast(fft, &vol, g).unwrap();
        w_direct = w_direct.max(ppft_rel(&fast, &ppft_direct(&vol, g)));
        w_oracle = w_oracle.max(ppft_rel(&fast, &ppft_forward_oracle(&vol, g).unwrap()));
    }
    r.check(
        6,
        "fast forward vs direct summation, n=4,8,16",
        w_direct < FORWARD_TOL && w_oracle < FORWARD_TOL,
        format!("vs direct {w_direct:.3e}, vs library oracle {w_oracle:.3e} (tol {FORWARD_TOL:.0e})"),
    );
}

fn criterion_shells(r: &mut Report, fft: &RustFft) {
    let n = 8;
    let g = GridParams::new(n, 3).unwrap();
    let vol = generate_volume(VolumeKind::RandomGaussian, n, 700).unwrap();
    let data = ppft_forward_fast(fft, &vol, g).unwrap();
    let plan = PeelPlan::new(fft, g, IppftOptions::default()).unwrap();
    let (q, m) = (g.q() as f64, g.m());
    let mut worst: f64 = 0.0;
    let mut depths = 0;
    peel_with(fft, &plan, &data, |j, cube| {
        depths += 1;
        let k = (n / 2 - j) as i64;
        let pts = theta_shell_indices(k, g).unwrap();
        let got: Vec<C> = pts.iter().map(|&[u, v, w]| cube.get(u, v, w).unwrap()).collect();
        let want: Vec<C> = pts
            .iter()
            .map(|&[u, v, w]| dtft_direct(&vol, [q * u as f64, q * v as f64, q * w as f64], m))
            .collect();
        worst = worst.max(rel_l2(&got, &want));
    })
    .unwrap();
    r.check(
        7,
        "shell values after each peeling depth, n=8",
        worst < SHELL_TOL && depths == n / 2 + 1,
        format!("{depths} depths, max rel err = {worst:.3e} (tol {SHELL_TOL:.0e})"),
    );
}

fn criterion_scaling(r: &mut Report, fft: &RustFft) {
    let rows = bench(
        fft,
        &[32, 64, 128],
        3,
        VolumeKind::RandomGaussian,
        800,
        IppftOptions::default(),
        TIMING_REPEATS,
    )
    .unwrap();
    let total = |n: usize| {
        rows.iter()
            .find(|m| m.n == n && m.stage == Stage::Total)
            .map(|m| m.seconds)
            .unwrap()
    };
    for (a, b) in [(32, 64), (64, 128)] {
        let ratio = total(b) / total(a);
        r.check(
            8,
            &format!("inversion time ratio t({b})/t({a})"),
            (RATIO_BAND.0..=RATIO_BAND.1).contains(&ratio),
            format!(
                "{:.3} s / {:.3} s = {ratio:.2} (band [{}, {}], best of {TIMING_REPEATS})",
                total(b),
                total(a),
                RATIO_BAND.0,
                RATIO_BAND.1
            ),
        );
    }
}

fn main() -> ExitCode {
    // `cargo test` passes libtest flags; this target has no filters.
    if std::env::args().any(|a| a == "--list") {
        return ExitCode::SUCCESS;
    }
    let fft = RustFft::new();
    let mut r = Report { failures: 0 };
    criterion_roundtrip(&mut r, &fft);
    criterion_condition(&mut r);
    criterion_toeplitz(&mut r, &fft);
    criterion_nufft(&mut r, &fft);
    criterion_resample(&mut r, &fft);
    criterion_forward(&mut r, &fft);
    criterion_shells(&mut r, &fft);
    criterion_scaling(&mut r, &fft);
    if r.failures == 0 {
        println!("acceptance: all criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {} check(s) failed", r.failures);
        ExitCode::FAILURE
    }
}
