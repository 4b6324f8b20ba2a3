//! Generator for the ordinates of the first nontrivial zeros of zeta.
//!
//! `Z(t) = e^{i theta(t)} zeta(1/2 + it)` is evaluated with Euler-Maclaurin
//! summation below [`RS_THRESHOLD`] and with the Riemann-Siegel formula
//! (four correction terms) above it. Zeros are isolated between Gram points
//! using Rosser's rule: in every Gram block the number of sign changes must
//! equal the block length, and the grid is refined until it does. Each
//! sign change is then refined by the Illinois method.

use std::f64::consts::{PI, TAU};
use std::fs;
use std::io::Write;
use std::path::Path;

use num_complex::Complex64;

/// Below this height `Z` comes from Euler-Maclaurin summation.
pub const RS_THRESHOLD: f64 = 500.0;

const EM_TERMS: usize = 20;
const MAX_REFINEMENT: usize = 1 << 10;
const ROOT_TOLERANCE: f64 = 1e-12;

/// Riemann-Siegel theta function (asymptotic series).
pub fn theta(t: f64) -> f64 {
    let t2 = 1.0 / (t * t);
    t / 2.0 * (t / TAU).ln() - t / 2.0 - PI / 8.0
        + (1.0 / 48.0 + t2 * (7.0 / 5760.0 + t2 * (31.0 / 80640.0 + t2 * 127.0 / 430080.0))) / t
}

fn theta_derivative(t: f64) -> f64 {
    0.5 * (t / TAU).ln()
}

/// `t` with `theta(t) = n pi`, for `n >= -1`.
pub fn gram_point(n: i64) -> f64 {
    let target = n as f64 * PI;
    let mut t = if n < 10 {
        18.0 + 2.0 * n as f64
    } else {
        // theta(t) ~ (t/2) log(t / (2 pi e))
        let mut t = TAU * (n as f64 + 1.0);
        for _ in 0..6 {
            t = 2.0 * (target + PI / 8.0) / ((t / (TAU * std::f64::consts::E)).ln());
        }
        t
    };
    for _ in 0..50 {
        let step = (theta(t) - target) / theta_derivative(t);
        t -= step;
        if step.abs() < 1e-13 * t {
            break;
        }
    }
    t
}

/// `B_{2k} / (2k)!` for `k = 1..=EM_TERMS`, from
/// `B_{2k}/(2k)! = (-1)^{k+1} 2 zeta(2k) / (2 pi)^{2k}`.
fn bernoulli_ratios() -> [f64; EM_TERMS] {
    let mut out = [0.0; EM_TERMS];
    for (i, slot) in out.iter_mut().enumerate() {
        let k = i as i32 + 1;
        let zeta = if k == 1 {
            PI * PI / 6.0
        } else {
            (1..=10_000).rev().map(|n| (n as f64).powi(-2 * k)).sum()
        };
        let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
        *slot = sign * 2.0 * zeta / TAU.powi(2 * k);
    }
    out
}

/// `zeta(1/2 + it)` by Euler-Maclaurin summation.
fn zeta_em(t: f64, bernoulli: &[f64; EM_TERMS]) -> Complex64 {
    let s = Complex64::new(0.5, t);
    let n = (t / PI).ceil() as usize + 10;
    let mut sum = Complex64::new(0.0, 0.0);
    for k in 1..n {
        sum += (-s * (k as f64).ln()).exp();
    }
    let nf = n as f64;
    let n_s = (-s * nf.ln()).exp();
    sum += n_s * nf / (s - 1.0) + 0.5 * n_s;
    // Rising product s (s+1) ... (s + 2k - 2) times N^{-s-2k+1}.
    let mut rising = s;
    let mut power = n_s / nf;
    for (k, &b) in bernoulli.iter().enumerate() {
        sum += b * rising * power;
        let j = 2.0 * k as f64;
        rising *= (s + j + 1.0) * (s + j + 2.0);
        power /= nf * nf;
    }
    sum
}

/// Even Taylor coefficients of `Psi(p) = cos(2 pi (p^2 - p - 1/16)) / cos(2 pi p)`
/// about `p = 1/2`, indexed by half the power.
const PSI: [f64; 31] = [
    0.382_683_432_365_089_8,
    1.748_961_872_310_081_7,
    2.118_025_207_685_496,
    -0.870_721_667_051_148_1,
    -3.473_311_224_346_516_5,
    -1.662_694_730_899_932_5,
    1.216_731_288_919_232,
    1.301_430_416_100_797_7,
    0.030_511_021_827_361_67,
    -0.375_580_305_154_509_5,
    -0.108_578_441_656_406_6,
    0.051_832_902_999_549_624,
    0.029_999_480_619_902_277,
    -0.002_275_939_670_612_564_4,
    -0.004_382_647_416_580_339,
    -0.000_406_423_018_372_984_7,
    0.000_400_609_778_542_211_4,
    8.971_057_991_388_841e-5,
    -2.302_565_002_723_910_8e-5,
    -9.380_006_601_906_792e-6,
    6.323_514_947_609_108e-7,
    6.551_022_819_231_502e-7,
    2.210_523_745_552_697e-8,
    -3.322_316_176_445_629e-8,
    -3.734_910_989_933_656e-9,
    1.244_506_706_079_773_8e-9,
    2.476_820_537_650_219e-10,
    -3.284_272_816_891_627e-11,
    -1.130_540_685_229_840_4e-11,
    4.565_463_979_588_694e-13,
    3.959_848_094_524_921_4e-13,
];

/// `d`-th derivative of `Psi` at `p = 1/2 + u`.
fn psi_derivative(d: u32, u: f64) -> f64 {
    let mut sum = 0.0;
    for (i, &c) in PSI.iter().enumerate().rev() {
        let k = 2 * i as u32;
        if k < d {
            break;
        }
        let falling: f64 = (k - d + 1..=k).map(f64::from).product();
        sum += c * falling * u.powi((k - d) as i32);
    }
    sum
}

/// Evaluates `Z` with tables sized for heights up to some bound.
pub struct ZEvaluator {
    bernoulli: [f64; EM_TERMS],
    log_n: Vec<f64>,
    inv_sqrt_n: Vec<f64>,
}

impl ZEvaluator {
    pub fn new(max_height: f64) -> Self {
        let terms = (max_height.max(RS_THRESHOLD) / TAU).sqrt() as usize + 2;
        Self {
            bernoulli: bernoulli_ratios(),
            log_n: (0..=terms).map(|n| (n as f64).ln()).collect(),
            inv_sqrt_n: (0..=terms).map(|n| 1.0 / (n as f64).sqrt()).collect(),
        }
    }

    /// Hardy's `Z(t)` for `t > 0`.
    pub fn z(&self, t: f64) -> f64 {
        if t < RS_THRESHOLD {
            (Complex64::from_polar(1.0, theta(t)) * zeta_em(t, &self.bernoulli)).re
        } else {
            self.riemann_siegel(t)
        }
    }

    fn riemann_siegel(&self, t: f64) -> f64 {
        let a = (t / TAU).sqrt();
        let n = a.floor() as usize;
        assert!(n < self.log_n.len(), "height {t} beyond the evaluator's tables");
        let th = theta(t);
        let mut sum = 0.0;
        for k in 1..=n {
            sum += self.inv_sqrt_n[k] * (th - t * self.log_n[k]).cos();
        }
        let u = a - n as f64 - 0.5;
        let (pi2, pi4, pi6) = (PI * PI, PI.powi(4), PI.powi(6));
        let c0 = psi_derivative(0, u);
        let c1 = -psi_derivative(3, u) / (96.0 * pi2);
        let c2 = psi_derivative(2, u) / (64.0 * pi2) + psi_derivative(6, u) / (18432.0 * pi4);
        let c3 = -psi_derivative(1, u) / (64.0 * pi2)
            - psi_derivative(5, u) / (3840.0 * pi4)
            - psi_derivative(9, u) / (5_308_416.0 * pi6);
        let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
        let remainder = sign / a.sqrt() * (c0 + (c1 + (c2 + c3 / a) / a) / a);
        2.0 * sum + remainder
    }

    /// Root of `Z` in `[lo, hi]`, where `Z` changes sign.
    fn refine(&self, mut lo: f64, mut hi: f64, mut f_lo: f64, mut f_hi: f64) -> f64 {
        // Illinois variant of regula falsi.
        let mut side = 0;
        for _ in 0..100 {
            let mid = (lo * f_hi - hi * f_lo) / (f_hi - f_lo);
            let f_mid = self.z(mid);
            if f_mid == 0.0 || hi - lo < ROOT_TOLERANCE * hi {
                return mid;
            }
            if (f_mid > 0.0) == (f_hi > 0.0) {
                hi = mid;
                f_hi = f_mid;
                if side == -1 {
                    f_lo *= 0.5;
                }
                side = -1;
            } else {
                lo = mid;
                f_lo = f_mid;
                if side == 1 {
                    f_hi *= 0.5;
                }
                side = 1;
            }
            if (hi - lo).abs() < ROOT_TOLERANCE * hi {
                break;
            }
        }
        0.5 * (lo + hi)
    }
}

fn gram_sign(n: i64) -> f64 {
    if n.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

/// The first `count` ordinates, ascending.
pub fn first_zeros(count: usize) -> Result<Vec<f64>, String> {
    // N(T) ~ (T/2pi) log(T/2pi e): a generous height bound for the tables.
    let mut height = 100.0;
    while height / TAU * (height / (TAU * std::f64::consts::E)).ln() < count as f64 + 100.0 {
        height *= 1.5;
    }
    let ev = ZEvaluator::new(height);
    let mut zeros: Vec<f64> = Vec::with_capacity(count + 8);

    let mut a: i64 = -1;
    let mut g_a = gram_point(a);
    let mut z_a = ev.z(g_a);
    if gram_sign(a) * z_a <= 0.0 {
        return Err(format!("Gram point g_-1 = {g_a} is bad"));
    }
    while zeros.len() < count {
        // Extend to the next good Gram point.
        let mut points = vec![(g_a, z_a)];
        let mut b = a;
        loop {
            b += 1;
            let g = gram_point(b);
            let z = ev.z(g);
            points.push((g, z));
            if gram_sign(b) * z > 0.0 {
                break;
            }
            if b - a > 64 {
                return Err(format!("no good Gram point after g_{a} = {g_a}"));
            }
        }
        let expected = (b - a) as usize;
        let mut found = None;
        let mut subdivisions = 1;
        while subdivisions <= MAX_REFINEMENT {
            let samples = sample_block(&ev, &points, subdivisions);
            let changes: Vec<usize> = (1..samples.len())
                .filter(|&i| (samples[i].1 > 0.0) != (samples[i - 1].1 > 0.0))
                .collect();
            if changes.len() == expected {
                found = Some((samples, changes));
                break;
            }
            if changes.len() > expected {
                return Err(format!(
                    "{} sign changes in the Gram block [{}, {}], expected {expected}",
                    changes.len(),
                    points[0].0,
                    points[points.len() - 1].0
                ));
            }
            subdivisions *= 2;
        }
        let Some((samples, changes)) = found else {
            return Err(format!(
                "missing zeros in the Gram block [{}, {}]",
                points[0].0,
                points[points.len() - 1].0
            ));
        };
        for i in changes {
            let (lo, f_lo) = samples[i - 1];
            let (hi, f_hi) = samples[i];
            zeros.push(ev.refine(lo, hi, f_lo, f_hi));
        }
        a = b;
        g_a = points[points.len() - 1].0;
        z_a = points[points.len() - 1].1;
    }
    zeros.truncate(count);
    Ok(zeros)
}

/// `(t, Z(t))` on the Gram points of a block with `subdivisions` equal
/// steps inside each Gram interval.
fn sample_block(ev: &ZEvaluator, points: &[(f64, f64)], subdivisions: usize) -> Vec<(f64, f64)> {
    let mut out = vec![points[0]];
    for w in points.windows(2) {
        let (g0, g1) = (w[0].0, w[1].0);
        for j in 1..subdivisions {
            let t = g0 + (g1 - g0) * j as f64 / subdivisions as f64;
            out.push((t, ev.z(t)));
        }
        out.push(w[1]);
    }
    out
}

/// Writes one ordinate per line with 12 decimals, via a temporary file.
pub fn write_table(path: &Path, zeros: &[f64]) -> std::io::Result<()> {
    let tmp = path.with_extension("tmp");
    {
        let mut f = std::io::BufWriter::new(fs::File::create(&tmp)?);
        for g in zeros {
            writeln!(f, "{g:.12}")?;
        }
        f.flush()?;
    }
    fs::rename(tmp, path)
}
