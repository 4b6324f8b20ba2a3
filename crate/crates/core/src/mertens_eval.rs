//! Exact evaluation of `M1`, `M2` and related statistics from the sieve.
//!
//! Between consecutive primes the prime sums are constant, so
//! `M1(t) = S1 - log t - E` and `M2(t) = S2 - log log t - B` are continuous
//! and strictly decreasing there. Every operation here exploits that: the
//! infimum over `[p_k, p_{k+1})` is the left limit at `p_{k+1}`, and the set
//! where `M_i > 0` inside an interval is an explicit sub-interval.

use serde::Serialize;

use crate::constants::MertensConstants;
use crate::prime_engine::PrimeEngine;
use crate::summation::CompensatedSum;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MertensSample {
    pub x: f64,
    pub m1: f64,
    pub m2: f64,
    /// `sqrt(x) * m1`
    pub script_e: f64,
    /// `sqrt(x) * log(x) * m2`
    pub script_e2: f64,
}

impl MertensSample {
    fn from_sums(x: f64, logp_over_p: f64, recip_p: f64, k: &MertensConstants) -> Self {
        let log_x = x.ln();
        let m1 = logp_over_p - log_x - k.e_const;
        let m2 = recip_p - log_x.ln() - k.b_const;
        let root = x.sqrt();
        Self {
            x,
            m1,
            m2,
            script_e: root * m1,
            script_e2: root * log_x * m2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PositivityReport {
    pub limit: u64,
    pub verified: bool,
    pub min_m1: f64,
    pub min_m2: f64,
    /// Where the minimum is attained; a prime `p` stands for the left limit
    /// `x -> p-`.
    pub argmin_m1: f64,
    pub argmin_m2: f64,
    pub intervals_checked: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DensitySet {
    /// `{x >= 2 : M1(x) > 0}`
    W1,
    /// `{x >= 2 : M2(x) > 0}`
    W2,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DensityReport {
    pub which: DensitySet,
    pub upper_x: f64,
    /// `(1 / log(X/2)) * int_{[2, X], M_i > 0} dt / t` at `X = upper_x`.
    pub density: f64,
    /// Smallest and largest value of the same running density over
    /// `X in [max(4, sqrt(upper_x)), upper_x]`.
    pub lower_density: f64,
    pub upper_density: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Residuals {
    pub x: f64,
    /// `M1(x) - [sum_{n<=x} Lambda(n)/n - log x + C0]`
    pub lemma31: f64,
    /// `M1(x) - [(psi(x) - x)/x - int_x^cutoff (psi(t) - t)/t^2 dt]`
    pub lemma41: f64,
    /// Estimate of the omitted `int_cutoff^inf`, from the largest
    /// `|psi(t) - t| / sqrt(t)` over `[cutoff/2, cutoff]`.
    pub lemma41_tail: f64,
    /// `M2(x) - [-sum_{p<=x} log(1 - 1/p) - log log x - C0]`
    pub lemma51: f64,
    pub cutoff: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ErrorStatistics {
    pub x: f64,
    /// `(1/x) sum_{t=2}^{floor x} |psi(t) - t| / sqrt(t)`
    pub cramer_avg: f64,
    /// `sum_{t=ceil x}^{floor 2x} |psi(t) - t|`
    pub dyadic_integral: f64,
    /// `x sqrt(x)`, the scale the dyadic integral is compared with.
    pub x_sqrt_x: f64,
}

/// Logarithmically spaced grid, endpoints included.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LogGrid {
    pub x_min: f64,
    pub x_max: f64,
    pub points: usize,
}

impl LogGrid {
    pub fn new(x_min: f64, x_max: f64, points: usize) -> Result<Self> {
        if !(x_min > 1.0 && x_max > x_min && x_max.is_finite()) {
            return Err(Error::InvalidGrid(format!(
                "need 1 < x_min < x_max, got {x_min}..{x_max}"
            )));
        }
        if points < 2 {
            return Err(Error::InvalidGrid(format!("need at least 2 points, got {points}")));
        }
        Ok(Self {
            x_min,
            x_max,
            points,
        })
    }

    pub fn values(&self) -> Vec<f64> {
        let span = (self.x_max / self.x_min).ln();
        let last = self.points - 1;
        (0..self.points)
            .map(|i| match i {
                0 => self.x_min,
                i if i == last => self.x_max,
                i => self.x_min * (span * i as f64 / last as f64).exp(),
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanReport {
    pub samples: Vec<MertensSample>,
    pub sign_changes_m1: usize,
    pub sign_changes_m2: usize,
    pub sign_changes_script_e: usize,
}

fn sign_changes(values: impl Iterator<Item = f64>) -> usize {
    let mut count = 0;
    let mut prev: Option<bool> = None;
    for v in values {
        let positive = v > 0.0;
        if prev.is_some_and(|p| p != positive) {
            count += 1;
        }
        prev = Some(positive);
    }
    count
}

/// Evaluator bound to a sieve configuration and a set of constants.
#[derive(Debug, Clone)]
pub struct MertensEvaluator {
    engine: PrimeEngine,
    constants: MertensConstants,
}

impl MertensEvaluator {
    pub fn new(engine: PrimeEngine, constants: MertensConstants) -> Self {
        Self { engine, constants }
    }

    pub fn with_constants(constants: MertensConstants) -> Self {
        Self::new(PrimeEngine::default(), constants)
    }

    pub fn constants(&self) -> &MertensConstants {
        &self.constants
    }

    pub fn engine(&self) -> &PrimeEngine {
        &self.engine
    }

    pub fn evaluate(&self, x: f64) -> Result<MertensSample> {
        if !(x > 1.0) || !x.is_finite() {
            return Err(Error::Domain(format!("M1, M2 need x > 1, got {x}")));
        }
        let l = self.engine.prime_sums(x)?;
        Ok(MertensSample::from_sums(
            x,
            l.sum_logp_over_p,
            l.sum_recip_p,
            &self.constants,
        ))
    }

    /// Evaluates an ascending list of points in one pass over the primes.
    pub fn evaluate_many(&self, xs: &[f64]) -> Result<Vec<MertensSample>> {
        if let Some(&bad) = xs.iter().find(|&&x| !(x > 1.0) || !x.is_finite()) {
            return Err(Error::Domain(format!("M1, M2 need x > 1, got {bad}")));
        }
        if xs.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::InvalidGrid("points must be ascending".into()));
        }
        let Some(&x_max) = xs.last() else {
            return Ok(Vec::new());
        };
        let n = x_max.floor() as u64;
        self.engine.check_limit(n)?;
        let k = &self.constants;
        let mut s1 = CompensatedSum::new();
        let mut s2 = CompensatedSum::new();
        let mut out = Vec::with_capacity(xs.len());
        let mut next = 0;
        self.engine.for_each_prime(2, n, |p| {
            let pf = p as f64;
            while next < xs.len() && xs[next] < pf {
                out.push(MertensSample::from_sums(xs[next], s1.value(), s2.value(), k));
                next += 1;
            }
            s1.add(pf.ln() / pf);
            s2.add(1.0 / pf);
        })?;
        for &x in &xs[next..] {
            out.push(MertensSample::from_sums(x, s1.value(), s2.value(), k));
        }
        Ok(out)
    }

    pub fn scan(&self, grid: &LogGrid) -> Result<ScanReport> {
        let samples = self.evaluate_many(&grid.values())?;
        Ok(ScanReport {
            sign_changes_m1: sign_changes(samples.iter().map(|s| s.m1)),
            sign_changes_m2: sign_changes(samples.iter().map(|s| s.m2)),
            sign_changes_script_e: sign_changes(samples.iter().map(|s| s.script_e)),
            samples,
        })
    }

    /// Certifies `M1 > 0` and `M2 > 0` on `(1, limit]` by checking the left
    /// limit at every prime `p <= limit` and the value at `limit`.
    pub fn verify_positivity(&self, limit: u64) -> Result<PositivityReport> {
        if limit < 10 {
            return Err(Error::Domain(format!("positivity limit must be >= 10, got {limit}")));
        }
        self.engine.check_limit(limit)?;
        let k = &self.constants;
        let mut s1 = CompensatedSum::new();
        let mut s2 = CompensatedSum::new();
        let mut report = PositivityReport {
            limit,
            verified: false,
            min_m1: f64::INFINITY,
            min_m2: f64::INFINITY,
            argmin_m1: f64::NAN,
            argmin_m2: f64::NAN,
            intervals_checked: 0,
        };
        let check = |x: f64, s1: f64, s2: f64, report: &mut PositivityReport| {
            let log_x = x.ln();
            let m1 = s1 - log_x - k.e_const;
            let m2 = s2 - log_x.ln() - k.b_const;
            if m1 < report.min_m1 {
                report.min_m1 = m1;
                report.argmin_m1 = x;
            }
            if m2 < report.min_m2 {
                report.min_m2 = m2;
                report.argmin_m2 = x;
            }
            report.intervals_checked += 1;
        };
        self.engine.for_each_prime(2, limit, |p| {
            let pf = p as f64;
            check(pf, s1.value(), s2.value(), &mut report);
            s1.add(pf.ln() / pf);
            s2.add(1.0 / pf);
        })?;
        check(limit as f64, s1.value(), s2.value(), &mut report);
        report.verified = report.min_m1 > 0.0 && report.min_m2 > 0.0;
        Ok(report)
    }

    pub fn residuals(&self, x: f64) -> Result<Residuals> {
        self.residuals_with_cutoff(x, 100.0 * x)
    }

    pub fn residuals_with_cutoff(&self, x: f64, cutoff: f64) -> Result<Residuals> {
        if !(x >= 100.0) || !x.is_finite() {
            return Err(Error::Domain(format!("residuals need x >= 100, got {x}")));
        }
        if !(cutoff >= x) {
            return Err(Error::Domain(format!("cutoff {cutoff} is below x = {x}")));
        }
        let k = &self.constants;
        let l = self.engine.prime_sums(x)?;
        let sample = MertensSample::from_sums(x, l.sum_logp_over_p, l.sum_recip_p, k);
        let log_x = x.ln();
        let lemma31 = sample.m1 - (l.lambda_over_n - log_x + k.c0);
        let lemma51 = sample.m2 - (l.neg_log_product - log_x.ln() - k.c0);

        // psi is constant between prime powers; integrate each piece exactly.
        let jumps = self.prime_power_jumps(x.floor() as u64 + 1, cutoff.floor() as u64)?;
        let mut integral = CompensatedSum::new();
        let mut psi = l.psi;
        let mut a = x;
        let mut tail_max: f64 = 0.0;
        let half = 0.5 * cutoff;
        let mut piece = |a: f64, b: f64, psi: f64, integral: &mut CompensatedSum| {
            if b > a {
                integral.add(psi * (1.0 / a - 1.0 / b) - ((b - a) / a).ln_1p());
                if b >= half {
                    let lo = a.max(half);
                    tail_max = tail_max
                        .max((psi - lo).abs() / lo.sqrt())
                        .max((psi - b).abs() / b.sqrt());
                }
            }
        };
        for (n, logp) in jumps {
            let b = n as f64;
            piece(a, b, psi, &mut integral);
            psi += logp;
            a = b;
        }
        piece(a, cutoff, psi, &mut integral);
        let lemma41 = sample.m1 - ((l.psi - x) / x - integral.value());
        Ok(Residuals {
            x,
            lemma31,
            lemma41,
            lemma41_tail: 2.0 * tail_max / cutoff.sqrt(),
            lemma51,
            cutoff,
        })
    }

    pub fn error_statistics(&self, x: f64) -> Result<ErrorStatistics> {
        if !(x >= 2.0) || !x.is_finite() {
            return Err(Error::Domain(format!("error statistics need x >= 2, got {x}")));
        }
        let top = (2.0 * x).floor() as u64;
        self.engine.check_limit(top)?;
        let jumps = self.prime_power_jumps(2, top)?;
        let lower = x.floor() as u64;
        let dyadic_start = x.ceil() as u64;
        let mut cramer = CompensatedSum::new();
        let mut dyadic = CompensatedSum::new();
        let mut psi = CompensatedSum::new();
        let mut jumps = jumps.into_iter().peekable();
        for t in 2..=top {
            while let Some(&(n, logp)) = jumps.peek() {
                if n > t {
                    break;
                }
                psi.add(logp);
                jumps.next();
            }
            let tf = t as f64;
            let dev = (psi.value() - tf).abs();
            if t <= lower {
                cramer.add(dev / tf.sqrt());
            }
            if t >= dyadic_start {
                dyadic.add(dev);
            }
        }
        Ok(ErrorStatistics {
            x,
            cramer_avg: cramer.value() / x,
            dyadic_integral: dyadic.value(),
            x_sqrt_x: x * x.sqrt(),
        })
    }

    pub fn empirical_log_density(&self, which: DensitySet, upper_x: f64) -> Result<DensityReport> {
        if !(upper_x >= 10.0) || !upper_x.is_finite() {
            return Err(Error::Domain(format!(
                "log density needs upper_x >= 10, got {upper_x}"
            )));
        }
        let n = upper_x.floor() as u64;
        self.engine.check_limit(n)?;
        let k = &self.constants;
        // Above this point of the current interval M_i is <= 0.
        let crossing = |s: f64| -> f64 {
            match which {
                DensitySet::W1 => (s - k.e_const).exp(),
                DensitySet::W2 => (s - k.b_const).exp().exp(),
            }
        };
        let window_start = upper_x.sqrt().max(4.0);
        let log_half = std::f64::consts::LN_2;
        let mut measure = CompensatedSum::new();
        let mut lower = f64::INFINITY;
        let mut upper = f64::NEG_INFINITY;
        let mut observe = |t: f64, measure: f64| {
            if t >= window_start {
                let f = measure / (t.ln() - log_half);
                lower = lower.min(f);
                upper = upper.max(f);
            }
        };
        // Adds the positive part of [a, b) where the prime sum is s.
        let mut interval = |a: f64, b: f64, s: f64, measure: &mut CompensatedSum| {
            if b <= a {
                return;
            }
            if a < window_start && window_start < b {
                let c = crossing(s).clamp(a, window_start);
                observe(window_start, measure.value() + (c / a).ln());
            }
            let c = crossing(s);
            if c >= b {
                measure.add((b / a).ln());
            } else if c > a {
                measure.add((c / a).ln());
                observe(c, measure.value());
            }
            observe(b, measure.value());
        };
        let mut s = CompensatedSum::new();
        let mut a = 2.0;
        self.engine.for_each_prime(2, n, |p| {
            let pf = p as f64;
            interval(a, pf, s.value(), &mut measure);
            s.add(match which {
                DensitySet::W1 => pf.ln() / pf,
                DensitySet::W2 => 1.0 / pf,
            });
            a = pf;
        })?;
        interval(a, upper_x, s.value(), &mut measure);
        let density = measure.value() / (upper_x / 2.0).ln();
        Ok(DensityReport {
            which,
            upper_x,
            density,
            lower_density: lower.clamp(0.0, 1.0).min(density),
            upper_density: upper.clamp(0.0, 1.0).max(density),
        })
    }

    /// `(n, log p)` for every prime power `n = p^k` in `[lo, hi]`, ascending.
    fn prime_power_jumps(&self, lo: u64, hi: u64) -> Result<Vec<(u64, f64)>> {
        if hi < lo {
            return Ok(Vec::new());
        }
        let mut jumps = Vec::new();
        self.engine.for_each_prime(lo, hi, |p| jumps.push((p, (p as f64).ln())))?;
        self.engine.for_each_prime(2, crate::prime_engine::isqrt(hi), |p| {
            let logp = (p as f64).ln();
            let mut pk = p;
            while let Some(next) = pk.checked_mul(p).filter(|&v| v <= hi) {
                pk = next;
                if pk >= lo {
                    jumps.push((pk, logp));
                }
            }
        })?;
        jumps.sort_unstable_by_key(|&(n, _)| n);
        Ok(jumps)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::compute_constants;

    fn evaluator() -> MertensEvaluator {
        MertensEvaluator::with_constants(compute_constants(1_000_000).unwrap())
    }

    #[test]
    fn values_at_two_and_ten() {
        let ev = evaluator();
        let s = ev.evaluate(2.0).unwrap();
        assert!((s.m1 - 0.9861).abs() < 1e-4, "{}", s.m1);
        assert!((s.m2 - 0.6050).abs() < 1e-4, "{}", s.m2);
        let s = ev.evaluate(10.0).unwrap();
        assert!((s.m1 - 0.34265).abs() < 1e-5, "{}", s.m1);
        assert!((s.script_e - 1.0836).abs() < 1e-4, "{}", s.script_e);
        assert!((s.m2 - 0.08066).abs() < 1e-5, "{}", s.m2);
        assert!((s.script_e2 - 10f64.sqrt() * 10f64.ln() * s.m2).abs() < 1e-15);
    }

    #[test]
    fn rejects_x_at_most_one() {
        let ev = evaluator();
        assert!(ev.evaluate(1.0).is_err());
        assert!(ev.evaluate(0.3).is_err());
        assert!(ev.evaluate(f64::NAN).is_err());
    }

    #[test]
    fn evaluate_many_matches_pointwise() {
        let ev = evaluator();
        let xs = [2.0, 2.5, 3.0, 10.0, 97.0, 97.5, 1000.0];
        let many = ev.evaluate_many(&xs).unwrap();
        for (x, s) in xs.iter().zip(&many) {
            let single = ev.evaluate(*x).unwrap();
            assert!((single.m1 - s.m1).abs() < 1e-14);
            assert!((single.m2 - s.m2).abs() < 1e-14);
        }
        assert!(ev.evaluate_many(&[3.0, 2.0]).is_err());
    }

    #[test]
    fn positivity_at_ten_by_enumeration() {
        let ev = evaluator();
        let k = ev.constants();
        let r = ev.verify_positivity(10).unwrap();
        // Left limits at 2, 3, 5, 7 and the endpoint 10.
        let mut s1 = 0.0;
        let mut s2 = 0.0;
        let mut expect_m1 = f64::INFINITY;
        let mut expect_m2 = f64::INFINITY;
        for (x, p) in [(2.0, 2.0), (3.0, 3.0), (5.0, 5.0), (7.0, 7.0), (10.0, f64::NAN)] {
            let x: f64 = x;
            expect_m1 = expect_m1.min(s1 - x.ln() - k.e_const);
            expect_m2 = expect_m2.min(s2 - x.ln().ln() - k.b_const);
            if p.is_finite() {
                s1 += p.ln() / p;
                s2 += 1.0 / p;
            }
        }
        assert!((r.min_m1 - expect_m1).abs() < 1e-14);
        assert!((r.min_m2 - expect_m2).abs() < 1e-14);
        assert_eq!(r.intervals_checked, 5);
        assert!(r.verified);
        assert!(r.argmin_m1 > 1.0 && r.argmin_m1 <= 10.0);
    }

    #[test]
    fn positivity_to_a_million() {
        let r = evaluator().verify_positivity(1_000_000).unwrap();
        assert!(r.verified);
        assert!(r.min_m1 > 0.0 && r.min_m2 > 0.0);
        assert_eq!(r.intervals_checked, 78_498 + 1);
    }

    #[test]
    fn scan_grids() {
        let ev = evaluator();
        let r = ev.scan(&LogGrid::new(2.0, 1e4, 10).unwrap()).unwrap();
        assert_eq!(r.samples.len(), 10);
        assert!(r.samples.iter().all(|s| s.m1 > 0.0 && s.m2 > 0.0));
        let r = ev.scan(&LogGrid::new(2.0, 2.000_000_1, 2).unwrap()).unwrap();
        assert_eq!(r.samples.len(), 2);
        assert_eq!(r.sign_changes_m1 + r.sign_changes_m2 + r.sign_changes_script_e, 0);
        assert!(LogGrid::new(1.0, 10.0, 5).is_err());
        assert!(LogGrid::new(5.0, 4.0, 5).is_err());
        assert!(LogGrid::new(2.0, 4.0, 1).is_err());
    }

    #[test]
    fn sign_change_counter() {
        assert_eq!(sign_changes([1.0, -1.0, -2.0, 3.0].into_iter()), 2);
        assert_eq!(sign_changes([1.0, 2.0].into_iter()), 0);
        assert_eq!(sign_changes(std::iter::empty()), 0);
    }

    #[test]
    fn residual_bounds() {
        let ev = evaluator();
        for x in [1e3, 1e4] {
            let r = ev.residuals(x).unwrap();
            assert!(r.lemma31.abs() <= 5.0 / x.sqrt(), "{r:?}");
            assert!(r.lemma51.abs() <= 10.0 / x, "{r:?}");
            assert!(r.lemma41_tail > 0.0);
        }
        let r = ev.residuals(100.0).unwrap();
        assert!(r.lemma51.abs() < 0.1);
        assert!(ev.residuals(50.0).is_err());
        assert!(ev.residuals_with_cutoff(1000.0, 999.0).is_err());
    }

    #[test]
    fn lemma41_integral_against_per_integer_quadrature() {
        // Independent route: unit steps over a trial-division psi table.
        let ev = evaluator();
        let x = 100.0;
        let cutoff = 400.0;
        let r = ev.residuals_with_cutoff(x, cutoff).unwrap();
        let mut lambda = vec![0.0f64; 401];
        for p in 2..=400usize {
            if (2..p).take_while(|d| d * d <= p).all(|d| p % d != 0) {
                let mut pk = p;
                while pk <= 400 {
                    lambda[pk] = (p as f64).ln();
                    pk *= p;
                }
            }
        }
        let mut psi = vec![0.0f64; 401];
        for n in 1..=400 {
            psi[n] = psi[n - 1] + lambda[n];
        }
        let mut integral = CompensatedSum::new();
        for (n, &p) in psi.iter().enumerate().take(400).skip(100) {
            let (a, b) = (n as f64, n as f64 + 1.0);
            integral.add(p * (1.0 / a - 1.0 / b) - (b / a).ln());
        }
        let integral = integral.value();
        let s = ev.evaluate(x).unwrap();
        let expected = s.m1 - ((psi[100] - x) / x - integral);
        assert!((r.lemma41 - expected).abs() < 1e-13, "{} vs {expected}", r.lemma41);
    }

    #[test]
    fn error_statistics_at_ten_by_hand() {
        let ev = evaluator();
        let r = ev.error_statistics(10.0).unwrap();
        let psi = |t: u32| -> f64 {
            (2..=t)
                .map(|n| {
                    let p = (2..=n).find(|d| n % d == 0).unwrap();
                    let mut m = n;
                    while m % p == 0 {
                        m /= p;
                    }
                    if m == 1 {
                        (p as f64).ln()
                    } else {
                        0.0
                    }
                })
                .sum()
        };
        let cramer: f64 = (2..=10).map(|t| (psi(t) - t as f64).abs() / (t as f64).sqrt()).sum::<f64>() / 10.0;
        let dyadic: f64 = (10..=20).map(|t| (psi(t) - t as f64).abs()).sum();
        assert!((r.cramer_avg - cramer).abs() < 1e-14);
        assert!((r.dyadic_integral - dyadic).abs() < 1e-12);
        assert_eq!(r.x_sqrt_x, 10.0 * 10f64.sqrt());
    }

    #[test]
    fn error_statistics_are_small_at_1e5() {
        let r = evaluator().error_statistics(1e5).unwrap();
        assert!(r.cramer_avg < 1.0);
        assert!(r.dyadic_integral / r.x_sqrt_x < 1.0);
    }

    #[test]
    fn log_density_is_one_where_positive() {
        let ev = evaluator();
        for which in [DensitySet::W1, DensitySet::W2] {
            let r = ev.empirical_log_density(which, 10.0).unwrap();
            assert!((r.density - 1.0).abs() < 1e-12, "{r:?}");
            assert!(r.lower_density <= r.upper_density);
            let r = ev.empirical_log_density(which, 1e5).unwrap();
            assert!((r.density - 1.0).abs() < 1e-9, "{r:?}");
            assert!((r.lower_density - 1.0).abs() < 1e-9);
        }
        assert!(ev.empirical_log_density(DensitySet::W1, 9.0).is_err());
    }

    #[test]
    fn log_density_sees_a_shifted_constant() {
        // With E raised by 0.5, M1 < 0 on part of [2, 100]; the measured
        // density must match a brute-force fine-grid integration.
        let mut k = compute_constants(1000).unwrap();
        k.e_const += 0.5;
        let ev = MertensEvaluator::with_constants(k);
        let r = ev.empirical_log_density(DensitySet::W1, 100.0).unwrap();
        assert!(r.density > 0.0 && r.density < 1.0);
        let steps = 2_000_000;
        let (a, b) = (2f64.ln(), 100f64.ln());
        let h = (b - a) / steps as f64;
        let grid: Vec<f64> = (0..steps).map(|i| (a + (i as f64 + 0.5) * h).exp()).collect();
        let samples = ev.evaluate_many(&grid).unwrap();
        let positive = samples.iter().filter(|s| s.m1 > 0.0).count() as f64 * h;
        assert!((r.density - positive / (b - a)).abs() < 1e-5);
        assert!(r.lower_density <= r.density && r.density <= r.upper_density);
    }
}
