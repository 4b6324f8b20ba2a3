//! Euler's constant and the Mertens constants
//!
//! ```text
//! E = -C0 - sum_p sum_{k>=2} log p / p^k = -C0 - sum_p log p / (p (p - 1))
//! B =  C0 - sum_p sum_{k>=2} 1 / (k p^k) =  C0 + sum_p (log(1 - 1/p) + 1/p)
//! ```
//!
//! The sums over `k` are taken in closed form, so the only truncation is in
//! `p`. The sums over `p <= P` are exact (compensated); the tails over
//! `p > P` are written as Stieltjes integrals against `theta(t)` and
//! evaluated with `theta(t) = t`, and the error of that replacement is
//! bounded with the explicit Rosser-Schoenfeld estimates
//!
//! ```text
//! x (1 - 1/(2 log x)) < theta(x) < x (1 + 1/(2 log x))     (x >= 563)
//! x (1 - 1/log x)     < theta(x)                            (x >= 41)
//! ```
//!
//! For a positive decreasing weight `w`,
//!
//! ```text
//! sum_{p>P} w(p) log p = w(P) (P - theta(P)) + int_P^inf w(t) dt
//!                        + O*( eps(P) * (P w(P) + int_P^inf w(t) dt) ).
//! ```

use serde::Serialize;

use crate::prime_engine::PrimeEngine;
use crate::summation::CompensatedSum;
use crate::{Error, Result};

/// Smallest accepted truncation point.
pub const MIN_PRIME_LIMIT: u64 = 100;

const EULER_MACLAURIN_TERMS: u32 = 200;

/// Euler's constant from the Euler-Maclaurin expansion of the harmonic
/// numbers at `n = 200`:
/// `C0 = H_n - log n - 1/(2n) + 1/(12 n^2) - 1/(120 n^4) + 1/(252 n^6) - ...`
pub fn euler_constant() -> f64 {
    let n = EULER_MACLAURIN_TERMS as f64;
    let mut h = CompensatedSum::new();
    for k in (1..=EULER_MACLAURIN_TERMS).rev() {
        h.add(1.0 / k as f64);
    }
    // B_{2k} / (2k) for k = 1..4
    const CORRECTIONS: [f64; 4] = [1.0 / 12.0, -1.0 / 120.0, 1.0 / 252.0, -1.0 / 240.0];
    let n2 = n * n;
    let mut power = n2;
    h.add(-n.ln());
    h.add(-0.5 / n);
    for c in CORRECTIONS {
        h.add(c / power);
        power *= n2;
    }
    h.value()
}

/// `Gamma'/Gamma(3/2) = -C0 - 2 log 2 + 2`.
pub fn digamma_three_halves() -> f64 {
    -euler_constant() - 2.0 * std::f64::consts::LN_2 + 2.0
}

/// `-sum_rho (1/(1 - rho) + 1/rho) = -C0 - 2 + log(4 pi)`, the sum running
/// over all nontrivial zeros of zeta.
pub fn zero_reciprocal_sum() -> f64 {
    -euler_constant() - 2.0 + (4.0 * std::f64::consts::PI).ln()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MertensConstants {
    pub c0: f64,
    pub e_const: f64,
    pub b_const: f64,
    pub prime_limit: u64,
    /// Certified bound on `|e_const - E|` and on `|b_const - B|`.
    pub tail_bound: f64,
    /// `sum_{p <= P} log p / (p (p - 1))`
    pub e_prime_sum: f64,
    /// `sum_{p <= P} (-log(1 - 1/p) - 1/p)`
    pub b_prime_sum: f64,
    /// Estimated contribution of the primes above `P` to `e_prime_sum`.
    pub e_tail: f64,
    /// Estimated contribution of the primes above `P` to `b_prime_sum`.
    pub b_tail: f64,
}

/// `-log(1 - u) - u` without cancellation for small `u`.
pub(crate) fn log_excess(u: f64) -> f64 {
    if u < 1e-3 {
        // u^2/2 + u^3/3 + ... ; eight terms exhaust double precision here.
        let mut term = u * u;
        let mut sum = 0.0;
        for k in 2..10 {
            sum += term / k as f64;
            term *= u;
        }
        sum
    } else {
        -(-u).ln_1p() - u
    }
}

/// Relative error bound for `theta(t)` valid for every `t >= p`.
fn theta_relative_error(p: f64) -> f64 {
    if p >= 563.0 {
        0.5 / p.ln()
    } else {
        1.0 / p.ln()
    }
}

pub fn compute_constants(prime_limit: u64) -> Result<MertensConstants> {
    compute_constants_with(&PrimeEngine::default(), prime_limit)
}

pub fn compute_constants_with(engine: &PrimeEngine, prime_limit: u64) -> Result<MertensConstants> {
    if prime_limit < MIN_PRIME_LIMIT {
        return Err(Error::Domain(format!(
            "prime limit {prime_limit} is below the minimum {MIN_PRIME_LIMIT}"
        )));
    }
    engine.check_limit(prime_limit)?;

    let mut e_sum = CompensatedSum::new();
    let mut b_sum = CompensatedSum::new();
    let mut theta = CompensatedSum::new();
    engine.for_each_prime(2, prime_limit, |p| {
        let pf = p as f64;
        let logp = pf.ln();
        e_sum.add(logp / (pf * (pf - 1.0)));
        b_sum.add(log_excess(1.0 / pf));
        theta.add(logp);
    })?;

    let c0 = euler_constant();
    let p = prime_limit as f64;
    let theta_p = theta.value();
    let eps = theta_relative_error(p);
    let log_p = p.ln();

    // E tail: w(t) = 1 / (t (t - 1)), int_P^inf w = log(P / (P - 1)).
    let w_e = 1.0 / (p * (p - 1.0));
    let int_e = -(-1.0 / p).ln_1p();
    let e_tail = w_e * (p - theta_p) + int_e;
    let e_bound = eps * (p * w_e + int_e);

    // B tail: w(t) = (-log(1 - 1/t) - 1/t) / log t. The integral is
    // bracketed with t^-2/2 <= -log(1 - 1/t) - 1/t <= t^-2 / (2 (1 - 1/t))
    // and e^-x/(x + 1) < E1(x) < e^-x/x at x = log P.
    let w_b = log_excess(1.0 / p) / log_p;
    let int_b_lo = 0.5 / (p * (log_p + 1.0));
    let int_b_hi = 0.5 / ((1.0 - 1.0 / p) * p * log_p);
    let int_b = 0.5 * (int_b_lo + int_b_hi);
    let b_tail = w_b * (p - theta_p) + int_b;
    let b_bound = eps * (p * w_b + int_b_hi) + 0.5 * (int_b_hi - int_b_lo);

    let e_prime_sum = e_sum.value();
    let b_prime_sum = b_sum.value();
    let rounding = 16.0 * f64::EPSILON * (e_prime_sum + c0);
    Ok(MertensConstants {
        c0,
        e_const: -c0 - e_prime_sum - e_tail,
        b_const: c0 - b_prime_sum - b_tail,
        prime_limit,
        tail_bound: e_bound.max(b_bound) + rounding,
        e_prime_sum,
        b_prime_sum,
        e_tail,
        b_tail,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent digamma: recurrence up to x >= 20 then the asymptotic
    /// series.
    fn digamma(mut x: f64) -> f64 {
        let mut acc = 0.0;
        while x < 20.0 {
            acc -= 1.0 / x;
            x += 1.0;
        }
        let x2 = 1.0 / (x * x);
        acc + x.ln() - 0.5 / x
            - x2 * (1.0 / 12.0 - x2 * (1.0 / 120.0 - x2 * (1.0 / 252.0 - x2 * (1.0 / 240.0 - x2 / 132.0))))
    }

    #[test]
    fn euler_constant_digits() {
        let c0 = euler_constant();
        assert!((c0 - 0.577_215_664_902).abs() < 5e-13, "{c0}");
        // Independent route: -digamma(1).
        assert!((c0 + digamma(1.0)).abs() < 1e-13);
    }

    #[test]
    fn gamma_identities() {
        let d = digamma_three_halves();
        assert!((d - 0.036_490).abs() < 1e-6, "{d}");
        assert!((d - digamma(1.5)).abs() < 1e-13);
        let z = zero_reciprocal_sum();
        assert!((z + 0.046_192).abs() < 1e-6, "{z}");
    }

    #[test]
    fn constants_at_a_million() {
        let k = compute_constants(1_000_000).unwrap();
        assert!(k.e_const > -1.333 && k.e_const <= -1.332, "{}", k.e_const);
        assert!(k.b_const >= 0.261 && k.b_const < 0.262, "{}", k.b_const);
        assert!((k.e_const + 1.332_582_275_7).abs() <= k.tail_bound);
        assert!((k.b_const - 0.261_497_212_847_6).abs() <= k.tail_bound);
        assert!(k.tail_bound < 1e-6);
        assert!(k.e_const < 0.0 && k.b_const > 0.0);
        assert!(k.e_const + k.c0 < 0.0);
        assert!(k.b_const < k.c0);
    }

    #[test]
    fn tail_bound_shrinks_and_is_consistent() {
        let small = compute_constants(100_000).unwrap();
        let big = compute_constants(1_000_000).unwrap();
        let bigger = compute_constants(10_000_000).unwrap();
        assert!(small.tail_bound > big.tail_bound && big.tail_bound > bigger.tail_bound);
        for (a, b) in [(&small, &big), (&big, &bigger)] {
            assert!((a.e_const - b.e_const).abs() <= a.tail_bound);
            assert!((a.b_const - b.b_const).abs() <= a.tail_bound);
            assert!(a.e_prime_sum < b.e_prime_sum);
            assert!(a.b_prime_sum < b.b_prime_sum);
            assert!(a.e_prime_sum > 0.0 && a.b_prime_sum > 0.0);
        }
    }

    #[test]
    fn e_prime_sum_matches_direct_power_enumeration() {
        let limit = 100_000u64;
        let k = compute_constants(limit).unwrap();
        let primes = PrimeEngine::default().primes_up_to(limit).unwrap();
        let mut direct = CompensatedSum::new();
        for &p in &primes {
            let pf = p as f64;
            let logp = pf.ln();
            let mut pk = pf * pf;
            while logp / pk > 1e-30 {
                direct.add(logp / pk);
                pk *= pf;
            }
        }
        assert!((direct.value() - k.e_prime_sum).abs() < 1e-12);

        let mut direct_b = CompensatedSum::new();
        for &p in &primes {
            let pf = p as f64;
            let mut pk = pf * pf;
            let mut j = 2.0;
            while 1.0 / (j * pk) > 1e-30 {
                direct_b.add(1.0 / (j * pk));
                pk *= pf;
                j += 1.0;
            }
        }
        assert!((direct_b.value() - k.b_prime_sum).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_limits() {
        assert!(compute_constants(99).is_err());
        assert!(compute_constants_with(&PrimeEngine::new(1000), 2000).is_err());
    }

    #[test]
    fn log_excess_branches_agree() {
        for u in [1e-3_f64, 9.99e-4, 1e-4, 0.3] {
            let direct = -(-u).ln_1p() - u;
            assert!((log_excess(u) - direct).abs() <= 1e-9 * direct, "{u}");
        }
    }
}
