//! Bessel function of the first kind of order zero.
//!
//! Three regimes, each accurate to a few ulps of `max(1, |J0|)`:
//! the Taylor series on `|t| <= 4`, the periodic trapezoid rule for
//! `J0(t) = (1/2pi) int_0^{2pi} cos(t cos u) du` on `4 < |t| <= 25`, and the
//! Hankel expansion beyond.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use crate::{Error, Result};

const SERIES_LIMIT: f64 = 4.0;
const TRAPEZOID_LIMIT: f64 = 25.0;
// Aliasing error is of order J_64(25) ~ 1e-18.
const TRAPEZOID_NODES: usize = 64;

/// `J0(t)`; errors on non-finite input.
pub fn bessel_j0(t: f64) -> Result<f64> {
    if !t.is_finite() {
        return Err(Error::Domain(format!("J0 needs a finite argument, got {t}")));
    }
    Ok(j0(t))
}

/// `J0(t)` for finite `t`; NaN otherwise.
pub fn j0(t: f64) -> f64 {
    let a = t.abs();
    if a <= SERIES_LIMIT {
        series(a)
    } else if a <= TRAPEZOID_LIMIT {
        trapezoid(a)
    } else {
        hankel(a)
    }
}

fn series(t: f64) -> f64 {
    let q = -0.25 * t * t;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..=30 {
        term *= q / (k * k) as f64;
        sum += term;
        if term.abs() < 1e-18 {
            break;
        }
    }
    sum
}

fn trapezoid(t: f64) -> f64 {
    // cos(t cos u) is even about u = 0 and u = pi; nodes on [0, pi] with
    // half weight at the ends reproduce the full periodic rule.
    let half = TRAPEZOID_NODES / 2;
    let step = PI / half as f64;
    let mut sum = 0.5 * (t.cos() + (-t).cos());
    for k in 1..half {
        sum += (t * (k as f64 * step).cos()).cos();
    }
    sum / half as f64
}

fn hankel(t: f64) -> f64 {
    // With a_k = prod_{j=1..k} (2j - 1)^2 / (k! 8^k t^k):
    // P = a_0 - a_2 + a_4 - ..., Q = -a_1 + a_3 - a_5 + ...
    let mut p = 0.0;
    let mut q = 0.0;
    let mut a = 1.0;
    for k in 0..40 {
        let term = a;
        match k % 4 {
            0 => p += term,
            1 => q -= term,
            2 => p -= term,
            _ => q += term,
        }
        let next = a * ((2 * k + 1) * (2 * k + 1)) as f64 / (8.0 * (k + 1) as f64 * t);
        if next < 1e-17 || next > a {
            break;
        }
        a = next;
    }
    // cos(t - pi/4) and sin(t - pi/4) from the accurately reduced cos t, sin t.
    let (s, c) = t.sin_cos();
    let cos_chi = FRAC_1_SQRT_2 * (c + s);
    let sin_chi = FRAC_1_SQRT_2 * (s - c);
    (2.0 / (PI * t)).sqrt() * (p * cos_chi - q * sin_chi)
}
