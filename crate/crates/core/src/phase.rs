//! Phases `gamma * y mod 2 pi` for large `gamma * y`.
//!
//! The product is formed exactly as a double-double with an FMA and reduced
//! against a two-word split of `2 pi`, so the reduced phase carries the
//! accuracy of the inputs instead of losing `log2(gamma * y)` bits.

use std::f64::consts::TAU;

// TAU = TAU_HI + TAU_LO to about 2^-107.
const TAU_HI: f64 = TAU;
const TAU_LO: f64 = 2.449_293_598_294_706_4e-16;

/// `gamma * y` reduced to `[-pi, pi]`.
#[inline]
pub(crate) fn reduced_phase(gamma: f64, y: f64) -> f64 {
    let p = gamma * y;
    let p_err = gamma.mul_add(y, -p);
    let k = (p / TAU).round();
    let kh = k * TAU_HI;
    let kh_err = k.mul_add(TAU_HI, -kh);
    ((p - kh) - kh_err) + (p_err - k * TAU_LO)
}

/// `(cos(gamma y), sin(gamma y))`.
#[inline]
pub(crate) fn cos_sin(gamma: f64, y: f64) -> (f64, f64) {
    let (s, c) = reduced_phase(gamma, y).sin_cos();
    (c, s)
}
